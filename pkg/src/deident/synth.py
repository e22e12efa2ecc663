"""Synthetic test scenes with known ground truth, plus evaluation metrics.

Generated scenes come with the exact background, per-frame actor masks, and
keypoint tracks, so anonymization quality can be measured instead of
eyeballed. Mask noise knobs simulate model misses: whole-actor false
negatives per frame and per-pixel false-positive salt.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .frame_model import Frame, HumanMask, KeypointSet
from .skeleton import draw_disc, draw_segment, DEFAULT_TOPOLOGY

FLAT_COLOR = (96, 112, 128)
CHECKER_COLORS = ((90, 105, 120), (170, 180, 190))
CHECKER_CELL = 8


class BackgroundKind(enum.Enum):
    FLAT = "flat"
    GRADIENT = "gradient"
    CHECKER = "checker"
    NOISE = "noise"


class ActorShape(enum.Enum):
    RECT = "rect"
    ELLIPSE = "ellipse"
    STICK_FIGURE = "stick_figure"


@dataclass(frozen=True)
class Stationary:
    pos: tuple[float, float]


@dataclass(frozen=True)
class Linear:
    start: tuple[float, float]
    velocity: tuple[float, float]


@dataclass(frozen=True)
class Waypoints:
    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.points) < 1:
            raise ValueError("waypoint trajectory needs at least one point")


Trajectory = Stationary | Linear | Waypoints


@dataclass(frozen=True)
class ActorSpec:
    """One synthetic person-stand-in: a shape moving along a trajectory.

    size is the bounding-box height in pixels; positions are box centers.
    """

    shape: ActorShape
    size: int
    trajectory: Trajectory
    color: tuple[int, int, int]

    def __post_init__(self):
        if self.size < 1:
            raise ValueError(f"actor size must be >= 1, got {self.size}")


@dataclass(frozen=True)
class MaskNoise:
    false_negative_prob: float = 0.0
    false_positive_prob: float = 0.0
    seed: int = 0

    def __post_init__(self):
        for name in ("false_negative_prob", "false_positive_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {p}")


@dataclass(frozen=True)
class SceneSpec:
    width: int
    height: int
    frames: int
    background_kind: BackgroundKind = BackgroundKind.FLAT
    background_seed: int = 0
    actors: tuple[ActorSpec, ...] = ()
    mask_noise: MaskNoise = field(default_factory=MaskNoise)

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError(f"scene dimensions must be positive, got {self.width}x{self.height}")
        if self.frames < 0:
            raise ValueError(f"frame count must be >= 0, got {self.frames}")
        object.__setattr__(self, "actors", tuple(self.actors))


@dataclass(frozen=True)
class GeneratedScene:
    """Frames plus everything needed to score a run against ground truth.

    observed_masks are what a segmentation model would have produced (truth
    plus injected noise); with noise probabilities at zero they equal
    truth_masks exactly.
    """

    frames: tuple[Frame, ...]
    truth_masks: tuple[HumanMask, ...]
    observed_masks: tuple[HumanMask, ...]
    keypoints: tuple[tuple[KeypointSet, ...], ...]
    background: np.ndarray


# Standing 33-landmark template in a unit box, x right, y down.
_FIGURE_TEMPLATE = np.array([
    (0.50, 0.080),                                    # nose
    (0.53, 0.055), (0.56, 0.055), (0.59, 0.055),      # left eye inner/center/outer
    (0.47, 0.055), (0.44, 0.055), (0.41, 0.055),      # right eye inner/center/outer
    (0.62, 0.070), (0.38, 0.070),                     # ears
    (0.53, 0.110), (0.47, 0.110),                     # mouth corners
    (0.65, 0.220), (0.35, 0.220),                     # shoulders
    (0.72, 0.380), (0.28, 0.380),                     # elbows
    (0.70, 0.520), (0.30, 0.520),                     # wrists
    (0.71, 0.575), (0.29, 0.575),                     # pinkies
    (0.73, 0.570), (0.27, 0.570),                     # index fingers
    (0.69, 0.550), (0.31, 0.550),                     # thumbs
    (0.58, 0.520), (0.42, 0.520),                     # hips
    (0.60, 0.720), (0.40, 0.720),                     # knees
    (0.59, 0.900), (0.41, 0.900),                     # ankles
    (0.58, 0.955), (0.42, 0.955),                     # heels
    (0.66, 0.975), (0.34, 0.975),                     # foot tips
], dtype=np.float64)


def _box_dims(actor: ActorSpec) -> tuple[int, int]:
    if actor.shape is ActorShape.RECT:
        return actor.size, actor.size
    if actor.shape is ActorShape.ELLIPSE:
        return max(1, round(actor.size * 0.75)), actor.size
    return max(3, round(actor.size * 0.6)), actor.size


def _center_at(trajectory: Trajectory, frame: int, total: int) -> tuple[float, float]:
    if isinstance(trajectory, Stationary):
        return trajectory.pos
    if isinstance(trajectory, Linear):
        return (
            trajectory.start[0] + trajectory.velocity[0] * frame,
            trajectory.start[1] + trajectory.velocity[1] * frame,
        )
    points = trajectory.points
    if len(points) == 1 or total <= 1:
        return points[0]
    t = frame / (total - 1) * (len(points) - 1)
    seg = min(int(t), len(points) - 2)
    u = t - seg
    ax, ay = points[seg]
    bx, by = points[seg + 1]
    return ((1.0 - u) * ax + u * bx, (1.0 - u) * ay + u * by)


def _actor_origin(actor: ActorSpec, frame: int, total: int, width: int, height: int):
    bw, bh = _box_dims(actor)
    if bw > width or bh > height:
        raise ValueError(
            f"actor of size {actor.size} ({bw}x{bh} box) does not fit in a "
            f"{width}x{height} scene"
        )
    cx, cy = _center_at(actor.trajectory, frame, total)
    ox = min(max(round(cx - bw / 2.0), 0), width - bw)
    oy = min(max(round(cy - bh / 2.0), 0), height - bh)
    return int(ox), int(oy), bw, bh


def _figure_pixels(ox: int, oy: int, bw: int, bh: int) -> np.ndarray:
    pts = np.empty_like(_FIGURE_TEMPLATE)
    pts[:, 0] = ox + _FIGURE_TEMPLATE[:, 0] * (bw - 1)
    pts[:, 1] = oy + _FIGURE_TEMPLATE[:, 1] * (bh - 1)
    return np.floor(pts + 0.5).astype(int)


def _actor_stencil(actor: ActorSpec, ox: int, oy: int, bw: int, bh: int,
                   width: int, height: int) -> np.ndarray:
    stencil = np.zeros((height, width), dtype=bool)
    if actor.shape is ActorShape.RECT:
        stencil[oy:oy + bh, ox:ox + bw] = True
        return stencil
    if actor.shape is ActorShape.ELLIPSE:
        ecx, ecy = ox + (bw - 1) / 2.0, oy + (bh - 1) / 2.0
        rx, ry = max(bw / 2.0, 0.5), max(bh / 2.0, 0.5)
        xs = (np.arange(width) - ecx) / rx
        ys = (np.arange(height) - ecy) / ry
        stencil[:] = xs[None, :] ** 2 + ys[:, None] ** 2 <= 1.0
        return stencil
    # Stick figure: reuse the exact render primitives on a scratch canvas.
    scratch = np.zeros((height, width, 3), dtype=np.uint8)
    pts = _figure_pixels(ox, oy, bw, bh)
    thickness = max(1, actor.size // 12)
    radius = max(1, actor.size // 16)
    head_radius = max(1, round(actor.size * 0.10))
    for a, b in DEFAULT_TOPOLOGY.edges:
        draw_segment(scratch, pts[a, 0], pts[a, 1], pts[b, 0], pts[b, 1],
                     thickness, (255, 255, 255))
    for i, (px, py) in enumerate(pts):
        draw_disc(scratch, px, py, head_radius if i == 0 else radius, (255, 255, 255))
    return scratch[:, :, 0] > 0


def _figure_keypoints(actor_index: int, ox: int, oy: int, bw: int, bh: int,
                      width: int, height: int) -> KeypointSet:
    pts = np.zeros((33, 4), dtype=np.float64)
    px = ox + _FIGURE_TEMPLATE[:, 0] * (bw - 1)
    py = oy + _FIGURE_TEMPLATE[:, 1] * (bh - 1)
    pts[:, 0] = np.clip(px / (width - 1) if width > 1 else 0.0, 0.0, 1.0)
    pts[:, 1] = np.clip(py / (height - 1) if height > 1 else 0.0, 0.0, 1.0)
    pts[:, 3] = 1.0
    return KeypointSet(pts, person_id=actor_index)


def render_background(spec: SceneSpec) -> np.ndarray:
    """Ground-truth background raster for a scene spec."""
    h, w = spec.height, spec.width
    if spec.background_kind is BackgroundKind.FLAT:
        bg = np.empty((h, w, 3), dtype=np.uint8)
        bg[:] = FLAT_COLOR
    elif spec.background_kind is BackgroundKind.GRADIENT:
        bg = np.empty((h, w, 3), dtype=np.uint8)
        bg[:, :, 0] = (np.arange(w) * 255 // max(w - 1, 1))[None, :]
        bg[:, :, 1] = (np.arange(h) * 255 // max(h - 1, 1))[:, None]
        bg[:, :, 2] = 96
    elif spec.background_kind is BackgroundKind.CHECKER:
        ys, xs = np.mgrid[0:h, 0:w]
        parity = (ys // CHECKER_CELL + xs // CHECKER_CELL) % 2
        bg = np.where(parity[..., None] == 0,
                      np.asarray(CHECKER_COLORS[0], dtype=np.uint8),
                      np.asarray(CHECKER_COLORS[1], dtype=np.uint8))
    else:
        rng = np.random.default_rng(spec.background_seed)
        bg = rng.integers(0, 256, size=(h, w, 3), dtype=np.uint8)
    return bg


def generate(spec: SceneSpec) -> GeneratedScene:
    """Render a scene deterministically from its spec (seeds included).

    Truth masks cover actor pixels exactly. False negatives drop whole
    actors from the observed mask of a frame; false positives salt
    individual pixels. Stick-figure actors also emit a 33-point keypoint
    set per frame.
    """
    background = render_background(spec)
    rng = np.random.default_rng(spec.mask_noise.seed)
    fn = spec.mask_noise.false_negative_prob
    fp = spec.mask_noise.false_positive_prob

    frames: list[Frame] = []
    truth_masks: list[HumanMask] = []
    observed_masks: list[HumanMask] = []
    keypoints: list[tuple[KeypointSet, ...]] = []
    for f in range(spec.frames):
        pixels = background.copy()
        truth = np.zeros((spec.height, spec.width), dtype=bool)
        observed = np.zeros((spec.height, spec.width), dtype=bool)
        frame_kps: list[KeypointSet] = []
        for a, actor in enumerate(spec.actors):
            ox, oy, bw, bh = _actor_origin(actor, f, spec.frames, spec.width, spec.height)
            stencil = _actor_stencil(actor, ox, oy, bw, bh, spec.width, spec.height)
            pixels[stencil] = np.asarray(actor.color, dtype=np.uint8)
            truth |= stencil
            missed = fn > 0.0 and rng.random() < fn
            if not missed:
                observed |= stencil
            if actor.shape is ActorShape.STICK_FIGURE:
                frame_kps.append(
                    _figure_keypoints(a, ox, oy, bw, bh, spec.width, spec.height)
                )
        if fp > 0.0:
            observed |= rng.random((spec.height, spec.width)) < fp
        pixels.setflags(write=False)
        frames.append(Frame(pixels, index=f))
        truth_masks.append(HumanMask(truth))
        observed_masks.append(HumanMask(observed))
        keypoints.append(tuple(frame_kps))

    background.setflags(write=False)
    return GeneratedScene(
        frames=tuple(frames),
        truth_masks=tuple(truth_masks),
        observed_masks=tuple(observed_masks),
        keypoints=tuple(keypoints),
        background=background,
    )


def _pixels_of(image) -> np.ndarray:
    return np.asarray(getattr(image, "pixels", image))


def psnr(a, b, exclude: np.ndarray | None = None) -> float:
    """Peak signal-to-noise ratio in dB over included pixels, peak 255.

    exclude marks pixels to leave out (e.g. an UNSET map). Identical inputs
    give math.inf. Raises if no pixels remain.
    """
    pa, pb = _pixels_of(a), _pixels_of(b)
    if pa.shape != pb.shape:
        raise ValueError(f"image shapes differ: {pa.shape} vs {pb.shape}")
    diff = pa.astype(np.float64) - pb.astype(np.float64)
    if exclude is not None:
        if exclude.shape != pa.shape[:2]:
            raise ValueError("exclude map shape does not match images")
        diff = diff[~exclude]
    if diff.size == 0:
        raise ValueError("no pixels left to compare")
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)


def leakage(output_frames, ground_truth_masks, input_frames, background) -> float:
    """Fraction of human-region positions whose output pixel still carries
    the input value, over positions where that equality is evidence (the
    input differs from the true background there).

    All sequences must have equal length. Returns 0.0 when no position in
    any frame qualifies.
    """
    bg = _pixels_of(background)
    numerator = denominator = 0
    sentinel = object()
    iters = [iter(output_frames), iter(ground_truth_masks), iter(input_frames)]
    while True:
        out, mask, inp = (next(it, sentinel) for it in iters)
        got = [x is not sentinel for x in (out, mask, inp)]
        if not any(got):
            break
        if not all(got):
            raise ValueError("output, mask, and input sequences have different lengths")
        po, pi = _pixels_of(out), _pixels_of(inp)
        human = mask.human if isinstance(mask, HumanMask) else np.asarray(mask)
        evidence = human & (pi != bg).any(axis=2)
        denominator += int(evidence.sum())
        numerator += int((evidence & (po == pi).all(axis=2)).sum())
    if denominator == 0:
        return 0.0
    return numerator / denominator


# --- scene spec <-> JSON document ---------------------------------------

def _require(mapping: dict, key: str, kind, where: str):
    if key not in mapping:
        raise ConfigError(f"{where}.{key}: required")
    value = mapping[key]
    if kind is float:
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise ConfigError(f"{where}.{key}: expected a number")
        return float(value)
    if kind is int and (not isinstance(value, int) or isinstance(value, bool)):
        raise ConfigError(f"{where}.{key}: expected an integer")
    if not isinstance(value, kind):
        raise ConfigError(f"{where}.{key}: expected {kind.__name__}")
    return value


def _pair(value, where: str) -> tuple[float, float]:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in value)):
        raise ConfigError(f"{where}: expected [x, y]")
    return float(value[0]), float(value[1])


def _color(value, where: str) -> tuple[int, int, int]:
    if (not isinstance(value, (list, tuple)) or len(value) != 3
            or not all(isinstance(v, int) and not isinstance(v, bool) and 0 <= v <= 255
                       for v in value)):
        raise ConfigError(f"{where}: expected [r, g, b] with values in 0..255")
    return int(value[0]), int(value[1]), int(value[2])


def _enum_member(enum_cls, value, where: str):
    try:
        return enum_cls(value)
    except ValueError:
        options = ", ".join(m.value for m in enum_cls)
        raise ConfigError(f"{where}: expected one of {options}, got {value!r}") from None


def _trajectory_from_json(doc, where: str) -> Trajectory:
    if not isinstance(doc, dict):
        raise ConfigError(f"{where}: expected an object")
    kind = _require(doc, "kind", str, where)
    if kind == "stationary":
        return Stationary(_pair(_require(doc, "pos", object, where), f"{where}.pos"))
    if kind == "linear":
        return Linear(
            _pair(_require(doc, "start", object, where), f"{where}.start"),
            _pair(_require(doc, "velocity", object, where), f"{where}.velocity"),
        )
    if kind == "waypoints":
        raw = _require(doc, "points", list, where)
        if not raw:
            raise ConfigError(f"{where}.points: needs at least one point")
        return Waypoints(tuple(_pair(p, f"{where}.points[{i}]") for i, p in enumerate(raw)))
    raise ConfigError(f"{where}.kind: expected stationary, linear, or waypoints, got {kind!r}")


def _trajectory_to_json(trajectory: Trajectory) -> dict:
    if isinstance(trajectory, Stationary):
        return {"kind": "stationary", "pos": list(trajectory.pos)}
    if isinstance(trajectory, Linear):
        return {"kind": "linear", "start": list(trajectory.start),
                "velocity": list(trajectory.velocity)}
    return {"kind": "waypoints", "points": [list(p) for p in trajectory.points]}


def scene_spec_from_json(doc) -> SceneSpec:
    """Parse a scene spec document, raising ConfigError naming the bad field."""
    if not isinstance(doc, dict):
        raise ConfigError("scene: expected a JSON object")
    known = {"width", "height", "frames", "background", "actors", "mask_noise"}
    for key in doc:
        if key not in known:
            raise ConfigError(f"scene.{key}: unknown field")
    width = _require(doc, "width", int, "scene")
    height = _require(doc, "height", int, "scene")
    frames = _require(doc, "frames", int, "scene")

    kind, bg_seed = BackgroundKind.FLAT, 0
    if "background" in doc:
        bg = doc["background"]
        if not isinstance(bg, dict):
            raise ConfigError("scene.background: expected an object")
        for key in bg:
            if key not in {"kind", "seed"}:
                raise ConfigError(f"scene.background.{key}: unknown field")
        kind = _enum_member(BackgroundKind, _require(bg, "kind", str, "scene.background"),
                            "scene.background.kind")
        if "seed" in bg:
            bg_seed = _require(bg, "seed", int, "scene.background")

    actors = []
    for i, actor_doc in enumerate(doc.get("actors", [])):
        where = f"scene.actors[{i}]"
        if not isinstance(actor_doc, dict):
            raise ConfigError(f"{where}: expected an object")
        for key in actor_doc:
            if key not in {"shape", "size", "trajectory", "color"}:
                raise ConfigError(f"{where}.{key}: unknown field")
        shape = _enum_member(ActorShape, _require(actor_doc, "shape", str, where),
                             f"{where}.shape")
        size = _require(actor_doc, "size", int, where)
        trajectory = _trajectory_from_json(_require(actor_doc, "trajectory", object, where),
                                           f"{where}.trajectory")
        color = _color(_require(actor_doc, "color", object, where), f"{where}.color")
        try:
            actors.append(ActorSpec(shape, size, trajectory, color))
        except ValueError as exc:
            raise ConfigError(f"{where}: {exc}") from None

    noise = MaskNoise()
    if "mask_noise" in doc:
        nd = doc["mask_noise"]
        if not isinstance(nd, dict):
            raise ConfigError("scene.mask_noise: expected an object")
        for key in nd:
            if key not in {"false_negative_prob", "false_positive_prob", "seed"}:
                raise ConfigError(f"scene.mask_noise.{key}: unknown field")
        try:
            noise = MaskNoise(
                false_negative_prob=float(nd.get("false_negative_prob", 0.0)),
                false_positive_prob=float(nd.get("false_positive_prob", 0.0)),
                seed=nd.get("seed", 0),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"scene.mask_noise: {exc}") from None

    try:
        return SceneSpec(width=width, height=height, frames=frames,
                         background_kind=kind, background_seed=bg_seed,
                         actors=tuple(actors), mask_noise=noise)
    except ValueError as exc:
        raise ConfigError(f"scene: {exc}") from None


def scene_spec_to_json(spec: SceneSpec) -> dict:
    return {
        "width": spec.width,
        "height": spec.height,
        "frames": spec.frames,
        "background": {"kind": spec.background_kind.value, "seed": spec.background_seed},
        "actors": [
            {
                "shape": actor.shape.value,
                "size": actor.size,
                "trajectory": _trajectory_to_json(actor.trajectory),
                "color": list(actor.color),
            }
            for actor in spec.actors
        ],
        "mask_noise": {
            "false_negative_prob": spec.mask_noise.false_negative_prob,
            "false_positive_prob": spec.mask_noise.false_positive_prob,
            "seed": spec.mask_noise.seed,
        },
    }
