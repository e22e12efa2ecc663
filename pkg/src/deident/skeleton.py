"""Stickman rendering: joint circles plus bone lines at frame resolution.

Rasterization is exact by construction: a disc covers every pixel whose
center lies within the radius of the joint, and a bone covers every pixel
whose center lies within thickness/2 of the ideal segment. All membership
tests are integer arithmetic, so renders are bit-identical across runs and
platforms and can be checked against a per-pixel distance scan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frame_model import KEYPOINT_COUNT, RGB, KeypointSet, SkeletonTopology

LANDMARK_NAMES = (
    "nose",
    "left_eye_inner", "left_eye", "left_eye_outer",
    "right_eye_inner", "right_eye", "right_eye_outer",
    "left_ear", "right_ear",
    "mouth_left", "mouth_right",
    "left_shoulder", "right_shoulder",
    "left_elbow", "right_elbow",
    "left_wrist", "right_wrist",
    "left_pinky", "right_pinky",
    "left_index", "right_index",
    "left_thumb", "right_thumb",
    "left_hip", "right_hip",
    "left_knee", "right_knee",
    "left_ankle", "right_ankle",
    "left_heel", "right_heel",
    "left_foot_index", "right_foot_index",
)
assert len(LANDMARK_NAMES) == KEYPOINT_COUNT

# Canonical 33-landmark body topology: face outline, torso, arms, hands,
# legs, feet. 35 edges.
DEFAULT_TOPOLOGY = SkeletonTopology(edges=(
    (0, 1), (1, 2), (2, 3), (3, 7),
    (0, 4), (4, 5), (5, 6), (6, 8),
    (9, 10),
    (11, 12), (11, 13), (13, 15),
    (15, 17), (15, 19), (15, 21), (17, 19),
    (12, 14), (14, 16),
    (16, 18), (16, 20), (16, 22), (18, 20),
    (11, 23), (12, 24), (23, 24),
    (23, 25), (24, 26), (25, 27), (26, 28),
    (27, 29), (28, 30), (29, 31), (30, 32),
    (27, 31), (28, 32),
))


@dataclass(frozen=True)
class RenderStyle:
    """Stickman appearance. Keypoints below min_visibility are not drawn,
    nor are their incident edges."""

    joint_radius: int = 3
    line_thickness: int = 2
    joint_color: RGB = (255, 255, 255)
    bone_color: RGB = (0, 255, 0)
    min_visibility: float = 0.5

    def __post_init__(self):
        if self.joint_radius < 1:
            raise ValueError(f"joint_radius must be >= 1, got {self.joint_radius}")
        if self.line_thickness < 1:
            raise ValueError(f"line_thickness must be >= 1, got {self.line_thickness}")
        if not 0.0 <= self.min_visibility <= 1.0:
            raise ValueError(f"min_visibility must be in [0, 1], got {self.min_visibility}")


def to_pixel_coords(
    kp: KeypointSet, width: int, height: int, min_visibility: float = 0.5
) -> list[tuple[int, int, bool]]:
    """Project normalized keypoints onto a width x height pixel grid.

    x = round(nx * (width - 1)) with round-half-up, clamped into bounds;
    same for y. visible is visibility >= min_visibility.
    """
    if width < 1 or height < 1:
        raise ValueError(f"target dimensions must be positive, got {width}x{height}")
    pts = kp.points
    xs = np.clip(np.floor(pts[:, 0] * (width - 1) + 0.5).astype(int), 0, width - 1)
    ys = np.clip(np.floor(pts[:, 1] * (height - 1) + 0.5).astype(int), 0, height - 1)
    vis = pts[:, 3] >= min_visibility
    return [(int(x), int(y), bool(v)) for x, y, v in zip(xs, ys, vis)]


def draw_disc(canvas: np.ndarray, cx: int, cy: int, radius: int, color: RGB) -> None:
    """Fill every pixel with (px-cx)^2 + (py-cy)^2 <= radius^2."""
    h, w = canvas.shape[:2]
    x_lo, x_hi = max(cx - radius, 0), min(cx + radius, w - 1)
    y_lo, y_hi = max(cy - radius, 0), min(cy + radius, h - 1)
    if x_lo > x_hi or y_lo > y_hi:
        return
    xs = np.arange(x_lo, x_hi + 1, dtype=np.int64) - cx
    ys = np.arange(y_lo, y_hi + 1, dtype=np.int64) - cy
    inside = xs[None, :] ** 2 + ys[:, None] ** 2 <= radius * radius
    canvas[y_lo:y_hi + 1, x_lo:x_hi + 1][inside] = np.asarray(color, dtype=np.uint8)


def draw_segment(
    canvas: np.ndarray,
    x0: int, y0: int,
    x1: int, y1: int,
    thickness: int,
    color: RGB,
) -> None:
    """Fill every pixel whose center is within thickness/2 of the segment.

    The membership test dist^2 <= (t/2)^2 is evaluated in exact integer
    arithmetic: with d = p1 - p0, v = p - p0, s = v.d and L2 = |d|^2, the
    interior case is 4*(|v|^2 * L2 - s^2) <= t^2 * L2, and the endpoint
    cases reduce to 4*|p - end|^2 <= t^2.
    """
    h, w = canvas.shape[:2]
    pad = thickness // 2 + 1
    x_lo, x_hi = max(min(x0, x1) - pad, 0), min(max(x0, x1) + pad, w - 1)
    y_lo, y_hi = max(min(y0, y1) - pad, 0), min(max(y0, y1) + pad, h - 1)
    if x_lo > x_hi or y_lo > y_hi:
        return
    xs = np.arange(x_lo, x_hi + 1, dtype=np.int64)
    ys = np.arange(y_lo, y_hi + 1, dtype=np.int64)
    vx = xs[None, :] - x0
    vy = ys[:, None] - y0
    t2 = thickness * thickness
    dx, dy = x1 - x0, y1 - y0
    l2 = dx * dx + dy * dy
    d2_start = vx * vx + vy * vy
    if l2 == 0:
        inside = 4 * d2_start <= t2
    else:
        s = vx * dx + vy * dy
        ex = xs[None, :] - x1
        ey = ys[:, None] - y1
        d2_end = ex * ex + ey * ey
        inside = np.where(
            s <= 0,
            4 * d2_start <= t2,
            np.where(s >= l2, 4 * d2_end <= t2, 4 * (d2_start * l2 - s * s) <= t2 * l2),
        )
    canvas[y_lo:y_hi + 1, x_lo:x_hi + 1][inside] = np.asarray(color, dtype=np.uint8)


def render_skeleton(
    canvas: np.ndarray,
    kps: list[KeypointSet] | tuple[KeypointSet, ...],
    topology: SkeletonTopology = DEFAULT_TOPOLOGY,
    style: RenderStyle = RenderStyle(),
) -> np.ndarray:
    """Draw stickmen for every person onto the canvas, in place.

    All bones are drawn first, then all joints, so joints sit on top. An
    edge is drawn only when both endpoints are visible; a hidden keypoint
    produces no circle and suppresses its incident edges. Pixels outside
    the drawn primitives are untouched.
    """
    if canvas.ndim != 3 or canvas.shape[2] != 3 or canvas.dtype != np.uint8:
        raise ValueError("canvas must be an (h, w, 3) uint8 array")
    h, w = canvas.shape[:2]
    projected = [to_pixel_coords(kp, w, h, style.min_visibility) for kp in kps]
    for pts in projected:
        for a, b in topology.edges:
            xa, ya, va = pts[a]
            xb, yb, vb = pts[b]
            if va and vb:
                draw_segment(canvas, xa, ya, xb, yb, style.line_thickness, style.bone_color)
    for pts in projected:
        for x, y, visible in pts:
            if visible:
                draw_disc(canvas, x, y, style.joint_radius, style.joint_color)
    return canvas
