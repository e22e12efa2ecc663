"""On-disk formats: PNG frame sequences, JSON sidecars, RLE masks, manifests.

Video containers are out of scope; streams are numbered PNG files plus a
stream.json manifest. A sidecar frame_NNNNNN.json carries the frame's binary
mask (run-length encoded) and zero or more 33-point keypoint sets.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import StorageError
from .frame_model import Background, Frame, HumanMask, KeypointSet

FRAME_NAME = "frame_{:06d}.png"
SIDECAR_NAME = "frame_{:06d}.json"
MANIFEST_NAME = "stream.json"
BACKGROUND_NAME = "background.png"
BACKGROUND_UNSET_NAME = "background_unset.json"


@dataclass(frozen=True)
class StreamManifest:
    width: int
    height: int
    frames: int
    fps_num: int = 30
    fps_den: int = 1

    @property
    def fps(self) -> Fraction:
        return Fraction(self.fps_num, self.fps_den)


def mask_to_rle(mask: HumanMask) -> dict:
    """Row-major run-length encoding; runs alternate starting with non-human."""
    flat = mask.human.ravel()
    if flat.size == 0:
        return {"size": [mask.height, mask.width], "counts": []}
    change = np.flatnonzero(flat[1:] != flat[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [flat.size]))
    counts = (ends - starts).tolist()
    if flat[0]:
        counts.insert(0, 0)  # leading zero-length non-human run
    return {"size": [mask.height, mask.width], "counts": counts}


def rle_to_mask(obj: dict) -> HumanMask:
    try:
        height, width = (int(v) for v in obj["size"])
        counts = [int(c) for c in obj["counts"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise StorageError(f"malformed RLE mask record: {exc}") from exc
    total = sum(counts)
    if total != width * height:
        raise StorageError(f"RLE counts sum to {total}, expected {width * height}")
    if any(c < 0 for c in counts):
        raise StorageError("RLE counts must be non-negative")
    values = np.zeros(len(counts), dtype=bool)
    values[1::2] = True
    flat = np.repeat(values, counts)
    return HumanMask(flat.reshape(height, width))


def save_frame_png(path: Path | str, frame: Frame) -> None:
    Image.fromarray(np.asarray(frame.pixels), mode="RGB").save(str(path), format="PNG")


def load_frame_png(path: Path | str, index: int = 0, fps: Fraction = Fraction(30, 1)) -> Frame:
    path = Path(path)
    if not path.is_file():
        raise StorageError(f"frame file not found: {path}")
    try:
        with Image.open(path) as img:
            pixels = np.asarray(img.convert("RGB"), dtype=np.uint8)
    except OSError as exc:
        raise StorageError(f"cannot read frame {path}: {exc}") from exc
    return Frame(pixels, index=index, fps=fps)


def _keypoints_to_json(keypoints) -> list[dict]:
    return [
        {"person_id": kp.person_id, "points": np.asarray(kp.points).tolist()}
        for kp in keypoints
    ]


def _keypoints_from_json(records) -> tuple[KeypointSet, ...]:
    out = []
    for rec in records:
        try:
            out.append(KeypointSet(np.asarray(rec["points"], dtype=np.float64),
                                   person_id=int(rec.get("person_id", 0))))
        except (KeyError, TypeError, ValueError) as exc:
            raise StorageError(f"malformed keypoint record: {exc}") from exc
    return tuple(out)


def write_sidecar(path: Path | str, frame_index: int, mask: HumanMask, keypoints=()) -> None:
    record = {
        "frame_index": frame_index,
        "mask": mask_to_rle(mask),
        "keypoints": _keypoints_to_json(keypoints),
    }
    Path(path).write_text(json.dumps(record, sort_keys=True) + "\n")


def read_sidecar(path: Path | str) -> tuple[int, HumanMask, tuple[KeypointSet, ...]]:
    path = Path(path)
    if not path.is_file():
        raise StorageError(f"sidecar not found: {path}")
    try:
        record = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise StorageError(f"sidecar {path} is not valid JSON: {exc}") from exc
    try:
        frame_index = int(record["frame_index"])
        mask = rle_to_mask(record["mask"])
    except KeyError as exc:
        raise StorageError(f"sidecar {path} missing field {exc}") from exc
    keypoints = _keypoints_from_json(record.get("keypoints", []))
    return frame_index, mask, keypoints


def write_manifest(directory: Path | str, manifest: StreamManifest) -> None:
    record = {
        "width": manifest.width,
        "height": manifest.height,
        "frames": manifest.frames,
        "fps_num": manifest.fps_num,
        "fps_den": manifest.fps_den,
    }
    (Path(directory) / MANIFEST_NAME).write_text(json.dumps(record, sort_keys=True) + "\n")


def read_manifest(directory: Path | str) -> StreamManifest:
    path = Path(directory) / MANIFEST_NAME
    if not path.is_file():
        raise StorageError(f"stream manifest not found: {path}")
    try:
        record = json.loads(path.read_text())
        manifest = StreamManifest(
            width=int(record["width"]),
            height=int(record["height"]),
            frames=int(record["frames"]),
            fps_num=int(record.get("fps_num", 30)),
            fps_den=int(record.get("fps_den", 1)),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise StorageError(f"malformed manifest {path}: {exc}") from exc
    if manifest.width < 1 or manifest.height < 1 or manifest.frames < 0:
        raise StorageError(f"manifest {path} has invalid dimensions or frame count")
    if manifest.fps_den < 1 or manifest.fps_num < 1:
        raise StorageError(f"manifest {path} has invalid fps")
    return manifest


def iter_stream(directory: Path | str):
    """Yield frames of a stream directory in index order."""
    directory = Path(directory)
    manifest = read_manifest(directory)
    fps = manifest.fps
    for index in range(manifest.frames):
        frame = load_frame_png(directory / FRAME_NAME.format(index), index=index, fps=fps)
        if (frame.width, frame.height) != (manifest.width, manifest.height):
            raise StorageError(
                f"frame {index} is {frame.width}x{frame.height}, manifest says "
                f"{manifest.width}x{manifest.height}"
            )
        yield frame


def write_stream(directory: Path | str, frames, fps: Fraction | None = None) -> StreamManifest:
    """Write frames as numbered PNGs plus a manifest; returns the manifest."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    count = 0
    width = height = 0
    for index, frame in enumerate(frames):
        save_frame_png(directory / FRAME_NAME.format(index), frame)
        width, height = frame.width, frame.height
        if fps is None:
            fps = frame.fps
        count += 1
    if fps is None:
        fps = Fraction(30, 1)
    manifest = StreamManifest(width, height, count, fps.numerator, fps.denominator)
    write_manifest(directory, manifest)
    return manifest


def write_background(directory: Path | str, bg: Background) -> None:
    """Export a background snapshot: PNG raster plus a one-bit UNSET sidecar."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    Image.fromarray(bg.as_rgb(), mode="RGB").save(str(directory / BACKGROUND_NAME), format="PNG")
    record = {
        "generation": bg.generation,
        "unset": mask_to_rle(HumanMask(np.asarray(bg.unset))),
    }
    (directory / BACKGROUND_UNSET_NAME).write_text(json.dumps(record, sort_keys=True) + "\n")


def read_background(directory: Path | str) -> tuple[np.ndarray, np.ndarray, int]:
    """Read an exported background: (rgb array, unset bool map, generation)."""
    directory = Path(directory)
    png = directory / BACKGROUND_NAME
    sidecar = directory / BACKGROUND_UNSET_NAME
    if not png.is_file() or not sidecar.is_file():
        raise StorageError(f"background export not found under {directory}")
    with Image.open(png) as img:
        rgb = np.asarray(img.convert("RGB"), dtype=np.uint8)
    try:
        record = json.loads(sidecar.read_text())
        unset = rle_to_mask(record["unset"]).human
        generation = int(record.get("generation", 0))
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise StorageError(f"malformed background sidecar {sidecar}: {exc}") from exc
    if unset.shape != rgb.shape[:2]:
        raise StorageError(f"background UNSET map shape {unset.shape} does not match raster")
    return rgb, unset, generation
