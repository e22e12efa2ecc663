"""Perception providers: segmentation masks plus pose keypoints per frame.

Three interchangeable backends sit behind one ``perceive(frame)`` interface:

* ORACLE_FILES replays recorded sidecar annotations bit-exactly, which makes
  end-to-end runs deterministic and testable.
* NAIVE_DIFF is a self-contained demo backend built on per-pixel frame
  differencing; determinism matters more than accuracy here.
* EXTERNAL_PROCESS talks a small binary protocol to a child process, so any
  real segmentation/pose model in any language can be plugged in without an
  in-process ML runtime.

External process wire protocol (strictly request/response, all integers
little-endian, every record prefixed with a 4-byte unsigned payload length):

request payload:
    u32 frame_index | u32 width | u32 height | width*height*3 raw RGB bytes

response payload:
    u32 frame_index (echoed) | u32 run_count | run_count * u32 RLE counts
    | u32 person_count | person_count * 33 * 4 float32 (x, y, z, visibility)

The mask RLE is row-major with runs alternating starting with non-human;
counts must sum to width*height.
"""

from __future__ import annotations

import enum
import shlex
import struct
import subprocess
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Protocol

import numpy as np

from .errors import BackendError, ConfigError, MissingAnnotationError
from .frame_model import KEYPOINT_COUNT, Frame, HumanMask, KeypointSet
from .storage import SIDECAR_NAME, read_sidecar

DEFAULT_DIFF_THRESHOLD = 25


class BackendKind(enum.Enum):
    ORACLE_FILES = "oracle_files"
    NAIVE_DIFF = "naive_diff"
    EXTERNAL_PROCESS = "external_process"


_REQUIRED_PARAMETER = {
    BackendKind.ORACLE_FILES: "sidecar_dir",
    BackendKind.NAIVE_DIFF: "threshold",
    BackendKind.EXTERNAL_PROCESS: "command",
}


@dataclass(frozen=True)
class BackendDescriptor:
    """Which backend to build and its string parameters."""

    kind: BackendKind
    parameters: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        required = _REQUIRED_PARAMETER[self.kind]
        if required not in self.parameters:
            raise ConfigError(f"backend.parameters.{required}: required for {self.kind.name}")


@dataclass(frozen=True)
class PerceptionResult:
    """Mask and keypoints for one frame; human_detected is derived, never
    trusted input: true iff the mask has a human cell or keypoints exist."""

    frame_index: int
    mask: HumanMask
    keypoints: tuple[KeypointSet, ...] = ()
    human_detected: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "keypoints", tuple(self.keypoints))
        detected = bool(self.mask.human.any()) or len(self.keypoints) > 0
        object.__setattr__(self, "human_detected", detected)


class PerceptionProvider(Protocol):
    def perceive(self, frame: Frame) -> PerceptionResult: ...
    def close(self) -> None: ...


def naive_diff_mask(prev: Frame, cur: Frame, threshold: int) -> HumanMask:
    """Human where the max-channel absolute difference exceeds the threshold,
    then one pass of 3x3 majority smoothing.

    Smoothing counts cells outside the image as non-human, so a cell stays
    human only when at least 5 of its 9-cell window are human.
    """
    if (prev.width, prev.height) != (cur.width, cur.height):
        raise ValueError(
            f"frame dimensions differ: {prev.width}x{prev.height} vs {cur.width}x{cur.height}"
        )
    if not 0 <= threshold <= 255:
        raise ValueError(f"threshold must be in 0..255, got {threshold}")
    delta = np.abs(prev.pixels.astype(np.int16) - cur.pixels.astype(np.int16)).max(axis=2)
    raw = delta > threshold
    padded = np.pad(raw, 1).astype(np.uint8)
    h, w = raw.shape
    votes = sum(
        padded[dy:dy + h, dx:dx + w].astype(np.int16)
        for dy in range(3)
        for dx in range(3)
    )
    return HumanMask(votes >= 5)


class OracleFilesBackend:
    """Replays per-frame sidecar annotations from a directory."""

    def __init__(self, sidecar_dir: Path | str):
        self._dir = Path(sidecar_dir)
        if not self._dir.is_dir():
            raise BackendError(f"sidecar directory not found: {self._dir}")

    def perceive(self, frame: Frame) -> PerceptionResult:
        path = self._dir / SIDECAR_NAME.format(frame.index)
        if not path.is_file():
            raise MissingAnnotationError(f"no sidecar for frame {frame.index}: {path}")
        frame_index, mask, keypoints = read_sidecar(path)
        if frame_index != frame.index:
            raise BackendError(
                f"sidecar {path} declares frame {frame_index}, expected {frame.index}"
            )
        if (mask.width, mask.height) != (frame.width, frame.height):
            raise BackendError(
                f"sidecar mask is {mask.width}x{mask.height}, frame is "
                f"{frame.width}x{frame.height}"
            )
        return PerceptionResult(frame.index, mask, keypoints)

    def close(self) -> None:
        pass


class NaiveDiffBackend:
    """Frame-differencing demo backend; emits masks only, never keypoints.

    The first frame of a stream has no predecessor and yields an all
    non-human mask.
    """

    def __init__(self, threshold: int = DEFAULT_DIFF_THRESHOLD):
        if not 0 <= threshold <= 255:
            raise ConfigError(f"backend.parameters.threshold: must be in 0..255, got {threshold}")
        self._threshold = threshold
        self._prev: Frame | None = None

    def perceive(self, frame: Frame) -> PerceptionResult:
        if self._prev is None:
            mask = HumanMask.all_clear(frame.width, frame.height)
        else:
            mask = naive_diff_mask(self._prev, frame, self._threshold)
        self._prev = frame
        return PerceptionResult(frame.index, mask)

    def close(self) -> None:
        pass


class ExternalProcessBackend:
    """Bridges to a model running as a child process (protocol above)."""

    def __init__(self, command: str):
        argv = shlex.split(command)
        if not argv:
            raise ConfigError("backend.parameters.command: empty command line")
        try:
            self._proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE
            )
        except OSError as exc:
            raise BackendError(f"cannot start external model {argv[0]!r}: {exc}") from exc

    def _read_exact(self, n: int) -> bytes:
        data = self._proc.stdout.read(n)
        if data is None or len(data) != n:
            raise BackendError(
                f"external model closed the stream mid-record "
                f"(wanted {n} bytes, got {0 if data is None else len(data)})"
            )
        return data

    def perceive(self, frame: Frame) -> PerceptionResult:
        payload = struct.pack("<III", frame.index, frame.width, frame.height)
        payload += np.asarray(frame.pixels).tobytes()
        try:
            self._proc.stdin.write(struct.pack("<I", len(payload)) + payload)
            self._proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise BackendError(f"external model died: {exc}") from exc

        (length,) = struct.unpack("<I", self._read_exact(4))
        body = self._read_exact(length)
        try:
            offset = 0
            echoed, run_count = struct.unpack_from("<II", body, offset)
            offset += 8
            counts = struct.unpack_from(f"<{run_count}I", body, offset)
            offset += 4 * run_count
            (person_count,) = struct.unpack_from("<I", body, offset)
            offset += 4
            floats = struct.unpack_from(f"<{person_count * KEYPOINT_COUNT * 4}f", body, offset)
            offset += 4 * len(floats)
        except struct.error as exc:
            raise BackendError(f"malformed response record: {exc}") from exc
        if offset != length:
            raise BackendError(f"response record has {length - offset} trailing bytes")
        if echoed != frame.index:
            raise BackendError(f"external model answered frame {echoed}, expected {frame.index}")
        if sum(counts) != frame.width * frame.height:
            raise BackendError(
                f"mask RLE sums to {sum(counts)}, expected {frame.width * frame.height}"
            )
        values = np.zeros(run_count, dtype=bool)
        values[1::2] = True
        mask = HumanMask(np.repeat(values, counts).reshape(frame.height, frame.width))
        keypoints = []
        data = np.asarray(floats, dtype=np.float64).reshape(person_count, KEYPOINT_COUNT, 4)
        for pid in range(person_count):
            pts = data[pid].copy()
            # Clamp x, y, visibility into range at the adapter boundary.
            pts[:, 0] = np.clip(pts[:, 0], 0.0, 1.0)
            pts[:, 1] = np.clip(pts[:, 1], 0.0, 1.0)
            pts[:, 3] = np.clip(pts[:, 3], 0.0, 1.0)
            keypoints.append(KeypointSet(pts, person_id=pid))
        return PerceptionResult(frame.index, mask, tuple(keypoints))

    def close(self) -> None:
        if self._proc.poll() is None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            try:
                self._proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self._proc.kill()
                self._proc.wait()

    def __enter__(self):
        return self

    def __exit__(self, *exc_info):
        self.close()


def make_provider(descriptor: BackendDescriptor) -> PerceptionProvider:
    """Build the provider a descriptor asks for."""
    params = descriptor.parameters
    if descriptor.kind is BackendKind.ORACLE_FILES:
        return OracleFilesBackend(params["sidecar_dir"])
    if descriptor.kind is BackendKind.NAIVE_DIFF:
        try:
            threshold = int(params["threshold"])
        except ValueError as exc:
            raise ConfigError(
                f"backend.parameters.threshold: not an integer: {params['threshold']!r}"
            ) from exc
        return NaiveDiffBackend(threshold)
    return ExternalProcessBackend(params["command"])
