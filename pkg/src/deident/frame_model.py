"""Core raster, mask, background, and keypoint types shared by every module.

Frames, masks, and keypoint sets are immutable values; the Background is the
single mutable accumulator and is owned by exactly one engine at a time.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

KEYPOINT_COUNT = 33

RGB = tuple[int, int, int]


def _locked(array: np.ndarray) -> np.ndarray:
    """Return a read-only uint8/bool array, copying only if needed."""
    if array.flags.writeable:
        array = array.copy()
        array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Frame:
    """One RGB video frame.

    pixels is an (height, width, 3) uint8 array, row major, locked read-only.
    index is the position in the stream; fps is the stream's nominal rate.
    """

    pixels: np.ndarray
    index: int = 0
    fps: Fraction = Fraction(30, 1)

    def __post_init__(self):
        arr = np.asarray(self.pixels)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"frame pixels must be (h, w, 3), got {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError(f"frame dimensions must be positive, got {arr.shape[:2]}")
        if arr.dtype != np.uint8:
            raise ValueError(f"frame pixels must be uint8, got {arr.dtype}")
        if self.index < 0:
            raise ValueError(f"frame index must be >= 0, got {self.index}")
        if self.fps <= 0:
            raise ValueError(f"fps must be positive, got {self.fps}")
        object.__setattr__(self, "pixels", _locked(arr))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]


@dataclass(frozen=True)
class HumanMask:
    """Per-pixel binary human/non-human labels aligned to one frame.

    human is an (height, width) bool array; True marks a human pixel.
    """

    human: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.human)
        if arr.ndim != 2:
            raise ValueError(f"mask must be 2-D, got shape {arr.shape}")
        if arr.dtype != np.bool_:
            raise ValueError(f"mask must be bool, got {arr.dtype}")
        object.__setattr__(self, "human", _locked(arr))

    @classmethod
    def all_clear(cls, width: int, height: int) -> "HumanMask":
        return cls(np.zeros((height, width), dtype=bool))

    @property
    def width(self) -> int:
        return self.human.shape[1]

    @property
    def height(self) -> int:
        return self.human.shape[0]

    def matches(self, other) -> bool:
        return self.width == other.width and self.height == other.height


@dataclass(frozen=True)
class KeypointSet:
    """33 body keypoints for one person in one frame.

    points is (33, 4) float64: x and y normalized to [0, 1], z is relative
    depth (hip centered, smaller means closer to the camera), and the last
    column is visibility in [0, 1].
    """

    points: np.ndarray
    person_id: int = 0

    def __post_init__(self):
        arr = np.asarray(self.points, dtype=np.float64)
        if arr.shape != (KEYPOINT_COUNT, 4):
            raise ValueError(f"keypoints must be ({KEYPOINT_COUNT}, 4), got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("keypoints must be finite")
        for col, name in ((0, "x"), (1, "y"), (3, "visibility")):
            lo, hi = arr[:, col].min(), arr[:, col].max()
            if lo < 0.0 or hi > 1.0:
                raise ValueError(f"keypoint {name} out of [0, 1]: [{lo}, {hi}]")
        if self.person_id < 0:
            raise ValueError(f"person_id must be >= 0, got {self.person_id}")
        object.__setattr__(self, "points", _locked(arr))


@dataclass(frozen=True)
class SkeletonTopology:
    """Undirected edge list over keypoint indices 0..32."""

    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        seen = set()
        for a, b in self.edges:
            if not (0 <= a < KEYPOINT_COUNT and 0 <= b < KEYPOINT_COUNT):
                raise ValueError(f"edge ({a}, {b}) references an index outside 0..32")
            if a == b:
                raise ValueError(f"self-loop edge ({a}, {b})")
            key = (min(a, b), max(a, b))
            if key in seen:
                raise ValueError(f"duplicate edge ({a}, {b})")
            seen.add(key)
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))


class Background:
    """Accumulating background raster whose cells are UNSET or committed RGB.

    A cell is UNSET until its first commit after the latest reinitialization.
    During the filling phase only UNSET cells may be written (first write
    wins); blending of committed cells is reserved for the post-completion
    shadow pass. The generation counter increments on each reinitialization.
    """

    def __init__(self, width: int, height: int):
        if width < 1 or height < 1:
            raise ValueError(f"background dimensions must be positive, got {width}x{height}")
        self._pixels = np.zeros((height, width, 3), dtype=np.uint8)
        self._unset = np.ones((height, width), dtype=bool)
        self._generation = 0

    @property
    def width(self) -> int:
        return self._pixels.shape[1]

    @property
    def height(self) -> int:
        return self._pixels.shape[0]

    @property
    def generation(self) -> int:
        return self._generation

    @property
    def pixels(self) -> np.ndarray:
        """Committed RGB values; read-only view, zeros where UNSET."""
        view = self._pixels.view()
        view.setflags(write=False)
        return view

    @property
    def unset(self) -> np.ndarray:
        """Boolean UNSET map; read-only view."""
        view = self._unset.view()
        view.setflags(write=False)
        return view

    @property
    def empty_rate(self) -> float:
        return int(self._unset.sum()) / (self.width * self.height)

    def commit(self, where: np.ndarray, source: np.ndarray) -> None:
        """Write source pixels at the selected cells; UNSET cells only."""
        if where.shape != self._unset.shape:
            raise ValueError("selection shape does not match background")
        if np.any(where & ~self._unset):
            raise ValueError("commit would overwrite committed cells")
        self._pixels[where] = source[where]
        self._unset[where] = False

    def blend_committed(self, where: np.ndarray, source: np.ndarray, weight: float) -> None:
        """Convex-blend source into committed cells: round(w*new + (1-w)*old).

        Round-half-up per channel, evaluated in float64.
        """
        if where.shape != self._unset.shape:
            raise ValueError("selection shape does not match background")
        if np.any(where & self._unset):
            raise ValueError("blend may only modify committed cells")
        old = self._pixels[where].astype(np.float64)
        new = source[where].astype(np.float64)
        self._pixels[where] = np.floor(weight * new + (1.0 - weight) * old + 0.5).astype(np.uint8)

    def reinitialize(self) -> None:
        self._pixels[:] = 0
        self._unset[:] = True
        self._generation += 1

    def snapshot(self) -> "Background":
        """Detached deep copy, safe to hand to a concurrent consumer."""
        copy = Background.__new__(Background)
        copy._pixels = self._pixels.copy()
        copy._unset = self._unset.copy()
        copy._generation = self._generation
        return copy

    def as_rgb(self, unset_color: RGB = (0, 0, 0)) -> np.ndarray:
        """Render to a plain RGB array with UNSET cells filled by a color."""
        out = self._pixels.copy()
        out[self._unset] = np.asarray(unset_color, dtype=np.uint8)
        return out


def new_background(width: int, height: int) -> Background:
    """Fresh all-UNSET background at generation 0."""
    return Background(width, height)


def empty_rate(bg: Background) -> float:
    """Fraction of cells still UNSET, in [0, 1]."""
    return bg.empty_rate
