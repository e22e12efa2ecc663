"""Shared helpers for the test suite."""

from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

from deident import Frame, HumanMask, PerceptionResult

STUB = [sys.executable, str(Path(__file__).parent / "external_stub.py")]


def make_frame(pixels, index=0, **kwargs) -> Frame:
    return Frame(np.asarray(pixels, dtype=np.uint8), index=index, **kwargs)


def random_frame(rng, width, height, index=0) -> Frame:
    return Frame(rng.integers(0, 256, size=(height, width, 3), dtype=np.uint8), index=index)


def mask_from(rows) -> HumanMask:
    return HumanMask(np.asarray(rows, dtype=bool))


def perception(index, mask, keypoints=()) -> PerceptionResult:
    if not isinstance(mask, HumanMask):
        mask = HumanMask(np.asarray(mask, dtype=bool))
    return PerceptionResult(index, mask, keypoints)


class RecordedProvider:
    """Perception provider replaying a prepared list of results, counting calls."""

    def __init__(self, results):
        self.results = list(results)
        self.calls = 0
        self.closed = False

    def perceive(self, frame):
        result = self.results[frame.index]
        assert result.frame_index == frame.index
        self.calls += 1
        return result

    def close(self):
        self.closed = True


@pytest.fixture
def rng():
    return np.random.default_rng(0xD3)


def drive_pair(frame_arrays, mask_arrays, *, min_update_frames=3,
               finish_threshold=0.01, weight=0.3, patience=3):
    """Run the engine and the scalar replay oracle over the same step inputs.

    frame_arrays: list of (h, w, 3) uint8 arrays (one per sampled step).
    mask_arrays: list of (h, w) bool arrays.
    Returns (engine, replay, step_reports).
    """
    from deident import BackgroundEngine, UpdateMode, UpdatePolicy
    from reference import ReplayBackground, mask_to_cells

    height, width = frame_arrays[0].shape[:2]
    mode = UpdateMode.SINGLE_FRAME if min_update_frames == 1 else UpdateMode.MULTI_FRAME
    policy = UpdatePolicy(
        mode=mode,
        min_update_frames=min_update_frames,
        finish_threshold=finish_threshold,
        post_completion_blend_weight=weight,
        post_completion_patience=patience,
    )
    engine = BackgroundEngine(width, height, policy)
    replay = ReplayBackground(
        width, height,
        min_update_frames=min_update_frames,
        finish_threshold=finish_threshold,
        blend_weight=weight,
        patience=patience,
    )
    reports = []
    for i, (arr, mask) in enumerate(zip(frame_arrays, mask_arrays, strict=True)):
        reports.append(engine.step(Frame(arr, index=i), perception(i, mask)))
        replay.step(arr.tolist(), mask_to_cells(np.asarray(mask).tolist()))
    return engine, replay, reports


def backgrounds_equal(bg, replay) -> bool:
    """Bit-exact comparison of an engine Background against the oracle."""
    grid = replay.color_grid()
    expected = np.zeros((bg.height, bg.width, 3), dtype=np.uint8)
    expected_unset = np.zeros((bg.height, bg.width), dtype=bool)
    for y in range(bg.height):
        for x in range(bg.width):
            cell = grid[y][x]
            if cell is None:
                expected_unset[y, x] = True
            else:
                expected[y, x] = cell
    if not np.array_equal(expected_unset, bg.unset):
        return False
    committed = ~expected_unset
    return np.array_equal(expected[committed], bg.pixels[committed])
