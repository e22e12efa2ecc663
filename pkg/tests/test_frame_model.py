"""Core value types: validation, immutability, background cell lifecycle."""

import numpy as np
import pytest
from fractions import Fraction

from deident import (
    KEYPOINT_COUNT,
    Background,
    Frame,
    HumanMask,
    KeypointSet,
    SkeletonTopology,
    empty_rate,
    new_background,
)
from conftest import make_frame

from reference import blend_value


class TestFrame:
    def test_accepts_hw3_uint8(self):
        f = make_frame(np.zeros((4, 6, 3)), index=2)
        assert (f.width, f.height) == (6, 4)
        assert f.index == 2
        assert f.fps == Fraction(30, 1)

    @pytest.mark.parametrize("shape", [(4, 6), (4, 6, 4), (0, 6, 3), (4, 0, 3)])
    def test_rejects_bad_shapes(self, shape):
        with pytest.raises(ValueError):
            Frame(np.zeros(shape, dtype=np.uint8))

    def test_rejects_non_uint8(self):
        with pytest.raises(ValueError):
            Frame(np.zeros((2, 2, 3), dtype=np.float32))

    def test_rejects_negative_index_and_bad_fps(self):
        with pytest.raises(ValueError):
            make_frame(np.zeros((2, 2, 3)), index=-1)
        with pytest.raises(ValueError):
            make_frame(np.zeros((2, 2, 3)), fps=Fraction(0, 1))

    def test_pixels_are_read_only(self):
        f = make_frame(np.zeros((2, 2, 3)))
        with pytest.raises(ValueError):
            f.pixels[0, 0, 0] = 1

    def test_source_mutation_does_not_leak_in(self):
        src = np.zeros((2, 2, 3), dtype=np.uint8)
        f = Frame(src)
        src[0, 0, 0] = 99
        assert f.pixels[0, 0, 0] == 0


class TestHumanMask:
    def test_all_clear(self):
        m = HumanMask.all_clear(5, 3)
        assert (m.width, m.height) == (5, 3)
        assert not m.human.any()

    def test_rejects_non_bool(self):
        with pytest.raises(ValueError):
            HumanMask(np.zeros((2, 2), dtype=np.uint8))

    def test_rejects_wrong_rank(self):
        with pytest.raises(ValueError):
            HumanMask(np.zeros((2, 2, 2), dtype=bool))

    def test_matches_compares_dims(self):
        assert HumanMask.all_clear(4, 3).matches(HumanMask.all_clear(4, 3))
        assert not HumanMask.all_clear(4, 3).matches(HumanMask.all_clear(3, 4))


class TestKeypointSet:
    def test_valid_roundtrip(self):
        pts = np.zeros((KEYPOINT_COUNT, 4))
        pts[:, 0] = 0.25
        pts[:, 3] = 1.0
        kp = KeypointSet(pts, person_id=7)
        assert kp.person_id == 7
        assert kp.points.shape == (33, 4)

    def test_rejects_wrong_shape(self):
        with pytest.raises(ValueError):
            KeypointSet(np.zeros((32, 4)))

    @pytest.mark.parametrize("col,value", [(0, -0.1), (0, 1.1), (1, 2.0), (3, -1.0)])
    def test_rejects_out_of_range(self, col, value):
        pts = np.zeros((KEYPOINT_COUNT, 4))
        pts[4, col] = value
        with pytest.raises(ValueError):
            KeypointSet(pts)

    def test_rejects_nan_and_negative_person(self):
        pts = np.zeros((KEYPOINT_COUNT, 4))
        pts[0, 2] = np.nan
        with pytest.raises(ValueError):
            KeypointSet(pts)
        with pytest.raises(ValueError):
            KeypointSet(np.zeros((KEYPOINT_COUNT, 4)), person_id=-1)

    def test_z_is_unbounded(self):
        pts = np.zeros((KEYPOINT_COUNT, 4))
        pts[:, 2] = -123.5
        KeypointSet(pts)  # must not raise


class TestSkeletonTopology:
    def test_rejects_self_loop(self):
        with pytest.raises(ValueError):
            SkeletonTopology(edges=((3, 3),))

    def test_rejects_duplicate_even_reversed(self):
        with pytest.raises(ValueError):
            SkeletonTopology(edges=((1, 2), (2, 1)))

    def test_rejects_out_of_range_index(self):
        with pytest.raises(ValueError):
            SkeletonTopology(edges=((0, 33),))

    def test_accepts_valid(self):
        t = SkeletonTopology(edges=((0, 1), (1, 2)))
        assert t.edges == ((0, 1), (1, 2))


class TestBackground:
    def test_new_background_fully_unset(self):
        bg = new_background(4, 3)
        assert bg.unset.all()
        assert bg.empty_rate == 1.0
        assert empty_rate(bg) == 1.0
        assert bg.generation == 0

    def test_commit_sets_cells_and_rate(self):
        bg = new_background(4, 2)
        where = np.zeros((2, 4), dtype=bool)
        where[0, :] = True
        src = np.full((2, 4, 3), 77, dtype=np.uint8)
        bg.commit(where, src)
        assert bg.empty_rate == 0.5
        assert (bg.pixels[0] == 77).all()
        assert not bg.unset[0].any()
        assert bg.unset[1].all()

    def test_commit_refuses_committed_cells(self):
        bg = new_background(2, 2)
        where = np.ones((2, 2), dtype=bool)
        src = np.zeros((2, 2, 3), dtype=np.uint8)
        bg.commit(where, src)
        with pytest.raises(ValueError):
            bg.commit(where, src)

    def test_blend_refuses_unset_cells(self):
        bg = new_background(2, 2)
        where = np.ones((2, 2), dtype=bool)
        with pytest.raises(ValueError):
            bg.blend_committed(where, np.zeros((2, 2, 3), dtype=np.uint8), 0.3)

    def test_blend_matches_scalar_oracle(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            bg = new_background(3, 3)
            old = rng.integers(0, 256, size=(3, 3, 3), dtype=np.uint8)
            new = rng.integers(0, 256, size=(3, 3, 3), dtype=np.uint8)
            weight = float(rng.uniform(0.05, 0.95))
            bg.commit(np.ones((3, 3), dtype=bool), old)
            bg.blend_committed(np.ones((3, 3), dtype=bool), new, weight)
            for y in range(3):
                for x in range(3):
                    for c in range(3):
                        expected = blend_value(int(old[y, x, c]), int(new[y, x, c]), weight)
                        assert bg.pixels[y, x, c] == expected

    def test_reinitialize_clears_and_bumps_generation(self):
        bg = new_background(2, 2)
        bg.commit(np.ones((2, 2), dtype=bool), np.full((2, 2, 3), 5, dtype=np.uint8))
        bg.reinitialize()
        assert bg.unset.all()
        assert (bg.pixels == 0).all()
        assert bg.generation == 1

    def test_snapshot_is_detached(self):
        bg = new_background(2, 2)
        snap = bg.snapshot()
        bg.commit(np.ones((2, 2), dtype=bool), np.full((2, 2, 3), 9, dtype=np.uint8))
        assert snap.unset.all()
        assert bg.empty_rate == 0.0

    def test_as_rgb_paints_unset(self):
        bg = new_background(2, 1)
        where = np.array([[True, False]])
        bg.commit(where, np.full((1, 2, 3), 200, dtype=np.uint8))
        rgb = bg.as_rgb(unset_color=(1, 2, 3))
        assert tuple(rgb[0, 0]) == (200, 200, 200)
        assert tuple(rgb[0, 1]) == (1, 2, 3)

    def test_rejects_degenerate_dims(self):
        with pytest.raises(ValueError):
            Background(0, 5)
