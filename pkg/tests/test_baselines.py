import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gridmask.baselines import (
    CutoutParams,
    HasParams,
    MaskGenerationError,
    cutout_mask,
    has_mask,
    multi_cutout_iteration_cap,
    multi_cutout_mask,
    random_erase_mask,
)
from gridmask.masks import ConfigError, keep_ratio
from oracles import components


class FixedCenter:
    """Stands in for a Generator whose integer draws are scripted."""

    def __init__(self, *values):
        self.values = list(values)

    def integers(self, lo, hi=None):
        return self.values.pop(0)


def test_cutout_zero_side():
    m = cutout_mask(np.random.default_rng(0), 10, 12, CutoutParams(0))
    assert m.min() == 1


def test_cutout_covers_image():
    m = cutout_mask(FixedCenter(4, 6), 8, 12, CutoutParams(2 * 12))
    assert m.max() == 0


def test_cutout_corner_clip():
    m = cutout_mask(FixedCenter(0, 0), 8, 8, CutoutParams(4))
    dropped = set(zip(*np.nonzero(m == 0)))
    assert dropped == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_cutout_params_validation():
    with pytest.raises(ConfigError):
        CutoutParams(-1)


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), side=st.integers(1, 20), h=st.integers(1, 25), w=st.integers(1, 25))
def test_cutout_single_component(seed, side, h, w):
    m = cutout_mask(np.random.default_rng(seed), h, w, CutoutParams(side))
    assert m.shape == (h, w) and set(np.unique(m)) <= {0, 1}
    assert len(components(m.tolist(), 0)) <= 1


def test_multi_cutout_target_one():
    class NoDraws:
        def integers(self, *a):
            raise AssertionError("no draws expected")

    m = multi_cutout_mask(NoDraws(), 20, 20, 3, 5, 1.0)
    assert m.min() == 1


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2**32), t=st.floats(0.3, 1.0))
def test_multi_cutout_postcondition(seed, t):
    m = multi_cutout_mask(np.random.default_rng(seed), 40, 40, 4, 8, t)
    assert keep_ratio(m) <= t


def test_multi_cutout_overshoot_bound():
    rng = np.random.default_rng(5)
    for _ in range(200):
        k = keep_ratio(multi_cutout_mask(rng, 224, 224, 56, 112, 0.75))
        assert 0.75 - 112**2 / 224**2 <= k <= 0.75


def test_multi_cutout_cap():
    assert multi_cutout_iteration_cap(10, 10, 0) == 1000
    assert multi_cutout_iteration_cap(224, 224, 56) == 160
    with pytest.raises(MaskGenerationError):
        multi_cutout_mask(np.random.default_rng(0), 10, 10, 0, 0, 0.5)


def test_multi_cutout_unbiased_mean():
    rng = np.random.default_rng(8)
    ks = [keep_ratio(multi_cutout_mask(rng, 224, 224, 56, 112, 0.75, unbiased=True)) for _ in range(1500)]
    assert abs(np.mean(ks) - 0.75) < 0.015


def test_has_extremes():
    rng = np.random.default_rng(0)
    assert has_mask(rng, 30, 20, HasParams(7, 0.0)).min() == 1
    assert has_mask(rng, 30, 20, HasParams(7, 1.0)).max() == 0


def test_has_mean_keep():
    rng = np.random.default_rng(11)
    ks = [keep_ratio(has_mask(rng, 224, 224, HasParams(56, 0.25))) for _ in range(1000)]
    assert abs(np.mean(ks) - 0.75) <= 0.01


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32), cell=st.integers(1, 9), h=st.integers(1, 30), w=st.integers(1, 30))
def test_has_patch_aligned(seed, cell, h, w):
    m = has_mask(np.random.default_rng(seed), h, w, HasParams(cell, 0.5))
    assert m.shape == (h, w)
    for i0 in range(0, h, cell):
        for j0 in range(0, w, cell):
            patch = m[i0:i0 + cell, j0:j0 + cell]
            assert patch.min() == patch.max()


def test_has_row_major_order():
    m = has_mask(np.random.default_rng(3), 10, 15, HasParams(5, 0.5))
    hidden = np.random.default_rng(3).random((2, 3)) < 0.5
    assert np.array_equal(m[::5, ::5] == 0, hidden)


def test_random_erase_area():
    rng = np.random.default_rng(0)
    m = random_erase_mask(rng, 100, 100, (0.16, 0.16), (1.0, 1.0))
    assert np.count_nonzero(m == 0) == 40 * 40
    # non-square areas are off by at most the side rounding
    m = random_erase_mask(rng, 100, 100, (0.1, 0.1), (1.0, 1.0))
    side = round(1000**0.5)
    assert np.count_nonzero(m == 0) == side * side
    assert abs(keep_ratio(m) - 0.9) <= (2 * side + 1) / 10000


def test_random_erase_square_and_inside():
    rng = np.random.default_rng(4)
    for _ in range(50):
        m = random_erase_mask(rng, 64, 80, (0.05, 0.3), (1.0, 1.0))
        rows, cols = np.nonzero(m == 0)
        assert rows.max() - rows.min() == cols.max() - cols.min()
        assert len(rows) == (rows.max() - rows.min() + 1) ** 2


def test_random_erase_deterministic():
    a = random_erase_mask(np.random.default_rng(99), 50, 70)
    b = random_erase_mask(np.random.default_rng(99), 50, 70)
    assert a.tobytes() == b.tobytes()


def test_random_erase_fallback_clips():
    # a 0.9-area rectangle with extreme aspect never fits; it is clipped instead
    m = random_erase_mask(np.random.default_rng(1), 20, 20, (0.9, 0.9), (20.0, 20.0))
    assert m.shape == (20, 20) and m.min() == 0


def test_random_erase_validation():
    with pytest.raises(ConfigError):
        random_erase_mask(np.random.default_rng(0), 10, 10, (0.0, 0.5))
    with pytest.raises(ConfigError):
        random_erase_mask(np.random.default_rng(0), 10, 10, (0.1, 0.5), (-1.0, 2.0))
