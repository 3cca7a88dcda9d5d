import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tucker_rpcd import (
    DenseTensor,
    fold,
    frobenius_norm,
    inner,
    mode_product,
    multi_mode_product_except,
    unfold,
)

from .conftest import rel


def unfold_oracle(t: DenseTensor, mode: int) -> np.ndarray:
    """Place every entry by explicit column-index arithmetic."""
    dims = t.dims
    rest = [j for j in range(len(dims)) if j != mode]
    out = np.zeros((dims[mode], int(np.prod([dims[j] for j in rest]))))
    for idx in itertools.product(*(range(n) for n in dims)):
        col, stride = 0, 1
        for j in rest:
            col += idx[j] * stride
            stride *= dims[j]
        out[idx[mode], col] = t.array[idx]
    return out


def mode_product_oracle(x: np.ndarray, a: np.ndarray, mode: int) -> np.ndarray:
    shape = list(x.shape)
    shape[mode] = a.shape[0]
    out = np.zeros(shape)
    for idx in itertools.product(*(range(n) for n in shape)):
        s = 0.0
        for k in range(x.shape[mode]):
            src = list(idx)
            src[mode] = k
            s += a[idx[mode], k] * x[tuple(src)]
        out[idx] = s
    return out


shapes = st.lists(st.integers(1, 4), min_size=1, max_size=4)


def test_linearization_first_index_fastest(t8):
    assert t8.array[1, 0, 0] == 2.0
    assert t8.array[0, 1, 0] == 3.0
    assert t8.array[0, 0, 1] == 5.0
    assert np.array_equal(t8.data, np.arange(1.0, 9.0))


def test_constructor_rejects_bad_input():
    with pytest.raises(ValueError):
        DenseTensor(np.array([1.0, np.nan]))
    with pytest.raises(ValueError):
        DenseTensor(np.zeros((2, 0)))
    with pytest.raises(ValueError):
        DenseTensor.from_flat((2, 2), np.arange(3.0))


@pytest.mark.parametrize(
    "mode, expected",
    [
        (0, [[1, 3, 5, 7], [2, 4, 6, 8]]),
        (2, [[1, 2, 3, 4], [5, 6, 7, 8]]),
    ],
)
def test_unfold_small(t8, mode, expected):
    assert np.array_equal(unfold(t8, mode), expected)
    assert np.array_equal(unfold_oracle(t8, mode), expected)


def test_unfold_matrix_is_identity(rng):
    m = rng.standard_normal((3, 5))
    assert np.array_equal(unfold(DenseTensor(m), 0), m)


def test_unfold_mode_out_of_range(t8):
    with pytest.raises(ValueError):
        unfold(t8, 3)


def test_unfold_matches_oracle_random(rng):
    t = DenseTensor(rng.standard_normal((2, 3, 4, 2)))
    for mode in range(4):
        assert np.array_equal(unfold(t, mode), unfold_oracle(t, mode))


def test_fold_examples(t8):
    assert fold(unfold(t8, 1), t8.dims, 1) == t8
    assert fold(np.zeros((2, 4)), (2, 2, 2), 0) == DenseTensor.zeros((2, 2, 2))
    assert fold([[1, 3, 5, 7], [2, 4, 6, 8]], (2, 2, 2), 0) == t8
    with pytest.raises(ValueError):
        fold(np.zeros((3, 4)), (2, 2, 2), 0)


@settings(max_examples=50, deadline=None)
@given(shapes, st.data())
def test_fold_unfold_roundtrip(dims, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    t = DenseTensor(rng.standard_normal(dims))
    for mode in range(len(dims)):
        assert fold(unfold(t, mode), dims, mode) == t


def test_mode_product_examples(t8, rng):
    for mode in range(3):
        assert mode_product(t8, np.eye(2), mode) == t8
    out = mode_product(t8, [[1.0, 1.0]], 0)
    assert out.dims == (1, 2, 2)
    assert np.array_equal(out.data, [3, 7, 11, 15])
    assert np.array_equal(
        out.array, mode_product_oracle(t8.array, np.array([[1.0, 1.0]]), 0)
    )
    z = mode_product(t8, np.zeros((3, 2)), 1)
    assert z == DenseTensor.zeros((2, 3, 2))
    with pytest.raises(ValueError):
        mode_product(t8, np.ones((2, 3)), 0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(1, 5), min_size=2, max_size=4), st.data())
def test_mode_product_unfolding_identity(dims, data):
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    mode = data.draw(st.integers(0, len(dims) - 1))
    x = rng.standard_normal(dims)
    a = rng.standard_normal((data.draw(st.integers(1, 4)), dims[mode]))
    y = mode_product(x, a, mode)
    assert rel(unfold(y, mode), a @ unfold(x, mode)) <= 1e-12


def test_mode_products_commute(rng):
    x = rng.standard_normal((4, 5, 6))
    a, b = rng.standard_normal((3, 4)), rng.standard_normal((2, 5))
    ab = mode_product(mode_product(x, a, 0), b, 1)
    ba = mode_product(mode_product(x, b, 1), a, 0)
    assert rel(ab.array, ba.array) <= 1e-12


def test_multi_mode_product_except(rng, t8):
    eyes = [np.eye(2)] * 3
    for skip in range(3):
        assert multi_mode_product_except(t8, eyes, skip) == t8

    x = rng.standard_normal((4, 4, 4))
    us = [rng.standard_normal((4, 2)) for _ in range(3)]
    got = multi_mode_product_except(x, us, 1, transposed=True)
    expect = mode_product(mode_product(x, us[0].T, 0), us[2].T, 2)
    assert got == expect

    fs = [rng.standard_normal((2, 4)) for _ in range(3)]
    got = multi_mode_product_except(x, fs, 0)
    brute = np.zeros((4, 2, 2))
    for i, j, k in itertools.product(range(4), range(2), range(2)):
        brute[i, j, k] = sum(
            fs[1][j, b] * fs[2][k, c] * x[i, b, c] for b in range(4) for c in range(4)
        )
    assert np.max(np.abs(got.array - brute)) <= 1e-12 * np.max(np.abs(brute))

    with pytest.raises(ValueError):
        multi_mode_product_except(x, fs[:2], 0)


def test_norms(rng):
    assert frobenius_norm(np.ones((2, 2, 2))) == pytest.approx(np.sqrt(8), rel=1e-15)
    assert frobenius_norm(DenseTensor.zeros((3, 2))) == 0.0
    x = DenseTensor(rng.standard_normal((5, 6, 7)))
    ref = frobenius_norm(x)
    for mode in range(3):
        assert abs(np.linalg.norm(unfold(x, mode)) - ref) <= 1e-14 * ref
    assert abs(np.linalg.norm(x.data) - ref) <= 1e-14 * ref
    assert inner(x, x) == pytest.approx(ref**2, rel=1e-14)
    with pytest.raises(ValueError):
        inner(x, DenseTensor.zeros((5, 6)))
