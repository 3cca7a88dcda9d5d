"""Dense tensors, matricization and mode products.

Linearization is first-index-fastest (Fortran order). Mode indices are
zero-based throughout the Python API.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np


class DenseTensor:
    """A d-order dense array of float64 with first-index-fastest layout.

    Parameters
    ----------
    array : array_like
        Values indexed as ``array[k1, ..., kd]``. Copied to float64.
    """

    __slots__ = ("array",)

    def __init__(self, array, copy: bool = True):
        arr = np.array(array, dtype=np.float64) if copy else np.asarray(array, dtype=np.float64)
        if arr.ndim == 0:
            raise ValueError("tensor must have order >= 1")
        if arr.size == 0 or min(arr.shape) < 1:
            raise ValueError(f"every dimension must be >= 1, got {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("tensor entries must be finite")
        self.array = arr

    @classmethod
    def from_flat(cls, dims: Sequence[int], data) -> "DenseTensor":
        """Build a tensor from a flat buffer in first-index-fastest order."""
        dims = tuple(int(n) for n in dims)
        flat = np.asarray(data, dtype=np.float64).ravel()
        if len(dims) == 0 or any(n < 1 for n in dims):
            raise ValueError(f"invalid dims {dims}")
        if flat.size != int(np.prod(dims)):
            raise ValueError(
                f"data length {flat.size} does not match dims {dims}"
            )
        return cls(flat.reshape(dims, order="F"))

    @classmethod
    def zeros(cls, dims: Sequence[int]) -> "DenseTensor":
        return cls(np.zeros(tuple(dims)), copy=False)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.array.shape

    @property
    def order(self) -> int:
        return self.array.ndim

    @property
    def data(self) -> np.ndarray:
        """Flat view of the entries in linearization order."""
        return self.array.ravel(order="F")

    def norm(self) -> float:
        return frobenius_norm(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DenseTensor):
            return NotImplemented
        return self.dims == other.dims and np.array_equal(self.array, other.array)

    def __repr__(self) -> str:
        return f"DenseTensor(dims={self.dims})"


def _as_array(t) -> np.ndarray:
    if isinstance(t, DenseTensor):
        return t.array
    return np.asarray(t, dtype=np.float64)


def _check_mode(mode: int, order: int) -> None:
    if not 0 <= mode < order:
        raise ValueError(f"mode {mode} out of range for order-{order} tensor")


def unfold(t, mode: int) -> np.ndarray:
    """Mode-``mode`` matricization, shape ``(n_mode, prod(other dims))``.

    Column ordering keeps the remaining indices with the lowest original
    mode varying fastest, so ``unfold(t, 0)`` column-stacked equals the
    linearized data.
    """
    arr = _as_array(t)
    _check_mode(mode, arr.ndim)
    return np.reshape(np.moveaxis(arr, mode, 0), (arr.shape[mode], -1), order="F")


def fold(m, dims: Sequence[int], mode: int) -> DenseTensor:
    """Inverse of :func:`unfold`."""
    dims = tuple(int(n) for n in dims)
    _check_mode(mode, len(dims))
    m = np.asarray(m, dtype=np.float64)
    rest = dims[:mode] + dims[mode + 1:]
    expected = (dims[mode], int(np.prod(rest)))
    if m.shape != expected:
        raise ValueError(f"matrix shape {m.shape} does not fold to {dims} along mode {mode}")
    arr = np.reshape(m, (dims[mode],) + rest, order="F")
    return DenseTensor(np.moveaxis(arr, 0, mode))


def _fold_array(m: np.ndarray, dims: tuple[int, ...], mode: int) -> np.ndarray:
    rest = dims[:mode] + dims[mode + 1:]
    return np.moveaxis(np.reshape(m, (dims[mode],) + rest, order="F"), 0, mode)


def _mode_product_array(arr: np.ndarray, a: np.ndarray, mode: int) -> np.ndarray:
    if a.ndim != 2 or a.shape[1] != arr.shape[mode]:
        raise ValueError(
            f"matrix of shape {a.shape} is not conformable with mode {mode} "
            f"of size {arr.shape[mode]}"
        )
    dims = arr.shape[:mode] + (a.shape[0],) + arr.shape[mode + 1:]
    return _fold_array(a @ unfold(arr, mode), dims, mode)


def mode_product(t, a, mode: int) -> DenseTensor:
    """``t x_mode a``: multiply every mode-``mode`` fiber by ``a``."""
    arr = _as_array(t)
    _check_mode(mode, arr.ndim)
    return DenseTensor(
        _mode_product_array(arr, np.asarray(a, dtype=np.float64), mode), copy=False
    )


def multi_mode_product_except(t, factors, skip: int | None, transposed: bool = False) -> DenseTensor:
    """Apply ``factors[j]`` (or its transpose) on every mode ``j != skip``.

    Modes are processed in ascending order. ``skip=None`` applies all of
    them.
    """
    arr = _as_array(t)
    if len(factors) != arr.ndim:
        raise ValueError(f"expected {arr.ndim} factors, got {len(factors)}")
    if skip is not None:
        _check_mode(skip, arr.ndim)
    for j, f in enumerate(factors):
        if j == skip:
            continue
        f = np.asarray(f, dtype=np.float64)
        arr = _mode_product_array(arr, f.T if transposed else f, j)
    return DenseTensor(arr, copy=False)


def frobenius_norm(t) -> float:
    arr = _as_array(t)
    return float(np.sqrt(np.sum(arr * arr)))


def inner(a, b) -> float:
    x, y = _as_array(a), _as_array(b)
    if x.shape != y.shape:
        raise ValueError(f"dims mismatch: {x.shape} vs {y.shape}")
    return float(np.sum(x * y))
