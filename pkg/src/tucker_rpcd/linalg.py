"""Small dense matrix kernels: unique QR, symmetric eigensolves, Lyapunov."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
import scipy.linalg

# Relative threshold below which an R diagonal entry (or an eigenvalue of
# a supposedly SPD matrix) is treated as zero.
RANK_TOL = 1e-12


class NumericalError(ArithmeticError):
    """A numerical kernel failed (rank deficiency, divergence, no convergence)."""


class RankDeficientError(NumericalError):
    pass


class EigenDecomposition(NamedTuple):
    values: np.ndarray
    vectors: np.ndarray


def qf(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Thin QR factorization with a nonnegative diagonal in R.

    Returns ``(Q, R)`` with ``m = Q @ R``. Columns of a standard Householder
    QR are sign-flipped so that ``diag(R) >= 0``, which makes the factors
    unique for full-rank input.

    Raises
    ------
    RankDeficientError
        If some ``|R[k, k]|`` falls below ``RANK_TOL * ||m||_F``.
    """
    m = np.asarray(m, dtype=np.float64)
    n, r = m.shape
    if r > n:
        raise ValueError(f"qf needs rows >= cols, got {m.shape}")
    q, rr = np.linalg.qr(m)
    d = np.diagonal(rr)
    scale = np.linalg.norm(m)
    if scale == 0.0 or np.min(np.abs(d)) <= RANK_TOL * scale:
        raise RankDeficientError("matrix is numerically rank deficient")
    signs = np.where(d < 0, -1.0, 1.0)
    return q * signs, rr * signs[:, None]


def symmetrize(s: np.ndarray) -> np.ndarray:
    return 0.5 * (s + s.T)


def _fix_signs(v: np.ndarray) -> np.ndarray:
    # largest-magnitude entry of each column made positive; argmax picks
    # the lowest row index on ties
    idx = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[idx, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return v * signs


def sym_eig(s: np.ndarray) -> EigenDecomposition:
    """Eigendecomposition of a symmetric matrix, values sorted descending."""
    s = np.asarray(s, dtype=np.float64)
    if s.ndim != 2 or s.shape[0] != s.shape[1]:
        raise ValueError(f"expected a square matrix, got {s.shape}")
    scale = max(np.linalg.norm(s), np.finfo(float).tiny)
    if np.linalg.norm(s - s.T) > 1e-10 * scale:
        raise ValueError("matrix is not symmetric; symmetrize it first")
    try:
        w, v = np.linalg.eigh(symmetrize(s))
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    return EigenDecomposition(w[::-1].copy(), _fix_signs(v[:, ::-1]))


def dominant_subspace(m: np.ndarray, r: int) -> np.ndarray:
    """Orthonormal basis of the top-``r`` left singular subspace of ``m``.

    Computed from a dense eigendecomposition of the Gram matrix ``m m^T``.
    """
    m = np.asarray(m, dtype=np.float64)
    n, ell = m.shape
    if not 1 <= r <= min(n, ell):
        raise ValueError(f"rank {r} invalid for a {n}x{ell} matrix")
    gram = m @ m.T
    try:
        w, v = scipy.linalg.eigh(symmetrize(gram), subset_by_index=[n - r, n - 1])
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed: {exc}") from exc
    return _fix_signs(v[:, ::-1])


def solve_lyapunov(lam: np.ndarray, c: np.ndarray) -> np.ndarray:
    """Solve ``lam @ S + S @ lam = c`` for symmetric positive definite ``lam``."""
    lam = np.asarray(lam, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    r = lam.shape[0]
    if lam.shape != (r, r) or c.shape != (r, r):
        raise ValueError(f"shape mismatch: {lam.shape} and {c.shape}")
    d, q = np.linalg.eigh(symmetrize(lam))
    if d[0] <= RANK_TOL * np.sum(d) / r:
        raise NumericalError("lam is not positive definite")
    ct = q.T @ c @ q
    s = q @ (ct / (d[:, None] + d[None, :])) @ q.T
    return symmetrize(s)
