"""Stiefel/Grassmann geometry for one factor block.

Points are ``n x r`` arrays with orthonormal columns. The preconditioned
metric at ``u`` is ``<xi, eta>_u = trace(xi^T eta lam)`` with
``lam = u^T Y Y^T u``. Gram matrices ``Y Y^T`` are never formed; every
product associates through the ``r``- or ``L``-sized middle dimension.
"""

from __future__ import annotations

import numpy as np

from .linalg import qf, solve_lyapunov, symmetrize

ORTHO_DRIFT_TOL = 1e-10


def eye_stiefel(n: int, r: int) -> np.ndarray:
    if r > n:
        raise ValueError(f"rank {r} exceeds dimension {n}")
    return np.eye(n, r)


def random_stiefel(n: int, r: int, seed: int | np.random.Generator | None = None) -> np.ndarray:
    """Q-factor of an ``n x r`` standard normal draw."""
    if r > n:
        raise ValueError(f"rank {r} exceeds dimension {n}")
    rng = np.random.default_rng(seed)
    return qf(rng.standard_normal((n, r)))[0]


def ortho_drift(u: np.ndarray) -> float:
    return float(np.max(np.abs(u.T @ u - np.eye(u.shape[1]))))


def reorthonormalize(u: np.ndarray) -> np.ndarray:
    """Pull ``u`` back onto the Stiefel manifold if it drifted."""
    if ortho_drift(u) > ORTHO_DRIFT_TOL:
        return qf(u)[0]
    return u


def proj_tangent_euclid(u: np.ndarray, z: np.ndarray) -> np.ndarray:
    if u.shape != z.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {z.shape}")
    return z - u @ symmetrize(u.T @ z)


def lambda_of(u: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Least-squares multiplier estimate ``(u^T y)(u^T y)^T``."""
    if u.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: {u.shape} vs {y.shape}")
    w = u.T @ y
    return symmetrize(w @ w.T)


def metric_inner(xi: np.ndarray, eta: np.ndarray, lam: np.ndarray) -> float:
    return float(np.sum(xi * (eta @ lam)))


def proj_tangent_precond(u: np.ndarray, z: np.ndarray, lam: np.ndarray) -> np.ndarray:
    """Orthogonal projection onto the tangent space in the ``lam`` metric.

    ``z - u S lam^{-1}`` where ``lam S + S lam = lam (u^T z + z^T u) lam``.
    """
    if u.shape != z.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {z.shape}")
    utz = u.T @ z
    s = solve_lyapunov(lam, lam @ (utz + utz.T) @ lam)
    # S lam^{-1} = (lam^{-1} S)^T since both are symmetric
    return z - u @ np.linalg.solve(lam, s).T


def precond_grad(u: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Block gradient ``-y (y^T u) + u`` used by the RPCD update."""
    return u - y @ (y.T @ u)


def precond_grad_metric(u: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Metric-consistent gradient ``-y y^T u lam^{-1} + u``.

    Horizontal at ``u`` and zero exactly at stationary subspaces.
    """
    w = y.T @ u
    lam = symmetrize(w.T @ w)
    g = y @ w
    return u - np.linalg.solve(lam, g.T).T


def euclid_reduced_grad(u: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient of ``-1/2 ||u^T y||^2`` under the Euclidean metric."""
    w = y @ (y.T @ u)
    return u @ (u.T @ w) - w


def retract_qr(u: np.ndarray, xi: np.ndarray, alpha: float = 1.0) -> np.ndarray:
    """``qf(u - alpha * xi).Q``."""
    return qf(u - alpha * xi)[0]
