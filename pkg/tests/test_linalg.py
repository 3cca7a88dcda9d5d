import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tucker_rpcd.linalg import (
    NumericalError,
    RankDeficientError,
    dominant_subspace,
    qf,
    solve_lyapunov,
    sym_eig,
)


def lyapunov_kron_oracle(lam, c):
    r = lam.shape[0]
    eye = np.eye(r)
    k = np.kron(eye, lam) + np.kron(lam.T, eye)
    return np.linalg.solve(k, c.reshape(-1, order="F")).reshape((r, r), order="F")


def random_spd(rng, r):
    a = rng.standard_normal((r, r))
    return a @ a.T + 0.5 * np.eye(r)


def test_qf_examples(rng):
    u = qf(rng.standard_normal((6, 3)))[0]
    q, r = qf(u)
    assert np.allclose(q, u, atol=1e-14)
    assert np.allclose(r, np.eye(3), atol=1e-14)

    q, r = qf(np.diag([2.0, 3.0]))
    assert np.allclose(q, np.eye(2), atol=1e-15)
    assert np.allclose(r, np.diag([2.0, 3.0]), atol=1e-15)

    q, r = qf(np.array([[-1.0, 0.0], [0.0, 1.0]]))
    assert np.allclose(q, [[-1.0, 0.0], [0.0, 1.0]], atol=1e-15)
    assert np.allclose(r, np.eye(2), atol=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 6), st.integers(0, 2**32 - 1))
def test_qf_contracts(r, extra, seed):
    rng = np.random.default_rng(seed)
    m = rng.standard_normal((r + extra, r))
    q, rr = qf(m)
    assert np.linalg.norm(m - q @ rr) <= 1e-10 * np.linalg.norm(m)
    assert np.max(np.abs(q.T @ q - np.eye(r))) <= 1e-12
    assert np.all(np.diag(rr) >= 0)
    assert np.allclose(np.triu(rr), rr)
    # uniqueness: qf(Q R') returns Q for any R' with positive diagonal
    rp = np.triu(rng.standard_normal((r, r)))
    rp[np.diag_indices(r)] = np.abs(rp[np.diag_indices(r)]) + 0.5
    assert np.allclose(qf(q @ rp)[0], q, atol=1e-10)


def test_qf_rank_deficient():
    with pytest.raises(RankDeficientError):
        qf(np.array([[1.0, 2.0], [2.0, 4.0], [0.0, 0.0]]))
    with pytest.raises(RankDeficientError):
        qf(np.zeros((3, 2)))


def test_sym_eig(rng):
    e = sym_eig(np.eye(4))
    assert np.allclose(e.values, 1.0)
    a = rng.standard_normal((6, 6))
    s = a + a.T
    e = sym_eig(s)
    assert np.all(np.diff(e.values) <= 0)
    assert abs(np.trace(s) - e.values.sum()) <= 1e-10 * np.linalg.norm(s)
    assert np.max(np.abs(e.vectors.T @ e.vectors - np.eye(6))) <= 1e-10
    recon = e.vectors @ np.diag(e.values) @ e.vectors.T
    assert np.linalg.norm(recon - s) <= 1e-9 * np.linalg.norm(s)
    for k in range(6):
        v = e.vectors[:, k]
        assert np.linalg.norm(s @ v - e.values[k] * v) <= 1e-9 * np.linalg.norm(s)
        assert v[np.argmax(np.abs(v))] > 0
    with pytest.raises(ValueError):
        sym_eig(a)


def test_dominant_subspace(rng):
    u = dominant_subspace(np.diag([3.0, 2.0, 1.0]), 2)
    p = u @ u.T
    assert np.linalg.norm(p - np.diag([1.0, 1.0, 0.0])) <= 1e-12

    m = rng.standard_normal((6, 10))
    u = dominant_subspace(m, 3)
    w, v = np.linalg.eigh(m @ m.T)
    ref = v[:, -3:] @ v[:, -3:].T
    assert np.linalg.norm(u @ u.T - ref) <= 1e-9
    assert np.max(np.abs(u.T @ u - np.eye(3))) <= 1e-10
    # deterministic signs
    assert np.array_equal(u, dominant_subspace(m, 3))
    with pytest.raises(ValueError):
        dominant_subspace(m, 7)


def test_lyapunov_examples(rng):
    c = rng.standard_normal((3, 3))
    c = c + c.T
    assert np.allclose(solve_lyapunov(np.eye(3), c), c / 2, atol=1e-15)
    assert np.array_equal(solve_lyapunov(random_spd(rng, 3), np.zeros((3, 3))), np.zeros((3, 3)))


@pytest.mark.parametrize("seed", range(10))
def test_lyapunov_matches_kronecker(seed):
    rng = np.random.default_rng(seed)
    lam = random_spd(rng, 4)
    c = rng.standard_normal((4, 4))
    c = c + c.T
    s = solve_lyapunov(lam, c)
    assert np.max(np.abs(s - lyapunov_kron_oracle(lam, c))) <= 1e-9
    assert np.linalg.norm(lam @ s + s @ lam - c) <= 1e-10 * np.linalg.norm(c)
    assert np.max(np.abs(s - s.T)) <= 1e-12


def test_lyapunov_rejects_singular():
    with pytest.raises(NumericalError):
        solve_lyapunov(np.diag([1.0, 0.0]), np.eye(2))
