import numpy as np
import pytest

from udesign.catalog import builtin_qubit12
from udesign.designs import frame_potential, is_design
from udesign.optimize import (
    OptimizerConfig,
    expm_skew,
    minimize_potential,
    potential_gradient,
    random_unitaries,
    riemannian_direction,
)


def fd_gradient(U, t, h=1e-6):
    """Central differences of P along Re and Im of each entry, combined as d/d(conj z)."""
    out = np.zeros_like(U)
    for idx in np.ndindex(U.shape):
        E = np.zeros(U.shape, dtype=complex)
        E[idx] = h
        dre = (frame_potential(U + E, t) - frame_potential(U - E, t)) / (2 * h)
        dim = (frame_potential(U + 1j * E, t) - frame_potential(U - 1j * E, t)) / (2 * h)
        out[idx] = (dre + 1j * dim) / 2
    return out


@pytest.mark.parametrize("K,t", [(1, 1), (1, 2), (3, 2), (4, 3)])
def test_gradient_matches_finite_differences(K, t, rng, backend):
    for _ in range(3):
        U = random_unitaries(2, K, rng)
        G = potential_gradient(U, t)
        F = fd_gradient(U, t)
        assert np.max(np.abs(G - F)) <= 1e-5 * max(np.max(np.abs(F)), 1e-12) + 1e-9


def test_gradient_formula(rng):
    U = random_unitaries(3, 4, rng)
    t, K = 2, 4
    T = np.einsum("aji,bji->ab", U.conj(), U)  # tr(U_a^dag U_b)
    expect = np.zeros_like(U)
    for k in range(K):
        for j in range(K):
            expect[k] += abs(T[k, j]) ** (2 * (t - 1)) * T[j, k] * U[j]
    expect *= 2 * t / K**2
    assert np.allclose(potential_gradient(U, t), expect)


def test_stationary_at_design():
    U = builtin_qubit12().ensemble.matrices
    omega = riemannian_direction(U, potential_gradient(U, 2))
    assert np.linalg.norm(omega) < 1e-5


def test_retraction_unitary(rng):
    U = random_unitaries(3, 5, rng)
    omega = riemannian_direction(U, potential_gradient(U, 2))
    assert np.allclose(omega, -np.conj(np.swapaxes(omega, 1, 2)))
    V = expm_skew(omega, 0.7) @ U
    assert np.max(np.abs(np.conj(np.swapaxes(V, 1, 2)) @ V - np.eye(3))) < 1e-12
    assert np.allclose(expm_skew(omega, 0.0), np.eye(3))


def test_config_validation():
    with pytest.raises(ValueError):
        OptimizerConfig(K=0)
    with pytest.raises(ValueError):
        OptimizerConfig(tol=0)
    with pytest.raises(ValueError):
        OptimizerConfig(backtrack=1.0)


def test_k12_finds_design():
    tr = minimize_potential(OptimizerConfig(d=2, K=12, t=2, restarts=20, seed=0))
    assert tr.success and tr.best.final <= 2 + 1e-4
    assert is_design(tr.ensemble(), 2, tol=1e-3).verdict
    for r in tr.runs:
        assert all(b <= a for a, b in zip(r.values, r.values[1:]))
        U = r.matrices
        assert np.max(np.abs(np.conj(np.swapaxes(U, 1, 2)) @ U - np.eye(2))) < 1e-10


def test_k1_constant():
    tr = minimize_potential(OptimizerConfig(d=2, K=1, t=1, restarts=2, max_iter=20))
    assert all(abs(v - 4) < 1e-12 for r in tr.runs for v in r.values)
    assert not tr.success


def test_k11_reported_not_asserted():
    tr = minimize_potential(OptimizerConfig(d=2, K=11, t=2, restarts=2, max_iter=300, seed=3))
    s = tr.summary()
    assert s["gap"] == tr.best.final - 2 and len(s["restarts"]) == 2
    assert tr.best.final >= 2 - 1e-9
    if not tr.success:
        assert tr.ensemble().claims == {}


def test_determinism():
    cfg = OptimizerConfig(d=2, K=6, t=2, restarts=2, max_iter=60, seed=11)
    a = list(minimize_potential(cfg).json_lines())
    b = list(minimize_potential(cfg).json_lines())
    assert a == b


def test_threads_same_selection():
    cfg = dict(d=2, K=5, t=2, restarts=3, max_iter=40, seed=5)
    a = minimize_potential(OptimizerConfig(**cfg, threads=1))
    b = minimize_potential(OptimizerConfig(**cfg, threads=3))
    assert a.best.restart == b.best.restart
    assert a.best.values == b.best.values
