"""Passive linear optics: U(d) embedded in the symplectic-orthogonal group SpO(2d).

Quadratures are ordered (x_1..x_d, p_1..p_d).  A unitary U = X + iY acts on them as
S(U) = [[X, -Y], [Y, X]], which satisfies Omega S(U) Omega^dag = U (+) conj(U) with
Omega = [[1, i], [1, -i]] / sqrt(2).
"""

from __future__ import annotations

import numpy as np

from .designs import is_design, unitarity_defect

TOL = 1e-10


def omega(d: int) -> np.ndarray:
    I = np.eye(d)
    return np.block([[I, 1j * I], [I, -1j * I]]) / np.sqrt(2)


def real_symplectic_form(d: int) -> np.ndarray:
    I = np.eye(d)
    Z = np.zeros((d, d))
    return np.block([[Z, I], [-I, Z]])


def embed_unitary(U: np.ndarray, tol: float = TOL) -> np.ndarray:
    U = np.asarray(U, dtype=complex)
    if unitarity_defect(U[None]) > tol:
        raise ValueError("input is not unitary")
    X, Y = U.real, U.imag
    return np.block([[X, -Y], [Y, X]])


def direct_sum_conj(U: np.ndarray) -> np.ndarray:
    d = U.shape[0]
    out = np.zeros((2 * d, 2 * d), dtype=complex)
    out[:d, :d] = U
    out[d:, d:] = U.conj()
    return out


def is_symplectic_orthogonal(S: np.ndarray, tol: float = TOL) -> bool:
    S = np.asarray(S)
    d = S.shape[0] // 2
    J = real_symplectic_form(d)
    orth = np.max(np.abs(S.T @ S - np.eye(2 * d)))
    symp = np.max(np.abs(S @ J @ S.T - J))
    return bool(np.isrealobj(S) and orth <= tol and symp <= tol)


def conjugation_residual(U: np.ndarray) -> float:
    """max |Omega S(U) Omega^dag - U (+) conj(U)|."""
    d = U.shape[0]
    W = omega(d)
    return float(np.max(np.abs(W @ embed_unitary(U) @ W.conj().T - direct_sum_conj(U))))


def pushforward_design(D, t: int = 2, tol: float = 1e-9, verify: bool = True) -> np.ndarray:
    """Images S(U_k) of a verified order-t design."""
    if verify:
        rep = is_design(D, t, tol)
        if not rep.verdict:
            raise ValueError(f"ensemble is not a verified {t}-design (gap {rep.gap:.3e})")
    return np.array([embed_unitary(U) for U in D])


def _check_gamma(gamma: np.ndarray, d: int) -> np.ndarray:
    gamma = np.asarray(gamma, dtype=float)
    if gamma.shape != (2 * d, 2 * d):
        raise ValueError(f"covariance matrix must be {2 * d}x{2 * d}")
    if np.max(np.abs(gamma - gamma.T)) > 1e-12:
        raise ValueError("covariance matrix must be symmetric")
    return gamma


def f_values(D, gamma: np.ndarray) -> np.ndarray:
    """f(U_k) = [(U (+) conj U) Omega gamma Omega^dag (U (+) conj U)^dag]_{00} for every k."""
    mats = np.array(list(D), dtype=complex)
    d = mats.shape[1]
    gamma = _check_gamma(gamma, d)
    W = omega(d)
    A = W @ gamma @ W.conj().T
    # only the first row of U (+) conj(U) matters: it is (U[0, :], 0)
    row = mats[:, 0, :]
    vals = np.einsum("ki,ij,kj->k", row, A[:d, :d], row.conj())
    if np.max(np.abs(vals.imag)) > TOL:
        raise AssertionError("energy functional is not real")
    return vals.real


def energy_fluctuation(D, gamma: np.ndarray, tol: float = 1e-9, verify: bool = True) -> float:
    """avg f^2 - (avg f)^2 over a verified 2-design."""
    if verify:
        rep = is_design(D, 2, tol)
        if not rep.verdict:
            raise ValueError(f"ensemble is not a verified 2-design (gap {rep.gap:.3e})")
    f = f_values(D, gamma)
    return float(np.mean(f**2) - np.mean(f) ** 2)


def first_moment_reference(gamma: np.ndarray, d: int) -> float:
    """Haar (1-design) value of avg f: tr of the upper-left block of Omega gamma Omega^dag, over d."""
    W = omega(d)
    A = W @ _check_gamma(gamma, d) @ W.conj().T
    return float(np.trace(A[:d, :d]).real / d)
