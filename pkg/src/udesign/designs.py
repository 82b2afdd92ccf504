"""Frame potentials, design verification, twirls, Choi matrices and bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _backend

CHOI_DIM_CAP = 4
UNITARY_TOL = 1e-10


@dataclass
class UnitaryEnsemble:
    """Finite uniformly weighted set of d x d unitaries."""

    matrices: np.ndarray
    name: str = "ensemble"
    provenance: str = ""
    closed_up_to_phase: bool = False
    claims: dict = field(default_factory=dict)

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=complex)
        if mats.ndim == 2:
            mats = mats[None]
        if mats.ndim != 3 or mats.shape[0] == 0 or mats.shape[1] != mats.shape[2]:
            raise ValueError("need a non-empty stack of square matrices")
        self.matrices = mats
        worst = unitarity_defect(mats)
        if worst > UNITARY_TOL:
            k = int(np.argmax(unitarity_defects(mats)))
            raise ValueError(f"matrix {k} is not unitary (defect {worst:.2e})")

    @property
    def d(self) -> int:
        return self.matrices.shape[1]

    @property
    def K(self) -> int:
        return self.matrices.shape[0]

    def __len__(self) -> int:
        return self.K

    def __iter__(self):
        return iter(self.matrices)


def unitarity_defects(mats: np.ndarray) -> np.ndarray:
    mats = np.asarray(mats)
    eye = np.eye(mats.shape[-1])
    prod = np.conj(np.swapaxes(mats, -1, -2)) @ mats
    return np.max(np.abs(prod - eye), axis=(-2, -1))


def unitarity_defect(mats: np.ndarray) -> float:
    return float(np.max(unitarity_defects(mats)))


def _matrices(D) -> np.ndarray:
    if isinstance(D, UnitaryEnsemble):
        return D.matrices
    if hasattr(D, "matrices") and callable(D.matrices):
        return D.matrices()
    if hasattr(D, "elements"):
        return np.asarray(D.elements, dtype=complex)
    return np.asarray(D, dtype=complex)


# -- frame potentials ----------------------------------------------------------


def frame_potential(D, t: int = 2) -> float:
    """sum_{k,k'} |tr(U_k^dag U_k')|^(2t) / K^2 by the full pair loop."""
    if t < 1:
        raise ValueError("order t must be >= 1")
    if hasattr(D, "traces") and not isinstance(D, UnitaryEnsemble):
        return frame_potential_group(D, t)
    mats = _matrices(D)
    K = mats.shape[0]
    if K == 0:
        raise ValueError("empty ensemble")
    vecs = mats.reshape(K, -1)
    return _backend.pair_power_sum(vecs, t) / K**2


def frame_potential_group(D, t: int = 2) -> float:
    """sum_k |tr U_k|^(2t) / K, valid for ensembles closed under products up to phase."""
    if t < 1:
        raise ValueError("order t must be >= 1")
    if hasattr(D, "traces"):
        tr = np.asarray(D.traces()).ravel()
    else:
        if isinstance(D, UnitaryEnsemble) and not D.closed_up_to_phase:
            raise ValueError("ensemble is not flagged as closed up to phase")
        mats = _matrices(D)
        tr = np.trace(mats, axis1=1, axis2=2)
    if tr.size == 0:
        raise ValueError("empty ensemble")
    return _backend.power_sum(tr, t) / tr.size


def is_closed_up_to_phase(D, samples: int | None = 50, seed: int = 0) -> bool:
    """Spot check (or exhaustive check with samples=None) of closure under products up to phase."""
    from .weyl import canonical_key

    mats = _matrices(D)
    keys = {canonical_key(m) for m in mats}
    K = len(mats)
    if samples is None:
        pairs = ((i, j) for i in range(K) for j in range(K))
    else:
        rng = np.random.default_rng(seed)
        pairs = zip(rng.integers(K, size=samples), rng.integers(K, size=samples))
    return all(canonical_key(mats[i] @ mats[j]) in keys for i, j in pairs)


def hook_length_dimension(partition: Sequence[int]) -> int:
    """Dimension of the S_n irrep labelled by ``partition``."""
    n = sum(partition)
    conj = [sum(1 for r in partition if r > j) for j in range(partition[0])] if partition else []
    hooks = 1
    for i, row in enumerate(partition):
        for j in range(row):
            hooks *= (row - j - 1) + (conj[j] - i - 1) + 1
    return math.factorial(n) // hooks


def partitions(n: int, max_parts: int | None = None, max_part: int | None = None) -> Iterable[tuple[int, ...]]:
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    if max_parts == 0:
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions(n - first, None if max_parts is None else max_parts - 1, first):
            yield (first,) + rest


@lru_cache(maxsize=None)
def target_potential(t: int, d: int) -> int:
    """Minimum order-t frame potential in dimension d: the number of irreps (with
    multiplicity) of U^{tensor t}, i.e. sum of squared S_t irrep dimensions over
    partitions of t into at most d parts."""
    if t < 1 or d < 2:
        raise ValueError("need t >= 1 and d >= 2")
    if d >= t:
        return math.factorial(t)
    return sum(hook_length_dimension(lam) ** 2 for lam in partitions(t, max_parts=d))


def two_row_target(n: int) -> int:
    """Closed form of target_potential(n, 2): sum_i [n!(n-2i+1)/(i!(n-i+1)!)]^2."""
    total = 0
    for i in range(n // 2 + 1):
        num = math.factorial(n) * (n - 2 * i + 1)
        den = math.factorial(i) * math.factorial(n - i + 1)
        total += (num // den) ** 2
    return total


@dataclass
class PotentialReport:
    t: int
    value: float
    target: float
    tol: float
    name: str = "ensemble"
    d: int = 0
    K: int = 0

    @property
    def gap(self) -> float:
        return self.value - self.target

    @property
    def verdict(self) -> bool:
        return self.value <= self.target + self.tol

    @property
    def below_target(self) -> bool:
        """True would indicate a numerical fault: the target is a lower bound."""
        return self.value < self.target - self.tol

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "d": self.d,
            "K": self.K,
            "t": self.t,
            "value": self.value,
            "target": self.target,
            "gap": self.gap,
            "verdict": "design" if self.verdict else "not-design",
            "tol": self.tol,
        }


def is_design(D, t: int = 2, tol: float = 1e-9) -> PotentialReport:
    if hasattr(D, "traces") or (isinstance(D, UnitaryEnsemble) and D.closed_up_to_phase):
        value = frame_potential_group(D, t)
    else:
        value = frame_potential(D, t)
    d = D.dim if hasattr(D, "dim") else _matrices(D).shape[1]
    return PotentialReport(
        t=t,
        value=value,
        target=float(target_potential(t, d)),
        tol=tol,
        name=getattr(D, "name", type(D).__name__),
        d=d,
        K=len(D),
    )


# -- vectorization and spherical designs ---------------------------------------


def vec_of_unitary(U: np.ndarray) -> np.ndarray:
    """v^{ij} = U[i, j] / sqrt(d), a maximally entangled unit vector when U is unitary."""
    U = np.asarray(U, dtype=complex)
    return U.ravel() / np.sqrt(U.shape[0])


def reduced_states(v: np.ndarray, d: int) -> tuple[np.ndarray, np.ndarray]:
    m = np.asarray(v).reshape(d, d)
    return m @ m.conj().T, m.T @ m.conj()


def is_maximally_entangled(v: np.ndarray, d: int, tol: float = 1e-10) -> bool:
    ra, rb = reduced_states(v, d)
    eye = np.eye(d) / d
    return bool(np.max(np.abs(ra - eye)) <= tol and np.max(np.abs(rb - eye)) <= tol)


@dataclass
class SphericalReport:
    value: float
    minimum: float

    @property
    def gap(self) -> float:
        return self.value - self.minimum


def spherical_minimum(D: int, t: int = 2) -> float:
    """Welch bound 1/binom(D+t-1, t) for K unit vectors in C^D."""
    return 1.0 / math.comb(D + t - 1, t)


def spherical_potential(vectors: np.ndarray, t: int = 2, tol: float = 1e-10) -> SphericalReport:
    vecs = np.atleast_2d(np.asarray(vectors, dtype=complex))
    norms = np.linalg.norm(vecs, axis=1)
    if np.max(np.abs(norms - 1)) > tol:
        raise ValueError("vectors must be normalized")
    K = vecs.shape[0]
    value = _backend.pair_power_sum(vecs, t) / K**2
    return SphericalReport(value, spherical_minimum(vecs.shape[1], t))


# -- twirls and Choi matrices -------------------------------------------------


@dataclass(frozen=True)
class SymmetrySplit:
    d: int

    @property
    def flip(self) -> np.ndarray:
        d = self.d
        F = np.zeros((d * d, d * d))
        i, j = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
        F[(j * d + i).ravel(), (i * d + j).ravel()] = 1.0
        return F

    @property
    def P_S(self) -> np.ndarray:
        return (np.eye(self.d**2) + self.flip) / 2

    @property
    def P_A(self) -> np.ndarray:
        return (np.eye(self.d**2) - self.flip) / 2

    @property
    def d_s(self) -> int:
        return self.d * (self.d + 1) // 2

    @property
    def d_a(self) -> int:
        return self.d * (self.d - 1) // 2


def twirl_with_ensemble(D, rho: np.ndarray) -> np.ndarray:
    """(1/K) sum_k (U_k x U_k) rho (U_k x U_k)^dag."""
    mats = _matrices(D)
    K, d, _ = mats.shape
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (d * d, d * d):
        raise ValueError(f"expected a {d * d}x{d * d} operator")
    # (U x U) rho (U x U)^dag via the reshaped 4-index tensor
    r = rho.reshape(d, d, d, d)
    out = np.einsum("kai,kbj,ijlm,kcl,kdm->abcd", mats, mats, r, mats.conj(), mats.conj(), optimize=True)
    return out.reshape(d * d, d * d) / K


def twirl_by_projectors(projectors: Sequence[np.ndarray], rho: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """sum_i tr(P_i rho) P_i / tr P_i for an orthogonal, complete projector set."""
    Ps = [np.asarray(P, dtype=complex) for P in projectors]
    dim = Ps[0].shape[0]
    if np.max(np.abs(sum(Ps) - np.eye(dim))) > tol:
        raise ValueError("projectors do not sum to the identity")
    for i, P in enumerate(Ps):
        if np.max(np.abs(P @ P - P)) > tol:
            raise ValueError(f"operator {i} is not a projector")
        for j in range(i):
            if np.max(np.abs(P @ Ps[j])) > tol:
                raise ValueError(f"projectors {j} and {i} are not orthogonal")
    rho = np.asarray(rho, dtype=complex)
    return sum(np.trace(P @ rho) / np.trace(P).real * P for P in Ps)


def uu_twirl(rho: np.ndarray, d: int) -> np.ndarray:
    """Haar UU-twirl via the symmetric/antisymmetric projectors."""
    s = SymmetrySplit(d)
    return twirl_by_projectors([s.P_S, s.P_A], rho)


def apply_choi(C: np.ndarray, X: np.ndarray) -> np.ndarray:
    """Lambda(X) = tr_1[(X^T x 1) C] for C = sum_ij |i><j| x Lambda(|i><j|)."""
    X = np.asarray(X, dtype=complex)
    n = X.shape[0]
    m = C.shape[0] // n
    Cr = C.reshape(n, m, n, m)
    return np.einsum("ij,iajb->ab", X, Cr)


def twirl_channel(D, channel: Callable[[np.ndarray], np.ndarray] | np.ndarray, rho: np.ndarray) -> np.ndarray:
    """(1/K) sum_k U_k^dag Lambda(U_k rho U_k^dag) U_k; Lambda a callable or a Choi matrix."""
    mats = _matrices(D)
    d = mats.shape[1]
    if not callable(channel):
        C = np.asarray(channel)
        if C.shape != (d * d, d * d):
            raise ValueError("Choi matrix does not match the ensemble dimension")
        channel = lambda X, C=C: apply_choi(C, X)
    out = np.zeros((d, d), dtype=complex)
    for U in mats:
        out += U.conj().T @ channel(U @ rho @ U.conj().T) @ U
    return out / len(mats)


def fit_depolarizing(rho: np.ndarray, out: np.ndarray) -> tuple[float, float]:
    """Least-squares a with out = a rho + (1 - a) tr(rho) 1/d; returns (a, residual)."""
    d = rho.shape[0]
    base = np.trace(rho) * np.eye(d) / d
    diff = rho - base
    a = float(np.real(np.vdot(diff, out - base) / np.vdot(diff, diff)))
    return a, float(np.max(np.abs(out - (a * rho + (1 - a) * base))))


@dataclass
class ChoiMatrix:
    D: int
    matrix: np.ndarray

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        return bool(np.max(np.abs(self.matrix - self.matrix.conj().T)) <= tol)

    def apply(self, X: np.ndarray) -> np.ndarray:
        return apply_choi(self.matrix, X)


def _check_cap(d: int) -> None:
    if d > CHOI_DIM_CAP:
        raise ValueError(f"Choi matrices are limited to d <= {CHOI_DIM_CAP}; use the frame potential instead")


def choi_of_twirl(D) -> ChoiMatrix:
    """C_D for the UU-twirl of D, as (1/K) sum_k |u_k><u_k| with u_k = (1 x V_k)|Omega>."""
    mats = _matrices(D)
    K, d, _ = mats.shape
    _check_cap(d)
    V = np.einsum("kab,kcd->kacbd", mats, mats).reshape(K, d * d, d * d)
    u = np.swapaxes(V, 1, 2).reshape(K, -1)
    return ChoiMatrix(d * d, (u.T @ u.conj()) / K)


def choi_uu(d: int) -> ChoiMatrix:
    """C_UU = P_S x P_S / d_s + P_A x P_A / d_a."""
    _check_cap(d)
    s = SymmetrySplit(d)
    return ChoiMatrix(d * d, np.kron(s.P_S, s.P_S) / s.d_s + np.kron(s.P_A, s.P_A) / s.d_a)


def choi_gap(D) -> float:
    """||C_UU - C_D||_2^2, equal to P(D) - 2."""
    mats = _matrices(D)
    delta = choi_uu(mats.shape[1]).matrix - choi_of_twirl(mats).matrix
    return float(np.sum(np.abs(delta) ** 2))


def dpro_distance(D) -> float:
    """tr|C_UU - C_D| / d^2, the trace norm normalized by the channel input dimension."""
    mats = _matrices(D)
    d = mats.shape[1]
    delta = choi_uu(d).matrix - choi_of_twirl(mats).matrix
    ev = np.linalg.eigvalsh((delta + delta.conj().T) / 2)
    return float(np.sum(np.abs(ev)) / d**2)


# -- bounds -------------------------------------------------------------------


def lower_bound(d: int) -> int:
    if d < 2:
        raise ValueError("d must be >= 2")
    return d**4 - 2 * d**2 + 2


def clifford_bound(d: int) -> int:
    if d < 2:
        raise ValueError("d must be >= 2")
    return d**4 - d**2


def cardinality_modulus(d: int) -> int:
    return math.lcm(d, d * (d + 1) // 2, d * (d - 1) // 2)


def cardinality_constraints(d: int, K: int) -> bool:
    """Divisibility constraint on the size of a group 2-design."""
    return K % cardinality_modulus(d) == 0


def smallest_admissible(d: int) -> int:
    lb = lower_bound(d)
    m = cardinality_modulus(d)
    return -(-lb // m) * m


# -- characters ----------------------------------------------------------------


@dataclass
class CharacterReport:
    potential: float
    chiS_norm: float
    chiA_norm: float
    integer_check: bool


def character_report(G, t: int = 2, tol: float = 1e-8) -> CharacterReport:
    """Character data of a closed complex matrix group (elements as a stack)."""
    mats = np.asarray(getattr(G, "elements", G), dtype=complex)
    n = len(mats)
    zeta = np.trace(mats, axis1=1, axis2=2)
    zeta_sq = np.einsum("kab,kba->k", mats, mats)
    potential = _backend.power_sum(zeta, t) / n
    chiS = (zeta**2 + zeta_sq) / 2
    chiA = (zeta**2 - zeta_sq) / 2
    return CharacterReport(
        potential=potential,
        chiS_norm=float(np.sum(np.abs(chiS) ** 2) / n),
        chiA_norm=float(np.sum(np.abs(chiA) ** 2) / n),
        integer_check=abs(potential - round(potential)) <= tol,
    )
