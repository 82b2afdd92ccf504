"""Phase space F_d^n x F_d^n, shift/boost operators and Weyl (generalized Pauli) operators.

Hilbert space basis vectors |x>, x in F_d^n, are ordered lexicographically in the
field indices (x_1 most significant), so n-particle operators are Kronecker
products of single-particle ones in the natural numpy order.

Weyl operators are monomial matrices; they are stored as a permutation and a
phase vector, ``w|x> = phase[x] |perm[x]>``, and densified on demand.

Phase convention: for odd characteristic ``w(p, q) = chi(-p q / 2) z(p) x(q)``;
for characteristic 2 the factor 1/2 does not exist and ``w(p, q) = i^Tr(p q)
z(p) x(q)`` with the absolute trace read as an integer 0/1.  Each qubit-type
operator is then a Hermitian involution and n = 1, d = 2 reproduces {1, X, Y, Z}
up to sign.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

from . import _backend
from .gfield import ExtensionBasis, FieldElement, FieldSpec, default_extension_basis, field_create


@dataclass(frozen=True)
class PhasePoint:
    p: tuple[int, ...]
    q: tuple[int, ...]

    @property
    def vector(self) -> tuple[int, ...]:
        return self.p + self.q

    def to_json(self) -> list[int]:
        return list(self.vector)


class PhaseSpace:
    """V = F^n x F^n over a field F = GF(d)."""

    def __init__(self, field: FieldSpec, n: int = 1):
        if n < 1:
            raise ValueError("need at least one particle")
        self.field = field
        self.n = n
        self.d = field.order

    def __repr__(self) -> str:
        return f"PhaseSpace({self.field!r}, n={self.n})"

    def __eq__(self, other) -> bool:
        return isinstance(other, PhaseSpace) and (self.field, self.n) == (other.field, other.n)

    def __hash__(self) -> int:
        return hash((self.field, self.n))

    @property
    def dim(self) -> int:
        """Hilbert space dimension d^n."""
        return self.d**self.n

    @property
    def size(self) -> int:
        """|V| = d^(2n)."""
        return self.d ** (2 * self.n)

    @property
    def tables(self):
        return self.field.tables

    def point(self, p: Sequence[int | FieldElement], q: Sequence[int | FieldElement]) -> PhasePoint:
        if len(p) != self.n or len(q) != self.n:
            raise ValueError(f"labels must have {self.n} components")
        return PhasePoint(tuple(int(x) for x in p), tuple(int(x) for x in q))

    def from_vector(self, vec: Sequence[int]) -> PhasePoint:
        vec = [int(v) for v in vec]
        return PhasePoint(tuple(vec[: self.n]), tuple(vec[self.n :]))

    def index(self, a: PhasePoint) -> int:
        idx = 0
        for c in a.vector:
            idx = idx * self.d + c
        return idx

    def from_index(self, idx: int) -> PhasePoint:
        digits = []
        for _ in range(2 * self.n):
            digits.append(idx % self.d)
            idx //= self.d
        return self.from_vector(digits[::-1])

    def points(self) -> Iterator[PhasePoint]:
        for i in range(self.size):
            yield self.from_index(i)

    @cached_property
    def coords(self) -> np.ndarray:
        """All points as an (|V|, 2n) array of field indices, in index order."""
        idx = np.arange(self.size)
        cols = [(idx // self.d ** (2 * self.n - 1 - j)) % self.d for j in range(2 * self.n)]
        out = np.stack(cols, axis=1)
        out.setflags(write=False)
        return out

    def indices_of(self, coords: np.ndarray) -> np.ndarray:
        coords = np.asarray(coords)
        weights = self.d ** np.arange(2 * self.n - 1, -1, -1)
        return coords @ weights

    def add(self, a: PhasePoint, b: PhasePoint) -> PhasePoint:
        add = self.tables.add
        return self.from_vector([add[x, y] for x, y in zip(a.vector, b.vector)])

    def neg(self, a: PhasePoint) -> PhasePoint:
        return self.from_vector([self.tables.neg[x] for x in a.vector])

    def scale(self, lam: int, a: PhasePoint) -> PhasePoint:
        return self.from_vector([self.tables.mul[int(lam), x] for x in a.vector])

    def zero(self) -> PhasePoint:
        return PhasePoint((0,) * self.n, (0,) * self.n)


def _dot(space: PhaseSpace, u: Sequence[int], v: Sequence[int]) -> int:
    t = space.tables
    acc = 0
    for x, y in zip(u, v):
        acc = t.add[acc, t.mul[x, y]]
    return acc


def symplectic_form(space: PhaseSpace, a: PhasePoint, b: PhasePoint) -> FieldElement:
    """[a, b] = p.q' - q.p'."""
    if len(a.p) != space.n or len(b.p) != space.n:
        raise ValueError("points do not belong to this phase space")
    t = space.tables
    val = t.add[_dot(space, a.p, b.q), t.neg[_dot(space, a.q, b.p)]]
    return space.field.from_int(int(val))


def symplectic_form_matrix(n: int) -> np.ndarray:
    """J with a^T J b = [a, b] for a = (p, q); entries as signed integers."""
    J = np.zeros((2 * n, 2 * n), dtype=np.int64)
    J[:n, n:] = np.eye(n, dtype=np.int64)
    J[n:, :n] = -np.eye(n, dtype=np.int64)
    return J


def shift_operator(field: FieldSpec, q: int | FieldElement) -> np.ndarray:
    """x(q)|x> = |x + q>."""
    d = field.order
    out = np.zeros((d, d), dtype=complex)
    out[field.tables.add[:, int(q)], np.arange(d)] = 1.0
    return out


def boost_operator(field: FieldSpec, p: int | FieldElement) -> np.ndarray:
    """z(p)|x> = chi(p x)|x>."""
    t = field.tables
    return np.diag(t.chi[t.mul[int(p), :]])


def _phase_prefactor(field: FieldSpec, p: int, q: int) -> complex:
    t = field.tables
    pq = t.mul[p, q]
    if field.p == 2:
        return 1j ** int(t.trace[pq])
    half = t.inv[2 % field.p]
    return t.chi[t.neg[t.mul[half, pq]]]


@lru_cache(maxsize=None)
def _single_table(field: FieldSpec) -> tuple[np.ndarray, np.ndarray]:
    """(perms, phases) of shape (d*d, d) for every single-particle label p*d + q."""
    d = field.order
    t = field.tables
    perms = np.empty((d * d, d), dtype=np.int64)
    phases = np.empty((d * d, d), dtype=complex)
    for p in range(d):
        for q in range(d):
            target = t.add[:, q]
            perms[p * d + q] = target
            phases[p * d + q] = _phase_prefactor(field, p, q) * t.chi[t.mul[p, target]]
    perms.setflags(write=False)
    phases.setflags(write=False)
    return perms, phases


def _combine(space: PhaseSpace, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Tensor together single-particle monomial data for an (N, 2n) label array."""
    d, n = space.d, space.n
    sp, sph = _single_table(space.field)
    labels = np.atleast_2d(labels)
    N = labels.shape[0]
    perm = np.zeros((N,) + (d,) * n, dtype=np.int64)
    phase = np.ones((N,) + (d,) * n, dtype=complex)
    for i in range(n):
        single = labels[:, i] * d + labels[:, n + i]
        shape = [N] + [1] * n
        shape[1 + i] = d
        perm = perm + sp[single].reshape(shape) * d ** (n - 1 - i)
        phase = phase * sph[single].reshape(shape)
    return perm.reshape(N, d**n), phase.reshape(N, d**n)


@dataclass(frozen=True, eq=False)
class WeylOperator:
    label: PhasePoint
    perm: np.ndarray
    phase: np.ndarray

    @property
    def dim(self) -> int:
        return self.perm.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        out[self.perm, np.arange(self.dim)] = self.phase
        return out

    def trace(self) -> complex:
        fixed = self.perm == np.arange(self.dim)
        return complex(np.sum(self.phase[fixed]))

    def trace_with(self, mat: np.ndarray) -> complex:
        """tr(w M) in O(dim)."""
        return complex(_backend.monomial_traces(self.perm[None, :], self.phase[None, :], mat)[0])

    def lmul(self, mat: np.ndarray) -> np.ndarray:
        """w @ mat."""
        out = np.empty_like(mat, dtype=complex)
        out[self.perm] = self.phase[:, None] * mat
        return out

    def rmul_dagger(self, mat: np.ndarray) -> np.ndarray:
        """mat @ w^dagger."""
        out = np.empty_like(mat, dtype=complex)
        out[:, self.perm] = mat * self.phase.conj()[None, :]
        return out


def weyl(space: PhaseSpace, a: PhasePoint) -> WeylOperator:
    perm, phase = _combine(space, np.array([a.vector]))
    return WeylOperator(a, perm[0], phase[0])


def weyl_matrix(space: PhaseSpace, a: PhasePoint) -> np.ndarray:
    return weyl(space, a).matrix


@lru_cache(maxsize=32)
def weyl_table(space: PhaseSpace) -> tuple[np.ndarray, np.ndarray]:
    """Monomial data (perms, phases), each (|V|, d^n), for every point in index order."""
    perms, phases = _combine(space, space.coords)
    perms.setflags(write=False)
    phases.setflags(write=False)
    return perms, phases


def all_weyl_matrices(space: PhaseSpace) -> np.ndarray:
    perms, phases = weyl_table(space)
    N, D = perms.shape
    out = np.zeros((N, D, D), dtype=complex)
    out[np.arange(N)[:, None], perms, np.arange(D)[None, :]] = phases
    return out


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """min over unit c of max|a - c b|, with c fixed by the overlap <b, a>."""
    ov = np.vdot(b, a)
    c = ov / abs(ov) if abs(ov) > 1e-300 else 1.0
    return float(np.max(np.abs(a - c * b)))


def commutation_phase(space: PhaseSpace, a: PhasePoint, b: PhasePoint, check: bool = True) -> complex:
    """chi([a, b]); with ``check`` also verifies w(a)w(b) = chi([a,b]) w(b)w(a)."""
    t = space.tables
    val = complex(t.chi[int(symplectic_form(space, a, b))])
    if check:
        wa, wb = weyl_matrix(space, a), weyl_matrix(space, b)
        res = np.max(np.abs(wa @ wb - val * (wb @ wa)))
        if res > 1e-10:
            raise AssertionError(f"commutation relation violated by {res:.2e} for {a}, {b}")
    return val


# -- factoring single-particle operators of GF(d^n) into n particles of GF(d) ---


def factor_label(eb: ExtensionBasis, p: int | FieldElement, q: int | FieldElement) -> list[tuple[int, int]]:
    """Single-particle labels (p_i, q^i): dual coordinates of p, basis coordinates of q."""
    F = eb.ext
    p = F.from_int(int(p)) if not isinstance(p, FieldElement) else p
    q = F.from_int(int(q)) if not isinstance(q, FieldElement) else q
    ps = eb.dual_coordinates(p)
    qs = eb.coordinates(q)
    return [(int(a), int(b)) for a, b in zip(ps, qs)]


@lru_cache(maxsize=None)
def _factoring_permutation_cached(eb: ExtensionBasis) -> np.ndarray:
    F, d, r = eb.ext, eb.base.order, eb.degree
    perm = np.empty(F.order, dtype=np.int64)
    for x in F.elements():
        idx = 0
        for c in eb.coordinates(x):
            idx = idx * d + int(c)
        perm[int(x)] = idx
    perm.setflags(write=False)
    return perm


def factoring_permutation(eb: ExtensionBasis) -> np.ndarray:
    """perm[x] = tensor index of (x^1, ..., x^n) for x in F = GF(d^n)."""
    return _factoring_permutation_cached(eb)


def to_tensor_frame(eb: ExtensionBasis, mat: np.ndarray) -> np.ndarray:
    """Re-express an operator on C^F in the (C^d)^{tensor n} frame."""
    perm = factoring_permutation(eb)
    out = np.empty_like(mat)
    out[np.ix_(perm, perm)] = mat
    return out


def vector_to_tensor_frame(eb: ExtensionBasis, vec: np.ndarray) -> np.ndarray:
    perm = factoring_permutation(eb)
    out = np.empty_like(vec)
    out[..., perm] = vec
    return out


def factor_weyl(eb: ExtensionBasis, p: int, q: int, tol: float = 1e-10) -> list[tuple[int, int]]:
    """Factor w_{d^n}(p, q) into single-particle labels and check the tensor identity
    up to a global phase (exact for odd characteristic)."""
    labels = factor_label(eb, p, q)
    big = PhaseSpace(eb.ext, 1)
    small = PhaseSpace(eb.base, 1)
    lhs = to_tensor_frame(eb, weyl_matrix(big, big.point([p], [q])))
    rhs = np.ones((1, 1), dtype=complex)
    for pi, qi in labels:
        rhs = np.kron(rhs, weyl_matrix(small, small.point([pi], [qi])))
    res = phase_distance(lhs, rhs)
    if res > tol:
        raise AssertionError(f"factoring identity fails for label ({p}, {q}): residual {res:.2e}")
    return labels


def weyl_monomials_prime_frame(p: int, m: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Monomial data of all operators of W_{p^m, n}, each factor re-expressed over
    GF(p), in the (C^p)^{tensor mn} frame."""
    field = field_create(p, m)
    space = PhaseSpace(field, n)
    perms, phases = weyl_table(space)
    if m == 1:
        return perms, phases
    eb = default_extension_basis(field_create(p, 1), field)
    single = factoring_permutation(eb)
    P = np.zeros(1, dtype=np.int64)
    for _ in range(n):
        P = (P[:, None] * field.order + single[None, :]).ravel()
    # W' = P W P^T: W'|P x> = phase[x] |P perm[x]>
    new_perms = np.empty_like(perms)
    new_phases = np.empty_like(phases)
    new_perms[:, P] = P[perms]
    new_phases[:, P] = phases
    return new_perms, new_phases


def monomial_keys(perms: np.ndarray, phases: np.ndarray, decimals: int = 8) -> set[bytes]:
    """Keys of monomial matrices modulo global phase."""
    rel = phases / phases[:, :1]
    rel = np.round(rel, decimals) + (0.0 + 0.0j)
    return {a.tobytes() + b.tobytes() for a, b in zip(perms, rel)}


def canonical_key(mat: np.ndarray, decimals: int = 8) -> bytes:
    """Hashable key of a matrix modulo global phase (first nonzero entry made real positive)."""
    flat = mat.ravel()
    nz = np.flatnonzero(np.abs(flat) > 1e-9)
    if nz.size:
        c = flat[nz[0]]
        flat = flat * (abs(c) / c)
    rounded = np.round(flat, decimals) + (0.0 + 0.0j)
    return rounded.tobytes()
