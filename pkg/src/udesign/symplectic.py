"""Symplectic matrices over F_d, group closures, metaplectic unitaries, Jacobi
(Clifford) designs and the Weyl/Clifford twirls.

Matrices over a field are integer arrays of field indices (see ``gfield``); all
arithmetic goes through the field's add/mul tables.  Phase-space vectors are
ordered (p_1..p_n, q_1..q_n) and J = [[0, I], [-I, 0]].
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from . import _backend
from .gfield import FieldSpec, field_create, is_prime, prime_power
from .weyl import (
    PhasePoint,
    PhaseSpace,
    WeylOperator,
    all_weyl_matrices,
    canonical_key,
    phase_distance,
    weyl,
    weyl_table,
)

CLOSURE_CAP = 10**6


class ClosureCapExceeded(RuntimeError):
    pass


# -- matrix arithmetic over a finite field ------------------------------------


def ff_matmul(a: np.ndarray, b: np.ndarray, field: FieldSpec) -> np.ndarray:
    """Product over F; ``a`` may be a stack (..., r, k)."""
    t = field.tables
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    prods = t.mul[a[..., :, :, None], b[..., None, :, :]]
    acc = prods[..., :, 0, :]
    for k in range(1, a.shape[-1]):
        acc = t.add[acc, prods[..., :, k, :]]
    return acc


def ff_apply(mat: np.ndarray, vecs: np.ndarray, field: FieldSpec) -> np.ndarray:
    """Rows of ``vecs`` mapped by ``mat``: returns (mat @ v) for every row v."""
    return ff_matmul(np.asarray(vecs), np.asarray(mat).T, field)


def ff_transpose(mat: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(np.swapaxes(mat, -1, -2))


def ff_inverse(mat: np.ndarray, field: FieldSpec) -> np.ndarray:
    """Gauss-Jordan inverse over F; raises ValueError if singular."""
    t = field.tables
    r = mat.shape[0]
    aug = np.concatenate([np.array(mat, dtype=np.int64), np.eye(r, dtype=np.int64)], axis=1)
    for col in range(r):
        piv = next((i for i in range(col, r) if aug[i, col] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular over the field")
        aug[[col, piv]] = aug[[piv, col]]
        aug[col] = t.mul[t.inv[aug[col, col]], aug[col]]
        for i in range(r):
            if i != col and aug[i, col] != 0:
                f = t.neg[aug[i, col]]
                aug[i] = t.add[aug[i], t.mul[f, aug[col]]]
    return aug[:, r:]


def ff_is_invertible(mat: np.ndarray, field: FieldSpec) -> bool:
    try:
        ff_inverse(mat, field)
    except ValueError:
        return False
    return True


def ff_from_signed(mat, field: FieldSpec) -> np.ndarray:
    """Integer entries (possibly negative) reduced into the prime subfield."""
    m = np.asarray(mat, dtype=np.int64) % field.p
    return m


def symplectic_form_matrix(n: int, field: FieldSpec) -> np.ndarray:
    """J = [[0, I], [-I, 0]] as field indices."""
    J = np.zeros((2 * n, 2 * n), dtype=np.int64)
    one, mone = 1, int(field.tables.neg[1])
    for i in range(n):
        J[i, n + i] = one
        J[n + i, i] = mone
    return J


@dataclass(frozen=True, eq=False)
class SymplecticMatrix:
    field: FieldSpec
    entries: np.ndarray

    def __post_init__(self):
        e = np.array(self.entries, dtype=np.int64)
        if e.ndim != 2 or e.shape[0] != e.shape[1] or e.shape[0] % 2:
            raise ValueError("symplectic matrices are 2n x 2n")
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    @property
    def n(self) -> int:
        return self.entries.shape[0] // 2

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, SymplecticMatrix)
            and self.field == other.field
            and np.array_equal(self.entries, other.entries)
        )

    def __hash__(self) -> int:
        return hash((self.field, self.entries.tobytes()))

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix(self.field, ff_matmul(self.entries, other.entries, self.field))

    def inverse(self) -> "SymplecticMatrix":
        return SymplecticMatrix(self.field, ff_inverse(self.entries, self.field))

    def is_symplectic(self) -> bool:
        J = symplectic_form_matrix(self.n, self.field)
        lhs = ff_matmul(ff_matmul(self.entries, J, self.field), ff_transpose(self.entries), self.field)
        return bool(np.array_equal(lhs, J))

    def apply(self, space: PhaseSpace, a: PhasePoint) -> PhasePoint:
        return space.from_vector(ff_apply(self.entries, np.array([a.vector]), self.field)[0])

    def to_json(self) -> list[list[int]]:
        return self.entries.tolist()

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "SymplecticMatrix":
        return cls(field, np.eye(2 * n, dtype=np.int64))


# -- group closure ------------------------------------------------------------


@dataclass
class MatrixGroupClosure:
    elements: np.ndarray
    generators: list[np.ndarray]
    closure_cap: int
    field: FieldSpec | None = None
    up_to_phase: bool = False
    _keys: dict = dc_field(default_factory=dict, repr=False)

    @property
    def order(self) -> int:
        return len(self.elements)

    def key(self, mat: np.ndarray) -> bytes:
        return _element_key(np.asarray(mat), self.field, self.up_to_phase)

    def contains(self, mat: np.ndarray) -> bool:
        return self.key(mat) in self._keys

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return self.order

    def symplectic_elements(self) -> list[SymplecticMatrix]:
        if self.field is None:
            raise TypeError("not a group over a finite field")
        return [SymplecticMatrix(self.field, e) for e in self.elements]


def _element_key(mat: np.ndarray, field: FieldSpec | None, up_to_phase: bool) -> bytes:
    if field is not None:
        return np.ascontiguousarray(mat, dtype=np.int64).tobytes()
    if up_to_phase:
        return canonical_key(mat)
    return (np.round(np.asarray(mat, dtype=complex).ravel(), 8) + (0.0 + 0.0j)).tobytes()


def group_closure(
    generators: Sequence[np.ndarray],
    cap: int = CLOSURE_CAP,
    field: FieldSpec | None = None,
    up_to_phase: bool = False,
) -> MatrixGroupClosure:
    """Breadth-first closure of the group generated by ``generators``.

    With ``field`` the generators are matrices of field indices; otherwise complex
    matrices, deduplicated after rounding to 8 decimals (optionally modulo a
    global phase).
    """
    gens = [np.asarray(g.entries if isinstance(g, SymplecticMatrix) else g) for g in generators]
    if not gens:
        raise ValueError("need at least one generator")
    r = gens[0].shape[0]
    if field is not None:
        gens = [g.astype(np.int64) for g in gens]
        for i, g in enumerate(gens):
            if not ff_is_invertible(g, field):
                raise ValueError(f"generator {i} is not invertible")
        identity = np.eye(r, dtype=np.int64)
        mul = lambda stack, g: ff_matmul(stack, g, field)
    else:
        gens = [g.astype(complex) for g in gens]
        for i, g in enumerate(gens):
            if abs(np.linalg.det(g)) < 1e-10:
                raise ValueError(f"generator {i} is not invertible")
        identity = np.eye(r, dtype=complex)
        mul = lambda stack, g: stack @ g

    keys = {_element_key(identity, field, up_to_phase): 0}
    elements = [identity]
    frontier = identity[None]
    while len(frontier):
        new = []
        for g in gens:
            prods = mul(frontier, g)
            for m in prods:
                k = _element_key(m, field, up_to_phase)
                if k not in keys:
                    keys[k] = len(elements)
                    elements.append(m)
                    new.append(m)
                    if len(elements) > cap:
                        raise ClosureCapExceeded(f"group closure exceeded cap of {cap} elements")
        frontier = np.array(new) if new else np.empty((0, r, r), dtype=identity.dtype)
    return MatrixGroupClosure(np.array(elements), gens, cap, field, up_to_phase, keys)


def orbits_on_nonzero(generators: Sequence[np.ndarray], space: PhaseSpace) -> list[int]:
    """Orbit sizes of V minus {0} under the group generated by ``generators``."""
    coords = space.coords
    N = space.size
    images = [space.indices_of(ff_apply(np.asarray(g), coords, space.field)) for g in generators]
    parent = np.arange(N)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for img in images:
        for x in range(1, N):
            a, b = find(x), find(int(img[x]))
            if a != b:
                parent[max(a, b)] = min(a, b)
    roots = np.array([find(x) for x in range(1, N)])
    _, counts = np.unique(roots, return_counts=True)
    return sorted(counts.tolist(), reverse=True)


def is_transitive_on_nonzero(G: MatrixGroupClosure | Sequence[np.ndarray], space: PhaseSpace) -> tuple[bool, list[int]]:
    gens = G.generators if isinstance(G, MatrixGroupClosure) else [np.asarray(getattr(g, "entries", g)) for g in G]
    sizes = orbits_on_nonzero(gens, space)
    return len(sizes) == 1 and sizes[0] == space.size - 1, sizes


def symplectic_order(p: int, n: int) -> int:
    """|Sp(p, n)|: order of the symplectic group of 2n x 2n matrices over GF(p)."""
    if n < 1:
        raise ValueError("n must be positive")
    prime_power(p)
    if n > 1 and not is_prime(p):
        raise ValueError("general-n formula is used for prime p only")
    out = p ** (n * n)
    for i in range(n):
        out *= p ** (2 * (n - i)) - 1
    return out


def _sl2(field: FieldSpec) -> list[np.ndarray]:
    t = field.tables
    q = field.order
    out = []
    for a in range(q):
        for c in range(q):
            if a == 0 and c == 0:
                continue
            if a != 0:
                for b in range(q):
                    e = t.mul[t.inv[a], t.add[1, t.mul[b, c]]]
                    out.append(np.array([[a, b], [c, e]], dtype=np.int64))
            else:
                b = t.neg[t.inv[c]]
                for e in range(q):
                    out.append(np.array([[a, b], [c, e]], dtype=np.int64))
    return out


def symplectic_generators(field: FieldSpec, n: int) -> list[np.ndarray]:
    """A generating set of Sp(2n, F): J, shears [[I, E_ii], [0, I]] scaled by field
    generators, and block-diagonal GL(n) moves [[A, 0], [0, A^-T]]."""
    t = field.tables
    J = symplectic_form_matrix(n, field)
    gens = [J]
    scalars = [1] if field.is_prime_field else [1] + [field.p**i for i in range(1, field.m)]
    eye = np.eye(2 * n, dtype=np.int64)
    for s in scalars:
        for i in range(n):
            g = eye.copy()
            g[i, n + i] = s
            gens.append(g)
    if n > 1:
        A = np.eye(n, dtype=np.int64)
        A[0, 1] = 1
        perm = np.roll(np.eye(n, dtype=np.int64), 1, axis=0)
        for a in (A, perm):
            g = np.zeros((2 * n, 2 * n), dtype=np.int64)
            g[:n, :n] = a
            g[n:, n:] = ff_transpose(ff_inverse(a, field))
            gens.append(g)
    return gens


def full_symplectic_group(field: FieldSpec, n: int, cap: int = CLOSURE_CAP) -> list[SymplecticMatrix]:
    """All elements of Sp(2n, F); SL(2, F) is enumerated directly for n = 1."""
    if n == 1:
        return [SymplecticMatrix(field, m) for m in _sl2(field)]
    G = group_closure(symplectic_generators(field, n), cap=cap, field=field)
    return G.symplectic_elements()


# -- a transitive subgroup of Sp(3, 2) of order 160 ---------------------------------

TRANSITIVE_LITERAL = [
    np.array(m, dtype=np.int64)
    for m in (
        [[2, 2, 2, 0], [1, 2, 2, 0], [1, 2, 0, 2], [0, 0, 1, 1]],
        [[0, 2, 1, 0], [0, 0, 0, 2], [1, 0, 0, 2], [0, 2, 0, 0]],
        [[0, 2, 0, 0], [2, 0, 0, 0], [2, 0, 0, 2], [0, 1, 2, 0]],
        [[0, 1, 1, 0], [1, 0, 0, 2], [0, 0, 0, 1], [0, 0, 1, 0]],
        [[1, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 1]],
        [[2, 0, 0, 0], [0, 2, 0, 0], [0, 0, 2, 0], [0, 0, 0, 2]],
    )
]

# The literal matrices use coordinates (p1, p2, q2, q1); swapping the last two
# brings them to the (p1, p2, q1, q2) order used here.
TRANSITIVE_RELABEL = np.array([0, 1, 3, 2])


def transitive_form_matrix() -> np.ndarray:
    """Symplectic form in the literal (p1, p2, q2, q1) coordinate order, over F_3."""
    J = symplectic_form_matrix(2, field_create(3))
    P = TRANSITIVE_RELABEL
    return J[np.ix_(P, P)]


def transitive_generators() -> list[SymplecticMatrix]:
    F3 = field_create(3)
    P = TRANSITIVE_RELABEL
    return [SymplecticMatrix(F3, m[np.ix_(P, P)]) for m in TRANSITIVE_LITERAL]


def transitive_group() -> MatrixGroupClosure:
    return group_closure(transitive_generators(), field=field_create(3))


# -- metaplectic representation -----------------------------------------------


@dataclass(frozen=True, eq=False)
class MetaplecticUnitary:
    S: SymplecticMatrix
    space: PhaseSpace
    matrix: np.ndarray

    def residual(self, points: Sequence[PhasePoint] | None = None) -> float:
        """max over ``points`` (default: an F_p-basis of V) of the conjugation
        residual |mu w(a) mu^dag - phase w(Sa)|."""
        pts = list(points) if points is not None else _fp_basis(self.space)
        worst = 0.0
        U = self.matrix
        for a in pts:
            lhs = U @ weyl(self.space, a).matrix @ U.conj().T
            rhs = weyl(self.space, self.S.apply(self.space, a)).matrix
            worst = max(worst, phase_distance(lhs, rhs))
        return worst


def _fp_basis(space: PhaseSpace) -> list[PhasePoint]:
    """F_p-basis of V: coordinate vectors scaled by the field's polynomial basis."""
    out = []
    for j in range(2 * space.n):
        for i in range(space.field.m):
            vec = [0] * (2 * space.n)
            vec[j] = space.field.p**i
            out.append(space.from_vector(vec))
    return out


def _random_seed_matrix(dim: int, rng: np.random.Generator) -> np.ndarray:
    return rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))


def metaplectic(S: SymplecticMatrix, space: PhaseSpace | None = None, seed: int = 0, retries: int = 16) -> MetaplecticUnitary:
    """Unitary mu(S) with mu w(a) mu^dag = w(Sa) up to phase.

    The average of w(Sa) X0 w(a)^dag over V is computed as a product of
    commuting projections, one cyclic average per F_p-basis vector of V.
    """
    if space is None:
        space = PhaseSpace(S.field, S.n)
    if space.field != S.field or space.n != S.n:
        raise ValueError("symplectic matrix does not act on this phase space")
    if not S.is_symplectic():
        raise ValueError("matrix is not symplectic")
    p = space.field.p
    basis = _fp_basis(space)
    pairs = [(weyl(space, S.apply(space, g)), weyl(space, g)) for g in basis]
    rng = np.random.default_rng(seed)
    D = space.dim
    for _ in range(retries):
        X = _random_seed_matrix(D, rng)
        for wsg, wg in pairs:
            acc = X.copy()
            term = X
            for _k in range(1, p):
                term = wg.rmul_dagger(wsg.lmul(term))
                acc = acc + term
            X = acc / p
        c = np.trace(X @ X.conj().T).real / D
        if c >= 1e-6:
            return MetaplecticUnitary(S, space, X / np.sqrt(c))
    raise RuntimeError("metaplectic synthesis degenerate after repeated retries")


def metaplectic_full_average(S: SymplecticMatrix, space: PhaseSpace | None = None, seed: int = 0) -> np.ndarray:
    """Reference construction: literal average over all a in V, normalized.

    Only valid in odd characteristic; for p = 2 the summands do not form an
    action of V and the result is generally not an intertwiner.
    """
    if space is None:
        space = PhaseSpace(S.field, S.n)
    rng = np.random.default_rng(seed)
    X0 = _random_seed_matrix(space.dim, rng)
    X = np.zeros_like(X0)
    for a in space.points():
        X += weyl(space, S.apply(space, a)).lmul(weyl(space, a).rmul_dagger(X0))
    X /= space.size
    c = np.trace(X @ X.conj().T).real / space.dim
    return X / np.sqrt(c)


# -- Jacobi designs -----------------------------------------------------------


class JacobiDesign:
    """The ensemble {w(v) mu(S) : v in V, S in G}, kept in factored form."""

    def __init__(
        self,
        space: PhaseSpace,
        group: Sequence[SymplecticMatrix] | MatrixGroupClosure,
        seed: int = 0,
        check: bool = True,
        name: str = "jacobi",
    ):
        self.space = space
        self.name = name
        if isinstance(group, MatrixGroupClosure):
            self.generators = [SymplecticMatrix(space.field, g) for g in group.generators]
            group = group.symplectic_elements()
        else:
            group = list(group)
            self.generators = group
        self.group = group
        self.seed = seed
        if check:
            ok, sizes = is_transitive_on_nonzero([g.entries for g in self.generators], space)
            if not ok:
                warnings.warn(f"symplectic group is not transitive on V minus 0 (orbits {sizes[:8]})", stacklevel=2)

    @property
    def K(self) -> int:
        return self.space.size * len(self.group)

    @property
    def dim(self) -> int:
        return self.space.dim

    @cached_property
    def metaplectic_matrices(self) -> np.ndarray:
        return np.array([metaplectic(S, self.space, seed=self.seed + i).matrix for i, S in enumerate(self.group)])

    def __len__(self) -> int:
        return self.K

    def __iter__(self) -> Iterator[np.ndarray]:
        perms, phases = weyl_table(self.space)
        for mu in self.metaplectic_matrices:
            for v in range(self.space.size):
                out = np.empty_like(mu)
                out[perms[v]] = phases[v][:, None] * mu
                yield out

    def matrices(self) -> np.ndarray:
        return np.array(list(self))

    def traces(self) -> np.ndarray:
        """tr(w(v) mu(S)) for all S (rows) and v (columns), in O(d^n) per entry."""
        perms, phases = weyl_table(self.space)
        return np.array([_backend.monomial_traces(perms, phases, mu) for mu in self.metaplectic_matrices])

    def descriptor(self) -> dict:
        return {
            "kind": "jacobi",
            "p": self.space.field.p,
            "m": self.space.field.m,
            "n": self.space.n,
            "generators": [g.to_json() for g in self.generators],
            "seed": self.seed,
        }


def jacobi_design(p: int, n: int, group: str | Sequence[SymplecticMatrix] | MatrixGroupClosure = "full", seed: int = 0) -> JacobiDesign:
    """Clifford-type design over GF(p) (p may be a prime power) on n particles."""
    pr, m = prime_power(p)
    space = PhaseSpace(field_create(pr, m), n)
    label = group if isinstance(group, str) else "custom"
    if isinstance(group, str):
        if group == "full":
            group = full_symplectic_group(space.field, n)
        elif group == "transitive":
            if (p, n) != (3, 2):
                raise ValueError("the transitive subgroup lives in Sp(3, 2)")
            group = transitive_group()
        else:
            raise ValueError(f"unknown subgroup {group!r}")
    return JacobiDesign(space, group, seed=seed, name=f"jacobi-p{p}-n{n}-{label}")


# -- twirls -------------------------------------------------------------------


def _check_bipartite(rho: np.ndarray, space: PhaseSpace) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    D = space.dim
    if rho.shape != (D * D, D * D):
        raise ValueError(f"expected a {D * D}x{D * D} operator, got {rho.shape}")
    return rho


def weyl_twirl(rho: np.ndarray, space: PhaseSpace) -> np.ndarray:
    """|V|^-1 sum_a (w(a) x w(a)) rho (w(a) x w(a))^dag."""
    rho = _check_bipartite(rho, space)
    out = np.zeros_like(rho)
    for w in all_weyl_matrices(space):
        ww = np.kron(w, w)
        out += ww @ rho @ ww.conj().T
    return out / space.size


def weyl_coefficient(rho: np.ndarray, space: PhaseSpace, b: PhasePoint, b2: PhasePoint) -> complex:
    """rho_{b,b'} = tr((w(b) x w(b'))^dag rho) / D^2."""
    rho = _check_bipartite(rho, space)
    ww = np.kron(weyl(space, b).matrix, weyl(space, b2).matrix)
    return complex(np.vdot(ww, rho)) / space.dim**2


def _pair_sum(space: PhaseSpace) -> np.ndarray:
    """sum over b != 0 of w(b) x w(-b)."""
    mats = all_weyl_matrices(space)
    D = space.dim
    out = np.zeros((D * D, D * D), dtype=complex)
    for idx in range(1, space.size):
        b = space.from_index(idx)
        out += np.kron(mats[idx], mats[space.index(space.neg(b))])
    return out


def clifford_twirl(rho: np.ndarray, space: PhaseSpace, group: Sequence | MatrixGroupClosure | None = None) -> np.ndarray:
    """Twirl over a Clifford design: alpha 1 + beta sum_{b != 0} w(b) x w(-b) with
    alpha = rho_{0,0} and beta the mean of rho_{b,-b} over b != 0."""
    rho = _check_bipartite(rho, space)
    if group is not None:
        ok, sizes = is_transitive_on_nonzero(group, space)
        if not ok:
            raise ValueError(f"symplectic group is not transitive on V minus 0 (orbits {sizes[:8]})")
    D = space.dim
    alpha = np.trace(rho) / D**2
    pair = _pair_sum(space)
    beta = np.vdot(pair, rho) / D**2 / (space.size - 1)
    return alpha * np.eye(D * D) + beta * pair


def twirl_over(rho: np.ndarray, unitaries) -> np.ndarray:
    """Literal (1/K) sum_k (U_k x U_k) rho (U_k x U_k)^dag."""
    out = None
    K = 0
    for U in unitaries:
        UU = np.kron(U, U)
        term = UU @ rho @ UU.conj().T
        out = term if out is None else out + term
        K += 1
    return out / K
