"""Stabilizer states, the standard family of mutually unbiased bases in prime-power
dimension, entanglement classes of MUB vectors and the asymptotic 2-designs they
induce."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .designs import UnitaryEnsemble, is_design
from .gfield import default_extension_basis, field_create, prime_power
from .weyl import PhasePoint, PhaseSpace, symplectic_form, vector_to_tensor_frame, weyl

MUB_CAP = 64
ENTANGLEMENT_TOL = 1e-9


@dataclass
class StabilizerSpace:
    """Isotropic subgroup M of V with a character zeta, given on an F_p-basis of M.

    ``generators`` g_j span M over F_p and ``phases`` are zeta(g_j).  Elements of M
    are indexed by coefficient vectors c in F_p^r and represented by the operators
    W(m) = prod_j w(g_j)^{c_j}; for odd p this coincides with w(m).
    """

    space: PhaseSpace
    generators: list[PhasePoint]
    phases: list[complex]

    def __post_init__(self):
        sp = self.space
        for i, a in enumerate(self.generators):
            for b in self.generators[:i]:
                if int(symplectic_form(sp, a, b)) != 0:
                    raise ValueError("stabilizer subgroup is not isotropic")
        p = sp.field.p
        for z in self.phases:
            if abs(z**p - 1) > 1e-12:
                raise ValueError("character values must be p-th roots of unity")

    @property
    def size(self) -> int:
        return self.space.field.p ** len(self.generators)

    def elements(self) -> list[tuple[PhasePoint, complex, np.ndarray]]:
        """(m, zeta(m), W(m)) for every element of M."""
        sp = self.space
        p = sp.field.p
        out = [(sp.zero(), 1.0 + 0j, np.eye(sp.dim, dtype=complex))]
        for g, z in zip(self.generators, self.phases):
            wg = weyl(sp, g).matrix
            new = []
            for m, zm, Wm in out:
                cur_m, cur_z, cur_W = m, zm, Wm
                for _ in range(1, p):
                    cur_m = sp.add(cur_m, g)
                    cur_z = cur_z * z
                    cur_W = cur_W @ wg
                    new.append((cur_m, cur_z, cur_W))
            out.extend(new)
        return out


def line_stabilizer(space: PhaseSpace, direction: PhasePoint, b: int = 0) -> StabilizerSpace:
    """M = {lambda * direction : lambda in F} with zeta_b(lambda) = chi(b lambda)."""
    F = space.field
    t = F.tables
    gens, phases = [], []
    for i in range(F.m):
        lam = F.p**i
        gens.append(space.scale(lam, direction))
        phases.append(complex(t.chi[t.mul[int(b), lam]]))
    return StabilizerSpace(space, gens, phases)


def stabilizer_state(M: StabilizerSpace, check: bool = True) -> np.ndarray:
    """rho_{M,zeta} = sum_m zeta(m) W(m) / |M| (the trace is d/|M|)."""
    sp = M.space
    rho = np.zeros((sp.dim, sp.dim), dtype=complex)
    for m, z, W in M.elements():
        if check and sp.field.p != 2:
            if np.max(np.abs(W - weyl(sp, m).matrix)) > 1e-10:
                raise AssertionError("W(m) differs from w(m) for odd characteristic")
        rho += z * W
    rho /= M.size
    if check and M.size == sp.dim:
        if np.max(np.abs(rho @ rho - rho)) > 1e-10:
            raise AssertionError("stabilizer state is not idempotent (inconsistent character?)")
    return rho


def _gauge(v: np.ndarray) -> np.ndarray:
    k = int(np.flatnonzero(np.abs(v) > 1e-9)[0])
    return v * (abs(v[k]) / v[k])


def projector_vector(rho: np.ndarray) -> np.ndarray:
    """Unit-eigenvalue eigenvector of a rank-one projector, phase-gauged."""
    w, V = np.linalg.eigh((rho + rho.conj().T) / 2)
    return _gauge(V[:, -1])


@dataclass
class MubFamily:
    q: int
    labels: list
    bases: np.ndarray  # (q + 1, q, q): basis, vector b, components

    def vectors(self) -> np.ndarray:
        return self.bases.reshape(-1, self.q)

    def check(self, tol: float = 1e-10) -> None:
        q = self.q
        G = np.abs(np.einsum("aik,bjk->aibj", self.bases.conj(), self.bases)) ** 2
        for a in range(q + 1):
            for b in range(q + 1):
                expect = np.eye(q) if a == b else np.full((q, q), 1 / q)
                if np.max(np.abs(G[a, :, b, :] - expect)) > tol:
                    raise AssertionError(f"bases {self.labels[a]} and {self.labels[b]} fail the MUB overlap test")

    def to_json(self) -> dict:
        return {
            "q": self.q,
            "labels": [str(a) for a in self.labels],
            "bases": [[[[z.real, z.imag] for z in v] for v in B] for B in self.bases],
        }


@lru_cache(maxsize=16)
def mub_family(q: int, cap: int = MUB_CAP) -> MubFamily:
    """q + 1 MUBs of C^q from the lines {lambda (a, 1)} and {lambda (1, 0)} of F_q^2."""
    if q > cap:
        raise ValueError(f"q = {q} exceeds the MUB size cap {cap}")
    p, m = prime_power(q)
    F = field_create(p, m)
    sp = PhaseSpace(F, 1)
    directions = [sp.point([a], [1]) for a in range(q)] + [sp.point([1], [0])]
    labels = list(range(q)) + ["inf"]
    bases = np.empty((q + 1, q, q), dtype=complex)
    for i, direction in enumerate(directions):
        for b in range(q):
            bases[i, b] = projector_vector(stabilizer_state(line_stabilizer(sp, direction, b)))
    fam = MubFamily(q, labels, bases)
    fam.check()
    return fam


def reduced_state(v: np.ndarray, d: int) -> np.ndarray:
    m = np.asarray(v).reshape(d, d)
    return m @ m.conj().T


def purity(v: np.ndarray, d: int) -> float:
    r = reduced_state(v, d)
    return float(np.real(np.vdot(r, r)))


def tensor_frame_bases(family: MubFamily, d: int) -> np.ndarray:
    """Family vectors re-expressed in C^d x C^d via the factoring coordinate map."""
    if family.q != d * d:
        raise ValueError("family dimension must be d^2")
    p, m = prime_power(d)
    eb = default_extension_basis(field_create(p, m), field_create(p, 2 * m))
    return vector_to_tensor_frame(eb, family.bases)


@dataclass
class EntanglementClasses:
    tags: list[str]

    @property
    def counts(self) -> dict:
        return {
            "maximally_entangled": self.tags.count("maximally_entangled"),
            "product": self.tags.count("product"),
        }


def classify_entanglement(family: MubFamily, d: int, tol: float = ENTANGLEMENT_TOL) -> EntanglementClasses:
    bases = tensor_frame_bases(family, d)
    tags = []
    eye = np.eye(d) / d
    for a, B in enumerate(bases):
        me = all(np.linalg.norm(reduced_state(v, d) - eye) <= tol for v in B)
        prod = all(abs(purity(v, d) - 1) <= tol for v in B)
        if me == prod:
            raise AssertionError(f"basis {family.labels[a]} is neither maximally entangled nor product")
        tags.append("maximally_entangled" if me else "product")
    return EntanglementClasses(tags)


def asymptotic_design(d: int) -> UnitaryEnsemble:
    """Unitaries sqrt(d) v.reshape(d, d) from every vector of every maximally entangled basis."""
    fam = mub_family(d * d)
    cls = classify_entanglement(fam, d)
    bases = tensor_frame_bases(fam, d)
    mats = [np.sqrt(d) * v.reshape(d, d) for B, tag in zip(bases, cls.tags) if tag == "maximally_entangled" for v in B]
    mats = np.array(mats)
    defect = np.max(np.abs(np.conj(np.swapaxes(mats, 1, 2)) @ mats - np.eye(d)))
    if defect > 1e-9:
        raise AssertionError(f"non-unitary output from a maximally entangled vector (defect {defect:.2e})")
    return UnitaryEnsemble(mats, name=f"mub-asymptotic-d{d}", provenance="maximally entangled MUB vectors")


def asymptotic_potential(d: int) -> float:
    """Closed-form frame potential of asymptotic_design(d)."""
    return (2 * d**4 - d**3 - d**2) / (d**4 - d**3)


def average_purity_mub(d: int, direct: bool = False) -> Fraction | float:
    """Mean purity of the reduced state over all MUB vectors of C^d x C^d.

    By counting: d^2 - d bases of purity 1/d and d + 1 product bases.  With
    ``direct`` the average is taken numerically over every vector.
    """
    if not direct:
        return (Fraction(d * d - d, d) + (d + 1)) / (d * d + 1)
    bases = tensor_frame_bases(mub_family(d * d), d)
    vals = [purity(v, d) for B in bases for v in B]
    return float(np.mean(vals))


def page_average(D, psi: np.ndarray, d: int, tol: float = 1e-9, verify: bool = True) -> float:
    """(1/K) sum_k purity of tr_2(U_k |psi><psi| U_k^dag) over a verified 2-design D on C^d x C^d."""
    if verify:
        rep = is_design(D, 2, tol)
        if not rep.verdict:
            raise ValueError(f"ensemble is not a verified 2-design (gap {rep.gap:.3e})")
    psi = np.asarray(psi, dtype=complex)
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ValueError("psi must be normalized")
    total, K = 0.0, 0
    for U in D:
        total += purity(U @ psi, d)
        K += 1
    return total / K


def design_in_tensor_frame(design, d: int) -> np.ndarray:
    """Matrices of a design on C^{GF(d^2)} relabelled into C^d x C^d."""
    p, m = prime_power(d)
    eb = default_extension_basis(field_create(p, m), field_create(p, 2 * m))
    from .weyl import to_tensor_frame

    return np.array([to_tensor_frame(eb, U) for U in design])
