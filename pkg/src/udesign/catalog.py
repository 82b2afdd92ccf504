"""Built-in designs and the JSON design-file format.

File schema::

    {"name": str, "d": int, "K": int,
     "matrices": [K x d x d entries as [re, im]],
     "provenance": str, "claims": [{"t": int, "verdict": bool}]}

Streamed designs store ``"construction"`` (a Jacobi descriptor) instead of
``"matrices"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .designs import UnitaryEnsemble, is_design, unitarity_defects
from .gfield import field_create
from .symplectic import (
    JacobiDesign,
    MatrixGroupClosure,
    SymplecticMatrix,
    group_closure,
    is_transitive_on_nonzero,
    transitive_group,
)
from .weyl import PhaseSpace, canonical_key

UNITARY_TOL = 1e-10


class DesignFileError(ValueError):
    pass


@dataclass
class DesignRecord:
    name: str
    ensemble: UnitaryEnsemble | JacobiDesign
    provenance: str = ""
    claims: list[dict] = field(default_factory=list)

    @property
    def d(self) -> int:
        e = self.ensemble
        return e.dim if isinstance(e, JacobiDesign) else e.d

    @property
    def K(self) -> int:
        return len(self.ensemble)

    @property
    def streamed(self) -> bool:
        return isinstance(self.ensemble, JacobiDesign)

    def verify(self, tol: float = 1e-9):
        return [is_design(self.ensemble, c["t"], tol) for c in self.claims]


def _claims(ens, orders, tol: float = 1e-8) -> list[dict]:
    return [{"t": t, "verdict": is_design(ens, t, tol).verdict} for t in orders]


# -- qubit 12-design ------------------------------------------------------------

PAULI = [
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
]


def qubit12_matrices() -> np.ndarray:
    """Paulis plus the eight 2pi/3 rotations about the cube diagonals (+-1, +-1, +-1)/sqrt(3)."""
    mats = list(PAULI)
    c, s = np.cos(np.pi / 3), np.sin(np.pi / 3)
    for sx in (1, -1):
        for sy in (1, -1):
            for sz in (1, -1):
                n = np.array([sx, sy, sz]) / np.sqrt(3)
                mats.append(c * PAULI[0] - 1j * s * (n[0] * PAULI[1] + n[1] * PAULI[2] + n[2] * PAULI[3]))
    return np.array(mats)


@lru_cache(maxsize=None)
def builtin_qubit12() -> DesignRecord:
    ens = UnitaryEnsemble(qubit12_matrices(), name="qubit12", provenance="Pauli group plus cube-diagonal rotations", closed_up_to_phase=True)
    return DesignRecord("qubit12", ens, ens.provenance, _claims(ens, (1, 2)))


# -- Clifford design on two qutrits ---------------------------------------------------


@lru_cache(maxsize=None)
def builtin_chau9() -> DesignRecord:
    G = transitive_group()
    if G.order != 160:
        raise RuntimeError(f"transitive subgroup closure has order {G.order}, expected 160")
    space = PhaseSpace(field_create(3), 2)
    ok, sizes = is_transitive_on_nonzero(G, space)
    if not ok:
        raise RuntimeError(f"order-160 subgroup is not transitive (orbits {sizes})")
    design = JacobiDesign(space, G)
    design.name = "chau9"
    prov = "Jacobi design over F_3^4 with a transitive symplectic subgroup of order 160"
    return DesignRecord("chau9", design, prov, _claims(design, (1, 2)))


# -- SL(2, 5) representation giving a 5-design ------------------------------------

# Entries are integer polynomials in omega = exp(2 pi i / 15), {exponent: coefficient}.
SL25_LITERAL = [
    [[{0: -1}, {}], [{}, {0: -1}]],
    [[{11: -1, 14: -1}, {11: -1, 14: -1}], [{10: 1}, {1: -1, 4: -1}]],
    [[{1: -1, 2: -1, 4: -1, 8: -1, 11: -2, 14: 2}, {6: 1, 9: 1}], [{11: 1, 14: 1}, {5: -1}]],
]
# The (1, 1) entry of the third generator is -2(w^11 + w^14); with +2 w^14 as in
# the literal list the matrix has determinant != 1 and generates an infinite group.
SL25 = [
    SL25_LITERAL[0],
    SL25_LITERAL[1],
    [[{1: -1, 2: -1, 4: -1, 8: -1, 11: -2, 14: -2}, {6: 1, 9: 1}], [{11: 1, 14: 1}, {5: -1}]],
]


def omega_matrix(entries) -> np.ndarray:
    w = np.exp(2j * np.pi / 15)
    return np.array([[sum(c * w**e for e, c in poly.items()) for poly in row] for row in entries], dtype=complex)


def sl25_generators(literal: bool = False) -> list[np.ndarray]:
    return [omega_matrix(g) for g in (SL25_LITERAL if literal else SL25)]


def unitarize_representation(G: MatrixGroupClosure | np.ndarray) -> np.ndarray:
    """Conjugate a finite matrix group to a unitary one: Q^{1/2} U Q^{-1/2} with Q = mean U^dag U."""
    mats = np.asarray(getattr(G, "elements", G), dtype=complex)
    Q = np.mean(np.conj(np.swapaxes(mats, 1, 2)) @ mats, axis=0)
    Q = (Q + Q.conj().T) / 2
    w, V = np.linalg.eigh(Q)
    if w.min() <= 1e-12 * max(w.max(), 1.0):
        raise ValueError("averaged Gram operator is singular")
    half = (V * np.sqrt(w)) @ V.conj().T
    ihalf = (V / np.sqrt(w)) @ V.conj().T
    out = half @ mats @ ihalf
    worst = float(np.max(unitarity_defects(out)))
    if worst > UNITARY_TOL:
        raise AssertionError(f"unitarization left a defect of {worst:.2e}")
    return out


def phase_classes(mats: np.ndarray) -> np.ndarray:
    """One representative per class of matrices equal up to a global phase (first occurrence)."""
    seen, out = set(), []
    for m in mats:
        k = canonical_key(m)
        if k not in seen:
            seen.add(k)
            out.append(m)
    return np.array(out)


@lru_cache(maxsize=None)
def sl25_group() -> MatrixGroupClosure:
    G = group_closure(sl25_generators(), cap=10_000)
    if G.order != 120:
        raise RuntimeError(f"SL(2, 5) closure has order {G.order}, expected 120")
    return G


@lru_cache(maxsize=None)
def builtin_5design() -> DesignRecord:
    G = sl25_group()
    reps = phase_classes(unitarize_representation(G))
    prov = (
        "unitarized 2-dimensional representation of SL(2,5), centre quotiented to 60 classes; "
        "order-6 counts read as squared character norms"
    )
    ens = UnitaryEnsemble(reps, name="fivedesign", provenance=prov, closed_up_to_phase=True)
    return DesignRecord("fivedesign", ens, prov, _claims(ens, (1, 2, 3, 4, 5)))


BUILTINS = {
    "qubit12": builtin_qubit12,
    "chau9": builtin_chau9,
    "fivedesign": builtin_5design,
}


def catalog_groups() -> dict[str, MatrixGroupClosure]:
    """Closed complex matrix groups generated by the catalog designs."""
    return {
        "pauli": group_closure(PAULI[1:], cap=1000),
        "qubit12": group_closure(qubit12_matrices(), cap=10_000),
        "fivedesign": sl25_group(),
        "fivedesign-unitary": group_closure(unitarize_representation(sl25_group()), cap=10_000),
    }


# -- files ----------------------------------------------------------------------


def record_to_json(rec: DesignRecord | UnitaryEnsemble) -> dict:
    if isinstance(rec, UnitaryEnsemble):
        rec = DesignRecord(rec.name, rec, rec.provenance, [{"t": t, "verdict": True} for t in sorted(_claimed_orders(rec.claims))])
    out = {"name": rec.name, "d": rec.d, "K": rec.K}
    if rec.streamed:
        out["construction"] = rec.ensemble.descriptor()
    else:
        m = rec.ensemble.matrices
        out["matrices"] = np.stack([m.real, m.imag], axis=-1).tolist()
    out["provenance"] = rec.provenance
    out["claims"] = [{"t": int(c["t"]), "verdict": bool(c["verdict"])} for c in rec.claims]
    if getattr(rec.ensemble, "closed_up_to_phase", False):
        out["closed_up_to_phase"] = True
    return out


def _claimed_orders(claims) -> list[int]:
    if isinstance(claims, dict):
        t = claims.get("t")
        return list(range(1, t + 1)) if t else []
    return [c["t"] for c in claims]


def save_ensemble(rec: DesignRecord | UnitaryEnsemble, path: str | Path) -> None:
    Path(path).write_text(json.dumps(record_to_json(rec)) + "\n")


def record_from_json(data: dict) -> DesignRecord:
    try:
        name, d, K = str(data["name"]), int(data["d"]), int(data["K"])
        claims = [{"t": int(c["t"]), "verdict": bool(c["verdict"])} for c in data.get("claims", [])]
        prov = str(data.get("provenance", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise DesignFileError(f"malformed design record: {exc}") from exc
    if "construction" in data:
        c = data["construction"]
        if c.get("kind") != "jacobi":
            raise DesignFileError(f"unknown construction kind {c.get('kind')!r}")
        F = field_create(int(c["p"]), int(c.get("m", 1)))
        n = int(c["n"])
        gens = [SymplecticMatrix(F, g) for g in c["generators"]]
        G = group_closure(gens, field=F)
        ens = JacobiDesign(PhaseSpace(F, n), G, seed=int(c.get("seed", 0)))
        ens.name = name
        if ens.dim != d or len(ens) != K:
            raise DesignFileError("construction does not match the declared d and K")
        return DesignRecord(name, ens, prov, claims)
    try:
        raw = np.asarray(data["matrices"], dtype=float)
    except (KeyError, ValueError) as exc:
        raise DesignFileError(f"malformed matrices: {exc}") from exc
    if raw.shape != (K, d, d, 2):
        raise DesignFileError(f"matrices have shape {raw.shape}, expected {(K, d, d, 2)}")
    mats = raw[..., 0] + 1j * raw[..., 1]
    defects = unitarity_defects(mats)
    bad = np.flatnonzero(defects > UNITARY_TOL)
    if bad.size:
        raise DesignFileError(f"matrix {int(bad[0])} is not unitary (defect {defects[bad[0]]:.2e})")
    ens = UnitaryEnsemble(mats, name=name, provenance=prov, closed_up_to_phase=bool(data.get("closed_up_to_phase", False)))
    return DesignRecord(name, ens, prov, claims)


def load_ensemble(path: str | Path) -> DesignRecord:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DesignFileError(f"{path}: not valid JSON ({exc})") from exc
    return record_from_json(data)


def resolve_design(name_or_path: str) -> DesignRecord:
    if name_or_path in BUILTINS:
        return BUILTINS[name_or_path]()
    return load_ensemble(name_or_path)
