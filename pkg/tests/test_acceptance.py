"""Acceptance criteria 1-13, each at its stated tolerance.

Every criterion records one PASS/FAIL line; the lines are printed as they run and
again in the pytest terminal summary.
"""

import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np
import pytest

from conftest import random_state, random_unitary
from udesign.catalog import builtin_5design, builtin_qubit12, catalog_groups, sl25_group, unitarize_representation
from udesign.designs import (
    UnitaryEnsemble,
    cardinality_constraints,
    choi_gap,
    choi_uu,
    clifford_bound,
    dpro_distance,
    frame_potential,
    frame_potential_group,
    is_design,
    lower_bound,
    smallest_admissible,
    target_potential,
)
from udesign.gfield import default_extension_basis, field_create
from udesign.linopt import conjugation_residual, embed_unitary, energy_fluctuation, is_symplectic_orthogonal
from udesign.mub import (
    asymptotic_design,
    asymptotic_potential,
    average_purity_mub,
    classify_entanglement,
    design_in_tensor_frame,
    mub_family,
    page_average,
)
from udesign.optimize import OptimizerConfig, minimize_potential, potential_gradient, random_unitaries
from udesign.symplectic import JacobiDesign, full_symplectic_group, is_transitive_on_nonzero, jacobi_design, symplectic_order, transitive_group
from udesign.weyl import PhaseSpace, factor_weyl

RESULTS: list[str] = []


@contextmanager
def criterion(number: int, title: str):
    try:
        yield
    except BaseException:
        line = f"criterion {number:2d} FAIL  {title}"
        RESULTS.append(line)
        print(line)
        raise
    line = f"criterion {number:2d} PASS  {title}"
    RESULTS.append(line)
    print(line)


def test_01_qubit_design():
    with criterion(1, "qubit 12-element design: P2 = 2, choi gap 0, not a 3-design"):
        D = builtin_qubit12().ensemble
        assert D.K == 12
        assert abs(frame_potential(D, 2) - 2) <= 1e-10
        assert abs(choi_gap(D)) <= 1e-9
        assert frame_potential(D, 3) > 5


def test_02_two_qutrit_clifford_pipeline():
    with criterion(2, "two-qutrit symplectic subgroup: order 160, transitive, K = 12960, P2 = 2"):
        start = time.perf_counter()
        G = transitive_group()
        assert G.order == 160
        space = PhaseSpace(field_create(3), 2)
        ok, sizes = is_transitive_on_nonzero(G, space)
        assert ok and sizes == [80]
        J = JacobiDesign(space, G)
        assert len(J) == 12_960
        assert abs(frame_potential_group(J, 2) - 2) <= 1e-8
        assert time.perf_counter() - start <= 60


def test_03_qutrit_full_jacobi():
    with criterion(3, "qutrit full Jacobi design: |Sp| = 24, K = 216, P2 = 2"):
        assert symplectic_order(3, 1) == 24
        assert len(full_symplectic_group(field_create(3), 1)) == 24
        J = jacobi_design(3, 1)
        assert len(J) == 216
        assert abs(frame_potential(J, 2) - 2) <= 1e-10
        assert abs(frame_potential(UnitaryEnsemble(J.matrices()), 2) - 2) <= 1e-10


def test_04_binary_icosahedral_five_design():
    with criterion(4, "SL(2,5) representation: order 120, P1..P5 = 1,2,5,14,42, P6 = 133"):
        G = sl25_group()
        assert G.order == 120
        U = unitarize_representation(G)
        for t, expect in zip(range(1, 6), (1, 2, 5, 14, 42)):
            assert target_potential(t, 2) == expect
            assert abs(frame_potential(U, t) - expect) <= 1e-8
        assert abs(frame_potential(U, 6) - 133) <= 1e-6
        assert abs(frame_potential(builtin_5design().ensemble, 6) - 133) <= 1e-6


def test_05_mub_suite():
    with criterion(5, "MUBs for q in {2,3,4,5,8,9}; entanglement counts for d = 2, 3"):
        for q in (2, 3, 4, 5, 8, 9):
            v = mub_family(q).vectors()
            G = np.abs(v.conj() @ v.T) ** 2
            dist = np.minimum(np.minimum(G, np.abs(G - 1)), np.abs(G - 1 / q))
            assert dist.max() <= 1e-10, q
        for d in (2, 3):
            counts = classify_entanglement(mub_family(d * d), d).counts
            assert counts == {"maximally_entangled": d * d - d, "product": d + 1}


def test_06_asymptotic_designs():
    with criterion(6, "asymptotic designs: closed-form P2 for d = 2..5, decreasing; D_pro decreasing"):
        vals = []
        for d, expect in zip((2, 3, 4, 5), (2.5, 7 / 3, 2.25, 2.2)):
            formula = (2 * d**4 - d**3 - d**2) / (d**4 - d**3)
            assert abs(formula - expect) <= 1e-12 and abs(asymptotic_potential(d) - formula) <= 1e-12
            P = frame_potential(asymptotic_design(d), 2)
            assert abs(P - formula) <= 1e-9
            vals.append(P)
        assert all(a > b > 2 for a, b in zip(vals, vals[1:]))
        assert dpro_distance(asymptotic_design(3)) < dpro_distance(asymptotic_design(2))


def test_07_choi_gap_identity():
    with criterion(7, "Choi gap identity on 30 random ensembles; |C_UU|^2 = 2"):
        rng = np.random.default_rng(7)
        for _ in range(30):
            d = int(rng.integers(2, 4))
            K = int(rng.integers(1, 9))
            D = UnitaryEnsemble(np.array([random_unitary(d, rng) for _ in range(K)]))
            assert abs(choi_gap(D) - (frame_potential(D, 2) - 2)) <= 1e-9
        for d in (2, 3, 4):
            assert abs(np.sum(np.abs(choi_uu(d).matrix) ** 2) - 2) <= 1e-10


def test_08_average_entanglement():
    with criterion(8, "average purity 2d/(d^2+1) by counting and direct; design average 0.8"):
        for d in (2, 3):
            assert average_purity_mub(d) == Fraction(2 * d, d * d + 1)
            assert abs(average_purity_mub(d, direct=True) - 2 * d / (d * d + 1)) <= 1e-10
        D = design_in_tensor_frame(jacobi_design(4, 1).matrices(), 2)
        assert is_design(D, 2, 1e-9).verdict
        rng = np.random.default_rng(8)
        vals = [page_average(D, random_state(4, rng), 2) for _ in range(5)]
        assert max(abs(v - 0.8) for v in vals) <= 1e-9
        assert max(vals) - min(vals) <= 1e-9


def _fd_gradient(U, t, h=1e-6):
    out = np.zeros_like(U)
    for idx in np.ndindex(U.shape):
        E = np.zeros(U.shape, dtype=complex)
        E[idx] = h
        dre = (frame_potential(U + E, t) - frame_potential(U - E, t)) / (2 * h)
        dim = (frame_potential(U + 1j * E, t) - frame_potential(U - 1j * E, t)) / (2 * h)
        out[idx] = (dre + 1j * dim) / 2
    return out


def test_09_optimizer():
    with criterion(9, "optimizer: d=2 K=12 reaches P2 <= 2 + 1e-4 and verifies; gradient vs finite differences"):
        tr = minimize_potential(OptimizerConfig(d=2, K=12, t=2, restarts=20, seed=0))
        assert len(tr.runs) <= 20
        assert tr.best.final <= 2 + 1e-4
        assert is_design(tr.ensemble(), 2, tol=1e-3).verdict
        rng = np.random.default_rng(9)
        for _ in range(10):
            U = random_unitaries(2, 3, rng)
            G, F = potential_gradient(U, 2), _fd_gradient(U, 2)
            assert np.max(np.abs(G - F)) <= 1e-5 * np.max(np.abs(F))


def test_10_bounds():
    with criterion(10, "bounds: lower 10, divisibility minimum 12, Clifford bounds 12 and 6480"):
        assert lower_bound(2) == 10
        assert not any(cardinality_constraints(2, K) for K in (10, 11))
        assert smallest_admissible(2) == 12
        assert clifford_bound(2) == 12 and clifford_bound(9) == 6480
        assert len(JacobiDesign(PhaseSpace(field_create(3), 2), transitive_group())) == 2 * clifford_bound(9)


def test_11_group_potential_integrality():
    with criterion(11, "group potentials integral for every catalog group, t = 1..4"):
        groups = catalog_groups()
        assert groups
        for name, G in groups.items():
            for t in range(1, 5):
                P = frame_potential_group(G, t)
                assert abs(P - round(P)) <= 1e-8, (name, t, P)


def test_12_factoring():
    with criterion(12, "factoring: 81 labels of GF(9)/GF(3), 16 labels of GF(4)/GF(2)"):
        for p in (3, 2):
            eb = default_extension_basis(field_create(p), field_create(p, 2))
            n = 0
            for a in range(p * p):
                for b in range(p * p):
                    factor_weyl(eb, a, b, tol=1e-10)
                    n += 1
            assert n == p**4


def test_13_linear_optics():
    with criterion(13, "linear optics: SpO membership and conjugation; energy fluctuation design-independent"):
        rng = np.random.default_rng(13)
        for _ in range(50):
            U = random_unitary(int(rng.integers(1, 5)), rng)
            assert is_symplectic_orthogonal(embed_unitary(U), tol=1e-10)
            assert conjugation_residual(U) <= 1e-10
        A = builtin_qubit12().ensemble
        B = UnitaryEnsemble(jacobi_design(2, 1).matrices())
        for _ in range(5):
            X = rng.standard_normal((4, 4))
            gamma = X @ X.T
            assert abs(energy_fluctuation(A, gamma) - energy_fluctuation(B, gamma)) <= 1e-9


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-s"]))
