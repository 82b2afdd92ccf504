import cmath
import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from udesign.gfield import (
    FieldSpec,
    absolute_trace,
    additive_character,
    default_extension_basis,
    dual_basis,
    embed,
    field_create,
    is_irreducible,
    trace_rel,
)

SMALL_FIELDS = [(2, 1), (3, 1), (5, 1), (2, 2), (2, 3), (3, 2), (2, 4), (5, 2), (7, 1)]


def brute_irreducible(poly, p):
    """Monic poly of degree m is irreducible iff it has no monic factor of degree 1..m//2."""
    m = len(poly) - 1
    for k in range(1, m // 2 + 1):
        for lower in itertools.product(range(p), repeat=k):
            f = list(lower) + [1]
            # polynomial long division remainder
            r = list(poly)
            for shift in range(len(r) - len(f), -1, -1):
                c = r[shift + len(f) - 1] % p
                if c:
                    for i, fi in enumerate(f):
                        r[shift + i] = (r[shift + i] - c * fi) % p
            if not any(x % p for x in r):
                return False
    return True


def test_prime_field():
    F = field_create(2, 1)
    assert F.order == 2 and F.is_prime_field


def test_gf9_inverses():
    F = field_create(3, 2)
    nonzero = [f for f in F.elements() if f]
    assert len(nonzero) == 8
    for f in nonzero:
        assert f * f.inverse() == F.one


def test_gf4_modulus_unique_irreducible():
    F = field_create(2, 2)
    assert F.modulus == (1, 1, 1)
    quads = [(a, b, 1) for a in range(2) for b in range(2)]
    irreducible = [q for q in quads if brute_irreducible(q, 2)]
    assert irreducible == [(1, 1, 1)]


@pytest.mark.parametrize("p,m", [(2, 3), (3, 2), (3, 3), (5, 2), (2, 4)])
def test_modulus_is_smallest_irreducible(p, m):
    F = field_create(p, m)
    assert brute_irreducible(F.modulus, p)
    code = lambda poly: sum(c * p**i for i, c in enumerate(poly[:-1]))
    for lower in range(code(F.modulus)):
        cand = tuple((lower // p**i) % p for i in range(m)) + (1,)
        assert not brute_irreducible(cand, p)
    assert is_irreducible(F.modulus, p)


def test_create_errors():
    with pytest.raises(ValueError):
        field_create(4, 1)
    with pytest.raises(ValueError):
        field_create(3, 0)
    with pytest.raises(ValueError):
        field_create(2, 21)


@pytest.mark.parametrize("p,m", SMALL_FIELDS)
def test_field_axioms_exhaustive(p, m):
    F = field_create(p, m)
    t = F.tables
    q = F.order
    idx = np.arange(q)
    assert np.array_equal(t.add, t.add.T) and np.array_equal(t.mul, t.mul.T)
    a, b, c = np.meshgrid(idx, idx, idx, indexing="ij")
    assert np.array_equal(t.add[t.add[a, b], c], t.add[a, t.add[b, c]])
    assert np.array_equal(t.mul[t.mul[a, b], c], t.mul[a, t.mul[b, c]])
    assert np.array_equal(t.mul[a, t.add[b, c]], t.add[t.mul[a, b], t.mul[a, c]])
    assert np.all(t.add[idx, t.neg[idx]] == 0)
    assert np.all(t.mul[idx[1:], t.inv[idx[1:]]] == 1)


def test_tables_agree_with_elements():
    F = field_create(3, 2)
    t = F.tables
    for f in F.elements():
        for g in F.elements():
            assert int(f + g) == t.add[int(f), int(g)]
            assert int(f * g) == t.mul[int(f), int(g)]


def test_trace_examples():
    F9, F3 = field_create(3, 2), field_create(3)
    assert trace_rel(F9.zero, F3) == F3.zero
    assert trace_rel(F9.one, F3) == F3.element(2)
    for f in F3.elements():
        assert trace_rel(f, F3) == f


def test_trace_not_extension():
    with pytest.raises(ValueError):
        trace_rel(field_create(3, 2).one, field_create(2))
    with pytest.raises(ValueError):
        trace_rel(field_create(2, 3).one, field_create(2, 2))


@pytest.mark.parametrize("p,mb,r", [(2, 1, 2), (2, 2, 2), (3, 1, 2), (2, 1, 4), (3, 1, 3), (2, 2, 3)])
def test_trace_linear_and_transitive(p, mb, r, rng):
    B = field_create(p, mb)
    F = field_create(p, mb * r)
    P = field_create(p)
    for _ in range(100):
        f = F.from_int(int(rng.integers(F.order)))
        g = F.from_int(int(rng.integers(F.order)))
        lam = B.from_int(int(rng.integers(B.order)))
        assert trace_rel(f + g, B) == trace_rel(f, B) + trace_rel(g, B)
        assert trace_rel(embed(lam, F) * f, B) == lam * trace_rel(f, B)
        assert trace_rel(trace_rel(f, B), P) == trace_rel(f, P)
        assert int(trace_rel(f, P)) == absolute_trace(f)


def test_dual_basis_gf9():
    F9, F3 = field_create(3, 2), field_create(3)
    eb = dual_basis(F3, F9)
    x = F9.generator
    assert eb.basis == (F9.one, x)
    gram = [[trace_rel(u * v, F3) for v in eb.basis] for u in eb.dual]
    assert gram == [[F3.one, F3.zero], [F3.zero, F3.one]]
    # solve Tr(b^i b_j) = delta_ij by hand: Tr(1) = 2, Tr(x) = 0, Tr(x^2) = 1 for x^2 = -1
    assert eb.dual == (F9.element([2]), F9.element([0, 1]))


def test_dual_basis_dependent():
    F9, F3 = field_create(3, 2), field_create(3)
    with pytest.raises(ValueError):
        dual_basis(F3, F9, [F9.one, F9.element(2)])


@pytest.mark.parametrize("p,mb,r", [(3, 1, 2), (2, 1, 3), (2, 2, 2), (5, 1, 2), (3, 1, 3)])
def test_expansion_roundtrip(p, mb, r, rng):
    B, F = field_create(p, mb), field_create(p, mb * r)
    eb = default_extension_basis(B, F)
    for _ in range(100):
        f = F.from_int(int(rng.integers(F.order)))
        assert eb.combine(eb.coordinates(f)) == f
        assert eb.combine(eb.dual_coordinates(f), dual=True) == f


def test_custom_basis_dual():
    B, F = field_create(2), field_create(2, 3)
    x = F.generator
    eb = dual_basis(B, F, [x, x**2, x**3])
    for i, u in enumerate(eb.dual):
        for j, v in enumerate(eb.basis):
            assert trace_rel(u * v, B) == (B.one if i == j else B.zero)


def test_character_examples():
    F3 = field_create(3)
    assert additive_character(F3.zero) == 1
    assert abs(additive_character(F3.one) - cmath.exp(2j * cmath.pi / 3)) < 1e-15


@pytest.mark.parametrize("p,m", [(2, 1), (3, 1), (2, 2), (3, 2), (2, 3), (5, 2), (3, 4), (2, 6)])
def test_character_properties(p, m):
    F = field_create(p, m)
    if F.order > 81:
        pytest.skip("pairwise check limited to order <= 81")
    chi = F.tables.chi
    add = F.tables.add
    assert np.max(np.abs(chi[add] - chi[:, None] * chi[None, :])) < 1e-12
    mul = F.tables.mul
    for c in range(1, F.order):
        assert abs(np.sum(chi[mul[c]])) < 1e-10
    assert abs(np.sum(chi)) < 1e-10


def test_spec_json_roundtrip():
    F = field_create(3, 4)
    assert FieldSpec.from_json(F.to_json()) == F
    with pytest.raises(ValueError):
        FieldSpec.from_json({"p": 2, "m": 2, "modulus": [1, 0, 1]})


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 80), st.integers(0, 80), st.integers(0, 80))
def test_gf81_distributive(a, b, c):
    F = field_create(3, 4)
    fa, fb, fc = F.from_int(a), F.from_int(b), F.from_int(c)
    assert fa * (fb + fc) == fa * fb + fa * fc
    if fa:
        assert (fb / fa) * fa == fb
