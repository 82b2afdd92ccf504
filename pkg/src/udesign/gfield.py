"""Finite fields GF(p^m), extension towers, relative traces and dual bases.

Elements are dense coefficient vectors over GF(p) in the polynomial basis
``1, x, ..., x^(m-1)`` modulo a fixed irreducible polynomial.  Every element
also has an integer index ``sum(c_i * p**i)``; the index is what phase-space
labels, symplectic matrices and design files store.
"""

from __future__ import annotations

import cmath
import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

import numpy as np

FIELD_SIZE_CAP = 2**20


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Return ``(p, m)`` with ``q == p**m``; raise ValueError otherwise."""
    if q < 2:
        raise ValueError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            break
    m = 0
    r = q
    while r % p == 0:
        r //= p
        m += 1
    if r != 1 or not is_prime(p):
        raise ValueError(f"{q} is not a prime power")
    return p, m


# -- polynomials over GF(p), coefficient lists low degree first ---------------


def _trim(c: list[int]) -> list[int]:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _poly_mod(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    a = [x % p for x in a]
    b = _trim([x % p for x in b])
    db = len(b) - 1
    inv_lead = pow(b[-1], p - 2, p)
    while len(_trim(a)) - 1 >= db and any(a):
        shift = len(a) - 1 - db
        coef = (a[-1] * inv_lead) % p
        for i, bi in enumerate(b):
            a[shift + i] = (a[shift + i] - coef * bi) % p
        _trim(a)
    return a


def is_irreducible(poly: Sequence[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree <= deg/2."""
    deg = len(_trim(list(poly))) - 1
    if deg < 1:
        return False
    if deg == 1:
        return True
    for k in range(1, deg // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            divisor = list(low) + [1]
            if not any(_poly_mod(poly, divisor, p)):
                return False
    return True


def _smallest_irreducible(p: int, m: int) -> tuple[int, ...]:
    # candidates ordered by the integer sum(c_i p^i) of the lower coefficients
    for code in range(p**m):
        low = [(code // p**i) % p for i in range(m)]
        poly = low + [1]
        if is_irreducible(poly, p):
            return tuple(poly)
    raise RuntimeError(f"no irreducible polynomial of degree {m} over GF({p})")


@dataclass(frozen=True)
class FieldSpec:
    """GF(p^m) with a fixed monic irreducible ``modulus`` (c_0, ..., c_m)."""

    p: int
    m: int
    modulus: tuple[int, ...]

    @property
    def order(self) -> int:
        return self.p**self.m

    @property
    def is_prime_field(self) -> bool:
        return self.m == 1

    def __repr__(self) -> str:
        return f"GF({self.p}^{self.m})" if self.m > 1 else f"GF({self.p})"

    def element(self, coeffs: Sequence[int] | int) -> "FieldElement":
        if isinstance(coeffs, (int, np.integer)):
            return self.from_int(int(coeffs))
        c = [int(x) % self.p for x in coeffs]
        if len(c) > self.m:
            c = _poly_mod(c, self.modulus, self.p)
        c = c + [0] * (self.m - len(c))
        return FieldElement(self, tuple(c))

    def from_int(self, index: int) -> "FieldElement":
        if not 0 <= index < self.order:
            raise ValueError(f"index {index} out of range for {self!r}")
        return FieldElement(self, tuple((index // self.p**i) % self.p for i in range(self.m)))

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(self, (0,) * self.m)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(self, (1,) + (0,) * (self.m - 1))

    @property
    def generator(self) -> "FieldElement":
        """The class of ``x`` (the unit for prime fields)."""
        if self.m == 1:
            return self.one
        return self.element([0, 1])

    def elements(self) -> Iterator["FieldElement"]:
        for i in range(self.order):
            yield self.from_int(i)

    def to_json(self) -> dict:
        return {"p": self.p, "m": self.m, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> "FieldSpec":
        spec = cls(int(data["p"]), int(data["m"]), tuple(int(c) for c in data["modulus"]))
        if not is_prime(spec.p) or len(spec.modulus) != spec.m + 1 or spec.modulus[-1] != 1:
            raise ValueError(f"malformed field spec {data!r}")
        if spec.m > 1 and not is_irreducible(spec.modulus, spec.p):
            raise ValueError(f"modulus {spec.modulus} is reducible over GF({spec.p})")
        return spec

    @cached_property
    def tables(self) -> "FieldTables":
        return FieldTables.build(self)


def field_create(p: int, m: int = 1, cap: int = FIELD_SIZE_CAP) -> FieldSpec:
    """GF(p^m) with the lexicographically smallest monic irreducible modulus."""
    if not isinstance(p, (int, np.integer)) or not is_prime(int(p)):
        raise ValueError(f"characteristic {p} is not prime")
    if m <= 0:
        raise ValueError(f"degree must be positive, got {m}")
    if p**m > cap:
        raise ValueError(f"field order {p}^{m} exceeds the size cap {cap}")
    return _field_cached(int(p), int(m))


@lru_cache(maxsize=None)
def _field_cached(p: int, m: int) -> FieldSpec:
    if m == 1:
        return FieldSpec(p, 1, (0, 1))
    return FieldSpec(p, m, _smallest_irreducible(p, m))


@dataclass(frozen=True)
class FieldElement:
    spec: FieldSpec
    coeffs: tuple[int, ...]

    def _coerce(self, other) -> "FieldElement":
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise ValueError(f"mixing elements of {self.spec!r} and {other.spec!r}")
            return other
        if isinstance(other, (int, np.integer)):
            return self.spec.element([int(other)])
        return NotImplemented

    def __int__(self) -> int:
        return sum(c * self.spec.p**i for i, c in enumerate(self.coeffs))

    __index__ = __int__

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p = self.spec.p
        return FieldElement(self.spec, tuple((a + b) % p for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        p = self.spec.p
        return FieldElement(self.spec, tuple((-a) % p for a in self.coeffs))

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p, m = self.spec.p, self.spec.m
        prod = [0] * (2 * m - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    prod[i + j] += a * b
        return self.spec.element(_poly_mod(prod, self.spec.modulus, p) if m > 1 else prod)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result, base = self.spec.one, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "FieldElement":
        if not any(self.coeffs):
            raise ZeroDivisionError("zero has no inverse")
        return self ** (self.spec.order - 2)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __bool__(self) -> bool:
        return any(self.coeffs)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, np.integer)):
            other = self.spec.element([int(other)])
        return isinstance(other, FieldElement) and self.spec == other.spec and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.spec, self.coeffs))

    def __repr__(self) -> str:
        if self.spec.m == 1:
            return f"{self.coeffs[0]}"
        terms = [f"{c}x^{i}" if i else f"{c}" for i, c in enumerate(self.coeffs) if c]
        return "+".join(terms) or "0"


# -- vectorised tables ---------------------------------------------------------


@dataclass(frozen=True)
class FieldTables:
    """Index-level arithmetic for a field: ``add[i, j]`` is the index of i+j etc."""

    add: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray  # inv[0] = 0 by convention
    trace: np.ndarray  # absolute trace to GF(p), as integers 0..p-1
    chi: np.ndarray  # additive character exp(2 pi i Tr(a) / p)

    @classmethod
    def build(cls, spec: FieldSpec) -> "FieldTables":
        q, p = spec.order, spec.p
        elems = list(spec.elements())
        add = np.empty((q, q), dtype=np.int64)
        mul = np.empty((q, q), dtype=np.int64)
        for i, a in enumerate(elems):
            for j in range(i, q):
                b = elems[j]
                add[i, j] = add[j, i] = int(a + b)
                mul[i, j] = mul[j, i] = int(a * b)
        neg = np.array([int(-a) for a in elems], dtype=np.int64)
        inv = np.zeros(q, dtype=np.int64)
        for i in range(1, q):
            inv[i] = int(np.nonzero(mul[i] == 1)[0][0])
        trace = np.array([absolute_trace(a) for a in elems], dtype=np.int64)
        chi = np.exp(2j * np.pi * trace / p)
        for arr in (add, mul, neg, inv, trace, chi):
            arr.setflags(write=False)
        return cls(add, mul, neg, inv, trace, chi)


def absolute_trace(f: FieldElement) -> int:
    """Tr_{F/GF(p)}(f) as an integer in 0..p-1."""
    spec = f.spec
    acc = f
    s = f
    for _ in range(spec.m - 1):
        acc = acc**spec.p
        s = s + acc
    if any(s.coeffs[1:]):
        raise ArithmeticError("absolute trace left the prime field")
    return s.coeffs[0]


def additive_character(f: FieldElement) -> complex:
    return cmath.exp(2j * math.pi * absolute_trace(f) / f.spec.p)


# -- towers --------------------------------------------------------------------


def check_extension(ext: FieldSpec, base: FieldSpec) -> int:
    """Return the degree r = [ext : base]; raise if ext is not an extension of base."""
    if ext.p != base.p or ext.m % base.m:
        raise ValueError(f"{ext!r} is not an extension of {base!r}")
    return ext.m // base.m


@lru_cache(maxsize=None)
def subfield_embedding(base: FieldSpec, ext: FieldSpec) -> tuple[int, ...]:
    """Index map base -> ext sending the generator of ``base`` to the smallest root
    of its modulus inside ``ext``."""
    check_extension(ext, base)
    if base.m == 1:
        return tuple(range(base.p))
    root = None
    for z in ext.elements():
        acc = ext.zero
        for c in reversed(base.modulus):
            acc = acc * z + c
        if not acc:
            root = z
            break
    if root is None:
        raise ArithmeticError(f"{base!r} modulus has no root in {ext!r}")
    powers = [root**i for i in range(base.m)]
    images = []
    for b in base.elements():
        img = ext.zero
        for c, zi in zip(b.coeffs, powers):
            img = img + zi * c
        images.append(int(img))
    return tuple(images)


def embed(b: FieldElement, ext: FieldSpec) -> FieldElement:
    return ext.from_int(subfield_embedding(b.spec, ext)[int(b)])


def restrict(f: FieldElement, base: FieldSpec) -> FieldElement:
    """Pull an element of the subfield image back to ``base``."""
    images = subfield_embedding(base, f.spec)
    try:
        return base.from_int(images.index(int(f)))
    except ValueError:
        raise ValueError(f"{f!r} does not lie in the subfield {base!r}") from None


def trace_rel(f: FieldElement, base: FieldSpec) -> FieldElement:
    """Tr_{F/B}(f) = sum_{k<r} f^(|B|^k), returned as an element of ``base``."""
    r = check_extension(f.spec, base)
    d = base.order
    acc, s = f, f
    for _ in range(r - 1):
        acc = acc**d
        s = s + acc
    return restrict(s, base)


@dataclass(frozen=True)
class ExtensionBasis:
    base: FieldSpec
    ext: FieldSpec
    basis: tuple[FieldElement, ...]
    dual: tuple[FieldElement, ...] = field(default=())

    @property
    def degree(self) -> int:
        return len(self.basis)

    def coordinates(self, f: FieldElement) -> list[FieldElement]:
        """f^i with f = sum_i f^i b_i, computed as Tr(f b^i)."""
        return [trace_rel(f * bd, self.base) for bd in self.dual]

    def dual_coordinates(self, f: FieldElement) -> list[FieldElement]:
        """f_i with f = sum_i f_i b^i, computed as Tr(f b_i)."""
        return [trace_rel(f * b, self.base) for b in self.basis]

    def combine(self, coords: Sequence[FieldElement], *, dual: bool = False) -> FieldElement:
        vecs = self.dual if dual else self.basis
        acc = self.ext.zero
        for c, v in zip(coords, vecs):
            acc = acc + embed(c, self.ext) * v
        return acc


def _solve_inverse(mat: list[list[FieldElement]], spec: FieldSpec) -> list[list[FieldElement]]:
    n = len(mat)
    aug = [list(row) + [spec.one if i == j else spec.zero for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col]), None)
        if pivot is None:
            raise ValueError("basis is linearly dependent (singular trace Gram matrix)")
        aug[col], aug[pivot] = aug[pivot], aug[col]
        inv = aug[col][col].inverse()
        aug[col] = [x * inv for x in aug[col]]
        for r in range(n):
            if r != col and aug[r][col]:
                factor = aug[r][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return [row[n:] for row in aug]


def dual_basis(base: FieldSpec, ext: FieldSpec, basis: Sequence[FieldElement] | None = None) -> ExtensionBasis:
    """Complete ``basis`` (default: 1, x, ..., x^(r-1)) with its trace-dual basis."""
    r = check_extension(ext, base)
    if basis is None:
        g = ext.generator
        basis = [g**i for i in range(r)]
    basis = tuple(basis)
    if len(basis) != r:
        raise ValueError(f"need {r} basis elements, got {len(basis)}")
    gram = [[trace_rel(bi * bj, base) for bj in basis] for bi in basis]
    inv = _solve_inverse(gram, base)
    dual = []
    for i in range(r):
        acc = ext.zero
        for k in range(r):
            acc = acc + embed(inv[i][k], ext) * basis[k]
        dual.append(acc)
    eb = ExtensionBasis(base, ext, basis, tuple(dual))
    for i in range(r):
        for j in range(r):
            if trace_rel(eb.dual[i] * eb.basis[j], base) != (base.one if i == j else base.zero):
                raise ArithmeticError("dual basis failed the trace pairing check")
    return eb


@lru_cache(maxsize=None)
def default_extension_basis(base: FieldSpec, ext: FieldSpec) -> ExtensionBasis:
    return dual_basis(base, ext)
