"""Exact arithmetic in the residue field GF(q), q = p^c.

Elements are digit vectors over the polynomial basis {1, z, ..., z^(c-1)}
with z a root of a monic irreducible modulus polynomial over GF(p).
Every element also has an integer code d = a0 + a1*p + ... + a_{c-1}*p^(c-1)
in [0, q); ``gf_from_digit`` / ``gf_to_digit`` convert between the two.

Multiplication reduces the product polynomial naively mod the modulus and
mod p; at the scales this package targets (q <= a few thousand) this is
fast and easy to audit.  ``field_tables`` materializes the full q-by-q
operation tables once per parameter set for the numeric kernels.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError, RangeError

# Monic irreducible moduli, (p, c) -> coefficient tuple (a0, ..., ac) with ac = 1.
# Users may override via FieldParams(modulus=...).
DEFAULT_MODULI = {
    (2, 2): (1, 1, 1),        # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),     # x^3 + x + 1
    (2, 4): (1, 1, 0, 0, 1),  # x^4 + x + 1
    (3, 2): (1, 0, 1),        # x^2 + 1
    (3, 3): (1, 2, 0, 1),     # x^3 + 2x + 1
    (5, 2): (2, 0, 1),        # x^2 + 2
    (5, 3): (1, 1, 0, 1),     # x^3 + x + 1
}


def is_prime(n: int) -> bool:
    """Trial-division primality test (desk-scale n)."""
    if n < 2:
        return False
    if n in (2, 3):
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def _poly_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_rem(a, b, p):
    """Remainder of polynomial a modulo monic-leading b, coefficients mod p."""
    a = [x % p for x in a]
    a = _poly_trim(a)
    b = _poly_trim([x % p for x in b])
    db = len(b) - 1
    lead_inv = pow(b[-1], p - 2, p) if b[-1] != 1 else 1
    while len(a) - 1 >= db and a:
        shift = len(a) - 1 - db
        factor = (a[-1] * lead_inv) % p
        for i, bc in enumerate(b):
            a[i + shift] = (a[i + shift] - factor * bc) % p
        a = _poly_trim(a)
    return a


def _is_irreducible(modulus, p, c) -> bool:
    """No roots for degree 2-3; no monic factor of degree <= c//2 for c >= 4."""
    if c == 1:
        return True
    if c in (2, 3):
        return all(
            sum(coef * pow(x, i, p) for i, coef in enumerate(modulus)) % p != 0
            for x in range(p)
        )
    for deg in range(1, c // 2 + 1):
        for code in range(p ** deg):
            cand = [(code // p ** i) % p for i in range(deg)] + [1]
            if not _poly_rem(modulus, cand, p):
                return False
    return True


@dataclass(frozen=True)
class FieldParams:
    """Residue-field parameters: prime p, extension degree c, modulus polynomial.

    The modulus is a tuple of c+1 coefficients in [0, p), monic, irreducible
    over GF(p); it is ignored for c = 1 and may be omitted whenever the
    built-in table covers (p, c).
    """

    p: int
    c: int = 1
    modulus: tuple = ()

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise ParameterError(f"p must be prime, got {self.p!r}")
        if not isinstance(self.c, int) or self.c < 1:
            raise ParameterError(f"c must be a positive integer, got {self.c!r}")
        modulus = tuple(self.modulus)
        if self.c == 1:
            modulus = (0, 1)
        elif not modulus:
            try:
                modulus = DEFAULT_MODULI[(self.p, self.c)]
            except KeyError:
                raise ParameterError(
                    f"no built-in modulus for (p={self.p}, c={self.c}); pass one explicitly"
                ) from None
        if len(modulus) != self.c + 1:
            raise ParameterError(f"modulus must have degree c={self.c}")
        if modulus[-1] != 1:
            raise ParameterError("modulus must be monic")
        if any(not (0 <= a < self.p) for a in modulus):
            raise ParameterError("modulus coefficients must lie in [0, p)")
        if not _is_irreducible(modulus, self.p, self.c):
            raise ParameterError(f"modulus {modulus} is reducible over GF({self.p})")
        object.__setattr__(self, "modulus", modulus)

    @property
    def q(self) -> int:
        return self.p ** self.c

    def to_json(self) -> dict:
        return {"p": self.p, "c": self.c, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, obj: dict) -> "FieldParams":
        try:
            return cls(p=int(obj["p"]), c=int(obj["c"]), modulus=tuple(obj.get("modulus", ())))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"bad field parameters: {exc}") from exc


@dataclass(frozen=True)
class GFElem:
    """An element of GF(q) as its coordinate vector in the polynomial basis."""

    params: FieldParams
    coords: tuple

    def __post_init__(self):
        coords = tuple(int(a) for a in self.coords)
        if len(coords) != self.params.c:
            raise ParameterError(f"expected {self.params.c} coordinates, got {len(coords)}")
        if any(not (0 <= a < self.params.p) for a in coords):
            raise ParameterError("coordinates must lie in [0, p)")
        object.__setattr__(self, "coords", coords)

    def __add__(self, other):
        return gf_add(self, other)

    def __mul__(self, other):
        return gf_mul(self, other)

    def is_zero(self) -> bool:
        return all(a == 0 for a in self.coords)


def _check_shared(a: GFElem, b: GFElem):
    if a.params != b.params:
        raise ParameterError("operands belong to different fields")


def gf_zero(params: FieldParams) -> GFElem:
    return GFElem(params, (0,) * params.c)


def gf_one(params: FieldParams) -> GFElem:
    return GFElem(params, (1,) + (0,) * (params.c - 1))


def gf_add(a: GFElem, b: GFElem) -> GFElem:
    """Component-wise sum mod p."""
    _check_shared(a, b)
    p = a.params.p
    return GFElem(a.params, tuple((x + y) % p for x, y in zip(a.coords, b.coords)))


def gf_neg(a: GFElem) -> GFElem:
    p = a.params.p
    return GFElem(a.params, tuple((-x) % p for x in a.coords))


def gf_mul(a: GFElem, b: GFElem) -> GFElem:
    """Product of representing polynomials, reduced mod the modulus and mod p."""
    _check_shared(a, b)
    p, c = a.params.p, a.params.c
    prod = [0] * (2 * c - 1)
    for i, x in enumerate(a.coords):
        if x == 0:
            continue
        for j, y in enumerate(b.coords):
            prod[i + j] = (prod[i + j] + x * y) % p
    rem = _poly_rem(prod, a.params.modulus, p)
    rem += [0] * (c - len(rem))
    return GFElem(a.params, tuple(rem))


def gf_inv(a: GFElem) -> GFElem:
    """Multiplicative inverse by exhaustive search (q is desk-scale)."""
    if a.is_zero():
        raise ParameterError("zero has no multiplicative inverse")
    one = gf_one(a.params)
    for code in range(1, a.params.q):
        b = gf_from_digit(a.params, code)
        if gf_mul(a, b) == one:
            return b
    raise ParameterError("no inverse found; field parameters are inconsistent")


def gf_proj0(a: GFElem) -> int:
    """Coordinate along the basis element 1 (the only one the character sees)."""
    return a.coords[0]


def gf_from_digit(params: FieldParams, d: int) -> GFElem:
    """p-ary digit vector of d, for d in [0, q)."""
    if not (0 <= d < params.q):
        raise RangeError(f"digit {d} out of range [0, {params.q})")
    p = params.p
    return GFElem(params, tuple((d // p ** i) % p for i in range(params.c)))


def gf_to_digit(a: GFElem) -> int:
    p = a.params.p
    return sum(x * p ** i for i, x in enumerate(a.coords))


@functools.lru_cache(maxsize=None)
def field_tables(params: FieldParams):
    """Dense operation tables on integer codes, for the numeric kernels.

    Returns an object with int64 arrays ``add``/``sub``/``mul`` of shape (q, q),
    ``neg``/``inv``/``proj0`` of shape (q,).  ``inv[0]`` is 0 by convention.
    """
    q = params.q
    elems = [gf_from_digit(params, d) for d in range(q)]
    add = np.zeros((q, q), dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    for i in range(q):
        for j in range(q):
            add[i, j] = gf_to_digit(gf_add(elems[i], elems[j]))
            mul[i, j] = gf_to_digit(gf_mul(elems[i], elems[j]))
    neg = np.array([gf_to_digit(gf_neg(e)) for e in elems], dtype=np.int64)
    sub = add[:, neg]
    inv = np.zeros(q, dtype=np.int64)
    for d in range(1, q):
        inv[d] = gf_to_digit(gf_inv(elems[d]))
    proj0 = np.array([gf_proj0(e) for e in elems], dtype=np.int64)
    return _Tables(add=add, sub=sub, mul=mul, neg=neg, inv=inv, proj0=proj0)


@dataclass(frozen=True)
class _Tables:
    add: np.ndarray
    sub: np.ndarray
    mul: np.ndarray
    neg: np.ndarray
    inv: np.ndarray
    proj0: np.ndarray
