"""p-typical Witt vectors of finite length.

Sum, difference and product are given by universal polynomials with integer
coefficients.  They are computed once per (p, n) by inverting the ghost map
over Q and then evaluated in any commutative ring whose elements support
``+ - *`` with each other and with ints.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from .numerics import TruncatedSeries


def _names(n: int) -> tuple:
    return tuple(f"X{i}" for i in range(n)) + tuple(f"Y{i}" for i in range(n))


def _ghost_poly(vars_, p: int, i: int, names) -> TruncatedSeries:
    total = TruncatedSeries(names, {})
    for j in range(i + 1):
        total = total + (vars_[j] ** (p ** (i - j))) * (p ** j)
    return total


@dataclass(frozen=True)
class WittPolynomials:
    p: int
    n: int
    add: tuple
    sub: tuple
    mul: tuple


def _invert(p: int, n: int, target, names) -> list:
    """Solve w_k(S) = target[k] for S_0, ..., S_{n-1} over Q."""
    S = []
    for k in range(n):
        rest = target[k]
        for j in range(k):
            rest = rest - (S[j] ** (p ** (k - j))) * (p ** j)
        S.append(rest * Fraction(1, p ** k))
    return S


def _integral(polys, p, n, op):
    out = []
    for i, P in enumerate(polys):
        terms = {}
        for e, c in P.terms.items():
            c = Fraction(c)
            if c.denominator != 1:
                raise ArithmeticError(f"Witt {op} polynomial S_{i} for p={p}, n={n} has non-integral coefficient {c}")
            terms[e] = int(c)
        out.append(TruncatedSeries(P.variables, terms))
    return tuple(out)


@lru_cache(maxsize=None)
def universal_polynomials(p: int, n: int) -> WittPolynomials:
    names = _names(n)
    X = [TruncatedSeries.variable(v, names) for v in names[:n]]
    Y = [TruncatedSeries.variable(v, names) for v in names[n:]]
    wX = [_ghost_poly(X, p, i, names) for i in range(n)]
    wY = [_ghost_poly(Y, p, i, names) for i in range(n)]
    add = _invert(p, n, [a + b for a, b in zip(wX, wY)], names)
    sub = _invert(p, n, [a - b for a, b in zip(wX, wY)], names)
    mul = _invert(p, n, [a * b for a, b in zip(wX, wY)], names)
    return WittPolynomials(p, n, _integral(add, p, n, "add"), _integral(sub, p, n, "sub"), _integral(mul, p, n, "mul"))


def _zero_like(c):
    return c * 0


def _one_like(c):
    return c * 0 + 1


class WittVector:
    __slots__ = ("components", "p")

    def __init__(self, components: Sequence, p: int):
        if not components:
            raise ValueError("Witt vectors need length n >= 1")
        self.components = tuple(components)
        self.p = p

    @property
    def n(self) -> int:
        return len(self.components)

    def __repr__(self):
        return f"WittVector({list(self.components)!r}, p={self.p})"

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def _check(self, other: "WittVector"):
        if not isinstance(other, WittVector):
            raise TypeError(f"cannot combine a Witt vector with {type(other).__name__}")
        if (self.p, self.n) != (other.p, other.n):
            raise ValueError(f"mismatched Witt parameters (p={self.p}, n={self.n}) vs (p={other.p}, n={other.n})")

    def _apply(self, polys, other):
        self._check(other)
        vals = list(self.components) + list(other.components)
        return WittVector([P.evaluate(vals) if P.terms else _zero_like(vals[0]) for P in polys], self.p)

    def __add__(self, other):
        return self._apply(universal_polynomials(self.p, self.n).add, other)

    def __sub__(self, other):
        return self._apply(universal_polynomials(self.p, self.n).sub, other)

    def __mul__(self, other):
        if isinstance(other, int):
            return scalar_multiple(other, self)
        return self._apply(universal_polynomials(self.p, self.n).mul, other)

    def __rmul__(self, other):
        if isinstance(other, int):
            return scalar_multiple(other, self)
        return NotImplemented

    def __neg__(self):
        return self.zero() - self

    def __eq__(self, other):
        if not isinstance(other, WittVector):
            return NotImplemented
        return (self.p, self.n) == (other.p, other.n) and all(a == b for a, b in zip(self.components, other.components))

    __hash__ = None

    def zero(self) -> "WittVector":
        return WittVector([_zero_like(c) for c in self.components], self.p)

    def one(self) -> "WittVector":
        c = self.components[0]
        return WittVector([_one_like(c)] + [_zero_like(x) for x in self.components[1:]], self.p)

    def ghost(self) -> list:
        return ghost(self)

    def truncate(self, m: int) -> "WittVector":
        """Image in W_m (the first m components)."""
        if not 1 <= m <= self.n:
            raise ValueError(f"cannot truncate length {self.n} to {m}")
        return WittVector(self.components[:m], self.p)

    def map(self, fn) -> "WittVector":
        return WittVector([fn(c) for c in self.components], self.p)


def ghost(a: WittVector) -> list:
    p = a.p
    out = []
    for i in range(a.n):
        total = None
        for j in range(i + 1):
            term = (a.components[j] ** (p ** (i - j))) * (p ** j)
            total = term if total is None else total + term
        out.append(total)
    return out


def unghost(w: Sequence, p: int) -> WittVector:
    """Inverse of the ghost map where p is invertible (e.g. over Q)."""
    a = []
    for i, wi in enumerate(w):
        rest = wi
        for j in range(i):
            rest = rest - (a[j] ** (p ** (i - j))) * (p ** j)
        a.append(rest * Fraction(1, p ** i))
    return WittVector(a, p)


def teichmuller(r, n: int, p: int) -> WittVector:
    return WittVector([r] + [_zero_like(r)] * (n - 1), p)


def verschiebung(a: WittVector) -> WittVector:
    return WittVector([_zero_like(a.components[0])] + list(a.components[:-1]), a.p)


def sigma(a: WittVector) -> WittVector:
    """Componentwise p-th power (a ring map only in characteristic p)."""
    return a.map(lambda c: c ** a.p)


def _characteristic(c):
    return getattr(c, "characteristic", None)


def frobenius_charp(a: WittVector) -> WittVector:
    for c in a.components:
        if _characteristic(c) != a.p:
            raise ValueError(f"Frobenius needs coefficients of characteristic {a.p}, got {type(c).__name__}")
    return sigma(a)


def scalar_multiple(k: int, a: WittVector) -> WittVector:
    """k * a by double-and-add with Witt addition."""
    if k < 0:
        return -scalar_multiple(-k, a)
    result = a.zero()
    base = a
    while k:
        if k & 1:
            result = result + base
        k >>= 1
        if k:
            base = base + base
    return result


def from_integer(k: int, n: int, p: int) -> WittVector:
    """The Witt vector of the integer k over Z."""
    return scalar_multiple(k, WittVector([1] + [0] * (n - 1), p))
