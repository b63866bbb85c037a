"""Exact arithmetic shared by the rest of the package.

Valuations are normalised so that ``v(p) = 1``; every radius and slope in the
package is expressed in these "log p" units.  ``v(0)`` is ``math.inf``.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence

import gmpy2

INF = math.inf

Number = "int | Fraction"


def to_fraction(x) -> Fraction:
    """Coerce ints, Fractions, mpq and ``"a/b"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if type(x).__name__ == "mpq":
        return Fraction(int(x.numerator), int(x.denominator))
    if type(x).__name__ == "mpz":
        return Fraction(int(x))
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def format_rational(x) -> str:
    if x == INF:
        return "inf"
    if x == -INF:
        return "-inf"
    x = to_fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def vp_int(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    return int(gmpy2.remove(n, p)[1])


def vp(x, p: int):
    """p-adic valuation of a rational (or a cyclotomic element)."""
    if isinstance(x, CycElement):
        return x.valuation()
    if x == 0:
        return INF
    x = to_fraction(x) if not isinstance(x, int) else Fraction(x)
    return Fraction(vp_int(x.numerator, p) - vp_int(x.denominator, p))


def vp_fast(x, p: int):
    """Valuation of an mpq/int as a plain int, ``None`` for zero."""
    if x == 0:
        return None
    return int(gmpy2.remove(x.numerator, p)[1]) - int(gmpy2.remove(x.denominator, p)[1])


def abs_p(x, p: int):
    v = vp(x, p)
    if v == INF:
        return 0.0
    return float(p) ** (-float(v))


# ---------------------------------------------------------------------------
# Cyclotomic fields Q(zeta_{p^n})
# ---------------------------------------------------------------------------


class Cyclotomic:
    """The field Q(zeta) with zeta a primitive p^n-th root of unity.

    Elements are kept in the power basis 1, zeta, ..., zeta^(d-1) with
    d = (p - 1) p^(n-1).
    """

    def __init__(self, p: int, n: int):
        if p < 2 or any(p % q == 0 for q in range(2, int(p ** 0.5) + 1)):
            raise ValueError(f"{p} is not prime")
        if n < 1:
            raise ValueError("need n >= 1")
        self.p = p
        self.n = n
        self.order = p ** n
        self.degree = (p - 1) * p ** (n - 1)
        self._binom = [[math.comb(k, j) for j in range(self.degree)] for k in range(self.degree)]

    def __repr__(self):
        return f"Cyclotomic({self.p}, {self.n})"

    def __eq__(self, other):
        return isinstance(other, Cyclotomic) and (self.p, self.n) == (other.p, other.n)

    def __hash__(self):
        return hash((self.p, self.n))

    def __call__(self, x) -> "CycElement":
        if isinstance(x, CycElement):
            if x.field == self:
                return x
            return self.embed(x)
        c = [Fraction(0)] * self.degree
        c[0] = to_fraction(x)
        return CycElement(self, tuple(c))

    def zero(self):
        return self(0)

    def one(self):
        return self(1)

    @property
    def zeta(self) -> "CycElement":
        return self.zeta_power(1)

    def zeta_power(self, k: int) -> "CycElement":
        full = [Fraction(0)] * self.order
        full[k % self.order] = Fraction(1)
        return CycElement(self, self._reduce(full))

    def root_of_unity(self, m: int) -> "CycElement":
        """A primitive p^m-th root of unity, namely zeta^(p^(n-m))."""
        if not 0 <= m <= self.n:
            raise ValueError(f"Q(zeta_{self.order}) has no primitive p^{m}-th root of unity")
        return self.zeta_power(self.p ** (self.n - m))

    def embed(self, x: "CycElement") -> "CycElement":
        """Image of an element of a smaller cyclotomic field (zeta_small -> zeta^(p^k))."""
        small = x.field
        if small.p != self.p or small.n > self.n:
            raise ValueError(f"cannot embed {small} into {self}")
        step = self.p ** (self.n - small.n)
        full = [Fraction(0)] * self.order
        for i, c in enumerate(x.coeffs):
            full[(i * step) % self.order] += c
        return CycElement(self, self._reduce(full))

    def _reduce(self, full: Sequence[Fraction]) -> tuple:
        """Reduce a vector indexed mod p^n modulo the cyclotomic polynomial."""
        d, block = self.degree, self.order // self.p
        out = list(full[:d])
        # zeta^(d + r) = -sum_{k < p-1} zeta^(k p^(n-1) + r)
        for r in range(block):
            c = full[d + r]
            if c:
                for k in range(self.p - 1):
                    out[k * block + r] -= c
        return tuple(out)


@lru_cache(maxsize=None)
def cyclotomic_field(p: int, n: int) -> Cyclotomic:
    return Cyclotomic(p, n)


class CycElement:
    __slots__ = ("field", "coeffs")

    def __init__(self, field: Cyclotomic, coeffs: tuple):
        self.field = field
        self.coeffs = coeffs

    def _lift(self, other):
        if isinstance(other, CycElement):
            if other.field != self.field:
                big = self.field if self.field.n >= other.field.n else other.field
                return big(self), big(other)
            return self, other
        if isinstance(other, (int, Fraction)) or type(other).__name__ in ("mpq", "mpz"):
            return self, self.field(other)
        return NotImplemented

    def __add__(self, other):
        pair = self._lift(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return CycElement(a.field, tuple(x + y for x, y in zip(a.coeffs, b.coeffs)))

    __radd__ = __add__

    def __neg__(self):
        return CycElement(self.field, tuple(-x for x in self.coeffs))

    def __sub__(self, other):
        pair = self._lift(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return CycElement(a.field, tuple(x - y for x, y in zip(a.coeffs, b.coeffs)))

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CycElement(self.field, tuple(x * other for x in self.coeffs))
        pair = self._lift(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        f = a.field
        full = [Fraction(0)] * f.order
        bnz = [(j, y) for j, y in enumerate(b.coeffs) if y]
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in bnz:
                k = i + j
                if k >= f.order:
                    k -= f.order
                full[k] += x * y
        return CycElement(f, f._reduce(full))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero in cyclotomic field")
            return CycElement(self.field, tuple(x / other for x in self.coeffs))
        pair = self._lift(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return a * b.inverse()

    def __rtruediv__(self, other):
        return self.field(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = self.field.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        pair = self._lift(other)
        if pair is NotImplemented:
            return NotImplemented
        a, b = pair
        return a.coeffs == b.coeffs

    def __hash__(self):
        if all(c == 0 for c in self.coeffs[1:]):
            return hash(self.coeffs[0])
        return hash((self.field, self.coeffs))

    def __bool__(self):
        return any(self.coeffs)

    def __repr__(self):
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(format_rational(c) + ("" if i == 0 else f"*z^{i}"))
        return "(" + (" + ".join(terms) or "0") + ")"

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coeffs[1:])

    def rational(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def pi_coordinates(self) -> list:
        """Coordinates in the basis 1, pi, ..., pi^(d-1) where pi = zeta - 1."""
        f = self.field
        out = []
        for j in range(f.degree):
            s = Fraction(0)
            for k in range(j, f.degree):
                c = self.coeffs[k]
                if c:
                    s += c * f._binom[k][j]
            out.append(s)
        return out

    def valuation(self):
        """Normalised valuation, computed from the pi-adic expansion.

        pi = zeta - 1 is a uniformiser of valuation 1/d and the summands
        c_j pi^j have pairwise distinct valuations, so the minimum is exact.
        """
        f = self.field
        best = INF
        for j, c in enumerate(self.pi_coordinates()):
            if c:
                v = vp(c, f.p) + Fraction(j, f.degree)
                if v < best:
                    best = v
        return best

    def matrix(self) -> list:
        """Matrix of multiplication by self in the power basis (columns = images)."""
        f = self.field
        cols = []
        for j in range(f.degree):
            cols.append((self * f.zeta_power(j)).coeffs)
        return [[cols[j][i] for j in range(f.degree)] for i in range(f.degree)]

    def inverse(self) -> "CycElement":
        if not self:
            raise ZeroDivisionError("inverse of zero in cyclotomic field")
        f = self.field
        m = self.matrix()
        d = f.degree
        rhs = [Fraction(1)] + [Fraction(0)] * (d - 1)
        sol = solve_linear(m, rhs)
        return CycElement(f, tuple(sol))


def solve_linear(matrix, rhs):
    """Exact Gaussian elimination for a square nonsingular system."""
    n = len(matrix)
    a = [list(row) + [rhs[i]] for i, row in enumerate(matrix)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / Fraction(a[col][col])
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] * inv
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[i][n] / a[i][i] for i in range(n)]


# ---------------------------------------------------------------------------
# Z / mZ
# ---------------------------------------------------------------------------


class ResidueInt:
    """An element of Z/mZ; ``characteristic`` is m."""

    __slots__ = ("value", "modulus")

    def __init__(self, value: int, modulus: int):
        self.modulus = modulus
        self.value = int(value) % modulus

    @property
    def characteristic(self) -> int:
        return self.modulus

    def _coerce(self, other):
        if isinstance(other, ResidueInt):
            if other.modulus != self.modulus:
                raise ValueError("moduli differ")
            return other.value
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            if math.gcd(other.denominator, self.modulus) != 1:
                raise ZeroDivisionError(f"{other} is not defined mod {self.modulus}")
            return other.numerator * pow(other.denominator, -1, self.modulus)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ResidueInt(self.value + o, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ResidueInt(self.value - o, self.modulus)

    def __rsub__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ResidueInt(o - self.value, self.modulus)

    def __mul__(self, other):
        o = self._coerce(other)
        return NotImplemented if o is NotImplemented else ResidueInt(self.value * o, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return ResidueInt(-self.value, self.modulus)

    def __pow__(self, k: int):
        return ResidueInt(pow(self.value, k, self.modulus), self.modulus)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return NotImplemented
        return (self.value - o) % self.modulus == 0

    def __hash__(self):
        return hash((self.value, self.modulus))

    def __bool__(self):
        return self.value != 0

    def __repr__(self):
        return f"{self.value} mod {self.modulus}"


# ---------------------------------------------------------------------------
# Truncated multivariate power series
# ---------------------------------------------------------------------------


def _is_zero(c) -> bool:
    return c == 0


def _scalar_inverse(c):
    if isinstance(c, CycElement):
        return c.inverse()
    if isinstance(c, int):
        return Fraction(1, c)
    return 1 / c


class TruncatedSeries:
    """A power series in named variables, known modulo total degree ``order``.

    ``order=None`` means the series is an exact polynomial.  Coefficients can
    live in any commutative ring whose elements support ``+ - *`` and
    comparison with 0 (Fraction, CycElement, ResidueInt, ...).
    """

    __slots__ = ("variables", "order", "terms")

    def __init__(self, variables: Sequence[str], terms: Mapping | None = None, order: int | None = None):
        self.variables = tuple(variables)
        self.order = order
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(e)
            if len(e) != len(self.variables):
                raise ValueError(f"exponent {e} does not match variables {self.variables}")
            if order is not None and sum(e) >= order:
                continue
            if not _is_zero(c):
                clean[e] = c
        self.terms = clean

    # -- constructors ------------------------------------------------------
    @classmethod
    def constant(cls, c, variables: Sequence[str] = ("t",), order: int | None = None):
        return cls(variables, {(0,) * len(variables): c}, order)

    @classmethod
    def variable(cls, name: str, variables: Sequence[str] | None = None, order: int | None = None):
        variables = tuple(variables) if variables is not None else (name,)
        e = tuple(1 if v == name else 0 for v in variables)
        if sum(e) != 1:
            raise ValueError(f"{name} is not one of {variables}")
        return cls(variables, {e: Fraction(1)}, order)

    @classmethod
    def from_coefficients(cls, coeffs: Iterable, var: str = "t", order: int | None = None):
        return cls((var,), {(i,): c for i, c in enumerate(coeffs)}, order)

    def _like(self, terms, order="same"):
        return TruncatedSeries(self.variables, terms, self.order if order == "same" else order)

    # -- inspection ----------------------------------------------------------
    def coefficient(self, *exps):
        if len(exps) == 1 and isinstance(exps[0], tuple):
            exps = exps[0]
        if len(exps) != len(self.variables):
            raise ValueError("wrong number of exponents")
        if self.order is not None and sum(exps) >= self.order:
            raise ValueError(f"coefficient of total degree {sum(exps)} is not known (order {self.order})")
        return self.terms.get(tuple(exps), 0)

    __getitem__ = coefficient

    def coefficients(self, upto: int | None = None) -> list:
        """Univariate coefficient list c_0, ..., c_{upto-1}."""
        if len(self.variables) != 1:
            raise ValueError("coefficients() is for univariate series")
        upto = upto if upto is not None else (self.order if self.order is not None else self.degree() + 1)
        return [self.terms.get((i,), 0) for i in range(upto)]

    def constant_term(self):
        return self.terms.get((0,) * len(self.variables), 0)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def min_degree(self):
        return min((sum(e) for e in self.terms), default=INF)

    def is_zero(self) -> bool:
        return not self.terms

    def truncate(self, order: int | None) -> "TruncatedSeries":
        if order is not None and self.order is not None and order > self.order:
            raise ValueError("cannot raise the truncation order")
        return self._like(self.terms, order)

    def map_coefficients(self, fn: Callable) -> "TruncatedSeries":
        return self._like({e: fn(c) for e, c in self.terms.items()})

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other: "TruncatedSeries"):
        if other.variables != self.variables:
            raise ValueError(f"variable mismatch {self.variables} vs {other.variables}")
        if self.order is None:
            return other.order
        if other.order is None:
            return self.order
        return min(self.order, other.order)

    def _as_series(self, other):
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.constant(other, self.variables, None)

    def __add__(self, other):
        other = self._as_series(other)
        order = self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out[e] + c if e in out else c
        return self._like(out, order)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._as_series(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return self._like({e: c * other for e, c in self.terms.items()})
        order = self._check(other)
        out = {}
        oterms = list(other.terms.items())
        for e1, c1 in self.terms.items():
            d1 = sum(e1)
            for e2, c2 in oterms:
                if order is not None and d1 + sum(e2) >= order:
                    continue
                e = tuple(a + b for a, b in zip(e1, e2))
                term = c1 * c2
                out[e] = out[e] + term if e in out else term
        return self._like(out, order)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = TruncatedSeries.constant(Fraction(1), self.variables, self.order)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __truediv__(self, other):
        if isinstance(other, TruncatedSeries):
            return self * other.inverse()
        inv = _scalar_inverse(other)
        return self._like({e: c * inv for e, c in self.terms.items()})

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __eq__(self, other):
        if isinstance(other, TruncatedSeries):
            if other.variables != self.variables:
                return False
            order = self._check(other)
            a = self.truncate(order).terms if order != self.order else self.terms
            b = other.truncate(order).terms if order != other.order else other.terms
            keys = set(a) | set(b)
            return all(_is_zero(a.get(k, 0) - b.get(k, 0)) for k in keys)
        if _is_zero(other):
            return self.is_zero()
        return self == self._as_series(other)

    def __hash__(self):
        raise TypeError("TruncatedSeries is unhashable")

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        parts = []
        for e in sorted(self.terms, key=lambda e: (sum(e), e)):
            c = self.terms[e]
            mono = "*".join(f"{v}^{k}" if k > 1 else v for v, k in zip(self.variables, e) if k)
            cs = format_rational(c) if isinstance(c, (int, Fraction)) else repr(c)
            parts.append(cs if not mono else f"{cs}*{mono}")
        tail = "" if self.order is None else f" + O(deg {self.order})"
        return (" + ".join(parts) or "0") + tail

    # -- analytic operations ------------------------------------------------
    def _require_order(self, what: str):
        if self.order is None:
            raise ValueError(f"{what} needs a truncation order")

    def inverse(self) -> "TruncatedSeries":
        c0 = self.constant_term()
        if _is_zero(c0):
            raise ZeroDivisionError("series with zero constant term is not invertible")
        if len(self.terms) == 1 and self.order is None:
            return self._like({(0,) * len(self.variables): _scalar_inverse(c0)})
        self._require_order("inverse")
        inv0 = _scalar_inverse(c0)
        u = self * inv0 - 1  # zero constant term
        result = TruncatedSeries.constant(Fraction(1), self.variables, self.order)
        power = result
        for _ in range(1, self.order):
            power = power * (-u)
            if power.is_zero():
                break
            result = result + power
        return result * inv0

    def exp(self) -> "TruncatedSeries":
        if not _is_zero(self.constant_term()):
            raise ValueError("exp needs a zero constant term")
        self._require_order("exp")
        result = TruncatedSeries.constant(Fraction(1), self.variables, self.order)
        power = result
        for k in range(1, self.order):
            power = power * self / k
            if power.is_zero():
                break
            result = result + power
        return result

    def log(self) -> "TruncatedSeries":
        if self.constant_term() != 1:
            raise ValueError("log needs constant term 1")
        self._require_order("log")
        u = self - 1
        result = TruncatedSeries(self.variables, {}, self.order)
        power = TruncatedSeries.constant(Fraction(1), self.variables, self.order)
        for k in range(1, self.order):
            power = power * u
            if power.is_zero():
                break
            result = result + power * Fraction((-1) ** (k + 1), k)
        return result

    def derivative(self, var: str) -> "TruncatedSeries":
        i = self.variables.index(var)
        out = {}
        for e, c in self.terms.items():
            if e[i]:
                ne = list(e)
                ne[i] -= 1
                out[tuple(ne)] = c * e[i]
        order = None if self.order is None else self.order - 1
        return self._like(out, order)

    def compose(self, substitutions: Mapping[str, "TruncatedSeries"]) -> "TruncatedSeries":
        """Substitute series for (some of) the variables.

        Unsubstituted variables must appear among the variables of the
        substituted series.  For a truncated series every substituted value
        must have zero constant term.
        """
        subs = dict(substitutions)
        targets = [s for s in subs.values() if isinstance(s, TruncatedSeries)]
        if not targets:
            raise ValueError("compose needs at least one series substitution")
        new_vars = targets[0].variables
        for v in self.variables:
            if v not in subs:
                subs[v] = TruncatedSeries.variable(v, new_vars)
        vals = {}
        for v, s in subs.items():
            if not isinstance(s, TruncatedSeries):
                s = TruncatedSeries.constant(s, new_vars, None)
            if s.variables != new_vars:
                raise ValueError("substituted series must share variables")
            vals[v] = s
        order = None
        for s in vals.values():
            if s.order is not None:
                order = s.order if order is None else min(order, s.order)
        if self.order is not None:
            minval = min(vals[v].min_degree() for v in self.variables)
            if minval < 1:
                raise ValueError("substituted series must have zero constant term")
            bound = self.order * minval if minval != INF else None
            if bound is not None:
                order = bound if order is None else min(order, bound)
        return _evaluate_terms(self, [vals[v] for v in self.variables], order)

    def evaluate(self, values: Sequence):
        """Evaluate a polynomial at ring elements (one per variable)."""
        if self.order is not None:
            raise ValueError("only exact polynomials can be evaluated at arbitrary elements")
        return _evaluate_terms(self, list(values), None)


def _evaluate_terms(series: TruncatedSeries, values: list, order):
    cache: dict = {}

    def power(i, k):
        key = (i, k)
        if key not in cache:
            if k == 1:
                cache[key] = values[i]
            else:
                half = power(i, k // 2)
                sq = half * half
                if isinstance(sq, TruncatedSeries) and order is not None:
                    sq = sq.truncate(min(order, sq.order) if sq.order is not None else order)
                cache[key] = sq * values[i] if k % 2 else sq
        return cache[key]

    total = None
    for e, c in series.terms.items():
        term = None
        for i, k in enumerate(e):
            if k:
                pw = power(i, k)
                term = pw if term is None else term * pw
        if term is None:
            term = c
            if isinstance(values[0], TruncatedSeries):
                term = TruncatedSeries.constant(c, values[0].variables, order)
        else:
            term = term * c
        total = term if total is None else total + term
    if total is None:
        first = values[0] if values else 0
        total = first * 0
    if isinstance(total, TruncatedSeries) and order is not None:
        total = total.truncate(order if total.order is None or order <= total.order else total.order)
    return total


def monomials(nvars: int, max_degree: int):
    for e in product(range(max_degree + 1), repeat=nvars):
        if sum(e) <= max_degree:
            yield e
