"""Power-series solutions of y^(n) + f_{n-1} y^(n-1) + ... + f_0 y = 0 at a
rational point, and radius estimates from the truncated coefficients.

The recurrence runs over gmpy2.mpq; results are handed back as Fractions.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import gmpy2
from gmpy2 import mpq

from .numerics import INF, to_fraction, vp, vp_fast
from .polygon import Polygon, concave_from_slopes

DEFAULT_N = 512
DEFAULT_WINDOW = Fraction(1, 2)
DEFAULT_SEED = 0xC0FFEE
N_RANDOM_COMBINATIONS = 8

INFINITY = INF  # the point at infinity of P^1


class SingularPointError(ValueError):
    pass


class NoFiniteRadius(ValueError):
    """Every computed solution is a polynomial up to the truncation order."""


# -- polynomials over Q as coefficient lists (constant term first) ----------


def _trim(c: list) -> list:
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def poly_mul(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim(out)


def poly_eval(c: Sequence, x):
    acc = 0
    for a in reversed(c):
        acc = acc * x + a
    return acc


def poly_divmod(a: Sequence, b: Sequence):
    a, b = _trim([to_fraction(x) for x in a]), _trim([to_fraction(x) for x in b])
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    q = [Fraction(0)] * max(len(a) - len(b) + 1, 0)
    r = list(a)
    while len(r) >= len(b) and r:
        k = len(r) - len(b)
        c = r[-1] / b[-1]
        q[k] = c
        for i, y in enumerate(b):
            r[i + k] -= c * y
        r = _trim(r)
    return _trim(q), r


def poly_shift(c: Sequence, x) -> list:
    """Coefficients of c(x + u) in u."""
    out = [mpq(0)] * len(c)
    xq = mpq(x.numerator, x.denominator) if isinstance(x, Fraction) else mpq(x)
    for i, ci in enumerate(c):
        if ci:
            ci = mpq(ci.numerator, ci.denominator)
            for j in range(i + 1):
                out[j] += ci * math.comb(i, j) * xq ** (i - j)
    return out


@dataclass(frozen=True)
class RationalFunction:
    numerator: tuple
    denominator: tuple = (Fraction(1),)

    def __post_init__(self):
        num = tuple(_trim([to_fraction(c) for c in self.numerator]))
        den = tuple(_trim([to_fraction(c) for c in self.denominator]))
        if not den:
            raise ZeroDivisionError("zero denominator")
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "denominator", den)

    @classmethod
    def poly(cls, coeffs) -> "RationalFunction":
        return cls(tuple(coeffs), (1,))

    def __call__(self, x):
        d = poly_eval(self.denominator, x)
        if d == 0:
            raise SingularPointError(f"pole at {x}")
        return poly_eval(self.numerator, x) / d


@dataclass(frozen=True)
class OdeProblem:
    """y^(n) + sum_k f_k(z) y^(k) = 0 with poles of the f_k inside ``singular``."""

    coefficients: tuple  # f_0, ..., f_{n-1}
    singular: tuple  # finite rationals plus INFINITY
    p: int
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "coefficients", tuple(self.coefficients))
        sing = tuple(s if s == INFINITY else to_fraction(s) for s in self.singular)
        object.__setattr__(self, "singular", sing)
        if INFINITY not in sing:
            raise ValueError("infinity must belong to the singular set")
        if self.p < 2:
            raise ValueError("the series engine needs a residue characteristic p > 0")
        for f in self.coefficients:
            rest = list(f.denominator)
            for z in self.finite_singular:
                while len(rest) > 1 and poly_eval(rest, z) == 0:
                    rest, _ = poly_divmod(rest, [-z, 1])
            if len(rest) > 1:
                raise ValueError(f"coefficient {f} has poles outside the singular set")

    @property
    def order(self) -> int:
        return len(self.coefficients)

    @property
    def finite_singular(self) -> tuple:
        return tuple(s for s in self.singular if s != INFINITY)

    def polynomial_form(self) -> list:
        """Polynomials P_0..P_n with sum_k P_k(z) y^(k) = 0 (denominators cleared)."""
        den = [Fraction(1)]
        for f in self.coefficients:
            den = poly_mul(den, f.denominator)
        out = []
        for f in self.coefficients:
            q, r = poly_divmod(den, f.denominator)
            assert not r
            out.append(poly_mul(f.numerator, q))
        out.append(den)
        return out

    def distance_valuation(self, x) -> Fraction | float:
        """v(x - z) maximised over finite z in the singular set (-inf if none)."""
        vals = [vp(to_fraction(x) - z, self.p) for z in self.finite_singular]
        return max(vals) if vals else -INF


@dataclass(frozen=True)
class LocalSolution:
    x: Fraction
    coefficients: tuple
    N: int


def _check_point(prob: OdeProblem, x: Fraction, P: list):
    if x in prob.finite_singular:
        raise SingularPointError(f"{x} lies in the singular set")
    if poly_eval(P[-1], x) == 0:
        raise SingularPointError(f"coefficient pole at {x}")


def _recurrence(Q: list, init: list, N: int) -> list:
    n = len(Q) - 1
    lead = Q[n][0]
    a = list(init) + [mpq(0)] * (N - n)
    terms = [(k, j, c) for k in range(n + 1) for j, c in enumerate(Q[k]) if c and not (k == n and j == 0)]
    for m in range(N - n):
        s = mpq(0)
        for k, j, c in terms:
            idx = m - j + k
            if idx < 0 or idx >= N:
                continue
            ai = a[idx]
            if not ai:
                continue
            ff = 1
            for t in range(k):
                ff *= idx - t
            s += c * ff * ai
        ff = 1
        for t in range(n):
            ff *= m + n - t
        a[m + n] = -s / (lead * ff)
    return a


def _solve_mpq(prob: OdeProblem, x: Fraction, inits: list, N: int) -> list:
    P = prob.polynomial_form()
    _check_point(prob, x, P)
    Q = [poly_shift(pk, x) for pk in P]
    return [_recurrence(Q, [mpq(c.numerator, c.denominator) for c in init], N) for init in inits]


def solve_series(prob: OdeProblem, x, init: Sequence, N: int) -> LocalSolution:
    x = to_fraction(x)
    init = [to_fraction(c) for c in init]
    if len(init) != prob.order:
        raise ValueError(f"need {prob.order} initial conditions")
    if N < prob.order:
        raise ValueError("N must be at least the order")
    (a,) = _solve_mpq(prob, x, [init], N)
    return LocalSolution(x, tuple(Fraction(int(c.numerator), int(c.denominator)) for c in a), N)


def _basis_and_combinations(prob: OdeProblem, x: Fraction, N: int, seed: int) -> list:
    n = prob.order
    basis = _solve_mpq(prob, x, [[Fraction(int(i == j)) for i in range(n)] for j in range(n)], N)
    rng = random.Random(seed)
    combos = []
    for _ in range(N_RANDOM_COMBINATIONS):
        w = [rng.randint(-9, 9) or 1 for _ in range(n)]
        combos.append([sum((wi * b[k] for wi, b in zip(w, basis)), mpq(0)) for k in range(N)])
    return basis, combos


def _tail_rate(a: Sequence, p: int, start: int):
    best = None
    for k in range(max(start, 1), len(a)):
        v = vp_fast(a[k], p)
        if v is None:
            continue
        r = Fraction(-v, k)
        if best is None or r > best:
            best = r
    return best


def _window_start(N: int, window) -> int:
    return math.ceil(to_fraction(window) * N)


def estimate_s1(prob: OdeProblem, x, N: int = DEFAULT_N, window=DEFAULT_WINDOW, seed: int = DEFAULT_SEED) -> Fraction:
    """Estimate s_1 at x in log-p units.

    The series rate limsup(-v(a_k)/k) is read off the tail window.  A disc
    in U cannot reach a singular point, so the estimate is never allowed to
    drop below the valuation of the distance from x to the singular set.
    """
    if N < 64:
        raise ValueError("N must be at least 64")
    x = to_fraction(x)
    basis, combos = _basis_and_combinations(prob, x, N, seed)
    start = _window_start(N, window)
    rates = [r for r in (_tail_rate(a, prob.p, start) for a in basis + combos) if r is not None]
    if not rates:
        raise NoFiniteRadius("no finite radius detected: all solutions are polynomials up to N")
    est = max(rates)
    dist = prob.distance_valuation(x)
    return max(est, dist) if dist != -INF else est


@dataclass
class PolygonEstimate:
    polygon: Polygon
    labels: dict
    entire_dimension: int = 0
    raw_slopes: list = field(default_factory=list)


def estimate_polygon(prob: OdeProblem, x, N: int = DEFAULT_N, window=DEFAULT_WINDOW, seed: int = DEFAULT_SEED) -> PolygonEstimate:
    """Estimate all slopes by valuation-greedy elimination (s_2, ... heuristic).

    Repeatedly pick the column (solution) and tail index where -v(a_k)/k is
    largest, use that entry as a pivot to clear the same row in the other
    columns, and drop the pivot column.  Each dropped column contributes its
    rate as one slope.  Columns that vanish in the window count as entire.
    """
    if N < 64:
        raise ValueError("N must be at least 64")
    x = to_fraction(x)
    s1 = estimate_s1(prob, x, N, window, seed)
    basis, _ = _basis_and_combinations(prob, x, N, seed)
    start = _window_start(N, window)
    p = prob.p
    cols = [list(b) for b in basis]
    rates = []
    entire = 0
    while cols:
        best = None
        for ci, col in enumerate(cols):
            for k in range(max(start, 1), N):
                v = vp_fast(col[k], p)
                if v is None:
                    continue
                r = Fraction(-v, k)
                if best is None or r > best[0]:
                    best = (r, ci, k)
        if best is None:
            entire += len(cols)
            break
        r, ci, k = best
        pivot = cols.pop(ci)
        rates.append(r)
        for col in cols:
            if col[k]:
                f = col[k] / pivot[k]
                for j in range(N):
                    if pivot[j]:
                        col[j] -= f * pivot[j]
    if not rates:
        raise NoFiniteRadius("no finite radius detected: all solutions are polynomials up to N")
    dist = prob.distance_valuation(x)
    raw = sorted(rates, reverse=True)
    raw[0] = max(raw[0], s1)
    slopes_ = [max(r, dist) if dist != -INF else r for r in raw]
    slopes_.sort(reverse=True)
    labels = {"s_1": "certified-heuristic"}
    for i in range(2, len(slopes_) + 1):
        labels[f"s_{i}"] = "heuristic"
    return PolygonEstimate(concave_from_slopes(slopes_), labels, entire, raw)


def residual(prob: OdeProblem, sol: LocalSolution) -> list:
    """Coefficients of u^m, m < N - n, after substituting sol into the equation."""
    P = prob.polynomial_form()
    n = prob.order
    a = sol.coefficients
    N = sol.N
    out = []
    shifted = []
    for pk in P:
        shifted.append([Fraction(int(c.numerator), int(c.denominator)) for c in poly_shift(pk, sol.x)])
    for m in range(N - n):
        s = Fraction(0)
        for k, Q in enumerate(shifted):
            for j, c in enumerate(Q):
                i = m - j + k
                if c and 0 <= i < N and i >= k:
                    s += c * math.perm(i, k) * a[i]
        out.append(s)
    return out
