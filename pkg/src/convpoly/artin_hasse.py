"""Artin-Hasse exponentials E_p, E_{n,p}, F_{n,p}, G_{n,p} at finite truncation.

Series in several variables are ``TruncatedSeries`` with coefficients in
Q(zeta_{p^N}) for the relevant top level N; smaller roots of unity are
embedded as zeta_{p^m} = zeta^(p^(N-m)).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .numerics import INF, CycElement, TruncatedSeries, cyclotomic_field, vp
from .witt import WittVector, scalar_multiple, sigma, verschiebung

KINDS = ("Ep", "Enp", "Fnp", "Gnp")


class AHIntegralityError(ArithmeticError):
    """An integrality or valuation invariant failed: an internal bug, not bad input."""


@dataclass(frozen=True)
class AHSeries:
    kind: str
    p: int
    n: int
    D: int
    series: TruncatedSeries

    def coefficient(self, *exps):
        return self.series.coefficient(*exps)


# -- univariate building blocks ----------------------------------------------


@lru_cache(maxsize=None)
def ep_coefficients(p: int, D: int) -> tuple:
    """Coefficients e_0..e_{D-1} of E_p(t).

    From E'/E = sum_i t^(p^i - 1) we get k e_k = sum_{p^i <= k} e_{k - p^i}.
    """
    e = [Fraction(1)]
    for k in range(1, D):
        s = Fraction(0)
        q = 1
        while q <= k:
            s += e[k - q]
            q *= p
        e.append(s / k)
    return tuple(e)


def _divide(num: list, den: list) -> list:
    """Quotient of two univariate coefficient lists with den[0] = 1."""
    out = []
    for k in range(len(num)):
        s = num[k]
        for j in range(1, min(k, len(den) - 1) + 1):
            s = s - den[j] * out[k - j]
        out.append(s)
    return out


@lru_cache(maxsize=None)
def _enp_coefficients(p: int, m: int, D: int, top: int) -> tuple:
    """E_{m,p}(t) = E_p(zeta_{p^m} t) / E_p(t) with coefficients in Q(zeta_{p^top})."""
    K = cyclotomic_field(p, top)
    zeta = K.root_of_unity(m)
    e = ep_coefficients(p, D)
    num, z = [], K.one()
    for c in e:
        num.append(z * c)
        z = z * zeta
    return tuple(_divide(num, [K(c) for c in e]))


@lru_cache(maxsize=None)
def _fnp_coefficients(p: int, m: int, D: int, top: int) -> tuple:
    """F_{m,p}(t) = E_{m,p}(t) / E_{m,p}(t^p)."""
    E = _enp_coefficients(p, m, D, top)
    K = cyclotomic_field(p, top)
    den = [K.zero()] * D
    for k in range(0, (D - 1) // p + 1):
        den[k * p] = E[k]
    return tuple(_divide(list(E), den))


def _univariate(coeffs, D: int) -> TruncatedSeries:
    return TruncatedSeries.from_coefficients(coeffs, "t", D)


def _check_p_integral(kind: str, p: int, coeffs):
    for k, c in enumerate(coeffs):
        v = c.valuation() if isinstance(c, CycElement) else vp(c, p)
        if v < 0:
            raise AHIntegralityError(f"{kind}: coefficient {k} has valuation {v} < 0")


# -- Witt-vector arguments ---------------------------------------------------


def _series_order(a: WittVector) -> int:
    orders = []
    for c in a.components:
        if not isinstance(c, TruncatedSeries):
            raise TypeError("Witt-vector arguments must have TruncatedSeries components")
        if c.constant_term() != 0:
            raise ValueError("Witt-vector arguments need components with zero constant term")
        if c.order is None:
            raise ValueError("Witt-vector arguments must be truncated series")
        orders.append(c.order)
    return min(orders)


def _product(level_coeffs, a: WittVector, D: int, top: int) -> TruncatedSeries:
    """prod_i X_{n-i,p}(a_i) where X is given by ``level_coeffs(p, m, D, top)``."""
    n, p = a.n, a.p
    K = cyclotomic_field(p, top)
    result = TruncatedSeries.constant(K.one(), a.components[0].variables, D)
    for i, ai in enumerate(a.components):
        if ai.is_zero():
            continue
        factor = _univariate(level_coeffs(p, n - i, D, top), D).compose({"t": ai})
        result = result * factor
    return result


def witt_argument_eval(kind: str, a: WittVector, D: int | None = None, top: int | None = None) -> TruncatedSeries:
    """E_{n,p}(a), F_{n,p}(a) or G_{n,p}(a) for a Witt vector of truncated series.

    ``top`` selects the cyclotomic field Q(zeta_{p^top}) for the coefficients;
    it defaults to the length of ``a``.
    """
    order = _series_order(a)
    D = order if D is None else min(D, order)
    top = a.n if top is None else top
    if top < a.n:
        raise ValueError("the coefficient field must contain zeta_{p^n}")
    if kind == "Enp":
        return _product(_enp_coefficients, a, D, top)
    if kind == "Fnp":
        return _product(_fnp_coefficients, a, D, top)
    if kind == "Gnp":
        if a.n < 2:
            raise ValueError("G_{n,p} needs n >= 2")
        num = _product(_enp_coefficients, scalar_multiple(a.p, a), D, top)
        den = _product(_enp_coefficients, a.truncate(a.n - 1), D, top)
        return num / den
    raise ValueError(f"unknown Witt-argument kind {kind!r}; expected Enp, Fnp or Gnp")


def efg_right_side(a: WittVector, D: int | None = None) -> TruncatedSeries:
    """E_{n,p}(p a - (0, a_0^p, ..., a_{n-2}^p)) * F_{n-1,p}(a)^{-1}."""
    order = _series_order(a)
    D = order if D is None else min(D, order)
    shifted = scalar_multiple(a.p, a) - verschiebung(sigma(a))
    E = witt_argument_eval("Enp", shifted, D, top=a.n)
    F = witt_argument_eval("Fnp", a.truncate(a.n - 1), D, top=a.n)
    return E / F


def series_witt_vector(p: int, n: int, D: int, names=None) -> WittVector:
    """The generic Witt vector (a_0, ..., a_{n-1}) of independent variables."""
    names = tuple(names or (f"a{j}" for j in range(n)))
    return WittVector([TruncatedSeries.variable(v, names, D) for v in names], p)


# -- build and checks --------------------------------------------------------


def overconvergence_bound(p: int, n: int, exps) -> Fraction:
    """sum_j e_j v(zeta_{p^{n-j}} - 1) with v(zeta_{p^m} - 1) = 1/(p^(m-1)(p-1))."""
    return sum((Fraction(e, p ** (n - j - 1) * (p - 1)) for j, e in enumerate(exps)), Fraction(0))


def factorization_bound(p: int, n: int, exps) -> Fraction:
    """The weaker bound sum_j e_j v(zeta_{p^{n-j}} - 1) / p^(n-j-1).

    Writing G_{n,p}(a) = prod_j E_{n-j,p}(c_j [a_j]) with every Witt
    component of c_j divisible by zeta_{p^{n-j}} - 1 only controls a_j^e
    through the last component c_j a_j^(p^(n-j-1)).  For p = 2 the sharper
    ``overconvergence_bound`` already fails at a_0^8 when n = 2.
    """
    return sum((Fraction(e, p ** (2 * (n - j - 1)) * (p - 1)) for j, e in enumerate(exps)), Fraction(0))


@dataclass
class OverconvergenceReport:
    p: int
    n: int
    D: int
    checked: int = 0
    failures: list = field(default_factory=list)
    min_margin: object = INF

    @property
    def passed(self) -> bool:
        return not self.failures


def _overconvergence(p: int, n: int, D: int, G: TruncatedSeries, bound_fn=overconvergence_bound) -> OverconvergenceReport:
    rep = OverconvergenceReport(p, n, D)
    for e, c in G.terms.items():
        bound = bound_fn(p, n, e)
        v = c.valuation() if isinstance(c, CycElement) else vp(c, p)
        rep.checked += 1
        margin = v - bound
        if margin < rep.min_margin:
            rep.min_margin = margin
        if margin < 0:
            rep.failures.append((e, v, bound))
    return rep


def _build_gnp(p: int, n: int, D: int) -> TruncatedSeries:
    return witt_argument_eval("Gnp", series_witt_vector(p, n, D))


@lru_cache(maxsize=None)
def build(kind: str, p: int, n: int = 1, D: int = 12) -> AHSeries:
    if D < 2:
        raise ValueError("truncation D must be at least 2")
    if kind == "Ep":
        coeffs = ep_coefficients(p, D)
        for k, c in enumerate(coeffs):
            if c.denominator % p == 0:
                raise AHIntegralityError(f"E_{p}: coefficient {k} = {c} is not p-integral")
        return AHSeries(kind, p, n, D, _univariate(coeffs, D))
    if kind in ("Enp", "Fnp"):
        if n < 1:
            raise ValueError(f"{kind} needs n >= 1")
        coeffs = (_enp_coefficients if kind == "Enp" else _fnp_coefficients)(p, n, D, n)
        _check_p_integral(kind, p, coeffs)
        return AHSeries(kind, p, n, D, _univariate(coeffs, D))
    if kind == "Gnp":
        if n < 2:
            raise ValueError("Gnp needs n >= 2")
        G = _build_gnp(p, n, D)
        rep = _overconvergence(p, n, D, G, factorization_bound)
        if not rep.passed:
            raise AHIntegralityError(f"G_{{{n},{p}}} violates the factorization bound at {rep.failures[:3]}")
        return AHSeries(kind, p, n, D, G)
    raise ValueError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}")


def check_overconvergence(p: int, n: int, D: int) -> OverconvergenceReport:
    """Compare each coefficient of G_{n,p} with its valuation lower bound."""
    if D < 4:
        raise ValueError("D must be at least 4")
    if n < 2:
        raise ValueError("G_{n,p} needs n >= 2")
    return _overconvergence(p, n, D, _build_gnp(p, n, D))


def check_value_at_one(p: int, n: int, D: int) -> list:
    """v(S_d - zeta_{p^n}) for the partial sums S_d = f_0 + ... + f_d of F_{n,p}(t), d = 1..D."""
    if D < 4:
        raise ValueError("D must be at least 4")
    K = cyclotomic_field(p, n)
    F = _fnp_coefficients(p, n, D + 1, n)
    zeta = K.root_of_unity(n)
    trace = []
    s = F[0]
    for d in range(1, D + 1):
        s = s + F[d]
        trace.append((s - zeta).valuation())
    return trace


@dataclass
class ValueAtOneReport:
    p: int
    degree: int
    integral: bool
    matches_closed_form: bool
    residual_valuations: dict  # j -> [v(r_j(T)) for T = 1..degree]

    @property
    def residuals_shrink(self) -> bool:
        """Nondecreasing in T for every j, with growth for at least one j."""
        grew = False
        for vals in self.residual_valuations.values():
            if any(b < a for a, b in zip(vals, vals[1:])):
                return False
            grew = grew or vals[-1] > vals[0]
        return grew

    @property
    def passed(self) -> bool:
        return self.integral and self.matches_closed_form and self.residuals_shrink


def value_at_one_closed_form(p: int, order: int) -> TruncatedSeries:
    """sum_j (-1)^j/j u^j (t [j = 1] + sum_{i >= 1} (C(p^i - 1, j - 1) - C(p^{i-1} - 1, j - 1)) t^(p^i))."""
    terms = {}
    for j in range(1, order):
        sign = Fraction((-1) ** j, j)
        if j == 1 and j + 1 < order:
            terms[(1, 1)] = terms.get((1, 1), 0) + sign
        q = p
        while j + q < order:
            c = math.comb(q - 1, j - 1) - math.comb(q // p - 1, j - 1)
            if c:
                terms[(j, q)] = terms.get((j, q), 0) + sign * c
            q *= p
    return TruncatedSeries(("u", "t"), terms, order)


def check_value_at_one_bivariate(p: int, degree: int = 8) -> ValueAtOneReport:
    """f(z, t) = E_p(zt) E_p(t^p) / (E_p(t) E_p(z t^p)) in u = 1 - z and t.

    All coefficients u^j t^k with j, k <= degree are exact.  Checks that f
    is p-integral, that log f equals the rearranged closed form, and that
    the u^j coefficient of log f evaluated at t = 1 (partial sums over
    t-degree <= T) approaches -1/j, the u^j coefficient of log z.
    """
    order = 2 * degree + 1
    vars_ = ("u", "t")
    u = TruncatedSeries.variable("u", vars_, order)
    t = TruncatedSeries.variable("t", vars_, order)
    E = _univariate(ep_coefficients(p, order), order)
    zt = t - u * t
    tp = t ** p
    f = E.compose({"t": zt}) * E.compose({"t": tp}) / (E.compose({"t": t}) * E.compose({"t": zt * t ** (p - 1)}))
    integral = all(vp(Fraction(c), p) >= 0 for c in f.terms.values())
    g = f.log()
    matches = g == value_at_one_closed_form(p, order)
    residuals = {}
    for j in range(1, degree + 1):
        vals, s = [], Fraction(0)
        for T in range(1, degree + 1):
            s += Fraction(g.terms.get((j, T), 0))
            vals.append(vp(s + Fraction(1, j), p))
        residuals[j] = vals
    return ValueAtOneReport(p, degree, integral, matches, residuals)
