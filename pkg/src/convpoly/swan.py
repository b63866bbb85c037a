"""Swan conductors of Artin-Schreier-Witt classes over F_p((z)).

A class is a Witt vector a in W_n(F_p((z))) taken modulo (phi - 1) W_n.
After normalization (no leading pole order m_j = -val(a_j) is a positive
multiple of p) the conductor is max(0, m_j p^(n-1-j)).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

from .numerics import INF, to_fraction
from .polygon import Polygon, concave_from_slopes
from .witt import WittVector, frobenius_charp


class LaurentElement:
    """A Laurent polynomial sum c_k z^k with coefficients in F_p."""

    __slots__ = ("p", "coeffs")

    def __init__(self, p: int, coeffs: Mapping[int, int] | None = None):
        self.p = p
        self.coeffs = {k: c % p for k, c in (coeffs or {}).items() if c % p}

    @classmethod
    def monomial(cls, p: int, k: int, c: int = 1) -> "LaurentElement":
        return cls(p, {k: c})

    @property
    def characteristic(self) -> int:
        return self.p

    def valuation(self):
        return min(self.coeffs) if self.coeffs else INF

    @property
    def pole_order(self) -> int:
        """m = -val, or 0 for elements without poles."""
        return max(0, -self.valuation()) if self.coeffs else 0

    def leading(self) -> tuple:
        k = self.valuation()
        return k, self.coeffs[k]

    def _coerce(self, other) -> "LaurentElement":
        if isinstance(other, LaurentElement):
            if other.p != self.p:
                raise ValueError(f"characteristics differ: {self.p} vs {other.p}")
            return other
        if isinstance(other, int):
            return LaurentElement(self.p, {0: other})
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self.coeffs)
        for k, c in other.coeffs.items():
            out[k] = out.get(k, 0) + c
        return LaurentElement(self.p, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentElement(self.p, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out: dict = {}
        for k1, c1 in self.coeffs.items():
            for k2, c2 in other.coeffs.items():
                out[k1 + k2] = out.get(k1 + k2, 0) + c1 * c2
        return LaurentElement(self.p, out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative powers are not supported")
        if e == self.p:
            # Frobenius: c^p = c in F_p
            return LaurentElement(self.p, {k * self.p: c for k, c in self.coeffs.items()})
        result = LaurentElement(self.p, {0: 1})
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash((self.p, frozenset(self.coeffs.items())))

    def __bool__(self):
        return bool(self.coeffs)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"{c}*z^{k}" for k, c in sorted(self.coeffs.items()))


_TERM = re.compile(r"^\s*(-?\d+)\s*:\s*(-?\d+)\s*$")


def parse_laurent(text: str, p: int) -> LaurentElement:
    """Parse ``"exp:coeff,exp:coeff"`` (``"0"`` or empty for zero)."""
    text = text.strip()
    if text in ("", "0"):
        return LaurentElement(p)
    coeffs: dict = {}
    for part in text.split(","):
        m = _TERM.match(part)
        if not m:
            raise ValueError(f"bad Laurent term {part!r}; expected exponent:coefficient")
        k, c = int(m.group(1)), int(m.group(2))
        coeffs[k] = coeffs.get(k, 0) + c
    return LaurentElement(p, coeffs)


def format_laurent(x: LaurentElement) -> str:
    if not x.coeffs:
        return "0"
    return ",".join(f"{k}:{c}" for k, c in sorted(x.coeffs.items()))


@dataclass(frozen=True)
class AswClass:
    witt: WittVector

    @property
    def p(self) -> int:
        return self.witt.p

    @property
    def n(self) -> int:
        return self.witt.n

    @classmethod
    def from_components(cls, p: int, components: Sequence) -> "AswClass":
        comps = [c if isinstance(c, LaurentElement) else LaurentElement(p, c) for c in components]
        for c in comps:
            if c.p != p:
                raise ValueError("component characteristic does not match p")
        return cls(WittVector(comps, p))

    def pole_orders(self) -> list:
        return [c.pole_order for c in self.witt.components]

    def __add__(self, other: "AswClass") -> "AswClass":
        return AswClass(self.witt + other.witt)

    def coboundary_shift(self, b: WittVector) -> "AswClass":
        """The representative a + (phi(b) - b) of the same class."""
        return AswClass(self.witt + (frobenius_charp(b) - b))


def _basis_vector(p: int, n: int, j: int, x: LaurentElement) -> WittVector:
    return WittVector([x if i == j else LaurentElement(p) for i in range(n)], p)


@dataclass(frozen=True)
class Normalization:
    cls: AswClass
    b: WittVector  # normalized = original - (phi(b) - b)
    steps: int


def normalize(a: AswClass) -> Normalization:
    """Remove leading poles of order divisible by p by coboundaries.

    Coordinates are handled in order j = 0, ..., n-1.  If a_j = c z^(-pm') + ...
    then subtracting phi(b) - b for b = V^j([c z^(-m')]) replaces that term
    by c z^(-m') and only changes coordinates >= j.  The leading pole order
    of a_j therefore strictly drops at each step, so coordinate j needs at
    most m_j steps and earlier coordinates are never disturbed.
    """
    p, n = a.p, a.n
    w = a.witt
    B = WittVector([LaurentElement(p)] * n, p)
    steps = 0
    for j in range(n):
        while True:
            aj = w.components[j]
            m = aj.pole_order
            if m == 0 or m % p:
                break
            _, c = aj.leading()
            b = _basis_vector(p, n, j, LaurentElement.monomial(p, -(m // p), c))
            w = w - (frobenius_charp(b) - b)
            B = B + b
            steps += 1
    return Normalization(AswClass(w), B, steps)


def is_normalized(a: AswClass) -> bool:
    return all(m == 0 or m % a.p for m in a.pole_orders())


def swan_conductor(a: AswClass, level: int | None = None) -> int:
    """Swan conductor of the character of p^(n - level) a (level defaults to n).

    Uses the first ``level`` coordinates of a normalized representative,
    which is the class of V^(n-level)(a) restricted to its last coordinates.
    """
    n = a.n
    level = n if level is None else level
    if not 1 <= level <= n:
        raise ValueError(f"level must lie in 1..{n}")
    if not is_normalized(a):
        a = normalize(a).cls
    p = a.p
    m = a.pole_orders()
    return max([0] + [m[j] * p ** (level - 1 - j) for j in range(level)])


def conductor_chain(a: AswClass) -> list:
    """b_1, ..., b_n."""
    return [swan_conductor(a, i) for i in range(1, a.n + 1)]


def step_bound(m0: int, n: int, p: int) -> float:
    """Generous cap on normalization steps for a class with leading pole m0."""
    m0 = max(m0, p)
    return m0 * n * math.log(m0, p) + 2 * n


def hasse_arf_polygon(breaks: Sequence) -> Polygon:
    """Concave polygon with slope s of multiplicity d for each (s, d)."""
    seen = set()
    slope_list = []
    for s, d in breaks:
        s = to_fraction(s)
        if s < 0:
            raise ValueError(f"negative slope {s}")
        if d < 1 or int(d) != d:
            raise ValueError(f"multiplicity must be a positive integer, got {d}")
        if s in seen:
            raise ValueError(f"slope {s} listed twice")
        seen.add(s)
        slope_list.extend([s] * int(d))
    slope_list.sort(reverse=True)
    return concave_from_slopes(slope_list)
