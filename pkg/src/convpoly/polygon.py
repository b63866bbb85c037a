"""Polygons on [0, n] stored by their heights h_1, ..., h_n (h_0 = 0)."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .numerics import format_rational, to_fraction


@dataclass(frozen=True)
class Polygon:
    heights: tuple

    def __post_init__(self):
        object.__setattr__(self, "heights", tuple(to_fraction(h) for h in self.heights))

    @classmethod
    def from_heights(cls, heights: Sequence) -> "Polygon":
        return cls(tuple(heights))

    @classmethod
    def from_slopes(cls, slopes: Sequence) -> "Polygon":
        hs, acc = [], Fraction(0)
        for s in slopes:
            acc += to_fraction(s)
            hs.append(acc)
        return cls(tuple(hs))

    @classmethod
    def zero(cls, n: int) -> "Polygon":
        return cls((Fraction(0),) * n)

    @property
    def n(self) -> int:
        return len(self.heights)

    def height(self, i: int) -> Fraction:
        """N(i), with N(0) = 0."""
        return Fraction(0) if i == 0 else self.heights[i - 1]

    @property
    def total_height(self) -> Fraction:
        return self.heights[-1] if self.heights else Fraction(0)

    @property
    def slopes(self) -> tuple:
        return slopes(self)

    def is_concave(self) -> bool:
        s = self.slopes
        return all(s[i] >= s[i + 1] for i in range(len(s) - 1))

    def __add__(self, other: "Polygon") -> "Polygon":
        _same_width(self, other)
        return Polygon(tuple(a + b for a, b in zip(self.heights, other.heights)))

    def __sub__(self, other: "Polygon") -> "Polygon":
        _same_width(self, other)
        return Polygon(tuple(a - b for a, b in zip(self.heights, other.heights)))

    def __neg__(self) -> "Polygon":
        return Polygon(tuple(-a for a in self.heights))

    def scale(self, c) -> "Polygon":
        c = to_fraction(c)
        return Polygon(tuple(c * a for a in self.heights))

    def __le__(self, other: "Polygon") -> bool:
        """Pointwise comparison of heights."""
        _same_width(self, other)
        return all(a <= b for a, b in zip(self.heights, other.heights))

    def is_zero(self) -> bool:
        return all(h == 0 for h in self.heights)

    def __str__(self):
        return "(" + ", ".join(format_rational(h) for h in self.heights) + ")"


def _same_width(a: Polygon, b: Polygon):
    if a.n != b.n:
        raise ValueError(f"polygon widths differ: {a.n} vs {b.n}")


def slopes(P: Polygon) -> tuple:
    hs = (Fraction(0),) + P.heights
    return tuple(hs[i] - hs[i - 1] for i in range(1, len(hs)))


def ConcavePolygon(heights: Sequence) -> Polygon:
    """Build a polygon and insist on nonincreasing slopes."""
    P = Polygon(tuple(heights))
    if not P.is_concave():
        raise ValueError(f"polygon {P} is not concave (slopes {[str(s) for s in P.slopes]})")
    return P


def concave_from_slopes(slope_list: Sequence) -> Polygon:
    P = Polygon.from_slopes(slope_list)
    if not P.is_concave():
        raise ValueError(f"slopes {list(slope_list)} are not nonincreasing")
    return P


@dataclass(frozen=True)
class AffinePolygonFamily:
    """N(t) = base + t * slope_polygon for t in [t_lo, t_hi].

    Either end of the interval may be ``None`` for an unbounded ray.
    """

    base: Polygon
    slope_polygon: Polygon
    t_lo: Fraction | None
    t_hi: Fraction | None

    def __post_init__(self):
        _same_width(self.base, self.slope_polygon)
        for name in ("t_lo", "t_hi"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, to_fraction(v))
        if self.t_lo is not None and self.t_hi is not None and self.t_lo >= self.t_hi:
            raise ValueError("empty parameter interval")

    @classmethod
    def through(cls, t0, N0: Polygon, t1, N1: Polygon, t_lo=None, t_hi=None) -> "AffinePolygonFamily":
        """The affine family taking the value N0 at t0 and N1 at t1."""
        t0, t1 = to_fraction(t0), to_fraction(t1)
        d = (N1 - N0).scale(1 / (t1 - t0))
        base = N0 - d.scale(t0)
        return cls(base, d, t_lo, t_hi)

    @property
    def n(self) -> int:
        return self.base.n

    def at(self, t) -> Polygon:
        t = to_fraction(t)
        return self.base + self.slope_polygon.scale(t)

    def _slope_forms(self):
        """Each slope s_i(t) as a pair (alpha, beta) meaning alpha + beta t."""
        return list(zip(slopes(self.base), slopes(self.slope_polygon)))

    def _interior_sign(self, alpha, beta):
        """Sign of alpha + beta t on the open interval: +1, 0 or -1, or None if it changes."""
        lo, hi = self.t_lo, self.t_hi
        if beta == 0:
            return (alpha > 0) - (alpha < 0)
        # a nonconstant affine form is nonzero on the open interval iff its root is outside
        root = -alpha / beta
        inside = (lo is None or root > lo) and (hi is None or root < hi)
        if inside:
            return None
        sample = _interior_point(lo, hi)
        v = alpha + beta * sample
        return (v > 0) - (v < 0)

    def is_concave_valued(self) -> bool:
        forms = self._slope_forms()
        for (a1, b1), (a2, b2) in zip(forms, forms[1:]):
            sign = self._interior_sign(a1 - a2, b1 - b2)
            if sign is None or sign < 0:
                return False
        return True

    def persistent_slope_changes(self) -> list:
        """Interior indices i (1 <= i < n) where s_i(t) > s_{i+1}(t) for every interior t."""
        forms = self._slope_forms()
        out = []
        for i, ((a1, b1), (a2, b2)) in enumerate(zip(forms, forms[1:]), start=1):
            # s_i - s_{i+1} is affine; being concave it is >= 0, so it is
            # positive throughout unless it vanishes identically or at one point.
            alpha, beta = a1 - a2, b1 - b2
            if beta == 0:
                if alpha > 0:
                    out.append(i)
            else:
                root = -alpha / beta
                lo, hi = self.t_lo, self.t_hi
                if not ((lo is None or root > lo) and (hi is None or root < hi)):
                    # positive on the open interval (zero at most at an endpoint)
                    out.append(i)
        return out


def _interior_point(lo, hi) -> Fraction:
    if lo is None and hi is None:
        return Fraction(0)
    if lo is None:
        return hi - 1
    if hi is None:
        return lo + 1
    return (lo + hi) / 2


def has_integral_derivative(F: AffinePolygonFamily) -> bool:
    if not F.is_concave_valued():
        raise ValueError("family is not concave-valued on the interior of its interval")
    N1 = F.slope_polygon
    if N1.total_height.denominator != 1:
        return False
    return all(N1.height(i).denominator == 1 for i in F.persistent_slope_changes())
