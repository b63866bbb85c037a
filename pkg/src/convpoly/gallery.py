"""Closed-form convergence polygons for a small gallery of equations.

Positions are given by valuations: ``v_x = v(x)`` and, for the
hypergeometric equation, ``v_x_minus_1 = v(x - 1)``.  Slopes are in log-p
units (natural-log units when p = 0).
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .numerics import INF, to_fraction
from .ode_engine import INFINITY, OdeProblem, RationalFunction
from .polygon import AffinePolygonFamily, Polygon, concave_from_slopes, has_integral_derivative

KINDS = (
    "exponential",
    "add-pole",
    "pth-root",
    "bessel",
    "log-parameter",
    "exponential2",
    "laurent-third-order",
    "hypergeometric",
)

PATHS = {
    "exponential": "constant on U",
    "add-pole": "retraction onto the path from 0 to infinity",
    "pth-root": "retraction onto the path from 0 to infinity",
    "bessel": "retraction onto the path from 0 to infinity",
    "log-parameter": "retraction onto the path from 0 to infinity",
    "exponential2": "retraction onto the path from the Gauss point of radius p^(-1/(p-1)) to infinity",
    "laurent-third-order": "retraction onto the path from the Gauss point of radius 1 to infinity",
    "hypergeometric": "retraction onto the union of the paths from 0 and from 1 to infinity",
}


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p ** 0.5) + 1))


@dataclass(frozen=True)
class GalleryEntry:
    kind: str
    p: int
    a: int | None = None  # exponent for exponential2
    w: object = None  # -log_p of the distance from lambda to Z_p (Fraction or INF)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown gallery entry {self.kind!r}; choose from {', '.join(KINDS)}")
        if self.kind == "laurent-third-order":
            if self.p != 0:
                raise ValueError("the third-order Laurent example lives in residue characteristic 0")
        elif not _is_prime(self.p):
            raise ValueError(f"residue characteristic {self.p} is not prime")
        if self.kind in ("bessel", "hypergeometric") and self.p == 2:
            raise ValueError(f"{self.kind} needs p > 2")
        if self.kind == "exponential2":
            if self.a is None or self.a < 1 or self.a % self.p == 0:
                raise ValueError("exponential2 needs a positive exponent a prime to p")
        if self.kind == "log-parameter":
            if self.w is None:
                raise ValueError("log-parameter needs the datum w")
            if self.w != INF:
                object.__setattr__(self, "w", to_fraction(self.w))

    @property
    def rank(self) -> int:
        return {"bessel": 2, "hypergeometric": 2, "laurent-third-order": 3}.get(self.kind, 1)

    @property
    def finite_singular(self) -> tuple:
        if self.kind in ("exponential", "exponential2", "laurent-third-order"):
            return ()
        if self.kind == "hypergeometric":
            return (Fraction(0), Fraction(1))
        return (Fraction(0),)

    @property
    def singular(self) -> tuple:
        return self.finite_singular + (INFINITY,)

    @property
    def retraction_path(self) -> str:
        return PATHS[self.kind]


def exponential(p):
    return GalleryEntry("exponential", p)


def add_pole(p):
    return GalleryEntry("add-pole", p)


def pth_root(p):
    return GalleryEntry("pth-root", p)


def bessel(p):
    return GalleryEntry("bessel", p)


def log_parameter(p, w):
    return GalleryEntry("log-parameter", p, w=w)


def exponential2(p, a):
    return GalleryEntry("exponential2", p, a=a)


def laurent_third_order():
    return GalleryEntry("laurent-third-order", 0)


def hypergeometric(p):
    return GalleryEntry("hypergeometric", p)


@dataclass(frozen=True)
class PointPosition:
    v_x: Fraction
    v_x_minus_1: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "v_x", to_fraction(self.v_x))
        if self.v_x_minus_1 is not None:
            v1 = to_fraction(self.v_x_minus_1)
            object.__setattr__(self, "v_x_minus_1", v1)
            v = self.v_x
            ok = (v > 0 and v1 == 0) or (v < 0 and v1 == v) or (v == 0 and v1 >= 0)
            if not ok:
                raise ValueError(f"valuations v(x)={v}, v(x-1)={v1} are not ultrametrically consistent")


def _position(entry: GalleryEntry, pos) -> PointPosition:
    if not isinstance(pos, PointPosition):
        pos = PointPosition(pos)
    if entry.kind == "hypergeometric":
        if pos.v_x_minus_1 is None:
            if pos.v_x == 0:
                raise ValueError("hypergeometric positions with v(x) = 0 need v(x-1)")
            pos = PointPosition(pos.v_x, 0 if pos.v_x > 0 else pos.v_x)
    elif pos.v_x_minus_1 is not None:
        raise ValueError(f"{entry.kind} positions take only v(x)")
    return pos


position = _position


def c_norm(w, p: int) -> Fraction:
    """The constant c / log p of the logarithmic-parameter example.

    On an overlap w = m + 1 both cases agree; the endpoint is assigned to the
    smaller m.
    """
    if w == INF:
        return Fraction(-1, p - 1)
    w = to_fraction(w)
    if w <= 0:
        return -w
    m = int(w) - 1 if w.denominator == 1 else int(w)  # w in (m, m + 1]
    pm = p ** m
    return -Fraction(pm - 1, (p - 1) * pm) + (m - w) / (pm * p)


def slopes_at(entry: GalleryEntry, pos) -> list:
    pos = _position(entry, pos)
    v, p, k = pos.v_x, entry.p, entry.kind
    if k == "laurent-third-order":
        return [max(Fraction(0), -v), min(Fraction(0), v / 2), min(Fraction(0), v / 2)]
    t = Fraction(1, p - 1)
    if k == "exponential":
        return [t]
    if k == "add-pole":
        return [max(v, t)]
    if k == "pth-root":
        return [Fraction(p, p - 1) + v]
    if k == "bessel":
        s = max(v, t)
        return [s, s]
    if k == "log-parameter":
        return [c_norm(entry.w, p) + t + v]
    if k == "exponential2":
        a = entry.a
        return [max(t - (a - 1) * v, Fraction(1, a * (p - 1)))]
    if k == "hypergeometric":
        s = max(v, pos.v_x_minus_1)
        return [s, s]
    raise AssertionError(k)


def eval(entry: GalleryEntry, pos) -> Polygon:  # noqa: A001 - mirrors the operation name
    return concave_from_slopes(slopes_at(entry, pos))


evaluate = eval


def distance_valuation(entry: GalleryEntry, pos):
    """v of the distance from x to the finite part of Z (-inf when Z = {inf})."""
    pos = _position(entry, pos)
    if not entry.finite_singular:
        return -INF
    if entry.kind == "hypergeometric":
        return max(pos.v_x, pos.v_x_minus_1)
    return pos.v_x


def robba_condition(entry: GalleryEntry, pos) -> bool:
    """True iff the first radius equals the distance to Z.

    With Z = {inf} that distance is infinite and the condition never holds.
    """
    if entry.p == 0:
        raise ValueError("the Robba condition is only considered for p > 0")
    d = distance_valuation(entry, pos)
    if d == -INF:
        return False
    return slopes_at(entry, pos)[0] == d


def normalized_diameter_branch_locus(p: int, diameter_valuation) -> bool:
    if p < 2:
        raise ValueError("need p > 0")
    return to_fraction(diameter_valuation) <= Fraction(p, p - 1)


def ode_problem(entry: GalleryEntry) -> OdeProblem:
    """The differential equation behind an entry, for the numeric cross-check."""
    p, k = entry.p, entry.kind
    if k in ("exponential", "add-pole"):
        coeffs = (RationalFunction.poly([-1]),)
    elif k == "pth-root":
        coeffs = (RationalFunction([Fraction(-1, p)], [0, 1]),)
    elif k == "bessel":
        coeffs = (RationalFunction.poly([1]), RationalFunction([1], [0, 1]))
    elif k == "exponential2":
        a = entry.a
        coeffs = (RationalFunction.poly([0] * (a - 1) + [-a]),)
    elif k == "hypergeometric":
        den = [0, 1, -1]  # z(1 - z)
        coeffs = (RationalFunction([Fraction(-1, 4)], den), RationalFunction([1, -2], den))
    else:
        raise ValueError(f"no rational equation is attached to {k}")
    return OdeProblem(coeffs, entry.singular, p, name=k)


def sample_point(entry: GalleryEntry, pos) -> Fraction:
    """A rational x realising the position (x = p^v, or 1 + p^w near 1)."""
    pos = _position(entry, pos)
    p = entry.p
    v = pos.v_x
    if v.denominator != 1:
        raise ValueError("rational points have integral valuation")
    if entry.kind == "hypergeometric" and pos.v_x == 0:
        w = pos.v_x_minus_1
        if w.denominator != 1:
            raise ValueError("rational points have integral valuation")
        return Fraction(2) if w == 0 else 1 + Fraction(p) ** int(w)
    return Fraction(p) ** int(v)


# -- retraction paths and affine pieces ------------------------------------


def path_position(entry: GalleryEntry, t, branch: str = "0") -> PointPosition:
    """Position at parameter t along the retraction path.

    For the hypergeometric entry, branch "0" runs from 0 to infinity (t = v(x))
    and branch "1" runs from 1 towards the Gauss point (t = v(x - 1) >= 0).
    """
    t = to_fraction(t)
    if entry.kind == "hypergeometric":
        if branch == "1":
            if t < 0:
                raise ValueError("branch 1 needs t >= 0")
            return PointPosition(0, t)
        return PointPosition(t, 0 if t >= 0 else t)
    return PointPosition(t)


def breakpoints(entry: GalleryEntry) -> list:
    p = entry.p
    if entry.kind == "laurent-third-order":
        return [Fraction(0)]
    cands = {Fraction(0), Fraction(1, p - 1)}
    if entry.kind == "exponential2":
        cands.add(Fraction(1, entry.a * (p - 1)))
    return sorted(cands)


def affine_pieces(entry: GalleryEntry, lo, hi, branch: str = "0") -> list:
    """Split [lo, hi] at the breakpoints and return one affine family per piece."""
    lo, hi = to_fraction(lo), to_fraction(hi)
    cuts = [lo] + [b for b in breakpoints(entry) if lo < b < hi] + [hi]
    pieces = []
    for a, b in zip(cuts, cuts[1:]):
        Na, Nb = eval(entry, path_position(entry, a, branch)), eval(entry, path_position(entry, b, branch))
        fam = AffinePolygonFamily.through(a, Na, b, Nb, a, b)
        for q in (Fraction(1, 4), Fraction(1, 2), Fraction(3, 4)):
            t = a + q * (b - a)
            if fam.at(t) != eval(entry, path_position(entry, t, branch)):
                raise AssertionError(f"{entry.kind} is not affine on [{a}, {b}]")
        pieces.append(fam)
    return pieces


def integral_derivative_along_path(entry: GalleryEntry, lo, hi, branch: str = "0") -> bool:
    return all(has_integral_derivative(f) for f in affine_pieces(entry, lo, hi, branch))


def normalized(entry: GalleryEntry, pos) -> Polygon:
    """Heights relative to the largest disc in U: h_i - i * v(dist to Z)."""
    d = distance_valuation(entry, pos)
    if d == -INF:
        raise ValueError("normalisation needs a finite singular point")
    s = slopes_at(entry, pos)
    return Polygon.from_slopes([si - d for si in s])


def skeleton_on_path(entry: GalleryEntry, valuations: Sequence):
    """Build a path skeleton 0 -- ... -- infinity with normalised polygon values.

    ``valuations`` are v(x) at the vertices in decreasing order; the first and
    last vertices stand in for 0 and infinity and must lie beyond every
    breakpoint.  Irregularities are read off the pendant derivatives.
    """
    from .skeleton import Edge, PolygonFunction, SkeletonGraph, Vertex

    if entry.finite_singular != (Fraction(0),):
        raise ValueError("path skeleta are built for Z = {0, infinity}")
    vs = [to_fraction(v) for v in valuations]
    if len(vs) < 3 or any(a <= b for a, b in zip(vs, vs[1:])):
        raise ValueError("need at least three strictly decreasing valuations")
    ids = ["z0"] + [f"v{i}" for i in range(1, len(vs) - 1)] + ["inf"]
    values = {i: normalized(entry, v) for i, v in zip(ids, vs)}
    edges = [Edge(a, b, vs[k] - vs[k + 1]) for k, (a, b) in enumerate(zip(ids, ids[1:]))]

    def irr(end, nxt, length):
        d = (values[nxt] - values[end]).scale(1 / length)
        if d.total_height.denominator != 1:
            raise ValueError(f"pendant derivative at {end} is not integral; move the end vertex outwards")
        return int(-d.total_height)

    vertices = [Vertex("z0", "marked-Z", irr=irr("z0", ids[1], edges[0].length))]
    vertices += [Vertex(i, "interior") for i in ids[1:-1]]
    vertices.append(Vertex("inf", "infinity", irr=irr("inf", ids[-2], edges[-1].length)))
    G = SkeletonGraph(vertices, edges, genus=0, rank=entry.rank)
    return G, PolygonFunction(G, values)
