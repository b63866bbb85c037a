from __future__ import annotations

import random
from fractions import Fraction

import pytest

from convpoly.polygon import (
    AffinePolygonFamily,
    ConcavePolygon,
    Polygon,
    concave_from_slopes,
    has_integral_derivative,
    slopes,
)


def rand_q(rng):
    return Fraction(rng.randint(-20, 20), rng.randint(1, 6))


def test_zero_polygon_slopes():
    assert slopes(Polygon.from_heights([0, 0])) == (0, 0)
    assert Polygon.zero(3).is_zero()


def test_slopes_by_definition():
    P = Polygon.from_heights([2, 3])
    assert P.slopes == (2, 1)
    assert P.is_concave()


def test_increasing_slopes_not_concave():
    P = Polygon.from_heights([1, 3])
    assert P.slopes == (1, 2)
    assert not P.is_concave()
    with pytest.raises(ValueError):
        ConcavePolygon([1, 3])
    with pytest.raises(ValueError):
        concave_from_slopes([1, 2])


def test_height_at_zero_is_zero():
    P = Polygon.from_heights(["1/2", 4])
    assert P.height(0) == 0
    assert P.height(1) == Fraction(1, 2)
    assert P.total_height == 4
    assert str(P) == "(1/2, 4)"


def test_round_trips():
    rng = random.Random(11)
    for _ in range(200):
        n = rng.randint(1, 7)
        hs = [rand_q(rng) for _ in range(n)]
        ss = [rand_q(rng) for _ in range(n)]
        assert Polygon.from_heights(hs).heights == tuple(hs)
        assert Polygon.from_slopes(ss).slopes == tuple(ss)


def test_concavity_matches_pairwise_check():
    rng = random.Random(12)
    for _ in range(200):
        n = rng.randint(1, 6)
        P = Polygon.from_heights([rand_q(rng) for _ in range(n)])
        hs = [Fraction(0)] + list(P.heights)
        pairwise = all(hs[i] - hs[i - 1] >= hs[i + 1] - hs[i] for i in range(1, n))
        assert P.is_concave() == pairwise


def test_sum_of_slopes_is_total_height():
    rng = random.Random(13)
    for _ in range(100):
        P = Polygon.from_heights([rand_q(rng) for _ in range(rng.randint(1, 6))])
        assert sum(P.slopes) == P.total_height


def test_arithmetic_and_width_mismatch():
    A = Polygon.from_heights([1, 2])
    B = Polygon.from_heights([0, 1])
    assert A - B == Polygon.from_heights([1, 1])
    assert (A + B).scale(2) == Polygon.from_heights([2, 6])
    assert B <= A
    with pytest.raises(ValueError):
        A + Polygon.zero(3)


def test_integral_derivative_only_total_checked():
    # width one: no interior index, only N_1(n) = 1 matters
    F = AffinePolygonFamily(Polygon.from_heights([0]), Polygon.from_heights([1]), 0, 1)
    assert F.persistent_slope_changes() == []
    assert has_integral_derivative(F)
    G = AffinePolygonFamily(Polygon.from_heights([1, 1]), Polygon.from_heights([0, 1]), 0, 1)
    assert G.is_concave_valued()
    assert G.persistent_slope_changes() == [1]
    assert has_integral_derivative(G)
    # N_1 slopes (0, 1) with a flat base are increasing, so concavity fails for t > 0
    assert not AffinePolygonFamily(Polygon.zero(2), Polygon.from_heights([0, 1]), 0, 1).is_concave_valued()


def test_integral_derivative_fails_at_mandatory_vertex():
    F = AffinePolygonFamily(Polygon.from_heights([2, 2]), Polygon.from_heights(["1/2", 1]), 0, 1)
    assert F.persistent_slope_changes() == [1]
    assert not has_integral_derivative(F)


def test_integral_derivative_without_interior_vertices():
    # straight lines for all t: vertices only at lattice points is not required
    F = AffinePolygonFamily(Polygon.from_heights([0, 0]), Polygon.from_heights(["1/2", 1]), 0, 1)
    assert F.persistent_slope_changes() == []
    assert has_integral_derivative(F)


def test_slope_change_vanishing_at_endpoint_is_persistent():
    # s_1 - s_2 = 1 - 2t vanishes only at the endpoint t = 1/2 of [0, 1/2]
    F = AffinePolygonFamily(Polygon.from_heights([1, 1]), Polygon.from_heights([-2, -2]), 0, Fraction(1, 2))
    assert F.persistent_slope_changes() == [1]
    H = AffinePolygonFamily(Polygon.from_heights([1, 1]), Polygon.from_heights([-2, -2]), 0, 1)
    assert not H.is_concave_valued()


def test_non_concave_family_rejected():
    F = AffinePolygonFamily(Polygon.from_heights([1, 3]), Polygon.from_heights([0, 0]), 0, 1)
    with pytest.raises(ValueError):
        has_integral_derivative(F)


def test_through_two_points():
    N0 = Polygon.from_heights([1, 1])
    N1 = Polygon.from_heights([2, 3])
    F = AffinePolygonFamily.through(1, N0, 3, N1, 1, 3)
    assert F.at(1) == N0 and F.at(3) == N1
    assert F.slope_polygon == Polygon.from_heights(["1/2", 1])


def test_empty_interval_rejected():
    with pytest.raises(ValueError):
        AffinePolygonFamily(Polygon.zero(1), Polygon.zero(1), 1, 1)
