from __future__ import annotations

import random
from fractions import Fraction

import pytest

from convpoly import gallery
from convpoly.gallery import GalleryEntry, PointPosition
from convpoly.numerics import INF
from convpoly.skeleton import check_inequalities, global_index, index_report


def c_piece(p, m, w):
    """The middle case of c/log p for w in [m, m + 1]."""
    pm = Fraction(p) ** m
    return -(pm - 1) / ((p - 1) * pm) + (m - w) / (pm * p)


def test_pth_root_example():
    assert gallery.eval(gallery.pth_root(3), 0).slopes == (Fraction(3, 2),)


def test_laurent_third_order_example():
    P = gallery.eval(gallery.laurent_third_order(), -2)
    assert P.slopes == (2, -1, -1)
    assert P.total_height == 0


def test_log_parameter_reduces_to_pth_root():
    for p in (2, 3, 5):
        for v in (Fraction(-3), Fraction(0), Fraction(1, 2), Fraction(4)):
            assert gallery.eval(gallery.log_parameter(p, -1), v) == gallery.eval(gallery.pth_root(p), v)
    assert gallery.eval(gallery.log_parameter(2, -1), 0).slopes == (2,)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_constant_entries(p):
    t = Fraction(1, p - 1)
    assert gallery.eval(gallery.exponential(p), 7).slopes == (t,)
    assert gallery.eval(gallery.add_pole(p), -1).slopes == (t,)
    assert gallery.eval(gallery.add_pole(p), 2).slopes == (max(t, 2),)


def test_bessel_and_hypergeometric_double_slopes():
    assert gallery.eval(gallery.bessel(3), 0).slopes == (Fraction(1, 2), Fraction(1, 2))
    assert gallery.eval(gallery.bessel(5), 3).slopes == (3, 3)
    H = gallery.hypergeometric(5)
    assert gallery.eval(H, PointPosition(1, 0)).slopes == (1, 1)
    assert gallery.eval(H, PointPosition(0, 2)).slopes == (2, 2)
    assert gallery.eval(H, PointPosition(0, 0)).slopes == (0, 0)


def test_exponential2_formula():
    E = gallery.exponential2(3, 2)
    assert gallery.eval(E, 0).slopes == (Fraction(1, 2),)
    assert gallery.eval(E, 1).slopes == (Fraction(1, 4),)
    assert gallery.eval(E, -1).slopes == (Fraction(3, 2),)


def test_incompatible_inputs_rejected():
    with pytest.raises(ValueError):
        GalleryEntry("laurent-third-order", 3)
    with pytest.raises(ValueError):
        gallery.bessel(2)
    with pytest.raises(ValueError):
        gallery.exponential2(3, 3)
    with pytest.raises(ValueError):
        GalleryEntry("spiral", 3)
    with pytest.raises(ValueError):
        PointPosition(1, 1)
    with pytest.raises(ValueError):
        gallery.eval(gallery.hypergeometric(3), 0)
    with pytest.raises(ValueError):
        gallery.eval(gallery.bessel(3), PointPosition(0, 1))
    # away from v(x) = 0 the second coordinate is forced
    assert gallery.position(gallery.hypergeometric(3), 2) == PointPosition(2, 0)
    assert gallery.position(gallery.hypergeometric(3), -2) == PointPosition(-2, -2)


def test_robba_examples():
    assert gallery.robba_condition(gallery.add_pole(2), 1)
    assert not gallery.robba_condition(gallery.add_pole(2), 0)
    for v in (-2, 0, 1, 5):
        assert not gallery.robba_condition(gallery.pth_root(3), v)
    assert gallery.robba_condition(gallery.hypergeometric(3), PointPosition(0, 0))
    assert not gallery.robba_condition(gallery.exponential(3), 0)
    with pytest.raises(ValueError):
        gallery.robba_condition(gallery.laurent_third_order(), 0)


def test_robba_matches_independent_geometry():
    rng = random.Random(21)
    kinds = ["add-pole", "pth-root", "bessel", "log-parameter", "hypergeometric", "exponential", "exponential2"]
    for _ in range(50):
        kind = rng.choice(kinds)
        p = rng.choice([3, 5])
        entry = GalleryEntry(kind, p, a=2 if kind == "exponential2" else None, w=Fraction(rng.randint(-3, 6), 2) if kind == "log-parameter" else None)
        v = Fraction(rng.randint(-8, 8), rng.choice([1, 2, 4]))
        if kind == "hypergeometric":
            pos = PointPosition(v, 0) if v > 0 else PointPosition(v, v) if v < 0 else PointPosition(0, abs(v) + 1)
            dist = max(pos.v_x, pos.v_x_minus_1)
        else:
            pos = PointPosition(v)
            dist = None if kind in ("exponential", "exponential2") else v
        s1 = gallery.eval(entry, pos).slopes[0]
        assert gallery.robba_condition(entry, pos) == (dist is not None and s1 == dist)


def test_branch_locus_examples():
    assert not gallery.normalized_diameter_branch_locus(2, 3)
    assert gallery.normalized_diameter_branch_locus(2, 2)
    assert gallery.normalized_diameter_branch_locus(3, 0)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_c_norm_continuous_at_case_boundaries(p):
    assert gallery.c_norm(0, p) == 0 == c_piece(p, 0, 0)
    for m in range(0, 5):
        assert c_piece(p, m, m + 1) == c_piece(p, m + 1, m + 1)
        assert gallery.c_norm(m + 1, p) == c_piece(p, m + 1, m + 1)
        mid = m + Fraction(1, 3)
        assert gallery.c_norm(mid, p) == c_piece(p, m, mid)
    assert gallery.c_norm(-2, p) == 2


@pytest.mark.parametrize("p", [2, 3, 5])
def test_c_norm_limit(p):
    assert abs(gallery.c_norm(50, p) + Fraction(1, p - 1)) < Fraction(1, p ** 40)
    assert gallery.c_norm(INF, p) == Fraction(-1, p - 1)


@pytest.mark.parametrize(
    "entry,branch",
    [
        (gallery.exponential(3), "0"),
        (gallery.add_pole(2), "0"),
        (gallery.pth_root(3), "0"),
        (gallery.bessel(5), "0"),
        (gallery.log_parameter(3, Fraction(5, 2)), "0"),
        (gallery.exponential2(3, 2), "0"),
        (gallery.laurent_third_order(), "0"),
        (gallery.hypergeometric(3), "0"),
        (gallery.hypergeometric(3), "1"),
    ],
)
def test_integral_derivative_along_paths(entry, branch):
    lo = 0 if branch == "1" else -4
    assert gallery.integral_derivative_along_path(entry, lo, 4, branch)


def test_path_skeleton_index():
    G, F = gallery.skeleton_on_path(gallery.add_pole(2), [3, 1, 0, -2])
    assert G.vertices["inf"].irr == 1
    assert G.vertices["z0"].irr == 0
    assert global_index(G, F) == -1
    assert check_inequalities(G, F) == []
    assert index_report(G, F).passed


def test_sample_points_realise_positions():
    assert gallery.sample_point(gallery.pth_root(3), 2) == 9
    assert gallery.sample_point(gallery.hypergeometric(5), PointPosition(0, 2)) == 26
    with pytest.raises(ValueError):
        gallery.sample_point(gallery.pth_root(3), Fraction(1, 2))
