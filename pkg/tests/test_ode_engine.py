from __future__ import annotations

import math
import random
from fractions import Fraction

import pytest

from convpoly import gallery
from convpoly.ode_engine import (
    INFINITY,
    NoFiniteRadius,
    OdeProblem,
    RationalFunction,
    SingularPointError,
    estimate_polygon,
    estimate_s1,
    residual,
    solve_series,
)


def exp_problem(p):
    return OdeProblem((RationalFunction.poly([-1]),), (INFINITY,), p, "exp")


def root_problem(p):
    return OdeProblem((RationalFunction([Fraction(-1, p)], [0, 1]),), (0, INFINITY), p, "root")


def digit_sum(k, p):
    s = 0
    while k:
        s += k % p
        k //= p
    return s


def binom(alpha: Fraction, k: int) -> Fraction:
    out = Fraction(1)
    for j in range(k):
        out = out * (alpha - j) / (j + 1)
    return out


def test_exponential_series():
    sol = solve_series(exp_problem(2), 0, [1], 6)
    assert sol.coefficients == tuple(Fraction(1, math.factorial(k)) for k in range(6))


def test_binomial_series_example():
    sol = solve_series(root_problem(2), 1, [1], 3)
    assert sol.coefficients == (1, Fraction(1, 2), Fraction(-1, 8))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_root_series_matches_binomial_coefficients(p):
    sol = solve_series(root_problem(p), 1, [1], 30)
    assert list(sol.coefficients) == [binom(Fraction(1, p), k) for k in range(30)]


def test_zero_init_gives_zero_solution():
    prob = gallery.ode_problem(gallery.bessel(3))
    sol = solve_series(prob, 1, [0, 0], 40)
    assert not any(sol.coefficients)


@pytest.mark.parametrize("kind,x", [("bessel", 1), ("hypergeometric", 3), ("pth-root", 5)])
def test_recurrence_residual_vanishes(kind, x):
    prob = gallery.ode_problem(gallery.GalleryEntry(kind, 5))
    rng = random.Random(1)
    init = [Fraction(rng.randint(-5, 5), rng.randint(1, 4)) for _ in range(prob.order)]
    sol = solve_series(prob, x, init, 60)
    assert sol.coefficients[: prob.order] == tuple(init)
    assert all(r == 0 for r in residual(prob, sol))


def test_solution_map_is_linear_and_injective():
    prob = gallery.ode_problem(gallery.hypergeometric(3))
    x, N = Fraction(2), 50
    e1 = solve_series(prob, x, [1, 0], N).coefficients
    e2 = solve_series(prob, x, [0, 1], N).coefficients
    rng = random.Random(5)
    for _ in range(10):
        a, b = Fraction(rng.randint(-9, 9), rng.randint(1, 5)), Fraction(rng.randint(-9, 9), rng.randint(1, 5))
        got = solve_series(prob, x, [a, b], N).coefficients
        assert list(got) == [a * u + b * v for u, v in zip(e1, e2)]
        if a or b:
            assert any(got)


def test_singular_point_rejected():
    with pytest.raises(SingularPointError):
        solve_series(root_problem(3), 0, [1], 10)
    prob = gallery.ode_problem(gallery.hypergeometric(3))
    with pytest.raises(SingularPointError):
        solve_series(prob, 1, [1, 0], 10)


def test_poles_outside_singular_set_rejected():
    with pytest.raises(ValueError):
        OdeProblem((RationalFunction([1], [0, 1]),), (INFINITY,), 3)
    with pytest.raises(ValueError):
        OdeProblem((RationalFunction.poly([1]),), (0,), 3)


def test_entire_solutions_report_no_radius():
    prob = OdeProblem((RationalFunction.poly([0]),), (INFINITY,), 3, "y' = 0")
    with pytest.raises(NoFiniteRadius):
        estimate_s1(prob, 0, 64)


def test_small_N_rejected():
    with pytest.raises(ValueError):
        estimate_s1(exp_problem(2), 0, 32)


@pytest.mark.parametrize("p", [2, 3])
def test_exponential_estimate_matches_legendre(p):
    N = 512
    est = estimate_s1(exp_problem(p), 0, N)
    # v(1/k!) = -(k - s_p(k)) / (p - 1) by Legendre
    oracle = max(Fraction(k - digit_sum(k, p), (p - 1) * k) for k in range(N // 2, N))
    assert est == oracle
    assert abs(est - Fraction(1, p - 1)) <= Fraction(5, 100)


def test_pth_root_estimate():
    assert abs(estimate_s1(root_problem(3), 1, 512) - Fraction(3, 2)) <= Fraction(5, 100)


def test_bessel_estimate():
    prob = gallery.ode_problem(gallery.bessel(3))
    assert abs(estimate_s1(prob, 1, 512) - Fraction(1, 2)) <= Fraction(8, 100)


def test_rank_one_polygon_is_single_slope():
    est = estimate_polygon(root_problem(3), 1, 256)
    assert est.polygon.n == 1
    assert est.labels == {"s_1": "certified-heuristic"}


def test_bessel_polygon_both_slopes():
    est = estimate_polygon(gallery.ode_problem(gallery.bessel(3)), 1, 512)
    assert all(abs(s - Fraction(1, 2)) <= Fraction(8, 100) for s in est.polygon.slopes)
    assert est.labels["s_2"] == "heuristic"


def test_hypergeometric_polygon_both_slopes():
    est = estimate_polygon(gallery.ode_problem(gallery.hypergeometric(5)), 5, 512)
    assert all(abs(s - 1) <= Fraction(8, 100) for s in est.polygon.slopes)


def test_base_change_by_unit():
    prob = gallery.ode_problem(gallery.bessel(3))
    a = estimate_s1(prob, 3, 384)
    b = estimate_s1(prob, 3 * 2, 384)
    assert abs(a - b) <= Fraction(5, 100)


def test_estimates_are_deterministic():
    prob = gallery.ode_problem(gallery.bessel(3))
    assert estimate_s1(prob, 1, 128) == estimate_s1(prob, 1, 128)
    assert estimate_s1(prob, 1, 128, seed=1) == estimate_s1(prob, 1, 128, seed=1)


def test_estimates_constant_along_a_retraction_fiber():
    # x = 1 + 3^k all retract to the Gauss point, where the exact slopes are 1/2
    prob = gallery.ode_problem(gallery.bessel(3))
    ests = [estimate_s1(prob, 1 + Fraction(3) ** k, 384) for k in range(0, 4)]
    assert max(ests) - min(ests) <= Fraction(1, 10)
