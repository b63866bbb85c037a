from __future__ import annotations

import random
from fractions import Fraction

import pytest

from convpoly.numerics import ResidueInt, TruncatedSeries
from convpoly.witt import (
    WittVector,
    from_integer,
    frobenius_charp,
    ghost,
    scalar_multiple,
    sigma,
    teichmuller,
    universal_polynomials,
    unghost,
    verschiebung,
)

CASES = [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (5, 1), (5, 2)]


def rand_q(rng):
    return Fraction(rng.randint(-7, 7), rng.choice([1, 1, 2, 3, 5]))


def rand_vec(rng, p, n, kind="Q"):
    if kind == "Q":
        return WittVector([rand_q(rng) for _ in range(n)], p)
    if kind == "Z":
        return WittVector([rng.randint(-20, 20) for _ in range(n)], p)
    return WittVector([ResidueInt(rng.randrange(kind), kind) for _ in range(n)], p)


@pytest.mark.parametrize("p,n", CASES)
def test_universal_polynomials_are_integral(p, n):
    polys = universal_polynomials(p, n)
    for family in (polys.add, polys.sub, polys.mul):
        assert len(family) == n
        for P in family:
            assert all(isinstance(c, int) for c in P.terms.values())


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2)])
def test_ghost_of_universal_polynomials(p, n):
    polys = universal_polynomials(p, n)
    names = polys.add[0].variables
    X = WittVector([TruncatedSeries.variable(v, names) for v in names[:n]], p)
    Y = WittVector([TruncatedSeries.variable(v, names) for v in names[n:]], p)
    gX, gY = ghost(X), ghost(Y)
    for polysvec, op in ((polys.add, lambda a, b: a + b), (polys.mul, lambda a, b: a * b)):
        lhs = ghost(WittVector(list(polysvec), p))
        assert all(l == op(a, b) for l, a, b in zip(lhs, gX, gY))


def test_ghost_examples():
    a0, a1 = Fraction(3), Fraction(-2, 5)
    assert ghost(WittVector([a0, a1], 2)) == [a0, a0 ** 2 + 2 * a1]
    assert ghost(teichmuller(Fraction(2, 3), 3, 3)) == [Fraction(2, 3), Fraction(2, 3) ** 3, Fraction(2, 3) ** 9]


def test_ghost_of_verschiebung():
    rng = random.Random(4)
    for p, n in [(2, 3), (3, 2), (5, 2)]:
        a = rand_vec(rng, p, n)
        w = ghost(a)
        assert ghost(verschiebung(a)) == [0] + [p * x for x in w[:-1]]


def test_sum_example():
    assert WittVector([1, 0], 2) + WittVector([1, 0], 2) == WittVector([2, -1], 2)
    assert from_integer(2, 2, 2) == WittVector([2, -1], 2)


def test_teichmuller_is_multiplicative():
    rng = random.Random(5)
    for p, n in [(2, 3), (3, 2)]:
        for _ in range(20):
            r, s = rand_q(rng), rand_q(rng)
            assert teichmuller(r, n, p) * teichmuller(s, n, p) == teichmuller(r * s, n, p)


def test_additive_identity_and_negation():
    rng = random.Random(6)
    a = rand_vec(rng, 3, 2)
    assert a + a.zero() == a
    assert a + (-a) == a.zero()
    assert a * a.one() == a


@pytest.mark.parametrize("p,n", [(2, 2), (2, 3), (3, 2)])
def test_ring_axioms_over_q_match_ghost_transport(p, n):
    rng = random.Random(100 * p + n)
    for _ in range(100):
        u, v, w = (rand_vec(rng, p, n) for _ in range(3))
        assert (u + v) + w == u + (v + w)
        assert u * v == v * u
        assert u * (v + w) == u * v + u * w
        assert (u - v) + v == u
        gu, gv = ghost(u), ghost(v)
        assert u + v == unghost([x + y for x, y in zip(gu, gv)], p)
        assert u * v == unghost([x * y for x, y in zip(gu, gv)], p)


@pytest.mark.parametrize("p,n", [(3, 2), (2, 3)])
def test_ring_axioms_over_z_mod_9(p, n):
    rng = random.Random(7 + p)
    for _ in range(100):
        u, v, w = (rand_vec(rng, p, n, 9) for _ in range(3))
        assert (u + v) + w == u + (v + w)
        assert (u * v) * w == u * (v * w)
        assert u * v == v * u
        assert u * (v + w) == u * v + u * w
        assert u + u.zero() == u and u * u.one() == u


def test_integer_inputs_reduce_consistently_mod_9():
    # functoriality Z -> Z/9
    rng = random.Random(8)
    for _ in range(50):
        u, v = rand_vec(rng, 3, 2, "Z"), rand_vec(rng, 3, 2, "Z")
        red = lambda a: a.map(lambda c: ResidueInt(c, 9))
        assert red(u * v) == red(u) * red(v)
        assert red(u + v) == red(u) + red(v)


def test_verschiebung_is_additive():
    rng = random.Random(9)
    for _ in range(100):
        p, n = rng.choice([(2, 3), (3, 2)])
        a, b = rand_vec(rng, p, n), rand_vec(rng, p, n)
        assert verschiebung(a) + verschiebung(b) == verschiebung(a + b)


def test_two_times_over_f2():
    for a0 in (0, 1):
        for a1 in (0, 1):
            a = WittVector([ResidueInt(a0, 2), ResidueInt(a1, 2)], 2)
            assert 2 * a == WittVector([ResidueInt(0, 2), ResidueInt(a0 * a0, 2)], 2)


@pytest.mark.parametrize("p,n", [(2, 3), (3, 3), (5, 2)])
def test_p_times_is_v_phi_in_char_p(p, n):
    rng = random.Random(p * n)
    for _ in range(30):
        a = rand_vec(rng, p, n, p)
        assert p * a == verschiebung(frobenius_charp(a)) == frobenius_charp(verschiebung(a))


@pytest.mark.parametrize("p,n", [(2, 3), (3, 2), (5, 2)])
def test_p_times_minus_v_sigma_divisible_by_p(p, n):
    rng = random.Random(3 * p + n)
    for _ in range(100):
        a = rand_vec(rng, p, n, "Z")
        d = scalar_multiple(p, a) - verschiebung(sigma(a))
        assert all(c % p == 0 for c in d.components)


def test_sigma_is_not_additive():
    a = WittVector([1, 0], 2)
    assert sigma(a + a) == WittVector([4, 1], 2)
    assert sigma(a) + sigma(a) == WittVector([2, -1], 2)
    assert sigma(a + a) != sigma(a) + sigma(a)


def test_frobenius_needs_characteristic_p():
    with pytest.raises(ValueError):
        frobenius_charp(WittVector([1, 2], 2))
    with pytest.raises(ValueError):
        frobenius_charp(WittVector([ResidueInt(1, 3), ResidueInt(0, 3)], 2))


def test_mismatched_parameters():
    with pytest.raises(ValueError):
        WittVector([1, 0], 2) + WittVector([1, 0], 3)
    with pytest.raises(ValueError):
        WittVector([1, 0], 2) + WittVector([1, 0, 0], 2)
    with pytest.raises(TypeError):
        WittVector([1, 0], 2) + 1


def test_truncation_is_a_ring_map():
    rng = random.Random(10)
    for _ in range(20):
        u, v = rand_vec(rng, 2, 3), rand_vec(rng, 2, 3)
        assert (u * v).truncate(2) == u.truncate(2) * v.truncate(2)
        assert (u + v).truncate(1) == u.truncate(1) + v.truncate(1)
