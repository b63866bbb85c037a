from __future__ import annotations

import json
import random
from importlib import resources

import pytest

from convpoly.polygon import Polygon
from convpoly.swan import (
    AswClass,
    LaurentElement,
    conductor_chain,
    format_laurent,
    hasse_arf_polygon,
    is_normalized,
    normalize,
    parse_laurent,
    step_bound,
    swan_conductor,
)
from convpoly.witt import WittVector, frobenius_charp


def z(p, k, c=1):
    return LaurentElement.monomial(p, k, c)


def zero(p):
    return LaurentElement(p)


def rand_laurent(rng, p, lo=-12, hi=3, terms=3):
    return LaurentElement(p, {rng.randint(lo, hi): rng.randrange(1, p) for _ in range(rng.randint(0, terms))})


def rand_class(rng, p, n, lo=-12):
    return AswClass.from_components(p, [rand_laurent(rng, p, lo) for _ in range(n)])


def test_laurent_arithmetic():
    p = 3
    x = parse_laurent("-2:1,0:2", p)
    assert x.valuation() == -2 and x.pole_order == 2
    assert x ** 3 == parse_laurent("-6:1,0:2", p)
    assert x ** 3 == x * x * x
    assert x - x == 0
    assert format_laurent(x + 1) == "-2:1"
    assert parse_laurent("0", p) == zero(p)
    with pytest.raises(ValueError):
        parse_laurent("z^-1", p)


def test_already_normal_class_unchanged():
    a = AswClass.from_components(2, [z(2, -1), zero(2)])
    res = normalize(a)
    assert res.steps == 0 and res.cls.witt == a.witt
    b = AswClass.from_components(3, [z(3, 2), z(3, 0, 2)])
    assert normalize(b).cls.witt == b.witt


def test_normalize_z_minus_two():
    a = AswClass.from_components(2, [z(2, -2)])
    res = normalize(a)
    assert res.cls.witt == WittVector([z(2, -1)], 2)
    assert res.b == WittVector([z(2, -1)], 2)
    assert res.steps == 1
    # class membership: original - normalized = phi(b) - b
    assert a.witt - res.cls.witt == frobenius_charp(res.b) - res.b


def test_conductor_examples():
    assert swan_conductor(AswClass.from_components(2, [z(2, -1)])) == 1
    assert swan_conductor(AswClass.from_components(2, [z(2, -3), zero(2)])) == 6
    assert conductor_chain(AswClass.from_components(2, [z(2, -3), zero(2)])) == [3, 6]
    assert swan_conductor(AswClass.from_components(3, [z(3, 1), z(3, 0)])) == 0


@pytest.mark.parametrize("p", [2, 3, 5])
def test_classical_n1_oracle(p):
    for m in range(-3, 30):
        if m > 0 and m % p == 0:
            continue
        a = AswClass.from_components(p, [z(p, -m) + z(p, 1)])
        assert swan_conductor(a) == max(m, 0)


@pytest.mark.parametrize("p,n", [(2, 1), (2, 2), (3, 1), (3, 2)])
def test_coboundary_invariance(p, n):
    rng = random.Random(10 * p + n)
    for _ in range(50):
        a = rand_class(rng, p, n)
        b = WittVector([rand_laurent(rng, p, lo=-6) for _ in range(n)], p)
        shifted = a.coboundary_shift(b)
        assert conductor_chain(shifted) == conductor_chain(a)


@pytest.mark.parametrize("p,n", [(2, 2), (2, 3), (3, 2)])
def test_normalization_records_the_coboundary(p, n):
    rng = random.Random(7 * p + n)
    for _ in range(30):
        a = rand_class(rng, p, n)
        res = normalize(a)
        assert is_normalized(res.cls)
        assert a.witt - res.cls.witt == frobenius_charp(res.b) - res.b
        m0 = max(a.pole_orders() + [1])
        assert res.steps <= step_bound(m0, n, p)


@pytest.mark.parametrize("p,n", [(2, 2), (2, 3), (3, 2)])
def test_conductor_chain_growth(p, n):
    rng = random.Random(5 * p + n)
    for _ in range(50):
        chain = conductor_chain(rand_class(rng, p, n))
        prev = 0
        for bj in chain:
            assert bj >= p * prev
            prev = bj


def test_level_must_be_in_range():
    a = AswClass.from_components(2, [z(2, -1), zero(2)])
    with pytest.raises(ValueError):
        swan_conductor(a, 3)


def test_mixed_characteristic_rejected():
    with pytest.raises(ValueError):
        z(2, -1) + z(3, -1)


def test_hasse_arf_examples():
    P = hasse_arf_polygon([(1, 1)])
    assert P.slopes == (1,) and P.total_height == 1
    assert hasse_arf_polygon([(0, 3)]) == Polygon.zero(3)
    Q = hasse_arf_polygon([(2, 1), (1, 2)])
    assert Q.slopes == (2, 1, 1) and Q.total_height == 4


def test_hasse_arf_rejects_bad_breaks():
    with pytest.raises(ValueError):
        hasse_arf_polygon([(-1, 1)])
    with pytest.raises(ValueError):
        hasse_arf_polygon([(1, 0)])
    with pytest.raises(ValueError):
        hasse_arf_polygon([(1, 1), (1, 2)])


def test_conductors_feed_the_lifting_config():
    cfg = json.loads(resources.files("convpoly").joinpath("data", "lifting_consistent.json").read_text())
    a = AswClass.from_components(cfg["p"], [z(cfg["p"], -1)])
    b = conductor_chain(a)
    assert b == cfg["b"]
    assert len(cfg["points"]) == b[-1] + 1
