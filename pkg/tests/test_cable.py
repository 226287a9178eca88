import random
from fractions import Fraction
from math import gcd

import pytest
from hypothesis import given
from hypothesis import strategies as st

from decaykit.backends import gpq_backend, normal_form_Gpq, torus_amalgam, words_equal
from decaykit.cable import (
    CableParams,
    LOVerdict,
    abelian_image,
    cable_abelianization,
    cable_group,
    cable_peripherals,
    check_crucial_identity,
    crucial_identity,
    euclid_uv,
    lo_window,
    satellite_quotient,
    satellite_target_backend,
    torus_genus,
    torus_knot_presentation,
    torus_meridian_exponents,
)
from decaykit.words import Word, parse_word

COPRIME = [(p, q) for p in range(2, 9) for q in range(1, 9) if gcd(p, q) == 1]


def test_euclid_examples():
    assert euclid_uv(2, 3) == (2, 1)
    assert euclid_uv(5, 3) == (2, 3)
    assert euclid_uv(2, 11) == (6, 1)


def test_invalid_params():
    with pytest.raises(ValueError, match="coprime"):
        CableParams.of(2, 4)
    with pytest.raises(ValueError):
        CableParams(2, 3, 1, 1)


@given(st.integers(2, 40), st.integers(1, 40))
def test_uv_is_minimal(p, q):
    if gcd(p, q) != 1:
        return
    u, v = euclid_uv(p, q)
    assert p * u - q * v == 1 and u > 0 and v > 0
    assert all((1 + q * w) % p for w in range(1, v))


def test_peripherals_2_3():
    mu, lam = cable_peripherals(CableParams.of(2, 3))
    assert mu == parse_word("m^2 l t^-1", "mlt")
    assert lam == parse_word("(m^2 l t^-1)^-6 t^2", "mlt")


@pytest.mark.parametrize("p,q", COPRIME)
def test_cable_homology(p, q):
    params = CableParams.of(p, q)
    images = cable_abelianization(params)
    mu, lam = cable_peripherals(params)
    assert abelian_image(mu, images) == 1
    assert abelian_image(lam, images) == 0


@pytest.mark.parametrize("p,q", [(p, q) for p in range(2, 13) for q in range(1, 13) if gcd(p, q) == 1])
def test_crucial_identity(p, q):
    assert check_crucial_identity(CableParams.of(p, q))


@pytest.mark.parametrize("p,q", COPRIME)
def test_shifted_uv_keeps_homology_class(p, q):
    u, v = euclid_uv(p, q)
    shifted = CableParams(p, q, u + q, v + p)
    lhs, rhs = crucial_identity(shifted)
    assert normal_form_Gpq(lhs, p, q) == normal_form_Gpq(rhs, p, q)
    mu, _ = cable_peripherals(shifted)
    assert abelian_image(mu, cable_abelianization(shifted)) == 1


def test_torus_meridians():
    assert torus_meridian_exponents(2, 3) == (1, -1)
    assert torus_meridian_exponents(3, 5) == (2, -3)
    pres = torus_knot_presentation(3, 5)
    assert str(pres.peripheral[0]) == "x^2 y^-3"


@pytest.mark.parametrize("p,q", [(2, 3), (2, 5), (3, 4), (3, 5), (2, 7)])
def test_torus_peripheral_subgroup(p, q):
    pres = torus_knot_presentation(p, q)
    mu, lam = pres.peripheral
    ab = pres.abelianization()
    assert abs(ab.image(mu)[0]) == 1 and ab.is_zero(lam)
    b = torus_amalgam("x", p, "y", q)
    assert words_equal(mu * lam, lam * mu, b)


def test_torus_genus():
    assert torus_genus(2, 3) == 1
    assert 2 * torus_genus(2, 3) - 1 == 1
    assert torus_genus(3, 4) == 3


def test_cable_group_of_trefoil():
    comp = torus_knot_presentation(2, 3)
    g = cable_group(comp, CableParams.of(2, 11))
    assert len(g.generators) == 3 and len(g.relators) == 2
    ab = g.abelianization()
    assert ab.rank == 1 and not ab.torsion
    assert abs(ab.image(g.peripheral[0])[0]) == 1
    assert ab.is_zero(g.peripheral[1])


def test_quotient_examples():
    params = CableParams.of(2, 3)
    assert satellite_quotient(Word.gen("l"), params) == Word()
    mu, lam = cable_peripherals(params)
    assert satellite_quotient(mu, params) == parse_word("m^2 t^-1", "mt")


@pytest.mark.parametrize("p,q", COPRIME)
def test_quotient_is_a_homomorphism(p, q):
    params = CableParams.of(p, q)
    target = satellite_target_backend(params)
    rng = random.Random(p * 100 + q)
    for _ in range(30):
        a = Word([(rng.choice("mlt"), rng.choice((-2, -1, 1, 2))) for _ in range(rng.randint(0, 8))])
        b = Word([(rng.choice("mlt"), rng.choice((-2, -1, 1, 2))) for _ in range(rng.randint(0, 8))])
        lhs = satellite_quotient(a * b, params)
        rhs = satellite_quotient(a, params) * satellite_quotient(b, params)
        assert target.equal(lhs, rhs)


def test_quotient_with_companion_generators():
    comp = torus_knot_presentation(2, 3)
    params = CableParams.of(2, 11)
    # x, y of the trefoil collapse to m^3, m^2 (their homology classes)
    assert satellite_quotient(parse_word("x y^-1", "xy"), params, comp) == Word.gen("m")


def test_lo_window_examples():
    assert lo_window(2, 11, 5, 22) is LOVerdict.NOT_LEFT_ORDERABLE
    assert lo_window(2, 11, 5, 8) is LOVerdict.LEFT_ORDERABLE
    assert lo_window(2, 11, 5, 15) is LOVerdict.UNKNOWN
    assert lo_window(2, 11, None, 30) is LOVerdict.UNKNOWN
    assert lo_window(2, 7, 5, 30) is LOVerdict.UNKNOWN


RANK = {LOVerdict.LEFT_ORDERABLE: 0, LOVerdict.UNKNOWN: 1, LOVerdict.NOT_LEFT_ORDERABLE: 2}


@given(st.sampled_from(COPRIME), st.fractions(0, 100, max_denominator=9), st.fractions(0, 100, max_denominator=9))
def test_lo_window_monotone(pq, r1, r2):
    p, q = pq
    lo, hi = sorted((r1, r2))
    assert RANK[lo_window(p, q, Fraction(1, 2), lo)] <= RANK[lo_window(p, q, Fraction(1, 2), hi)]
