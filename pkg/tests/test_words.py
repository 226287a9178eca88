import pytest
from hypothesis import given
from hypothesis import strategies as st

from decaykit.words import (
    AffineExpr,
    ParametricWord,
    Word,
    WordSyntaxError,
    affine,
    free_reduce,
    instantiate,
    parse_affine,
    parse_parametric,
    parse_word,
)

from conftest import words

ML = ("m", "l", "t")


def test_adjacent_syllables_merge():
    assert parse_word("m^2 m^3", ML) == Word.gen("m", 5)
    assert parse_word("m^2 l^0 m^-1", ML) == Word.gen("m")


def test_symbolic_cancellation():
    w = parse_parametric("m^k m^{-k}", ML)
    assert free_reduce(w).instantiate({}) == Word()
    assert free_reduce(w).is_concrete()


def test_instantiate_examples():
    w = parse_parametric("m^{-k} t^-1 m^k", ML)
    assert w.instantiate({"k": 0}) == Word.gen("t", -1)
    assert str(w.instantiate({"k": 3})) == "m^-3 t^-1 m^3"
    assert parse_parametric("(m^2 l)^N", ML).instantiate({"N": 0}) == Word()


def test_instantiate_respects_lower_bounds():
    with pytest.raises(ValueError):
        instantiate(parse_parametric("m^k", ML), {"k": -1}, {"k": 0})


def test_parse_errors():
    with pytest.raises(WordSyntaxError):
        parse_word("m^", ML)
    with pytest.raises(WordSyntaxError):
        parse_word("x", ML)


def test_multi_letter_identifier_splits():
    assert parse_word("ml", ML) == Word([("m", 1), ("l", 1)])
    assert parse_word("1", ML) == Word()


def test_affine_arithmetic():
    e = parse_affine("2*k - N + 3")
    assert e.evaluate({"k": 4, "N": 1}) == 10
    assert (e - e).is_zero()
    assert e.substitute({"k": affine("j+1")}).evaluate({"j": 3, "N": 1}) == 10
    assert AffineExpr.make(0, {"k": 0}).params == frozenset()


@given(words(ML), words(ML))
def test_inverse_and_product(a, b):
    assert a * ~a == Word()
    assert ~(a * b) == ~b * ~a
    assert len(a * b) <= len(a) + len(b)


@given(words(ML), st.integers(-4, 4))
def test_power_matches_repeated_product(a, n):
    expected = Word()
    for _ in range(abs(n)):
        expected = expected * (a if n > 0 else ~a)
    assert a ** n == expected


@given(words(ML, max_len=5), st.integers(0, 5))
def test_parametric_roundtrip(a, k):
    w = ParametricWord.from_word(a).power("k")
    text = str(w)
    assert parse_parametric(text, ML).instantiate({"k": k}) == a ** k
    assert parse_word(str(a), ML) == a
