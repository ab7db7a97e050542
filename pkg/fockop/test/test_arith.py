from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fockop.arith import (
    FactorialRatio, GaussianRational, MultiIndex, ONE, RadicalCoefficient, factorial_ratio_eval, legendre,
    multiindex_compare, primes_upto, radical_normalize, sqrt_factorial_ratio,
)
from fockop.fockop_exceptions import DimensionMismatchError, InvariantViolation, PreconditionError

terms = st.lists(st.integers(min_value=0, max_value=20), max_size=5)
ratios = st.builds(FactorialRatio, terms, terms)
positive_rationals = st.fractions(min_value=Fraction(1, 1000), max_value=1000)


def test_multiindex_basics():
    a = MultiIndex.of(1, 2)
    assert a.order == 3
    assert a.dimension == 2
    assert str(a) == '1|2'
    assert a + MultiIndex.of(2, 0) == MultiIndex.of(3, 2)
    assert MultiIndex.unit(3, 1) == MultiIndex.of(0, 1, 0)
    assert a.offset(MultiIndex.of(0, 0), MultiIndex.of(2, 0)) is None
    assert a.offset(MultiIndex.of(1, 0), MultiIndex.of(0, 2)) == MultiIndex.of(2, 0)


def test_multiindex_rejects_bad_input():
    with pytest.raises(PreconditionError):
        MultiIndex.of(1, -1)
    with pytest.raises(DimensionMismatchError):
        MultiIndex.of(1) + MultiIndex.of(1, 2)


def test_compare():
    o = multiindex_compare(MultiIndex.of(2, 3), MultiIndex.of(1, 3))
    assert o.ge and not o.gt
    assert multiindex_compare(MultiIndex.of(1, 0), MultiIndex.of(0, 1)).incomparable
    o = multiindex_compare(MultiIndex.of(2, 2), MultiIndex.of(2, 2))
    assert o.ge and o.le and not o.gt
    with pytest.raises(DimensionMismatchError):
        multiindex_compare(MultiIndex.of(1), MultiIndex.of(1, 1))


def test_gaussian_rational():
    z = GaussianRational(1, 2) * GaussianRational(3, -1)
    assert z == GaussianRational(5, 5)
    assert str(z) == '5+5i'
    assert z.conjugate() == GaussianRational(5, -5)
    assert z.abs2() == 50
    assert str(GaussianRational(Fraction(1, 2), -1)) == '1/2-i'


def test_primes_and_legendre():
    assert primes_upto(10) == (2, 3, 5, 7)
    assert primes_upto(1) == ()
    assert legendre(10, 2) == 8
    assert legendre(10, 5) == 2


@pytest.mark.parametrize('num,den,expected', [
    ((5,), (3,), 20),
    ((), (), 1),
    ((10, 3), (7, 6), 6),
    ((2, 3), (5,), Fraction(1, 10)),
])
def test_factorial_ratio_eval(num, den, expected):
    assert factorial_ratio_eval(FactorialRatio(num, den)) == expected


def test_prime_exponents():
    assert FactorialRatio((6,), (4,)).prime_exponents() == {2: 1, 3: 1, 5: 1}
    assert FactorialRatio((3, 1, 0), (3,)).prime_exponents() == {}


@given(ratios, ratios)
def test_factorial_ratio_multiplicative(r, s):
    assert (r * s).evaluate() == r.evaluate() * s.evaluate()


@given(ratios)
def test_factorial_ratio_inverse(r):
    assert r.evaluate() * r.inverse().evaluate() == 1


@pytest.mark.parametrize('rational,radicand,out_rational,out_radicand', [
    (1, 4, 2, 1),
    (2, Fraction(9, 4), 3, 1),
    (1, 8, 2, 2),
    (1, 12, 2, 3),
    (1, Fraction(1, 6), Fraction(1, 6), 6),
    (1, Fraction(1, 2), Fraction(1, 2), 2),
    (1, Fraction(1, 8), Fraction(1, 4), 2),
    (3, Fraction(8, 9), 2, 2),
])
def test_radical_normalize(rational, radicand, out_rational, out_radicand):
    r = radical_normalize(rational, radicand)
    assert r.rational_part == GaussianRational(out_rational)
    assert r.radicand == out_radicand


def test_radical_normalize_rejects_negative():
    with pytest.raises(PreconditionError):
        radical_normalize(1, -2)
    assert radical_normalize(5, 0).is_zero()


@given(st.fractions(min_value=-50, max_value=50), positive_rationals)
def test_radical_normalize_idempotent(q, x):
    r = radical_normalize(q, x)
    assert radical_normalize(r.rational_part, r.radicand) == r
    assert r.abs2() == q * q * x


@given(st.fractions(min_value=-50, max_value=50), positive_rationals, positive_rationals)
def test_radical_normalize_is_unique(q, x, s):
    # q * sqrt(x) and (q * s) * sqrt(x / s^2) are the same number
    r = radical_normalize(q, x)
    assert radical_normalize(q * s, x / (s * s)) == r
    assert r.is_zero() or r.radicand.denominator == 1


def test_equal_values_compare_equal():
    assert radical_normalize(1, Fraction(1, 2)) == radical_normalize(Fraction(1, 2), 2)
    total = radical_normalize(1, Fraction(1, 2)) + radical_normalize(Fraction(1, 2), 2)
    assert total == RadicalCoefficient(ONE, Fraction(2))


@settings(max_examples=50)
@given(ratios)
def test_sqrt_factorial_ratio_matches_integer_factoring(r):
    assert sqrt_factorial_ratio(r) == radical_normalize(ONE, r.evaluate())


def test_radical_products():
    product = RadicalCoefficient(ONE, Fraction(2)) * RadicalCoefficient(ONE, Fraction(6))
    assert product == RadicalCoefficient(GaussianRational(2), Fraction(3))
    product = radical_normalize(1, Fraction(1, 6)) * radical_normalize(1, 6)
    assert product == RadicalCoefficient.rational(1)
    assert RadicalCoefficient(GaussianRational(1, 1), Fraction(2)).abs2() == 4


def test_radical_sum_needs_equal_radicands():
    a = RadicalCoefficient(ONE, Fraction(2))
    assert a + a == RadicalCoefficient(GaussianRational(2), Fraction(2))
    assert (a - a).is_zero()
    with pytest.raises(InvariantViolation):
        a + RadicalCoefficient(ONE, Fraction(3))
