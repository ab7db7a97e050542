from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fockop.arith import GaussianRational, I_UNIT, MultiIndex
from fockop.fockop_exceptions import DimensionMismatchError, PreconditionError, SymbolSyntaxError
from fockop.symbols import (
    SymbolPolynomial, conjugate, conjugate_linear_coefficient, graded_decompose, holomorphic_split,
    is_constant, is_holomorphic, multiply_symbols, parse_symbol, pretty_print,
)


def mono(beta, gamma, c=1):
    return SymbolPolynomial.monomial(MultiIndex(beta), MultiIndex(gamma), c)


@st.composite
def symbols(draw, n=None):
    n = n or draw(st.integers(min_value=1, max_value=2))
    exponents = st.tuples(*[st.integers(min_value=0, max_value=3)] * n)
    small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
    terms = draw(st.lists(st.tuples(exponents, exponents, small, small), max_size=4))
    return SymbolPolynomial.from_terms(
        n, [((MultiIndex(b), MultiIndex(g)), GaussianRational(re, im)) for b, g, re, im in terms])


def test_parse_single_term():
    assert parse_symbol('z1*conj(z1)', 1).terms == {(MultiIndex.of(1), MultiIndex.of(1)): GaussianRational(1)}


def test_parse_collects_terms():
    p = parse_symbol('2 + 3*i*z2^2', 2)
    origin = MultiIndex.zero(2)
    assert p.terms == {(origin, origin): GaussianRational(2), (MultiIndex.of(0, 2), origin): GaussianRational(0, 3)}
    assert pretty_print(p) == '2 + 3*i*z2^2'


def test_parse_cancellation():
    assert parse_symbol('z1 - z1', 1).is_zero()
    assert pretty_print(parse_symbol('z - z', 1)) == '0'


def test_parse_arithmetic():
    assert parse_symbol('(z + 1)^2', 1) == parse_symbol('z^2 + 2*z + 1', 1)
    assert parse_symbol('1/2*conj(z)', 1) == mono((0,), (1,), Fraction(1, 2))
    assert parse_symbol('-z', 1) == mono((1,), (0,), -1)
    assert parse_symbol('i*i', 1) == SymbolPolynomial.constant(1, -1)


def test_pretty_print_order():
    assert pretty_print(parse_symbol('z + 2*conj(z)', 1)) == '2*conj(z) + z'
    assert pretty_print(parse_symbol('conj(z2)^2*z1 - 1', 2)) == '-1 + z1*conj(z2)^2'


@pytest.mark.parametrize('text,n,position', [
    ('z^-1', 1, 2),
    ('z', 2, 0),
    ('z1 + z3', 2, 5),
    ('1/0', 1, 2),
    ('z +', 1, 3),
    ('conj(z', 1, 6),
    ('z $', 1, 2),
])
def test_parse_errors_carry_position(text, n, position):
    with pytest.raises(SymbolSyntaxError) as err:
        parse_symbol(text, n)
    assert err.value.position == position
    assert '^' in err.value.annotated()


def test_parse_empty():
    with pytest.raises(SymbolSyntaxError) as err:
        parse_symbol('', 1)
    assert err.value.message == 'Empty symbol'


@given(symbols())
def test_pretty_print_round_trip(p):
    assert parse_symbol(pretty_print(p), p.dimension) == p


@given(symbols())
def test_conjugate_involution(p):
    assert conjugate(conjugate(p)) == p


@given(symbols(n=2), symbols(n=2))
def test_multiplication_commutes(p, q):
    assert multiply_symbols(p, q) == multiply_symbols(q, p)


def test_conjugate_examples():
    assert conjugate(parse_symbol('conj(z)', 1)) == parse_symbol('z', 1)
    assert conjugate(parse_symbol('3*i*z1^2*conj(z2)', 2)) == parse_symbol('-3*i*conj(z1)^2*z2', 2)
    assert conjugate(SymbolPolynomial.constant(1, 5)) == SymbolPolynomial.constant(1, 5)


def test_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        parse_symbol('z', 1) + parse_symbol('z1', 2)


def test_holomorphic_split():
    holo, rest = holomorphic_split(parse_symbol('z^2 + z*conj(z)', 1))
    assert holo == parse_symbol('z^2', 1)
    assert rest == parse_symbol('z*conj(z)', 1)
    holo, rest = holomorphic_split(parse_symbol('conj(z)', 1))
    assert holo.is_zero() and rest == parse_symbol('conj(z)', 1)
    holo, rest = holomorphic_split(SymbolPolynomial.constant(1, 7))
    assert holo == SymbolPolynomial.constant(1, 7) and rest.is_zero()
    assert is_holomorphic(parse_symbol('z1^2 + i*z2', 2))
    assert not is_holomorphic(parse_symbol('z1*conj(z1)', 2))


def test_is_constant():
    assert is_constant(SymbolPolynomial.constant(2, 5))
    assert not is_constant(parse_symbol('z1', 2))
    assert is_constant(SymbolPolynomial.zero(1))


def test_conjugate_linear_coefficient():
    assert conjugate_linear_coefficient(parse_symbol('z^3 - conj(z)', 1)) == GaussianRational(-1)
    assert conjugate_linear_coefficient(parse_symbol('z + 2*i*conj(z)', 1)) == GaussianRational(0, 2)
    assert conjugate_linear_coefficient(parse_symbol('z^2', 1)) == GaussianRational()
    assert conjugate_linear_coefficient(parse_symbol('z*conj(z)', 1)) is None
    assert conjugate_linear_coefficient(parse_symbol('conj(z1)', 2)) is None


def test_graded_decompose_one_variable():
    d = graded_decompose(parse_symbol('z + conj(z)', 1), 1)
    assert (d.low, d.high) == (-1, 1)
    pieces = {piece.degree: piece.piece for piece in d.pieces}
    assert pieces[1] == parse_symbol('z', 1)
    assert pieces[-1] == parse_symbol('conj(z)', 1)
    assert pieces[0].is_zero()

    d = graded_decompose(parse_symbol('z*conj(z) + z^2*conj(z)', 1), 1)
    assert (d.low, d.high) == (0, 1)
    assert [p.piece for p in d.pieces] == [parse_symbol('z*conj(z)', 1), parse_symbol('z^2*conj(z)', 1)]

    d = graded_decompose(SymbolPolynomial.constant(1, 4), 1)
    assert (d.low, d.high) == (0, 0)
    assert d.factor() == SymbolPolynomial.constant(1, 4)


def test_graded_decompose_factors_in_one_variable():
    p = parse_symbol('(z1 + conj(z1))*z2', 2)
    d = graded_decompose(p, 1)
    assert d.factor() == parse_symbol('z1 + conj(z1)', 2)
    assert d.cofactor == parse_symbol('z2', 2)
    assert d.factor() * d.cofactor == p


def test_graded_decompose_rejects():
    with pytest.raises(PreconditionError):
        graded_decompose(SymbolPolynomial.zero(1), 1)
    with pytest.raises(PreconditionError):
        graded_decompose(parse_symbol('z1*z2 + conj(z1)', 2), 1)
    with pytest.raises(PreconditionError):
        graded_decompose(parse_symbol('z1', 2), 3)


def test_power_and_constant():
    assert parse_symbol('z', 1).power(0) == SymbolPolynomial.constant(1, 1)
    assert SymbolPolynomial.constant(1, I_UNIT).scale(I_UNIT) == SymbolPolynomial.constant(1, -1)


def test_conj_allows_spaces():
    assert parse_symbol('conj (z1) * conj ( z2 )', 2) == mono((0, 0), (1, 1))
