from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fockop.analysis import (
    Case, Kind, ProductKind, RaySpec, Sample, Verdict, classify, classify_hankel_product, classify_single,
    classify_toeplitz_product, corroborate, default_ray, exponent_report, expression_base, fit_exponent,
    geometric_t, linear_t, norm_sweep, predicted_exponent, ratio_stabilization, verdict_operator,
)
from fockop.arith import MultiIndex
from fockop.config import Settings
from fockop.fockop_exceptions import DegenerateSampleError, PreconditionError
from fockop.opexpr import parse_operator
from fockop.operators import SpaceParams
from fockop.symbols import SymbolPolynomial, parse_symbol

E = MultiIndex.of
ONES1 = RaySpec(E(0), E(1), geometric_t(64, 4096))

# (kind, n, f, g, bounded)
TRUTH_TABLE = [
    ('toeplitz-product', 1, '3', '5', True),
    ('toeplitz-product', 2, 'z1', '1', False),
    ('toeplitz-product', 1, '0', 'conj(z)', True),
    ('toeplitz-product', 1, 'z*conj(z)', 'z*conj(z)', False),
    ('hankel-product', 2, 'z1^2', 'conj(z1)*z1', True),
    ('hankel-product', 2, 'conj(z2)', 'z1 + z2^3', True),
    ('hankel-product', 1, 'z + 2*conj(z)', 'z^3 - conj(z)', True),
    ('hankel-product', 1, 'conj(z)^2', 'conj(z)^2', False),
    ('hankel-product', 2, 'conj(z1)', 'conj(z1)', False),
    ('toeplitz', 2, 'conj(z2)', None, False),
    ('toeplitz', 1, '7/2', None, True),
    ('hankel', 1, 'z^5 + 7*conj(z)', None, True),
    ('hankel', 1, 'z*conj(z)', None, False),
    ('hankel-compact', 1, 'z^5 + 7*conj(z)', None, False),
    ('hankel-compact', 2, 'z1*z2 + 4', None, True),
]


def verdict_for(kind, n, f, g):
    return classify(Kind(kind), parse_symbol(f, n), parse_symbol(g, n) if g else None)


@pytest.mark.parametrize('kind,n,f,g,bounded', TRUTH_TABLE)
def test_truth_table(kind, n, f, g, bounded):
    assert verdict_for(kind, n, f, g).bounded == bounded


def test_cases_reported():
    assert classify_toeplitz_product(parse_symbol('3', 1), parse_symbol('5', 1)).case is Case.BOTH_CONSTANT
    assert classify_toeplitz_product(parse_symbol('0', 1), parse_symbol('conj(z)', 1)).case is Case.ZERO_FACTOR
    assert classify_hankel_product(parse_symbol('z1^2', 2), parse_symbol('conj(z1)*z1', 2)).case is Case.F_HOLOMORPHIC
    assert classify_hankel_product(parse_symbol('conj(z)', 1), parse_symbol('z', 1)).case is Case.G_HOLOMORPHIC
    v = classify_hankel_product(parse_symbol('z + 2*conj(z)', 1), parse_symbol('z^3 - conj(z)', 1))
    assert v.case is Case.N1_CONJUGATE_LINEAR
    assert v.witness == 'H_f^* H_g = (-2) I'
    v = classify_hankel_product(parse_symbol('conj(z1)', 2), parse_symbol('conj(z1)', 2))
    assert v.case is Case.NEITHER_HOLOMORPHIC
    assert 'needs n = 1' in v.witness
    v = classify_single(Kind.HANKEL_COMPACT, parse_symbol('z^5 + 7*conj(z)', 1))
    assert v.case is Case.NOT_HOLOMORPHIC and Kind.HANKEL_COMPACT.property_name == 'compact'


def test_verdict_consistency_enforced():
    with pytest.raises(AssertionError):
        Verdict(Kind.TOEPLITZ, True, Case.NON_CONSTANT_SYMBOL)


def test_classify_single_rejects_pair_kinds():
    with pytest.raises(PreconditionError):
        classify_single(Kind.HANKEL_PRODUCT, parse_symbol('z', 1))


@given(st.sampled_from(TRUTH_TABLE), st.fractions(min_value=-9, max_value=9).filter(lambda c: c != 0))
def test_verdicts_scale_invariant(row, c):
    kind, n, f, g, _ = row
    f_poly = parse_symbol(f, n)
    g_poly = parse_symbol(g, n) if g else None
    plain = classify(Kind(kind), f_poly, g_poly)
    scaled = classify(Kind(kind), f_poly.scale(c), g_poly)
    assert (plain.bounded, plain.case) == (scaled.bounded, scaled.case)


def test_ray_validation():
    with pytest.raises(PreconditionError):
        RaySpec(E(0, 0), E(1, 0), (1, 2))
    with pytest.raises(PreconditionError):
        RaySpec(E(0), E(1), (4, 2))
    assert RaySpec(E(1, 2), E(1, 3), (2,)).alpha(2) == E(3, 8)
    assert geometric_t(64, 4096) == (64, 128, 256, 512, 1024, 2048, 4096)
    assert linear_t(1, 9, 4) == (1, 5, 9)


def test_default_ray():
    expr = parse_operator('HP(conj(z)^2; conj(z)^2)', 1)
    ray = default_ray(expr)
    assert ray.base == E(4)
    assert ray.direction == E(1)
    assert ray.t_values == geometric_t(64, 4096)
    assert expression_base(parse_operator('T(z1^2*conj(z2))', 2)) == E(2, 1)


@pytest.mark.parametrize('kind,params,expected', [
    (ProductKind.TOEPLITZ_MONO_PRODUCT, ((1,), (1,), (1,), (1,)), Fraction(2)),
    (ProductKind.HANKEL_MONO_PRODUCT, ((0,), (1,), (0,), (1,)), Fraction(0)),
    (ProductKind.HANKEL_MONO_PRODUCT, ((0,), (2,), (0,), (2,)), Fraction(1)),
])
def test_predicted_exponent(kind, params, expected):
    prediction = predicted_exponent(kind, [E(*p) for p in params], ONES1, SpaceParams(1, 0))
    assert prediction.exponent == expected
    assert not prediction.degenerate and prediction.asserted


def test_predicted_exponent_degenerate_and_weighted():
    ray = RaySpec(E(0, 0), E(1, 1), (1, 2))
    zero, e1, e2 = E(0, 0), E(1, 0), E(0, 1)
    prediction = predicted_exponent(ProductKind.HANKEL_MONO_PRODUCT, (zero, zero, zero, e1), ray, SpaceParams(2, 1))
    assert prediction.degenerate and prediction.exponent is None
    prediction = predicted_exponent(ProductKind.HANKEL_MONO_PRODUCT, (zero, e1, zero, e2), ray, SpaceParams(2, 0))
    assert prediction.degenerate
    prediction = predicted_exponent(ProductKind.HANKEL_MONO_PRODUCT, (zero, e1, zero, e2), ray, SpaceParams(2, 1))
    assert prediction.weight_correction and prediction.exponent == -1
    skewed = RaySpec(E(0, 0), E(1, 2), (1, 2))
    assert not predicted_exponent(ProductKind.TOEPLITZ_MONO_PRODUCT, (e1, zero, zero, zero), skewed,
                                  SpaceParams(2, 0)).asserted


def test_norm_sweep_is_exact_and_ordered():
    expr = parse_operator('T(z*conj(z)) * T(z*conj(z))', 1)
    ray = RaySpec(E(0), E(1), (1, 2, 4, 8))
    samples = norm_sweep(expr, SpaceParams(1, 0), ray)
    assert [s.t for s in samples] == [1, 2, 4, 8]
    assert [s.squared_norm for s in samples] == [(t + 1) ** 4 for t in (1, 2, 4, 8)]


def test_fit_constant_sequence():
    report = fit_exponent([(t, Fraction(1)) for t in (1, 2, 4, 8, 16)])
    assert abs(report.fitted_exponent) < 1e-12
    assert report.residual < 1e-12


def test_fit_exact_power():
    report = fit_exponent([(t, Fraction(t ** 6)) for t in (2, 4, 8, 16)])
    assert report.fitted_exponent == pytest.approx(3.0, abs=1e-9)


def test_fit_rejects():
    with pytest.raises(PreconditionError):
        fit_exponent([(1, 1), (2, 1), (4, 1)])
    with pytest.raises(PreconditionError):
        fit_exponent([(4, 1), (2, 1), (8, 1), (16, 1)])
    with pytest.raises(DegenerateSampleError):
        fit_exponent([(1, 1), (2, 0), (4, 1), (8, 1)])


@pytest.mark.parametrize('m', [0, 2])
def test_toeplitz_product_rate(m):
    expr = parse_operator('T(z*conj(z)) * T(z*conj(z))', 1)
    report = exponent_report(expr, SpaceParams(1, m), default_ray(expr))
    assert report.predicted_exponent == 2
    assert abs(report.fitted_exponent - 2) <= 0.05
    assert report.ratios and all(abs(r - 1) <= 0.02 for _, r in report.ratios)


def test_hankel_rates():
    expr = parse_operator('HP(conj(z)^2; conj(z)^2)', 1)
    report = exponent_report(expr, SpaceParams(1, 0), default_ray(expr))
    assert report.predicted_exponent == 1
    assert abs(report.fitted_exponent - 1) <= 0.05
    assert all(abs(r - 1) <= 0.02 for _, r in report.ratios)

    expr = parse_operator('HP(conj(z); conj(z))', 1)
    report = exponent_report(expr, SpaceParams(1, 0), default_ray(expr))
    assert abs(report.fitted_exponent) <= 0.02


def test_ratio_stabilization():
    samples = [(t, Fraction((t + 1) ** 4)) for t in (512, 1024, 2048, 4096)]
    ratios = ratio_stabilization(samples, 2, t_min=1024)
    assert [t for t, _ in ratios] == [1024, 2048]
    assert all(abs(r - 1) < 0.002 for _, r in ratios)
    with pytest.raises(DegenerateSampleError):
        ratio_stabilization([(1, 0), (2, 1)], 1)


@pytest.mark.parametrize('kind,n,f,g,bounded', [row for row in TRUTH_TABLE if row[:4] != ('hankel-product', 2, 'conj(z1)', 'conj(z1)')])
def test_verdicts_agree_with_exact_norms(kind, n, f, g, bounded):
    f_poly = parse_symbol(f, n)
    g_poly = parse_symbol(g, n) if g else None
    verdict = classify(Kind(kind), f_poly, g_poly)
    expr = verdict_operator(Kind(kind), f_poly, g_poly)
    ray = RaySpec(expression_base(expr), MultiIndex((1,) * n), geometric_t(64, 4096))
    samples = norm_sweep(expr, SpaceParams(n, 1), ray)
    check = corroborate(verdict, samples, Settings())
    assert check.agrees, check.witness


def test_corroboration_flags_two_variable_conjugate_linear_pair():
    f = parse_symbol('conj(z1)', 2)
    verdict = classify(Kind.HANKEL_PRODUCT, f, f)
    assert not verdict.bounded
    expr = verdict_operator(Kind.HANKEL_PRODUCT, f, f)
    samples = norm_sweep(expr, SpaceParams(2, 0), default_ray(expr))
    assert all(s.squared_norm == 1 for s in samples)
    check = corroborate(verdict, samples, Settings())
    assert not check.agrees
    assert check.growth == 1.0


def test_corroborate_zero_operator():
    zero = SymbolPolynomial.zero(1)
    verdict = classify(Kind.TOEPLITZ_PRODUCT, zero, parse_symbol('conj(z)', 1))
    samples = [Sample(t, E(t), Fraction(0)) for t in (1, 2, 4, 8)]
    check = corroborate(verdict, samples, Settings())
    assert check.agrees and check.fitted_exponent is None


def test_weight_corrected_hankel_rate():
    # disjoint supports at m >= 1: the weight factor alone keeps the coefficient alive
    expr = parse_operator('HP(conj(z1); conj(z2))', 2)
    ray = default_ray(expr)
    assert ray.base == E(1, 1)
    report = exponent_report(expr, SpaceParams(2, 1), ray)
    assert report.predicted.weight_correction
    assert report.predicted_exponent == -1
    assert abs(report.fitted_exponent + 1) <= 0.05


def test_hankel_product_with_holomorphic_symbol_corroborates():
    f, g = parse_symbol('z1', 2), parse_symbol('conj(z2)', 2)
    verdict = classify(Kind.HANKEL_PRODUCT, f, g)
    assert verdict.bounded and verdict.case is Case.F_HOLOMORPHIC
    expr = verdict_operator(Kind.HANKEL_PRODUCT, f, g)
    samples = norm_sweep(expr, SpaceParams(2, 1), default_ray(expr))
    assert all(s.squared_norm == 0 for s in samples)
    assert corroborate(verdict, samples, Settings()).agrees
