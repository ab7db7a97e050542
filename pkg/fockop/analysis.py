"""
Boundedness / compactness verdicts for Toeplitz and Hankel products with polynomial symbols, predicted
growth exponents of ||operator e_alpha|| along rays alpha(t) = base + t*direction, exact norm sweeps and
log-log fitting of the sampled norms.
"""
import enum
import logging
import math
import multiprocessing
import typing
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from fockop import config
from fockop.arith import MultiIndex
from fockop.fockop_exceptions import DegenerateSampleError, DimensionMismatchError, PreconditionError
from fockop.operators import (
    CompositionNode, HankelProductNode, OperatorExpr, SpaceParams, ToeplitzNode,
    apply_operator, basis_vector, hankel_validity_bound, hankel_vanishes, squared_norm,
)
from fockop.symbols import (
    SymbolPolynomial, conjugate_linear_coefficient, holomorphic_split, is_constant, is_holomorphic, pretty_print,
)

logger = logging.getLogger(__name__)


class Case(enum.Enum):
    BOTH_CONSTANT = 'BothConstant'
    ZERO_FACTOR = 'ZeroFactor'
    NON_CONSTANT_SYMBOL = 'NonConstantSymbol'
    CONSTANT = 'Constant'
    F_HOLOMORPHIC = 'FHolomorphic'
    G_HOLOMORPHIC = 'GHolomorphic'
    N1_CONJUGATE_LINEAR = 'N1ConjugateLinear'
    NEITHER_HOLOMORPHIC = 'NeitherHolomorphic'
    HOLOMORPHIC = 'Holomorphic'
    NOT_HOLOMORPHIC = 'NotHolomorphic'

    @property
    def holds(self) -> bool:
        return self not in (Case.NON_CONSTANT_SYMBOL, Case.NEITHER_HOLOMORPHIC, Case.NOT_HOLOMORPHIC)


class Kind(enum.Enum):
    TOEPLITZ_PRODUCT = 'toeplitz-product'
    HANKEL_PRODUCT = 'hankel-product'
    TOEPLITZ = 'toeplitz'
    HANKEL = 'hankel'
    HANKEL_COMPACT = 'hankel-compact'

    @property
    def property_name(self) -> str:
        return 'compact' if self is Kind.HANKEL_COMPACT else 'bounded'


@dataclass(frozen=True)
class Verdict:
    """bounded carries the truth of kind.property_name (compactness for hankel-compact)"""
    kind: Kind
    bounded: bool
    case: Case
    witness: typing.Optional[str] = None

    def __post_init__(self):
        assert self.case.holds == self.bounded, f'{self.case} is inconsistent with bounded={self.bounded}'


def _first_nonconstant(p: SymbolPolynomial) -> str:
    for (beta, gamma), c in p.items:
        if not (beta.is_zero() and gamma.is_zero()):
            return pretty_print(SymbolPolynomial.monomial(beta, gamma, c))
    return ''


def classify_toeplitz_product(f: SymbolPolynomial, g: SymbolPolynomial) -> Verdict:
    """T_f T_g is bounded iff f and g are constants; a zero factor gives the zero operator"""
    kind = Kind.TOEPLITZ_PRODUCT
    if f.is_zero() or g.is_zero():
        which = 'f' if f.is_zero() else 'g'
        return Verdict(kind, True, Case.ZERO_FACTOR, f'{which} = 0, so T_f T_g = 0')
    if is_constant(f) and is_constant(g):
        return Verdict(kind, True, Case.BOTH_CONSTANT)
    culprit, name = (f, 'f') if not is_constant(f) else (g, 'g')
    return Verdict(kind, False, Case.NON_CONSTANT_SYMBOL, f'{name} has the nonconstant term {_first_nonconstant(culprit)}')


def classify_hankel_product(f: SymbolPolynomial, g: SymbolPolynomial) -> Verdict:
    """
    H_f^* H_g is bounded iff f is holomorphic, or g is, or n = 1 and f = f1 + a conj(z), g = g1 + b conj(z).
    Cases are reported in that order.
    """
    if f.dimension != g.dimension:
        raise DimensionMismatchError(f'Symbols live in dimensions {f.dimension} and {g.dimension}')
    kind = Kind.HANKEL_PRODUCT
    if is_holomorphic(f):
        return Verdict(kind, True, Case.F_HOLOMORPHIC, 'H_f = 0')
    if is_holomorphic(g):
        return Verdict(kind, True, Case.G_HOLOMORPHIC, 'H_g = 0')
    a, b = conjugate_linear_coefficient(f), conjugate_linear_coefficient(g)
    if a is not None and b is not None:
        return Verdict(kind, True, Case.N1_CONJUGATE_LINEAR, f'H_f^* H_g = ({a.conjugate() * b}) I')
    f_rest, g_rest = holomorphic_split(f)[1], holomorphic_split(g)[1]
    witness = f'non-holomorphic parts {pretty_print(f_rest)} and {pretty_print(g_rest)}'
    if f.dimension > 1:
        witness += f'; the conjugate-linear case needs n = 1 (n = {f.dimension})'
    return Verdict(kind, False, Case.NEITHER_HOLOMORPHIC, witness)


def classify_single(kind: Kind, f: SymbolPolynomial) -> Verdict:
    if kind is Kind.TOEPLITZ:
        if is_constant(f):
            return Verdict(kind, True, Case.CONSTANT)
        return Verdict(kind, False, Case.NON_CONSTANT_SYMBOL, f'nonconstant term {_first_nonconstant(f)}')
    rest = holomorphic_split(f)[1]
    if kind is Kind.HANKEL:
        if rest.is_zero():
            return Verdict(kind, True, Case.HOLOMORPHIC)
        if conjugate_linear_coefficient(f) is not None:
            return Verdict(kind, True, Case.N1_CONJUGATE_LINEAR, f'non-holomorphic part {pretty_print(rest)}')
        return Verdict(kind, False, Case.NOT_HOLOMORPHIC, f'non-holomorphic part {pretty_print(rest)}')
    if kind is Kind.HANKEL_COMPACT:
        if rest.is_zero():
            return Verdict(kind, True, Case.HOLOMORPHIC)
        return Verdict(kind, False, Case.NOT_HOLOMORPHIC, f'non-holomorphic part {pretty_print(rest)}')
    raise PreconditionError(f'{kind.value} classifies a pair of symbols, not a single symbol')


def classify(kind: Kind, f: SymbolPolynomial, g: typing.Optional[SymbolPolynomial] = None) -> Verdict:
    if kind is Kind.TOEPLITZ_PRODUCT:
        return classify_toeplitz_product(f, g)
    if kind is Kind.HANKEL_PRODUCT:
        return classify_hankel_product(f, g)
    return classify_single(kind, f)


def verdict_operator(kind: Kind, f: SymbolPolynomial, g: typing.Optional[SymbolPolynomial] = None) -> OperatorExpr:
    """the operator whose norms corroborate a verdict of this kind"""
    if kind is Kind.TOEPLITZ_PRODUCT:
        return CompositionNode(ToeplitzNode(f), ToeplitzNode(g))
    if kind is Kind.HANKEL_PRODUCT:
        return HankelProductNode(f, g)
    if kind is Kind.TOEPLITZ:
        return ToeplitzNode(f)
    return HankelProductNode(f, f)


# ----------------------------------------------------------------- rays

@dataclass(frozen=True)
class RaySpec:
    base: MultiIndex
    direction: MultiIndex
    t_values: typing.Tuple[int, ...]

    def __post_init__(self):
        if self.base.dimension != self.direction.dimension:
            raise DimensionMismatchError(f'Ray base {self.base} and direction {self.direction} differ in dimension')
        if any(d < 1 for d in self.direction.components):
            raise PreconditionError(f'Ray direction components must be >= 1, got {self.direction}')
        ts = tuple(self.t_values)
        if not ts or ts[0] < 1 or any(b <= a for a, b in zip(ts, ts[1:])):
            raise PreconditionError(f't values must be positive and strictly increasing, got {ts}')
        object.__setattr__(self, 't_values', ts)

    def alpha(self, t: int) -> MultiIndex:
        return self.base + self.direction.scaled(t)

    @property
    def equal_direction(self) -> bool:
        return len(set(self.direction.components)) == 1


def geometric_t(lo: int, hi: int) -> typing.Tuple[int, ...]:
    if lo < 1 or hi < lo:
        raise PreconditionError(f'Invalid t range {lo}:{hi}')
    out, t = [], lo
    while t <= hi:
        out.append(t)
        t *= 2
    return tuple(out)


def linear_t(lo: int, hi: int, step: int = None) -> typing.Tuple[int, ...]:
    if lo < 1 or hi < lo:
        raise PreconditionError(f'Invalid t range {lo}:{hi}')
    step = step or max(1, (hi - lo) // 8)
    return tuple(range(lo, hi + 1, step))


def _symbols_of(expr: OperatorExpr) -> typing.Iterator[typing.Tuple[str, SymbolPolynomial, typing.Optional[SymbolPolynomial]]]:
    if isinstance(expr, ToeplitzNode):
        yield 'T', expr.f, None
    elif isinstance(expr, HankelProductNode):
        yield 'HP', expr.f, expr.g
    else:
        yield from _symbols_of(expr.left)
        yield from _symbols_of(expr.right)


def expression_base(expr: OperatorExpr) -> MultiIndex:
    """
    Componentwise max of the closed form validity bounds over every monomial pair of every HP node
    and of |beta - gamma| over every Toeplitz monomial.
    """
    n = expr.dimension
    best = [0] * n
    zero = MultiIndex.zero(n)

    def lift(bound: MultiIndex):
        for j, c in enumerate(bound.components):
            best[j] = max(best[j], c)

    for node, f, g in _symbols_of(expr):
        if node == 'T':
            for (beta, gamma), _ in f.items:
                lift(hankel_validity_bound(beta, gamma, zero, zero))
        else:
            for (beta, gamma), _ in f.items:
                for (mu, nu), _ in g.items:
                    lift(hankel_validity_bound(beta, gamma, mu, nu))
    return MultiIndex(tuple(best))


def default_ray(expr: OperatorExpr, t_values: typing.Sequence[int] = None) -> RaySpec:
    """smallest admissible base, all-ones direction, geometric t from 2^6 to 2^12"""
    t_values = t_values or geometric_t(config.T_LO, config.T_HI)
    return RaySpec(expression_base(expr), MultiIndex((1,) * expr.dimension), tuple(t_values))


# ----------------------------------------------------------------- exponents

class ProductKind(enum.Enum):
    TOEPLITZ_MONO_PRODUCT = 'ToeplitzMonoProduct'
    HANKEL_MONO_PRODUCT = 'HankelMonoProduct'


@dataclass(frozen=True)
class ExponentPrediction:
    exponent: typing.Optional[Fraction]
    degenerate: bool = False
    weight_correction: bool = False
    asserted: bool = True
    note: str = ''


def predicted_exponent(kind: ProductKind, params: typing.Sequence[MultiIndex], ray: RaySpec,
                       sp: SpaceParams) -> ExponentPrediction:
    """
    Exponent p with ||operator e_{alpha(t)}|| ~ t^p for monomial pairs.
    Toeplitz (theta, vartheta, phi, psi): |theta+vartheta+phi+psi| / 2.
    Hankel (beta, gamma, mu, nu): the same sum minus 1 while sum_j gamma_j nu_j > 0; when that sum is 0
    but m >= 1 the weight factor leaves a |alpha|^-2 correction, so minus 2; identically zero coefficients
    are flagged degenerate.
    """
    if len(params) != 4:
        raise PreconditionError(f'{kind.value} takes four multi-indices, got {len(params)}')
    sp.check(*params, ray.base)
    total = sum(idx.order for idx in params)
    base = Fraction(total, 2)
    asserted = ray.equal_direction
    if kind is ProductKind.TOEPLITZ_MONO_PRODUCT:
        return ExponentPrediction(base, asserted=asserted)
    beta, gamma, mu, nu = params
    if hankel_vanishes(beta, gamma, mu, nu, sp):
        return ExponentPrediction(None, degenerate=True, asserted=asserted,
                                  note='A_alpha vanishes identically on the validity range')
    if gamma.dot(nu) > 0:
        return ExponentPrediction(base - 1, asserted=asserted)
    return ExponentPrediction(base - 2, weight_correction=True, asserted=asserted,
                              note='disjoint gamma/nu supports: leading term comes from the |z|^2m weight')


def _single_monomial(p: SymbolPolynomial) -> typing.Optional[typing.Tuple[MultiIndex, MultiIndex]]:
    if len(p.items) != 1:
        return None
    return p.items[0][0]


def predicted_for_expression(expr: OperatorExpr, ray: RaySpec, sp: SpaceParams) -> typing.Optional[ExponentPrediction]:
    """prediction when expr is T(mono), T(mono)*T(mono) or HP(mono; mono); None otherwise"""
    zero = MultiIndex.zero(expr.dimension)
    if isinstance(expr, ToeplitzNode) and _single_monomial(expr.f):
        beta, gamma = _single_monomial(expr.f)
        return predicted_exponent(ProductKind.TOEPLITZ_MONO_PRODUCT, (beta, gamma, zero, zero), ray, sp)
    if isinstance(expr, CompositionNode) and isinstance(expr.left, ToeplitzNode) and isinstance(expr.right, ToeplitzNode):
        left, right = _single_monomial(expr.left.f), _single_monomial(expr.right.f)
        if left and right:
            return predicted_exponent(ProductKind.TOEPLITZ_MONO_PRODUCT, left + right, ray, sp)
    if isinstance(expr, HankelProductNode):
        f, g = _single_monomial(expr.f), _single_monomial(expr.g)
        if f and g:
            return predicted_exponent(ProductKind.HANKEL_MONO_PRODUCT, f + g, ray, sp)
    return None


# ----------------------------------------------------------------- sampling and fitting

@dataclass(frozen=True)
class Sample:
    t: int
    alpha: MultiIndex
    squared_norm: Fraction


def _sample(job) -> Sample:
    expr, sp, t, alpha = job
    return Sample(t, alpha, squared_norm(apply_operator(expr, basis_vector(alpha, sp))))


def norm_sweep(expr: OperatorExpr, sp: SpaceParams, ray: RaySpec, jobs: int = 1) -> typing.List[Sample]:
    """
    Exact ||expr e_{alpha(t)}||^2 for every t of the ray, ordered by t whatever the completion order.
    """
    if expr.dimension != sp.n or ray.base.dimension != sp.n:
        raise DimensionMismatchError(f'Operator, ray and space disagree on n={sp.n}')
    work = [(expr, sp, t, ray.alpha(t)) for t in ray.t_values]
    if jobs > 1 and len(work) > 1:
        logger.debug(f'sampling {len(work)} points of {expr} with {jobs} workers')
        with multiprocessing.Pool(processes=jobs) as pool:
            samples = pool.map(_sample, work)
    else:
        samples = [_sample(job) for job in work]
    for s in samples:
        logger.debug(f't={s.t} alpha={s.alpha} |.|^2 has {s.squared_norm.numerator.bit_length()} bits')
    return sorted(samples, key=lambda s: s.t)


def log_fraction(x: Fraction) -> float:
    """natural log of a positive rational of any size"""
    return math.log(x.numerator) - math.log(x.denominator)


@dataclass(frozen=True)
class ExponentReport:
    fitted_exponent: float
    residual: float
    samples: typing.Tuple[typing.Tuple[int, Fraction], ...]
    predicted: typing.Optional[ExponentPrediction] = None
    ratios: typing.Tuple[typing.Tuple[int, float], ...] = field(default=())

    @property
    def predicted_exponent(self) -> typing.Optional[Fraction]:
        return self.predicted.exponent if self.predicted else None


def fit_exponent(samples: typing.Sequence[typing.Tuple[int, Fraction]],
                 predicted: ExponentPrediction = None) -> ExponentReport:
    """
    Least squares slope of (log t, 1/2 log ||.||^2), i.e. the amplitude exponent.
    residual is the largest deviation of the fitted line relative to max(|log amplitude|, 1).
    """
    samples = tuple((int(t), Fraction(v)) for t, v in samples)
    if len(samples) < config.MIN_FIT_SAMPLES:
        raise PreconditionError(f'Need at least {config.MIN_FIT_SAMPLES} samples to fit, got {len(samples)}')
    ts = [t for t, _ in samples]
    if ts[0] < 1 or any(b <= a for a, b in zip(ts, ts[1:])):
        raise PreconditionError(f't values must be positive and strictly increasing, got {ts}')
    zero_at = [t for t, v in samples if v <= 0]
    if zero_at:
        raise DegenerateSampleError(f'The operator annihilates the ray at t={zero_at}; no exponent to fit')
    x = np.log(np.array(ts, dtype=float))
    y = np.array([0.5 * log_fraction(v) for _, v in samples])
    slope, intercept = np.polyfit(x, y, 1)
    deviation = np.abs(y - (slope * x + intercept)) / np.maximum(np.abs(y), 1.0)
    report = ExponentReport(float(slope), float(deviation.max()), samples, predicted)
    logger.debug(f'fitted amplitude exponent {report.fitted_exponent:.6f} over t={ts[0]}..{ts[-1]}')
    return report


def ratio_stabilization(samples: typing.Sequence[typing.Tuple[int, Fraction]], exponent,
                        t_min: int = 1) -> typing.List[typing.Tuple[int, float]]:
    """
    ||e_{alpha(2t)}|| / (||e_{alpha(t)}|| 2^exponent) for every sampled t >= t_min whose double is sampled.
    """
    table = {int(t): Fraction(v) for t, v in samples}
    ratios = []
    for t in sorted(table):
        if t < t_min or 2 * t not in table:
            continue
        if table[t] == 0 or table[2 * t] == 0:
            raise DegenerateSampleError(f'Zero norm at t={t} or t={2 * t}')
        log_ratio = 0.5 * (log_fraction(table[2 * t]) - log_fraction(table[t])) - float(exponent) * math.log(2)
        ratios.append((t, math.exp(log_ratio)))
    return ratios


def exponent_report(expr: OperatorExpr, sp: SpaceParams, ray: RaySpec, jobs: int = 1,
                    ratio_t_min: int = 1024) -> ExponentReport:
    """sweep, fit, and attach the prediction and the Stirling ratios when expr is a monomial product"""
    samples = norm_sweep(expr, sp, ray, jobs)
    predicted = predicted_for_expression(expr, ray, sp)
    report = fit_exponent([(s.t, s.squared_norm) for s in samples], predicted)
    if predicted and predicted.exponent is not None:
        ratios = ratio_stabilization(report.samples, predicted.exponent, ratio_t_min)
        report = ExponentReport(report.fitted_exponent, report.residual, report.samples, predicted, tuple(ratios))
    return report


# ----------------------------------------------------------------- corroboration

@dataclass(frozen=True)
class Corroboration:
    agrees: bool
    growth: float
    fitted_exponent: typing.Optional[float]
    witness: str


def corroborate(verdict: Verdict, samples: typing.Sequence[Sample], settings: config.Settings = None,
                growth_limit: float = 4.0, min_exponent: float = 0.4) -> Corroboration:
    """
    Compare a verdict with exact norms along a ray. Bounded: ||.||^2 never exceeds growth_limit times its
    first value. Unbounded: fitted amplitude exponent >= min_exponent. Compact: norms vanish or decay.
    """
    settings = settings or config.get_settings()
    values = [s.squared_norm for s in samples]
    nonzero = all(v > 0 for v in values)
    growth = float(max(values) / values[0]) if values[0] > 0 else (0.0 if not any(values) else math.inf)
    fitted = fit_exponent([(s.t, s.squared_norm) for s in samples]).fitted_exponent if nonzero else None
    if verdict.kind is Kind.HANKEL_COMPACT:
        decays = not any(values) or (fitted is not None and fitted < -settings.fit_tol)
        agrees = decays == verdict.bounded
        witness = 'norms vanish or decay' if decays else 'norms do not decay'
    elif verdict.bounded:
        agrees = growth <= growth_limit
        witness = f'max ||.||^2 / first = {growth:.4g}'
    else:
        agrees = fitted is not None and fitted >= min_exponent
        witness = f'fitted amplitude exponent {fitted:.4f}' if fitted is not None else 'operator annihilates the ray'
    if not agrees:
        logger.warning(f'{verdict.kind.value} verdict {verdict.case.value} disagrees with exact norms: {witness}')
    return Corroboration(agrees, growth, fitted, witness)
