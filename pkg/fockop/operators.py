"""
Exact action of Toeplitz operators, their products and Hankel products H_f^* H_g on the
orthonormal monomial basis e_alpha of the Fock-Sobolev space F^{2,m}(C^n).

Every coefficient is rational * sqrt(rational). For a chain of operators starting from e_alpha the
coefficient in front of e_eta always lies in the class sqrt(N(alpha)/N(eta)), N being the squared
norm of a monomial, so contributions to one target share a radicand and merge exactly.
"""
import itertools
import logging
import typing
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from fockop.arith import (
    FactorialRatio, GaussianRational, MultiIndex, ONE, RadicalCoefficient,
    factorial_ratio_eval, multiindex_compare, sqrt_factorial_ratio,
)
from fockop.fockop_exceptions import DimensionMismatchError, PreconditionError
from fockop.symbols import SymbolPolynomial, conjugate, pretty_print

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SpaceParams:
    n: int
    m: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise PreconditionError(f'Dimension n must be at least 1, got {self.n}')
        if self.m < 0:
            raise PreconditionError(f'Sobolev order m must be nonnegative, got {self.m}')

    @property
    def weight(self) -> int:
        """m + n - 1"""
        return self.m + self.n - 1

    def check(self, *indices: MultiIndex):
        for idx in indices:
            if idx.dimension != self.n:
                raise DimensionMismatchError(f'Multi-index {idx} does not live in dimension {self.n}')


def monomial_norm_ratio(a: MultiIndex, sp: SpaceParams) -> FactorialRatio:
    """
    <z^a, z^a>_m = a!(n-1)!(m+n-1+|a|)! / ((m+n-1)!(n-1+|a|)!)
    """
    return FactorialRatio(a.factorial_terms() + (sp.n - 1, sp.weight + a.order),
                          (sp.weight, sp.n - 1 + a.order))


def monomial_inner(a: MultiIndex, b: MultiIndex, sp: SpaceParams) -> Fraction:
    sp.check(a, b)
    if a != b:
        return Fraction(0)
    return factorial_ratio_eval(monomial_norm_ratio(a, sp))


def basis_coefficient(alpha: MultiIndex, sp: SpaceParams) -> RadicalCoefficient:
    """the normalizing constant of e_alpha = c_alpha z^alpha"""
    sp.check(alpha)
    return sqrt_factorial_ratio(monomial_norm_ratio(alpha, sp).inverse())


@lru_cache(maxsize=1 << 16)
def toeplitz_mono_apply(beta: MultiIndex, gamma: MultiIndex, alpha: MultiIndex,
                        sp: SpaceParams) -> typing.Optional[typing.Tuple[MultiIndex, RadicalCoefficient]]:
    """
    T_{z^beta conj(z)^gamma} e_alpha = N(alpha+beta) / sqrt(N(alpha) N(eta)) e_eta, eta = alpha+beta-gamma,
    and the zero vector (None) unless eta >= 0 componentwise.
    """
    sp.check(beta, gamma, alpha)
    eta = alpha.offset(beta, gamma)
    if eta is None:
        return None
    lifted = monomial_norm_ratio(alpha + beta, sp)
    squared = lifted * lifted * monomial_norm_ratio(alpha, sp).inverse() * monomial_norm_ratio(eta, sp).inverse()
    return eta, sqrt_factorial_ratio(squared)


def _sorted_items(coeffs: typing.Dict[MultiIndex, RadicalCoefficient]):
    return tuple(sorted(((k, c) for k, c in coeffs.items() if not c.is_zero()), key=lambda kv: kv[0].sort_key()))


@dataclass(frozen=True)
class BasisExpansion:
    """
    Finite sum of coeff * e_alpha, keys kept in lexicographic multi-index order.
    """
    space: SpaceParams
    items: typing.Tuple[typing.Tuple[MultiIndex, RadicalCoefficient], ...] = ()

    @classmethod
    def from_contributions(cls, space: SpaceParams,
                           contributions: typing.Iterable[typing.Tuple[MultiIndex, RadicalCoefficient]]) -> 'BasisExpansion':
        """merge contributions per target; unlike radicands raise InvariantViolation"""
        merged: typing.Dict[MultiIndex, RadicalCoefficient] = {}
        for alpha, coeff in contributions:
            space.check(alpha)
            merged[alpha] = merged.get(alpha, RadicalCoefficient.zero()) + coeff
        return cls(space, _sorted_items(merged))

    @classmethod
    def zero(cls, space: SpaceParams) -> 'BasisExpansion':
        return cls(space, ())

    @property
    def coeffs(self) -> typing.Dict[MultiIndex, RadicalCoefficient]:
        return dict(self.items)

    def coefficient(self, eta: MultiIndex) -> RadicalCoefficient:
        return self.coeffs.get(eta, RadicalCoefficient.zero())

    def is_zero(self) -> bool:
        return not self.items

    def _check(self, other: 'BasisExpansion'):
        if self.space != other.space:
            raise DimensionMismatchError(f'Expansions live in different spaces {self.space} and {other.space}')

    def __add__(self, other: 'BasisExpansion') -> 'BasisExpansion':
        self._check(other)
        return BasisExpansion.from_contributions(self.space, self.items + other.items)

    def __neg__(self) -> 'BasisExpansion':
        return self.scale(-ONE)

    def __sub__(self, other: 'BasisExpansion') -> 'BasisExpansion':
        return self + (-other)

    def scale(self, c) -> 'BasisExpansion':
        return BasisExpansion.from_contributions(self.space, [(k, v.scale(c)) for k, v in self.items])

    def __str__(self):
        if self.is_zero():
            return '0'
        return ' + '.join(f'{c}*e[{k}]' for k, c in self.items)


def basis_vector(alpha: MultiIndex, sp: SpaceParams, coeff=ONE) -> BasisExpansion:
    sp.check(alpha)
    return BasisExpansion.from_contributions(sp, [(alpha, RadicalCoefficient.rational(coeff))])


def squared_norm(v: BasisExpansion) -> Fraction:
    """Parseval over the orthonormal basis"""
    return sum((c.abs2() for _, c in v.items), Fraction(0))


def _check_symbol(f: SymbolPolynomial, v: BasisExpansion):
    if f.dimension != v.space.n:
        raise DimensionMismatchError(f'Symbol {pretty_print(f)} has dimension {f.dimension}, space has n={v.space.n}')


def toeplitz_apply(f: SymbolPolynomial, v: BasisExpansion) -> BasisExpansion:
    _check_symbol(f, v)
    contributions = []
    for (beta, gamma), a in f.items:
        for alpha, c in v.items:
            hit = toeplitz_mono_apply(beta, gamma, alpha, v.space)
            if hit is None:
                continue
            target, coeff = hit
            contributions.append((target, (coeff * c).scale(a)))
    return BasisExpansion.from_contributions(v.space, contributions)


def hankel_product_apply(f: SymbolPolynomial, g: SymbolPolynomial, v: BasisExpansion) -> BasisExpansion:
    """
    H_f^* H_g v = T_{conj(f) g} v - T_{conj(f)} T_g v, valid for every v
    """
    _check_symbol(f, v)
    _check_symbol(g, v)
    f_bar = conjugate(f)
    return toeplitz_apply(f_bar * g, v) - toeplitz_apply(f_bar, toeplitz_apply(g, v))


def projection_apply(a: MultiIndex, b: MultiIndex, sp: SpaceParams) -> BasisExpansion:
    """
    P_m(z^a conj(z)^b) = N(a) / sqrt(N(a-b)) e_{a-b}, or 0 when a-b is not >= 0.
    """
    sp.check(a, b)
    eta = a.offset(MultiIndex.zero(sp.n), b)
    if eta is None:
        return BasisExpansion.zero(sp)
    lifted = monomial_norm_ratio(a, sp)
    coeff = sqrt_factorial_ratio(lifted * lifted * monomial_norm_ratio(eta, sp).inverse())
    return BasisExpansion.from_contributions(sp, [(eta, coeff)])


def hankel_validity_bound(beta: MultiIndex, gamma: MultiIndex, mu: MultiIndex, nu: MultiIndex) -> MultiIndex:
    """(|gamma_j - beta_j| + |mu_j - nu_j|)_j, the smallest alpha the closed form admits"""
    return MultiIndex(tuple(abs(g - b) + abs(u - v) for b, g, u, v in
                            zip(beta.components, gamma.components, mu.components, nu.components)))


def _shift(alpha: MultiIndex, plus: typing.Sequence[MultiIndex], minus: typing.Sequence[MultiIndex] = ()) -> MultiIndex:
    comps = list(alpha.components)
    for idx in plus:
        comps = [c + d for c, d in zip(comps, idx.components)]
    for idx in minus:
        comps = [c - d for c, d in zip(comps, idx.components)]
    return MultiIndex(tuple(comps))


def hankel_coeff_closed_form(beta: MultiIndex, gamma: MultiIndex, mu: MultiIndex, nu: MultiIndex,
                             alpha: MultiIndex, sp: SpaceParams) -> RadicalCoefficient:
    """
    A_alpha with H^*_{z^beta conj(z)^gamma} H_{z^mu conj(z)^nu} e_alpha = A_alpha e_{alpha+gamma+mu-beta-nu},
    for alpha in the validity range only; elsewhere use hankel_product_apply.
    """
    sp.check(beta, gamma, mu, nu, alpha)
    bound = hankel_validity_bound(beta, gamma, mu, nu)
    if not multiindex_compare(alpha, bound).ge:
        raise PreconditionError(f'alpha={alpha} is outside the closed form validity range alpha >= {bound}')
    n1, w = sp.n - 1, sp.weight
    agm = _shift(alpha, (gamma, mu))
    am = _shift(alpha, (mu,))
    amn = _shift(alpha, (mu,), (nu,))
    agmn = _shift(alpha, (gamma, mu), (nu,))
    eta = _shift(alpha, (gamma, mu), (beta, nu))
    first = FactorialRatio(agm.components + (w + agm.order,), alpha.components + (n1 + agm.order,))
    second = FactorialRatio(
        am.components + agmn.components + (w + am.order, n1 + amn.order, w + agmn.order),
        alpha.components + amn.components + (n1 + am.order, w + amn.order, n1 + agmn.order))
    bracket = factorial_ratio_eval(first) - factorial_ratio_eval(second)
    radical = FactorialRatio(alpha.components + (n1 + alpha.order, n1 + eta.order),
                             eta.components + (w + alpha.order, w + eta.order))
    return sqrt_factorial_ratio(radical, bracket)


def hankel_vanishes(beta: MultiIndex, gamma: MultiIndex, mu: MultiIndex, nu: MultiIndex, sp: SpaceParams) -> bool:
    """
    True when A_alpha is identically zero on the validity range: gamma = 0, nu = 0, or (m = 0 and
    gamma, nu have disjoint supports). For m >= 1 the weight factor keeps the disjoint case nonzero.
    """
    sp.check(beta, gamma, mu, nu)
    if gamma.is_zero() or nu.is_zero():
        return True
    return sp.m == 0 and gamma.dot(nu) == 0


def toeplitz_product_coeff_closed_form(theta: MultiIndex, vartheta: MultiIndex, phi: MultiIndex, psi: MultiIndex,
                                       alpha: MultiIndex, sp: SpaceParams
                                       ) -> typing.Optional[typing.Tuple[MultiIndex, RadicalCoefficient]]:
    """
    Coefficient of T_{z^theta conj(z)^vartheta} T_{z^phi conj(z)^psi} e_alpha written as one factorial
    ratio: N(alpha+phi) N(alpha'+theta) / (N(alpha') N(alpha)) * sqrt(N(alpha)/N(eta)),
    alpha' = alpha+phi-psi, eta = alpha'+theta-vartheta.
    """
    sp.check(theta, vartheta, phi, psi, alpha)
    middle = alpha.offset(phi, psi)
    if middle is None:
        return None
    eta = middle.offset(theta, vartheta)
    if eta is None:
        return None
    norm = lambda idx: monomial_norm_ratio(idx, sp)
    rational = factorial_ratio_eval(norm(alpha + phi) * norm(middle + theta) * norm(middle).inverse() * norm(alpha).inverse())
    return eta, sqrt_factorial_ratio(norm(alpha) * norm(eta).inverse(), rational)


# ------------------------------------------------------------ operator expressions

@dataclass(frozen=True)
class ToeplitzNode:
    f: SymbolPolynomial

    @property
    def dimension(self) -> int:
        return self.f.dimension

    def __str__(self):
        return f'T({pretty_print(self.f)})'


@dataclass(frozen=True)
class HankelProductNode:
    f: SymbolPolynomial
    g: SymbolPolynomial

    def __post_init__(self):
        if self.f.dimension != self.g.dimension:
            raise DimensionMismatchError(f'HP symbols have dimensions {self.f.dimension} and {self.g.dimension}')

    @property
    def dimension(self) -> int:
        return self.f.dimension

    def __str__(self):
        return f'HP({pretty_print(self.f)}; {pretty_print(self.g)})'


@dataclass(frozen=True)
class CompositionNode:
    left: 'OperatorExpr'
    right: 'OperatorExpr'

    def __post_init__(self):
        if self.left.dimension != self.right.dimension:
            raise DimensionMismatchError(
                f'Cannot compose operators of dimension {self.left.dimension} and {self.right.dimension}')

    @property
    def dimension(self) -> int:
        return self.left.dimension

    def __str__(self):
        return f'{self.left} * {self.right}'


OperatorExpr = typing.Union[ToeplitzNode, HankelProductNode, CompositionNode]


def apply_operator(expr: OperatorExpr, v: BasisExpansion) -> BasisExpansion:
    """CompositionNode(L, R) applies R first"""
    if expr.dimension != v.space.n:
        raise DimensionMismatchError(f'Operator {expr} has dimension {expr.dimension}, space has n={v.space.n}')
    if isinstance(expr, ToeplitzNode):
        return toeplitz_apply(expr.f, v)
    if isinstance(expr, HankelProductNode):
        return hankel_product_apply(expr.f, expr.g, v)
    if isinstance(expr, CompositionNode):
        return apply_operator(expr.left, apply_operator(expr.right, v))
    raise TypeError(f'Unknown operator node {type(expr).__name__}')


def matrix_entry(expr: OperatorExpr, alpha: MultiIndex, eta: MultiIndex, sp: SpaceParams) -> RadicalCoefficient:
    """<expr e_alpha, e_eta>"""
    sp.check(alpha, eta)
    return apply_operator(expr, basis_vector(alpha, sp)).coefficient(eta)


def multiindices_upto(n: int, order: int) -> typing.List[MultiIndex]:
    """all alpha in N^n with |alpha| <= order, lexicographic"""
    return [MultiIndex(c) for c in itertools.product(range(order + 1), repeat=n) if sum(c) <= order]


def finite_section(expr: OperatorExpr, sp: SpaceParams, max_order: int
                   ) -> typing.List[typing.Tuple[MultiIndex, MultiIndex, RadicalCoefficient]]:
    """
    Nonzero entries <expr e_alpha, e_eta> with |alpha|, |eta| <= max_order.
    """
    entries = []
    for alpha in multiindices_upto(sp.n, max_order):
        image = apply_operator(expr, basis_vector(alpha, sp))
        for eta, coeff in image.items:
            if eta.order <= max_order:
                entries.append((alpha, eta, coeff))
    logger.debug(f'finite section of {expr} up to order {max_order}: {len(entries)} nonzero entries')
    return entries
