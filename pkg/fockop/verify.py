"""
Verification suites behind `fockop verify`: exact orthonormality of the monomial basis, the Hankel
closed form against operator composition, and the exact engine against the floating point oracle.
Each suite returns a SuiteResult; a failed check is recorded, never raised.
"""
import itertools
import logging
import typing
from dataclasses import dataclass, field
from fractions import Fraction

from fockop import config
from fockop.arith import MultiIndex
from fockop.fockop_exceptions import InvariantViolation, PreconditionError
from fockop.operators import (
    SpaceParams, basis_coefficient, basis_vector, hankel_coeff_closed_form, hankel_product_apply,
    hankel_validity_bound, hankel_vanishes, monomial_inner, multiindices_upto,
)
from fockop.oracle import Method, OracleEstimate, oracle_inner, relative_error
from fockop.symbols import SymbolPolynomial

logger = logging.getLogger(__name__)

# failures kept in a result; the count is always exact
MAX_REPORTED_FAILURES = 20

SUITES = ('orthonormality', 'hankel-closed-form', 'oracle')


@dataclass
class SuiteResult:
    suite: str
    checked: int = 0
    failed: int = 0
    failures: typing.List[str] = field(default_factory=list)
    counters: typing.Dict[str, int] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failed == 0

    def record(self, ok: bool, message: str = ''):
        self.checked += 1
        if not ok:
            self.failed += 1
            if len(self.failures) < MAX_REPORTED_FAILURES:
                self.failures.append(message)
            logger.debug(f'{self.suite}: {message}')

    def count(self, key: str):
        self.counters[key] = self.counters.get(key, 0) + 1


# ----------------------------------------------------------------- orthonormality

def basis_inner(alpha: MultiIndex, eta: MultiIndex, sp: SpaceParams) -> Fraction:
    """
    <e_alpha, e_eta> = c_alpha conj(c_eta) <z^alpha, z^eta>_m, exactly
    """
    raw = monomial_inner(alpha, eta, sp)
    if raw == 0:
        return Fraction(0)
    product = basis_coefficient(alpha, sp) * basis_coefficient(eta, sp).conjugate()
    if product.radicand != 1 or not product.rational_part.is_real():
        raise InvariantViolation(f'<e[{alpha}], e[{eta}]> is not rational: {product} * {raw}')
    return product.rational_part.re * raw


def verify_orthonormality(ns: typing.Sequence[int] = (1, 2, 3), ms: typing.Sequence[int] = (0, 1, 2, 3),
                          max_order: int = 8) -> SuiteResult:
    result = SuiteResult('orthonormality')
    for n, m in itertools.product(ns, ms):
        sp = SpaceParams(n, m)
        indices = multiindices_upto(n, max_order)
        for alpha, eta in itertools.product(indices, indices):
            try:
                value = basis_inner(alpha, eta, sp)
            except InvariantViolation as e:
                result.record(False, f'n={n} m={m}: {e}')
                continue
            expected = Fraction(1) if alpha == eta else Fraction(0)
            result.record(value == expected, f'n={n} m={m}: <e[{alpha}], e[{eta}]> = {value}')
        logger.info(f'orthonormality n={n} m={m}: {len(indices)} basis vectors checked')
    return result


# ----------------------------------------------------------------- hankel closed form

def _indices_upto_component(n: int, max_component: int) -> typing.List[MultiIndex]:
    return [MultiIndex(c) for c in itertools.product(range(max_component + 1), repeat=n)]


def _alphas_in_range(bound: MultiIndex, max_alpha: int) -> typing.Iterator[MultiIndex]:
    ranges = [range(b, max_alpha + 1) for b in bound.components]
    return (MultiIndex(c) for c in itertools.product(*ranges))


def check_closed_form(beta: MultiIndex, gamma: MultiIndex, mu: MultiIndex, nu: MultiIndex, sp: SpaceParams,
                      max_alpha: int, result: SuiteResult):
    """closed form == composition on the validity range, and the vanishing criteria"""
    origin = MultiIndex.zero(sp.n)
    f = SymbolPolynomial.monomial(beta, gamma)
    g = SymbolPolynomial.monomial(mu, nu)
    label = f'n={sp.n} m={sp.m} beta={beta} gamma={gamma} mu={mu} nu={nu}'
    any_nonzero = False
    for alpha in _alphas_in_range(hankel_validity_bound(beta, gamma, mu, nu), max_alpha):
        closed = hankel_coeff_closed_form(beta, gamma, mu, nu, alpha, sp)
        image = hankel_product_apply(f, g, basis_vector(alpha, sp))
        eta = alpha.offset(gamma + mu, beta + nu)
        stray = [k for k, _ in image.items if k != eta]
        ok = image.coefficient(eta) == closed and not stray
        result.record(ok, f'{label} alpha={alpha}: closed form {closed} vs engine {image}')
        any_nonzero = any_nonzero or not closed.is_zero()
    vanishes = hankel_vanishes(beta, gamma, mu, nu, sp)
    result.record(vanishes != any_nonzero, f'{label}: vanishes={vanishes} but nonzero coefficient seen={any_nonzero}')
    # "A_alpha = 0 iff gamma = 0 or nu = 0" holds as stated for n = 1 and for m >= 1
    if sp.n == 1 or sp.m >= 1:
        stated = gamma == origin or nu == origin
        result.record(stated != any_nonzero, f'{label}: stated vanishing criterion {stated} vs nonzero={any_nonzero}')
        result.count('stated_criterion_checks')
    elif vanishes and not (gamma == origin or nu == origin):
        result.count('disjoint_support_vanishing')


def verify_hankel_closed_form(ns: typing.Sequence[int] = (1, 2), ms: typing.Sequence[int] = (0, 1, 2),
                              max_component: int = 2, max_alpha: int = 12) -> SuiteResult:
    if max_alpha < 2 * max_component + 1:
        raise PreconditionError(f'max_alpha={max_alpha} leaves no room above the validity bound 2*{max_component}')
    result = SuiteResult('hankel-closed-form')
    for n, m in itertools.product(ns, ms):
        sp = SpaceParams(n, m)
        indices = _indices_upto_component(n, max_component)
        for beta, gamma, mu, nu in itertools.product(indices, repeat=4):
            check_closed_form(beta, gamma, mu, nu, sp, max_alpha, result)
        logger.info(f'hankel closed form n={n} m={m}: {result.checked} checks so far, {result.failed} failed')
    return result


# ----------------------------------------------------------------- oracle

def oracle_norm_check(a: MultiIndex, b: MultiIndex, sp: SpaceParams, method: Method,
                      settings: config.Settings) -> typing.Tuple[Fraction, OracleEstimate, float]:
    """(exact <z^a, z^b>_m, oracle estimate, relative error)"""
    exact = monomial_inner(a, b, sp)
    estimate = oracle_inner(a, b, sp, method, settings)
    return exact, estimate, relative_error(exact, estimate)


def verify_oracle(settings: config.Settings = None, n1_ms: typing.Sequence[int] = (0, 1, 2, 3),
                  n1_max_order: int = 10, mc_ms: typing.Sequence[int] = (0, 1, 2), mc_max_order: int = 4,
                  rel_tol: float = 1e-10, k: float = 3.0) -> SuiteResult:
    """
    n = 1: RadialQuadrature and GammaIdentity within rel_tol of the exact value, and of each other.
    n = 2: MonteCarlo brackets the exact value within k standard errors, diagonal and one off-diagonal pair.
    """
    settings = settings or config.get_settings()
    result = SuiteResult('oracle')
    for m in n1_ms:
        sp = SpaceParams(1, m)
        for order in range(n1_max_order + 1):
            a = MultiIndex.of(order)
            _, radial, radial_err = oracle_norm_check(a, a, sp, Method.RADIAL_QUADRATURE, settings)
            _, gamma, gamma_err = oracle_norm_check(a, a, sp, Method.GAMMA_IDENTITY, settings)
            result.record(radial_err <= rel_tol, f'n=1 m={m} a={a}: RadialQuadrature relative error {radial_err:.3e}')
            result.record(gamma_err <= rel_tol, f'n=1 m={m} a={a}: GammaIdentity relative error {gamma_err:.3e}')
            spread = abs(radial.value - gamma.value) / abs(gamma.value)
            result.record(spread <= rel_tol, f'n=1 m={m} a={a}: quadrature vs Gamma identity {spread:.3e}')
    for m in mc_ms:
        sp = SpaceParams(2, m)
        pairs = [(a, a) for a in multiindices_upto(2, mc_max_order)] + [(MultiIndex.of(1, 0), MultiIndex.of(0, 1))]
        for a, b in pairs:
            exact, estimate, _ = oracle_norm_check(a, b, sp, Method.MONTE_CARLO, settings)
            ok = estimate.brackets(float(exact), k)
            result.record(ok, f'n=2 m={m} a={a} b={b}: Monte Carlo {estimate.value:.6g} '
                              f'+- {estimate.standard_error:.3g} vs exact {float(exact):.6g}')
            result.count('monte_carlo_cases')
        logger.info(f'oracle Monte Carlo m={m}: {len(pairs)} cases, {settings.samples} samples each')
    return result
