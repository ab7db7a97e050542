"""
Floating point oracle for the exact engine. Nothing here touches the factorial-ratio code of
fockop.arith: inner products are recomputed by radial quadrature (n = 1), by log-Gamma identities,
or by Monte Carlo over the standard complex Gaussian.
"""
import enum
import logging
import math
import multiprocessing
import typing
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from fockop import config
from fockop.arith import MultiIndex
from fockop.fockop_exceptions import PreconditionError
from fockop.operators import SpaceParams

logger = logging.getLogger(__name__)


class Method(enum.Enum):
    RADIAL_QUADRATURE = 'RadialQuadrature'
    GAMMA_IDENTITY = 'GammaIdentity'
    MONTE_CARLO = 'MonteCarlo'


@dataclass(frozen=True)
class OracleEstimate:
    value: float
    method: Method
    error_bound: float = 0.0
    standard_error: typing.Optional[float] = None
    samples: typing.Optional[int] = None

    def __post_init__(self):
        assert self.error_bound >= 0, f'negative error bound {self.error_bound}'
        if self.standard_error is not None:
            assert self.samples, "sampled estimates carry their sample count"

    def brackets(self, exact: float, k: float = 3.0) -> bool:
        """exact lies within k standard errors (Monte Carlo) or within the error bound"""
        spread = k * self.standard_error if self.standard_error is not None else self.error_bound
        return abs(self.value - exact) <= spread


def relative_error(exact, estimate: OracleEstimate) -> float:
    exact = float(exact)
    if exact == 0:
        return abs(estimate.value)
    return abs(estimate.value - exact) / abs(exact)


# ----------------------------------------------------------------- radial quadrature

def _tail_cutoff(k: int, fraction: float) -> float:
    """
    U with Gamma(k+1, U) <= U^k e^-U / (1 - k/U) below fraction * Gamma(k+1).
    """
    target = math.log(fraction) + float(gammaln(k + 1))
    u = max(2.0 * (k + 1), 10.0)
    for _ in range(config.MAX_TAIL_STEPS):
        bound = k * math.log(u) - u - math.log(1 - k / u)
        if bound < target:
            return u
        u *= 1.25
    raise PreconditionError(f'Could not bound the Gamma tail for k={k}')


def _moment(k: int, settings: config.Settings) -> typing.Tuple[float, float]:
    """
    int_0^inf u^k e^-u du as (value, absolute error) by adaptive quadrature on [0, U]
    """
    upper = _tail_cutoff(k, settings.tail_fraction)
    value, abserr = integrate.quad(lambda u: u ** k * math.exp(-u), 0.0, upper, points=[float(k)] if k else None,
                                   epsabs=0.0, epsrel=settings.quad_tol, limit=200)
    tail = math.exp(k * math.log(upper) - upper) / (1 - k / upper)
    return value, abserr + tail


def _radial_inner(a: int, m: int, settings: config.Settings) -> OracleEstimate:
    # <z^a, z^a>_m on C: omega * 2pi * int r^(2a+2m+1) e^-r^2 dr, u = r^2, normalized by the a = 0 moment
    top, top_err = _moment(a + m, settings)
    bottom, bottom_err = _moment(m, settings)
    value = top / bottom
    return OracleEstimate(value, Method.RADIAL_QUADRATURE, value * (top_err / top + bottom_err / bottom))


# ----------------------------------------------------------------- log-Gamma identity

def _log_norm(a: MultiIndex, sp: SpaceParams) -> float:
    n, w = sp.n, sp.m + sp.n - 1
    return float(sum(gammaln(c + 1) for c in a.components) + gammaln(n) + gammaln(w + a.order + 1)
                 - gammaln(w + 1) - gammaln(n + a.order))


# ----------------------------------------------------------------- Monte Carlo

def _mc_worker(job) -> typing.Tuple[int, float, float]:
    """(count, mean, M2) of Re z^a conj(z^b) |z|^2m over one worker's share"""
    seed_seq, count, chunk, a, b, m = job
    rng = np.random.default_rng(seed_seq)
    a, b = np.array(a), np.array(b)
    total, mean, m2 = 0, 0.0, 0.0
    while total < count:
        size = min(chunk, count - total)
        # standard complex Gaussian: density e^-|z|^2 / pi^n
        z = (rng.standard_normal((size, len(a))) + 1j * rng.standard_normal((size, len(a)))) / math.sqrt(2.0)
        r2 = np.sum(np.abs(z) ** 2, axis=1)
        x = np.real(np.prod(z ** a, axis=1) * np.conj(np.prod(z ** b, axis=1))) * r2 ** m
        c_mean, c_m2 = float(x.mean()), float(((x - x.mean()) ** 2).sum())
        delta = c_mean - mean
        new_total = total + size
        mean += delta * size / new_total
        m2 += c_m2 + delta * delta * total * size / new_total
        total = new_total
    return total, mean, m2


def _monte_carlo_inner(a: MultiIndex, b: MultiIndex, sp: SpaceParams, settings: config.Settings) -> OracleEstimate:
    workers = max(1, settings.jobs)
    streams = np.random.SeedSequence(settings.seed).spawn(workers)
    share, extra = divmod(settings.samples, workers)
    jobs = [(streams[i], share + (1 if i < extra else 0), settings.chunk, a.components, b.components, sp.m)
            for i in range(workers)]
    jobs = [job for job in jobs if job[1] > 0]
    if len(jobs) > 1:
        with multiprocessing.Pool(processes=len(jobs)) as pool:
            parts = pool.map(_mc_worker, jobs)
    else:
        parts = [_mc_worker(job) for job in jobs]
    total, mean, m2 = 0, 0.0, 0.0
    for count, c_mean, c_m2 in parts:
        delta = c_mean - mean
        new_total = total + count
        mean += delta * count / new_total
        m2 += c_m2 + delta * delta * total * count / new_total
        total = new_total
    # omega_{n,m} pi^n = (n-1)! / (m+n-1)!
    weight = math.exp(float(gammaln(sp.n) - gammaln(sp.m + sp.n)))
    std_err = weight * math.sqrt(m2 / (total - 1) / total) if total > 1 else math.inf
    logger.debug(f'Monte Carlo <z^{a}, z^{b}>_{sp.m}: {total} samples over {len(parts)} stream(s)')
    return OracleEstimate(weight * mean, Method.MONTE_CARLO, standard_error=std_err, samples=total)


def oracle_inner(a: MultiIndex, b: MultiIndex, sp: SpaceParams, method: Method,
                 settings: config.Settings = None) -> OracleEstimate:
    """
    Numerical <z^a, z^b>_m.
    @param method: RadialQuadrature (n = 1 only), GammaIdentity, or MonteCarlo
    """
    settings = settings or config.get_settings()
    sp.check(a, b)
    if method is Method.RADIAL_QUADRATURE:
        if sp.n != 1:
            raise PreconditionError(f'RadialQuadrature needs n = 1, got n = {sp.n}')
        if a != b:
            return OracleEstimate(0.0, method)
        return _radial_inner(a.components[0], sp.m, settings)
    if method is Method.GAMMA_IDENTITY:
        if a != b:
            return OracleEstimate(0.0, method)
        return OracleEstimate(math.exp(_log_norm(a, sp)), method, error_bound=0.0)
    if method is Method.MONTE_CARLO:
        return _monte_carlo_inner(a, b, sp, settings)
    raise PreconditionError(f'Unknown oracle method {method}')


def oracle_toeplitz_coeff(beta: MultiIndex, gamma: MultiIndex, alpha: MultiIndex, sp: SpaceParams,
                          method: Method, settings: config.Settings = None) -> OracleEstimate:
    """
    <T_{z^beta conj(z)^gamma} e_alpha, e_eta>, eta = alpha+beta-gamma, as
    <z^(alpha+beta), z^(eta+gamma)>_m / sqrt(<z^alpha, z^alpha>_m <z^eta, z^eta>_m).
    With MonteCarlo only the cross term is sampled; the two normalizations use the Gamma identity.
    """
    settings = settings or config.get_settings()
    sp.check(beta, gamma, alpha)
    eta = alpha.offset(beta, gamma)
    if eta is None:
        return OracleEstimate(0.0, method)
    lifted = alpha + beta
    cross = oracle_inner(lifted, eta + gamma, sp, method, settings)
    norm_method = Method.GAMMA_IDENTITY if method is Method.MONTE_CARLO else method
    left = oracle_inner(alpha, alpha, sp, norm_method, settings)
    right = oracle_inner(eta, eta, sp, norm_method, settings)
    scale = 1.0 / math.sqrt(left.value * right.value)
    value = cross.value * scale
    if method is Method.MONTE_CARLO:
        return OracleEstimate(value, method, standard_error=cross.standard_error * scale, samples=cross.samples)
    relative = cross.error_bound / cross.value + 0.5 * (left.error_bound / left.value + right.error_bound / right.value)
    return OracleEstimate(value, method, abs(value) * relative)
