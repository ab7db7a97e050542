"""
Exact numeric substrate: multi-indices, Gaussian rationals, factorial ratios and radical coefficients
of the form (gaussian rational) * sqrt(positive rational).
"""
import logging
import math
import typing
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import factorint, primerange

from fockop.fockop_exceptions import DimensionMismatchError, InvariantViolation, PreconditionError

logger = logging.getLogger(__name__)

BigRational = Fraction


@dataclass(frozen=True)
class MultiIndex:
    components: typing.Tuple[int, ...]

    def __post_init__(self):
        comps = tuple(int(c) for c in self.components)
        if not comps:
            raise PreconditionError('A multi-index needs at least one component')
        if any(c < 0 for c in comps):
            raise PreconditionError(f'Multi-index components must be nonnegative, got {comps}')
        object.__setattr__(self, 'components', comps)

    @classmethod
    def of(cls, *components: int) -> 'MultiIndex':
        return cls(tuple(components))

    @classmethod
    def zero(cls, n: int) -> 'MultiIndex':
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, j: int) -> 'MultiIndex':
        """e_j with the 0-based position j set to 1"""
        return cls(tuple(1 if i == j else 0 for i in range(n)))

    @property
    def dimension(self) -> int:
        return len(self.components)

    @property
    def order(self) -> int:
        return sum(self.components)

    def factorial_terms(self) -> typing.Tuple[int, ...]:
        """alpha! = prod alpha_i!, as factorial terms"""
        return self.components

    def _check(self, other: 'MultiIndex'):
        if self.dimension != other.dimension:
            raise DimensionMismatchError(f'Multi-index dimensions differ: {self.dimension} vs {other.dimension}')

    def __add__(self, other: 'MultiIndex') -> 'MultiIndex':
        self._check(other)
        return MultiIndex(tuple(a + b for a, b in zip(self.components, other.components)))

    def scaled(self, t: int) -> 'MultiIndex':
        return MultiIndex(tuple(t * a for a in self.components))

    def offset(self, plus: 'MultiIndex', minus: 'MultiIndex') -> typing.Optional['MultiIndex']:
        """
        self + plus - minus, or None when any component would be negative.
        """
        self._check(plus)
        self._check(minus)
        comps = tuple(a + b - c for a, b, c in zip(self.components, plus.components, minus.components))
        if any(c < 0 for c in comps):
            return None
        return MultiIndex(comps)

    def dot(self, other: 'MultiIndex') -> int:
        self._check(other)
        return sum(a * b for a, b in zip(self.components, other.components))

    def is_zero(self) -> bool:
        return not any(self.components)

    def sort_key(self):
        return self.components

    def __str__(self):
        return '|'.join(str(c) for c in self.components)


@dataclass(frozen=True)
class Ordering:
    ge: bool
    gt: bool
    le: bool
    lt: bool

    @property
    def incomparable(self) -> bool:
        return not (self.ge or self.le)


def multiindex_compare(a: MultiIndex, b: MultiIndex) -> Ordering:
    """
    Componentwise comparison. a > b means every component is strictly larger.
    """
    if a.dimension != b.dimension:
        raise DimensionMismatchError(f'Cannot compare multi-indices of dimension {a.dimension} and {b.dimension}')
    pairs = list(zip(a.components, b.components))
    return Ordering(
        ge=all(x >= y for x, y in pairs),
        gt=all(x > y for x, y in pairs),
        le=all(x <= y for x, y in pairs),
        lt=all(x < y for x, y in pairs),
    )


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, 're', Fraction(self.re))
        object.__setattr__(self, 'im', Fraction(self.im))

    @classmethod
    def of(cls, value) -> 'GaussianRational':
        if isinstance(value, GaussianRational):
            return value
        return cls(Fraction(value))

    def __add__(self, other) -> 'GaussianRational':
        other = GaussianRational.of(other)
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self) -> 'GaussianRational':
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other) -> 'GaussianRational':
        return self + (-GaussianRational.of(other))

    def __mul__(self, other) -> 'GaussianRational':
        other = GaussianRational.of(other)
        return GaussianRational(self.re * other.re - self.im * other.im, self.re * other.im + self.im * other.re)

    __rmul__ = __mul__

    def conjugate(self) -> 'GaussianRational':
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        im = f'{self.im}i' if self.im not in (1, -1) else ('i' if self.im == 1 else '-i')
        if self.re == 0:
            return im
        return f'{self.re}{"" if im.startswith("-") else "+"}{im}'


ONE = GaussianRational(Fraction(1))
ZERO = GaussianRational()
I_UNIT = GaussianRational(Fraction(0), Fraction(1))


@lru_cache(maxsize=None)
def primes_upto(limit: int) -> typing.Tuple[int, ...]:
    return tuple(int(p) for p in primerange(2, limit + 1))


def legendre(t: int, p: int) -> int:
    """exponent of the prime p in t!"""
    e, q = 0, p
    while q <= t:
        e += t // q
        q *= p
    return e


def _range_product(lo: int, hi: int) -> int:
    """hi! / lo! for hi >= lo"""
    return math.prod(range(lo + 1, hi + 1))


@dataclass(frozen=True)
class FactorialRatio:
    numerator_terms: typing.Tuple[int, ...] = ()
    denominator_terms: typing.Tuple[int, ...] = ()

    def __post_init__(self):
        num = tuple(sorted(int(t) for t in self.numerator_terms))
        den = tuple(sorted(int(t) for t in self.denominator_terms))
        if any(t < 0 for t in num + den):
            raise PreconditionError(f'Factorial terms must be nonnegative: {num} / {den}')
        object.__setattr__(self, 'numerator_terms', num)
        object.__setattr__(self, 'denominator_terms', den)

    def __mul__(self, other: 'FactorialRatio') -> 'FactorialRatio':
        return FactorialRatio(self.numerator_terms + other.numerator_terms,
                              self.denominator_terms + other.denominator_terms)

    def inverse(self) -> 'FactorialRatio':
        return FactorialRatio(self.denominator_terms, self.numerator_terms)

    def squared(self) -> 'FactorialRatio':
        return self * self

    def reduced(self) -> 'FactorialRatio':
        """drop terms shared by numerator and denominator (0! and 1! are dropped too)"""
        num, den = Counter(t for t in self.numerator_terms if t > 1), Counter(t for t in self.denominator_terms if t > 1)
        common = num & den
        return FactorialRatio(tuple((num - common).elements()), tuple((den - common).elements()))

    def prime_exponents(self) -> typing.Dict[int, int]:
        """signed exponent of every prime in the value, by Legendre's formula"""
        r = self.reduced()
        top = max(r.numerator_terms + r.denominator_terms, default=1)
        exponents = {}
        for p in primes_upto(top):
            e = sum(legendre(t, p) for t in r.numerator_terms) - sum(legendre(t, p) for t in r.denominator_terms)
            if e:
                exponents[p] = e
        return exponents

    def evaluate(self) -> Fraction:
        return factorial_ratio_eval(self)


def factorial_ratio_eval(r: FactorialRatio) -> Fraction:
    """
    Exact value of prod t!_num / prod t!_den. Terms are paired largest with largest so each pair
    collapses into a rising product; only unpaired surplus terms need a full factorial.
    """
    r = r.reduced()
    num = sorted(r.numerator_terms, reverse=True)
    den = sorted(r.denominator_terms, reverse=True)
    top, bottom = 1, 1
    for a, b in zip(num, den):
        if a >= b:
            top *= _range_product(b, a)
        else:
            bottom *= _range_product(a, b)
    paired = min(len(num), len(den))
    for t in num[paired:]:
        top *= math.factorial(t)
    for t in den[paired:]:
        bottom *= math.factorial(t)
    return Fraction(top, bottom)


def _split_square(exponents: typing.Dict[int, int]) -> typing.Tuple[Fraction, Fraction]:
    """
    sqrt(prod p^e) = outside * sqrt(radicand) with radicand a square-free integer.
    An odd negative exponent -(2h+1) contributes p^-(h+1) outside and p under the root.
    """
    out_num = out_den = rad_num = 1
    for p, e in exponents.items():
        half, odd = divmod(abs(e), 2)
        if e > 0:
            out_num *= p ** half
            rad_num *= p ** odd
        else:
            out_den *= p ** (half + odd)
            rad_num *= p ** odd
    return Fraction(out_num, out_den), Fraction(rad_num)


def _square_free_parts(value: int) -> typing.Dict[int, int]:
    return factorint(value) if value > 1 else {}


@dataclass(frozen=True)
class RadicalCoefficient:
    """
    rational_part * sqrt(radicand). Build through radical_normalize / sqrt_factorial_ratio so the
    canonical form holds; equality is then componentwise.
    """
    rational_part: GaussianRational = ZERO
    radicand: Fraction = Fraction(0)

    @classmethod
    def zero(cls) -> 'RadicalCoefficient':
        return cls(ZERO, Fraction(0))

    @classmethod
    def rational(cls, value) -> 'RadicalCoefficient':
        value = GaussianRational.of(value)
        if value.is_zero():
            return cls.zero()
        return cls(value, Fraction(1))

    def is_zero(self) -> bool:
        return self.rational_part.is_zero()

    def abs2(self) -> Fraction:
        return self.rational_part.abs2() * self.radicand

    def conjugate(self) -> 'RadicalCoefficient':
        return RadicalCoefficient(self.rational_part.conjugate(), self.radicand)

    def scale(self, c) -> 'RadicalCoefficient':
        c = GaussianRational.of(c)
        if c.is_zero() or self.is_zero():
            return RadicalCoefficient.zero()
        return RadicalCoefficient(self.rational_part * c, self.radicand)

    def __neg__(self) -> 'RadicalCoefficient':
        return self.scale(-ONE)

    def __add__(self, other: 'RadicalCoefficient') -> 'RadicalCoefficient':
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if self.radicand != other.radicand:
            msg = f'Cannot add radicals with different radicands {self.radicand} and {other.radicand}'
            logger.error(msg)
            raise InvariantViolation(msg)
        total = self.rational_part + other.rational_part
        if total.is_zero():
            return RadicalCoefficient.zero()
        return RadicalCoefficient(total, self.radicand)

    def __sub__(self, other: 'RadicalCoefficient') -> 'RadicalCoefficient':
        return self + (-other)

    def __mul__(self, other: 'RadicalCoefficient') -> 'RadicalCoefficient':
        if self.is_zero() or other.is_zero():
            return RadicalCoefficient.zero()
        # product of square-free integers x*y = gcd^2 * (x/gcd)*(y/gcd)
        a1, b1 = self.radicand.numerator, self.radicand.denominator
        a2, b2 = other.radicand.numerator, other.radicand.denominator
        g, h = math.gcd(a1, a2), math.gcd(b1, b2)
        num, den = (a1 // g) * (a2 // g), (b1 // h) * (b2 // h)
        c = math.gcd(num, den)
        return RadicalCoefficient(self.rational_part * other.rational_part * Fraction(g, h),
                                  Fraction(num // c, den // c))

    def __complex__(self):
        return complex(self.rational_part) * math.sqrt(self.radicand)

    def __str__(self):
        if self.is_zero():
            return '0'
        if self.radicand == 1:
            return str(self.rational_part)
        return f'({self.rational_part})*sqrt({self.radicand})'


def radical_normalize(rational_part, radicand) -> RadicalCoefficient:
    """
    Canonical form of rational_part * sqrt(radicand): surplus square factors of the reduced
    numerator and denominator move into the rational part.
    """
    rational_part = GaussianRational.of(rational_part)
    radicand = Fraction(radicand)
    if radicand < 0:
        raise PreconditionError(f'Radicand must be nonnegative, got {radicand}')
    if radicand == 0 or rational_part.is_zero():
        return RadicalCoefficient.zero()
    exponents = dict(_square_free_parts(radicand.numerator))
    for p, e in _square_free_parts(radicand.denominator).items():
        exponents[p] = exponents.get(p, 0) - e
    outside, rad = _split_square(exponents)
    return RadicalCoefficient(rational_part * outside, rad)


def sqrt_factorial_ratio(ratio: FactorialRatio, rational_part=ONE) -> RadicalCoefficient:
    """rational_part * sqrt(ratio) in canonical form, without integer factoring"""
    rational_part = GaussianRational.of(rational_part)
    if rational_part.is_zero():
        return RadicalCoefficient.zero()
    outside, rad = _split_square(ratio.prime_exponents())
    return RadicalCoefficient(rational_part * outside, rad)
