import logging
import typing
from fractions import Fraction

from fockop.analysis import geometric_t, linear_t
from fockop.arith import GaussianRational, MultiIndex, RadicalCoefficient
from fockop.fockop_exceptions import PreconditionError

logger = logging.getLogger(__name__)


def format_rational(x) -> str:
    """
    Lossless "p/q" text for a rational; integers keep the "/1" so every value reads the same way.
    """
    x = Fraction(x)
    return f'{x.numerator}/{x.denominator}'


def format_gaussian(c: GaussianRational) -> str:
    """"p/q" for real values, "p/q+r/si" (or "p/q-r/si") otherwise"""
    if c.im == 0:
        return format_rational(c.re)
    sign = '-' if c.im < 0 else '+'
    return f'{format_rational(c.re)}{sign}{format_rational(abs(c.im))}i'


def radical_to_dict(c: RadicalCoefficient) -> typing.Dict[str, str]:
    return {'rational': format_gaussian(c.rational_part), 'radicand': format_rational(c.radicand)}


def format_multiindex(alpha: MultiIndex) -> str:
    return str(alpha)


def parse_multiindex(text: str, n: int = None) -> MultiIndex:
    """
    @param text: components separated by "|", e.g. "3|0|2"; commas are accepted too
    @param n: expected dimension, when known
    """
    parts = [p.strip() for p in text.replace(',', '|').split('|')]
    try:
        comps = tuple(int(p) for p in parts)
    except ValueError:
        raise PreconditionError(f'Invalid multi-index "{text}", expected nonnegative integers like "1|2"')
    alpha = MultiIndex(comps)
    if n is not None and alpha.dimension != n:
        raise PreconditionError(f'Multi-index "{text}" has {alpha.dimension} components, expected n={n}')
    return alpha


def parse_direction(text, n: int) -> MultiIndex:
    """
    "ones", "custom d1|d2|..." or a bare "d1|d2|..." direction.
    @param text: a string or the words given to --ray
    """
    words = text.split() if isinstance(text, str) else [w for part in text for w in part.split()]
    if not words:
        raise PreconditionError('Empty ray direction')
    keyword = words[0].lower()
    if keyword == 'ones' and len(words) == 1:
        return MultiIndex((1,) * n)
    if keyword == 'custom':
        words = words[1:]
        if len(words) != 1:
            raise PreconditionError('--ray custom needs one direction like "1|2"')
    elif len(words) != 1:
        raise PreconditionError(f'Invalid ray direction "{" ".join(words)}"')
    return parse_multiindex(words[0], n)


def parse_t_range(text: str) -> typing.Tuple[int, ...]:
    """
    lo:hi[:geometric|linear[:step]]; geometric (doubling) is the default spacing
    """
    parts = text.split(':')
    if len(parts) < 2 or len(parts) > 4:
        raise PreconditionError(f'Invalid t range "{text}", expected lo:hi[:geometric|linear[:step]]')
    try:
        lo, hi = int(parts[0]), int(parts[1])
        step = int(parts[3]) if len(parts) == 4 else None
    except ValueError:
        raise PreconditionError(f'Invalid t range "{text}": bounds and step must be integers')
    spacing = parts[2] if len(parts) > 2 else 'geometric'
    if spacing == 'geometric':
        if step is not None:
            raise PreconditionError('A step only applies to linear spacing')
        return geometric_t(lo, hi)
    if spacing == 'linear':
        if step is not None and step < 1:
            raise PreconditionError(f'Linear step must be positive, got {step}')
        return linear_t(lo, hi, step)
    raise PreconditionError(f'Unknown t spacing "{spacing}", expected geometric or linear')


def parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError):
        raise PreconditionError(f'Invalid rational "{text}", expected p or p/q')
