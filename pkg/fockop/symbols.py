"""
Polynomial symbols in z and conj(z) on C^n: canonical flat representation, the text grammar,
and the structural splits used by the boundedness criteria.
"""
import logging
import re
import typing
from dataclasses import dataclass
from fractions import Fraction

from fockop.arith import GaussianRational, MultiIndex, ONE, I_UNIT, ZERO
from fockop.fockop_exceptions import DimensionMismatchError, PreconditionError, SymbolSyntaxError

logger = logging.getLogger(__name__)

Monomial = typing.Tuple[MultiIndex, MultiIndex]


def _term_key(item):
    (beta, gamma), _ = item
    return beta.order + gamma.order, beta.components, gamma.components


@dataclass(frozen=True)
class SymbolPolynomial:
    """
    Sum of c * z^beta * conj(z)^gamma. Build through from_terms so like terms are merged, zero
    coefficients dropped and the term order is canonical.
    """
    dimension: int
    items: typing.Tuple[typing.Tuple[Monomial, GaussianRational], ...] = ()

    @classmethod
    def from_terms(cls, dimension: int, terms: typing.Iterable[typing.Tuple[Monomial, typing.Any]]) -> 'SymbolPolynomial':
        if dimension < 1:
            raise PreconditionError(f'Symbol dimension must be at least 1, got {dimension}')
        merged: typing.Dict[Monomial, GaussianRational] = {}
        for (beta, gamma), coeff in terms:
            if beta.dimension != dimension or gamma.dimension != dimension:
                raise DimensionMismatchError(
                    f'Monomial ({beta}, {gamma}) does not live in dimension {dimension}')
            merged[(beta, gamma)] = merged.get((beta, gamma), ZERO) + GaussianRational.of(coeff)
        kept = tuple(sorted(((k, c) for k, c in merged.items() if not c.is_zero()), key=_term_key))
        return cls(dimension, kept)

    @classmethod
    def zero(cls, dimension: int) -> 'SymbolPolynomial':
        return cls.from_terms(dimension, ())

    @classmethod
    def constant(cls, dimension: int, value) -> 'SymbolPolynomial':
        origin = MultiIndex.zero(dimension)
        return cls.from_terms(dimension, [((origin, origin), value)])

    @classmethod
    def monomial(cls, beta: MultiIndex, gamma: MultiIndex, coeff=ONE) -> 'SymbolPolynomial':
        return cls.from_terms(beta.dimension, [((beta, gamma), coeff)])

    @property
    def terms(self) -> typing.Dict[Monomial, GaussianRational]:
        return dict(self.items)

    def is_zero(self) -> bool:
        return not self.items

    def _check(self, other: 'SymbolPolynomial'):
        if self.dimension != other.dimension:
            raise DimensionMismatchError(f'Symbols live in dimensions {self.dimension} and {other.dimension}')

    def __add__(self, other: 'SymbolPolynomial') -> 'SymbolPolynomial':
        self._check(other)
        return SymbolPolynomial.from_terms(self.dimension, self.items + other.items)

    def __neg__(self) -> 'SymbolPolynomial':
        return self.scale(-ONE)

    def __sub__(self, other: 'SymbolPolynomial') -> 'SymbolPolynomial':
        return self + (-other)

    def scale(self, c) -> 'SymbolPolynomial':
        c = GaussianRational.of(c)
        return SymbolPolynomial.from_terms(self.dimension, [(k, v * c) for k, v in self.items])

    def __mul__(self, other: 'SymbolPolynomial') -> 'SymbolPolynomial':
        self._check(other)
        products = [((b1 + b2, g1 + g2), c1 * c2)
                    for (b1, g1), c1 in self.items
                    for (b2, g2), c2 in other.items]
        return SymbolPolynomial.from_terms(self.dimension, products)

    def power(self, k: int) -> 'SymbolPolynomial':
        result = SymbolPolynomial.constant(self.dimension, 1)
        for _ in range(k):
            result = result * self
        return result

    def __str__(self):
        return pretty_print(self)


def multiply_symbols(p: SymbolPolynomial, q: SymbolPolynomial) -> SymbolPolynomial:
    return p * q


def conjugate(p: SymbolPolynomial) -> SymbolPolynomial:
    """z^beta conj(z)^gamma -> z^gamma conj(z)^beta with conjugated coefficient"""
    return SymbolPolynomial.from_terms(p.dimension, [((g, b), c.conjugate()) for (b, g), c in p.items])


def holomorphic_split(p: SymbolPolynomial) -> typing.Tuple[SymbolPolynomial, SymbolPolynomial]:
    """
    @return: (pure holomorphic part, remainder); the holomorphic part keeps exactly the gamma = 0 terms
    """
    holo = [(k, c) for k, c in p.items if k[1].is_zero()]
    rest = [(k, c) for k, c in p.items if not k[1].is_zero()]
    return SymbolPolynomial.from_terms(p.dimension, holo), SymbolPolynomial.from_terms(p.dimension, rest)


def is_holomorphic(p: SymbolPolynomial) -> bool:
    return holomorphic_split(p)[1].is_zero()


def is_constant(p: SymbolPolynomial) -> bool:
    return all(b.is_zero() and g.is_zero() for (b, g), _ in p.items)


def conjugate_linear_coefficient(p: SymbolPolynomial) -> typing.Optional[GaussianRational]:
    """
    For n = 1: the constant a when p - (pure holomorphic part of p) equals a*conj(z), including a = 0.
    None when the remainder has any other term or n != 1.
    """
    if p.dimension != 1:
        return None
    _, rest = holomorphic_split(p)
    if rest.is_zero():
        return ZERO
    if len(rest.items) != 1:
        return None
    (beta, gamma), coeff = rest.items[0]
    if beta.components == (0,) and gamma.components == (1,):
        return coeff
    return None


@dataclass(frozen=True)
class GradedPiece:
    variable: int
    degree: int
    piece: SymbolPolynomial


@dataclass(frozen=True)
class GradedDecomposition:
    variable: int
    pieces: typing.Tuple[GradedPiece, ...]
    low: int
    high: int
    cofactor: SymbolPolynomial

    def factor(self) -> SymbolPolynomial:
        total = SymbolPolynomial.zero(self.cofactor.dimension)
        for piece in self.pieces:
            total = total + piece.piece
        return total


def _variable_part(beta: MultiIndex, gamma: MultiIndex, j: int) -> Monomial:
    n = beta.dimension
    only = lambda idx: MultiIndex(tuple(idx.components[j] if i == j else 0 for i in range(n)))
    return only(beta), only(gamma)


def _other_part(beta: MultiIndex, gamma: MultiIndex, j: int) -> Monomial:
    drop = lambda idx: MultiIndex(tuple(0 if i == j else c for i, c in enumerate(idx.components)))
    return drop(beta), drop(gamma)


def graded_decompose(p: SymbolPolynomial, s: int) -> GradedDecomposition:
    """
    Split the variable-s factor of p into pieces F_theta collecting the terms with
    beta_s - gamma_s = theta, for theta from i_0 to i_1 (empty degrees give the zero piece).
    For n >= 2, p must factor as (polynomial in z_s, conj(z_s)) * cofactor.
    @param p: nonzero symbol
    @param s: 1-based variable index
    """
    if p.is_zero():
        raise PreconditionError('The zero symbol has no graded decomposition')
    if not 1 <= s <= p.dimension:
        raise PreconditionError(f'Variable index {s} is outside 1..{p.dimension}')
    j = s - 1
    groups: typing.Dict[Monomial, typing.Dict[Monomial, GaussianRational]] = {}
    for (beta, gamma), c in p.items:
        groups.setdefault(_other_part(beta, gamma, j), {})[_variable_part(beta, gamma, j)] = c
    ordered = sorted(groups.items(), key=lambda kv: (kv[0][0].components, kv[0][1].components))
    lead_key, lead = ordered[0]
    pivot = next(iter(lead))
    cofactor_terms = []
    for other, part in ordered:
        if set(part) != set(lead):
            raise PreconditionError(f'Symbol {pretty_print(p)} does not factor in variable z{s}')
        ratio = part[pivot] * _inverse(lead[pivot])
        if any(part[k] != ratio * lead[k] for k in lead):
            raise PreconditionError(f'Symbol {pretty_print(p)} does not factor in variable z{s}')
        cofactor_terms.append((other, ratio))
    degrees = {k: k[0].components[j] - k[1].components[j] for k in lead}
    low, high = min(degrees.values()), max(degrees.values())
    pieces = tuple(
        GradedPiece(s, theta, SymbolPolynomial.from_terms(p.dimension, [(k, lead[k]) for k in lead if degrees[k] == theta]))
        for theta in range(low, high + 1))
    logger.debug(f'graded decomposition of {pretty_print(p)} in z{s}: degrees {low}..{high}')
    return GradedDecomposition(s, pieces, low, high, SymbolPolynomial.from_terms(p.dimension, cofactor_terms))


def _inverse(c: GaussianRational) -> GaussianRational:
    norm = c.abs2()
    return GaussianRational(c.re / norm, -c.im / norm)


# ---------------------------------------------------------------- text form

def _variable_name(j: int, n: int) -> str:
    return 'z' if n == 1 else f'z{j + 1}'


def _monomial_text(beta: MultiIndex, gamma: MultiIndex) -> str:
    n = beta.dimension
    factors = []
    for j, e in enumerate(beta.components):
        if e:
            factors.append(_variable_name(j, n) + (f'^{e}' if e > 1 else ''))
    for j, e in enumerate(gamma.components):
        if e:
            factors.append(f'conj({_variable_name(j, n)})' + (f'^{e}' if e > 1 else ''))
    return '*'.join(factors)


def _imag_text(im: Fraction) -> str:
    return 'i' if im == 1 else f'{im}*i'


def pretty_print(p: SymbolPolynomial) -> str:
    """canonical text; parse_symbol(pretty_print(p), n) == p"""
    if p.is_zero():
        return '0'
    out = []
    for (beta, gamma), c in p.items:
        mono = _monomial_text(beta, gamma)
        if c.im == 0 or c.re == 0:
            value = c.re if c.im == 0 else c.im
            sign = '-' if value < 0 else '+'
            body = str(abs(value)) if c.im == 0 else _imag_text(abs(value))
            if mono and c.im == 0 and abs(value) == 1:
                body = mono
            elif mono:
                body = f'{body}*{mono}'
        else:
            sign = '+'
            im_sign = '-' if c.im < 0 else '+'
            body = f'({c.re}{im_sign}{_imag_text(abs(c.im))})'
            if mono:
                body = f'{body}*{mono}'
        out.append((sign, body))
    first_sign, first = out[0]
    text = ('-' if first_sign == '-' else '') + first
    for sign, body in out[1:]:
        text += f' {sign} {body}'
    return text


_TOKEN = re.compile(r'\s*(?:(?P<conj>conj\s*\()|(?P<var>z\d*)|(?P<num>\d+)|(?P<i>i)|(?P<op>[-+*/^()]))')


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    pos: int


def _tokenize(text: str) -> typing.List[_Token]:
    tokens, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == '':
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = len(text) - len(text[pos:].lstrip())
            raise SymbolSyntaxError(f'Unexpected character {text[start]!r}', text, start)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append(_Token(kind, m.group(kind), start))
        pos = m.end()
    tokens.append(_Token('end', '', len(text)))
    return tokens


class _SymbolParser:
    """recursive descent over the symbol grammar; every production returns a SymbolPolynomial"""

    def __init__(self, text: str, n: int):
        self.text = text
        self.n = n
        self.tokens = _tokenize(text)
        self.idx = 0

    @property
    def current(self) -> _Token:
        return self.tokens[self.idx]

    def error(self, message: str, token: _Token = None):
        token = token or self.current
        raise SymbolSyntaxError(message, self.text, token.pos)

    def accept(self, kind: str, text: str = None) -> typing.Optional[_Token]:
        tok = self.current
        if tok.kind == kind and (text is None or tok.text == text):
            self.idx += 1
            return tok
        return None

    def expect(self, kind: str, text: str = None) -> _Token:
        tok = self.accept(kind, text)
        if tok is None:
            wanted = text or kind
            found = self.current.text or 'end of input'
            self.error(f'Expected {wanted!r} but found {found!r}')
        return tok

    def parse(self) -> SymbolPolynomial:
        if self.current.kind == 'end':
            self.error('Empty symbol')
        result = self.expr()
        if self.current.kind != 'end':
            self.error(f'Unexpected {self.current.text!r}')
        return result

    def expr(self) -> SymbolPolynomial:
        negate = self.accept('op', '-') is not None
        result = self.term()
        if negate:
            result = -result
        while True:
            if self.accept('op', '+'):
                result = result + self.term()
            elif self.accept('op', '-'):
                result = result - self.term()
            else:
                return result

    def term(self) -> SymbolPolynomial:
        result = self.factor()
        while self.accept('op', '*'):
            result = result * self.factor()
        return result

    def factor(self) -> SymbolPolynomial:
        base = self.base()
        if self.accept('op', '^'):
            if self.current.kind == 'op' and self.current.text == '-':
                self.error('Negative exponents are not allowed')
            exponent = self.expect('num')
            return base.power(int(exponent.text))
        return base

    def variable(self, tok: _Token) -> int:
        digits = tok.text[1:]
        if not digits:
            if self.n != 1:
                self.error(f'Bare "z" is only allowed when n = 1 (n = {self.n})', tok)
            return 0
        j = int(digits)
        if not 1 <= j <= self.n:
            self.error(f'Variable {tok.text} is outside z1..z{self.n}', tok)
        return j - 1

    def base(self) -> SymbolPolynomial:
        tok = self.current
        origin = MultiIndex.zero(self.n)
        if self.accept('var'):
            return SymbolPolynomial.monomial(MultiIndex.unit(self.n, self.variable(tok)), origin)
        if self.accept('conj'):
            var = self.expect('var')
            j = self.variable(var)
            self.expect('op', ')')
            return SymbolPolynomial.monomial(origin, MultiIndex.unit(self.n, j))
        if self.accept('num'):
            value = Fraction(int(tok.text))
            if self.accept('op', '/'):
                den = self.expect('num')
                if int(den.text) == 0:
                    self.error('Division by zero', den)
                value = Fraction(int(tok.text), int(den.text))
            return SymbolPolynomial.constant(self.n, value)
        if self.accept('i'):
            return SymbolPolynomial.constant(self.n, I_UNIT)
        if self.accept('op', '('):
            inner = self.expr()
            self.expect('op', ')')
            return inner
        found = tok.text or 'end of input'
        self.error(f'Unexpected {found!r}')


def parse_symbol(text: str, n: int) -> SymbolPolynomial:
    """
    Parse a polynomial symbol in z1..zn and conj(z1)..conj(zn).
    @param text: e.g. "2 + 3*i*z2^2" or "z + 2*conj(z)"
    @param n: ambient dimension
    @return: canonical SymbolPolynomial
    """
    if n < 1:
        raise PreconditionError(f'Dimension must be at least 1, got {n}')
    result = _SymbolParser(text, n).parse()
    logger.debug(f'parsed {text!r} as {pretty_print(result)}')
    return result
