"""
Operator expressions: T(<symbol>), HP(<symbol>; <symbol>) for H_f^* H_g, composed with '*' (or '∘').
"""
import logging
import typing

from fockop.fockop_exceptions import SymbolSyntaxError
from fockop.operators import CompositionNode, HankelProductNode, OperatorExpr, ToeplitzNode
from fockop.symbols import SymbolPolynomial, parse_symbol

logger = logging.getLogger(__name__)

COMPOSE = ('*', '∘')


def _skip_spaces(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isspace():
        pos += 1
    return pos


def _closing_paren(text: str, open_pos: int) -> int:
    depth = 0
    for pos in range(open_pos, len(text)):
        if text[pos] == '(':
            depth += 1
        elif text[pos] == ')':
            depth -= 1
            if depth == 0:
                return pos
    raise SymbolSyntaxError('Unbalanced parenthesis', text, open_pos)


def _symbol_at(text: str, start: int, end: int, n: int) -> SymbolPolynomial:
    try:
        return parse_symbol(text[start:end], n)
    except SymbolSyntaxError as e:
        raise SymbolSyntaxError(e.message, text, start + e.position)


def _split_arguments(text: str, start: int, end: int) -> typing.List[typing.Tuple[int, int]]:
    spans, depth, begin = [], 0, start
    for pos in range(start, end):
        ch = text[pos]
        depth += ch == '('
        depth -= ch == ')'
        if ch == ';' and depth == 0:
            spans.append((begin, pos))
            begin = pos + 1
    spans.append((begin, end))
    return spans


def parse_operator(text: str, n: int) -> OperatorExpr:
    """
    @param text: e.g. "T(z*conj(z)) * T(z*conj(z))" or "HP(conj(z); conj(z))"
    @param n: ambient dimension of every symbol
    @return: right-nested composition tree; "A * B" applies B first
    """
    factors: typing.List[OperatorExpr] = []
    pos = _skip_spaces(text, 0)
    if pos == len(text):
        raise SymbolSyntaxError('Empty operator expression', text, 0)
    while True:
        if text.startswith('HP(', pos):
            open_pos = pos + 2
            close = _closing_paren(text, open_pos)
            spans = _split_arguments(text, open_pos + 1, close)
            if len(spans) != 2:
                raise SymbolSyntaxError(f'HP takes 2 symbols separated by ";", got {len(spans)}', text, open_pos)
            f, g = (_symbol_at(text, a, b, n) for a, b in spans)
            factors.append(HankelProductNode(f, g))
        elif text.startswith('T(', pos):
            open_pos = pos + 1
            close = _closing_paren(text, open_pos)
            factors.append(ToeplitzNode(_symbol_at(text, open_pos + 1, close, n)))
        else:
            raise SymbolSyntaxError('Expected "T(" or "HP("', text, pos)
        pos = _skip_spaces(text, close + 1)
        if pos == len(text):
            break
        if text[pos] not in COMPOSE:
            raise SymbolSyntaxError(f'Expected composition "*" but found {text[pos]!r}', text, pos)
        pos = _skip_spaces(text, pos + 1)
        if pos == len(text):
            raise SymbolSyntaxError('Dangling composition', text, pos)
    expr = factors[-1]
    for left in reversed(factors[:-1]):
        expr = CompositionNode(left, expr)
    logger.debug(f'parsed operator {text!r} as {expr}')
    return expr
