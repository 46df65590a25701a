"""The value-expression mini-grammar.

    expr   := term ("or" term)*
    term   := factor ("and" factor)*
    factor := "(" expr ")" | "<" iri ">"

Both operators associate left; "and" binds tighter than "or".
"""

from __future__ import annotations

from .errors import ParseError
from .model import And, Iri, Or, Resource, ValueExpr

_KEYWORDS = {"and", "or"}


def _tokenize(text: str, line: int) -> list[tuple[str, str, int]]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        col = i + 1
        if c == "<":
            end = text.find(">", i + 1)
            if end < 0:
                raise ParseError("unterminated reference", line, col, expected=">")
            tokens.append(("ref", text[i + 1 : end], col))
            i = end + 1
        elif c in "()":
            tokens.append((c, c, col))
            i += 1
        elif c.isalpha():
            j = i
            while j < n and text[j].isalpha():
                j += 1
            word = text[i:j]
            if word not in _KEYWORDS:
                raise ParseError(
                    f"unexpected word {word!r}", line, col, expected="'and' or 'or'"
                )
            tokens.append((word, word, col))
            i = j
        else:
            raise ParseError(f"unexpected character {c!r}", line, col)
    return tokens


class _Cursor:
    def __init__(self, tokens, line, length):
        self.tokens = tokens
        self.pos = 0
        self.line = line
        self.end_col = length + 1

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self):
        tok = self.peek()
        if tok is None:
            raise ParseError("unexpected end of expression", self.line, self.end_col)
        self.pos += 1
        return tok


def parse_value_expr(text: str, line: int = 1) -> ValueExpr:
    cur = _Cursor(_tokenize(text, line), line, len(text))
    expr = _parse_or(cur)
    trailing = cur.peek()
    if trailing is not None:
        raise ParseError(
            f"trailing input after expression: {trailing[1]!r}", line, trailing[2]
        )
    return expr


def _parse_or(cur: _Cursor) -> ValueExpr:
    left = _parse_and(cur)
    while cur.peek() is not None and cur.peek()[0] == "or":
        cur.take()
        left = Or(left, _parse_and(cur))
    return left


def _parse_and(cur: _Cursor) -> ValueExpr:
    left = _parse_factor(cur)
    while cur.peek() is not None and cur.peek()[0] == "and":
        cur.take()
        left = And(left, _parse_factor(cur))
    return left


def _parse_factor(cur: _Cursor) -> ValueExpr:
    kind, value, col = cur.take()
    if kind == "ref":
        try:
            return Resource(Iri.parse(value))
        except ValueError as exc:
            raise ParseError(str(exc), cur.line, col) from exc
    if kind == "(":
        inner = _parse_or(cur)
        closing = cur.take()
        if closing[0] != ")":
            raise ParseError(
                f"unexpected {closing[1]!r}", cur.line, closing[2], expected="')'"
            )
        return inner
    raise ParseError(
        f"unexpected {value!r}", cur.line, col, expected="a reference or '('"
    )


def _prec(expr: ValueExpr) -> int:
    if isinstance(expr, Or):
        return 1
    if isinstance(expr, And):
        return 2
    return 3


def render_value_expr(expr: ValueExpr) -> str:
    """Minimal parentheses; reparsing yields the identical tree."""
    if isinstance(expr, Resource):
        return f"<{expr.iri}>"
    if isinstance(expr, (And, Or)):
        word = "and" if isinstance(expr, And) else "or"
        mine = _prec(expr)
        left = render_value_expr(expr.left)
        if _prec(expr.left) < mine:
            left = f"({left})"
        right = render_value_expr(expr.right)
        if _prec(expr.right) <= mine:
            right = f"({right})"
        return f"{left} {word} {right}"
    raise TypeError(f"not a ValueExpr: {expr!r}")
