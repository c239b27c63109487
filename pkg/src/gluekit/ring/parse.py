"""Recursive-descent parser for polynomial literals.

Accepted syntax (whitespace is insignificant)::

    poly  := term (('+'|'-') term)*
    term  := sign* factor (('*'|'/') factor)*
    factor:= atom ('^' nat)*
    atom  := int | var | '(' poly ')'

The uniformizer name (``p`` in the arithmetic profile, ``t`` in the
geometric one) denotes pi unless it is declared as a ring variable, so
``1/p`` and ``p^2*x`` are valid.  Division is only by nonzero constants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import ParseError

_NUM = re.compile(r"\d+")
_NAME = re.compile(r"[A-Za-z][A-Za-z0-9_]*")


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, offset_line: int = 1, offset_col: int = 1) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = offset_line, -offset_col + 1
    n = len(text)
    while pos < n:
        ch = text[pos]
        if ch == "\n":
            line += 1
            line_start = pos + 1
            pos += 1
            continue
        if ch.isspace():
            pos += 1
            continue
        if ch == "#":
            while pos < n and text[pos] != "\n":
                pos += 1
            continue
        col = pos - line_start + 1
        if ch.isdigit():
            m = _NUM.match(text, pos)
            tokens.append(Token("num", m.group(), line, col))
            pos = m.end()
        elif ch.isalpha():
            m = _NAME.match(text, pos)
            tokens.append(Token("name", m.group(), line, col))
            pos = m.end()
        elif text.startswith("**", pos):
            tokens.append(Token("op", "^", line, col))
            pos += 2
        elif text.startswith("<=", pos) or text.startswith("->", pos):
            tokens.append(Token("op", text[pos:pos + 2], line, col))
            pos += 2
        elif ch in "+-*/^(),;:{}[]|=":
            tokens.append(Token("op", ch, line, col))
            pos += 1
        else:
            raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens


class TokenStream:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.i = 0

    @property
    def peek(self) -> Token:
        return self.tokens[self.i]

    def next(self) -> Token:
        t = self.tokens[self.i]
        if t.kind != "eof":
            self.i += 1
        return t

    def at(self, text: str) -> bool:
        t = self.peek
        return t.kind != "eof" and t.text == text

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> Token:
        t = self.peek
        if t.text != text or t.kind == "eof":
            found = "end of input" if t.kind == "eof" else repr(t.text)
            raise ParseError(f"expected {text!r}, found {found}", t.line, t.col)
        return self.next()

    def expect_kind(self, kind: str, what: str) -> Token:
        t = self.peek
        if t.kind != kind:
            found = "end of input" if t.kind == "eof" else repr(t.text)
            raise ParseError(f"expected {what}, found {found}", t.line, t.col)
        return self.next()

    def error(self, message: str):
        t = self.peek
        raise ParseError(message, t.line, t.col)


def parse_poly_tokens(ts: TokenStream, ring, extra_vars: dict | None = None):
    """Parse a polynomial from the token stream into ``ring``.

    Arithmetic happens over K = R[1/pi]; the result is converted to the
    regime of ``ring`` at the end.  ``extra_vars`` maps names to ready-made
    polynomials.
    """
    from ..errors import NotIntegral
    from .polynomial import OVER_K, Polynomial

    base = ring.base
    pi_name = base.pi_name
    kring = ring.with_regime(OVER_K)
    start = ts.peek

    def atom():
        t = ts.peek
        if ts.accept("("):
            val = poly()
            ts.expect(")")
            return val
        if t.kind == "num":
            ts.next()
            return kring.const(int(t.text))
        if t.kind == "name":
            ts.next()
            if extra_vars and t.text in extra_vars:
                return extra_vars[t.text].change_ring(kring)
            if t.text in ring.variables:
                return kring.var(t.text)
            if t.text == pi_name:
                return kring.const(base.pi)
            raise ParseError(f"unknown variable {t.text!r}", t.line, t.col)
        found = "end of input" if t.kind == "eof" else repr(t.text)
        raise ParseError(f"expected a number, variable or '(', found {found}", t.line, t.col)

    def factor():
        val = atom()
        while ts.at("^"):
            ts.next()
            e = ts.expect_kind("num", "an exponent")
            val = val ** int(e.text)
        return val

    def term():
        sign = 1
        while ts.at("-") or ts.at("+"):
            if ts.next().text == "-":
                sign = -sign
        val = factor()
        while ts.at("*") or ts.at("/"):
            op = ts.next()
            rhs = factor()
            if op.text == "*":
                val = val * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise ParseError("division only by nonzero constants", op.line, op.col)
                val = val / rhs.constant_coefficient()
        return -val if sign < 0 else val

    def poly():
        val = term()
        while ts.at("+") or ts.at("-"):
            op = ts.next()
            rhs = term()
            val = val + rhs if op.text == "+" else val - rhs
        return val

    val = poly()
    try:
        return Polynomial(ring, val.terms)
    except NotIntegral as exc:
        raise ParseError(f"{exc} (outside the coefficient ring)", start.line, start.col) from None


def parse_polynomial(text: str, ring):
    """Parse a polynomial literal such as ``"3/2*x^2*y - 5*x + 1"``."""
    ts = TokenStream(tokenize(text))
    if ts.peek.kind == "eof":
        raise ParseError("empty polynomial", 1, 1)
    val = parse_poly_tokens(ts, ring)
    if ts.peek.kind != "eof":
        ts.error(f"unexpected {ts.peek.text!r}")
    return val
