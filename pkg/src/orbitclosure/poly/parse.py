"""Recursive-descent parser for the ASCII polynomial grammar.

The accepted language is a superset of the flat ``coef*mono`` grammar:
parenthesised sub-expressions, integer powers of them and products of sums
are expanded exactly.  Division is only allowed by a nonzero rational
constant.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Sequence

from .core import Poly

__all__ = ["parse_poly", "PolySyntaxError", "UnknownVariable"]


class PolySyntaxError(SyntaxError):
    def __init__(self, message: str, text: str, pos: int):
        super().__init__(f"{message} at position {pos}: {text!r}")
        self.pos = pos
        self.text = text


class UnknownVariable(ValueError):
    pass


_TOKEN = re.compile(r"\s*(?:(\d+)|([a-zA-Z][a-zA-Z0-9_]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens, pos = [], 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            raise PolySyntaxError("unexpected character", text, pos)
        start = m.start(m.lastindex)
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        else:
            op = "^" if m.group(3) == "**" else m.group(3)
            tokens.append(("op", op, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, vars: Sequence[str]):
        self.text = text
        self.vars = tuple(vars)
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            raise PolySyntaxError(f"expected {value!r}", self.text, pos)

    def parse(self) -> Poly:
        out = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolySyntaxError(f"unexpected token {val!r}", self.text, pos)
        return out

    def expr(self) -> Poly:
        out = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            out = out + rhs if op == "+" else out - rhs
        return out

    def term(self) -> Poly:
        out = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op, pos = self.take()[1], self.peek()[2]
            rhs = self.unary()
            if op == "*":
                out = out * rhs
            else:
                if not rhs.is_constant() or rhs.is_zero():
                    raise PolySyntaxError("division by a non-constant or zero", self.text, pos)
                out = out / Fraction(rhs.constant_term())
        return out

    def unary(self) -> Poly:
        if self.peek()[0] == "op" and self.peek()[1] in ("-", "+"):
            op = self.take()[1]
            inner = self.unary()
            return -inner if op == "-" else inner
        return self.power()

    def power(self) -> Poly:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "num":
                raise PolySyntaxError("expected a non-negative integer exponent", self.text, pos)
            base = base ** int(val)
        return base

    def atom(self) -> Poly:
        kind, val, pos = self.take()
        if kind == "num":
            return Poly.const(self.vars, int(val))
        if kind == "name":
            if val not in self.vars:
                raise UnknownVariable(f"unknown variable {val!r} at position {pos}")
            return Poly.var(self.vars, val)
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise PolySyntaxError(f"unexpected token {val!r}" if val else "unexpected end of input", self.text, pos)


def parse_poly(text: str, vars: Sequence[str]) -> Poly:
    """Parse ``text`` into a :class:`Poly` over the variables ``vars``.

    >>> str(parse_poly("x2^2 - x1 - x4", ["x1", "x2", "x3", "x4"]))
    'x2^2 - x1 - x4'
    """
    if not text.strip():
        raise PolySyntaxError("empty polynomial", text, 0)
    return _Parser(text, vars).parse()
