"""Plain-text expression grammar for exact rational functions.

Variables are x1..xn, y1..yn, t; parameter names come from the VarSet;
`i` is the imaginary unit; rational literals are ordinary divisions like
3/4.  Operators: + - * / ^ with the usual precedence, ^ binds tightest
and takes an integer exponent (negative allowed).  Printing uses the
canonical term order of the kernel, and parse(print(f)) == f.
"""

from __future__ import annotations

import re

from .algebra import AlgebraError, Polynomial, RationalFn, Scalar, VarSet


class ParseError(AlgebraError):
    pass


_TOKEN_RE = re.compile(r"\s*(?:(\d+)|([A-Za-z][A-Za-z0-9]*)|([-+*/^()\[\],]))")


def tokenize(text: str) -> list:
    """Tokens are (kind, value) with kind in {'int', 'name', 'sym'}."""
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:].lstrip()
            if not rest:
                break
            raise ParseError(f"unexpected character {rest[0]!r} at position {pos}")
        if m.group(1):
            out.append(("int", int(m.group(1))))
        elif m.group(2):
            out.append(("name", m.group(2)))
        else:
            out.append(("sym", m.group(3)))
        pos = m.end()
    return out


class TokenStream:
    def __init__(self, tokens):
        self.tokens = tokens
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, None)

    def next(self):
        tok = self.peek()
        self.pos += 1
        return tok

    def expect_sym(self, s):
        kind, val = self.next()
        if kind != "sym" or val != s:
            raise ParseError(f"expected {s!r}, got {val!r}")

    def at_end(self):
        return self.pos >= len(self.tokens)


def parse_rational(text: str, vs: VarSet) -> RationalFn:
    ts = TokenStream(tokenize(text))
    value = _parse_expr(ts, vs)
    if not ts.at_end():
        raise ParseError(f"trailing input at token {ts.peek()[1]!r}")
    return value


def _parse_expr(ts: TokenStream, vs: VarSet) -> RationalFn:
    value = _parse_term(ts, vs)
    while True:
        kind, val = ts.peek()
        if kind == "sym" and val in "+-":
            ts.next()
            rhs = _parse_term(ts, vs)
            value = value + rhs if val == "+" else value - rhs
        else:
            return value


def _parse_term(ts: TokenStream, vs: VarSet) -> RationalFn:
    value = _parse_unary(ts, vs)
    while True:
        kind, val = ts.peek()
        if kind == "sym" and val in "*/":
            ts.next()
            rhs = _parse_unary(ts, vs)
            if val == "*":
                value = value * rhs
            else:
                if rhs.is_zero():
                    raise ParseError("division by zero in expression")
                value = value / rhs
        else:
            return value


def _parse_unary(ts: TokenStream, vs: VarSet) -> RationalFn:
    kind, val = ts.peek()
    if kind == "sym" and val in "+-":
        ts.next()
        inner = _parse_unary(ts, vs)
        return -inner if val == "-" else inner
    return _parse_power(ts, vs)


def _parse_power(ts: TokenStream, vs: VarSet) -> RationalFn:
    base = _parse_atom(ts, vs)
    kind, val = ts.peek()
    if kind == "sym" and val == "^":
        ts.next()
        k = parse_int_exponent(ts)
        if k < 0 and base.is_zero():
            raise ParseError("zero to a negative power")
        return base ** k
    return base


def parse_int_exponent(ts: TokenStream) -> int:
    kind, val = ts.peek()
    if kind == "sym" and val == "(":
        ts.next()
        k = parse_int_exponent(ts)
        ts.expect_sym(")")
        return k
    neg = False
    if kind == "sym" and val == "-":
        ts.next()
        neg = True
        kind, val = ts.peek()
    if kind != "int":
        raise ParseError(f"expected an integer exponent, got {val!r}")
    ts.next()
    return -val if neg else val


def _parse_atom(ts: TokenStream, vs: VarSet) -> RationalFn:
    kind, val = ts.next()
    if kind == "int":
        return RationalFn.const(vs, Scalar(val))
    if kind == "name":
        if val == "i":
            return RationalFn.const(vs, Scalar(0, 1))
        return RationalFn.var(vs, val)   # raises UnknownVariable if absent
    if kind == "sym" and val == "(":
        inner = _parse_expr(ts, vs)
        ts.expect_sym(")")
        return inner
    raise ParseError(f"unexpected token {val!r}")


def print_rational(f: RationalFn) -> str:
    return f.to_str()
