"""Differential operators with exact rational-function coefficients.

An operator is a finite sum of coefficient * partial-derivative terms,
kept in canonical form: every derivative pushed to the right of its
coefficient, no zero coefficients stored.  Equality of canonical forms is
operator equality, which is what lets the identity suites reduce to a
syntactic check.

Derivative multi-indices range over the coordinates x1..xn, y1..yn, t
only; formal parameters are constants and never carry derivatives.
"""

from __future__ import annotations

import math
import re
from itertools import product
from typing import Mapping

from .algebra import (AlgebraError, Polynomial, RationalFn, Scalar, VarSet,
                      _check_same_vs)
from .parsing import ParseError, TokenStream, parse_int_exponent, tokenize


class DiffOp:
    """Canonical-form differential operator over one VarSet."""

    __slots__ = ("vs", "terms")

    def __init__(self, vs: VarSet, terms: Mapping[tuple, RationalFn]):
        object.__setattr__(self, "vs", vs)
        object.__setattr__(self, "terms", dict(terms))

    def __setattr__(self, *a):
        raise AttributeError("DiffOp is immutable")

    @classmethod
    def make(cls, vs: VarSet, terms: Mapping[tuple, RationalFn]) -> "DiffOp":
        return cls(vs, {a: c for a, c in terms.items() if not c.is_zero()})

    @classmethod
    def zero(cls, vs: VarSet) -> "DiffOp":
        return cls(vs, {})

    @classmethod
    def identity(cls, vs: VarSet) -> "DiffOp":
        return cls.from_scalar(RationalFn.one(vs))

    @classmethod
    def from_scalar(cls, f: RationalFn) -> "DiffOp":
        if f.is_zero():
            return cls(f.vs, {})
        return cls(f.vs, {(0,) * f.vs.ncoords: f})

    @classmethod
    def partial_op(cls, vs: VarSet, idx: int) -> "DiffOp":
        if vs.is_param(idx):
            raise AlgebraError("no derivatives along formal parameters")
        a = [0] * vs.ncoords
        a[idx] = 1
        return cls(vs, {tuple(a): RationalFn.one(vs)})

    # -- structure

    def order(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def is_zero(self) -> bool:
        return not self.terms

    def is_scalar(self) -> bool:
        zero = (0,) * self.vs.ncoords
        return not self.terms or set(self.terms) == {zero}

    def as_scalar(self) -> RationalFn:
        if self.is_zero():
            return RationalFn.zero(self.vs)
        if not self.is_scalar():
            raise AlgebraError("operator has positive order, not a scalar")
        return next(iter(self.terms.values()))

    # -- linear structure

    def __add__(self, o: "DiffOp") -> "DiffOp":
        _check_same_vs(self.vs, o.vs)
        t = dict(self.terms)
        for a, c in o.terms.items():
            s = t.get(a)
            s = c if s is None else s + c
            if s.is_zero():
                t.pop(a, None)
            else:
                t[a] = s
        return DiffOp(self.vs, t)

    def __sub__(self, o: "DiffOp") -> "DiffOp":
        return self + (-o)

    def __neg__(self) -> "DiffOp":
        return DiffOp(self.vs, {a: -c for a, c in self.terms.items()})

    def scale(self, f: RationalFn) -> "DiffOp":
        """Left multiplication by a function."""
        if f.is_zero():
            return DiffOp.zero(self.vs)
        return DiffOp(self.vs, {a: f * c for a, c in self.terms.items()})

    # -- composition (Leibniz exchange pushes derivatives right)

    def __mul__(self, o: "DiffOp") -> "DiffOp":
        return self.compose(o)

    def compose(self, o: "DiffOp") -> "DiffOp":
        _check_same_vs(self.vs, o.vs)
        out: dict = {}
        for beta, b in o.terms.items():
            dcache = {(0,) * self.vs.ncoords: b}
            for alpha, a in self.terms.items():
                for gamma in _sub_multi_indices(alpha):
                    delta = tuple(i - j for i, j in zip(alpha, gamma))
                    db = _cached_partial(b, delta, dcache)
                    if db.is_zero():
                        continue
                    coeff = a * db
                    k = _binom(alpha, gamma)
                    if k != 1:
                        coeff = coeff * RationalFn.const(self.vs, Scalar(k))
                    key = tuple(i + j for i, j in zip(gamma, beta))
                    s = out.get(key)
                    s = coeff if s is None else s + coeff
                    if s.is_zero():
                        out.pop(key, None)
                    else:
                        out[key] = s
        return DiffOp(self.vs, out)

    def __pow__(self, k: int) -> "DiffOp":
        if k < 0:
            raise AlgebraError("negative power of a differential operator")
        result = DiffOp.identity(self.vs)
        for _ in range(k):
            result = result.compose(self)
        return result

    # -- action

    def apply(self, f: RationalFn) -> RationalFn:
        _check_same_vs(self.vs, f.vs)
        cache = {(0,) * self.vs.ncoords: f}
        acc = RationalFn.zero(self.vs)
        for alpha, a in self.terms.items():
            df = _cached_partial(f, alpha, cache)
            if not df.is_zero():
                acc = acc + a * df
        return acc

    def conj(self) -> "DiffOp":
        return DiffOp(self.vs, {a: c.conj() for a, c in self.terms.items()})

    # -- identity / printing

    def __eq__(self, o) -> bool:
        return isinstance(o, DiffOp) and self.vs == o.vs and self.terms == o.terms

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        names = self.vs.names
        parts = []
        for a in sorted(self.terms, key=lambda m: (sum(m), m), reverse=True):
            c = self.terms[a]
            dsym = "*".join(
                f"D{names[k]}^{d}" if d > 1 else f"D{names[k]}"
                for k, d in enumerate(a) if d
            )
            cs = c.to_str()
            if not dsym:
                parts.append(cs)
            elif cs == "1":
                parts.append(dsym)
            else:
                parts.append(f"({cs})*{dsym}")
        return " + ".join(parts)

    def __repr__(self):
        return f"DiffOp({self.to_str()})"


def _sub_multi_indices(alpha):
    return product(*(range(a + 1) for a in alpha))


def _binom(alpha, gamma) -> int:
    k = 1
    for a, g in zip(alpha, gamma):
        if g:
            k *= math.comb(a, g)
    return k


def _cached_partial(f: RationalFn, alpha: tuple, cache: dict) -> RationalFn:
    got = cache.get(alpha)
    if got is not None:
        return got
    k = next(i for i, d in enumerate(alpha) if d)
    beta = list(alpha)
    beta[k] -= 1
    beta = tuple(beta)
    df = _cached_partial(f, beta, cache).partial(k)
    cache[alpha] = df
    return df


def commutator(a: DiffOp, b: DiffOp) -> DiffOp:
    return a.compose(b) - b.compose(a)


# ---------------------------------------------------------------------------
# the frame and its relatives
# ---------------------------------------------------------------------------

def op_X(vs: VarSet, j: int) -> DiffOp:
    """X_j = d/dx_j + 2 y_j d/dt."""
    two_y = RationalFn.from_polynomial(
        Polynomial.var(vs, vs.y_idx(j)).scale(Scalar(2)))
    return DiffOp.partial_op(vs, vs.x_idx(j)) \
        + DiffOp.partial_op(vs, vs.t_idx).scale(two_y)


def op_Y(vs: VarSet, j: int) -> DiffOp:
    """Y_j = d/dy_j - 2 x_j d/dt."""
    m2x = RationalFn.from_polynomial(
        Polynomial.var(vs, vs.x_idx(j)).scale(Scalar(-2)))
    return DiffOp.partial_op(vs, vs.y_idx(j)) \
        + DiffOp.partial_op(vs, vs.t_idx).scale(m2x)


def op_T(vs: VarSet) -> DiffOp:
    return DiffOp.partial_op(vs, vs.t_idx)


def op_frame(vs: VarSet, k: int) -> DiffOp:
    """Horizontal frame by flat index: X_k for k<=n, Y_(k-n) for k>n."""
    if 1 <= k <= vs.n:
        return op_X(vs, k)
    if vs.n < k <= 2 * vs.n:
        return op_Y(vs, k - vs.n)
    raise AlgebraError(f"frame index {k} out of range for n={vs.n}")


def op_Xtilde(vs: VarSet, j: int) -> DiffOp:
    """Right-invariant mirror of X_j: d/dx_j - 2 y_j d/dt."""
    m2y = RationalFn.from_polynomial(
        Polynomial.var(vs, vs.y_idx(j)).scale(Scalar(-2)))
    return DiffOp.partial_op(vs, vs.x_idx(j)) \
        + DiffOp.partial_op(vs, vs.t_idx).scale(m2y)


def op_Ytilde(vs: VarSet, j: int) -> DiffOp:
    """Right-invariant mirror of Y_j: d/dy_j + 2 x_j d/dt."""
    two_x = RationalFn.from_polynomial(
        Polynomial.var(vs, vs.x_idx(j)).scale(Scalar(2)))
    return DiffOp.partial_op(vs, vs.y_idx(j)) \
        + DiffOp.partial_op(vs, vs.t_idx).scale(two_x)


def op_Z(vs: VarSet, j: int) -> DiffOp:
    half = RationalFn.const(vs, Scalar("1/2"))
    mi_half = RationalFn.const(vs, Scalar(0, "-1/2"))
    return op_X(vs, j).scale(half) + op_Y(vs, j).scale(mi_half)


def op_Zbar(vs: VarSet, j: int) -> DiffOp:
    half = RationalFn.const(vs, Scalar("1/2"))
    i_half = RationalFn.const(vs, Scalar(0, "1/2"))
    return op_X(vs, j).scale(half) + op_Y(vs, j).scale(i_half)


def op_delta0(vs: VarSet) -> DiffOp:
    """Kohn Laplacian sum_j X_j^2 + Y_j^2."""
    acc = DiffOp.zero(vs)
    for j in range(1, vs.n + 1):
        xj = op_X(vs, j)
        yj = op_Y(vs, j)
        acc = acc + xj.compose(xj) + yj.compose(yj)
    return acc


def op_L(vs: VarSet, c) -> DiffOp:
    """L_c = -(1/4) Delta0 + c T; c may be a rational, Scalar or parameter
    name present in the VarSet."""
    if isinstance(c, str):
        cf = RationalFn.var(vs, c)
    elif isinstance(c, RationalFn):
        cf = c
    else:
        cf = RationalFn.const(vs, c if isinstance(c, Scalar) else Scalar(c))
    quarter = RationalFn.const(vs, Scalar("-1/4"))
    return op_delta0(vs).scale(quarter) + op_T(vs).scale(cf)


def builtin(name: str, j: int | None = None, n: int | None = None,
            vs: VarSet | None = None, c=None) -> DiffOp:
    """Named operator dispatcher; pass vs, or n to build a fresh VarSet."""
    if vs is None:
        if n is None:
            raise AlgebraError("builtin needs a VarSet or a dimension n")
        vs = VarSet(n)
    table = {"X": op_X, "Y": op_Y, "Xtilde": op_Xtilde, "Ytilde": op_Ytilde,
             "Z": op_Z, "Zbar": op_Zbar}
    if name in table:
        if j is None:
            raise AlgebraError(f"operator {name} needs an index j")
        return table[name](vs, j)
    if name == "T":
        return op_T(vs)
    if name == "Delta0":
        return op_delta0(vs)
    if name == "Lc":
        return op_L(vs, c if c is not None else 0)
    raise AlgebraError(f"unknown operator name {name!r}")


# ---------------------------------------------------------------------------
# operator expression parser
# ---------------------------------------------------------------------------

_OPNAME_RE = re.compile(r"^(Zbar|Xt|Yt|X|Y|Z)([1-9][0-9]*)$")


def parse_operator(text: str, vs: VarSet) -> DiffOp:
    ts = TokenStream(tokenize(text))
    op = _parse_oexpr(ts, vs)
    if not ts.at_end():
        raise ParseError(f"trailing input at token {ts.peek()[1]!r}")
    return op


def _parse_oexpr(ts: TokenStream, vs: VarSet) -> DiffOp:
    value = _parse_oterm(ts, vs)
    while True:
        kind, val = ts.peek()
        if kind == "sym" and val in "+-":
            ts.next()
            rhs = _parse_oterm(ts, vs)
            value = value + rhs if val == "+" else value - rhs
        else:
            return value


def _parse_oterm(ts: TokenStream, vs: VarSet) -> DiffOp:
    value = _parse_ounary(ts, vs)
    while True:
        kind, val = ts.peek()
        if kind == "sym" and val in "*/":
            ts.next()
            rhs = _parse_ounary(ts, vs)
            if val == "*":
                value = value.compose(rhs)
            else:
                s = rhs.as_scalar()
                if s.is_zero():
                    raise ParseError("division by zero in operator expression")
                value = value.scale(s.inverse()) if value.is_scalar() \
                    else value.compose(DiffOp.from_scalar(s.inverse()))
        else:
            return value


def _parse_ounary(ts: TokenStream, vs: VarSet) -> DiffOp:
    kind, val = ts.peek()
    if kind == "sym" and val in "+-":
        ts.next()
        inner = _parse_ounary(ts, vs)
        return -inner if val == "-" else inner
    return _parse_opower(ts, vs)


def _parse_opower(ts: TokenStream, vs: VarSet) -> DiffOp:
    base = _parse_oatom(ts, vs)
    kind, val = ts.peek()
    if kind == "sym" and val == "^":
        ts.next()
        k = parse_int_exponent(ts)
        if k < 0:
            if not base.is_scalar():
                raise ParseError("negative power of a non-scalar operator")
            return DiffOp.from_scalar(base.as_scalar() ** k)
        return base ** k
    return base


def _parse_oatom(ts: TokenStream, vs: VarSet) -> DiffOp:
    kind, val = ts.next()
    if kind == "int":
        return DiffOp.from_scalar(RationalFn.const(vs, Scalar(val)))
    if kind == "name":
        if val == "i":
            return DiffOp.from_scalar(RationalFn.const(vs, Scalar(0, 1)))
        if val == "T":
            return op_T(vs)
        if val == "Delta0":
            return op_delta0(vs)
        if val == "L":
            ts.expect_sym("(")
            arg = _parse_oexpr(ts, vs)
            ts.expect_sym(")")
            return op_L(vs, arg.as_scalar())
        m = _OPNAME_RE.match(val)
        if m:
            stem, j = m.group(1), int(m.group(2))
            if j > vs.n:
                raise ParseError(f"operator index {j} exceeds n={vs.n}")
            fac = {"X": op_X, "Y": op_Y, "Z": op_Z, "Zbar": op_Zbar,
                   "Xt": op_Xtilde, "Yt": op_Ytilde}[stem]
            return fac(vs, j)
        # anything else is a scalar symbol: coordinate or parameter
        return DiffOp.from_scalar(RationalFn.var(vs, val))
    if kind == "sym" and val == "(":
        inner = _parse_oexpr(ts, vs)
        ts.expect_sym(")")
        return inner
    if kind == "sym" and val == "[":
        a = _parse_oexpr(ts, vs)
        ts.expect_sym(",")
        b = _parse_oexpr(ts, vs)
        ts.expect_sym("]")
        return commutator(a, b)
    raise ParseError(f"unexpected token {val!r} in operator expression")
