"""Exact algebra kernel: Gaussian rationals, multivariate polynomials and
reduced rational functions.

Everything here is immutable and exact.  The coefficient field is Q(i);
real quantities are elements with zero imaginary part.  Formal parameters
(a dilation factor r, the operator parameter c, ...) live in the same
polynomial ring as the coordinates but are constants for the differential
structure: partial() of anything with respect to a parameter is zero, and
parameters never appear in derivative multi-indices.

Monomials are exponent tuples over the fixed variable order
x1..xn, y1..yn, t, then parameters.  Leading terms, printing and the
denominator normalization all use plain lexicographic comparison of those
tuples, so canonical forms are unique: equal rational functions have
identical (num, den) pairs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence


class AlgebraError(Exception):
    """Base class for exact-kernel failures."""


class DivisionByZero(AlgebraError):
    pass


class UnknownVariable(AlgebraError):
    pass


class EvalDomainError(AlgebraError):
    """Numeric evaluation too close to the denominator zero set."""


# ---------------------------------------------------------------------------
# scalars
# ---------------------------------------------------------------------------

def _frac(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, int):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"cannot build an exact rational from {v!r}")


class Scalar:
    """A Gaussian rational re + im*i with exact Fraction parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, *a):
        raise AttributeError("Scalar is immutable")

    # -- predicates

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    def __bool__(self) -> bool:
        return not self.is_zero()

    # -- arithmetic

    def __add__(self, o: "Scalar") -> "Scalar":
        return Scalar(self.re + o.re, self.im + o.im)

    def __sub__(self, o: "Scalar") -> "Scalar":
        return Scalar(self.re - o.re, self.im - o.im)

    def __neg__(self) -> "Scalar":
        return Scalar(-self.re, -self.im)

    def __mul__(self, o: "Scalar") -> "Scalar":
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:          # common case: both real
            return Scalar(a * c)
        return Scalar(a * c - b * d, a * d + b * c)

    def inverse(self) -> "Scalar":
        if self.is_zero():
            raise DivisionByZero("inverse of zero scalar")
        if not self.im:
            return Scalar(1 / self.re)
        n = self.re * self.re + self.im * self.im
        return Scalar(self.re / n, -self.im / n)

    def __truediv__(self, o: "Scalar") -> "Scalar":
        return self * o.inverse()

    def conj(self) -> "Scalar":
        return Scalar(self.re, -self.im)

    # -- conversions and identity

    def to_complex(self) -> complex:
        return complex(self.re) + 1j * float(self.im)

    def __eq__(self, o) -> bool:
        return isinstance(o, Scalar) and self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        if not self.im:
            return str(self.re)
        if not self.re:
            return _imag_str(self.im)
        sign = "-" if self.im < 0 else "+"
        return f"{self.re} {sign} {_imag_str(abs(self.im))}"


def _imag_str(b: Fraction) -> str:
    if b == 1:
        return "i"
    if b == -1:
        return "-i"
    return f"{b}*i"


S_ZERO = Scalar(0)
S_ONE = Scalar(1)
S_I = Scalar(0, 1)


def rational(p, q=1) -> Scalar:
    return Scalar(Fraction(p, q))


# ---------------------------------------------------------------------------
# variable universe
# ---------------------------------------------------------------------------

class VarSet:
    """Ordered variable universe x1..xn, y1..yn, t plus formal parameters.

    Coordinate indices run 0..2n (x's, then y's, then t at index 2n);
    parameters follow.  All polynomials participating in one computation
    must share an equal VarSet.
    """

    __slots__ = ("n", "params", "names", "_index")

    def __init__(self, n: int, params: Sequence[str] = ()):
        if n < 1:
            raise ValueError("group dimension n must be >= 1")
        params = tuple(params)
        names = tuple(
            [f"x{j}" for j in range(1, n + 1)]
            + [f"y{j}" for j in range(1, n + 1)]
            + ["t"]
            + list(params)
        )
        if len(set(names)) != len(names):
            raise ValueError(f"parameter names collide with coordinates: {params}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "_index", {nm: k for k, nm in enumerate(names)})

    def __setattr__(self, *a):
        raise AttributeError("VarSet is immutable")

    @property
    def ncoords(self) -> int:
        return 2 * self.n + 1

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise UnknownVariable(f"unknown variable {name!r} (have {self.names})")

    def is_param(self, idx: int) -> bool:
        return idx > 2 * self.n

    # frame convention: horizontal index k = 1..2n maps to coordinate k-1
    def x_idx(self, j: int) -> int:
        if not 1 <= j <= self.n:
            raise UnknownVariable(f"x index {j} out of range for n={self.n}")
        return j - 1

    def y_idx(self, j: int) -> int:
        if not 1 <= j <= self.n:
            raise UnknownVariable(f"y index {j} out of range for n={self.n}")
        return self.n + j - 1

    @property
    def t_idx(self) -> int:
        return 2 * self.n

    def union(self, other: "VarSet") -> "VarSet":
        if self.n != other.n:
            raise AlgebraError("cannot merge variable sets of different dimension")
        extra = [p for p in other.params if p not in self.params]
        return VarSet(self.n, self.params + tuple(extra))

    def __eq__(self, o) -> bool:
        return isinstance(o, VarSet) and self.n == o.n and self.params == o.params

    def __hash__(self):
        return hash((self.n, self.params))

    def __repr__(self):
        return f"VarSet(n={self.n}, params={self.params})"


def _check_same_vs(a: "VarSet", b: "VarSet"):
    if a != b:
        raise AlgebraError(f"variable sets differ: {a} vs {b}")


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

class Polynomial:
    """Sparse multivariate polynomial over Q(i), canonical by construction.

    terms maps full-length exponent tuples to nonzero Scalars; two equal
    polynomials have identical term maps.
    """

    __slots__ = ("vs", "terms")

    def __init__(self, vs: VarSet, terms: Mapping[tuple, Scalar]):
        object.__setattr__(self, "vs", vs)
        object.__setattr__(self, "terms", dict(terms))

    def __setattr__(self, *a):
        raise AttributeError("Polynomial is immutable")

    # -- constructors

    @classmethod
    def make(cls, vs: VarSet, terms: Mapping[tuple, Scalar]) -> "Polynomial":
        return cls(vs, {e: c for e, c in terms.items() if not c.is_zero()})

    @classmethod
    def zero(cls, vs: VarSet) -> "Polynomial":
        return cls(vs, {})

    @classmethod
    def const(cls, vs: VarSet, c) -> "Polynomial":
        if not isinstance(c, Scalar):
            c = Scalar(c)
        if c.is_zero():
            return cls(vs, {})
        return cls(vs, {(0,) * vs.nvars: c})

    @classmethod
    def one(cls, vs: VarSet) -> "Polynomial":
        return cls.const(vs, S_ONE)

    @classmethod
    def var(cls, vs: VarSet, name_or_idx) -> "Polynomial":
        idx = name_or_idx if isinstance(name_or_idx, int) else vs.index(name_or_idx)
        e = [0] * vs.nvars
        e[idx] = 1
        return cls(vs, {tuple(e): S_ONE})

    # -- predicates / access

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return not self.terms or (len(self.terms) == 1
                                  and not any(next(iter(self.terms))))

    def const_value(self) -> Scalar:
        if self.is_zero():
            return S_ZERO
        if not self.is_const():
            raise AlgebraError("not a constant polynomial")
        return next(iter(self.terms.values()))

    def lead(self) -> tuple:
        """(exponents, coefficient) of the lex-greatest monomial."""
        if not self.terms:
            raise AlgebraError("zero polynomial has no leading term")
        e = max(self.terms)
        return e, self.terms[e]

    def degree_in(self, idx: int) -> int:
        if not self.terms:
            return -1
        return max(e[idx] for e in self.terms)

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def variables(self) -> set:
        used = set()
        for e in self.terms:
            for k, d in enumerate(e):
                if d:
                    used.add(k)
        return used

    def is_real(self) -> bool:
        return all(c.is_real() for c in self.terms.values())

    # -- arithmetic

    def __add__(self, o: "Polynomial") -> "Polynomial":
        _check_same_vs(self.vs, o.vs)
        t = dict(self.terms)
        for e, c in o.terms.items():
            s = t.get(e)
            if s is None:
                t[e] = c
            else:
                s = s + c
                if s.is_zero():
                    del t[e]
                else:
                    t[e] = s
        return Polynomial(self.vs, t)

    def __sub__(self, o: "Polynomial") -> "Polynomial":
        _check_same_vs(self.vs, o.vs)
        t = dict(self.terms)
        for e, c in o.terms.items():
            s = t.get(e)
            if s is None:
                t[e] = -c
            else:
                s = s - c
                if s.is_zero():
                    del t[e]
                else:
                    t[e] = s
        return Polynomial(self.vs, t)

    def __neg__(self) -> "Polynomial":
        return Polynomial(self.vs, {e: -c for e, c in self.terms.items()})

    def __mul__(self, o: "Polynomial") -> "Polynomial":
        _check_same_vs(self.vs, o.vs)
        if not self.terms or not o.terms:
            return Polynomial.zero(self.vs)
        # multiply the smaller term map into the larger one
        a, b = self.terms, o.terms
        if len(a) > len(b):
            a, b = b, a
        t: dict = {}
        for ea, ca in a.items():
            for eb, cb in b.items():
                e = tuple(i + j for i, j in zip(ea, eb))
                c = ca * cb
                s = t.get(e)
                if s is None:
                    t[e] = c
                else:
                    s = s + c
                    if s.is_zero():
                        del t[e]
                    else:
                        t[e] = s
        return Polynomial(self.vs, t)

    def scale(self, c: Scalar) -> "Polynomial":
        if c.is_zero():
            return Polynomial.zero(self.vs)
        return Polynomial(self.vs, {e: k * c for e, k in self.terms.items()})

    def shift(self, mono: tuple) -> "Polynomial":
        """Multiply by the monomial with the given exponent tuple."""
        if not any(mono):
            return self
        return Polynomial(self.vs,
                          {tuple(i + j for i, j in zip(e, mono)): c
                           for e, c in self.terms.items()})

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise AlgebraError("negative power of a polynomial; use RationalFn")
        result = Polynomial.one(self.vs)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def partial(self, idx: int) -> "Polynomial":
        """Exact partial derivative; parameters differentiate to zero."""
        if self.vs.is_param(idx):
            return Polynomial.zero(self.vs)
        t: dict = {}
        for e, c in self.terms.items():
            d = e[idx]
            if d:
                e2 = list(e)
                e2[idx] = d - 1
                key = tuple(e2)
                add = c * Scalar(d)
                s = t.get(key)
                t[key] = add if s is None else s + add
        return Polynomial.make(self.vs, t)

    def conj(self) -> "Polynomial":
        return Polynomial(self.vs, {e: c.conj() for e, c in self.terms.items()})

    # -- evaluation

    def eval_exact(self, values: Sequence[Scalar]) -> Scalar:
        if len(values) != self.vs.nvars:
            raise AlgebraError("evaluation needs one value per variable")
        acc = S_ZERO
        for e, c in self.terms.items():
            v = c
            for k, d in enumerate(e):
                if d:
                    base = values[k]
                    for _ in range(d):
                        v = v * base
            acc = acc + v
        return acc

    def eval_complex(self, values: Sequence[complex]) -> complex:
        acc = 0j
        for e, c in self.terms.items():
            v = c.to_complex()
            for k, d in enumerate(e):
                if d:
                    v = v * values[k] ** d
            acc += v
        return acc

    # -- structure helpers for gcd

    def split_monomial_content(self) -> tuple:
        """Factor out the biggest common monomial; returns (exps, cofactor)."""
        if not self.terms:
            return (0,) * self.vs.nvars, self
        it = iter(self.terms)
        m = list(next(it))
        for e in it:
            for k in range(len(m)):
                if e[k] < m[k]:
                    m[k] = e[k]
            if not any(m):
                break
        m = tuple(m)
        if not any(m):
            return m, self
        return m, Polynomial(self.vs,
                             {tuple(i - j for i, j in zip(e, m)): c
                              for e, c in self.terms.items()})

    def monic(self) -> "Polynomial":
        if self.is_zero():
            return self
        _, lc = self.lead()
        if lc == S_ONE:
            return self
        return self.scale(lc.inverse())

    def embed(self, vs2: VarSet) -> "Polynomial":
        """Re-express over a compatible variable set (same coordinates)."""
        if vs2 == self.vs:
            return self
        if vs2.n != self.vs.n:
            raise AlgebraError("embed requires equal group dimension")
        where = [vs2.index(nm) for nm in self.vs.names]
        t = {}
        for e, c in self.terms.items():
            e2 = [0] * vs2.nvars
            for k, d in enumerate(e):
                if d:
                    e2[where[k]] = d
            t[tuple(e2)] = c
        return Polynomial(vs2, t)

    # -- identity / printing

    def __eq__(self, o) -> bool:
        return (isinstance(o, Polynomial) and self.vs == o.vs
                and self.terms == o.terms)

    def __bool__(self):
        return not self.is_zero()

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e in sorted(self.terms, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                f"{self.vs.names[k]}^{d}" if d > 1 else self.vs.names[k]
                for k, d in enumerate(e) if d
            )
            parts.append(_term_str(c, mono))
        out = parts[0]
        for p in parts[1:]:
            out += f" - {p[1:]}" if p.startswith("-") else f" + {p}"
        return out

    def __repr__(self):
        return f"Polynomial({self.to_str()})"


def _term_str(c: Scalar, mono: str) -> str:
    s = str(c)
    if not mono:
        return f"({s})" if " " in s else s
    if c == S_ONE:
        return mono
    if c == Scalar(-1):
        return f"-{mono}"
    # a+b*i coefficients need parentheses; p/q and b*i re-parse by precedence
    return f"({s})*{mono}" if " " in s else f"{s}*{mono}"


# ---------------------------------------------------------------------------
# polynomial gcd (content + primitive pseudo-remainder recursion)
# ---------------------------------------------------------------------------

def poly_divexact(f: Polynomial, g: Polynomial) -> Polynomial:
    """Exact division f / g; raises AlgebraError if g does not divide f."""
    _check_same_vs(f.vs, g.vs)
    if g.is_zero():
        raise DivisionByZero("exact division by zero polynomial")
    if f.is_zero():
        return f
    if g.is_const():
        return f.scale(g.const_value().inverse())
    ge, gc = g.lead()
    gci = gc.inverse()
    rem = dict(f.terms)
    quo: dict = {}
    while rem:
        fe = max(rem)
        qe = tuple(i - j for i, j in zip(fe, ge))
        if any(d < 0 for d in qe):
            raise AlgebraError("polynomial division is not exact")
        qc = rem[fe] * gci
        quo[qe] = qc
        for e, c in g.terms.items():
            key = tuple(i + j for i, j in zip(qe, e))
            s = rem.get(key)
            v = c * qc
            if s is None:
                rem[key] = -v
            else:
                s = s - v
                if s.is_zero():
                    del rem[key]
                else:
                    rem[key] = s
    return Polynomial(f.vs, quo)


def _to_univar(f: Polynomial, v: int) -> dict:
    """View f as a polynomial in variable v: degree -> coefficient Polynomial."""
    out: dict = {}
    for e, c in f.terms.items():
        d = e[v]
        e2 = list(e)
        e2[v] = 0
        key = tuple(e2)
        slot = out.setdefault(d, {})
        slot[key] = slot.get(key, S_ZERO) + c
    return {d: Polynomial.make(f.vs, t) for d, t in out.items()
            if any(not c.is_zero() for c in t.values())}


def _from_univar(vs: VarSet, v: int, coeffs: dict) -> Polynomial:
    t: dict = {}
    for d, p in coeffs.items():
        for e, c in p.terms.items():
            e2 = list(e)
            e2[v] = d
            t[tuple(e2)] = c
    return Polynomial(vs, t)


def _uni_content(coeffs: dict) -> Polynomial:
    it = iter(coeffs.values())
    g = next(it)
    one = Polynomial.one(g.vs)
    for p in it:
        g = poly_gcd(g, p)
        if g.is_const():
            return one
    return g.monic()


def _uni_scale(coeffs: dict, p: Polynomial) -> dict:
    return {d: c * p for d, c in coeffs.items()}


def _uni_divexact(coeffs: dict, p: Polynomial) -> dict:
    if p.is_const():
        inv = p.const_value().inverse()
        return {d: c.scale(inv) for d, c in coeffs.items()}
    return {d: poly_divexact(c, p) for d, c in coeffs.items()}


def _uni_sub(a: dict, b: dict) -> dict:
    out = dict(a)
    for d, p in b.items():
        q = out.get(d)
        if q is None:
            out[d] = -p
        else:
            q = q - p
            if q.is_zero():
                del out[d]
            else:
                out[d] = q
    return out


def _pseudo_rem(a: dict, b: dict) -> dict:
    """Pseudo-remainder of a by b in the main variable (up to lc(b) powers)."""
    db = max(b)
    lb = b[db]
    r = dict(a)
    while r:
        dr = max(r)
        if dr < db:
            break
        lr = r[dr]
        # r <- lb*r - lr * x^(dr-db) * b
        r = _uni_scale(r, lb)
        shift = {d + dr - db: c * lr for d, c in b.items()}
        r = _uni_sub(r, shift)
    return r


def _pick_main_var(f: Polynomial, g: Polynomial) -> int | None:
    common = f.variables() & g.variables()
    if not common:
        return None
    return min(common,
               key=lambda v: (max(f.degree_in(v), g.degree_in(v)), v))


def poly_gcd(f: Polynomial, g: Polynomial) -> Polynomial:
    """Monic gcd over Q(i)[x1..], by content extraction and primitive PRS."""
    _check_same_vs(f.vs, g.vs)
    if f.is_zero():
        return g.monic()
    if g.is_zero():
        return f.monic()
    mf, f1 = f.split_monomial_content()
    mg, g1 = g.split_monomial_content()
    mono = tuple(min(i, j) for i, j in zip(mf, mg))
    core = _gcd_core(f1, g1)
    return core.shift(mono).monic()


def _gcd_core(f: Polynomial, g: Polynomial) -> Polynomial:
    if f.is_const() or g.is_const():
        return Polynomial.one(f.vs)
    if f.terms == g.terms:
        return f
    v = _pick_main_var(f, g)
    if v is None:
        return Polynomial.one(f.vs)
    F = _to_univar(f, v)
    G = _to_univar(g, v)
    cf = _uni_content(F)
    cg = _uni_content(G)
    if not cf.is_const():
        F = _uni_divexact(F, cf)
    if not cg.is_const():
        G = _uni_divexact(G, cg)
    cont = poly_gcd(cf, cg) if not (cf.is_const() or cg.is_const()) \
        else Polynomial.one(f.vs)

    a, b = (F, G) if max(F) >= max(G) else (G, F)
    while True:
        if not b:
            pp = a
            break
        if max(b) == 0:
            # a nonzero primitive constant in the main variable: coprime parts
            return cont
        r = _pseudo_rem(a, b)
        if r:
            c = _uni_content(r)
            if not c.is_const():
                r = _uni_divexact(r, c)
        a, b = b, r
    h = _from_univar(f.vs, v, pp)
    c = _uni_content(pp)
    if not c.is_const():
        h = poly_divexact(h, c)
    return h * cont if not cont.is_const() else h


# ---------------------------------------------------------------------------
# rational functions
# ---------------------------------------------------------------------------

class RationalFn:
    """Reduced rational function num/den with gcd(num, den) = 1 and the
    denominator's lex-leading coefficient normalized to 1."""

    __slots__ = ("num", "den")

    def __init__(self, num: Polynomial, den: Polynomial, _trusted=False):
        if not _trusted:
            raise AlgebraError("use RationalFn.make (canonicalizing constructor)")
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, *a):
        raise AttributeError("RationalFn is immutable")

    @property
    def vs(self) -> VarSet:
        return self.num.vs

    # -- constructors

    @staticmethod
    def make(num: Polynomial, den: Polynomial) -> "RationalFn":
        _check_same_vs(num.vs, den.vs)
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.is_zero():
            return RationalFn(num, Polynomial.one(num.vs), _trusted=True)
        if den.is_const():
            return RationalFn(num.scale(den.const_value().inverse()),
                              Polynomial.one(num.vs), _trusted=True)
        if num.terms == den.terms:
            return RationalFn.one(num.vs)
        g = poly_gcd(num, den)
        if not g.is_const():
            num = poly_divexact(num, g)
            den = poly_divexact(den, g)
        _, lc = den.lead()
        if lc != S_ONE:
            inv = lc.inverse()
            num = num.scale(inv)
            den = den.scale(inv)
        return RationalFn(num, den, _trusted=True)

    @staticmethod
    def from_polynomial(p: Polynomial) -> "RationalFn":
        return RationalFn(p, Polynomial.one(p.vs), _trusted=True)

    @staticmethod
    def const(vs: VarSet, c) -> "RationalFn":
        return RationalFn.from_polynomial(Polynomial.const(vs, c))

    @staticmethod
    def zero(vs: VarSet) -> "RationalFn":
        return RationalFn.from_polynomial(Polynomial.zero(vs))

    @staticmethod
    def one(vs: VarSet) -> "RationalFn":
        return RationalFn.from_polynomial(Polynomial.one(vs))

    @staticmethod
    def var(vs: VarSet, name_or_idx) -> "RationalFn":
        return RationalFn.from_polynomial(Polynomial.var(vs, name_or_idx))

    # -- predicates

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return self.den.is_const()

    def is_const(self) -> bool:
        return self.num.is_const() and self.den.is_const()

    def const_value(self) -> Scalar:
        return self.num.const_value() / self.den.const_value()

    def is_real(self) -> bool:
        return self.num.is_real() and self.den.is_real()

    def __bool__(self):
        return not self.is_zero()

    # -- arithmetic

    def __add__(self, o: "RationalFn") -> "RationalFn":
        an, ad, bn, bd = self.num, self.den, o.num, o.den
        if ad.terms == bd.terms:
            return RationalFn.make(an + bn, ad)
        if ad.is_const():
            return RationalFn.make(an * bd + bn, bd)
        if bd.is_const():
            return RationalFn.make(an + bn * ad, ad)
        g0 = poly_gcd(ad, bd)
        if g0.is_const():
            # coprime denominators: the sum is already reduced
            return RationalFn._normalized(an * bd + bn * ad, ad * bd)
        ad_r = poly_divexact(ad, g0)
        bd_r = poly_divexact(bd, g0)
        num = an * bd_r + bn * ad_r
        g1 = poly_gcd(num, g0)
        den = ad_r * bd
        if not g1.is_const():
            num = poly_divexact(num, g1)
            den = poly_divexact(den, g1)
        return RationalFn._normalized(num, den)

    def __sub__(self, o: "RationalFn") -> "RationalFn":
        return self + (-o)

    def __neg__(self) -> "RationalFn":
        return RationalFn(-self.num, self.den, _trusted=True)

    def __mul__(self, o: "RationalFn") -> "RationalFn":
        an, ad, bn, bd = self.num, self.den, o.num, o.den
        if an.is_zero() or bn.is_zero():
            return RationalFn.zero(self.vs)
        if not bd.is_const():
            g = poly_gcd(an, bd)
            if not g.is_const():
                an = poly_divexact(an, g)
                bd = poly_divexact(bd, g)
        if not ad.is_const():
            g = poly_gcd(bn, ad)
            if not g.is_const():
                bn = poly_divexact(bn, g)
                ad = poly_divexact(ad, g)
        return RationalFn._normalized(an * bn, ad * bd)

    def inverse(self) -> "RationalFn":
        if self.is_zero():
            raise DivisionByZero("division by the zero rational function")
        return RationalFn._normalized(self.den, self.num)

    def __truediv__(self, o: "RationalFn") -> "RationalFn":
        return self * o.inverse()

    def __pow__(self, k: int) -> "RationalFn":
        if k < 0:
            return self.inverse() ** (-k)
        return RationalFn(self.num ** k, self.den ** k, _trusted=True) \
            if k else RationalFn.one(self.vs)

    @staticmethod
    def _normalized(num: Polynomial, den: Polynomial) -> "RationalFn":
        """num/den known coprime; just normalize the leading coefficient."""
        if num.is_zero():
            return RationalFn.zero(num.vs)
        if den.is_const():
            return RationalFn(num.scale(den.const_value().inverse()),
                              Polynomial.one(num.vs), _trusted=True)
        _, lc = den.lead()
        if lc != S_ONE:
            inv = lc.inverse()
            num = num.scale(inv)
            den = den.scale(inv)
        return RationalFn(num, den, _trusted=True)

    # -- calculus

    def partial(self, var) -> "RationalFn":
        idx = var if isinstance(var, int) else self.vs.index(var)
        if self.vs.is_param(idx):
            return RationalFn.zero(self.vs)
        n, d = self.num, self.den
        if d.is_const():
            return RationalFn._normalized(n.partial(idx), d)
        dn = n.partial(idx)
        dd = d.partial(idx)
        if dd.is_zero():
            return RationalFn.make(dn, d)
        g = poly_gcd(d, dd)
        a = poly_divexact(d, g)
        b = poly_divexact(dd, g)
        return RationalFn.make(dn * a - n * b, d * a)

    def conj(self) -> "RationalFn":
        return RationalFn.make(self.num.conj(), self.den.conj())

    # -- substitution and evaluation

    def substitute(self, assignment: Mapping) -> "RationalFn":
        """Composition: variables map to rational functions.

        Keys may be names or indices; unmentioned variables map to
        themselves.  Raises DivisionByZero if the substituted denominator
        vanishes identically.
        """
        assign = {}
        for k, v in assignment.items():
            idx = k if isinstance(k, int) else self.vs.index(k)
            assign[idx] = v
        num = substitute_poly(self.num, assign)
        den = substitute_poly(self.den, assign)
        if den.is_zero():
            raise DivisionByZero("substitution produced an identically zero denominator")
        return num / den

    def eval_exact(self, values: Sequence[Scalar]) -> Scalar:
        d = self.den.eval_exact(values)
        if d.is_zero():
            raise DivisionByZero("evaluation on the denominator zero set")
        return self.num.eval_exact(values) / d

    def eval_float(self, values: Sequence, den_tol: float = 1e-12) -> complex:
        vals = [complex(v) for v in values]
        d = self.den.eval_complex(vals)
        if abs(d) <= den_tol:
            raise EvalDomainError(
                f"denominator magnitude {abs(d):.3e} below threshold {den_tol:.1e}")
        return self.num.eval_complex(vals) / d

    def compiled(self, den_tol: float = 1e-12) -> Callable:
        """Fast numeric evaluator; accepts scalars or numpy arrays per variable."""
        import numpy as np

        num_terms = [(c.to_complex(), e) for e, c in self.num.terms.items()]
        den_terms = [(c.to_complex(), e) for e, c in self.den.terms.items()]
        all_real = self.is_real()

        def _eval(terms, values):
            acc = 0.0
            for c, e in terms:
                v = c.real if all_real else c
                for k, d in enumerate(e):
                    if d:
                        v = v * values[k] ** d
                acc = acc + v
            return acc

        def fn(values):
            den = _eval(den_terms, values)
            if np.ndim(den) == 0:
                if abs(den) <= den_tol:
                    raise EvalDomainError("denominator below threshold")
            elif (np.abs(den) <= den_tol).any():
                raise EvalDomainError("denominator below threshold on grid")
            return _eval(num_terms, values) / den

        return fn

    def embed(self, vs2: VarSet) -> "RationalFn":
        if vs2 == self.vs:
            return self
        return RationalFn(self.num.embed(vs2), self.den.embed(vs2), _trusted=True)

    # -- identity / printing

    def __eq__(self, o) -> bool:
        return (isinstance(o, RationalFn) and self.num == o.num
                and self.den == o.den)

    def to_str(self) -> str:
        if self.den.is_const() and self.den.const_value() == S_ONE:
            return self.num.to_str()
        n = self.num.to_str()
        d = self.den.to_str()
        return f"({n})/({d})"

    def __repr__(self):
        return f"RationalFn({self.to_str()})"


def substitute_poly(p: Polynomial, assign: Mapping[int, RationalFn]) -> RationalFn:
    """Substitute rational functions for variables of a polynomial.

    All assigned values must share one VarSet, which becomes the result's.
    Assembles a single numerator over the common denominator so only one
    gcd reduction runs at the end.
    """
    if not assign:
        return RationalFn.from_polynomial(p)
    target_vs = next(iter(assign.values())).vs
    if p.is_zero():
        return RationalFn.zero(target_vs)

    maxdeg = {i: p.degree_in(i) for i in assign}
    maxdeg = {i: d for i, d in maxdeg.items() if d > 0}
    # power tables for substituted variables
    num_pow, den_pow = {}, {}
    for i, d in maxdeg.items():
        f = assign[i]
        _check_same_vs(f.vs, target_vs)
        np_ = [Polynomial.one(target_vs)]
        dp_ = [Polynomial.one(target_vs)]
        for _ in range(d):
            np_.append(np_[-1] * f.num)
            dp_.append(dp_[-1] * f.den)
        num_pow[i], den_pow[i] = np_, dp_

    # variables kept fixed must exist in the target VarSet under the same name
    keep_map = {}
    for k in range(p.vs.nvars):
        if k not in assign:
            keep_map[k] = target_vs.index(p.vs.names[k])

    total = Polynomial.zero(target_vs)
    for e, c in p.terms.items():
        mono = [0] * target_vs.nvars
        for k, d in enumerate(e):
            if d and k in keep_map:
                mono[keep_map[k]] = d
        term = Polynomial.const(target_vs, c).shift(tuple(mono))
        for i, d in maxdeg.items():
            ei = e[i]
            term = term * num_pow[i][ei]
            if ei < d:
                term = term * den_pow[i][d - ei]
        total = total + term

    den = Polynomial.one(target_vs)
    for i, d in maxdeg.items():
        den = den * den_pow[i][d]
    return RationalFn.make(total, den)


def rational_matrix_det(rows: Sequence[Sequence[RationalFn]]) -> RationalFn:
    """Determinant of a square RationalFn matrix, fraction-free.

    Clears row denominators, runs Bareiss elimination on the polynomial
    matrix, divides back at the end.
    """
    m = len(rows)
    if m == 0:
        raise AlgebraError("empty matrix")
    vs = rows[0][0].vs
    den_total = Polynomial.one(vs)
    pmat = []
    for row in rows:
        if len(row) != m:
            raise AlgebraError("matrix is not square")
        d = Polynomial.one(vs)
        for f in row:
            d = d * f.den
        den_total = den_total * d
        prow = []
        for f in row:
            prow.append(f.num * poly_divexact(d, f.den))
        pmat.append(prow)
    det = _bareiss_det(vs, pmat)
    return RationalFn.make(det, den_total)


def _bareiss_det(vs: VarSet, a: list) -> Polynomial:
    m = len(a)
    sign = 1
    prev = Polynomial.one(vs)
    for k in range(m - 1):
        if a[k][k].is_zero():
            piv = next((i for i in range(k + 1, m) if not a[i][k].is_zero()), None)
            if piv is None:
                return Polynomial.zero(vs)
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                num = a[k][k] * a[i][j] - a[i][k] * a[k][j]
                a[i][j] = poly_divexact(num, prev)
            a[i][k] = Polynomial.zero(vs)
        prev = a[k][k]
    det = a[m - 1][m - 1]
    return -det if sign < 0 else det
