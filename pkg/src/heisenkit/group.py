"""The Heisenberg group on R^(2n+1): group law, inverses, the exponential
map from the Lie algebra, and the standard symplectic form.

Coordinates work with exact Fractions or with floats; the group law is
(x,y,t)*(x',y',t') = (x+x', y+y', t+t' - 2 x.y' + 2 x'.y).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


class DimensionMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Point:
    x: tuple
    y: tuple
    t: object

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise DimensionMismatch("x and y blocks differ in length")

    @property
    def n(self) -> int:
        return len(self.x)

    def coords(self) -> tuple:
        return self.x + self.y + (self.t,)

    @staticmethod
    def from_coords(vals: Sequence) -> "Point":
        if len(vals) % 2 == 0 or len(vals) < 3:
            raise DimensionMismatch(f"need 2n+1 coordinates, got {len(vals)}")
        n = (len(vals) - 1) // 2
        return Point(tuple(vals[:n]), tuple(vals[n:2 * n]), vals[2 * n])

    def to_complex(self) -> tuple:
        z = tuple(complex(a) + 1j * float(b) for a, b in zip(self.x, self.y))
        return z, float(self.t)


@dataclass(frozen=True)
class LieVector:
    """Coefficients on the frame at the origin: a on the X_j, b on the Y_j,
    c on T."""
    a: tuple
    b: tuple
    c: object

    def __post_init__(self):
        if len(self.a) != len(self.b):
            raise DimensionMismatch("a and b blocks differ in length")

    @property
    def n(self) -> int:
        return len(self.a)

    def scaled(self, s) -> "LieVector":
        return LieVector(tuple(s * v for v in self.a),
                         tuple(s * v for v in self.b), s * self.c)


def origin(n: int) -> Point:
    zero = Fraction(0)
    return Point((zero,) * n, (zero,) * n, zero)


def group_mul(p: Point, q: Point) -> Point:
    if p.n != q.n:
        raise DimensionMismatch(f"points of dimension {p.n} and {q.n}")
    x = tuple(a + b for a, b in zip(p.x, q.x))
    y = tuple(a + b for a, b in zip(p.y, q.y))
    cross = sum(a * b for a, b in zip(p.x, q.y)) - sum(a * b for a, b in zip(q.x, p.y))
    t = p.t + q.t - 2 * cross
    return Point(x, y, t)


def group_inv(p: Point) -> Point:
    return Point(tuple(-v for v in p.x), tuple(-v for v in p.y), -p.t)


def exponential(w: LieVector) -> Point:
    """exp of a Lie-algebra element; in these coordinates exponential
    coordinates agree with model coordinates, so exp(a,b,c) = (a,b,c).
    The test suite validates this convention by integrating the
    left-invariant ODE."""
    return Point(w.a, w.b, w.c)


def logarithm(p: Point) -> LieVector:
    return LieVector(p.x, p.y, p.t)


def symplectic_form(z: Sequence[complex], w: Sequence[complex]):
    """omega(z, w) = Im sum_j z_j * conj(w_j)."""
    if len(z) != len(w):
        raise DimensionMismatch("symplectic form needs equal-length tuples")
    total = sum(a * b.conjugate() for a, b in zip(z, w))
    return total.imag


def group_mul_complex(z, t, w, u):
    """The group law in complex coordinates (z,t)*(w,u)."""
    zs = tuple(a + b for a, b in zip(z, w))
    return zs, t + u + 2 * symplectic_form(z, w)


def frame_vector_at(w: LieVector, p: Point) -> tuple:
    """Coordinate components of sum_j a_j X_j + b_j Y_j + c T at p."""
    if w.n != p.n:
        raise DimensionMismatch("Lie vector and point dimensions differ")
    tcomp = w.c + 2 * sum(yj * aj for yj, aj in zip(p.y, w.a)) \
        - 2 * sum(xj * bj for xj, bj in zip(p.x, w.b))
    return w.a + w.b + (tcomp,)
