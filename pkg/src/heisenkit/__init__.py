"""heisenkit: exact symbolic and numeric checks for contact, conformal and
quasiconformal maps of the sub-Riemannian Heisenberg group."""

__version__ = "0.1.0"

from .algebra import (  # noqa: F401
    AlgebraError,
    DivisionByZero,
    EvalDomainError,
    Polynomial,
    RationalFn,
    Scalar,
    UnknownVariable,
    VarSet,
)
