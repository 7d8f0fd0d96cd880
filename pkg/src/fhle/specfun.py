"""Exact Gamma-function constants of the fractional Henon-Lane-Emden problem.

The equation under study is

    (-Delta)^s u = |x|^a |u|^{p-1} u   in R^n,   0 < s < 2, s != 1,

and everything in this module is a closed-form Gamma expression attached to
it:

* ``kappa_s``         -- normalization of the Dirichlet-to-Neumann map of the
                         harmonic extension, Gamma(1-s) / (2^{2s-1} Gamma(s)).
* ``lambda_alpha``    -- the multiplier turning |x|^{-beta} into its image
                         under (-Delta)^s; sets the singular-solution
                         amplitude.
* ``hardy_gamma``     -- the optimal fractional Hardy constant
                         2^{2s} Gamma((n+2s)/4)^2 / Gamma((n-2s)/4)^2.
* ``sobolev_exponent``-- the critical exponent p_S(n, a), +inf for n <= 2s.

All Gamma ratios are evaluated in log space and exponentiated once, so large
dimensions do not overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DimensionTooSmall,
    InvalidParameter,
    NonPositiveArgument,
    OutOfRange,
    PoleOrNegativeArgument,
)

__all__ = [
    "CRITICAL_REL_TOL",
    "EXTENSION_CONSTANT_DEFAULT",
    "ProblemParams",
    "hardy_gamma",
    "kappa_s",
    "lambda_alpha",
    "log_gamma",
    "sobolev_exponent",
]

# Relative half-width of the band around p_S classified as Critical.
CRITICAL_REL_TOL = 1e-12

# Neumann-trace normalization of the fourth-order extension for 1 < s < 2.
# No closed form is adopted here; it is a configurable positive constant.
EXTENSION_CONSTANT_DEFAULT = 1.0


def log_gamma(x: float) -> float:
    """Return ln Gamma(x) for x > 0.

    Backed by the C library's ``lgamma`` (a Lanczos/Stirling style minimax
    approximation); relative error is well below 1e-13 on [1e-3, 1e3].
    """
    if not (x > 0.0):
        raise NonPositiveArgument(f"log_gamma requires x > 0, got x={x!r}")
    return math.lgamma(x)


def _validate_order(s: float) -> None:
    if not (0.0 < s < 2.0) or s == 1.0:
        raise InvalidParameter(
            f"fractional order must satisfy 0 < s < 2 and s != 1, got s={s!r}"
        )


def _validate_dimension(n: int) -> None:
    if isinstance(n, bool) or not isinstance(n, int):
        raise InvalidParameter(f"dimension n must be an integer, got n={n!r}")
    if n < 1:
        raise InvalidParameter(f"dimension n must be >= 1, got n={n}")


def kappa_s(s: float) -> float:
    """Extension constant kappa_s = Gamma(1-s) / (2^{2s-1} Gamma(s)).

    Only defined on 0 < s < 1 (the second-order extension range).
    Satisfies kappa_s * kappa_{1-s} = 1 and kappa_{1/2} = 1.
    """
    if not (0.0 < s < 1.0):
        raise OutOfRange(f"kappa_s requires 0 < s < 1, got s={s!r}")
    return math.exp(log_gamma(1.0 - s) - (2.0 * s - 1.0) * math.log(2.0) - log_gamma(s))


def _log_lambda_alpha(n: int, s: float, alpha: float) -> float:
    """ln of the power-multiplier lambda(alpha); raises at Gamma poles."""
    args = (
        (n + 2.0 * s + 2.0 * alpha) / 4.0,
        (n + 2.0 * s - 2.0 * alpha) / 4.0,
        (n - 2.0 * s - 2.0 * alpha) / 4.0,
        (n - 2.0 * s + 2.0 * alpha) / 4.0,
    )
    for arg in args:
        if not (arg > 0.0):
            raise PoleOrNegativeArgument(
                f"Gamma argument {arg!r} <= 0 in lambda(alpha) at "
                f"(n={n}, s={s}, alpha={alpha})"
            )
    return (
        2.0 * s * math.log(2.0)
        + log_gamma(args[0])
        + log_gamma(args[1])
        - log_gamma(args[2])
        - log_gamma(args[3])
    )


def lambda_alpha(params: "ProblemParams", alpha: float) -> float:
    """Multiplier lambda(alpha) = 2^{2s} G((n+2s+2a)/4) G((n+2s-2a)/4) /
    [G((n-2s-2a)/4) G((n-2s+2a)/4)] evaluated at the params' (n, s).

    Even in alpha, positive on |alpha| < (n-2s)/2, and lambda(0) equals the
    Gamma-form Hardy constant.
    """
    return math.exp(_log_lambda_alpha(params.n, params.s, alpha))


def hardy_gamma(n: int, s: float) -> float:
    """Optimal Hardy constant 2^{2s} Gamma((n+2s)/4)^2 / Gamma((n-2s)/4)^2."""
    _validate_dimension(n)
    _validate_order(s)
    if n <= 2.0 * s:
        raise DimensionTooSmall(f"hardy constant requires n > 2s, got n={n}, s={s}")
    return math.exp(
        2.0 * s * math.log(2.0)
        + 2.0 * log_gamma((n + 2.0 * s) / 4.0)
        - 2.0 * log_gamma((n - 2.0 * s) / 4.0)
    )


def sobolev_exponent(n: int, s: float, a: float) -> float:
    """Critical exponent p_S(n, a): (n+2s+2a)/(n-2s), or +inf when n <= 2s.

    The infinity sentinel compares greater than every finite p.
    """
    _validate_dimension(n)
    _validate_order(s)
    if not (a >= 0.0) or not math.isfinite(a):
        raise InvalidParameter(f"weight exponent a must be >= 0, got a={a!r}")
    if n <= 2.0 * s:
        return math.inf
    return (n + 2.0 * s + 2.0 * a) / (n - 2.0 * s)


@dataclass(frozen=True)
class ProblemParams:
    """The tuple (n, s, a, p) every operation reads.

    n : spatial dimension, integer >= 1
    s : fractional order, in (0, 1) or (1, 2); s = 1 is rejected outright
        because kappa_s and several Gamma arguments degenerate there
    a : Henon weight exponent, >= 0
    p : nonlinearity exponent, > 1

    Derived quantities: ``b`` = 3 - 2s (in (-1, 3)), ``beta`` = (2s+a)/(p-1),
    and ``alpha`` = (n-2s)/2 - beta, the latter only for n > 2s.
    """

    n: int
    s: float
    a: float
    p: float

    def __post_init__(self) -> None:
        _validate_dimension(self.n)
        _validate_order(self.s)
        if not math.isfinite(self.a) or self.a < 0.0:
            raise InvalidParameter(f"weight exponent a must be >= 0, got a={self.a!r}")
        if not math.isfinite(self.p) or self.p <= 1.0:
            raise InvalidParameter(f"nonlinearity exponent p must be > 1, got p={self.p!r}")

    @property
    def b(self) -> float:
        return 3.0 - 2.0 * self.s

    @property
    def beta(self) -> float:
        return (2.0 * self.s + self.a) / (self.p - 1.0)

    @property
    def alpha(self) -> float:
        if self.n <= 2.0 * self.s:
            raise DimensionTooSmall(
                f"alpha = (n-2s)/2 - beta requires n > 2s, got n={self.n}, s={self.s}"
            )
        return (self.n - 2.0 * self.s) / 2.0 - self.beta

    @property
    def p_sobolev(self) -> float:
        return sobolev_exponent(self.n, self.s, self.a)

    def is_critical(self) -> bool:
        ps = self.p_sobolev
        if math.isinf(ps):
            return False
        return abs(self.p - ps) <= CRITICAL_REL_TOL * max(1.0, ps)

    def is_supercritical(self) -> bool:
        ps = self.p_sobolev
        return self.p > ps and not self.is_critical()
