"""Stability condition, singular-solution amplitude and classification.

For supercritical p the explicit singular solution u_s = A |x|^{-beta} with
A^{p-1} = lambda(alpha), alpha = (n-2s)/2 - beta, is stable exactly when

    p * lambda(alpha) <= Lambda_{n,s},

so the sign of ``stability_margin`` = p*lambda(alpha) - Lambda_{n,s} decides
whether the classification theorem applies.  The margin is evaluated through
the Gamma pattern

    p * G(n/2 - beta/2) G(s + beta/2) / [G(beta/2) G((n-2s)/2 - beta/2)]

(scaled by 2^{2s}), which agrees with the p*lambda(alpha) - Lambda route by
the substitution beta/2 into the four Gamma arguments; the test suite checks
both routes against each other.

``jl_threshold`` locates the Joseph-Lundgren-type exponent where the margin
changes sign, by a geometric grid scan plus bisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import FhleError, InvalidParameter, NotSupercritical, PoleOrNegativeArgument
from .specfun import (
    CRITICAL_REL_TOL,
    ProblemParams,
    _log_lambda_alpha,
    hardy_gamma,
    log_gamma,
    sobolev_exponent,
)

__all__ = [
    "ClassificationOutcome",
    "RootBracket",
    "Verdict",
    "classify",
    "jl_brackets",
    "jl_threshold",
    "singular_amplitude",
    "stability_margin",
]


class Verdict(str, Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL_THEOREM_APPLIES = "SupercriticalTheoremApplies"
    SUPERCRITICAL_THEOREM_SILENT = "SupercriticalTheoremSilent"
    INVALID = "Invalid"


@dataclass(frozen=True)
class ClassificationOutcome:
    """Verdict for a parameter tuple, with the margin when supercritical."""

    verdict: Verdict
    p_sobolev: float | None = None
    margin: float | None = None
    reason: str | None = None


@dataclass(frozen=True)
class RootBracket:
    """A sign change of the stability margin, refined by bisection."""

    lo: float
    hi: float
    root: float
    residual: float


def stability_margin(params: ProblemParams) -> float:
    """Return p*lambda(alpha) - Lambda_{n,s}, positive iff the stability
    hypothesis of the classification theorem holds.

    Requires p > p_S(n, a) (which already forces n > 2s and keeps every
    Gamma argument positive).  Both exponentials are assembled in log space.
    """
    ps = sobolev_exponent(params.n, params.s, params.a)
    if not params.p > ps:
        raise NotSupercritical(
            f"stability margin requires p > p_S = {ps!r}, got p = {params.p!r}"
        )
    n, s, p = params.n, params.s, params.p
    half_beta = 0.5 * params.beta
    args = (n / 2.0 - half_beta, s + half_beta, half_beta, (n - 2.0 * s) / 2.0 - half_beta)
    for arg in args:
        if not (arg > 0.0):
            raise PoleOrNegativeArgument(
                f"Gamma argument {arg!r} <= 0 in stability condition at {params}"
            )
    two_s_log2 = 2.0 * s * math.log(2.0)
    lhs = math.exp(
        math.log(p)
        + log_gamma(args[0])
        + log_gamma(args[1])
        - log_gamma(args[2])
        - log_gamma(args[3])
        + two_s_log2
    )
    rhs = math.exp(
        two_s_log2 + 2.0 * log_gamma((n + 2.0 * s) / 4.0) - 2.0 * log_gamma((n - 2.0 * s) / 4.0)
    )
    return lhs - rhs


def singular_amplitude(params: ProblemParams) -> float:
    """Amplitude A = lambda(alpha)^{1/(p-1)} of the singular solution
    u_s(x) = A |x|^{-(2s+a)/(p-1)}; defined for p > p_S(n, a)."""
    ps = sobolev_exponent(params.n, params.s, params.a)
    if not params.p > ps:
        raise NotSupercritical(
            f"singular solution requires p > p_S = {ps!r}, got p = {params.p!r}"
        )
    return math.exp(_log_lambda_alpha(params.n, params.s, params.alpha) / (params.p - 1.0))


def _margin_of_p(n: int, s: float, a: float, p: float) -> float:
    return stability_margin(ProblemParams(n=n, s=s, a=a, p=p))


def jl_brackets(
    n: int,
    s: float,
    a: float,
    p_max: float,
    num_nodes: int = 512,
    p_tol: float = 1e-10,
) -> list[RootBracket]:
    """All sign changes of the stability margin on (p_S, p_max].

    The margin is scanned on a geometric grid of ``num_nodes`` points
    starting at p_S*(1+1e-9); every bracketed sign change is refined by
    bisection until the bracket width is below ``p_tol``.
    """
    ps = sobolev_exponent(n, s, a)
    if math.isinf(ps):
        raise NotSupercritical(f"no supercritical range: p_S = +inf for n={n}, s={s}")
    if not p_max > ps:
        raise InvalidParameter(f"p_max must exceed p_S = {ps!r}, got {p_max!r}")
    if num_nodes < 2:
        raise InvalidParameter(f"need at least 2 scan nodes, got {num_nodes}")
    p_lo = ps * (1.0 + 1e-9)
    if p_max <= p_lo:
        return []
    ratio = (p_max / p_lo) ** (1.0 / (num_nodes - 1))
    grid = [p_lo * ratio**k for k in range(num_nodes)]
    grid[-1] = p_max
    values = [_margin_of_p(n, s, a, p) for p in grid]

    brackets: list[RootBracket] = []
    for k in range(num_nodes - 1):
        f_lo, f_hi = values[k], values[k + 1]
        if f_lo == 0.0:
            brackets.append(RootBracket(grid[k], grid[k], grid[k], 0.0))
            continue
        if f_lo * f_hi >= 0.0:
            continue
        lo, hi = grid[k], grid[k + 1]
        flo = f_lo
        while hi - lo > p_tol:
            mid = 0.5 * (lo + hi)
            fmid = _margin_of_p(n, s, a, mid)
            if fmid == 0.0:
                lo = hi = mid
                break
            if flo * fmid < 0.0:
                hi = mid
            else:
                lo, flo = mid, fmid
        root = 0.5 * (lo + hi)
        brackets.append(
            RootBracket(lo=grid[k], hi=grid[k + 1], root=root, residual=_margin_of_p(n, s, a, root))
        )
    return brackets


def jl_threshold(
    n: int,
    s: float,
    a: float,
    p_max: float,
    num_nodes: int = 512,
    p_tol: float = 1e-10,
) -> RootBracket | None:
    """Smallest root of the stability margin on (p_S, p_max], or None when
    the margin keeps one sign throughout the scanned range."""
    brackets = jl_brackets(n, s, a, p_max, num_nodes=num_nodes, p_tol=p_tol)
    if not brackets:
        return None
    return min(brackets, key=lambda br: br.root)


def classify(n: int, s: float, a: float, p: float) -> ClassificationOutcome:
    """Classify a raw parameter tuple.

    Subcritical for 1 < p < p_S, Critical within a 1e-12 relative band of
    p_S, otherwise SupercriticalTheoremApplies when the margin is positive
    and SupercriticalTheoremSilent when it is not.  Validation failures are
    folded into an Invalid outcome with the reason attached.
    """
    try:
        params = ProblemParams(n=n, s=s, a=a, p=p)
    except FhleError as exc:
        return ClassificationOutcome(verdict=Verdict.INVALID, reason=str(exc))
    ps = params.p_sobolev
    if params.is_critical():
        return ClassificationOutcome(verdict=Verdict.CRITICAL, p_sobolev=ps)
    if params.p < ps:
        return ClassificationOutcome(verdict=Verdict.SUBCRITICAL, p_sobolev=ps)
    try:
        margin = stability_margin(params)
    except FhleError as exc:
        return ClassificationOutcome(verdict=Verdict.INVALID, p_sobolev=ps, reason=str(exc))
    if margin > 0.0:
        verdict = Verdict.SUPERCRITICAL_THEOREM_APPLIES
    else:
        verdict = Verdict.SUPERCRITICAL_THEOREM_SILENT
    return ClassificationOutcome(verdict=verdict, p_sobolev=ps, margin=margin)


def critical_band(p_sobolev: float) -> float:
    """Half-width of the Critical classification band around p_S."""
    return CRITICAL_REL_TOL * max(1.0, p_sobolev)
