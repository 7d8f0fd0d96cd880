"""Spherical kernels and the unnormalized Hardy / multiplier integrals.

Plugging u = r^{-gamma} psi(theta) into the singular-integral form of
(-Delta)^s and substituting |y| = rt reduces everything to the two objects

    K_alpha(c)  = int_0^1 (t^{n-1-alpha} + t^{2s-1+alpha})
                  / (t^2 + 1 - 2tc)^{(n+2s)/2} dt,

    M(gamma)    = int_0^infty int_{S^{n-1}} (1 - t^{-gamma}) t^{n-1}
                  / (t^2 + 1 - 2t<theta,sigma>)^{(n+2s)/2} dsigma dt,

where c = <theta, sigma>.  Folding the outer t-range onto (0, 1] by
t -> 1/t gives the numerator

    (1 - t^{-gamma}) t^{n-1} + (1 - t^{gamma}) t^{2s-1},

which vanishes to second order at t = 1, so the diagonal singularity of the
sphere integral is integrable for 0 < s < 1.  ``a_constant`` is M(beta) with
beta = (2s+a)/(p-1); ``hardy_integral`` is M((n-2s)/2).  Both differ from
their Gamma-form counterparts by one normalization factor depending only on
(n, s), so ratios such as a_constant/hardy_integral are directly comparable
with lambda(alpha)/Lambda_{n,s}.

Sphere integrals are reduced to the angle cosine,

    int_{S^{n-1}} f(<theta,sigma>) dsigma
        = |S^{n-2}| int_0^pi sin(phi)^{n-2} f(cos phi) dphi       (n >= 2),

with the two-point measure {+1, -1} for n = 1.  The diagonal is excluded by
a hard cutoff 1 - c >= cutoff_delta; the truncated tail scales like the
angular cutoff to the power 2 - 2s, and one Richardson step in that variable
removes it.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.special import roots_jacobi

from .errors import (
    DimensionTooSmall,
    InvalidParameter,
    NonConvergent,
    NotSupercritical,
    SingularEvaluation,
    UnsupportedOrder,
)
from .specfun import ProblemParams, log_gamma

__all__ = [
    "KernelSpec",
    "SphericalProfile",
    "a_constant",
    "hardy_integral",
    "homogeneous_residual",
    "kernel_K",
    "normalization_ratio",
    "surface_area",
]

DEFAULT_CUTOFF_DELTA = 1e-6


def surface_area(n: int) -> float:
    """Surface measure |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2)."""
    if n < 1:
        raise InvalidParameter(f"dimension must be >= 1, got {n}")
    return 2.0 * math.pi ** (n / 2.0) / math.exp(log_gamma(n / 2.0))


def _quad(f, a, b, *, points=None, epsrel=1e-10, limit=400):
    # full_output swallows QUADPACK round-off warnings on singular endpoints
    if points:
        pts = sorted({p for p in points if a < p < b})
        result = quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=limit,
                      points=pts or None, full_output=1)
    else:
        result = quad(f, a, b, epsabs=0.0, epsrel=epsrel, limit=limit, full_output=1)
    return result[0]


@dataclass(frozen=True)
class SphericalProfile:
    """A function of the polar angle sampled at quadrature nodes.

    ``nodes`` holds angle cosines c_i in [-1, 1]; ``weights`` carry the full
    surface factor |S^{n-2}| (1-c^2)^{(n-3)/2} dc, so that sum(w) equals
    |S^{n-1}|.  For n = 1 the sphere is the two-point set {-1, +1} with unit
    weights.
    """

    n: int
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "values", values)
        if nodes.shape != weights.shape or nodes.shape != values.shape:
            raise InvalidParameter("nodes, weights and values must have equal length")
        if np.any(weights <= 0.0):
            raise InvalidParameter("quadrature weights must be positive")
        if np.any(np.abs(nodes) > 1.0 + 1e-14):
            raise InvalidParameter("angle cosines must lie in [-1, 1]")
        if not np.all(np.isfinite(values)):
            raise InvalidParameter("profile values must be finite")
        total = float(weights.sum())
        target = surface_area(self.n)
        if abs(total - target) > 1e-10 * target:
            raise InvalidParameter(
                f"weights sum to {total!r}, expected |S^(n-1)| = {target!r}"
            )

    @staticmethod
    def quadrature_nodes(n: int, num: int = 48) -> tuple[np.ndarray, np.ndarray]:
        if n == 1:
            return np.array([-1.0, 1.0]), np.array([1.0, 1.0])
        x, w = roots_jacobi(num, (n - 3) / 2.0, (n - 3) / 2.0)
        return x, w * (surface_area(n - 1) if n >= 2 else 1.0)

    @classmethod
    def from_function(cls, n: int, fn, num: int = 48) -> "SphericalProfile":
        nodes, weights = cls.quadrature_nodes(n, num)
        values = np.array([float(fn(c)) for c in nodes])
        return cls(n=n, nodes=nodes, weights=weights, values=values)

    @classmethod
    def constant(cls, n: int, value: float, num: int = 48) -> "SphericalProfile":
        return cls.from_function(n, lambda c: value, num)


@dataclass(frozen=True)
class KernelSpec:
    """Exponent and geometry of one K_alpha kernel."""

    alpha: float
    n: int
    s: float
    cutoff_delta: float = DEFAULT_CUTOFF_DELTA

    def __post_init__(self) -> None:
        if not (0.0 < self.s < 1.0):
            raise UnsupportedOrder(
                f"kernel representation requires 0 < s < 1, got s={self.s!r}"
            )
        if self.n < 1:
            raise InvalidParameter(f"dimension must be >= 1, got {self.n}")
        if not (self.cutoff_delta > 0.0):
            raise InvalidParameter("cutoff_delta must be positive")
        if not (0.0 < self.alpha < self.n - 2.0 * self.s):
            raise NonConvergent(
                f"alpha={self.alpha!r} outside (0, n-2s)=(0, {self.n - 2.0 * self.s}); "
                "the folded kernel integral does not converge"
            )


def _kernel_t_quad(n: int, s: float, c: float, numerator) -> float:
    """int_0^1 numerator(t) (t^2+1-2tc)^{-(n+2s)/2} dt with peak hints."""
    power = 0.5 * (n + 2.0 * s)
    one_minus_c = 1.0 - c

    def f(t: float) -> float:
        # (1-t)^2 + 2t(1-c) avoids the cancellation of t^2+1-2tc near t=1
        u = 1.0 - t
        d = u * u + 2.0 * t * one_minus_c
        if d == 0.0:
            return 0.0  # removable corner t=1, c=1; measure-zero for quad
        return numerator(t) * d ** (-power)

    points = None
    if c > 0.5:
        width = math.sqrt(max(2.0 * one_minus_c, 0.0))
        if width > 1e-12:
            points = [1.0 - 8.0 * width, 1.0 - width]
    return _quad(f, 0.0, 1.0, points=points)


def kernel_K(spec: KernelSpec, c: float) -> float:
    """Evaluate K_alpha at angle cosine c <= 1 - cutoff_delta.

    Symmetric under alpha -> (n - 2s) - alpha (the fold swaps the two
    powers) and strictly decreasing in alpha below (n - 2s)/2.
    """
    if c < -1.0:
        raise InvalidParameter(f"angle cosine must be >= -1, got {c!r}")
    if c > 1.0 - spec.cutoff_delta:
        raise SingularEvaluation(
            f"kernel diverges as c -> 1; c={c!r} is above 1 - cutoff_delta"
        )
    n, s, alpha = spec.n, spec.s, spec.alpha
    e1 = n - 1.0 - alpha
    e2 = 2.0 * s - 1.0 + alpha
    if e1 <= -1.0 or e2 <= -1.0:
        raise NonConvergent(f"kernel exponents ({e1}, {e2}) not integrable at t=0")

    def numerator(t: float) -> float:
        return t**e1 + t**e2

    return _kernel_t_quad(n, s, c, numerator)


def _fold_numerator(n: int, s: float, gamma: float):
    """Folded numerator (1-t^{-g}) t^{n-1} + (1-t^g) t^{2s-1}, O((1-t)^2)."""
    e_top = n - 1.0
    e_top_g = n - 1.0 - gamma
    e_bot = 2.0 * s - 1.0
    e_bot_g = 2.0 * s - 1.0 + gamma

    def numerator(t: float) -> float:
        return t**e_top - t**e_top_g + t**e_bot - t**e_bot_g

    return numerator


def _multiplier_integral(n: int, s: float, gamma: float, cutoff_delta: float) -> float:
    """Unnormalized power multiplier M(gamma); requires -2s < gamma < n."""
    if not (-2.0 * s < gamma < n):
        raise NonConvergent(
            f"multiplier integral needs -2s < gamma < n, got gamma={gamma!r}"
        )
    numerator = _fold_numerator(n, s, gamma)

    def t_integral(c: float) -> float:
        return _kernel_t_quad(n, s, c, numerator)

    if n == 1:
        return t_integral(1.0) + t_integral(-1.0)

    area = surface_area(n - 1)
    phi0 = math.acos(1.0 - cutoff_delta)

    def g(phi: float) -> float:
        return math.sin(phi) ** (n - 2) * t_integral(math.cos(phi))

    base = area * _quad(g, phi0, math.pi, points=[4.0 * phi0, 0.1, 1.0], epsrel=1e-9)
    inc1 = area * _quad(g, 0.5 * phi0, phi0, epsrel=1e-9)
    inc2 = area * _quad(g, 0.25 * phi0, 0.5 * phi0, epsrel=1e-9)
    # The truncated angular tail carries two known powers of the cutoff:
    # 2-2s from the kernel singularity and (1 if n==2 else 2) from the
    # regular part; at a resonance the second turns into phi^v*log.  Solving
    # the two-term model on three nested cutoffs removes both.
    partials = np.array([base, base + inc1, base + inc1 + inc2])
    phis = np.array([phi0, 0.5 * phi0, 0.25 * phi0])
    u = 2.0 - 2.0 * s
    v = 1.0 if n == 2 else 2.0
    if abs(u - v) < 0.05:
        basis = np.column_stack([np.ones(3), phis**v, phis**v * np.log(1.0 / phis)])
    else:
        basis = np.column_stack([np.ones(3), phis**u, phis**v])
    coef = np.linalg.solve(basis, partials)
    return float(coef[0])


def a_constant(params: ProblemParams, cutoff_delta: float = DEFAULT_CUTOFF_DELTA) -> float:
    """The constant multiplying psi in the homogeneous-solution equation;
    equals M(beta) with beta = (2s+a)/(p-1).  Supercritical p keeps
    beta < (n-2s)/2 so the diagonal cancellation is second order."""
    if not (0.0 < params.s < 1.0):
        raise UnsupportedOrder(
            f"singular-integral representation requires 0 < s < 1, got s={params.s!r}"
        )
    if not params.p > params.p_sobolev:
        raise NotSupercritical(
            f"a_constant requires p > p_S = {params.p_sobolev!r}, got p = {params.p!r}"
        )
    return _multiplier_integral(params.n, params.s, params.beta, cutoff_delta)


_hardy_cache: dict[tuple[int, float, float], float] = {}
_hardy_lock = threading.Lock()


def hardy_integral(n: int, s: float, cutoff_delta: float = DEFAULT_CUTOFF_DELTA) -> float:
    """Integral-form Hardy constant M((n-2s)/2); cached per (n, s, cutoff)."""
    if not (0.0 < s < 1.0):
        raise UnsupportedOrder(f"hardy_integral requires 0 < s < 1, got s={s!r}")
    if n <= 2.0 * s:
        raise DimensionTooSmall(f"hardy_integral requires n > 2s, got n={n}, s={s}")
    key = (n, float(s), float(cutoff_delta))
    with _hardy_lock:
        cached = _hardy_cache.get(key)
    if cached is not None:
        return cached
    value = _multiplier_integral(n, s, (n - 2.0 * s) / 2.0, cutoff_delta)
    with _hardy_lock:
        _hardy_cache[key] = value
    return value


def normalization_ratio(n: int, s: float) -> float:
    """Measured ratio hardy_integral / hardy_gamma; depends on (n, s) only."""
    from .specfun import hardy_gamma

    return hardy_integral(n, s) / hardy_gamma(n, s)


def homogeneous_residual(
    profile: SphericalProfile,
    params: ProblemParams,
    cutoff_delta: float = DEFAULT_CUTOFF_DELTA,
) -> float:
    """Max-norm residual of the reduced equation on the sphere,

        psi(theta) A + int K_beta(<theta,sigma>) (psi(theta)-psi(sigma))
            = |psi|^{p-1} psi(theta).

    Profile nodes are placed on one meridian, so <theta_i, sigma_j> =
    cos(phi_i - phi_j) with phi = arccos(node).  Pairs inside the diagonal
    cutoff are dropped; for smooth profiles their contribution is bounded by
    the modulus of continuity times the truncated kernel mass.  The
    quadrature is exact for constant profiles, where the kernel term
    vanishes identically.
    """
    if profile.n != params.n:
        raise InvalidParameter(
            f"profile dimension {profile.n} does not match params n={params.n}"
        )
    a_val = a_constant(params, cutoff_delta)
    psi = profile.values
    p = params.p
    nonlinear = np.abs(psi) ** (p - 1.0) * psi

    max_diff = float(np.max(np.abs(psi[:, None] - psi[None, :]))) if psi.size else 0.0
    kernel_term = np.zeros_like(psi)
    if max_diff > 0.0:
        spec = KernelSpec(alpha=params.beta, n=params.n, s=params.s,
                          cutoff_delta=cutoff_delta)
        phi = np.arccos(np.clip(profile.nodes, -1.0, 1.0))
        cos_pair = np.cos(phi[:, None] - phi[None, :])
        for i in range(psi.size):
            acc = 0.0
            for j in range(psi.size):
                c = float(cos_pair[i, j])
                if c > 1.0 - cutoff_delta:
                    continue
                diff = float(psi[i] - psi[j])
                if diff == 0.0:
                    continue
                acc += float(profile.weights[j]) * kernel_K(spec, c) * diff
            kernel_term[i] = acc

    residual = psi * a_val + kernel_term - nonlinear
    return float(np.max(np.abs(residual))) if psi.size else 0.0
