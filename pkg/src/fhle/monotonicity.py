"""Rescaled energies of the half-space problem and their derivative formulas.

For a field u_e on the upper half space and beta = (2s+a)/(p-1), the
blow-down family is u_e^lam(X) = lam^beta u_e(lam X).  The second-order
energy (0 < s < 1) is

    E(u_e, lam) = lam^{e0} ( 1/2 int_{B_lam} y^{1-2s} |grad u_e|^2
                  - kappa_s/(p+1) int_{bottom, B_lam} |x|^a |u_e|^{p+1} )
                  + lam^{e0-1} (s + a/2)/(p-1)
                    int_{sphere_lam} y^{1-2s} u_e^2,

with e0 = (2s(p+1)+2a)/(p-1) - n, and along solutions

    dE/dlam = lam^{e0} int_{sphere_lam} y^{1-2s}
              (d_r u_e + beta u_e / r)^2 dsigma  >=  0.

The u^2 coefficient uses the proof-consistent denominator (p-1); the
(p+1) variant is selectable so its failure of the derivative pairing can be
demonstrated.  For fields that extend boundary data without solving the
nonlinear problem, the pairing acquires one extra boundary term measuring
the Neumann defect; ``energy_derivative_defect`` evaluates it.

The fourth-order energy (1 < s < 2) carries the y^{3-2s} weight, the
Delta_b bulk term, and five sphere terms, three of them radial derivatives
evaluated by centered differences in lam.

All ball and sphere integrals run in polar coordinates (R, phi) with a
Gauss-Jacobi rule in the angle that absorbs the weight sin^w cos^{n-1}
exactly, so smooth and power-homogeneous fields are integrated at their
quadrature-limited accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad
from scipy.special import roots_jacobi

from .errors import (
    DimensionConditionViolated,
    DomainExceeded,
    GridTooCoarse,
    InvalidParameter,
    UnsupportedOrder,
)
from .extension import HalfSpaceField
from .kernels import surface_area
from .specfun import EXTENSION_CONSTANT_DEFAULT, ProblemParams, kappa_s

__all__ = [
    "DimensionReport",
    "EnergyCurve",
    "delta_b",
    "dimension_conditions",
    "energy_curve",
    "energy_derivative_defect",
    "energy_derivative_first_order",
    "energy_first_order",
    "energy_higher_order",
    "rescale",
]

ANGULAR_NODES = 48


@lru_cache(maxsize=64)
def _angular_rule(n: int, weight: float, num: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for int_0^{pi/2} sin^w cos^{n-1} G dphi as sum c_k G(phi_k).

    Substituting t = sin(phi) gives the Jacobi weight t^w (1-t)^{n/2-1} on
    (0, 1) with the smooth factor (1+t)^{n/2-1} folded into the rule.
    """
    x, w = roots_jacobi(num, n / 2.0 - 1.0, weight)
    t = 0.5 * (x + 1.0)
    coeff = w * (1.0 + t) ** (n / 2.0 - 1.0) * 2.0 ** (-weight - n / 2.0)
    phi = np.arcsin(t)
    return phi, coeff


def _check_lambda(field: HalfSpaceField, lam: float) -> None:
    if not (lam > 0.0):
        raise InvalidParameter(f"radius must be positive, got {lam!r}")
    r_max, y_low, y_max = field.domain()
    if field.fn is None and (lam > r_max or lam > y_max):
        raise DomainExceeded(
            f"ball of radius {lam!r} leaves the sampled domain "
            f"(r <= {r_max!r}, y <= {y_max!r})"
        )


def _sphere_average(field: HalfSpaceField, lam: float, weight: float,
                    integrand, num: int = ANGULAR_NODES) -> float:
    """|S^{n-1}| lam^{n+weight} int sin^w cos^{n-1} integrand(phi) dphi."""
    n = field.n
    phi, coeff = _angular_rule(n, weight, num)
    vals = integrand(lam * np.cos(phi), lam * np.sin(phi))
    return surface_area(n) * lam ** (n + weight) * float(np.dot(coeff, vals))


def _ball_integral(field: HalfSpaceField, lam: float, weight: float,
                   integrand, num: int = ANGULAR_NODES) -> float:
    """|S^{n-1}| int_0^lam R^{n+weight} [angular average of integrand] dR."""
    n = field.n
    phi, coeff = _angular_rule(n, weight, num)
    cphi, sphi = np.cos(phi), np.sin(phi)

    def shell(R: float) -> float:
        if R == 0.0:
            return 0.0
        return R ** (n + weight) * float(np.dot(coeff, integrand(R * cphi, R * sphi)))

    val = quad(shell, 0.0, lam, epsabs=0.0, epsrel=1e-9, limit=200, full_output=1)[0]
    return surface_area(n) * val


def _boundary_integral(field: HalfSpaceField, lam: float, a: float, p: float) -> float:
    """|S^{n-1}| int_0^lam rho^{n-1+a} |u(rho, 0)|^{p+1} drho."""
    n = field.n

    def f(rho: float) -> float:
        return rho ** (n - 1 + a) * abs(float(field.eval(rho, 0.0))) ** (p + 1.0)

    val = quad(f, 0.0, lam, epsabs=0.0, epsrel=1e-9, limit=200, full_output=1)[0]
    return surface_area(n) * val


def _grad_squared(field: HalfSpaceField):
    def integrand(r, y):
        ur, uy = field.eval_grad(r, y)
        return ur * ur + uy * uy

    return integrand


def rescale(field: HalfSpaceField, lam: float) -> HalfSpaceField:
    """Blow-down u_e^lam(X) = lam^beta u_e(lam X) on the same grid.

    Closed-form fields rescale exactly; sampled fields are resampled through
    their interpolant and require lam <= 1 (plus a boundary row) so that
    lam X stays inside the sampled domain.
    """
    params = field.require_params()
    if not (lam > 0.0):
        raise InvalidParameter(f"scale factor must be positive, got {lam!r}")
    beta = params.beta
    amp = lam**beta
    grid = field.grid
    if field.fn is not None:
        base = field.fn

        def scaled(r, y, _l=lam, _a=amp, _f=base):
            return _a * _f(_l * r, _l * y)

        return HalfSpaceField.from_function(grid, scaled, n=field.n, s=field.s,
                                            params=params)
    r_max, y_low, y_max = field.domain()
    if lam * grid.r[-1] > r_max * (1.0 + 1e-12) or lam * grid.y[-1] > y_max * (1.0 + 1e-12):
        raise DomainExceeded(
            f"rescale by {lam!r} needs samples out to r={lam * grid.r[-1]!r}, "
            f"y={lam * grid.y[-1]!r}; field covers (r<={r_max!r}, y<={y_max!r})"
        )
    if lam * grid.y[0] < y_low * (1.0 - 1e-12):
        raise DomainExceeded(
            f"rescale by {lam!r} reads below the sampled heights and the field "
            "has no boundary row"
        )
    rr, yy = np.meshgrid(grid.r, grid.y, indexing="ij")
    values = amp * field.eval(lam * rr, lam * yy)
    boundary = None
    if field.boundary is not None:
        boundary = amp * field.eval(lam * grid.r, np.zeros_like(grid.r))
    return HalfSpaceField(grid, values, n=field.n, s=field.s,
                          boundary=boundary, params=params)


def _first_order_exponent(params: ProblemParams) -> float:
    return 2.0 * params.s + 2.0 * params.beta - params.n


def _sphere_coefficient(params: ProblemParams, convention: str) -> float:
    if convention == "proof":
        return (params.s + 0.5 * params.a) / (params.p - 1.0)
    if convention == "statement":
        return (params.s + 0.5 * params.a) / (params.p + 1.0)
    raise InvalidParameter(f"unknown coefficient convention {convention!r}")


def first_order_parts(field: HalfSpaceField, lam: float,
                      coefficient: str = "proof") -> dict[str, float]:
    """The three addends of the second-order energy at radius lam."""
    params = field.require_params()
    s = field.s
    if not (0.0 < s < 1.0):
        raise UnsupportedOrder(f"first-order energy requires 0 < s < 1, got s={s!r}")
    _check_lambda(field, lam)
    weight = 1.0 - 2.0 * s
    e0 = _first_order_exponent(params)
    bulk = 0.5 * _ball_integral(field, lam, weight, _grad_squared(field))
    nonlin = (kappa_s(s) / (params.p + 1.0)
              * _boundary_integral(field, lam, params.a, params.p))
    sphere = _sphere_average(field, lam, weight, lambda r, y: field.eval(r, y) ** 2)
    coeff = _sphere_coefficient(params, coefficient)
    return {
        "bulk": lam**e0 * bulk,
        "nonlinear": -(lam**e0) * nonlin,
        "sphere": lam ** (e0 - 1.0) * coeff * sphere,
    }


def energy_first_order(field: HalfSpaceField, lam: float,
                       coefficient: str = "proof") -> float:
    """Second-order monotonicity energy E(u_e, lam); constant in lam on
    fields with the exact blow-down homogeneity."""
    parts = first_order_parts(field, lam, coefficient)
    return parts["bulk"] + parts["nonlinear"] + parts["sphere"]


def energy_derivative_first_order(field: HalfSpaceField, lam: float) -> float:
    """Sphere integral lam^{e0} int y^{1-2s} (d_r u + beta u/r)^2 dsigma.

    Nonnegative for every field; vanishes identically on blow-down
    homogeneous fields.  Equals dE/dlam for fields solving the extension
    problem with its nonlinear Neumann coupling; otherwise the defect term
    of :func:`energy_derivative_defect` must be added.
    """
    params = field.require_params()
    s = field.s
    if not (0.0 < s < 1.0):
        raise UnsupportedOrder(f"first-order energy requires 0 < s < 1, got s={s!r}")
    _check_lambda(field, lam)
    beta = params.beta
    weight = 1.0 - 2.0 * s
    e0 = _first_order_exponent(params)

    def integrand(r, y):
        ur, uy = field.eval_grad(r, y)
        radial = (r * ur + y * uy) / lam
        return (radial + beta * field.eval(r, y) / lam) ** 2

    return lam**e0 * _sphere_average(field, lam, weight, integrand)


def energy_derivative_defect(field: HalfSpaceField, lam: float, defect) -> float:
    """Boundary correction to the derivative identity for non-solutions,

        lam^{e0-1} int_{bottom, B_lam} D(x) (beta u + r d_r u)(x, 0) dx,

    where D = -lim y^{1-2s} d_y u_e - kappa_s |x|^a |u|^{p-1} u is the
    Neumann defect (zero on solutions).  ``defect`` is a callable of the
    radius.  dE/dlam = energy_derivative_first_order + this term.
    """
    params = field.require_params()
    _check_lambda(field, lam)
    beta = params.beta
    e0 = _first_order_exponent(params)
    n = field.n

    def f(rho: float) -> float:
        h = 1e-6 * (1.0 + rho)
        u0 = float(field.eval(rho, 0.0))
        du = (float(field.eval(rho + h, 0.0)) - float(field.eval(abs(rho - h), 0.0))) / (2.0 * h)
        return rho ** (n - 1) * float(defect(rho)) * (beta * u0 + rho * du)

    val = quad(f, 0.0, lam, epsabs=0.0, epsrel=1e-8, limit=200, full_output=1)[0]
    return lam ** (e0 - 1.0) * surface_area(n) * val


def _second_derivative_stencil(coords: np.ndarray, values: np.ndarray, axis: int):
    """Nonuniform 3-point first/second derivatives along one axis, one-sided
    quadratic fits at the edges; exact for quadratics."""
    v = np.moveaxis(values, axis, 0)
    x = coords
    first = np.empty_like(v)
    second = np.empty_like(v)
    hm = x[1:-1] - x[:-2]
    hp = x[2:] - x[1:-1]
    shape = (-1,) + (1,) * (v.ndim - 1)
    hm_ = hm.reshape(shape)
    hp_ = hp.reshape(shape)
    first[1:-1] = (hm_**2 * v[2:] - hp_**2 * v[:-2] + (hp_**2 - hm_**2) * v[1:-1]) / (
        hm_ * hp_ * (hm_ + hp_)
    )
    second[1:-1] = 2.0 * (hm_ * v[2:] + hp_ * v[:-2] - (hm_ + hp_) * v[1:-1]) / (
        hm_ * hp_ * (hm_ + hp_)
    )
    for pos, (i0, i1, i2) in ((0, (0, 1, 2)), (-1, (-1, -2, -3))):
        x0, x1, x2 = x[i0], x[i1], x[i2]
        d1, d2 = x1 - x0, x2 - x0
        # quadratic through the three edge nodes
        second[pos] = 2.0 * (
            v[i2] / (d2 * (d2 - d1)) - v[i1] / (d1 * (d2 - d1)) + v[i0] / (d1 * d2)
        )
        first[pos] = (
            -v[i0] * (d1 + d2) / (d1 * d2)
            + v[i1] * d2 / (d1 * (d2 - d1))
            - v[i2] * d1 / (d2 * (d2 - d1))
        )
    return np.moveaxis(first, 0, axis), np.moveaxis(second, 0, axis)


def delta_b(field: HalfSpaceField) -> HalfSpaceField:
    """Discrete Delta_b = d_rr + (n-1)/r d_r + d_yy + (b/y) d_y on the grid,
    with b = 3 - 2s; at the axis the radial part becomes n * d_rr by
    symmetry.  Exact for quadratic fields."""
    grid = field.grid
    if grid.r.size < 3 or grid.y.size < 3:
        raise GridTooCoarse("delta_b needs at least 3 nodes per direction")
    b = 3.0 - 2.0 * field.s
    n = field.n
    v = field.values
    ur, urr = _second_derivative_stencil(grid.r, v, axis=0)
    uy, uyy = _second_derivative_stencil(grid.y, v, axis=1)
    radial = np.empty_like(v)
    radial[1:, :] = urr[1:, :] + (n - 1) / grid.r[1:, None] * ur[1:, :]
    radial[0, :] = n * urr[0, :]
    out = radial + uyy + (b / grid.y[None, :]) * uy
    return HalfSpaceField(grid, out, n=field.n, s=field.s, params=field.params)


def _delta_b_point(field: HalfSpaceField, r: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Delta_b of the field at arbitrary points, via centered differences on
    the closed form or spline second derivatives."""
    n = field.n
    b = 3.0 - 2.0 * field.s
    r = np.asarray(r, dtype=float)
    y = np.asarray(y, dtype=float)
    if field.fn is not None:
        hr = 1e-4 * (1.0 + np.abs(r))
        hy = np.minimum(1e-4 * (1.0 + np.abs(y)), 0.5 * y)
        u0 = field.eval(r, y)
        upr = field.eval(r + hr, y)
        umr = field.eval(np.abs(r - hr), y)
        upy = field.eval(r, y + hy)
        umy = field.eval(r, y - hy)
        urr = (upr - 2.0 * u0 + umr) / hr**2
        uyy = (upy - 2.0 * u0 + umy) / hy**2
        ur = (upr - umr) / (2.0 * hr)
        uy = (upy - umy) / (2.0 * hy)
    else:
        spline = field._get_spline()
        rf, yf = r.ravel(), y.ravel()
        urr = spline(rf, yf, dx=2, grid=False).reshape(r.shape)
        uyy = spline(rf, yf, dy=2, grid=False).reshape(r.shape)
        ur = spline(rf, yf, dx=1, grid=False).reshape(r.shape)
        uy = spline(rf, yf, dy=1, grid=False).reshape(r.shape)
    with np.errstate(divide="ignore", invalid="ignore"):
        radial = np.where(r > 0.0, (n - 1) * ur / np.where(r > 0.0, r, 1.0), 0.0)
    return urr + radial + uyy + (b / y) * uy


@dataclass(frozen=True)
class DimensionReport:
    """Both dimension inequalities of the higher-order monotonicity theorem."""

    first_rhs: float
    first_holds: bool
    first_margin: float
    second_rhs: float
    second_holds: bool
    second_margin: float
    implication_consistent: bool


def dimension_conditions(params: ProblemParams) -> DimensionReport:
    """Evaluate n > (p+4s+2a-1)/(p+2s+a-1) + (2s+a)/(p-1) - b and the
    stronger n > (2s(p+1)+2a)/(p-1); the second implies the first."""
    n, s, a, p = params.n, params.s, params.a, params.p
    first_rhs = (p + 4.0 * s + 2.0 * a - 1.0) / (p + 2.0 * s + a - 1.0) + params.beta - params.b
    second_rhs = (2.0 * s * (p + 1.0) + 2.0 * a) / (p - 1.0)
    first = n > first_rhs
    second = n > second_rhs
    return DimensionReport(
        first_rhs=first_rhs,
        first_holds=first,
        first_margin=n - first_rhs,
        second_rhs=second_rhs,
        second_holds=second,
        second_margin=n - second_rhs,
        implication_consistent=(not second) or first,
    )


def higher_order_parts(field: HalfSpaceField, lam: float,
                       fd_step: float | None = None,
                       c_ns: float = EXTENSION_CONSTANT_DEFAULT) -> dict[str, float]:
    """The six addends of the fourth-order energy at radius lam."""
    params = field.require_params()
    s = field.s
    if not (1.0 < s < 2.0):
        raise UnsupportedOrder(f"higher-order energy requires 1 < s < 2, got s={s!r}")
    report = dimension_conditions(params)
    if not report.first_holds:
        raise DimensionConditionViolated(
            f"dimension condition fails: n = {params.n} <= {report.first_rhs!r}"
        )
    _check_lambda(field, lam)
    if fd_step is None:
        fd_step = 1e-3 * lam
    b = params.b
    beta = params.beta
    e0 = _first_order_exponent(params)
    kcoef = (s + 0.5 * params.a) / (params.p - 1.0) * (
        (params.p + 2.0 * s + params.a - 1.0) / (params.p - 1.0) - params.n - b
    )

    def u_sq(r, y):
        return field.eval(r, y) ** 2

    def radial_combo_sq(r, y):
        ur, uy = field.eval_grad(r, y)
        radius = np.sqrt(r * r + y * y)
        radial = (r * ur + y * uy) / radius
        return (beta * field.eval(r, y) / radius + radial) ** 2

    def tangential_sq(r, y):
        ur, uy = field.eval_grad(r, y)
        radius = np.sqrt(r * r + y * y)
        return ((r * uy - y * ur) / radius) ** 2

    def delta_sq(r, y):
        return _delta_b_point(field, r, y) ** 2

    def sphere_u2(t: float) -> float:
        return _sphere_average(field, t, b, u_sq)

    def sphere_combo(t: float) -> float:
        return _sphere_average(field, t, b, radial_combo_sq)

    def sphere_tan(t: float) -> float:
        return _sphere_average(field, t, b, tangential_sq)

    def ddlam(g) -> float:
        return (g(lam + fd_step) - g(lam - fd_step)) / (2.0 * fd_step)

    bulk = 0.5 * _ball_integral(field, lam, b, delta_sq)
    nonlin = c_ns / (params.p + 1.0) * _boundary_integral(field, lam, params.a, params.p)
    parts = {
        "bulk": lam**e0 * (bulk - nonlin),
        "sphere_u2": -kcoef * lam ** (e0 - 3.0) * sphere_u2(lam),
        "dr_sphere_u2": -kcoef * ddlam(lambda t: t ** (e0 - 2.0) * sphere_u2(t)),
        "dr_radial_combo": 0.5 * lam**3 * ddlam(lambda t: t ** (e0 - 3.0) * sphere_combo(t)),
        "dr_tangential": 0.5 * ddlam(lambda t: t**e0 * sphere_tan(t)),
        "tangential": 0.5 * lam ** (e0 - 1.0) * sphere_tan(lam),
    }
    return parts


def energy_higher_order(field: HalfSpaceField, lam: float,
                        fd_step: float | None = None,
                        c_ns: float = EXTENSION_CONSTANT_DEFAULT) -> float:
    """Fourth-order monotonicity energy for 1 < s < 2 (all terms)."""
    return float(sum(higher_order_parts(field, lam, fd_step, c_ns).values()))


@dataclass(frozen=True)
class EnergyCurve:
    """E(lam) samples with the per-radius breakdown and quadrature metadata."""

    lambdas: np.ndarray
    values: np.ndarray
    parts: dict[str, np.ndarray]
    metadata: dict = dc_field(default_factory=dict)

    def __post_init__(self) -> None:
        lambdas = np.asarray(self.lambdas, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "lambdas", lambdas)
        object.__setattr__(self, "values", values)
        if np.any(np.diff(lambdas) <= 0.0):
            raise InvalidParameter("lambdas must be strictly increasing")
        total = np.zeros_like(values)
        for key in self.parts:
            total = total + np.asarray(self.parts[key], dtype=float)
        if np.max(np.abs(total - values)) > 1e-10 * max(1.0, float(np.max(np.abs(values)))):
            raise InvalidParameter("energy parts do not sum to the energy values")

    def to_csv(self, path) -> None:
        keys = sorted(self.parts)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("lambda,E," + ",".join(f"part_{k}" for k in keys) + "\n")
            for i, lam in enumerate(self.lambdas):
                row = [f"{lam:.17g}", f"{self.values[i]:.17g}"]
                row += [f"{self.parts[k][i]:.17g}" for k in keys]
                fh.write(",".join(row) + "\n")


def energy_curve(field: HalfSpaceField, lambdas, order: str = "first",
                 coefficient: str = "proof",
                 fd_step: float | None = None,
                 c_ns: float = EXTENSION_CONSTANT_DEFAULT) -> EnergyCurve:
    """Sample the energy over a radius grid, with parts and derivative."""
    lambdas = np.asarray(lambdas, dtype=float)
    rows: list[dict[str, float]] = []
    for lam in lambdas:
        if order == "first":
            parts = first_order_parts(field, float(lam), coefficient)
        elif order == "higher":
            parts = higher_order_parts(field, float(lam), fd_step, c_ns)
        else:
            raise InvalidParameter(f"unknown energy order {order!r}")
        rows.append(parts)
    keys = sorted(rows[0])
    parts_arr = {k: np.asarray([row[k] for row in rows]) for k in keys}
    values = np.sum([parts_arr[k] for k in keys], axis=0)
    metadata = {
        "order": order,
        "angular_nodes": ANGULAR_NODES,
        "coefficient": coefficient if order == "first" else "proof",
    }
    return EnergyCurve(lambdas=lambdas, values=values, parts=parts_arr,
                       metadata=metadata)
