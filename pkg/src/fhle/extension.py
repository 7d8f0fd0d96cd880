"""Poisson-kernel extension to the weighted half-space problem.

A function u on R^n extends to u_e on the upper half space by convolution
with P(X, t) = p_{n,s} y^{2s} |X - t|^{-(n+2s)}, X = (x, y).  The extension
solves the degenerate equation div(y^{1-2s} grad u_e) = 0 and recovers the
fractional Laplacian through its weighted Neumann trace,

    -lim_{y->0} y^{1-2s} d_y u_e = kappa_s (-Delta)^s u.

Everything here is radial in x: boundary data are functions of |x|, fields
are sampled on (r, y) tensor grids, and the convolution collapses to a 1-d
integral (n = 1) or a radius-angle double integral (n >= 2).

``frac_laplacian_oracle`` evaluates (-Delta)^s u independently, through the
Fourier multiplier |xi|^{2s} with cosine (n = 1) or sine (n = 3) transforms,
so the Neumann trace can be checked against a route that never touches the
extension.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator, RectBivariateSpline
from scipy.special import roots_jacobi, roots_legendre

from .errors import (
    AliasingDetected,
    ExtrapolationUnstable,
    GridTooCoarse,
    InvalidParameter,
    NonIntegrable,
    TailUnspecified,
    UnsupportedDimension,
    UnsupportedOrder,
)
from .kernels import surface_area
from .specfun import ProblemParams

__all__ = [
    "HalfSpaceField",
    "HalfSpaceGrid",
    "RadialProfile",
    "TailModel",
    "degenerate_residual",
    "extend_radial",
    "frac_laplacian_oracle",
    "neumann_trace",
    "poisson_normalization",
    "read_radial_csv",
]

_TRUNCATION_TOL = 1e-7


@dataclass(frozen=True)
class TailModel:
    """Decay model for radial data beyond its last sample.

    kind     -- "zero", "constant", or "power"
    exponent -- decay rate q for the power model u ~ u(R) (rho/R)^{-q}
    """

    kind: str
    exponent: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("zero", "constant", "power"):
            raise InvalidParameter(f"unknown tail model kind {self.kind!r}")
        if self.kind == "power":
            if self.exponent is None or not (self.exponent > 0.0):
                raise InvalidParameter("power tail needs a positive decay exponent")


class RadialProfile:
    """Radial function |x| -> u(|x|), sampled with an optional closed form.

    Between samples the profile interpolates monotonically (PCHIP); beyond
    the last sample it follows the tail model, or the closed form ``fn``
    when one was supplied.
    """

    def __init__(self, r, u, tail: TailModel | None = None, fn=None):
        r = np.asarray(r, dtype=float)
        u = np.asarray(u, dtype=float)
        if r.ndim != 1 or r.shape != u.shape or r.size < 2:
            raise InvalidParameter("need matching 1-d arrays with >= 2 samples")
        if np.any(np.diff(r) <= 0.0) or r[0] < 0.0:
            raise InvalidParameter("radii must be strictly increasing and >= 0")
        if not np.all(np.isfinite(u)):
            raise InvalidParameter("profile values must be finite")
        self.r = r
        self.u = u
        self.tail = tail
        self.fn = fn
        self._interp = PchipInterpolator(r, u, extrapolate=False)

    @classmethod
    def from_function(cls, fn, r_max: float, num: int = 513,
                      tail: TailModel | None = None) -> "RadialProfile":
        r = np.linspace(0.0, r_max, num)
        return cls(r, np.asarray([fn(v) for v in r], dtype=float), tail=tail, fn=fn)

    @property
    def r_max(self) -> float:
        return float(self.r[-1])

    def __call__(self, rho):
        rho = np.asarray(rho, dtype=float)
        scalar = rho.ndim == 0
        rho = np.atleast_1d(rho)
        if self.fn is not None:
            out = np.asarray([self.fn(v) for v in rho], dtype=float)
            return float(out[0]) if scalar else out
        out = np.empty_like(rho)
        inside = rho <= self.r[-1]
        low = rho < self.r[0]
        out[inside] = self._interp(np.clip(rho[inside], self.r[0], self.r[-1]))
        out[low] = self.u[0]
        beyond = ~inside
        if np.any(beyond):
            out[beyond] = self.tail_values(rho[beyond])
        return float(out[0]) if scalar else out

    def tail_values(self, rho):
        rho = np.asarray(rho, dtype=float)
        if self.tail is None:
            raise TailUnspecified(
                f"no decay model beyond r = {self.r_max!r}; supply a TailModel"
            )
        if self.tail.kind == "zero":
            return np.zeros_like(rho)
        if self.tail.kind == "constant":
            return np.full_like(rho, self.u[-1])
        return self.u[-1] * (rho / self.r_max) ** (-self.tail.exponent)

    def has_tail(self) -> bool:
        return self.fn is not None or self.tail is not None


def read_radial_csv(path, tail: TailModel | None = None) -> RadialProfile:
    """Load a two-column (r, u) CSV, skipping a non-numeric header line."""
    rows = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            try:
                rows.append((float(parts[0]), float(parts[1])))
            except ValueError:
                continue
    if len(rows) < 2:
        raise InvalidParameter(f"{path}: fewer than 2 numeric (r, u) rows")
    arr = np.asarray(rows, dtype=float)
    return RadialProfile(arr[:, 0], arr[:, 1], tail=tail)


@dataclass(frozen=True)
class HalfSpaceGrid:
    """Tensor grid on the closed quarter plane r >= 0, y > 0.

    ``weight_exponent`` is the power of y in the degenerate divergence form
    (1 - 2s for the second-order extension, 3 - 2s for the fourth-order
    operator).  y stays strictly positive; the boundary row lives on the
    field, not the grid.
    """

    r: np.ndarray
    y: np.ndarray
    weight_exponent: float
    extrapolation_tol: float = 1e-3

    def __post_init__(self) -> None:
        r = np.asarray(self.r, dtype=float)
        y = np.asarray(self.y, dtype=float)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "y", y)
        if r.ndim != 1 or y.ndim != 1 or r.size < 2 or y.size < 2:
            raise InvalidParameter("grid needs 1-d r and y arrays with >= 2 nodes")
        if r[0] != 0.0 or np.any(np.diff(r) <= 0.0):
            raise InvalidParameter("radial nodes must strictly increase from 0")
        if y[0] <= 0.0 or np.any(np.diff(y) <= 0.0):
            raise InvalidParameter("heights must be strictly increasing and positive")
        if not (self.extrapolation_tol > 0.0):
            raise InvalidParameter("extrapolation_tol must be positive")

    @classmethod
    def make(cls, r_max: float, y_max: float, nr: int, ny: int,
             weight_exponent: float, y_min: float | None = None,
             y_spacing: str = "geometric",
             extrapolation_tol: float = 1e-3) -> "HalfSpaceGrid":
        r = np.linspace(0.0, r_max, nr)
        if y_spacing == "geometric":
            y_min = y_max * 2.0 ** (-(ny - 1)) if y_min is None else y_min
            y = np.geomspace(y_min, y_max, ny)
        elif y_spacing == "linear":
            y_min = y_max / ny if y_min is None else y_min
            y = np.linspace(y_min, y_max, ny)
        else:
            raise InvalidParameter(f"unknown y_spacing {y_spacing!r}")
        return cls(r=r, y=y, weight_exponent=weight_exponent,
                   extrapolation_tol=extrapolation_tol)


class HalfSpaceField:
    """u_e sampled on a half-space grid, with optional boundary trace,
    problem parameters and closed form."""

    def __init__(self, grid: HalfSpaceGrid, values, n: int, s: float,
                 boundary=None, params: ProblemParams | None = None, fn=None):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.r.size, grid.y.size):
            raise InvalidParameter(
                f"values shape {values.shape} does not match grid "
                f"({grid.r.size}, {grid.y.size})"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidParameter("field values must be finite")
        if params is not None and (params.n != n or params.s != s):
            raise InvalidParameter("params (n, s) disagree with the field's (n, s)")
        if boundary is not None:
            boundary = np.asarray(boundary, dtype=float)
            if boundary.shape != (grid.r.size,):
                raise InvalidParameter("boundary must align with the radial nodes")
        self.grid = grid
        self.values = values
        self.n = n
        self.s = s
        self.boundary = boundary
        self.params = params
        self.fn = fn
        self._spline = None

    @classmethod
    def from_function(cls, grid: HalfSpaceGrid, fn, n: int, s: float,
                      params: ProblemParams | None = None,
                      with_boundary: bool = True) -> "HalfSpaceField":
        rr, yy = np.meshgrid(grid.r, grid.y, indexing="ij")
        values = np.vectorize(fn)(rr, yy).astype(float)
        boundary = None
        if with_boundary:
            boundary = np.asarray([fn(r, 0.0) for r in grid.r], dtype=float)
            if not np.all(np.isfinite(boundary)):
                boundary = None
        return cls(grid, values, n=n, s=s, boundary=boundary, params=params, fn=fn)

    def with_params(self, params: ProblemParams) -> "HalfSpaceField":
        return HalfSpaceField(self.grid, self.values, n=self.n, s=self.s,
                              boundary=self.boundary, params=params, fn=self.fn)

    def require_params(self) -> ProblemParams:
        if self.params is None:
            raise InvalidParameter(
                "this operation reads (a, p) from field.params; attach them "
                "with with_params()"
            )
        return self.params

    def _get_spline(self) -> RectBivariateSpline:
        if self._spline is None:
            y = self.grid.y
            vals = self.values
            if self.boundary is not None:
                y = np.concatenate(([0.0], y))
                vals = np.column_stack([self.boundary, self.values])
            kx = min(3, self.grid.r.size - 1)
            ky = min(3, y.size - 1)
            self._spline = RectBivariateSpline(self.grid.r, y, vals, kx=kx, ky=ky)
        return self._spline

    def eval(self, r, y):
        """Field values at arbitrary points (vectorized).

        Uses the closed form when available, otherwise the tensor spline
        through the samples (plus the boundary row when present).  Radial
        symmetry is assumed: r may be any real, |r| is used.
        """
        r = np.abs(np.asarray(r, dtype=float))
        y = np.asarray(y, dtype=float)
        if self.fn is not None:
            out = np.vectorize(self.fn)(r, y).astype(float)
            return out if out.shape else float(out)
        spline = self._get_spline()
        out = spline(np.atleast_1d(r).ravel(), np.atleast_1d(y).ravel(), grid=False)
        shaped = np.broadcast_arrays(r, y)[0]
        return out.reshape(shaped.shape) if shaped.shape else float(out)

    def eval_grad(self, r, y, h_rel: float = 1e-6):
        """(d_r u, d_y u) by centered differences (closed form) or spline
        partial derivatives (sampled fields)."""
        r = np.asarray(r, dtype=float)
        y = np.asarray(y, dtype=float)
        if self.fn is not None:
            hr = h_rel * (1.0 + np.abs(r))
            hy = np.minimum(h_rel * (1.0 + np.abs(y)), 0.5 * np.abs(y) + 1e-300)
            ur = (self.eval(r + hr, y) - self.eval(r - hr, y)) / (2.0 * hr)
            uy = (self.eval(r, y + hy) - self.eval(r, y - hy)) / (2.0 * hy)
            return ur, uy
        spline = self._get_spline()
        rb, yb = np.broadcast_arrays(r, y)
        rf = np.abs(rb).ravel()
        yf = yb.ravel()
        # radial symmetry: u_r is odd in r and vanishes at the axis
        ur = spline(rf, yf, dx=1, grid=False) * np.sign(rb.ravel())
        uy = spline(rf, yf, dy=1, grid=False)
        if rb.shape:
            return ur.reshape(rb.shape), uy.reshape(rb.shape)
        return float(ur), float(uy)

    def domain(self) -> tuple[float, float, float]:
        """(r_max, y_low, y_max) covered by samples plus boundary row."""
        y_low = 0.0 if self.boundary is not None else float(self.grid.y[0])
        return float(self.grid.r[-1]), y_low, float(self.grid.y[-1])

    def boundary_gap(self) -> float:
        """Max difference between the stored boundary and the field values
        extrapolated to y -> 0 in the variable y^{2s} (the leading boundary
        behaviour of the degenerate equation)."""
        if self.boundary is None:
            raise InvalidParameter("field has no boundary trace")
        z = self.grid.y[:3] ** (2.0 * self.s)
        v = self.values[:, :3]
        extrap = v[:, 0] - z[0] * (v[:, 1] - v[:, 0]) / (z[1] - z[0])
        return float(np.max(np.abs(extrap - self.boundary)))

    def to_csv(self, path) -> None:
        """Write the snapshot as three columns r, y, value (17 significant
        digits, deterministic row order)."""
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("r,y,value\n")
            for i, r in enumerate(self.grid.r):
                for j, y in enumerate(self.grid.y):
                    fh.write(f"{r:.17g},{y:.17g},{self.values[i, j]:.17g}\n")


_poisson_cache: dict[tuple[int, float], float] = {}
_poisson_lock = threading.Lock()


def poisson_normalization(n: int, s: float) -> float:
    """Constant p_{n,s} making the extension kernel a probability kernel.

    Computed by normalizing int y^{2s} (|x-t|^2 + y^2)^{-(n+2s)/2} dt at unit
    height; the integral is height independent by scaling.
    """
    if not (0.0 < s < 1.0):
        raise UnsupportedOrder(f"extension kernel requires 0 < s < 1, got s={s!r}")
    if n < 1:
        raise InvalidParameter(f"dimension must be >= 1, got {n}")
    key = (n, float(s))
    with _poisson_lock:
        cached = _poisson_cache.get(key)
    if cached is not None:
        return cached
    power = 0.5 * (n + 2.0 * s)

    def f(rho: float) -> float:
        return rho ** (n - 1) * (1.0 + rho * rho) ** (-power)

    mass, _ = quad(f, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=300)
    value = 1.0 / (surface_area(n) * mass)
    with _poisson_lock:
        _poisson_cache[key] = value
    return value


def _truncation_estimate(profile: RadialProfile, grid: HalfSpaceGrid,
                         n: int, s: float) -> float:
    """Upper estimate of the convolution mass discarded beyond the samples."""
    p_ns = poisson_normalization(n, s)
    r_cut = profile.r_max
    u_edge = abs(float(profile.u[-1]))
    y_top = float(grid.y[-1])
    # |x - t| >= rho/2 once rho exceeds twice the largest grid radius
    mass = surface_area(n) * 2.0 ** (n + 2.0 * s) * r_cut ** (-2.0 * s) / (2.0 * s)
    return p_ns * y_top ** (2.0 * s) * u_edge * mass


def _angular_kernel(n: int, s: float, r: float, rho: float, y: float) -> float:
    """int_0^pi sin(phi)^{n-2} (r^2+rho^2-2 r rho cos(phi) + y^2)^{-(n+2s)/2} dphi."""
    power = 0.5 * (n + 2.0 * s)
    base = (r - rho) ** 2 + y * y
    spread = 2.0 * r * rho

    def f(phi: float) -> float:
        return math.sin(phi) ** (n - 2) * (base + spread * (1.0 - math.cos(phi))) ** (-power)

    points = None
    if spread > 0.0 and base < spread:
        points = [math.sqrt(base / spread)]
    result = quad(f, 0.0, math.pi, epsabs=0.0, epsrel=1e-9, limit=200,
                  points=points, full_output=1)
    return result[0]


def extend_radial(profile: RadialProfile, grid: HalfSpaceGrid, n: int, s: float,
                  params: ProblemParams | None = None) -> HalfSpaceField:
    """Extend radial boundary data into the half space by the Poisson kernel.

    The convolution u_e(X) = int P(X, t) u(|t|) dt is reduced to a radial
    integral; data beyond the last sample follow the profile's tail model
    (or its closed form).  Raises TailUnspecified when no model is given and
    the truncation estimate exceeds tolerance.
    """
    if not (0.0 < s < 1.0):
        raise UnsupportedOrder(f"extension requires 0 < s < 1, got s={s!r}")
    if profile.fn is None and profile.tail is None:
        scale = max(1.0, float(np.max(np.abs(profile.u))))
        est = _truncation_estimate(profile, grid, n, s)
        if est > _TRUNCATION_TOL * scale:
            raise TailUnspecified(
                f"truncation estimate {est!r} exceeds tolerance; give the "
                "profile a TailModel"
            )
    p_ns = poisson_normalization(n, s)
    power = 0.5 * (n + 2.0 * s)
    r_nodes, y_nodes = grid.r, grid.y
    values = np.empty((r_nodes.size, y_nodes.size))
    split = max(2.0 * r_nodes[-1] + 10.0 * y_nodes[-1], profile.r_max)

    if n == 1:
        def one_point(r: float, y: float) -> float:
            y2 = y * y

            def f(rho: float) -> float:
                d1 = (r - rho) ** 2 + y2
                d2 = (r + rho) ** 2 + y2
                return profile(rho) * (d1 ** (-power) + d2 ** (-power))

            near = quad(f, 0.0, split, epsabs=0.0, epsrel=1e-9, limit=300,
                        points=[max(r - 3.0 * y, 0.0), r, r + 3.0 * y],
                        full_output=1)[0]
            far = quad(f, split, np.inf, epsabs=0.0, epsrel=1e-9, limit=200,
                       full_output=1)[0] if profile.has_tail() else 0.0
            return p_ns * y ** (2.0 * s) * (near + far)
    else:
        area = surface_area(n - 1)

        def one_point(r: float, y: float) -> float:
            def f(rho: float) -> float:
                return (profile(rho) * rho ** (n - 1)
                        * _angular_kernel(n, s, r, rho, y))

            near = quad(f, 0.0, split, epsabs=0.0, epsrel=1e-8, limit=200,
                        points=[max(r - 3.0 * y, 0.0), r, r + 3.0 * y],
                        full_output=1)[0]
            far = quad(f, split, np.inf, epsabs=0.0, epsrel=1e-8, limit=100,
                       full_output=1)[0] if profile.has_tail() else 0.0
            return p_ns * area * y ** (2.0 * s) * (near + far)

    for i, r in enumerate(r_nodes):
        for j, y in enumerate(y_nodes):
            values[i, j] = one_point(float(r), float(y))

    boundary = profile(r_nodes)
    return HalfSpaceField(grid, values, n=n, s=s, boundary=boundary, params=params)


def degenerate_residual(field: HalfSpaceField) -> float:
    """Max interior residual of the divergence-form operator

        (1/r^{n-1}) d_r (y^e r^{n-1} d_r u) + d_y (y^e d_y u),   e = weight,

    in finite-volume form, normalized by the local field scale.  The
    y-direction flux uses the degenerate-exact weight, so the homogeneous
    solution y^{1-e} has zero residual up to rounding.  Decays at second
    order under refinement of smooth fields on uniform grids.
    """
    r, y = field.grid.r, field.grid.y
    if r.size < 4 or y.size < 4:
        raise GridTooCoarse("need at least 4 nodes in each direction")
    e = field.grid.weight_exponent
    n = field.n
    v = field.values

    dr = np.diff(r)
    dy = np.diff(y)
    r_mid_w = (0.5 * (r[:-1] + r[1:])) ** (n - 1)
    if e == 1.0:
        y_mid_w = dy / np.log(y[1:] / y[:-1])
    else:
        y_mid_w = (1.0 - e) * dy / (y[1:] ** (1.0 - e) - y[:-1] ** (1.0 - e))

    flux_r = r_mid_w[:, None] * (v[1:, :] - v[:-1, :]) / dr[:, None]
    flux_y = y_mid_w[None, :] * (v[:, 1:] - v[:, :-1]) / dy[None, :]

    ri = r[1:-1]
    div_r = (flux_r[1:, :] - flux_r[:-1, :]) / (
        0.5 * (r[2:] - r[:-2])[:, None] * ri[:, None] ** (n - 1)
    )
    div_y = (flux_y[:, 1:] - flux_y[:, :-1]) / (0.5 * (y[2:] - y[:-2]))[None, :]

    residual = (y[None, 1:-1] ** e) * div_r[:, 1:-1] + div_y[1:-1, :]

    window = np.abs(v)
    local = np.maximum.reduce([
        window[1:-1, 1:-1], window[:-2, 1:-1], window[2:, 1:-1],
        window[1:-1, :-2], window[1:-1, 2:],
    ])
    floor = 1e-14 * float(np.max(window)) + 1e-300
    return float(np.max(np.abs(residual) / np.maximum(local, floor)))


def neumann_trace(field: HalfSpaceField) -> RadialProfile:
    """Weighted Neumann trace -lim_{y->0} y^{1-2s} d_y u_e on the radial nodes.

    Midpoint fluxes on the lowest grid levels (plus the stored boundary row
    when present) give -y^{1-2s} d_y u_e with its leading y^{2-2s} boundary
    correction isolated exactly; two Richardson eliminations in that
    variable extrapolate to y = 0.  Raises ExtrapolationUnstable when the
    two candidate extrapolants disagree by more than 10x the grid tolerance.
    """
    grid = field.grid
    s = field.s
    r_scale = float(grid.r[1]) if grid.r.size > 1 else float(grid.r[-1])
    levels_below = int(np.sum(grid.y <= 0.1 * r_scale * (1.0 + 1e-12)))
    if levels_below < 3:
        raise GridTooCoarse(
            f"need >= 3 y-levels below 0.1 * first radial scale = {0.1 * r_scale!r}, "
            f"got {levels_below}"
        )
    take = min(4, levels_below)
    ys = grid.y[:take]
    vals = field.values[:, :take]
    if field.boundary is not None:
        ys = np.concatenate(([0.0], ys))
        vals = np.column_stack([field.boundary, vals])

    two_s = 2.0 * s
    g_list = []
    z_list = []
    for k in range(ys.size - 1):
        y0, y1 = ys[k], ys[k + 1]
        dy = y1 - y0
        dz = y1**two_s - y0**two_s
        w = two_s * dy / dz
        g_list.append(-w * (vals[:, k + 1] - vals[:, k]) / dy)
        # exact coefficient of the next expansion term (from u ~ c y^{2s} + d y^2)
        z_list.append(two_s * dy * (y0 + y1) / dz)
    g = np.asarray(g_list)
    z = np.asarray(z_list)

    extrapolants = []
    for k in range(min(2, g.shape[0] - 1)):
        z0, z1 = z[k], z[k + 1]
        extrapolants.append((z1 * g[k] - z0 * g[k + 1]) / (z1 - z0))
    if len(extrapolants) == 1:
        trace = extrapolants[0]
    else:
        first, second = extrapolants
        scale = max(float(np.max(np.abs(first))), 1.0)
        gap = float(np.max(np.abs(first - second)))
        if gap > 10.0 * grid.extrapolation_tol * scale:
            raise ExtrapolationUnstable(
                f"successive trace extrapolants differ by {gap!r} "
                f"(scale {scale!r}, tol {grid.extrapolation_tol!r})"
            )
        trace = first
    return RadialProfile(grid.r, trace, tail=None)


def _forward_transform(profile: RadialProfile, n: int, xi: float) -> float:
    """Cosine (n=1) or first spherical sine (n=3) transform of the profile."""
    r_cut = profile.r_max if profile.fn is None else max(profile.r_max, 50.0)
    if n == 1:
        f = profile
    else:
        def f(rho):
            return profile(rho) * rho

    kind = "cos" if n == 1 else "sin"
    if xi == 0.0:
        head = quad(f, 0.0, r_cut, epsabs=1e-13, epsrel=1e-10, limit=300,
                    full_output=1)[0]
    else:
        head = quad(f, 0.0, r_cut, weight=kind, wvar=xi,
                    epsabs=1e-13, epsrel=1e-10, limit=300, full_output=1)[0]
    tail = 0.0
    if profile.fn is None and profile.tail is not None and profile.tail.kind != "zero":
        if profile.tail.kind == "constant":
            raise NonIntegrable("constant tail is not integrable; use power or zero")
        q = profile.tail.exponent
        edge = float(profile.u[-1])

        def tail_fn(rho):
            g = edge * (rho / r_cut) ** (-q)
            return g if n == 1 else g * rho

        if n == 3 and q <= 2.0:
            raise NonIntegrable("power tail must decay faster than rho^-2 for n=3")
        if xi == 0.0:
            tail = quad(tail_fn, r_cut, np.inf, epsabs=1e-13, epsrel=1e-10,
                        limit=200, full_output=1)[0]
        else:
            tail = quad(tail_fn, r_cut, np.inf, weight=kind, wvar=xi,
                        limit=200, full_output=1)[0]
    elif profile.fn is not None:
        def fn_tail(rho):
            g = profile.fn(rho)
            return g if n == 1 else g * rho

        if xi == 0.0:
            tail = quad(fn_tail, r_cut, np.inf, epsabs=1e-13, epsrel=1e-9,
                        limit=200, full_output=1)[0]
        else:
            tail = quad(fn_tail, r_cut, np.inf, weight=kind, wvar=xi,
                        limit=200, full_output=1)[0]
    return head + tail


def frac_laplacian_oracle(profile: RadialProfile, n: int, s: float,
                          r_out=None, xi_max: float = 48.0,
                          tail_fraction: float = 1e-6) -> RadialProfile:
    """(-Delta)^s of radial data via the Fourier multiplier |xi|^{2s}.

    Forward transform, multiplier, inverse transform on a panelized
    quadrature grid in xi.  The xi range doubles until the multiplier-
    weighted spectral mass in the last decade falls below ``tail_fraction``
    (AliasingDetected if that never happens).  n = 1 uses the cosine
    transform, n = 3 the spherical sine transform.
    """
    if n not in (1, 3):
        raise UnsupportedDimension(f"oracle implemented for n in (1, 3), got {n}")
    if not (0.0 < s < 1.0):
        raise UnsupportedOrder(f"oracle requires 0 < s < 1, got s={s!r}")
    if r_out is None:
        r_out = profile.r
    r_out = np.asarray(r_out, dtype=float)

    glx, glw = roots_legendre(16)
    # first panel absorbs the xi^{2s} endpoint factor with a Jacobi rule
    gjx, gjw = roots_jacobi(16, 0.0, 2.0 * s)

    for _ in range(5):
        n_panels = max(24, int(math.ceil(xi_max * max(float(r_out[-1]), 1.0) / 4.0)))
        n_panels = min(n_panels, 240)
        edges = np.linspace(0.0, xi_max, n_panels + 1)
        xi_nodes = []
        xi_weights = []
        # panel [0, e1] absorbs xi^{2s} into a Jacobi rule:
        # int_0^{e1} xi^{2s} F dxi = (e1/2)^{2s+1} int (1+x)^{2s} F(...) dx
        e1 = edges[1]
        xi0 = 0.5 * e1 * (gjx + 1.0)
        w0 = gjw * (0.5 * e1) ** (2.0 * s + 1.0)
        xi_nodes.append(xi0)
        xi_weights.append(w0)
        for k in range(1, n_panels):
            a, b = edges[k], edges[k + 1]
            xs = 0.5 * (b - a) * glx + 0.5 * (a + b)
            ws = 0.5 * (b - a) * glw * xs ** (2.0 * s)
            xi_nodes.append(xs)
            xi_weights.append(ws)
        xi_nodes = np.concatenate(xi_nodes)
        xi_weights = np.concatenate(xi_weights)

        f_hat = np.asarray([
            _forward_transform(profile, n, float(xi)) for xi in xi_nodes
        ])
        density = np.abs(xi_weights * f_hat) * (xi_nodes if n == 3 else 1.0)
        total = float(np.sum(density))
        tail = float(np.sum(density[xi_nodes > 0.9 * xi_max]))
        if total > 0.0 and tail <= tail_fraction * total:
            break
        xi_max *= 2.0
    else:
        raise AliasingDetected(
            f"spectral tail fraction {tail / max(total, 1e-300)!r} stays above "
            f"{tail_fraction!r} up to xi_max={xi_max!r}"
        )

    if n == 1:
        # u(x) = (1/pi) int uhat cos, uhat = 2 F  =>  (2/pi) int xi^{2s} F cos
        phases = np.cos(np.outer(r_out, xi_nodes))
        out = (2.0 / math.pi) * phases @ (xi_weights * f_hat)
    else:
        # uhat = 4 pi F / xi; inverse carries xi sin(xi r)/(2 pi^2 r)
        out = np.empty_like(r_out)
        coeff = xi_weights * f_hat
        for i, r in enumerate(r_out):
            if r == 0.0:
                out[i] = (2.0 / math.pi) * float(np.sum(coeff * xi_nodes))
            else:
                out[i] = (2.0 / (math.pi * r)) * float(
                    np.sum(coeff * np.sin(xi_nodes * r))
                )
    return RadialProfile(r_out, out, tail=None)
