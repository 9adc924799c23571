"""Closed-form lubrication solutions for uniform and tapered slider bearings.

Thin-film (Reynolds) theory for a 1D slider: two plates in relative motion
separated by a film of depth h(x) = h0*(1 + k - k*x/L), with k = 0 the
uniform slider and k > 0 a linear taper from h0*(1+k) at x = 0 down to h0
at x = L.  Pressure obeys the constant-flux film equation

    d/dx ( h^3/(6*mu) * dp/dx ) = (u_s1 + u_s2) * dh/dx

with Dirichlet pressures p0 at x = 0 and pL at x = L.  The solutions below
keep the edge pressures general (non-zero), which is what a finite slider
with over-/under-pressure at its edges requires; the classical null-edge-
pressure textbook solution is the p0 = pL = 0 special case.

Conventions: z spans [0, h(x)]; u_s1 is the x-velocity of the upper plate
(z = h) and u_s2 of the lower plate (z = 0); U_s = u_s1 + u_s2 drives the
Couette part of the flux, U* = |u_s1| + |u_s2| scales the nondimensional
pressure coefficient C_p = p / (rho*U*^2/2).

The tapered formulas divide by k; for k below 1e-6 the high-level
operations raise and point at their uniform counterparts instead of
returning cancellation noise.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

# below this the tapered closed forms are numerically meaningless (1/k blowup)
K_UNIFORM_THRESHOLD = 1e-6


@dataclass(frozen=True)
class SliderSpec:
    """Geometry, fluid, kinematics and edge pressures of one slider film."""

    L: float            # plate length [m]
    h0: float           # minimum film depth, at x = L [m]
    k: float            # fractional depth increase toward x = 0 [-]
    mu: float           # dynamic viscosity [Pa s]
    rho: float          # fluid density [kg/m^3]
    u_s1: float         # upper plate (z = h) x-velocity [m/s]
    u_s2: float         # lower plate (z = 0) x-velocity [m/s]
    p0: float = 0.0     # pressure at x = 0, the deep edge [Pa]
    pL: float = 0.0     # pressure at x = L, the shallow edge [Pa]

    def __post_init__(self) -> None:
        vals = (self.L, self.h0, self.k, self.mu, self.rho,
                self.u_s1, self.u_s2, self.p0, self.pL)
        if not all(np.isfinite(v) for v in vals):
            raise ValueError("slider parameters must be finite")
        if self.L <= 0.0 or self.h0 <= 0.0:
            raise ValueError(f"need L > 0 and h0 > 0, got L={self.L}, h0={self.h0}")
        if self.k < 0.0:
            raise ValueError(f"taper parameter k must be >= 0, got {self.k}")
        if self.mu <= 0.0 or self.rho <= 0.0:
            raise ValueError("mu and rho must be positive")
        if self.u_star == 0.0:
            raise ValueError("at least one plate must move (|u_s1| + |u_s2| > 0)")

    @property
    def u_sum(self) -> float:
        """Velocity scale U_s = u_s1 + u_s2 driving the film flux [m/s]."""
        return self.u_s1 + self.u_s2

    @property
    def u_star(self) -> float:
        """Reference speed U* = |u_s1| + |u_s2| for nondimensional forms [m/s]."""
        return abs(self.u_s1) + abs(self.u_s2)

    @property
    def dynamic_pressure(self) -> float:
        """Pressure scale rho*U*^2/2 [Pa]."""
        return 0.5 * self.rho * self.u_star ** 2


def _require_tapered(spec: SliderSpec, op: str, uniform_op: str) -> None:
    if spec.k < K_UNIFORM_THRESHOLD:
        raise ValueError(
            f"{op}: k = {spec.k} is below {K_UNIFORM_THRESHOLD}; the tapered closed "
            f"forms divide by k. Use {uniform_op} for the constant-depth film."
        )


def _require_uniform(spec: SliderSpec, op: str, tapered_op: str) -> None:
    if spec.k >= K_UNIFORM_THRESHOLD:
        raise ValueError(
            f"{op}: expects a constant-depth film (k = 0), got k = {spec.k}. "
            f"Use {tapered_op} for a tapered film."
        )


def film_depth(spec: SliderSpec, x):
    """Film depth h(x) = h0*(1 + k - k*x/L).

    Parameters
    ----------
    spec : SliderSpec
    x : float or ndarray
        Position along the slider, 0 <= x <= L [m].

    Returns
    -------
    float or ndarray
        Depth [m]: h0*(1+k) at x = 0 tapering to h0 at x = L.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < -1e-12 * spec.L) or np.any(x > spec.L * (1.0 + 1e-12)):
        raise ValueError("film_depth: x must lie within [0, L]")
    out = spec.h0 * (1.0 + spec.k - spec.k * x / spec.L)
    return out if out.ndim else float(out)


def integration_constants(spec: SliderSpec) -> tuple[float, float]:
    """Constants (C1, C2) of the general film-pressure solution.

    The general solution is p(x) = 6*mu*U_s*L/(k*h0*h) + L*C1/(2*k*h0*h^2) + C2
    with C1, C2 fixed by the Dirichlet conditions p(0) = p0 and p(L) = pL:

        C1 = -2*h0*(1+k)/(2+k) * [6*mu*U_s + (p0-pL)*h0^2*(1+k)/L]
        C2 = -L/(h0^2*k*(k+2)) * [6*mu*U_s + (pL-p0)*h0^2*(1+k)^2/L] + pL

    C2 carries a 1/k factor, so the constants individually diverge as
    k -> 0 even though the pressure profile itself stays finite; no guard
    is applied here (callers wanting the k -> 0 limit evaluate the full
    profile, which cancels the divergence).
    """
    one_k = 1.0 + spec.k
    two_k = 2.0 + spec.k
    drive = 6.0 * spec.mu * spec.u_sum
    c1 = -2.0 * spec.h0 * one_k / two_k * (
        drive + (spec.p0 - spec.pL) * spec.h0 ** 2 * one_k / spec.L)
    c2 = -spec.L / (spec.h0 ** 2 * spec.k * two_k) * (
        drive + (spec.pL - spec.p0) * spec.h0 ** 2 * one_k ** 2 / spec.L) + spec.pL
    return c1, c2


def pressure_from_constants(spec: SliderSpec, x, c1: float, c2: float):
    """General film pressure p(x) = 6*mu*U_s*L/(k*h0*h) + L*C1/(2*k*h0*h^2) + C2.

    Evaluated in extended precision: the three terms individually scale as
    1/k and cancel to an O(1) pressure, which costs ~|log10 k| digits; the
    extra mantissa keeps the k -> 0 limit usable down to k ~ 1e-12.
    """
    h = np.asarray(film_depth(spec, x), dtype=np.longdouble)
    k = np.longdouble(spec.k)
    drive = np.longdouble(6.0 * spec.mu * spec.u_sum) * np.longdouble(spec.L)
    out = (drive / (k * np.longdouble(spec.h0) * h)
           + np.longdouble(spec.L) * np.longdouble(c1)
           / (2.0 * k * np.longdouble(spec.h0) * h ** 2) + np.longdouble(c2))
    out = out.astype(float)
    return out if out.ndim else float(out)


def uniform_pressure(spec: SliderSpec, x):
    """Pressure in a constant-depth film: linear between the edge values.

    With dh/dx = 0 the film equation collapses to d2p/dx2 = 0, so
    p(x) = p0 + (pL - p0)*x/L regardless of viscosity or plate speeds.
    """
    _require_uniform(spec, "uniform_pressure", "generalized_pressure")
    x = np.asarray(x, dtype=float)
    out = spec.p0 + (spec.pL - spec.p0) * x / spec.L
    return out if out.ndim else float(out)


def uniform_velocity(spec: SliderSpec, x, z):
    """Couette-Poiseuille profile in a constant-depth film.

    u(z) = z*(z-h)*(pL-p0)/(2*mu*L) + (u_s1-u_s2)*z/h + u_s2 for z in [0, h].
    """
    _require_uniform(spec, "uniform_velocity", "generalized_velocity")
    z = np.asarray(z, dtype=float)
    h = spec.h0
    if np.any(z < -1e-12 * h) or np.any(z > h * (1.0 + 1e-12)):
        raise ValueError("uniform_velocity: z must lie within [0, h]")
    out = (z * (z - h) * (spec.pL - spec.p0) / (2.0 * spec.mu * spec.L)
           + (spec.u_s1 - spec.u_s2) * z / h + spec.u_s2)
    return out if out.ndim else float(out)


def uniform_load_capacity(spec: SliderSpec) -> tuple[float, float]:
    """Load per unit width and its dimensionless form for a constant-depth film.

    Returns
    -------
    (l_c, L_C)
        l_c = (p0 + pL)*L/2 [N/m]; L_C = l_c / (rho*U*^2*L/2), which equals
        the mean of the edge pressure coefficients.
    """
    _require_uniform(spec, "uniform_load_capacity", "generalized_load_capacity")
    l_c = 0.5 * (spec.p0 + spec.pL) * spec.L
    return l_c, l_c / (spec.dynamic_pressure * spec.L)


def generalized_pressure(spec: SliderSpec, x):
    """Film pressure in a tapered slider with general edge pressures.

    Parameters
    ----------
    spec : SliderSpec
        Must have k >= 1e-6 (the closed form divides by k).
    x : float or ndarray
        Position 0 <= x <= L [m].

    Returns
    -------
    float or ndarray
        p(x) [Pa], exactly p0 at x = 0 and pL at x = L; uniform in z.

    Notes
    -----
    The first group of terms is the null-edge-pressure solution (direct in
    mu*U_s*L/h0^2); the second is the correction carrying p0 - pL; the
    last is the offset pL.
    """
    _require_tapered(spec, "generalized_pressure", "uniform_pressure")
    H = film_depth(spec, x) / spec.h0
    one_k = 1.0 + spec.k
    two_k = 2.0 + spec.k
    null_bc = (6.0 * spec.mu * spec.u_sum * spec.L / (spec.k * spec.h0 ** 2)
               * (1.0 / H - one_k / (two_k * H ** 2) - 1.0 / two_k))
    edge = -(spec.p0 - spec.pL) * one_k ** 2 / (spec.k * two_k) * (1.0 / H ** 2 - 1.0)
    out = null_bc + edge + spec.pL
    return out if np.ndim(out) else float(out)


def generalized_pressure_gradient(spec: SliderSpec, x):
    """Analytic dp/dx of generalized_pressure [Pa/m]."""
    _require_tapered(spec, "generalized_pressure_gradient", "uniform_pressure")
    H = film_depth(spec, x) / spec.h0
    one_k = 1.0 + spec.k
    two_k = 2.0 + spec.k
    drive = (6.0 * spec.mu * spec.u_sum / spec.h0 ** 2
             * (1.0 / H ** 2 - 2.0 * one_k / (two_k * H ** 3)))
    edge = -2.0 * (spec.p0 - spec.pL) * one_k ** 2 / (two_k * spec.L * H ** 3)
    out = drive + edge
    return out if np.ndim(out) else float(out)


def generalized_load_capacity(spec: SliderSpec) -> tuple[float, float]:
    """Load per unit width of a tapered slider and its dimensionless form.

    l_c = integral of the film pressure over [0, L]:

        l_c = 6*mu*U_s*L^2/h0^2 * [ln(1+k)/k^2 - 2/(k*(2+k))]
              + (p0 - pL)*L*(1+k)/(2+k) + pL*L

    Returns
    -------
    (l_c, L_C)
        l_c [N/m] and L_C = l_c / (rho*U*^2*L/2) [-].
    """
    _require_tapered(spec, "generalized_load_capacity", "uniform_load_capacity")
    one_k = 1.0 + spec.k
    two_k = 2.0 + spec.k
    l_c = (6.0 * spec.mu * spec.u_sum * spec.L ** 2 / spec.h0 ** 2
           * (np.log1p(spec.k) / spec.k ** 2 - 2.0 / (spec.k * two_k))
           + (spec.p0 - spec.pL) * spec.L * one_k / two_k + spec.pL * spec.L)
    return l_c, l_c / (spec.dynamic_pressure * spec.L)


def general_film_velocity(dp_dx, h, z, u_s1: float, u_s2: float, mu: float):
    """Velocity profile of a thin film from its local pressure gradient.

    u(z) = z*(z-h)/(2*mu) * dp/dx + (u_s1 - u_s2)*z/h + u_s2, valid for any
    film once dp/dx and the local depth h are known.
    """
    dp_dx = np.asarray(dp_dx, dtype=float)
    h = np.asarray(h, dtype=float)
    z = np.asarray(z, dtype=float)
    if np.any(h <= 0.0):
        raise ValueError("general_film_velocity: depth must be positive")
    out = z * (z - h) / (2.0 * mu) * dp_dx + (u_s1 - u_s2) * z / h + u_s2
    return out if np.ndim(out) else float(out)


def generalized_velocity(spec: SliderSpec, x, z):
    """Horizontal velocity u(x, z) in a tapered slider, z in [0, h(x)].

    Quadratic in z with an x-dependent curvature:

        u = { [1 - 2*h0*(1+k)/(h*(2+k))] * 3*U_s
              - (1+k)^2*(p0-pL)*h0^3 / ((2+k)*L*mu*h) } * z*(z-h)/h^2
            + (u_s1 - u_s2)*z/h + u_s2

    The braced curvature coefficient changes sign along x, which is the
    concavity reversal the tapered slider exhibits between its shallow and
    deep ends.
    """
    _require_tapered(spec, "generalized_velocity", "uniform_velocity")
    h = film_depth(spec, x)
    z = np.asarray(z, dtype=float)
    if np.any(z < -1e-12 * spec.h0) or np.any(z > h * (1.0 + 1e-12)):
        raise ValueError("generalized_velocity: z must lie within [0, h(x)]")
    one_k = 1.0 + spec.k
    two_k = 2.0 + spec.k
    curvature = ((1.0 - 2.0 * spec.h0 * one_k / (h * two_k)) * 3.0 * spec.u_sum
                 - one_k ** 2 * (spec.p0 - spec.pL) * spec.h0 ** 3
                 / (two_k * spec.L * spec.mu * h))
    out = curvature * z * (z - h) / h ** 2 + (spec.u_s1 - spec.u_s2) * z / h + spec.u_s2
    return out if np.ndim(out) else float(out)


def film_flux(spec: SliderSpec) -> float:
    """Volume flux per unit width q = integral of u over z [m^2/s].

    Constant along x (mass conservation of the film).  Valid for any
    k >= 0: q = U_s*h0*(1+k)/(2+k) + (1+k)^2*(p0-pL)*h0^3/(6*(2+k)*L*mu),
    which reduces to U_s*h0/2 + (p0-pL)*h0^3/(12*mu*L) at k = 0.
    """
    one_k = 1.0 + spec.k
    two_k = 2.0 + spec.k
    return (spec.u_sum * spec.h0 * one_k / two_k
            + one_k ** 2 * (spec.p0 - spec.pL) * spec.h0 ** 3
            / (6.0 * two_k * spec.L * spec.mu))


def reynolds_residual(pressure_profile, spec: SliderSpec, n: int = 10001) -> float:
    """Scaled film-equation residual of a pressure profile.

    Evaluates, by central differences on n uniform nodes,

        R(x) = (1/(6*mu)) * (h^3 * p'' + 3*h^2*h'*p') - (u_s1 + u_s2)*h'

    converts it to a pressure-equivalent via the factor 6*mu*L^2/h0^3, and
    returns its interior L-infinity norm divided by the profile's pressure
    scale max(|p0|, |pL|, 6*mu*|U_s|*L/h0^2).

    Parameters
    ----------
    pressure_profile : callable
        Maps an ndarray of x positions [m] to pressures [Pa].
    spec : SliderSpec
    n : int
        Node count (>= 5).

    Returns
    -------
    float
        Dimensionless residual norm; an exact solution scores at the
        central-difference truncation level, O(n^-2).
    """
    if n < 5:
        raise ValueError("reynolds_residual: need at least 5 nodes")
    x = np.linspace(0.0, spec.L, n)
    dx = x[1] - x[0]
    p = np.asarray(pressure_profile(x), dtype=float)
    if p.shape != x.shape:
        raise ValueError("reynolds_residual: profile must return one value per node")
    h = film_depth(spec, x[1:-1])
    hp = -spec.k * spec.h0 / spec.L  # dh/dx, constant for the linear taper
    d1 = (p[2:] - p[:-2]) / (2.0 * dx)
    d2 = (p[2:] - 2.0 * p[1:-1] + p[:-2]) / dx ** 2
    resid = (h ** 3 * d2 + 3.0 * h ** 2 * hp * d1) / (6.0 * spec.mu) - spec.u_sum * hp
    p_scale = max(abs(spec.p0), abs(spec.pL),
                  6.0 * spec.mu * abs(spec.u_sum) * spec.L / spec.h0 ** 2)
    resid_pa = resid * 6.0 * spec.mu * spec.L ** 2 / spec.h0 ** 3
    return float(np.max(np.abs(resid_pa)) / p_scale)


@dataclass(frozen=True)
class FrameSample:
    """One point mapped between the analytic frame and the moving-plate frame."""

    x: float | np.ndarray          # position in the target frame [m]
    u: float | np.ndarray | None   # x-velocity in the target frame [m/s]
    grad_sign: float               # dp/dx in the target frame = grad_sign * dp/dx in the source
    depth: float | np.ndarray      # film depth at the mapped position [m]


def frame_transform(x, t: float, plate_speed: float, spec: SliderSpec,
                    u=None, inverse: bool = False) -> FrameSample:
    """Map between the static analytic frame and the moving-plate frame.

    The analytic frame has a static plate pair over x in [0, L] with the
    film shallowest at x = L.  The moving frame translates the plate at
    plate_speed along +x and reverses the axis, so its trailing (shallow)
    edge sits at plate_speed*t and its leading (deep) edge at
    plate_speed*t + L.

    Forward map (analytic -> moving): x_m = L - x + plate_speed*t,
    u_m = plate_speed - u.  The map is an involution in velocity and the
    pressure gradient flips sign; pressure and depth are invariant.

    Parameters
    ----------
    x : float or ndarray
        Source-frame position [m] (analytic frame unless inverse=True;
        moving-frame inputs are measured from the trailing edge's t = 0
        position).
    t : float
        Time [s], locating the plate in the moving frame.
    plate_speed : float
        Plate translation speed in the moving frame [m/s].
    spec : SliderSpec
    u : float or ndarray, optional
        Source-frame x-velocity to map alongside the position.
    inverse : bool
        Map moving frame -> analytic frame instead.

    Returns
    -------
    FrameSample
    """
    x = np.asarray(x, dtype=float)
    if inverse:
        x_out = spec.L - (x - plate_speed * t)
    else:
        x_out = spec.L - x + plate_speed * t
    x_analytic = x if not inverse else x_out
    depth = film_depth(spec, x_analytic)
    u_out = None if u is None else plate_speed - np.asarray(u, dtype=float)
    if x_out.ndim == 0:
        x_out = float(x_out)
        depth = float(depth)
        if u_out is not None and np.ndim(u_out) == 0:
            u_out = float(u_out)
    return FrameSample(x=x_out, u=u_out, grad_sign=-1.0, depth=depth)


def nondimensionalize(value, quantity: str, spec: SliderSpec):
    """Scale a dimensional sample into the slider's nondimensional system.

    quantity selects the rule: "pressure" -> C_p = p/(rho*U*^2/2);
    "velocity" -> u/U*; "time" -> T = 2*t*U*/h0; "load_per_width" ->
    L_C = l_c/(rho*U*^2*L/2).
    """
    value = np.asarray(value, dtype=float)
    if quantity == "pressure":
        out = value / spec.dynamic_pressure
    elif quantity == "velocity":
        out = value / spec.u_star
    elif quantity == "time":
        out = 2.0 * value * spec.u_star / spec.h0
    elif quantity == "load_per_width":
        out = value / (spec.dynamic_pressure * spec.L)
    else:
        raise ValueError(
            f"nondimensionalize: unknown quantity {quantity!r}; expected one of "
            "'pressure', 'velocity', 'time', 'load_per_width'")
    return out if out.ndim else float(out)


def reynolds_number(h: float, u_s1: float, u_s2: float, nu: float) -> float:
    """Film Reynolds number Re = h*(u_s1 + u_s2)/(2*nu).

    The length scale is half the gap; the laminar threshold for an
    infinite linear slider is around Re = 290.
    """
    if h <= 0.0 or nu <= 0.0:
        raise ValueError("reynolds_number: need h > 0 and nu > 0")
    return h * (u_s1 + u_s2) / (2.0 * nu)


def edge_pressures_from_interior(spec: SliderSpec, x_samples, p_samples) -> tuple[float, float]:
    """Edge pressures (p0, pL) whose profile passes through two interior samples.

    The film pressure is affine in (p0, pL) at fixed geometry, so two
    interior samples determine the edge values by a 2x2 linear solve.
    Measuring slightly inside the edges and inverting through the profile
    avoids reading the edge values where a real slider deviates most from
    film theory.

    Parameters
    ----------
    spec : SliderSpec
        Geometry/fluid/kinematics; its own p0/pL fields are ignored.
    x_samples : array_like, shape (2,)
        Interior sample positions, 0 < x < L, distinct [m].
    p_samples : array_like, shape (2,)
        Film pressures measured at those positions [Pa].

    Returns
    -------
    (p0, pL) : tuple of float
        Equivalent Dirichlet edge pressures [Pa].
    """
    xs = np.asarray(x_samples, dtype=float)
    ps = np.asarray(p_samples, dtype=float)
    if xs.shape != (2,) or ps.shape != (2,):
        raise ValueError("edge_pressures_from_interior: need exactly two samples")
    if abs(xs[0] - xs[1]) < 1e-9 * spec.L:
        raise ValueError("edge_pressures_from_interior: sample positions must differ")

    def profile(p0: float, pL: float) -> np.ndarray:
        s = replace(spec, p0=p0, pL=pL)
        if s.k < K_UNIFORM_THRESHOLD:
            return uniform_pressure(s, xs)
        return generalized_pressure(s, xs)

    base = profile(0.0, 0.0)
    col0 = profile(1.0, 0.0) - base
    col1 = profile(0.0, 1.0) - base
    sol = np.linalg.solve(np.column_stack([col0, col1]), ps - base)
    return float(sol[0]), float(sol[1])
