"""Staggered leapfrog time stepping for the coupled fluid-body system.

Velocities live at half steps, positions and densities at whole steps.
One step at time t runs through a fixed phase order: body-particle
pressures refresh from the fluid state at t, accelerations are summed
from fluid, frontier, body-coupling and external contributions,
velocities kick to t + dt/2, the continuity derivative is evaluated
with the new velocities on the time-t geometry, densities and the
equation of state update, rigid bodies advance (free bodies from the
thrust of the freshly refreshed surface pressures, prescribed bodies
from their schedule at t + dt), positions drift to t + dt, and an
optional boundary-bookkeeping hook runs last.

The step size obeys both stability bounds (viscous and acoustic) at
every step; any non-finite state after an update aborts the run with a
diagnosis of which field went bad and when.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType

import numpy as np

from .bodies import (RigidBody, advance_body, apply_prescribed_motion,
                     total_force, total_torque)
from .coupling import (body_particle_accelerations, continuity_coupling,
                       coupling_accel, update_body_pressures)
from .frontiers import Frontier
from .kernel import KernelSpec
from .neighbors import all_neighbors, build_cell_index, transpose_neighbors
from .wcsph import (FluidConstants, eos_pressure, fluid_continuity, fluid_rhs,
                    frontier_rhs)

__all__ = [
    "TimeState",
    "FluidState",
    "CoupledBody",
    "SimulationDiverged",
    "stable_dt",
    "bootstrap_half_step",
    "leapfrog_step",
]

# which state fields live at t and which at t - dt/2
STAGGERING = MappingProxyType({
    "positions": "t",
    "densities": "t",
    "pressures": "t",
    "velocities": "t - dt/2",
    "body_pressures": "t - dt/2",
})


class SimulationDiverged(RuntimeError):
    """A state field left the finite range; carries step diagnostics."""

    def __init__(self, what: str, step: int, t: float, bad: int, total: int):
        self.what = what
        self.step = step
        self.t = t
        self.bad = bad
        self.total = total
        super().__init__(
            f"{what} diverged at step {step} (t = {t:.9e} s): "
            f"{bad} of {total} entries are not finite")


@dataclass
class TimeState:
    """Clock of one run; `staggering` documents where each field lives."""

    t: float = 0.0     # time of the whole-step fields [s]
    dt: float = 0.0    # last step size [s]
    step: int = 0      # completed steps
    staggering = STAGGERING


@dataclass
class FluidState:
    """Structure-of-arrays fluid state (positions at t, velocities at t - dt/2)."""

    positions: np.ndarray   # (n, 3) [m]
    velocities: np.ndarray  # (n, 3) [m/s]
    densities: np.ndarray   # (n,) [kg/m^3]
    pressures: np.ndarray   # (n,) [Pa]
    masses: np.ndarray      # (n,) [kg]

    def __post_init__(self) -> None:
        self.positions = np.atleast_2d(np.ascontiguousarray(self.positions, dtype=np.float64))
        self.velocities = np.atleast_2d(np.ascontiguousarray(self.velocities, dtype=np.float64))
        for name in ("densities", "pressures", "masses"):
            setattr(self, name, np.atleast_1d(
                np.ascontiguousarray(getattr(self, name), dtype=np.float64)))
        n = self.positions.shape[0]
        for name, want in (("positions", (n, 3)), ("velocities", (n, 3)),
                           ("densities", (n,)), ("pressures", (n,)),
                           ("masses", (n,))):
            if getattr(self, name).shape != want:
                raise ValueError(f"{name} must have shape {want}, "
                                 f"got {getattr(self, name).shape}")

    def __len__(self) -> int:
        return self.positions.shape[0]


@dataclass
class CoupledBody:
    """One rigid body plus its coupling discretization parameters."""

    body: RigidBody
    omega: np.ndarray        # (n_s,) or scalar: coupling volume per particle [m^3]
    slip: str = "no-slip"

    def __post_init__(self) -> None:
        n_s = len(self.body.particles)
        om = np.asarray(self.omega, dtype=np.float64)
        if om.shape == ():
            om = np.full(n_s, float(om))
        if om.shape != (n_s,) or not np.all(np.isfinite(om)) or np.any(om <= 0.0):
            raise ValueError("coupling volumes must be positive, one per body particle")
        self.omega = om


def stable_dt(velocities, constants: FluidConstants, spec: KernelSpec,
              cfl: float = 0.05, c_v: float = 0.05) -> float:
    """Largest step satisfying the viscous and acoustic bounds [s].

    min{ c_v 2h^2/nu, cfl 2h/(c + |u|_max) } with h the smoothing length.
    """
    if not (np.isfinite(cfl) and cfl > 0.0 and np.isfinite(c_v) and c_v > 0.0):
        raise ValueError(f"stability numbers must be positive, got cfl={cfl}, c_v={c_v}")
    u = np.atleast_2d(np.asarray(velocities, dtype=np.float64))
    u_max = float(np.sqrt(np.max(np.sum(u * u, axis=1)))) if u.size else 0.0
    h = spec.h_sph
    bounds = [cfl * 2.0 * h / (constants.sound_speed + u_max)]
    if constants.nu > 0.0:
        bounds.append(c_v * 2.0 * h ** 2 / constants.nu)
    dt = min(bounds)
    if not (np.isfinite(dt) and dt > 0.0):
        raise ValueError(f"stability bounds give a non-positive step {dt}")
    return dt


def _as_frontier_pairs(frontiers):
    pairs = []
    for f in frontiers:
        if isinstance(f, Frontier):
            pairs.append((f, None))
        else:
            frontier, table = f
            pairs.append((frontier, table))
    return pairs


def _check_finite(arr, what: str, step: int, t: float) -> None:
    bad = int(np.size(arr) - np.count_nonzero(np.isfinite(arr)))
    if bad:
        raise SimulationDiverged(what, step, t, bad, int(np.size(arr)))


class _StepGeometry:
    """Neighbor indexes and lists shared by every pass of one step."""

    def __init__(self, fluid: FluidState, spec: KernelSpec, bodies, domain):
        n = len(fluid)
        if n == 0:
            self.index = None
        elif domain is None:
            pad = spec.support_radius
            self.index = build_cell_index(fluid.positions, spec.support_radius,
                                          fluid.positions.min(axis=0) - pad,
                                          fluid.positions.max(axis=0) + pad)
        else:
            lo, hi, periodic = domain
            self.index = build_cell_index(fluid.positions, spec.support_radius,
                                          lo, hi, periodic=periodic)
        self.lists = None if self.index is None else \
            all_neighbors(self.index, radius=spec.support_radius)
        self.body_indexes = []
        self.body_lists = []
        self.body_fluid_lists = []   # the same pairs keyed by body particle
        pad = spec.support_radius
        for cb in bodies:
            bpos = cb.body.particles.pos
            bindex = build_cell_index(bpos, spec.support_radius,
                                      bpos.min(axis=0) - pad,
                                      bpos.max(axis=0) + pad)
            self.body_indexes.append(bindex)
            if n == 0:
                self.body_lists.append(None)
                self.body_fluid_lists.append(None)
            else:
                lists = all_neighbors(bindex, points=fluid.positions,
                                      radius=spec.support_radius)
                self.body_lists.append(lists)
                self.body_fluid_lists.append(
                    transpose_neighbors(*lists, len(bpos)))


def _accelerations(fluid: FluidState, constants, spec, pairs, bodies,
                   geom: _StepGeometry, t, extra_accel):
    """Momentum RHS at the fluid's current geometry; velocities as stored."""
    n = len(fluid)
    acc = np.tile(constants.gravity, (n, 1))
    if n and extra_accel is not None:
        acc += extra_accel(fluid.positions, t)
    if n == 0:
        return acc
    _, a = fluid_rhs(fluid.positions, fluid.velocities, fluid.densities,
                     fluid.pressures, fluid.masses, constants, spec,
                     index=geom.index, neighbors=geom.lists)
    acc += a
    for frontier, table in pairs:
        _, a = frontier_rhs(fluid.positions, fluid.velocities, fluid.densities,
                            fluid.pressures, constants, frontier, spec, table=table)
        acc += a
    for cb, bindex, blists in zip(bodies, geom.body_indexes, geom.body_lists):
        p = cb.body.particles
        acc += coupling_accel(fluid.positions, fluid.velocities,
                              fluid.densities, fluid.pressures, constants,
                              spec, p.pos, p.vel, p.pressures, cb.omega,
                              body_normals=p.normals, slip=cb.slip,
                              index=bindex, neighbors=blists)
    return acc


def _continuity(fluid: FluidState, constants, spec, pairs, bodies,
                geom: _StepGeometry):
    """Density RHS with the freshly kicked velocities on the same geometry."""
    n = len(fluid)
    drho = np.zeros(n)
    if n == 0:
        return drho
    drho += fluid_continuity(fluid.positions, fluid.velocities,
                             fluid.densities, fluid.masses, constants, spec,
                             index=geom.index, neighbors=geom.lists)
    for frontier, table in pairs:
        d, _ = frontier_rhs(fluid.positions, fluid.velocities, fluid.densities,
                            fluid.pressures, constants, frontier, spec, table=table)
        drho += d
    for cb, bindex, blists in zip(bodies, geom.body_indexes, geom.body_lists):
        p = cb.body.particles
        drho += continuity_coupling(fluid.positions, fluid.velocities,
                                    fluid.densities, constants, spec, p.pos,
                                    p.vel, cb.omega, body_normals=p.normals,
                                    slip=cb.slip, index=bindex, neighbors=blists)
    return drho


def _refresh_body_pressures(fluid: FluidState, constants, spec, bodies,
                            geom: _StepGeometry, t: float) -> None:
    """Shepard pressures at t; prescribed bodies add their frame correction."""
    for cb, lists in zip(bodies, geom.body_fluid_lists):
        body = cb.body
        a_s = None
        if body.mode == "prescribed" and hasattr(body.schedule, "acceleration"):
            a_cm = body.schedule.acceleration(t)
            a_s = body_particle_accelerations(body, a_cm, np.zeros(3))
        update_body_pressures(body, fluid.positions, fluid.pressures,
                              fluid.densities, fluid.masses, spec,
                              gravity=constants.gravity,
                              body_accelerations=a_s, index=geom.index,
                              neighbors=lists)


def bootstrap_half_step(fluid: FluidState, constants: FluidConstants,
                        spec: KernelSpec, dt: float, frontiers=(), bodies=(),
                        domain=None, extra_accel=None) -> None:
    """Shift initial velocities from t = 0 to t = -dt/2 (Euler half step).

    Body-particle pressures refresh first so the initial RHS sees the
    same coupling state a regular step would.
    """
    pairs = _as_frontier_pairs(frontiers)
    geom = _StepGeometry(fluid, spec, bodies, domain)
    _refresh_body_pressures(fluid, constants, spec, bodies, geom, 0.0)
    acc = _accelerations(fluid, constants, spec, pairs, bodies, geom, 0.0,
                         extra_accel)
    fluid.velocities -= 0.5 * dt * acc


def leapfrog_step(fluid: FluidState, time: TimeState,
                  constants: FluidConstants, spec: KernelSpec,
                  frontiers=(), bodies=(), dt: float = None,
                  cfl: float = 0.05, c_v: float = 0.05, domain=None,
                  extra_accel=None, boundary_update=None) -> TimeState:
    """Advance the coupled system by one step; mutates `fluid` and bodies.

    `dt` fixes the step size (still validated against the stability
    bounds); by default the bounds are recomputed every step.  `domain`
    is an optional (lo, hi, periodic) triple for the neighbor grid, and
    `extra_accel(positions, t)` injects external forcing.
    `boundary_update(fluid, time)` runs after the kinematic update for
    inlet/outlet bookkeeping.
    """
    t = time.t
    limit = stable_dt(fluid.velocities, constants, spec, cfl=cfl, c_v=c_v)
    if dt is None:
        dt = limit
    elif not (np.isfinite(dt) and 0.0 < dt <= limit * (1.0 + 1e-12)):
        raise ValueError(f"step size {dt} violates the stability bound {limit}")

    pairs = _as_frontier_pairs(frontiers)
    geom = _StepGeometry(fluid, spec, bodies, domain)

    # surface pressures at t: the staggered body-side state
    _refresh_body_pressures(fluid, constants, spec, bodies, geom, t)

    acc = _accelerations(fluid, constants, spec, pairs, bodies, geom, t,
                         extra_accel)
    fluid.velocities += dt * acc
    _check_finite(fluid.velocities, "velocities", time.step, t)

    # density derivative: fresh velocities on the time-t geometry, so the
    # whole-step density increment is centered like the position drift
    drho = _continuity(fluid, constants, spec, pairs, bodies, geom)
    fluid.densities += dt * drho
    _check_finite(fluid.densities, "densities", time.step, t)
    fluid.pressures = eos_pressure(fluid.densities, constants)

    for cb in bodies:
        body = cb.body
        if body.mode == "prescribed":
            apply_prescribed_motion(body, body.schedule, t + dt)
        else:
            f = total_force(body, gravity=constants.gravity)
            m = total_torque(body)
            advance_body(body, f, m, dt)

    fluid.positions += dt * fluid.velocities
    _check_finite(fluid.positions, "positions", time.step, t)

    out = TimeState(t=t + dt, dt=dt, step=time.step + 1)
    if boundary_update is not None:
        boundary_update(fluid, out)
    return out
