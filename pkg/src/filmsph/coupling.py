"""Two-way no-slip coupling between fluid particles and rigid-body particles.

A moving body truncates the kernel support of nearby fluid particles.
Body particles fill the truncated volume, each carrying the solid volume
of Eq-style resolution scaling (fluid particle volume over the cubed
spacing ratio), and couple back into the fluid balance equations through
three terms: a symmetric pressure acceleration, a shear acceleration
built on the mirrored inter-particle velocity 2 u_s - u_0, and a
continuity source from the same velocity reconstruction.  Body surface
particles receive their pressure from a Shepard interpolation of the
neighboring fluid pressures with a hydrostatic-style correction along
the particle separation, which closes the force loop on the body side.

Sign conventions match the fluid-fluid operators: kernel gradients are
taken with respect to the neighbor coordinate, so positive pressures
repel the fluid from the body and an approaching body compresses the
fluid.
"""

from __future__ import annotations

import numpy as np
from numba import njit

from .kernel import KernelSpec, w_prime, w_value
from .neighbors import CellIndex, build_cell_index, _all_neighbors_core
from .wcsph import FluidConstants

__all__ = [
    "solid_particle_volume",
    "interparticle_velocity",
    "body_particle_accelerations",
    "body_particle_pressures",
    "update_body_pressures",
    "shear_coupling_accel",
    "pressure_coupling_accel",
    "continuity_coupling",
    "coupling_rhs",
    "coupling_accel",
]


def solid_particle_volume(m_0: float, rho_ref: float, dx: float, dx_s: float,
                          dimension: int = 3) -> float:
    """Volume carried by one body particle in the coupling sums [m^3].

    The fluid particle volume m_0/rho_ref shrinks by the spacing ratio
    to the domain dimension, so a body lattice twice as fine carries an
    eighth of the fluid volume per particle in 3D.
    """
    if not (np.isfinite(m_0) and m_0 > 0.0):
        raise ValueError(f"fluid particle mass must be positive, got {m_0}")
    if not (np.isfinite(rho_ref) and rho_ref > 0.0):
        raise ValueError(f"reference density must be positive, got {rho_ref}")
    if not (np.isfinite(dx) and dx > 0.0 and np.isfinite(dx_s) and dx_s > 0.0):
        raise ValueError(f"spacings must be positive, got dx={dx}, dx_s={dx_s}")
    if dimension not in (2, 3):
        raise ValueError(f"dimension must be 2 or 3, got {dimension}")
    return (m_0 / rho_ref) / (dx / dx_s) ** dimension


def interparticle_velocity(u_0, u_s, n_s=None, slip: str = "no-slip"):
    """Fluid velocity reconstructed on the body side of the interface.

    No-slip reflects the full relative velocity (2 u_s - u_0); free-slip
    reflects only the component along the interface normal `n_s` and
    keeps the tangential part of u_0.  Accepts single vectors or (n, 3)
    rows.
    """
    u0 = np.atleast_2d(np.asarray(u_0, dtype=np.float64))
    us = np.atleast_2d(np.asarray(u_s, dtype=np.float64))
    if slip == "no-slip":
        out = 2.0 * us - u0
    elif slip == "free-slip":
        if n_s is None:
            raise ValueError("free-slip reconstruction needs interface normals")
        n = np.atleast_2d(np.asarray(n_s, dtype=np.float64))
        du_n = np.sum((us - u0) * n, axis=1)
        out = u0 + 2.0 * du_n[:, None] * n
    else:
        raise ValueError(f"slip mode must be 'no-slip' or 'free-slip', got {slip!r}")
    return out[0] if np.asarray(u_0).ndim == 1 else out


def body_particle_accelerations(body, a_cm, chi_dot) -> np.ndarray:
    """Wall acceleration at each body particle for the pressure closure.

    Rigid kinematics: a_cm + chi_dot x r + chi x (chi x r), with r the
    world-frame particle offsets from the CM.  Steady translation passes
    zeros for both vector inputs.
    """
    a_cm = np.asarray(a_cm, dtype=np.float64)
    chi_dot = np.asarray(chi_dot, dtype=np.float64)
    rel = body.particles.rel
    spin = np.cross(body.chi, np.cross(body.chi, rel))
    return a_cm + np.cross(chi_dot, rel) + spin


def _body_neighbor_lists(query_pos, index: CellIndex, spec: KernelSpec,
                         what: str):
    if index.radius < spec.support_radius * (1.0 - 1e-12):
        raise ValueError(f"{what} index radius {index.radius} is below the "
                         f"kernel support {spec.support_radius}")
    return _all_neighbors_core(
        query_pos, spec.support_radius, False, index.positions, index.origin,
        index.cell_size, index.ncells, index.periodic, index.extent,
        index.cell_start, index.order)


@njit(cache=True)
def _shepard_pressure_core(body_pos, body_acc, body_n, project, fluid_pos,
                           fluid_p, fluid_rho, fluid_m, starts, ids, extent,
                           periodic, h, gravity):
    n = body_pos.shape[0]
    p_s = np.zeros(n)
    wet = np.zeros(n, dtype=np.bool_)
    for s in range(n):
        num = 0.0
        den = 0.0
        bx = gravity[0] - body_acc[s, 0]
        by = gravity[1] - body_acc[s, 1]
        bz = gravity[2] - body_acc[s, 2]
        if project:
            # keep only the wall-normal part of the correction slope
            dot = bx * body_n[s, 0] + by * body_n[s, 1] + bz * body_n[s, 2]
            bx = dot * body_n[s, 0]
            by = dot * body_n[s, 1]
            bz = dot * body_n[s, 2]
        for k in range(starts[s], starts[s + 1]):
            j = ids[k]
            # r_{s,0} = x_s - x_0 with minimum-image wrapping
            dx = body_pos[s, 0] - fluid_pos[j, 0]
            dy = body_pos[s, 1] - fluid_pos[j, 1]
            dz = body_pos[s, 2] - fluid_pos[j, 2]
            if periodic[0]:
                dx -= extent[0] * np.round(dx / extent[0])
            if periodic[1]:
                dy -= extent[1] * np.round(dy / extent[1])
            if periodic[2]:
                dz -= extent[2] * np.round(dz / extent[2])
            r = np.sqrt(dx * dx + dy * dy + dz * dz)
            if project:
                dot = dx * body_n[s, 0] + dy * body_n[s, 1] + dz * body_n[s, 2]
                dx = dot * body_n[s, 0]
                dy = dot * body_n[s, 1]
                dz = dot * body_n[s, 2]
            w = w_value(r, h)
            if w == 0.0:
                continue
            weight = w * fluid_m[j] / fluid_rho[j]
            num += (fluid_p[j] + fluid_rho[j] * (bx * dx + by * dy + bz * dz)) * weight
            den += weight
        if den > 0.0:
            p_s[s] = num / den
            wet[s] = True
    return p_s, wet


def body_particle_pressures(body_positions, fluid_positions, fluid_pressures,
                            fluid_densities, fluid_masses, spec: KernelSpec,
                            gravity=(0.0, 0.0, 0.0), body_accelerations=None,
                            previous_pressures=None, index: CellIndex = None,
                            projection_normals=None, neighbors=None):
    """Shepard pressure of body particles from the neighboring fluid.

    Each fluid neighbor contributes its pressure corrected along the
    separation by rho_0 (g - a_s) . r_{s,0}, normalized by the kernel
    volume sum, which reproduces any affine pressure field exactly when
    g - a_s matches its gradient over rho.  Particles with no fluid
    neighbor keep `previous_pressures` (zero by default) and come back
    flagged False in the wetted mask.

    `projection_normals` switches to the sensitivity variant that keeps
    only the wall-normal part of the correction, using the given unit
    normals per body particle.  `neighbors` takes prebuilt (starts, ids)
    lists of fluid neighbors per body particle and skips the search.
    """
    bpos = np.ascontiguousarray(np.atleast_2d(body_positions), dtype=np.float64)
    fpos = np.ascontiguousarray(np.atleast_2d(fluid_positions), dtype=np.float64)
    fp = np.ascontiguousarray(np.atleast_1d(fluid_pressures), dtype=np.float64)
    frho = np.ascontiguousarray(np.atleast_1d(fluid_densities), dtype=np.float64)
    fm = np.ascontiguousarray(np.atleast_1d(fluid_masses), dtype=np.float64)
    n_s, n_f = bpos.shape[0], fpos.shape[0]
    for arr, want, what in ((bpos, (n_s, 3), "body positions"),
                            (fpos, (n_f, 3), "fluid positions"),
                            (fp, (n_f,), "fluid pressures"),
                            (frho, (n_f,), "fluid densities"),
                            (fm, (n_f,), "fluid masses")):
        if arr.shape != want:
            raise ValueError(f"{what} must have shape {want}, got {arr.shape}")
    if body_accelerations is None:
        bacc = np.zeros((n_s, 3))
    else:
        bacc = np.ascontiguousarray(np.atleast_2d(body_accelerations), dtype=np.float64)
        if bacc.shape != (n_s, 3):
            raise ValueError(f"body accelerations must have shape {(n_s, 3)}, "
                             f"got {bacc.shape}")
    if previous_pressures is None:
        p_s = np.zeros(n_s)
    else:
        p_s = np.array(np.atleast_1d(previous_pressures), dtype=np.float64)
        if p_s.shape != (n_s,):
            raise ValueError(f"previous pressures must have shape {(n_s,)}, "
                             f"got {p_s.shape}")
    if projection_normals is None:
        bn = np.zeros((n_s, 3))
    else:
        bn = np.ascontiguousarray(np.atleast_2d(projection_normals), dtype=np.float64)
        if bn.shape != (n_s, 3):
            raise ValueError(f"projection normals must have shape {(n_s, 3)}, "
                             f"got {bn.shape}")
    if n_s == 0 or n_f == 0:
        return p_s, np.zeros(n_s, dtype=bool)

    if index is None:
        pad = spec.support_radius
        index = build_cell_index(fpos, spec.support_radius,
                                 fpos.min(axis=0) - pad, fpos.max(axis=0) + pad)
    if index.positions.shape[0] != n_f:
        raise ValueError("fluid index does not match the fluid arrays")
    if neighbors is None:
        starts, ids = _body_neighbor_lists(bpos, index, spec, "fluid")
    else:
        starts, ids = neighbors
        if starts.shape != (n_s + 1,):
            raise ValueError("neighbor lists do not match the body arrays")
    fresh, wet = _shepard_pressure_core(
        bpos, bacc, bn, projection_normals is not None, index.positions,
        fp, frho, fm, starts, ids, index.extent, index.periodic, spec.h_sph,
        np.asarray(gravity, dtype=np.float64))
    p_s[wet] = fresh[wet]
    return p_s, wet


def update_body_pressures(body, fluid_positions, fluid_pressures,
                          fluid_densities, fluid_masses, spec: KernelSpec,
                          gravity=(0.0, 0.0, 0.0), body_accelerations=None,
                          index: CellIndex = None, neighbors=None) -> np.ndarray:
    """Refresh `body.particles.pressures` in place; returns the wet mask.

    Unwetted particles hold their previous pressure, and the persistent
    `wetted` flags only ever turn on.
    """
    p = body.particles
    p_s, wet = body_particle_pressures(
        p.pos, fluid_positions, fluid_pressures, fluid_densities, fluid_masses,
        spec, gravity=gravity, body_accelerations=body_accelerations,
        previous_pressures=p.pressures, index=index, neighbors=neighbors)
    p.pressures = p_s
    p.wetted = p.wetted | wet
    return wet


@njit(cache=True)
def _coupling_core(pos, vel, rho, p, body_pos, body_vel, body_p, body_n, omega,
                   starts, ids, extent, periodic, h, nu, rho_ref, eps_r2,
                   no_slip, with_pressure, with_shear, with_continuity):
    n = pos.shape[0]
    drho = np.zeros(n)
    acc = np.zeros((n, 3))
    for i in range(n):
        rho_i = rho[i]
        pk_i = p[i] / (rho_i * rho_i)
        for k in range(starts[i], starts[i + 1]):
            s = ids[k]
            dx = body_pos[s, 0] - pos[i, 0]
            dy = body_pos[s, 1] - pos[i, 1]
            dz = body_pos[s, 2] - pos[i, 2]
            if periodic[0]:
                dx -= extent[0] * np.round(dx / extent[0])
            if periodic[1]:
                dy -= extent[1] * np.round(dy / extent[1])
            if periodic[2]:
                dz -= extent[2] * np.round(dz / extent[2])
            r2 = dx * dx + dy * dy + dz * dz
            r = np.sqrt(r2)
            wp = w_prime(r, h)
            if wp == 0.0:
                continue
            gx = wp * dx / r
            gy = wp * dy / r
            gz = wp * dz / r

            # mirrored velocity difference u_{s0} - u_0
            dux = 2.0 * (body_vel[s, 0] - vel[i, 0])
            duy = 2.0 * (body_vel[s, 1] - vel[i, 1])
            duz = 2.0 * (body_vel[s, 2] - vel[i, 2])
            if not no_slip:
                dot = dux * body_n[s, 0] + duy * body_n[s, 1] + duz * body_n[s, 2]
                dux = dot * body_n[s, 0]
                duy = dot * body_n[s, 1]
                duz = dot * body_n[s, 2]

            if with_continuity:
                drho[i] += 2.0 * rho_i * omega[s] * (dux * gx + duy * gy + duz * gz)

            if with_pressure:
                cp = rho_ref * omega[s] * (body_p[s] / (rho_i * rho_i) + pk_i)
                acc[i, 0] += cp * gx
                acc[i, 1] += cp * gy
                acc[i, 2] += cp * gz

            if with_shear and nu != 0.0:
                cv = 2.0 * nu * omega[s] * (-wp) * r / (r2 + eps_r2)
                acc[i, 0] += cv * dux
                acc[i, 1] += cv * duy
                acc[i, 2] += cv * duz
    return drho, acc


def _coupling_terms(positions, velocities, densities, pressures,
                    constants: FluidConstants, spec: KernelSpec,
                    body_positions, body_velocities, body_pressures, omega,
                    body_normals, slip: str, index: CellIndex,
                    with_pressure: bool, with_shear: bool, with_continuity: bool,
                    neighbors=None):
    pos = np.ascontiguousarray(np.atleast_2d(positions), dtype=np.float64)
    vel = np.ascontiguousarray(np.atleast_2d(velocities), dtype=np.float64)
    rho = np.ascontiguousarray(np.atleast_1d(densities), dtype=np.float64)
    p = np.ascontiguousarray(np.atleast_1d(pressures), dtype=np.float64)
    bpos = np.ascontiguousarray(np.atleast_2d(body_positions), dtype=np.float64)
    bvel = np.ascontiguousarray(np.atleast_2d(body_velocities), dtype=np.float64)
    n, n_s = pos.shape[0], bpos.shape[0]
    bp = np.zeros(n_s) if body_pressures is None else \
        np.ascontiguousarray(np.atleast_1d(body_pressures), dtype=np.float64)
    om = np.ascontiguousarray(np.atleast_1d(omega), dtype=np.float64)
    if om.shape == ():
        om = np.full(n_s, float(om))
    for arr, want, what in ((pos, (n, 3), "positions"), (vel, (n, 3), "velocities"),
                            (rho, (n,), "densities"), (p, (n,), "pressures"),
                            (bpos, (n_s, 3), "body positions"),
                            (bvel, (n_s, 3), "body velocities"),
                            (bp, (n_s,), "body pressures"),
                            (om, (n_s,), "body volumes")):
        if arr.shape != want:
            raise ValueError(f"{what} must have shape {want}, got {arr.shape}")
    if slip not in ("no-slip", "free-slip"):
        raise ValueError(f"slip mode must be 'no-slip' or 'free-slip', got {slip!r}")
    if slip == "free-slip":
        if body_normals is None:
            raise ValueError("free-slip coupling needs body normals")
        bn = np.ascontiguousarray(np.atleast_2d(body_normals), dtype=np.float64)
        if bn.shape != (n_s, 3):
            raise ValueError(f"body normals must have shape {(n_s, 3)}, got {bn.shape}")
    else:
        bn = np.zeros((n_s, 3))
    if n == 0 or n_s == 0:
        return np.zeros(n), np.zeros((n, 3))

    if index is None:
        pad = spec.support_radius
        index = build_cell_index(bpos, spec.support_radius,
                                 bpos.min(axis=0) - pad, bpos.max(axis=0) + pad)
    if index.positions.shape[0] != n_s:
        raise ValueError("body index does not match the body arrays")
    if neighbors is None:
        starts, ids = _body_neighbor_lists(pos, index, spec, "body")
    else:
        starts, ids = neighbors
        if starts.shape != (n + 1,):
            raise ValueError("neighbor lists do not match the fluid arrays")
    return _coupling_core(pos, vel, rho, p, index.positions, bvel, bp, bn, om,
                          starts, ids, index.extent, index.periodic, spec.h_sph,
                          constants.nu, constants.rho_ref, constants.eps_r2,
                          slip == "no-slip", with_pressure, with_shear,
                          with_continuity)


def shear_coupling_accel(positions, velocities, densities,
                         constants: FluidConstants, spec: KernelSpec,
                         body_positions, body_velocities, omega,
                         body_normals=None, slip: str = "no-slip",
                         index: CellIndex = None, neighbors=None) -> np.ndarray:
    """Viscous drag on the fluid from nearby body particles [m/s^2].

    2 nu sum_s (u_{s0} - u_0)/r |dW/dr| omega_s: with the mirrored
    velocity this doubles to the same strength as a resolved fluid layer
    moving with the wall, the body-particle analog of the wall shear
    factor on analytic frontiers.
    """
    n = np.atleast_2d(positions).shape[0]
    _, acc = _coupling_terms(positions, velocities, densities, np.zeros(n),
                             constants, spec, body_positions, body_velocities,
                             None, omega, body_normals, slip, index,
                             False, True, False, neighbors)
    return acc


def pressure_coupling_accel(positions, velocities, densities, pressures,
                            constants: FluidConstants, spec: KernelSpec,
                            body_positions, body_pressures, omega,
                            index: CellIndex = None, neighbors=None) -> np.ndarray:
    """Pressure acceleration on the fluid from body particles [m/s^2].

    sum_s (p_s + p_0)/rho_0^2 grad W m_s with the fluid-equivalent body
    mass m_s = rho_ref omega_s; positive pressures push the fluid off
    the body.
    """
    n_s = np.atleast_2d(body_positions).shape[0]
    _, acc = _coupling_terms(positions, velocities, densities, pressures,
                             constants, spec, body_positions,
                             np.zeros((n_s, 3)), body_pressures, omega,
                             None, "no-slip", index, True, False, False,
                             neighbors)
    return acc


def continuity_coupling(positions, velocities, densities,
                        constants: FluidConstants, spec: KernelSpec,
                        body_positions, body_velocities, omega,
                        body_normals=None, slip: str = "no-slip",
                        index: CellIndex = None, neighbors=None) -> np.ndarray:
    """Density source from body motion, 2 rho_0 sum_s (u_{s0} - u_0) . grad W omega_s.

    An approaching wall compresses the fluid (positive), a receding wall
    rarefies it; comoving bodies contribute nothing.
    """
    n = np.atleast_2d(positions).shape[0]
    drho, _ = _coupling_terms(positions, velocities, densities, np.zeros(n),
                              constants, spec, body_positions, body_velocities,
                              None, omega, body_normals, slip, index,
                              False, False, True, neighbors)
    return drho


def coupling_rhs(positions, velocities, densities, pressures,
                 constants: FluidConstants, spec: KernelSpec,
                 body_positions, body_velocities, body_pressures, omega,
                 body_normals=None, slip: str = "no-slip",
                 index: CellIndex = None, neighbors=None):
    """All body-particle contributions to (drho/dt, du/dt) in one pass.

    Fuses the continuity source, the pressure acceleration and the shear
    acceleration over a single neighbor sweep.  Pass a prebuilt `index`
    over the body positions to reuse the neighbor grid; its periodicity
    carries into the pair distances.
    """
    return _coupling_terms(positions, velocities, densities, pressures,
                           constants, spec, body_positions, body_velocities,
                           body_pressures, omega, body_normals, slip, index,
                           True, True, True, neighbors)


def coupling_accel(positions, velocities, densities, pressures,
                   constants: FluidConstants, spec: KernelSpec,
                   body_positions, body_velocities, body_pressures, omega,
                   body_normals=None, slip: str = "no-slip",
                   index: CellIndex = None, neighbors=None) -> np.ndarray:
    """Pressure plus shear acceleration in one sweep, skipping continuity.

    The staggered integrator takes accelerations and the density source
    at different velocity levels, so fusing all three as `coupling_rhs`
    does would waste the unused term; this keeps the momentum pass lean.
    """
    _, acc = _coupling_terms(positions, velocities, densities, pressures,
                             constants, spec, body_positions, body_velocities,
                             body_pressures, omega, body_normals, slip, index,
                             True, True, False, neighbors)
    return acc
