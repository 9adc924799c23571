"""Rigid bodies: particle discretization, surface loading, and motion.

A rigid body is discretized into a lattice of body particles at a finer
spacing than the fluid.  Particles on the outer faces carry an area and
a unit normal pointing out of the fluid domain (into the body), so the
hydrodynamic thrust is the plain sum p_s A_s n_s over the wetted
surface; viscous surface traction is neglected against pressure, which
is the thin-film regime where pressure exceeds shear by the
length-to-gap ratio.

Free bodies advance by leapfrog Euler-Newton dynamics with the
gyroscopic term evaluated in the body frame, where the inertia tensor
is constant.  Prescribed bodies follow a kinematic schedule exactly and
still load the fluid through the coupling terms.  Orientation is
tracked as a rotation matrix accumulated from per-step increments
R_x(da_x) R_y(da_y) R_z(da_z) with da = chi dt; body-particle state is
always recomputed from the time-zero configuration through the
accumulated rotation, so the body can never creep out of rigidity.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KINEMATIC_MODES = ("free", "prescribed")


def compute_inertia_tensor(rel_positions, masses) -> np.ndarray:
    """Inertia tensor about the CM from point masses, sum m (|r|^2 I - r r)."""
    r = np.atleast_2d(np.asarray(rel_positions, dtype=np.float64))
    m = np.atleast_1d(np.asarray(masses, dtype=np.float64))
    if r.shape != (m.size, 3):
        raise ValueError(f"need matching (n, 3) positions and (n,) masses, "
                         f"got {r.shape} and {m.shape}")
    total = float(np.sum(m))
    if not (np.isfinite(total) and total > 0.0):
        raise ValueError(f"total body mass must be positive, got {total}")
    r2 = np.sum(r * r, axis=1)
    return np.sum(m * r2) * np.eye(3) - np.einsum("k,ki,kj->ij", m, r, r)


def rotation_matrix(dalpha) -> np.ndarray:
    """Composed rotation R_x(da_x) R_y(da_y) R_z(da_z) for angles dalpha [rad]."""
    ax, ay, az = np.asarray(dalpha, dtype=np.float64)
    cx, sx = np.cos(ax), np.sin(ax)
    cy, sy = np.cos(ay), np.sin(ay)
    cz, sz = np.cos(az), np.sin(az)
    rx = np.array([[1.0, 0.0, 0.0], [0.0, cx, -sx], [0.0, sx, cx]])
    ry = np.array([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]])
    rz = np.array([[cz, -sz, 0.0], [sz, cz, 0.0], [0.0, 0.0, 1.0]])
    return rx @ ry @ rz


def axis_rotation_matrix(axis, angle: float) -> np.ndarray:
    """Rotation by `angle` about an arbitrary unit `axis` (Rodrigues form)."""
    n = np.asarray(axis, dtype=np.float64)
    if n.shape != (3,) or abs(np.linalg.norm(n) - 1.0) > 1e-9:
        raise ValueError("rotation axis must be a unit 3-vector")
    k = np.array([[0.0, -n[2], n[1]], [n[2], 0.0, -n[0]], [-n[1], n[0], 0.0]])
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


@dataclass
class BodyParticles:
    """Particle discretization of one rigid body (structure of arrays).

    The time-zero configuration (`rel0`, `normals0`) is immutable; the
    world-frame state is recomputed from it after every motion update.
    Interior particles carry zero area and a zero normal row.
    """

    rel0: np.ndarray        # (n, 3) offsets from the CM at time zero [m]
    normals0: np.ndarray    # (n, 3) unit normals out of the fluid, zero rows inside
    masses: np.ndarray      # (n,) [kg]
    volumes: np.ndarray     # (n,) [m^3]
    areas: np.ndarray       # (n,) surface patch area, zero inside [m^2]
    is_surface: np.ndarray  # (n,) bool
    pos: np.ndarray = None        # (n, 3) world positions [m]
    rel: np.ndarray = None        # (n, 3) world offsets from the CM [m]
    vel: np.ndarray = None        # (n, 3) world velocities [m/s]
    normals: np.ndarray = None    # (n, 3) world normals
    pressures: np.ndarray = None  # (n,) surface pressures [Pa]
    wetted: np.ndarray = None     # (n,) bool, pressure ever updated from fluid

    def __post_init__(self) -> None:
        n = self.rel0.shape[0]
        if self.pos is None:
            self.pos = self.rel0.copy()
            self.rel = self.rel0.copy()
            self.vel = np.zeros((n, 3))
            self.normals = self.normals0.copy()
            self.pressures = np.zeros(n)
            self.wetted = np.zeros(n, dtype=bool)

    def __len__(self) -> int:
        return self.rel0.shape[0]


@dataclass
class RigidBody:
    """State of one rigid body and its particle discretization."""

    mass: float                 # total mass m_B [kg]
    inertia: np.ndarray         # (3, 3) inertia about the CM, body frame [kg m^2]
    x_cm: np.ndarray            # (3,) CM position [m]
    u_cm: np.ndarray            # (3,) CM velocity [m/s]
    chi: np.ndarray             # (3,) angular velocity, world frame [rad/s]
    alpha: np.ndarray           # (3,) accumulated rotation angles [rad]
    orientation: np.ndarray     # (3, 3) rotation, body frame to world
    particles: BodyParticles
    mode: str = "free"          # one of KINEMATIC_MODES
    schedule: object = None     # kinematic schedule for prescribed mode

    def __post_init__(self) -> None:
        for name in ("x_cm", "u_cm", "chi", "alpha"):
            v = np.asarray(getattr(self, name), dtype=np.float64)
            if v.shape != (3,) or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be a finite 3-vector")
            setattr(self, name, v.copy())
        if not (np.isfinite(self.mass) and self.mass > 0.0):
            raise ValueError(f"body mass must be positive, got {self.mass}")
        inertia = np.asarray(self.inertia, dtype=np.float64)
        if inertia.shape != (3, 3) or not np.all(np.isfinite(inertia)):
            raise ValueError("inertia tensor must be a finite 3x3 matrix")
        if np.max(np.abs(inertia - inertia.T)) > 1e-12 * max(np.max(np.abs(inertia)), 1e-300):
            raise ValueError("inertia tensor must be symmetric")
        self.inertia = inertia
        if self.mode not in KINEMATIC_MODES:
            raise ValueError(f"kinematic mode must be one of {KINEMATIC_MODES}, got {self.mode!r}")
        if self.mode == "prescribed" and self.schedule is None:
            raise ValueError("prescribed mode needs a schedule")
        msum = float(np.sum(self.particles.masses))
        if abs(msum - self.mass) > 1e-12 * self.mass:
            raise ValueError(f"body-particle masses sum to {msum}, expected {self.mass}")
        self.refresh_particles()

    def refresh_particles(self) -> None:
        """Recompute world-frame particle state from CM state and orientation."""
        p = self.particles
        p.rel = p.rel0 @ self.orientation.T
        p.pos = self.x_cm + p.rel
        p.normals = p.normals0 @ self.orientation.T
        p.vel = self.u_cm + np.cross(self.chi, p.rel)


def total_force(body: RigidBody, gravity=(0.0, 0.0, 0.0), contact=None) -> np.ndarray:
    """Net force: weight plus the pressure thrust sum p_s A_s n_s [N].

    Normals point out of the fluid, so positive film pressure pushes the
    body away from the fluid.  Viscous surface traction is omitted; an
    optional `contact` force covers solid-solid interaction.
    """
    p = body.particles
    s = p.is_surface
    thrust = np.sum((p.pressures[s] * p.areas[s])[:, None] * p.normals[s], axis=0)
    f = body.mass * np.asarray(gravity, dtype=np.float64) + thrust
    if contact is not None:
        f = f + np.asarray(contact, dtype=np.float64)
    return f


def total_torque(body: RigidBody) -> np.ndarray:
    """Net torque about the CM from the surface pressure thrust [N m]."""
    p = body.particles
    s = p.is_surface
    f_s = (p.pressures[s] * p.areas[s])[:, None] * p.normals[s]
    return np.sum(np.cross(p.rel[s], f_s), axis=0)


def advance_body(body: RigidBody, f_tot, m_tot, dt: float) -> RigidBody:
    """Leapfrog step of the free-body Euler-Newton equations.

    `u_cm` and `chi` are treated as half-step (staggered) quantities:
    both are advanced first with the forces at the current time, then
    positions and orientation move with the new values.  The angular
    update solves the gyroscopic Euler equation
    d(chi)/dt = I^-1 [M - chi x (I chi)] in the body frame with the
    implicit midpoint rule, whose fixed point preserves every quadratic
    invariant of that equation: for torque-free motion the rotational
    energy and the angular momentum magnitude hold to round-off at any
    step size.  The orientation then turns through d(alpha) =
    chi_mid * dt and the world angular velocity is re-expressed in the
    rotated frame, so no transport term is ever applied twice.
    """
    if body.mode != "free":
        raise ValueError(f"advance_body needs a free body, got mode {body.mode!r}")
    f_tot = np.asarray(f_tot, dtype=np.float64)
    m_tot = np.asarray(m_tot, dtype=np.float64)
    r = body.orientation

    body.u_cm = body.u_cm + (dt / body.mass) * f_tot
    body.x_cm = body.x_cm + dt * body.u_cm

    chi_b = r.T @ body.chi
    torque_b = r.T @ m_tot
    try:
        inertia_inv = np.linalg.inv(body.inertia)
    except np.linalg.LinAlgError as err:
        raise ValueError("singular inertia tensor: the body cannot rotate freely "
                         "in 3D; fix the discretization or prescribe its motion") from err

    def rate(chi: np.ndarray) -> np.ndarray:
        # gyroscopic Euler equation in the body frame
        return inertia_inv @ (torque_b - np.cross(chi, body.inertia @ chi))

    # implicit midpoint: conserves the rotational energy and the angular
    # momentum magnitude exactly for torque-free motion
    chi_new = chi_b + dt * rate(chi_b)
    for _ in range(50):
        step = chi_b + dt * rate(0.5 * (chi_b + chi_new))
        done = np.max(np.abs(step - chi_new)) <= 1e-13 * max(1.0, np.max(np.abs(chi_b)))
        chi_new = step
        if done:
            break

    dalpha = (r @ (0.5 * (chi_b + chi_new))) * dt
    r_new = rotation_matrix(dalpha) @ r
    # store through the new frame so the next step recovers chi_new exactly
    body.chi = r_new @ chi_new
    body.orientation = r_new
    body.alpha = body.alpha + dalpha
    body.refresh_particles()
    return body


def apply_prescribed_motion(body: RigidBody, schedule, t: float) -> RigidBody:
    """Set the body to the exact scheduled state at time t.

    The schedule provides (x_cm, u_cm, alpha, chi, orientation); the
    fluid keeps feeling the body through the coupling terms.
    """
    if body.mode != "prescribed":
        raise ValueError(f"apply_prescribed_motion needs a prescribed body, got mode {body.mode!r}")
    if schedule is None:
        schedule = body.schedule
    x_cm, u_cm, alpha, chi, orientation = schedule.state(t)
    body.x_cm = np.asarray(x_cm, dtype=np.float64)
    body.u_cm = np.asarray(u_cm, dtype=np.float64)
    body.alpha = np.asarray(alpha, dtype=np.float64)
    body.chi = np.asarray(chi, dtype=np.float64)
    body.orientation = np.asarray(orientation, dtype=np.float64)
    body.refresh_particles()
    return body


@dataclass(frozen=True)
class ConstantVelocitySchedule:
    """Cruise at a constant velocity with no rotation."""

    x_cm0: np.ndarray     # (3,) CM position at t = 0 [m]
    velocity: np.ndarray  # (3,) [m/s]

    def __post_init__(self) -> None:
        for name in ("x_cm0", "velocity"):
            v = np.asarray(getattr(self, name), dtype=np.float64)
            if v.shape != (3,) or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, v)

    def state(self, t: float):
        _check_schedule_time(t)
        return (self.x_cm0 + self.velocity * t, self.velocity.copy(),
                np.zeros(3), np.zeros(3), np.eye(3))

    def acceleration(self, t: float) -> np.ndarray:
        _check_schedule_time(t)
        return np.zeros(3)


@dataclass(frozen=True)
class TiltRampSchedule:
    """Cruise plus an initial rigid tilt about a co-moving pivot line.

    The body translates at constant velocity throughout.  During the
    first `ramp_time` it additionally rotates, linearly in time, about
    the pivot line through `x_cm0 + velocity t + pivot_offset` directed
    along `axis`, reaching `tilt_angle` at the end of the ramp and
    staying there.  The pivot is a material point: its trajectory stays
    a pure translation, so a pivot on a plate edge keeps that edge's
    height fixed while the rest of the plate swings.
    """

    x_cm0: np.ndarray         # (3,) CM position at t = 0 [m]
    velocity: np.ndarray      # (3,) translation velocity [m/s]
    ramp_time: float          # tilt duration from t = 0 [s]
    tilt_angle: float         # final signed rotation about `axis` [rad]
    axis: np.ndarray          # (3,) unit rotation axis
    pivot_offset: np.ndarray  # (3,) pivot minus CM at t = 0 [m]

    def __post_init__(self) -> None:
        for name in ("x_cm0", "velocity", "axis", "pivot_offset"):
            v = np.asarray(getattr(self, name), dtype=np.float64)
            if v.shape != (3,) or not np.all(np.isfinite(v)):
                raise ValueError(f"{name} must be a finite 3-vector")
            object.__setattr__(self, name, v)
        if abs(np.linalg.norm(self.axis) - 1.0) > 1e-9:
            raise ValueError("tilt axis must be a unit vector")
        if not (np.isfinite(self.ramp_time) and self.ramp_time > 0.0):
            raise ValueError(f"ramp time must be positive, got {self.ramp_time}")
        if not np.isfinite(self.tilt_angle):
            raise ValueError("tilt angle must be finite")

    def _theta(self, t: float) -> float:
        return self.tilt_angle * min(t / self.ramp_time, 1.0)

    def state(self, t: float):
        _check_schedule_time(t)
        theta = self._theta(t)
        rot = axis_rotation_matrix(self.axis, theta)
        base = self.x_cm0 + self.velocity * t
        x_cm = base + (np.eye(3) - rot) @ self.pivot_offset
        if t < self.ramp_time:
            chi = (self.tilt_angle / self.ramp_time) * self.axis
            u_cm = self.velocity + np.cross(chi, x_cm - (base + self.pivot_offset))
        else:
            chi = np.zeros(3)
            u_cm = self.velocity.copy()
        return x_cm, u_cm, theta * self.axis, chi, rot

    def acceleration(self, t: float) -> np.ndarray:
        """CM acceleration (centripetal during the ramp, zero after)."""
        _check_schedule_time(t)
        if t >= self.ramp_time:
            return np.zeros(3)
        x_cm, _, _, chi, _ = self.state(t)
        pivot = self.x_cm0 + self.velocity * t + self.pivot_offset
        return np.cross(chi, np.cross(chi, x_cm - pivot))


def _check_schedule_time(t: float) -> None:
    if not (np.isfinite(t) and t >= 0.0):
        raise ValueError(f"schedule time must be non-negative, got {t}")


def make_box_body(size, spacing: float, mass: float, x_cm=(0.0, 0.0, 0.0),
                  mode: str = "free", schedule=None) -> RigidBody:
    """Uniform box of body particles centered on the CM.

    `size` rounds to whole lattice cells per axis (the effective edge is
    count * spacing).  Outer-layer particles are surface particles with
    patch area spacing^2 and inward unit normals; particles on edges and
    corners get the normalized sum of their face normals, so the closed
    surface still sums to zero thrust under uniform pressure.
    """
    size = np.asarray(size, dtype=np.float64)
    if size.shape != (3,) or not np.all(np.isfinite(size)) or np.any(size <= 0.0):
        raise ValueError(f"box size must be three positive lengths, got {size}")
    if not (np.isfinite(spacing) and spacing > 0.0):
        raise ValueError(f"particle spacing must be positive, got {spacing}")
    if not (np.isfinite(mass) and mass > 0.0):
        raise ValueError(f"body mass must be positive, got {mass}")
    counts = np.maximum(np.rint(size / spacing).astype(int), 1)
    axes = [(np.arange(c) + 0.5 - 0.5 * c) * spacing for c in counts]
    gx, gy, gz = np.meshgrid(*axes, indexing="ij")
    rel0 = np.column_stack([gx.ravel(), gy.ravel(), gz.ravel()])
    n = rel0.shape[0]

    normals0 = np.zeros((n, 3))
    ii = np.stack(np.meshgrid(*[np.arange(c) for c in counts], indexing="ij"),
                  axis=-1).reshape(n, 3)
    for ax in range(3):
        lo = ii[:, ax] == 0
        hi = ii[:, ax] == counts[ax] - 1
        normals0[lo, ax] += 1.0   # inward, away from the fluid below this face
        normals0[hi, ax] -= 1.0
    norms = np.linalg.norm(normals0, axis=1)
    is_surface = norms > 0.0
    normals0[is_surface] /= norms[is_surface, None]

    masses = np.full(n, mass / n)
    particles = BodyParticles(
        rel0=rel0, normals0=normals0, masses=masses,
        volumes=np.full(n, spacing ** 3),
        areas=np.where(is_surface, spacing ** 2, 0.0),
        is_surface=is_surface)
    inertia = compute_inertia_tensor(rel0, masses)
    return RigidBody(mass=mass, inertia=inertia, x_cm=np.asarray(x_cm, dtype=np.float64),
                     u_cm=np.zeros(3), chi=np.zeros(3), alpha=np.zeros(3),
                     orientation=np.eye(3), particles=particles,
                     mode=mode, schedule=schedule)
