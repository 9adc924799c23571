"""Tests for rigid-body dynamics: inertia, thrust sums, free rotation, schedules."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filmsph.bodies import (
    ConstantVelocitySchedule,
    TiltRampSchedule,
    advance_body,
    apply_prescribed_motion,
    axis_rotation_matrix,
    compute_inertia_tensor,
    make_box_body,
    rotation_matrix,
    total_force,
    total_torque,
)
from filmsph.lubrication import SliderSpec, generalized_load_capacity, generalized_pressure

RNG = np.random.default_rng(20260218)

angle = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


def reference_thrust(body):
    """Plain-loop pressure force and torque over the surface particles."""
    force = np.zeros(3)
    torque = np.zeros(3)
    p = body.particles
    for s in range(len(p)):
        if not p.is_surface[s]:
            continue
        f_s = p.pressures[s] * p.areas[s] * p.normals[s]
        force += f_s
        torque += np.cross(p.rel[s], f_s)
    return force, torque


def spinning_top(chi=(0.3, 0.0, 5.0)):
    """Axisymmetric box and its analytic free-precession period."""
    body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
    body.chi = np.array(chi, dtype=np.float64)
    i1, i3 = body.inertia[0, 0], body.inertia[2, 2]
    period = 2.0 * np.pi * i1 / ((i3 - i1) * chi[2]) if chi[2] else np.inf
    return body, period


class TestRotationMatrices:
    def test_quarter_turn_axis_images(self):
        assert np.allclose(rotation_matrix([0, 0, np.pi / 2]) @ [1, 0, 0],
                           [0, 1, 0], atol=1e-15)
        assert np.allclose(rotation_matrix([np.pi / 2, 0, 0]) @ [0, 1, 0],
                           [0, 0, 1], atol=1e-15)
        assert np.allclose(rotation_matrix([0, np.pi / 2, 0]) @ [0, 0, 1],
                           [1, 0, 0], atol=1e-15)

    def test_composition_order_is_x_then_y_then_z(self):
        a, b, c = 0.3, -1.1, 2.4
        rx = rotation_matrix([a, 0, 0])
        ry = rotation_matrix([0, b, 0])
        rz = rotation_matrix([0, 0, c])
        assert np.allclose(rotation_matrix([a, b, c]), rx @ ry @ rz, atol=1e-15)

    @given(angle, angle, angle)
    @settings(max_examples=50, deadline=None)
    def test_always_a_proper_rotation(self, a, b, c):
        r = rotation_matrix([a, b, c])
        assert np.max(np.abs(r.T @ r - np.eye(3))) < 1e-14
        assert abs(np.linalg.det(r) - 1.0) < 1e-14

    def test_axis_rotation_matches_single_axis_form(self):
        for ax, vec in enumerate(np.eye(3)):
            dalpha = np.zeros(3)
            dalpha[ax] = 0.7
            assert np.allclose(axis_rotation_matrix(vec, 0.7),
                               rotation_matrix(dalpha), atol=1e-15)

    def test_axis_rotation_fixes_its_axis(self):
        axis = np.array([1.0, 2.0, -2.0]) / 3.0
        r = axis_rotation_matrix(axis, 1.9)
        assert np.allclose(r @ axis, axis, atol=1e-15)
        assert np.max(np.abs(r.T @ r - np.eye(3))) < 1e-14

    def test_axis_must_be_unit_length(self):
        with pytest.raises(ValueError, match="unit"):
            axis_rotation_matrix([1.0, 1.0, 0.0], 0.5)


class TestInertiaTensor:
    def test_point_masses_at_origin_carry_no_inertia(self):
        inertia = compute_inertia_tensor(np.zeros((4, 3)), np.ones(4))
        assert np.all(inertia == 0.0)

    def test_mirrored_pair_matches_hand_values(self):
        rel = np.array([[0.0, 2.0, 0.0], [0.0, -2.0, 0.0]])
        inertia = compute_inertia_tensor(rel, np.full(2, 1.5))
        # each point: m*(y^2) on the x and z axes, nothing about y
        assert np.allclose(inertia, np.diag([12.0, 0.0, 12.0]), atol=1e-15)

    def test_box_lattice_closed_form(self):
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        # second moment of a centered lattice of n cells: (edge^2 - spacing^2)/12
        s2 = 0.1 ** 2
        expected = 5.0 / 12.0 * np.diag([
            2.0 ** 2 + 1.0 ** 2 - 2 * s2,
            2.0 ** 2 + 1.0 ** 2 - 2 * s2,
            2.0 ** 2 + 2.0 ** 2 - 2 * s2,
        ])
        assert np.allclose(body.inertia, expected, rtol=1e-12, atol=1e-15)

    def test_box_lattice_near_continuum(self):
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        continuum = 5.0 / 12.0 * np.diag([5.0, 5.0, 8.0])
        assert np.max(np.abs(body.inertia - continuum)) < 0.01 * continuum[0, 0]

    def test_rotation_transforms_by_similarity(self):
        rel = RNG.normal(size=(40, 3))
        masses = RNG.uniform(0.5, 2.0, size=40)
        r = rotation_matrix([0.4, -1.2, 2.2])
        direct = compute_inertia_tensor(rel @ r.T, masses)
        assert np.allclose(direct, r @ compute_inertia_tensor(rel, masses) @ r.T,
                           rtol=1e-10, atol=1e-12)

    def test_rejects_empty_and_mismatched_input(self):
        with pytest.raises(ValueError):
            compute_inertia_tensor(np.zeros((0, 3)), np.zeros(0))
        with pytest.raises(ValueError):
            compute_inertia_tensor(np.zeros((3, 3)), np.zeros(2))


class TestMakeBoxBody:
    def test_counts_and_masses(self):
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        p = body.particles
        assert len(p) == 20 * 20 * 10
        assert int(np.sum(p.is_surface)) == 20 * 20 * 10 - 18 * 18 * 8
        assert abs(np.sum(p.masses) - 5.0) < 1e-12 * 5.0
        assert np.all(p.volumes == 0.1 ** 3)

    def test_interior_particles_carry_no_surface_data(self):
        p = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0).particles
        inner = ~p.is_surface
        assert np.all(p.areas[inner] == 0.0)
        assert np.all(p.normals0[inner] == 0.0)
        assert np.all(p.areas[p.is_surface] == 0.1 ** 2)

    def test_bottom_face_normals_point_up_into_the_body(self):
        p = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0).particles
        face = ((p.rel0[:, 2] == np.min(p.rel0[:, 2]))
                & (np.abs(p.rel0[:, 0]) < 0.9) & (np.abs(p.rel0[:, 1]) < 0.9))
        assert int(np.sum(face)) == 18 * 18
        assert np.allclose(p.normals0[face], [0.0, 0.0, 1.0], atol=0.0)

    def test_closed_surface_sums_to_zero_thrust(self):
        p = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0).particles
        resultant = np.sum(p.areas[:, None] * p.normals0, axis=0)
        assert np.max(np.abs(resultant)) < 1e-12

    def test_single_layer_slab_stays_finite(self):
        p = make_box_body([1.0, 1.0, 0.1], 0.1, 5.0).particles
        assert np.all(np.isfinite(p.normals0))

    def test_rejects_bad_geometry(self):
        with pytest.raises(ValueError, match="size"):
            make_box_body([1.0, -1.0, 1.0], 0.1, 5.0)
        with pytest.raises(ValueError, match="spacing"):
            make_box_body([1.0, 1.0, 1.0], 0.0, 5.0)
        with pytest.raises(ValueError, match="mass"):
            make_box_body([1.0, 1.0, 1.0], 0.1, -5.0)


class TestThrust:
    def test_matches_reference_loop_with_random_pressures(self):
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        body.chi = np.array([0.4, -0.8, 1.3])
        body.orientation = rotation_matrix([0.5, -0.3, 1.7])
        body.refresh_particles()
        body.particles.pressures = RNG.uniform(-2.0e5, 6.0e5, size=len(body.particles))
        f_ref, m_ref = reference_thrust(body)
        f = total_force(body)
        m = total_torque(body)
        assert np.allclose(f, f_ref, rtol=1e-12, atol=1e-12 * np.max(np.abs(f_ref)))
        assert np.allclose(m, m_ref, rtol=1e-12, atol=1e-12 * np.max(np.abs(m_ref)))

    def test_uniform_pressure_on_a_closed_box_cancels(self):
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        body.particles.pressures[:] = 3.0e5
        # thrust scale of one face: p * A
        scale = 3.0e5 * 2.0 * 2.0
        assert np.max(np.abs(total_force(body))) < 1e-12 * scale
        assert np.max(np.abs(total_torque(body))) < 1e-12 * scale

    def test_gravity_weighs_the_whole_body(self):
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        g = (0.0, 0.0, -9.81)
        assert np.allclose(total_force(body, gravity=g), 5.0 * np.asarray(g),
                           rtol=1e-15, atol=0.0)

    def test_contact_force_adds_through(self):
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        contact = np.array([1.0, -2.0, 3.0])
        assert np.allclose(total_force(body, contact=contact), contact,
                           rtol=1e-15, atol=0.0)

    def test_pressurized_bottom_face_pushes_straight_up(self):
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        p = body.particles
        face = np.all(p.normals0 == [0.0, 0.0, 1.0], axis=1)
        p.pressures[face] = 2.5e5
        force = total_force(body)
        assert np.allclose(force, [0.0, 0.0, 2.5e5 * 0.1 ** 2 * 18 * 18],
                           rtol=1e-12, atol=0.0)

    def test_single_offset_patch_torque_matches_cross_product(self):
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        p = body.particles
        face = np.all(p.normals0 == [0.0, 0.0, 1.0], axis=1)
        s = np.flatnonzero(face)[7]
        p.pressures[s] = 1.0e5
        f_s = 1.0e5 * p.areas[s] * p.normals[s]
        assert np.allclose(total_torque(body), np.cross(p.rel[s], f_s),
                           rtol=1e-15, atol=0.0)

    def test_slider_pressure_profile_lifts_with_the_analytic_load(self):
        spec = SliderSpec(L=4.24e-4, h0=1.68e-5, k=0.25, mu=0.319, rho=900.0,
                          u_s1=50.0, u_s2=0.0)
        spacing = spec.L / 100.0
        body = make_box_body([spec.L, 10 * spacing, 2 * spacing], spacing, 1.0e-6)
        p = body.particles
        face = np.all(p.normals0 == [0.0, 0.0, 1.0], axis=1)
        x_film = p.rel0[face, 0] + 0.5 * spec.L   # deep edge at the -x end
        p.pressures[face] = generalized_pressure(spec, x_film)
        lift = total_force(body)[2]
        # the interior face tiles [spacing, L - spacing] x 8 rows of cells
        x_fine = np.linspace(spacing, spec.L - spacing, 20001)
        covered = np.trapezoid(generalized_pressure(spec, x_fine), x_fine)
        assert abs(lift - 8 * spacing * covered) < 5e-4 * abs(8 * spacing * covered)
        # and the full analytic load per width bounds it from above
        l_c, _ = generalized_load_capacity(spec)
        assert 0.9 * l_c * 8 * spacing < lift < l_c * 10 * spacing


class TestAdvanceBody:
    def test_force_free_flight_is_a_straight_line(self):
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        body.u_cm = np.array([3.0, -2.0, 1.0])
        zero = np.zeros(3)
        for _ in range(100):
            advance_body(body, zero, zero, 0.01)
        assert np.allclose(body.x_cm, body.u_cm * 1.0, rtol=1e-13, atol=1e-15)
        assert np.all(body.orientation == np.eye(3))

    def test_constant_force_parabola_is_exact(self):
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        force = np.array([2.0, 0.0, -9.0])
        accel = force / body.mass
        dt, n = 0.01, 100
        u0 = np.array([1.0, 2.0, 0.5])
        # staggered start: stored velocity lives half a step behind
        body.u_cm = u0 - 0.5 * dt * accel
        for _ in range(n):
            advance_body(body, force, np.zeros(3), dt)
        t = n * dt
        exact = u0 * t + 0.5 * accel * t ** 2
        assert np.allclose(body.x_cm, exact, rtol=1e-12, atol=1e-15)
        assert np.allclose(body.u_cm, u0 + accel * (t - 0.5 * dt), rtol=1e-12)

    def test_free_precession_conserves_spin_and_energy(self):
        body, period = spinning_top()
        dt = period / 200.0
        zero = np.zeros(3)

        def invariants():
            chi_b = body.orientation.T @ body.chi
            l_b = body.inertia @ chi_b
            return (np.linalg.norm(body.chi),
                    0.5 * chi_b @ l_b,
                    np.linalg.norm(body.orientation @ l_b),
                    chi_b[2],
                    np.hypot(chi_b[0], chi_b[1]))

        start = np.array(invariants())
        drift = np.zeros(5)
        for _ in range(1000):
            advance_body(body, zero, zero, dt)
            drift = np.maximum(drift, np.abs(np.array(invariants()) / start - 1.0))
        # far inside the 1e-3 conservation budget: all five are round-off flat
        assert np.max(drift) < 1e-9

    def test_free_precession_tracks_the_analytic_rate(self):
        errs = []
        for steps in (100, 200):
            body, period = spinning_top()
            i1, i3 = body.inertia[0, 0], body.inertia[2, 2]
            rate = (i3 - i1) / i1 * 5.0
            dt = period / steps
            zero = np.zeros(3)
            for _ in range(steps):
                advance_body(body, zero, zero, dt)
            t = steps * dt
            exact = np.array([0.3 * np.cos(rate * t), -0.3 * np.sin(rate * t), 5.0])
            errs.append(np.linalg.norm(body.orientation.T @ body.chi - exact))
        assert errs[1] < 2e-4           # measured 1.55e-4 after one full turn
        assert errs[0] / errs[1] > 3.5  # second-order convergence

    def test_constant_axial_torque_spins_up_linearly(self):
        body, _ = spinning_top(chi=(0.0, 0.0, 0.0))
        i3 = body.inertia[2, 2]
        torque = np.array([0.0, 0.0, 0.7])
        dt, n = 0.01, 200
        for _ in range(n):
            advance_body(body, np.zeros(3), torque, dt)
        t = n * dt
        assert np.allclose(body.chi, [0.0, 0.0, 0.7 / i3 * t], rtol=1e-12, atol=1e-15)
        # orientation integrates the midpoint rate: exact for a linear ramp
        assert abs(body.alpha[2] - 0.5 * 0.7 / i3 * t ** 2) < 1e-12

    def test_long_runs_keep_the_body_rigid(self):
        body, period = spinning_top()
        zero = np.zeros(3)
        p = body.particles
        d0 = np.linalg.norm(p.pos[0] - p.pos[-1])
        for _ in range(1000):
            advance_body(body, zero, zero, period / 200.0)
        r = body.orientation
        assert np.max(np.abs(r.T @ r - np.eye(3))) < 1e-12
        assert abs(np.linalg.norm(p.pos[0] - p.pos[-1]) - d0) < 1e-12 * d0
        assert np.allclose(np.linalg.norm(p.rel, axis=1),
                           np.linalg.norm(p.rel0, axis=1), rtol=1e-12)

    def test_particle_velocities_follow_the_spin(self):
        body, _ = spinning_top()
        body.u_cm = np.array([1.0, 0.0, 0.0])
        body.refresh_particles()
        p = body.particles
        assert np.allclose(p.vel, body.u_cm + np.cross(body.chi, p.rel),
                           rtol=1e-15, atol=0.0)

    def test_prescribed_bodies_refuse_free_integration(self):
        schedule = ConstantVelocitySchedule(np.zeros(3), np.zeros(3))
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0,
                             mode="prescribed", schedule=schedule)
        with pytest.raises(ValueError, match="free"):
            advance_body(body, np.zeros(3), np.zeros(3), 0.01)

    def test_singular_inertia_is_rejected(self):
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        body.inertia = np.diag([1.0, 1.0, 0.0])
        with pytest.raises(ValueError, match="singular"):
            advance_body(body, np.zeros(3), np.zeros(3), 0.01)


class TestConstantVelocitySchedule:
    def test_state_translates_uniformly(self):
        schedule = ConstantVelocitySchedule([1.0, 0.0, 2.0], [50.0, 0.0, 0.0])
        x_cm, u_cm, alpha, chi, rot = schedule.state(0.3)
        assert np.allclose(x_cm, [16.0, 0.0, 2.0], rtol=1e-15)
        assert np.allclose(u_cm, [50.0, 0.0, 0.0], rtol=1e-15)
        assert np.all(alpha == 0.0) and np.all(chi == 0.0)
        assert np.all(rot == np.eye(3))
        assert np.all(schedule.acceleration(0.3) == 0.0)

    def test_rejects_negative_time(self):
        schedule = ConstantVelocitySchedule(np.zeros(3), np.ones(3))
        with pytest.raises(ValueError, match="non-negative"):
            schedule.state(-1e-9)

    def test_apply_prescribed_motion_moves_the_particles(self):
        schedule = ConstantVelocitySchedule(np.zeros(3), [50.0, 0.0, 0.0])
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0,
                             mode="prescribed", schedule=schedule)
        apply_prescribed_motion(body, schedule, 0.1)
        p = body.particles
        assert np.allclose(body.x_cm, [5.0, 0.0, 0.0], rtol=1e-15)
        assert np.allclose(p.pos, p.rel0 + [5.0, 0.0, 0.0], rtol=1e-15, atol=0.0)
        assert np.allclose(p.vel, [50.0, 0.0, 0.0], rtol=1e-15, atol=0.0)

    def test_free_bodies_refuse_schedules(self):
        schedule = ConstantVelocitySchedule(np.zeros(3), np.zeros(3))
        body = make_box_body([2.0, 2.0, 1.0], 0.1, 5.0)
        with pytest.raises(ValueError, match="prescribed"):
            apply_prescribed_motion(body, schedule, 0.0)


class TestTiltRampSchedule:
    # plate pivoting about its leading bottom edge while cruising in +x
    L = 4.24e-4            # plate length [m]
    TP = 4.2e-6            # plate thickness [m]
    H0 = 1.68e-5           # shallow-end film depth [m]
    K = 0.25               # fractional extra depth at the deep end
    RAMP = 3.0e-7          # tilt duration [s]

    def make(self):
        tilt = -np.arctan(self.K * self.H0 / self.L)
        return TiltRampSchedule(
            x_cm0=np.zeros(3),
            velocity=np.array([50.0, 0.0, 0.0]),
            ramp_time=self.RAMP,
            tilt_angle=tilt,
            axis=np.array([0.0, 1.0, 0.0]),
            pivot_offset=np.array([0.5 * self.L, 0.0, -0.5 * self.TP]),
        ), tilt

    def material_height(self, schedule, rel0, t):
        x_cm, _, _, _, rot = schedule.state(t)
        return (x_cm + rot @ rel0)[2]

    def test_starts_from_the_untilted_state(self):
        schedule, tilt = self.make()
        x_cm, u_cm, alpha, chi, rot = schedule.state(0.0)
        assert np.all(x_cm == 0.0)
        assert np.all(rot == np.eye(3)) and np.all(alpha == 0.0)
        assert np.allclose(chi, [0.0, tilt / self.RAMP, 0.0], rtol=1e-15)
        # the CM swings about the pivot line from the first instant
        assert np.allclose(u_cm, [50.0, 0.0, 0.0]
                           + np.cross(chi, -schedule.pivot_offset), rtol=1e-14)

    def test_pivot_edge_height_never_moves(self):
        schedule, _ = self.make()
        pivot = schedule.pivot_offset
        z0 = self.material_height(schedule, pivot, 0.0)
        for t in (0.1e-7, 1.5e-7, 2.99e-7, 3.0e-7, 6.0e-6):
            assert abs(self.material_height(schedule, pivot, t) - z0) < 1e-15 * self.L

    def test_barycentre_drops_half_the_taper_depth(self):
        schedule, _ = self.make()
        x_cm, _, _, _, _ = schedule.state(self.RAMP)
        drop = x_cm[2]
        # thickness equals the taper depth, so the two tilt terms combine
        # into exactly half of it
        assert abs(drop + 0.5 * self.K * self.H0) < 1e-8 * self.K * self.H0

    def test_trailing_edge_drops_the_full_taper_depth(self):
        schedule, _ = self.make()
        trailing = np.array([-0.5 * self.L, 0.0, -0.5 * self.TP])
        z0 = self.material_height(schedule, trailing, 0.0)
        drop = self.material_height(schedule, trailing, self.RAMP) - z0
        assert abs(drop + self.K * self.H0) < 1e-4 * self.K * self.H0

    def test_reaches_the_commanded_tilt_and_holds_it(self):
        schedule, tilt = self.make()
        for t in (self.RAMP, 2.0 * self.RAMP, 6.0e-6):
            _, u_cm, alpha, chi, rot = schedule.state(t)
            assert abs(np.arcsin(rot[0, 2]) - tilt) < 1e-12 * abs(tilt)
            assert np.allclose(alpha, [0.0, tilt, 0.0], rtol=1e-15)
            if t > self.RAMP:
                assert np.all(chi == 0.0)
                assert np.allclose(u_cm, [50.0, 0.0, 0.0], rtol=1e-15)

    def test_velocity_is_the_time_derivative_of_position(self):
        schedule, _ = self.make()
        eps = 1e-4 * self.RAMP
        for t in (0.5 * self.RAMP, 0.9 * self.RAMP, 1.5 * self.RAMP):
            hi, _, _, _, _ = schedule.state(t + eps)
            lo, _, _, _, _ = schedule.state(t - eps)
            fd = (hi - lo) / (2.0 * eps)
            _, u_cm, _, _, _ = schedule.state(t)
            assert np.allclose(u_cm, fd, rtol=1e-6, atol=1e-6 * np.max(np.abs(u_cm)))

    def test_acceleration_is_the_time_derivative_of_velocity(self):
        schedule, _ = self.make()
        eps = 1e-4 * self.RAMP
        t = 0.5 * self.RAMP
        _, hi, _, _, _ = schedule.state(t + eps)
        _, lo, _, _, _ = schedule.state(t - eps)
        fd = (hi - lo) / (2.0 * eps)
        acc = schedule.acceleration(t)
        assert np.allclose(acc, fd, rtol=1e-5, atol=1e-5 * np.max(np.abs(acc)))
        assert np.all(schedule.acceleration(2.0 * self.RAMP) == 0.0)

    def test_prescribed_plate_particles_follow_the_ramp(self):
        schedule, _ = self.make()
        spacing = self.TP / 4.0
        body = make_box_body([self.L, 4.2e-5, self.TP], spacing, 1.0e-6,
                             mode="prescribed", schedule=schedule)
        t = 0.5 * self.RAMP
        apply_prescribed_motion(body, schedule, t)
        s = len(body.particles) // 3
        eps = 1e-4 * self.RAMP
        rel0 = body.particles.rel0[s]
        x_cm_hi, _, _, _, rot_hi = schedule.state(t + eps)
        x_cm_lo, _, _, _, rot_lo = schedule.state(t - eps)
        fd = ((x_cm_hi + rot_hi @ rel0) - (x_cm_lo + rot_lo @ rel0)) / (2.0 * eps)
        assert np.allclose(body.particles.vel[s], fd,
                           rtol=1e-5, atol=1e-5 * np.max(np.abs(fd)))

    def test_rejects_bad_parameters(self):
        with pytest.raises(ValueError, match="unit"):
            TiltRampSchedule(np.zeros(3), np.zeros(3), 1.0, 0.1,
                             np.array([0.0, 2.0, 0.0]), np.zeros(3))
        with pytest.raises(ValueError, match="ramp"):
            TiltRampSchedule(np.zeros(3), np.zeros(3), 0.0, 0.1,
                             np.array([0.0, 1.0, 0.0]), np.zeros(3))
        schedule, _ = self.make()
        with pytest.raises(ValueError, match="non-negative"):
            schedule.state(-1e-12)
