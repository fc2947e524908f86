import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from kitefusion import attitude
from kitefusion.attitude import (
    GRAVITY,
    accel_to_inertial,
    body_rates_between,
    quat_derivative,
    quat_propagate,
    quat_to_rot,
    rot_to_quat,
)
from kitefusion.errors import DomainError


def random_unit_quat(rng):
    q = rng.normal(size=4)
    return q / np.linalg.norm(q)


def quat_angle(qa, qb):
    """Rotation angle between two unit quaternions, sign-insensitive."""
    return 2.0 * math.acos(min(1.0, abs(float(np.dot(qa, qb)))))


class TestQuatToRot:
    def test_identity(self):
        assert_allclose(quat_to_rot([1.0, 0.0, 0.0, 0.0]), np.eye(3), atol=1e-15)

    def test_quarter_turn_about_z(self):
        s = math.sqrt(2.0) / 2.0
        expected = np.array([
            [0.0, -1.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
        ])
        assert_allclose(quat_to_rot([s, 0.0, 0.0, s]), expected, atol=1e-15)

    def test_orthonormal_proper(self):
        rng = np.random.default_rng(21)
        for _ in range(200):
            R = quat_to_rot(random_unit_quat(rng))
            assert_allclose(R @ R.T, np.eye(3), atol=1e-12)
            assert np.linalg.det(R) == pytest.approx(1.0, abs=1e-12)

    def test_double_cover(self):
        rng = np.random.default_rng(22)
        q = random_unit_quat(rng)
        assert_allclose(quat_to_rot(q), quat_to_rot(-q), atol=1e-15)

    def test_non_unit_rejected(self):
        with pytest.raises(DomainError):
            quat_to_rot([1.0, 0.0, 0.1, 0.0])


class TestRotToQuat:
    def test_round_trip(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            q = random_unit_quat(rng)
            if q[0] < 0:
                q = -q
            assert_allclose(rot_to_quat(quat_to_rot(q)), q, atol=1e-12)

    @pytest.mark.parametrize("q", [
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
        [0.5, 0.5, 0.5, 0.5],
    ])
    def test_half_turn_pivots(self, q):
        # Half turns have zero scalar part and exercise the non-trace pivots.
        R = quat_to_rot(q)
        assert_allclose(quat_to_rot(rot_to_quat(R)), R, atol=1e-12)

    def test_canonical_sign(self):
        rng = np.random.default_rng(24)
        for _ in range(50):
            assert rot_to_quat(quat_to_rot(random_unit_quat(rng)))[0] >= 0.0


class TestQuatDerivative:
    def test_zero_rates(self):
        rng = np.random.default_rng(25)
        q = random_unit_quat(rng)
        assert_allclose(quat_derivative(q, [0.0, 0.0, 0.0]), np.zeros(4), atol=1e-15)

    def test_roll_rate_at_identity(self):
        dq = quat_derivative([1.0, 0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
        assert_allclose(dq, [0.0, 0.5, 0.0, 0.0], atol=1e-15)

    def test_derivative_orthogonal_to_quat(self):
        # Norm preservation of the kinematics: d/dt |q|^2 = 2 q . qdot = 0.
        rng = np.random.default_rng(26)
        for _ in range(200):
            q = random_unit_quat(rng)
            w = rng.normal(size=3) * 3.0
            assert abs(float(q @ quat_derivative(q, w))) < 1e-12


class TestQuatPropagate:
    def test_zero_rates_fixed_point(self):
        rng = np.random.default_rng(27)
        q = random_unit_quat(rng)
        assert_allclose(quat_propagate(q, [0.0, 0.0, 0.0], 0.02), q, atol=1e-15)

    def test_quarter_turn_in_thousand_steps(self):
        q = np.array([1.0, 0.0, 0.0, 0.0])
        w = [0.0, 0.0, math.pi / 2.0]
        for _ in range(1000):
            q = quat_propagate(q, w, 1e-3)
        s = math.sqrt(2.0) / 2.0
        assert quat_angle(q, [s, 0.0, 0.0, s]) < 1e-4

    def test_matches_fine_rk4_integration(self):
        rng = np.random.default_rng(28)
        for _ in range(5):
            q0 = random_unit_quat(rng)
            w = rng.normal(size=3) * 2.0
            dt = 0.5
            q_exp = quat_propagate(q0, w, dt)
            # Independent route: Runge-Kutta on the kinematic ODE.
            n = 1000
            h = dt / n
            q = q0.copy()
            for _ in range(n):
                k1 = quat_derivative(q, w)
                k2 = quat_derivative(q + 0.5 * h * k1, w)
                k3 = quat_derivative(q + 0.5 * h * k2, w)
                k4 = quat_derivative(q + h * k3, w)
                q = q + h / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            q /= np.linalg.norm(q)
            assert quat_angle(q, q_exp) < 1e-9

    def test_norm_drift_over_a_million_steps(self):
        w = np.deg2rad([200.0, 0.0, 0.0])
        q = np.array([1.0, 0.0, 0.0, 0.0])
        for _ in range(1_000_000):
            q = quat_propagate(q, w, 0.02)
        assert abs(np.linalg.norm(q) - 1.0) < 1e-9


class TestBodyRatesBetween:
    def test_round_trip(self):
        rng = np.random.default_rng(29)
        for _ in range(200):
            q0 = random_unit_quat(rng)
            w = rng.normal(size=3) * 4.0
            dt = rng.uniform(0.005, 0.05)
            q1 = quat_propagate(q0, w, dt)
            if float(q0 @ q1) < 0:
                q1 = -q1
            assert_allclose(body_rates_between(q0, q1, dt), w, atol=1e-9)

    def test_identical_quaternions(self):
        rng = np.random.default_rng(30)
        q = random_unit_quat(rng)
        assert_allclose(body_rates_between(q, q, 0.02), np.zeros(3), atol=1e-12)


class TestAccelToInertial:
    def test_stationary_wing_reads_gravity(self):
        a = accel_to_inertial([0.0, 0.0, GRAVITY], [1.0, 0.0, 0.0, 0.0], 0.0)
        assert_allclose(a, np.zeros(3), atol=1e-12)

    def test_stationary_any_heading(self):
        rng = np.random.default_rng(31)
        for _ in range(50):
            a = accel_to_inertial([0.0, 0.0, GRAVITY], [1.0, 0.0, 0.0, 0.0],
                                  rng.uniform(-math.pi, math.pi))
            assert_allclose(a, np.zeros(3), atol=1e-12)

    def test_forward_thrust_aligned_frames(self):
        # K aligned with NED, downwind axis on north: body x maps to +X in G.
        a = accel_to_inertial([2.0, 0.0, GRAVITY], [1.0, 0.0, 0.0, 0.0], 0.0)
        assert_allclose(a, [2.0, 0.0, 0.0], atol=1e-12)

    def test_linearity_in_specific_force(self):
        rng = np.random.default_rng(32)
        q = random_unit_quat(rng)
        a1 = rng.normal(size=3)
        a2 = rng.normal(size=3)
        phi_g = 0.4
        lhs = accel_to_inertial(a1 + a2, q, phi_g)
        rhs = (accel_to_inertial(a1, q, phi_g) + accel_to_inertial(a2, q, phi_g)
               - np.array([0.0, 0.0, GRAVITY]))
        assert_allclose(lhs, rhs, atol=1e-12)

    def test_non_unit_rejected(self):
        with pytest.raises(DomainError):
            accel_to_inertial([0.0, 0.0, GRAVITY], [1.0, 0.1, 0.0, 0.0], 0.0)
