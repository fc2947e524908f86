import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from kitefusion import frames, lineangle
from kitefusion.errors import DegenerateInputError, DomainError, NonConvergenceError
from kitefusion.lineangle import (
    EncoderGeometry,
    EncoderReading,
    angles_to_encoder,
    angles_to_position,
    encoder_to_angles,
    quantize,
    resolution,
)

# Zero mounting offsets: the guide sits on the arm axis at unit reach and
# the pivot on the reference origin, so the encoders read the wing angles.
PASSTHROUGH = EncoderGeometry(guide_rise=0.0, guide_reach=1.0,
                              pivot_height=0.0, pivot_setback=0.0)

BENCH = EncoderGeometry(guide_rise=0.1, guide_reach=0.3,
                        pivot_height=0.05, pivot_setback=0.05)


class TestEncoderToAngles:
    def test_passthrough_geometry(self):
        theta, phi = encoder_to_angles(EncoderReading(0.5, 0.3), PASSTHROUGH)
        assert theta == pytest.approx(0.5, abs=1e-12)
        assert phi == pytest.approx(0.3, abs=1e-12)

    def test_bench_reference_point(self):
        # Reference values computed independently with 50-digit arithmetic
        # (mpmath) for theta_b=0.5, phi_b=0 on the BENCH geometry.
        theta, phi = encoder_to_angles(EncoderReading(0.5, 0.0), BENCH)
        assert theta == pytest.approx(0.38571792893616741, abs=1e-12)
        assert phi == 0.0

    def test_elevation_monotone_in_arm_angle(self):
        thetas = [encoder_to_angles(EncoderReading(tb, 0.2), BENCH)[0]
                  for tb in np.linspace(0.1, 1.2, 40)]
        assert np.all(np.diff(thetas) > 0)

    def test_vertical_tether_degenerate(self):
        geo = EncoderGeometry(guide_rise=0.0, guide_reach=0.1,
                              pivot_height=0.0, pivot_setback=0.1)
        with pytest.raises(DegenerateInputError):
            encoder_to_angles(EncoderReading(0.0, 0.0), geo)

    def test_geometry_validation(self):
        with pytest.raises(DomainError):
            EncoderGeometry(guide_rise=-0.1, guide_reach=0.3)
        with pytest.raises(DomainError):
            EncoderGeometry(guide_rise=0.0, guide_reach=0.0)


class TestAnglesToPosition:
    def test_matches_frame_transform(self):
        rng = np.random.default_rng(41)
        for _ in range(100):
            theta = rng.uniform(-math.pi / 2, math.pi / 2)
            phi = rng.uniform(-math.pi, math.pi)
            assert_allclose(angles_to_position(theta, phi, 30.0),
                            frames.spherical_to_cartesian(theta, phi, 30.0),
                            rtol=0.0, atol=0.0)

    def test_on_sphere_by_construction(self):
        rng = np.random.default_rng(42)
        for _ in range(200):
            p = angles_to_position(rng.uniform(-1.5, 1.5), rng.uniform(-3.1, 3.1), 30.0)
            assert np.linalg.norm(p) == pytest.approx(30.0, abs=1e-12)


class TestQuantize:
    def test_grid_multiples(self):
        step = resolution(400)
        reading = quantize(0.5, -1.234, 400)
        assert reading.theta_b / step == pytest.approx(round(reading.theta_b / step))
        assert reading.phi_b / step == pytest.approx(round(reading.phi_b / step))
        assert abs(reading.theta_b - 0.5) <= step / 2
        assert abs(reading.phi_b + 1.234) <= step / 2

    def test_resolution_value(self):
        assert resolution(400) == pytest.approx(2 * math.pi / 400)
        with pytest.raises(DomainError):
            resolution(0)


class TestAnglesToEncoder:
    def test_passthrough_unquantized(self):
        reading = angles_to_encoder(0.5, 0.3, PASSTHROUGH, counts_per_rev=None)
        assert reading.theta_b == pytest.approx(0.5, abs=1e-9)
        assert reading.phi_b == pytest.approx(0.3, abs=1e-9)

    def test_bench_inverse_unquantized(self):
        reading = angles_to_encoder(0.38571792893616741, 0.0, BENCH, counts_per_rev=None)
        assert reading.theta_b == pytest.approx(0.5, abs=1e-9)
        assert reading.phi_b == pytest.approx(0.0, abs=1e-9)

    def test_round_trip_within_one_count(self):
        rng = np.random.default_rng(43)
        step = resolution(400)
        for _ in range(300):
            theta = rng.uniform(0.2, 1.3)
            phi = rng.uniform(-2.5, 2.5)
            reading = angles_to_encoder(theta, phi, BENCH)
            theta2, phi2 = encoder_to_angles(reading, BENCH)
            assert abs(theta2 - theta) <= step
            assert abs(frames.wrap_angle(phi2 - phi)) <= step

    def test_warm_start_matches_cold_start(self):
        cold = angles_to_encoder(0.8, 0.4, BENCH, counts_per_rev=None)
        warm = angles_to_encoder(0.8, 0.4, BENCH, counts_per_rev=None,
                                 initial=EncoderReading(0.82, 0.38))
        assert cold.theta_b == pytest.approx(warm.theta_b, abs=1e-9)
        assert cold.phi_b == pytest.approx(warm.phi_b, abs=1e-9)

    def test_unreachable_angles_fail(self):
        # A large pivot height pushes the reachable elevations far from
        # level flight; asking for a level tether cannot converge.
        geo = EncoderGeometry(guide_rise=0.0, guide_reach=0.1,
                              pivot_height=5.0, pivot_setback=0.0)
        with pytest.raises(NonConvergenceError):
            angles_to_encoder(0.0, 0.0, geo)
