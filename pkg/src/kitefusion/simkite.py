"""Synthetic figure-eight flights with a realistic sensor suite.

The wing rides the tether sphere on a Lissajous pattern: the elevation
oscillates at twice the azimuth frequency, which traces the familiar
lying-eight of crosswind operation.  Position, velocity, acceleration,
attitude and velocity angle all come from closed-form derivatives of the
pattern, so the truth channel is exact and independent of any estimator.

The attitude convention points the body x axis along the velocity and
the body z axis down the tether toward the ground station; that keeps
the wing flying "nose first" the way a rigid kite actually does.

:func:`synthesize` turns a pattern plus a noise budget into the sample
stream consumed by the estimation pipelines: a 50 Hz IMU and attitude
channel, delayed low-rate horizontal satellite fixes, a quantized
barometric height at its own rate, and line-angle encoder readings
obtained by numerically inverting the ground-station geometry for every
tick.  Faster flights come from a pure time dilation of the pattern, so
one knob scales every speed and acceleration together.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .attitude import GRAVITY, body_rates_between, quat_to_rot, rot_to_quat
from .errors import DegenerateInputError, DomainError
from .frames import rot_ned_to_g
from .lineangle import EncoderGeometry, angles_to_encoder
from .pipelines import SensorFrame

DEG = math.pi / 180.0


@dataclass(frozen=True)
class TrajectoryParams:
    """Figure-eight pattern on the tether sphere.

    The elevation runs at twice the azimuth frequency:

        theta(t) = theta0 + a_theta * sin(4 pi f s t + theta_phase)
        phi(t)   = phi0   + a_phi   * sin(2 pi f s t)

    with ``s`` the speed scale.  ``f_loop`` is the azimuth frequency at
    unit speed scale, i.e. full eights per second.

    Attributes
    ----------
    r : float
        Tether length, m.
    theta0, phi0 : float
        Pattern centre, rad.
    a_theta, a_phi : float
        Oscillation amplitudes, rad.
    f_loop : float
        Pattern frequency at unit speed scale, Hz.
    speed_scale : float
        Time-dilation factor; doubles every velocity when doubled.
    duration : float
        Length of the synthesized record, s.
    phi_g : float
        Heading of the ground frame's downwind axis in NED, rad.
    theta_phase : float
        Phase offset of the elevation oscillation, rad.  Zero gives the
        crossing eight; pi/2 degenerates the pattern into an arc.
    """

    r: float = 30.0
    theta0: float = 0.7
    phi0: float = 0.0
    a_theta: float = 0.15
    a_phi: float = 0.75
    f_loop: float = 0.16
    speed_scale: float = 1.0
    duration: float = 60.0
    phi_g: float = 0.0
    theta_phase: float = 0.0

    def __post_init__(self) -> None:
        if not self.r > 0.0:
            raise DomainError(f"tether length must be positive, got {self.r}")
        if not self.f_loop > 0.0 or not self.speed_scale > 0.0:
            raise DomainError("pattern frequency and speed scale must be positive")
        if not self.duration > 0.0:
            raise DomainError(f"duration must be positive, got {self.duration}")
        lo = self.theta0 - abs(self.a_theta)
        hi = self.theta0 + abs(self.a_theta)
        if not (0.0 < lo and hi < math.pi / 2.0):
            raise DomainError(
                "pattern must stay strictly inside the upwind hemisphere: "
                f"elevation sweeps [{lo}, {hi}]")


class TruthSample(NamedTuple):
    """Exact wing state at one instant: position, velocity and
    acceleration in the ground frame, attitude quaternion (body to NED,
    scalar first) and velocity angle."""

    t: float
    p: np.ndarray
    v: np.ndarray
    a: np.ndarray
    q: np.ndarray
    gamma: float


def _pattern_angles(params: TrajectoryParams, t: float):
    """Sphere angles and their first two time derivatives at ``t``."""
    s = params.speed_scale
    w_th = 4.0 * math.pi * params.f_loop * s
    w_ph = 2.0 * math.pi * params.f_loop * s
    arg_th = w_th * t + params.theta_phase
    arg_ph = w_ph * t
    th = params.theta0 + params.a_theta * math.sin(arg_th)
    thd = params.a_theta * w_th * math.cos(arg_th)
    thdd = -params.a_theta * w_th ** 2 * math.sin(arg_th)
    ph = params.phi0 + params.a_phi * math.sin(arg_ph)
    phd = params.a_phi * w_ph * math.cos(arg_ph)
    phdd = -params.a_phi * w_ph ** 2 * math.sin(arg_ph)
    return th, ph, thd, phd, thdd, phdd


def truth_at(params: TrajectoryParams, t: float) -> TruthSample:
    """Exact trajectory state at time ``t``.

    Raises
    ------
    DegenerateInputError
        If the pattern velocity vanishes at ``t`` (no flight direction to
        align the body frame with).
    """
    th, ph, thd, phd, thdd, phdd = _pattern_angles(params, t)
    r = params.r
    st, ct = math.sin(th), math.cos(th)
    sp, cp = math.sin(ph), math.cos(ph)
    p = r * np.array([ct * cp, ct * sp, st])
    v = r * np.array([-st * thd * cp - ct * sp * phd,
                      -st * thd * sp + ct * cp * phd,
                      ct * thd])
    a = r * np.array([
        -ct * cp * (thd ** 2 + phd ** 2) - st * cp * thdd
        + 2.0 * st * sp * thd * phd - ct * sp * phdd,
        -ct * sp * (thd ** 2 + phd ** 2) - st * sp * thdd
        - 2.0 * st * cp * thd * phd + ct * cp * phdd,
        -st * thd ** 2 + ct * thdd,
    ])
    speed = float(np.linalg.norm(v))
    if speed == 0.0:
        raise DegenerateInputError(f"pattern velocity vanishes at t={t}")
    # body x along the velocity, body z down the tether; y completes
    x_k = v / speed
    z_k = -p / r
    y_k = np.cross(z_k, x_k)
    rot_k_to_g = np.column_stack([x_k, y_k, z_k])
    rot_k_to_ned = rot_ned_to_g(params.phi_g) @ rot_k_to_g  # self-inverse map
    q = rot_to_quat(rot_k_to_ned)
    gamma = math.atan2(ct * phd, thd)
    return TruthSample(t, p, v, a, q, gamma)


@dataclass(frozen=True)
class NoiseSpec:
    """Noise and cadence budget of the sensor suite.

    Noise densities are converted to per-sample deviations with the
    sampling bandwidth (half the tick rate).  Bias limits are the half
    width of a uniform draw made once per record.  A rate of zero removes
    the channel entirely; a zero resolution or line count disables the
    corresponding quantization.

    Attributes
    ----------
    accel_density_g : float
        Accelerometer noise density, g/sqrt(Hz).
    accel_bias_g : float
        Accelerometer bias limit, g.
    gyro_density_dps : float
        Rate gyro noise density, (deg/s)/sqrt(Hz).
    gyro_bias_dps : float
        Rate gyro bias limit, deg/s.
    gyro_range_dps : float
        Rate gyro clipping range, deg/s; zero disables clipping.
    gps_sigma_xy : float
        Horizontal fix deviation per component, m.
    gps_rate : float
        Fix rate, Hz.
    gps_latency : float
        Delay between a fix being taken and arriving in the stream, s.
    baro_resolution : float
        Height quantization step, m.
    baro_rate : float
        Height sample rate, Hz.
    attitude_rms_deg : float
        Per-axis attitude error, deg RMS.
    encoder_cpr : int
        Line count of the angle encoders; zero for ideal readings.
    seed : int
        Seed of the generator used for every random draw.
    """

    accel_density_g: float = 2.5e-4
    accel_bias_g: float = 4e-3
    gyro_density_dps: float = 5e-2
    gyro_bias_dps: float = 0.1
    gyro_range_dps: float = 300.0
    gps_sigma_xy: float = 2.5
    gps_rate: float = 4.0
    gps_latency: float = 0.2
    baro_resolution: float = 0.2
    baro_rate: float = 9.0
    attitude_rms_deg: float = 1.0
    encoder_cpr: int = 400
    seed: int = 0

    @classmethod
    def none(cls, seed: int = 0) -> "NoiseSpec":
        """Ideal sensors: same cadences, no noise, no delay, no
        quantization."""
        return cls(accel_density_g=0.0, accel_bias_g=0.0,
                   gyro_density_dps=0.0, gyro_bias_dps=0.0,
                   gps_sigma_xy=0.0, gps_latency=0.0,
                   baro_resolution=0.0, attitude_rms_deg=0.0,
                   encoder_cpr=0, seed=seed)


def _small_rotation(delta: np.ndarray) -> np.ndarray:
    """Rotation matrix for the rotation vector ``delta`` (Rodrigues)."""
    angle = float(np.linalg.norm(delta))
    if angle == 0.0:
        return np.eye(3)
    kx, ky, kz = delta / angle
    K = np.array([[0.0, -kz, ky], [kz, 0.0, -kx], [-ky, kx, 0.0]])
    return np.eye(3) + math.sin(angle) * K + (1.0 - math.cos(angle)) * (K @ K)


def _arrival_tick(t: float, ts: float) -> int:
    """First tick index whose time is not before ``t``."""
    return math.ceil(t / ts - 1e-9)


def synthesize(params: TrajectoryParams = TrajectoryParams(),
               noise: NoiseSpec = NoiseSpec(),
               geometry: EncoderGeometry = EncoderGeometry(),
               ts: float = 0.02) -> tuple[list[SensorFrame], list[TruthSample]]:
    """Generate one flight record.

    Returns the sensor stream and the matching truth sequence, one entry
    per tick.  Satellite fixes carry the wing position at the moment the
    fix was taken but appear in the stream only after the configured
    latency; no channel is ever backdated.  Truth quaternions are kept
    sign-continuous from tick to tick so consumers can difference them.

    Parameters
    ----------
    params : TrajectoryParams
        Flight pattern.
    noise : NoiseSpec
        Sensor budget; use :meth:`NoiseSpec.none` for ideal sensors.
    geometry : EncoderGeometry
        Ground-station mechanism for the encoder channel.
    ts : float
        Tick period, s.
    """
    if not ts > 0.0:
        raise DomainError(f"tick period must be positive, got {ts}")
    n = int(round(params.duration / ts))
    rng = np.random.default_rng(noise.seed)
    bandwidth = 0.5 / ts
    sigma_accel = noise.accel_density_g * math.sqrt(bandwidth) * GRAVITY
    sigma_gyro = noise.gyro_density_dps * math.sqrt(bandwidth) * DEG
    accel_bias = rng.uniform(-noise.accel_bias_g, noise.accel_bias_g, 3) * GRAVITY
    gyro_bias = rng.uniform(-noise.gyro_bias_dps, noise.gyro_bias_dps, 3) * DEG

    gps_at: dict[int, np.ndarray] = {}
    if noise.gps_rate > 0.0:
        j = 0
        while True:
            t_fix = j / noise.gps_rate
            tick = _arrival_tick(t_fix + noise.gps_latency, ts)
            if tick >= n:
                break
            fix = truth_at(params, t_fix).p[:2] + rng.normal(0.0, noise.gps_sigma_xy, 2)
            gps_at[tick] = fix
            j += 1

    baro_at: dict[int, float] = {}
    if noise.baro_rate > 0.0:
        m = 0
        while True:
            t_fix = m / noise.baro_rate
            tick = _arrival_tick(t_fix, ts)
            if tick >= n:
                break
            z = float(truth_at(params, t_fix).p[2])
            if noise.baro_resolution > 0.0:
                z = math.floor(z / noise.baro_resolution + 0.5) * noise.baro_resolution
            baro_at[tick] = z
            m += 1

    truth: list[TruthSample] = []
    for k in range(n):
        sample = truth_at(params, k * ts)
        if k and float(truth[-1].q @ sample.q) < 0.0:
            sample = sample._replace(q=-sample.q)
        truth.append(sample)

    rates = [body_rates_between(truth[k].q, truth[k + 1].q, ts) for k in range(n - 1)]
    if n > 1:
        rates.insert(0, rates[0])
    else:
        rates = [np.zeros(3)]

    rot_n2g = rot_ned_to_g(params.phi_g)
    gravity_g = np.array([0.0, 0.0, GRAVITY])
    gyro_limit = noise.gyro_range_dps * DEG
    att_sigma = noise.attitude_rms_deg * DEG
    cpr = noise.encoder_cpr if noise.encoder_cpr else None
    warm = None

    frames: list[SensorFrame] = []
    for k, s in enumerate(truth):
        force_k = quat_to_rot(s.q).T @ (rot_n2g @ (s.a - gravity_g))
        accel_meas = force_k + accel_bias + rng.normal(0.0, sigma_accel, 3)
        gyro_meas = rates[k] + gyro_bias + rng.normal(0.0, sigma_gyro, 3)
        if gyro_limit > 0.0:
            gyro_meas = np.clip(gyro_meas, -gyro_limit, gyro_limit)
        tilt = _small_rotation(rng.normal(0.0, att_sigma, 3))
        quat_meas = rot_to_quat(quat_to_rot(s.q) @ tilt)
        th, ph, *_ = _pattern_angles(params, s.t)
        warm = angles_to_encoder(th, ph, geometry, counts_per_rev=cpr, initial=warm)
        frames.append(SensorFrame(
            t=s.t,
            accel_k=accel_meas,
            gyro_k=gyro_meas,
            quat=quat_meas,
            gps_xy=gps_at.get(k),
            baro_z=baro_at.get(k),
            encoder=warm,
            wind_speed=params.speed_scale,
        ))
    return frames, truth
