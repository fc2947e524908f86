"""Attitude representation and strapdown helpers.

Quaternions are unit length, scalar first: ``q = [q1, q2, q3, q4]`` with
``q1`` the scalar part.  ``quat_to_rot`` maps body (``K``) coordinates to
NED coordinates; the wing body frame has ``K_x`` out the nose, ``K_z``
through the belly.  Body angular rates are ``[wx, wy, wz]`` in rad/s about
the body axes.

The onboard unit fuses its own gyro and accelerometer into the attitude
quaternion; this package consumes that quaternion as a measurement and only
needs the kinematic relations below.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError
from .frames import rot_ned_to_g

#: Standard gravity in m/s^2 used to restore the gravitational acceleration
#: that an accelerometer does not sense.
GRAVITY = 9.80665

_UNIT_NORM_TOL = 1e-6


def _check_unit(q) -> None:
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if abs(n - 1.0) > _UNIT_NORM_TOL:
        raise DomainError(f"quaternion norm {n} departs from 1 beyond {_UNIT_NORM_TOL}")


def quat_to_rot(q: np.ndarray) -> np.ndarray:
    """Rotation matrix from body to NED coordinates.

    Parameters
    ----------
    q : array_like, shape (4,)
        Unit attitude quaternion, scalar first.

    Returns
    -------
    numpy.ndarray, shape (3, 3)
        Proper rotation matrix; columns are the body axes in NED.

    Raises
    ------
    DomainError
        If the quaternion norm departs from 1 by more than 1e-6.
    """
    _check_unit(q)
    q1, q2, q3, q4 = (float(c) for c in q)
    return np.array([
        [2.0 * (q1 * q1 + q2 * q2) - 1.0, 2.0 * (q2 * q3 - q1 * q4), 2.0 * (q2 * q4 + q1 * q3)],
        [2.0 * (q2 * q3 + q1 * q4), 2.0 * (q1 * q1 + q3 * q3) - 1.0, 2.0 * (q3 * q4 - q1 * q2)],
        [2.0 * (q2 * q4 - q1 * q3), 2.0 * (q3 * q4 + q1 * q2), 2.0 * (q1 * q1 + q4 * q4) - 1.0],
    ])


def rot_to_quat(R: np.ndarray) -> np.ndarray:
    """Unit quaternion (scalar first, scalar part >= 0) of a rotation matrix.

    Inverse of :func:`quat_to_rot` up to the quaternion sign ambiguity.
    Uses the largest of the four squared components as pivot for numerical
    robustness.
    """
    R = np.asarray(R, dtype=float)
    t = R[0, 0] + R[1, 1] + R[2, 2]
    choices = (t, R[0, 0], R[1, 1], R[2, 2])
    case = int(np.argmax(choices))
    if case == 0:
        s = math.sqrt(1.0 + t) * 2.0
        q = np.array([0.25 * s,
                      (R[2, 1] - R[1, 2]) / s,
                      (R[0, 2] - R[2, 0]) / s,
                      (R[1, 0] - R[0, 1]) / s])
    elif case == 1:
        s = math.sqrt(1.0 + R[0, 0] - R[1, 1] - R[2, 2]) * 2.0
        q = np.array([(R[2, 1] - R[1, 2]) / s,
                      0.25 * s,
                      (R[0, 1] + R[1, 0]) / s,
                      (R[0, 2] + R[2, 0]) / s])
    elif case == 2:
        s = math.sqrt(1.0 - R[0, 0] + R[1, 1] - R[2, 2]) * 2.0
        q = np.array([(R[0, 2] - R[2, 0]) / s,
                      (R[0, 1] + R[1, 0]) / s,
                      0.25 * s,
                      (R[1, 2] + R[2, 1]) / s])
    else:
        s = math.sqrt(1.0 - R[0, 0] - R[1, 1] + R[2, 2]) * 2.0
        q = np.array([(R[1, 0] - R[0, 1]) / s,
                      (R[0, 2] + R[2, 0]) / s,
                      (R[1, 2] + R[2, 1]) / s,
                      0.25 * s])
    q /= np.linalg.norm(q)
    if q[0] < 0.0:
        q = -q
    return q


def quat_derivative(q: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Quaternion time derivative for body rates ``w``.

    Evaluates ``0.5 * Omega(w) @ q`` where ``Omega`` is the linear map of
    the quaternion kinematic equation used throughout this package.
    """
    _check_unit(q)
    q1, q2, q3, q4 = (float(c) for c in q)
    wx, wy, wz = (float(c) for c in w)
    return 0.5 * np.array([
        -wx * q2 - wy * q3 - wz * q4,
        wx * q1 - wz * q3 + wy * q4,
        wy * q1 + wz * q2 - wx * q4,
        wz * q1 - wy * q2 + wx * q3,
    ])


def quat_propagate(q: np.ndarray, w: np.ndarray, dt: float) -> np.ndarray:
    """Propagate a quaternion over ``dt`` under constant body rates.

    Uses the closed-form matrix exponential of the kinematic equation,
    ``q(t+dt) = (cos(a) I + sin(a)/|w| Omega(w)) q(t)`` with
    ``a = |w| dt / 2``, which is exact for constant rates and preserves the
    unit norm; the result is renormalised to shed rounding residue.

    Parameters
    ----------
    q : array_like, shape (4,)
        Unit attitude quaternion, scalar first.
    w : array_like, shape (3,)
        Body rates in rad/s, held constant over the step.
    dt : float
        Step length in s.

    Returns
    -------
    numpy.ndarray, shape (4,)
        Unit quaternion after the step.
    """
    _check_unit(q)
    wx, wy, wz = (float(c) for c in w)
    n = math.sqrt(wx * wx + wy * wy + wz * wz)
    if n == 0.0:
        return np.asarray(q, dtype=float).copy()
    a = 0.5 * n * dt
    c = math.cos(a)
    s = math.sin(a) / n
    q1, q2, q3, q4 = (float(cmp) for cmp in q)
    out = np.array([
        c * q1 + s * (-wx * q2 - wy * q3 - wz * q4),
        c * q2 + s * (wx * q1 - wz * q3 + wy * q4),
        c * q3 + s * (wy * q1 + wz * q2 - wx * q4),
        c * q4 + s * (wz * q1 - wy * q2 + wx * q3),
    ])
    return out / math.sqrt(out @ out)


def body_rates_between(q0: np.ndarray, q1: np.ndarray, dt: float) -> np.ndarray:
    """Constant body rates that carry ``q0`` to ``q1`` in one step of ``dt``.

    Exact inverse of :func:`quat_propagate`; the two quaternions must be on
    the same sign branch (``q0 . q1 >= 0``) for the short-way rotation.
    """
    _check_unit(q0)
    _check_unit(q1)
    if dt <= 0.0:
        raise DomainError(f"step length must be positive, got {dt}")
    q0 = np.asarray(q0, dtype=float)
    q1 = np.asarray(q1, dtype=float)
    c = float(q0 @ q1)
    d = q1 - c * q0
    w0, x0, y0, z0 = q0
    # Project the residual on the three rate directions of the kinematic
    # map; d lies in their span because it is orthogonal to q0.
    e = np.array([
        -x0 * d[0] + w0 * d[1] - z0 * d[2] + y0 * d[3],
        -y0 * d[0] + z0 * d[1] + w0 * d[2] - x0 * d[3],
        -z0 * d[0] - y0 * d[1] + x0 * d[2] + w0 * d[3],
    ])
    sin_a = math.sqrt(e @ e)
    if sin_a < 1e-15:
        return (2.0 / dt) * e
    a = math.atan2(sin_a, c)
    return e * (2.0 * a / (dt * sin_a))


def accel_to_inertial(a_k: np.ndarray, q: np.ndarray, phi_g: float) -> np.ndarray:
    """Inertial acceleration in ``G`` from body-frame specific force.

    Rotates the accelerometer reading into ``G`` through NED and restores
    gravity.  A wing at rest with ``K`` aligned to NED reads
    ``[0, 0, GRAVITY]`` and maps to zero inertial acceleration.

    Parameters
    ----------
    a_k : array_like, shape (3,)
        Specific force in body coordinates in m/s^2.
    q : array_like, shape (4,)
        Unit attitude quaternion (body to NED), scalar first.
    phi_g : float
        Heading of the downwind axis from north in rad.

    Returns
    -------
    numpy.ndarray, shape (3,)
        Acceleration of the wing in ``G`` in m/s^2.
    """
    a_ned = quat_to_rot(q) @ np.asarray(a_k, dtype=float)
    a_g = rot_ned_to_g(phi_g) @ a_ned
    a_g[2] += GRAVITY
    return a_g
