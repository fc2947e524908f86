"""Line-angle sensing: two encoders watching the direction of the tether.

The mechanism is a light arm that the center line drags along as the wing
moves.  An azimuth encoder reads the arm's rotation ``phi_b`` about the
vertical axis and an elevation encoder reads the arm's tilt ``theta_b``
about the horizontal pivot.  The line runs through a guide at the arm tip,
offset from the pivot, and the pivot itself is offset from the point the
wing angles are referred to, so recovering the wing elevation and azimuth
takes the small geometry correction implemented here.

With zero offsets (guide on the pivot axis, pivot on the reference origin)
the encoders read the wing angles directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DegenerateInputError, DomainError, NonConvergenceError
from .frames import spherical_to_cartesian, wrap_angle

#: Encoder line count used when none is configured (resolution 2*pi/400).
DEFAULT_COUNTS_PER_REV = 400


@dataclass(frozen=True)
class EncoderGeometry:
    """Mounting geometry of the line-angle mechanism, in metres.

    Attributes
    ----------
    guide_rise : float
        Offset of the line guide from the arm axis, perpendicular to it.
    guide_reach : float
        Offset of the line guide along the arm axis, from the pivot.
    pivot_height : float
        Height of the elevation pivot above the reference origin.
    pivot_setback : float
        Horizontal offset of the reference origin ahead of the pivot.

    The defaults are plausible bench values for a small ground unit; they
    are placeholders to be replaced by measurements of the actual build.
    The pivot offsets are kept small relative to the arm length so that
    one encoder count maps to at most about one count of wing-angle
    error; large offsets amplify the quantization.
    """

    guide_rise: float = 0.10
    guide_reach: float = 0.30
    pivot_height: float = 0.02
    pivot_setback: float = 0.02

    def __post_init__(self):
        if self.guide_rise < 0.0 or self.guide_reach < 0.0:
            raise DomainError("guide offsets must be non-negative")
        if self.guide_rise == 0.0 and self.guide_reach == 0.0:
            raise DomainError("line guide cannot sit on the elevation pivot")


class EncoderReading(NamedTuple):
    """Raw encoder angles in rad (integer multiples of the resolution when
    produced by hardware or by :func:`angles_to_encoder`)."""

    theta_b: float
    phi_b: float


def resolution(counts_per_rev: int = DEFAULT_COUNTS_PER_REV) -> float:
    """Angular size of one encoder count in rad."""
    if counts_per_rev <= 0:
        raise DomainError(f"counts per revolution must be positive, got {counts_per_rev}")
    return 2.0 * math.pi / counts_per_rev


def quantize(theta_b: float, phi_b: float,
             counts_per_rev: int = DEFAULT_COUNTS_PER_REV) -> EncoderReading:
    """Round arm angles to the nearest encoder count."""
    step = resolution(counts_per_rev)
    return EncoderReading(round(theta_b / step) * step, round(phi_b / step) * step)


def encoder_to_angles(reading: EncoderReading, geometry: EncoderGeometry) -> tuple[float, float]:
    """Wing elevation and azimuth from raw encoder angles.

    Locates the line guide in space from the arm angles, shifts it by the
    mounting offsets and reads off the direction from the reference origin
    to the guide, which is the direction of the departing tether.

    Parameters
    ----------
    reading : EncoderReading
        Arm elevation and azimuth in rad.
    geometry : EncoderGeometry
        Mounting geometry of the mechanism.

    Returns
    -------
    (theta, phi) : tuple of float
        Wing elevation and azimuth in rad, azimuth in (-pi, pi].

    Raises
    ------
    DegenerateInputError
        If the guide lands exactly on the vertical axis through the origin,
        where the azimuth is undefined.
    """
    g = geometry
    reach = math.hypot(g.guide_rise, g.guide_reach)
    elev = reading.theta_b - math.atan2(g.guide_rise, g.guide_reach)
    up = reach * math.sin(elev)
    horiz = reach * math.cos(elev)
    fwd = horiz * math.cos(reading.phi_b) - g.pivot_setback
    side = horiz * math.sin(reading.phi_b)
    ground = math.hypot(fwd, side)
    if ground == 0.0:
        raise DegenerateInputError("tether direction is vertical, azimuth undefined")
    return math.atan((up + g.pivot_height) / ground), math.atan2(side, fwd)


def angles_to_position(theta: float, phi: float, r: float) -> np.ndarray:
    """Wing position on the sphere of radius ``r`` for line angles
    (theta, phi); lies on the sphere by construction."""
    return spherical_to_cartesian(theta, phi, r)


def angles_to_encoder(theta: float, phi: float, geometry: EncoderGeometry,
                      counts_per_rev: int | None = DEFAULT_COUNTS_PER_REV,
                      initial: EncoderReading | None = None) -> EncoderReading:
    """Arm angles that the mechanism shows for wing angles (theta, phi).

    Numerically inverts :func:`encoder_to_angles` with a damped Newton
    iteration on the two-dimensional angle residual (central-difference
    Jacobian, residual wrapped to (-pi, pi]), then rounds to the encoder
    grid.  The wing angles themselves are the initial guess unless
    ``initial`` (e.g. the previous solution when sweeping a trajectory)
    is given.

    Parameters
    ----------
    theta, phi : float
        Wing elevation and azimuth in rad.
    geometry : EncoderGeometry
        Mounting geometry of the mechanism.
    counts_per_rev : int or None
        Encoder line count for the final rounding; ``None`` or ``0``
        returns the unrounded solution.
    initial : EncoderReading, optional
        Starting point for the iteration.

    Raises
    ------
    NonConvergenceError
        If the residual does not reach 1e-12 within 50 iterations, e.g.
        for wing angles outside the mechanism's reachable set.
    """
    target = np.array([theta, phi])
    x = np.array(initial) if initial is not None else target.copy()
    tol = 1e-12
    fd_step = 1e-7

    def residual(v):
        t, p = encoder_to_angles(EncoderReading(v[0], v[1]), geometry)
        return np.array([wrap_angle(t - target[0]), wrap_angle(p - target[1])])

    f = residual(x)
    for _ in range(50):
        if max(abs(f[0]), abs(f[1])) < tol:
            break
        J = np.empty((2, 2))
        for j in range(2):
            dx = np.zeros(2)
            dx[j] = fd_step
            J[:, j] = (residual(x + dx) - residual(x - dx)) / (2.0 * fd_step)
        try:
            step = np.linalg.solve(J, f)
        except np.linalg.LinAlgError as exc:
            raise NonConvergenceError("singular Jacobian in encoder inversion") from exc
        # Damp by halving until the residual shrinks.
        scale = 1.0
        norm0 = float(f @ f)
        for _ in range(20):
            x_new = x - scale * step
            f_new = residual(x_new)
            if float(f_new @ f_new) < norm0:
                break
            scale *= 0.5
        x, f = x_new, f_new
    else:
        if max(abs(f[0]), abs(f[1])) >= tol:
            raise NonConvergenceError(
                f"encoder inversion did not converge for theta={theta}, phi={phi}")
    if not counts_per_rev:
        return EncoderReading(float(x[0]), float(x[1]))
    return quantize(float(x[0]), float(x[1]), counts_per_rev)
