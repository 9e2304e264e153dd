"""Entanglement, steering and squeezing parameters computed from spin moments.

All quantities are normalized by the coherent-state noise level N/2 (or N/4
for a single variance) so that the thresholds are pure numbers:

* Hillery-Zubairy sums ``[(dS_x)^2 + (dS_j)^2] / (N/2)`` below 1 certify
  two-mode entanglement, below 1/2 EPR steering.
* squeezing ratios compare the minimal in-plane variance with the
  standard quantum limit set by the Bloch-vector length.

Angles follow ``S_theta = S_y cos(theta) + S_z sin(theta)``; the optimal
angle is reported in (-pi/2, pi/2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

from .moments import SpinMoments, _checked_variance, variance

__all__ = [
    "CriteriaReport",
    "RotatedSpins",
    "optimal_angle",
    "minimal_variance_from_cf",
    "variance_at_angle",
    "evaluate_criteria",
    "rotated_spins",
    "interferometer_output",
]

ISOTROPY_RTOL = 1e-12


def _yz_block(m: SpinMoments):
    cyy = m.second_yy - m.mean_sy**2
    czz = m.second_zz - m.mean_sz**2
    cyz = m.anti_yz - m.mean_sy * m.mean_sz
    return cyy, czz, cyz


def variance_at_angle(moments: SpinMoments, theta) -> float:
    """Variance of ``S_y cos(theta) + S_z sin(theta)``."""
    c, s = math.cos(theta), math.sin(theta)
    return _checked_variance(
        c * c * moments.second_yy + s * s * moments.second_zz + 2 * s * c * moments.anti_yz,
        c * moments.mean_sy + s * moments.mean_sz,
        f"S_theta(theta={theta!r})",
    )


def optimal_angle(moments: SpinMoments):
    """Angle minimizing the yz-plane variance and the minimal variance.

    This is the smaller eigenvalue of the (S_y, S_z) covariance block and
    the angle of its eigenvector; an isotropic block returns angle 0.
    """
    cyy, czz, cyz = _yz_block(moments)
    mean_part = 0.5 * (cyy + czz)
    half_diff = 0.5 * (czz - cyy)
    radius = math.hypot(half_diff, cyz)
    if radius <= ISOTROPY_RTOL * max(abs(mean_part), 1e-300):
        theta = 0.0
    else:
        theta = 0.5 * math.atan2(-cyz, half_diff)
        if theta <= -math.pi / 2:
            theta += math.pi
    var_min = _checked_variance(mean_part - radius, 0.0, "minimal S_theta")
    return theta, var_min


def minimal_variance_from_cf(moments: SpinMoments) -> float:
    """Minimal yz-plane variance written with C and F (needs zero y, z means)."""
    c, f = moments.c_value, moments.f_value
    return 0.5 * (moments.second_yy + moments.second_zz) - math.sqrt(4 * c * c + abs(f) ** 2) / 4


@dataclass(frozen=True)
class RotatedSpins:
    """Means and variances of the spins of the rotated mode pair."""

    mean_x: float
    mean_y: float
    mean_z: float
    var_x: float
    var_y: float
    var_z: float


def rotated_spins(moments: SpinMoments, theta) -> RotatedSpins:
    """Spins of the mode pair rotated by ``theta`` about the x axis.

    ``S_x' = S_x``, ``S_y' = S_z sin + S_y cos``, ``S_z' = S_z cos - S_y sin``;
    ``var_y`` is therefore the variance of ``S_theta``.
    """
    c, s = math.cos(theta), math.sin(theta)
    m = moments
    mean_y = s * m.mean_sz + c * m.mean_sy
    mean_z = c * m.mean_sz - s * m.mean_sy
    second_y = s * s * m.second_zz + c * c * m.second_yy + 2 * s * c * m.anti_yz
    second_z = c * c * m.second_zz + s * s * m.second_yy - 2 * s * c * m.anti_yz
    return RotatedSpins(
        mean_x=m.mean_sx,
        mean_y=mean_y,
        mean_z=mean_z,
        var_x=variance(m, "x"),
        var_y=_checked_variance(second_y, mean_y, "rotated S_y"),
        var_z=_checked_variance(second_z, mean_z, "rotated S_z"),
    )


def interferometer_output(moments: SpinMoments, phi):
    """Mean and variance of ``M = 2 S_x cos(phi) + 2 S_y sin(phi)``."""
    c, s = math.cos(phi), math.sin(phi)
    m = moments
    mean = 2 * (c * m.mean_sx + s * m.mean_sy)
    second = 4 * (c * c * m.second_xx + s * s * m.second_yy + 2 * s * c * m.anti_xy)
    return mean, _checked_variance(second, mean, "interferometer output")


@dataclass(frozen=True)
class CriteriaReport:
    n_total: int
    theta: float
    theta_opt: float
    var_theta_min: float
    var_sx: float
    var_sy: float
    var_sz: float
    var_stheta: float
    mean_sx: float
    e_hz: float
    e_hz_t: float
    e_hz_theta: float
    xi2: float
    xi2_bar: float
    e_ratio: float
    bloch_r: float
    r_parallel: float
    steer_b_by_a: bool
    steer_a_by_b: bool
    entangled: bool

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _ratio(num, den):
    return num / den if den != 0 else math.inf


def evaluate_criteria(moments: SpinMoments, theta="optimal") -> CriteriaReport:
    """Every criterion at the yz-plane angle ``theta`` (default: the optimal one).

    Steering of mode b by mode a is flagged when
    ``e_hz_theta < 1/2 + <S_z'>/N`` and the reverse direction when
    ``e_hz_theta < 1/2 - <S_z'>/N``, with ``S_z'`` the rotated z spin.
    """
    n = moments.n_total
    if n < 1:
        raise ValueError("criteria need at least one boson")
    theta_opt, var_min = optimal_angle(moments)
    if isinstance(theta, str):
        if theta != "optimal":
            raise ValueError(f"theta must be a number or 'optimal', got {theta!r}")
        theta = theta_opt
        var_theta = var_min
    else:
        theta = float(theta)
        var_theta = variance_at_angle(moments, theta)

    half_n = n / 2
    vx, vy, vz = (variance(moments, a) for a in "xyz")
    e_hz_theta = (vx + var_theta) / half_n
    sx, sy, sz = moments.mean_sx, moments.mean_sy, moments.mean_sz
    rotated_mean_z = sz * math.cos(theta) - sy * math.sin(theta)
    e_hz, e_hz_t = (vx + vy) / half_n, (vx + vz) / half_n

    return CriteriaReport(
        n_total=n,
        theta=theta,
        theta_opt=theta_opt,
        var_theta_min=var_min,
        var_sx=vx,
        var_sy=vy,
        var_sz=vz,
        var_stheta=var_theta,
        mean_sx=sx,
        e_hz=e_hz,
        e_hz_t=e_hz_t,
        e_hz_theta=e_hz_theta,
        xi2=_ratio(var_theta, abs(sx) / 2),
        xi2_bar=_ratio(n * var_theta, sx * sx),
        e_ratio=_ratio(abs(moments.mean_ab) ** 2, moments.mean_nanb),
        bloch_r=math.sqrt(sx * sx + sy * sy + sz * sz) / half_n,
        r_parallel=math.hypot(sx, sy) / half_n,
        steer_b_by_a=bool(e_hz_theta < 0.5 + rotated_mean_z / n),
        steer_a_by_b=bool(e_hz_theta < 0.5 - rotated_mean_z / n),
        entangled=bool(min(e_hz, e_hz_t, e_hz_theta) < 1.0),
    )

