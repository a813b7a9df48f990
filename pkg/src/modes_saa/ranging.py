"""Range from elevation plus reported altitude, with a round-trip-time fallback."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .aoa import aoa_mse_theoretical
from .channel import ArrayGeometry
from .constants import SPEED_OF_LIGHT
from .exceptions import GeometryError


class RangeMethod(str, enum.Enum):
    TRIANGULAR = "triangular"
    RTT = "rtt"


@dataclass(frozen=True)
class RangeEstimate:
    R_hat: float
    method: RangeMethod
    theta_hat: float
    h: float
    h_a: float | None
    n0_hat: int


def range_triangular(h_a: float, h: float, theta_hat: float) -> float:
    """(h_a - h) / sin(theta_hat), theta in degrees.

    A non-positive result means the elevation sign disagrees with the
    altitude difference and raises GeometryError.
    """
    s = math.sin(math.radians(theta_hat))
    if s == 0:
        raise GeometryError("elevation must be nonzero")
    R = (h_a - h) / s
    if not R > 0:
        raise GeometryError("elevation sign inconsistent with altitude difference")
    return R


def range_rtt(n0_hat: int, T_s: float, tau_gr: float = 0.0, correct_group_delay: bool = False) -> float:
    """c T_s n0_hat / 2; optionally removes the filter group delay first."""
    if n0_hat < 0:
        raise ValueError("sample index must be non-negative")
    t = T_s * n0_hat
    if correct_group_delay:
        t -= tau_gr
    return SPEED_OF_LIGHT * t / 2


def select_range(
    crc_ok: bool,
    theta_hat: float,
    epsilon_theta: float,
    h: float,
    h_a: float | None,
    n0_hat: int,
    T_s: float,
    tau_gr: float = 0.0,
    correct_group_delay: bool = False,
) -> RangeEstimate:
    """Triangular range when the CRC passed and |theta_hat| > epsilon_theta, RTT otherwise."""
    if crc_ok and h_a is not None and abs(theta_hat) > epsilon_theta:
        try:
            R = range_triangular(h_a, h, theta_hat)
            return RangeEstimate(R, RangeMethod.TRIANGULAR, theta_hat, h, h_a, n0_hat)
        except GeometryError:
            pass
    R = range_rtt(n0_hat, T_s, tau_gr, correct_group_delay)
    return RangeEstimate(R, RangeMethod.RTT, theta_hat, h, h_a, n0_hat)


def range_rmse_theoretical(
    theta: float,
    phi: float,
    h_diff: float,
    geom: ArrayGeometry,
    wavelength: float,
    xi_: float,
    sigma_w_sq: float,
    M: int,
) -> float:
    """|h_a - h| / sin^2(theta) times the RMSE of sin(theta_hat)."""
    if theta == 0:
        raise GeometryError("range RMSE is singular at zero elevation")
    mse_sin, _ = aoa_mse_theoretical(theta, phi, geom, wavelength, xi_, sigma_w_sq, M)
    return abs(h_diff) / math.sin(math.radians(theta)) ** 2 * math.sqrt(mse_sin)
