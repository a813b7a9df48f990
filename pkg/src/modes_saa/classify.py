"""Rule-table intruder risk classification."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class RiskClass(str, enum.Enum):
    H0 = "H0"  # high risk
    H1 = "H1"  # medium risk
    H2 = "H2"  # low risk


@dataclass(frozen=True)
class SafetyThresholds:
    gamma_R: float = 500.0
    gamma_phi: float = 10.0
    gamma_theta: float = 10.0
    gamma_v: float = 20.0

    def __post_init__(self):
        if min(self.gamma_R, self.gamma_phi, self.gamma_theta, self.gamma_v) <= 0:
            raise ValueError("thresholds must be positive")


def classify(
    R_hat: float,
    phi_hat: float,
    theta_hat: float,
    v_r_hat: float,
    phi_v: float,
    theta_v: float,
    thresholds: SafetyThresholds = SafetyThresholds(),
) -> RiskClass:
    """Risk class from range, closing speed and heading alignment.

    Inside the safety radius is always high risk.  Outside it, a closing
    speed above gamma_v is high risk when both angles line up with the UAV
    heading and medium risk otherwise; slower intruders are low risk.
    """
    if R_hat < thresholds.gamma_R:
        return RiskClass.H0
    if not v_r_hat > thresholds.gamma_v:
        return RiskClass.H2
    phi_ok = abs(phi_hat - phi_v) < thresholds.gamma_phi
    theta_ok = abs(theta_hat - theta_v) < thresholds.gamma_theta
    return RiskClass.H0 if phi_ok and theta_ok else RiskClass.H1
