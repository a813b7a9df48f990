"""Single-reply Doppler / radial-velocity estimation.

The mid-pulse samples of the 56 on-chips carry the carrier phase
``2 pi f_D T_s (n_d + i M) + psi0`` plus phase noise.  Differencing removes
psi0; the differenced noise is MA(1) with a tridiagonal covariance whose
inverse is known in closed form, so the weighted least-squares slope is
cheap and needs no knowledge of the noise level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce

import numpy as np

from .constants import SPEED_OF_LIGHT
from .exceptions import RankDeficiencyError
from .frames import nonzero_chip_indices, ppm_expand


@dataclass(frozen=True)
class PhaseObservation:
    u: np.ndarray
    varphi: np.ndarray
    n_d: int

    def __post_init__(self):
        if self.u.shape != self.varphi.shape:
            raise ValueError("u and varphi must have the same length")
        if self.u.size > 1 and np.any(np.diff(self.u) <= 0):
            raise ValueError("chip indices must be strictly increasing")


@dataclass(frozen=True)
class DriftModel:
    Q: np.ndarray
    delta_f: float
    f_c: float

    @property
    def N_c(self) -> int:
        return int(np.size(self.Q))


def wrap_phase(x):
    """Map angles to (-pi, pi]."""
    x = np.asarray(x, dtype=float)
    return x - 2 * np.pi * np.ceil((x - np.pi) / (2 * np.pi))


def extract_phases(samples: np.ndarray, n0_hat: int, b_hat, M: int) -> PhaseObservation:
    u = nonzero_chip_indices(ppm_expand(b_hat))
    n_d = n0_hat + 16 * M + M // 2
    x = np.asarray(samples)[n_d + u * M]
    return PhaseObservation(u=u, varphi=np.angle(x), n_d=n_d)


def derivative_matrix(K: int) -> np.ndarray:
    if K < 2:
        raise ValueError("need K >= 2")
    delta = np.zeros((K - 1, K))
    idx = np.arange(K - 1)
    delta[idx, idx] = 1.0
    delta[idx, idx + 1] = -1.0
    return delta


@lru_cache(maxsize=16)
def _cinv(K: int) -> np.ndarray:
    m = np.arange(1, K, dtype=float)
    out = np.minimum.outer(m, m) - np.outer(m, m) / K
    out.setflags(write=False)
    return out


def covariance_inverse(K: int) -> np.ndarray:
    """Inverse of tridiag(-1, 2, -1) of size K-1, i.e. C^{-1} at unit phase variance."""
    if K < 2:
        raise ValueError("need K >= 2")
    return _cinv(K).copy()


def _slope_terms(u: np.ndarray) -> tuple[np.ndarray, float]:
    du = u[:-1] - u[1:]
    w = _cinv(u.size) @ du
    return w, float(du @ w)


def estimate_doppler(obs: PhaseObservation, M: int, T_s: float) -> float:
    """Weighted-LS Doppler estimate in Hz from wrapped phase differences."""
    u = obs.u.astype(float)
    dphi = wrap_phase(obs.varphi[:-1] - obs.varphi[1:])
    w, denom = _slope_terms(u)
    return float(w @ dphi) / denom / (2 * math.pi * M * T_s)


def radial_velocity(f_D: float, f_c: float) -> float:
    return SPEED_OF_LIGHT * f_D / f_c


def doppler_shift(v_r: float, f_c: float) -> float:
    return v_r * f_c / SPEED_OF_LIGHT


def sigma_theta_sq(L: float, sigma_w_sq: float, P_t: float, eta0: float, g_nc: float) -> float:
    """High-SNR phase-noise variance of a mid-pulse sample.

    The sample amplitude is sqrt(P_t eta0) g_nc / L, so the phase variance is
    sigma_w^2 L^2 / (2 P_t eta0 g_nc^2).
    """
    for name, v in dict(L=L, sigma_w_sq=sigma_w_sq, P_t=P_t, eta0=eta0, g_nc=g_nc).items():
        if v <= 0:
            raise ValueError(f"{name} must be positive")
    return 0.5 * L**2 * sigma_w_sq / (P_t * eta0 * g_nc**2)


def rmse_theoretical(u, M: int, T_s: float, sigma_theta_sq: float) -> float:
    _, denom = _slope_terms(np.asarray(u, dtype=float))
    return math.sqrt(sigma_theta_sq / denom) / (2 * math.pi * M * T_s)


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(repr(x))
    return Fraction(x)


def max_unambiguous_doppler(pri_list) -> Fraction:
    """LCM of the PRI denominators over GCD of the numerators, in Hz.

    PRIs are taken as exact rationals in seconds; floats are read through
    their decimal repr so 0.5e-6 becomes 1/2000000.
    """
    fracs = [_as_fraction(p) for p in pri_list]
    if not fracs:
        raise ValueError("need at least one PRI")
    if any(f <= 0 for f in fracs):
        raise ValueError("PRIs must be positive")
    lcm = reduce(math.lcm, (f.denominator for f in fracs))
    gcd = reduce(math.gcd, (f.numerator for f in fracs))
    return Fraction(lcm, gcd)


def max_unambiguous_velocity(pri_list, wavelength: float) -> float:
    return float(max_unambiguous_doppler(pri_list)) * wavelength


def separate_drift(f_hat, model: DriftModel) -> tuple[float, float]:
    """LS split of per-subcarrier offsets into (oscillator drift, radial velocity)."""
    omega = np.asarray(f_hat, dtype=float)
    Q = np.asarray(model.Q, dtype=float)
    if Q.size < 2 or np.unique(Q).size != Q.size:
        raise RankDeficiencyError("need at least two distinct subcarriers")
    if omega.shape != Q.shape:
        raise ValueError("one frequency estimate per subcarrier is required")
    psi = np.column_stack([np.ones_like(Q), (model.f_c + Q * model.delta_f) / SPEED_OF_LIGHT])
    df, v_r = np.linalg.solve(psi.T @ psi, psi.T @ omega)
    return float(df), float(v_r)


def subcarrier_doppler(v_r: float, model: DriftModel) -> np.ndarray:
    return v_r * (model.f_c + np.asarray(model.Q) * model.delta_f) / SPEED_OF_LIGHT
