"""Free-space link, Doppler/phase rotation, AWGN and planar-array snapshots."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import CARRIER_HZ, SPEED_OF_LIGHT


@dataclass(frozen=True)
class SampledSignal:
    """Received sample vector plus the index bounds the estimators need."""

    samples: np.ndarray
    T_s: float
    M: int
    D: int
    M_gr: int

    @property
    def N(self) -> int:
        return self.samples.size


@dataclass(frozen=True)
class ChannelParams:
    R: float
    f_D: float = 0.0
    psi0: float = 0.0
    P_t: float = 10 ** 0.8
    eta0: float = 1.0
    N0: float = 2.4e-21
    f_c: float = CARRIER_HZ

    def __post_init__(self):
        if self.R <= 0:
            raise ValueError("range must be positive")
        if self.N0 < 0:
            raise ValueError("noise PSD must be non-negative")
        if not 0 < self.eta0 <= 1:
            raise ValueError("radiation efficiency must lie in (0, 1]")

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c

    @property
    def pathloss(self) -> float:
        return pathloss(self.R, self.wavelength)

    @property
    def amplitude(self) -> float:
        return math.sqrt(self.P_t * self.eta0) / self.pathloss


@dataclass(frozen=True)
class ArrayGeometry:
    """N_x by N_y planar array; elements flattened with the row index m fastest."""

    N_x: int = 2
    N_y: int = 2
    d_x: float = 0.1375
    d_y: float = 0.1375
    eta: float = 1.0
    alpha: float = 1.0

    def __post_init__(self):
        if self.N_x * self.N_y < 2 or self.d_x <= 0 or self.d_y <= 0:
            raise ValueError("array needs at least two elements and positive spacing")

    @property
    def N_a(self) -> int:
        return self.N_x * self.N_y

    def element_offsets(self):
        """(m-1, n-1) for each flattened element."""
        m, n = np.meshgrid(np.arange(self.N_x), np.arange(self.N_y), indexing="xy")
        return m.ravel().astype(float), n.ravel().astype(float)


def pathloss(R: float, wavelength: float) -> float:
    if R <= 0:
        raise ValueError("range must be positive")
    return 4 * math.pi * R / wavelength


def complex_noise(rng: np.random.Generator, shape, variance: float) -> np.ndarray:
    """Circular complex Gaussian samples with E|w|^2 = variance."""
    if variance == 0:
        return np.zeros(shape, dtype=complex)
    w = rng.standard_normal(tuple(np.atleast_1d(shape)) + (2,))
    w *= math.sqrt(variance / 2)
    return w.view(complex)[..., 0]


def doppler_phase(k, f_D: float, T_s: float, psi: float):
    return 2 * math.pi * f_D * T_s * np.asarray(k, dtype=float) + psi


def apply_channel(
    s: np.ndarray,
    p: ChannelParams,
    T_s: float,
    rng: np.random.Generator | int | None = None,
) -> np.ndarray:
    """y = (sqrt(P_t eta0) / L) diag(e^{j(2 pi f_D T_s k + psi0)}) s + w."""
    rng = np.random.default_rng(rng)
    s = np.asarray(s, dtype=complex)
    y = complex_noise(rng, s.size, p.N0)
    present = s != 0
    if present.any():
        # rotation only where the reply is present
        k = np.arange(np.argmax(present), s.size - np.argmax(present[::-1]))
        y[k] += p.amplitude * np.exp(1j * doppler_phase(k, p.f_D, T_s, p.psi0)) * s[k]
    return y


def manifold(theta, phi, geom: ArrayGeometry, wavelength: float) -> np.ndarray:
    """a(theta, phi) in degrees; broadcasts over angle arrays, element axis last.

    a_{m,n} = exp(j 2 pi / lambda (d_x (m-1) cos(theta) + d_y (n-1) sin(theta) sin(phi)))
    """
    th = np.deg2rad(np.asarray(theta, dtype=float))[..., None]
    ph = np.deg2rad(np.asarray(phi, dtype=float))[..., None]
    m, n = geom.element_offsets()
    k = 2 * math.pi / wavelength
    return np.exp(1j * k * (geom.d_x * m * np.cos(th) + geom.d_y * n * np.sin(th) * np.sin(ph)))


def array_rows(
    rows: np.ndarray,
    s: np.ndarray,
    p: ChannelParams,
    geom: ArrayGeometry,
    theta: float,
    phi: float,
    T_s: float,
    psi_a: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Selected rows of the full N x N_a array receive matrix.

    Every element sees the same rotated reply scaled by its manifold entry;
    noise is drawn only for the requested rows, which is equivalent to
    drawing the whole matrix because rows are independent.
    """
    rows = np.asarray(rows, dtype=int)
    amp = geom.alpha * math.sqrt(p.P_t * geom.eta) / p.pathloss
    a = manifold(theta, phi, geom, p.wavelength)
    inside = (rows >= 0) & (rows < s.size)
    sig = np.zeros(rows.size, dtype=complex)
    r_in = rows[inside]
    sig[inside] = amp * np.exp(1j * doppler_phase(r_in, p.f_D, T_s, psi_a)) * s[r_in]
    return np.outer(sig, a) + complex_noise(rng, (rows.size, geom.N_a), p.N0)


def snapshot_rows(n0: int, I: np.ndarray, M: int) -> np.ndarray:
    """Sample indices of the M samples of every PPM chip listed in I."""
    n_s = n0 + 16 * M
    return (n_s + np.asarray(I)[:, None] * M + np.arange(M)[None, :]).ravel()


def synthesize_snapshot(
    s: np.ndarray,
    I: np.ndarray,
    n0: int,
    M: int,
    p: ChannelParams,
    geom: ArrayGeometry,
    theta: float,
    phi: float,
    T_s: float,
    psi_a: float = 0.0,
    rng: np.random.Generator | int | None = None,
) -> np.ndarray:
    """56 M x N_a array snapshot built from the on-chips in I."""
    rng = np.random.default_rng(rng)
    return array_rows(snapshot_rows(n0, I, M), s, p, geom, theta, phi, T_s, psi_a, rng)
