"""Frame timing (preamble correlation) and noncoherent PPM bit decisions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import SampledSignal
from .frames import FRAME_BITS
from .waveform import PREAMBLE

# preamble followed by the PPM chips of DF = 00100
EXTENDED_PREAMBLE = np.concatenate([PREAMBLE, np.array([0, 1, 0, 1, 1, 0, 0, 1, 0, 1], dtype=np.uint8)])


@dataclass(frozen=True)
class SyncResult:
    n0_hat: int
    metric: float


def extended_preamble() -> np.ndarray:
    return EXTENDED_PREAMBLE.copy()


def timing_metric(samples: np.ndarray, M: int, lo: int, hi: int) -> np.ndarray:
    """|sum_k y*_{n0+k} rbar_k|^2 for n0 = lo .. hi, rbar expanded to M samples per chip.

    Uses running sums: each '1' chip contributes the sum of M consecutive
    samples, so the correlation is a sum of shifted box sums, one per pulse.
    """
    y = np.asarray(samples, dtype=complex)
    # |sum y*| = |sum y|, so the conjugate is never formed
    csum = np.empty(y.size + 1, dtype=complex)
    csum[0] = 0
    np.cumsum(y, out=csum[1:])
    box = csum[M:] - csum[:-M]  # box[n] = y[n] + ... + y[n+M-1]
    width = hi - lo + 1
    starts = lo + M * np.flatnonzero(EXTENDED_PREAMBLE)
    acc = box[starts[0] : starts[0] + width].copy()
    for start in starts[1:]:
        acc += box[start : start + width]
    out = np.square(acc.real)
    out += np.square(acc.imag)
    return out


def estimate_timing(y: SampledSignal, kappa: float = 5.0) -> SyncResult:
    """Frame start from the extended-preamble correlation over M_gr <= n0 <= D.

    Any window in which all nine template pulses land on pulses reaches the
    same noiseless peak, and such windows also occur inside the payload.
    The reply is preceded by silence, so among candidates whose metric lies
    within ``kappa`` noise standard deviations of the maximum the earliest
    one is returned.  ``kappa=0`` gives the plain argmax (first index on
    exact ties).  The noise level is estimated from the median sample power.
    """
    M = y.M
    hi = min(y.D, y.N - EXTENDED_PREAMBLE.size * M)
    if hi < y.M_gr:
        raise ValueError("signal too short for the timing search window")
    if kappa < 0:
        raise ValueError("kappa must be non-negative")
    metric = timing_metric(y.samples, M, y.M_gr, hi)
    peak = float(metric.max())
    tol = 0.0
    if kappa > 0:
        # median |w|^2 = sigma^2 ln 2 for circular Gaussian noise; a strided
        # subset is plenty for the median and skips most of the reply
        sub = y.samples[y.M_gr : hi + 1 : 16]
        sigma_sq = float(np.median(sub.real**2 + sub.imag**2)) / np.log(2)
        n_ones = int(EXTENDED_PREAMBLE.sum()) * M
        tol = kappa * np.sqrt(2 * peak * n_ones * sigma_sq)
    k = int(np.argmax(metric >= peak - tol))  # first index meeting the bound
    return SyncResult(n0_hat=y.M_gr + k, metric=float(metric[k]))


def chip_energies(samples: np.ndarray, n0_hat: int, M: int) -> np.ndarray:
    """Lambda as a (56, 2M) array: |y|^2 over each PPM symbol."""
    n_s = n0_hat + 16 * M
    block = np.asarray(samples)[n_s : n_s + 2 * M * FRAME_BITS]
    if block.size < 2 * M * FRAME_BITS:
        raise ValueError("signal too short to cover the payload")
    return (np.abs(block) ** 2).reshape(FRAME_BITS, 2 * M)


def detect_symbols(samples: np.ndarray, n0_hat: int, M: int) -> np.ndarray:
    """b_n = 1 iff the first-chip energy is >= the second-chip energy."""
    lam = chip_energies(samples, n0_hat, M)
    return (lam[:, :M].sum(axis=1) >= lam[:, M:].sum(axis=1)).astype(np.uint8)
