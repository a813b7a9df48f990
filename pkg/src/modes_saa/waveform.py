"""Clean sampled DF4 baseband.

The transmit pulse is the Mode S trapezoid; the receiver low-pass is a
square-root raised cosine whose symbol time equals the sample period, so
sampling at ``T_s = (1 + beta) / (2 B)`` leaves the noise white.  The
received pulse ``g = z * h`` is sampled at ``m T_s - T/2`` for
``m = 0 .. M-1`` and every chip of the reply is one copy of those M samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import integrate

from .frames import Df4Frame, ppm_expand

PREAMBLE = np.array([1, 0, 1, 0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0, 0], dtype=np.uint8)
REPLY_CHIPS = 128  # 16 preamble chips + 112 PPM chips


@dataclass(frozen=True)
class PulseSpec:
    T: float = 0.5e-6
    tau_r: float = 0.01e-6
    A: float | None = None

    def __post_init__(self):
        if not 0 < self.tau_r < self.T / 2:
            raise ValueError("rise time must satisfy 0 < tau_r < T/2")
        if self.A is None:
            # unit average power over the half-symbol
            object.__setattr__(self, "A", math.sqrt(self.T / (self.T - 4 * self.tau_r / 3)))


def trapezoid(t, spec: PulseSpec):
    t = np.asarray(t, dtype=float)
    half, tr, A = spec.T / 2, spec.tau_r, spec.A
    out = np.zeros_like(t)
    rise = (t >= -half) & (t < -half + tr)
    flat = (t >= -half + tr) & (t <= half - tr)
    fall = (t > half - tr) & (t <= half)
    out[rise] = A * (t[rise] + half) / tr
    out[flat] = A
    out[fall] = A * (half - t[fall]) / tr
    return out if out.ndim else float(out)


def _rrc_raw(x, beta: float):
    """Unit-symbol-time RRC evaluated at normalized time ``x = t / T_sym``."""
    x = np.asarray(x, dtype=float)
    out = np.empty_like(x)
    at_zero = np.abs(x) < 1e-12
    at_sing = np.abs(np.abs(4 * beta * x) - 1) < 1e-9
    regular = ~(at_zero | at_sing)
    xr = x[regular]
    out[regular] = (
        np.sin(np.pi * xr * (1 - beta)) + 4 * beta * xr * np.cos(np.pi * xr * (1 + beta))
    ) / (np.pi * xr * (1 - (4 * beta * xr) ** 2))
    out[at_zero] = 1 - beta + 4 * beta / np.pi
    q = np.pi / (4 * beta)
    out[at_sing] = beta / math.sqrt(2) * ((1 + 2 / np.pi) * math.sin(q) + (1 - 2 / np.pi) * math.cos(q))
    return out


@dataclass(frozen=True)
class FilterSpec:
    """Square-root raised cosine receive filter, or an ideal pass-through.

    ``span`` counts filter symbol times (``T_sym = (1 + beta) / (2 B)``);
    the response is truncated to ``|t| <= span T_sym / 2`` and rescaled to
    unit energy.
    """

    B: float = 6e6
    beta: float = 0.95
    span: int = 8
    tau_gr: float = 270e-6
    identity: bool = False

    def __post_init__(self):
        if not self.identity:
            if self.B <= 0 or not 0 < self.beta <= 1 or self.span < 1:
                raise ValueError("invalid RRC filter parameters")

    @property
    def symbol_time(self) -> float:
        return (1 + self.beta) / (2 * self.B)

    @property
    def half_span(self) -> float:
        return self.span * self.symbol_time / 2

    @cached_property
    def _scale(self) -> float:
        ts = self.symbol_time
        energy, _ = integrate.quad(
            lambda t: _rrc_raw(t / ts, self.beta) ** 2 / ts,
            -self.half_span,
            self.half_span,
            points=[-ts / (4 * self.beta), 0.0, ts / (4 * self.beta)],
            limit=400,
            epsabs=0,
            epsrel=1e-13,
        )
        return 1.0 / math.sqrt(energy * ts)

    def impulse(self, t):
        """Continuous-time response h(t) in 1/sqrt(s); zero outside the span."""
        t = np.asarray(t, dtype=float)
        h = self._scale * _rrc_raw(t / self.symbol_time, self.beta)
        return np.where(np.abs(t) <= self.half_span, h, 0.0)

    @classmethod
    def pass_through(cls, tau_gr: float = 0.0) -> "FilterSpec":
        return cls(identity=True, tau_gr=tau_gr)


def rrc_taps(spec: FilterSpec, T_s: float, oversample: int = 1) -> np.ndarray:
    """Symmetric tap vector sampled every ``T_s / oversample``, unit sum of squares."""
    if spec.identity:
        return np.ones(1)
    step = T_s / oversample
    n_half = int(math.floor(spec.half_span / step + 1e-9))
    t = np.arange(-n_half, n_half + 1) * step
    taps = _rrc_raw(t / spec.symbol_time, spec.beta)
    taps /= np.sqrt(np.sum(taps**2))
    # exact mirror symmetry, immune to rounding in t
    return 0.5 * (taps + taps[::-1])


def samples_per_half_symbol(T: float, T_s: float) -> int:
    return int(math.floor(T / T_s + 1e-9))


def filtered_pulse(t, pulse: PulseSpec, filt: FilterSpec):
    """g(t) = (z * h)(t) by adaptive quadrature over the trapezoid support."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if filt.identity:
        out = trapezoid(t_arr, pulse)
        return out if np.ndim(t) else float(out[0])
    half, tr = pulse.T / 2, pulse.tau_r
    corners = [-half, -half + tr, half - tr, half]
    out = np.empty_like(t_arr)
    for k, tk in enumerate(t_arr):
        lo = max(-half, tk - filt.half_span)
        hi = min(half, tk + filt.half_span)
        if lo >= hi:
            out[k] = 0.0
            continue
        pts = [c for c in corners + [tk] if lo < c < hi]
        val, _ = integrate.quad(
            lambda s: float(trapezoid(s, pulse)) * float(filt.impulse(tk - s)),
            lo,
            hi,
            points=pts or None,
            limit=400,
            epsabs=0,
            epsrel=1e-11,
        )
        out[k] = val
    return out if np.ndim(t) else float(out[0])


@dataclass(frozen=True)
class SampledPulse:
    g: np.ndarray
    M: int

    @property
    def n_c(self) -> int:
        return self.M // 2

    @property
    def g_nc(self) -> float:
        return float(self.g[self.n_c])

    @property
    def energy(self) -> float:
        return float(np.sum(self.g**2))


def sample_pulse(pulse: PulseSpec, filt: FilterSpec, T_s: float) -> SampledPulse:
    M = samples_per_half_symbol(pulse.T, T_s)
    if M < 1:
        raise ValueError("sampling period longer than the half-symbol")
    t = np.arange(M) * T_s - pulse.T / 2
    g = np.asarray(filtered_pulse(t, pulse, filt), dtype=float)
    g.setflags(write=False)
    return SampledPulse(g=g, M=M)


def chip_sequence(frame: Df4Frame) -> np.ndarray:
    """q = [preamble; PPM chips], 128 entries."""
    return np.concatenate([PREAMBLE, ppm_expand(frame)])


def synthesize_clean(frame: Df4Frame, sampled: SampledPulse, d: int, D: int) -> np.ndarray:
    """s = [0_d, q (x) g, 0_(D-d)] as a complex vector of length 128 M + D."""
    if not 0 <= d <= D:
        raise ValueError(f"delay index d={d} outside [0, D={D}]")
    body = np.kron(chip_sequence(frame).astype(float), sampled.g)
    s = np.zeros(REPLY_CHIPS * sampled.M + D, dtype=complex)
    s[d : d + body.size] = body
    return s


@dataclass(frozen=True)
class ReceiverSetup:
    """Sampling grid and derived index bounds for one receiver configuration."""

    pulse: PulseSpec = field(default_factory=PulseSpec)
    filter: FilterSpec = field(default_factory=FilterSpec)
    tau_max: float = 21.4e-3
    T_s: float | None = None

    def __post_init__(self):
        if self.T_s is None:
            ts = self.filter.symbol_time if not self.filter.identity else self.pulse.T / 3
            object.__setattr__(self, "T_s", ts)

    @property
    def M(self) -> int:
        return samples_per_half_symbol(self.pulse.T, self.T_s)

    @property
    def tau_gr(self) -> float:
        return self.filter.tau_gr

    @property
    def D(self) -> int:
        return int(math.floor((self.tau_max + self.tau_gr) / self.T_s)) + 1

    @property
    def M_gr(self) -> int:
        return int(math.floor(self.tau_gr / self.T_s)) + 1

    @property
    def N(self) -> int:
        return REPLY_CHIPS * self.M + self.D

    def delay_index(self, tau: float) -> int:
        return int(math.floor((tau + self.tau_gr) / self.T_s)) + 1

    @cached_property
    def sampled(self) -> SampledPulse:
        return sample_pulse(self.pulse, self.filter, self.T_s)


def dump_csv(samples, path) -> None:
    samples = np.asarray(samples, dtype=complex)
    np.savetxt(path, np.column_stack([samples.real, samples.imag]), delimiter=",", header="re,im", comments="")
