"""End-to-end receiver chain for a roster of cooperative intruders.

Interrogation and channel sensing are not simulated: each obstacle in the
scenario is taken as already detected, and its scan sector is a fixed-width
window around the true direction.  For every obstacle the DF4 reply is
synthesized, then timing, bit decisions, Doppler, angle of arrival, parity
check, range selection and risk classification run on the noisy samples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .aoa import ScanSector, estimate_aoa
from .channel import ArrayGeometry, ChannelParams, SampledSignal, apply_channel, array_rows, snapshot_rows
from .classify import RiskClass, SafetyThresholds, classify
from .constants import CARRIER_HZ, SPEED_OF_LIGHT
from .doppler import doppler_shift, estimate_doppler, extract_phases, radial_velocity
from .exceptions import ConfigError
from .frames import (
    ALT_MAX_FT,
    ALT_MIN_FT,
    ALT_STEP_FT,
    Df4Frame,
    build_frame,
    check_crc,
    decode_altitude,
    feet_to_meters,
    meters_to_feet,
    nonzero_chip_indices,
    ppm_expand,
)
from .ranging import RangeEstimate, select_range
from .sync_detect import detect_symbols, estimate_timing
from .waveform import FilterSpec, PulseSpec, ReceiverSetup, synthesize_clean


@dataclass(frozen=True)
class UavState:
    h: float = 1000.0
    phi_v: float = 0.0
    theta_v: float = 0.0


@dataclass(frozen=True)
class Obstacle:
    """Intruder truth as configured.

    ``theta`` is the nominal elevation.  The reported altitude only has
    25-ft resolution, so the simulated altitude is snapped to that grid and
    the elevation actually used is recomputed from it (see
    ``resolve_obstacle``).
    Giving ``h_a`` instead pins the altitude and derives the elevation.
    """

    R: float
    theta: float | None = None
    phi: float = 90.0
    v_r: float = 0.0
    address: int = 0x4840D6
    h_a: float | None = None
    jitter: float = 0.0
    flip_bits: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.R > 0:
            raise ConfigError("obstacle range must be positive")
        if (self.theta is None) == (self.h_a is None):
            raise ConfigError("give exactly one of theta or h_a")
        if not 0 < self.phi < 180:
            raise ConfigError("azimuth must lie in (0, 180)")
        if self.theta is not None and not -90 < self.theta < 90:
            raise ConfigError("elevation must lie in (-90, 90)")
        if not 0 <= self.address <= 0xFFFFFF:
            raise ConfigError("address must be a 24-bit value")
        if self.jitter < 0:
            raise ConfigError("transponder jitter must be non-negative")
        if any(not 0 <= b < 56 for b in self.flip_bits):
            raise ConfigError("flip_bits entries must index the 56 payload bits")


@dataclass(frozen=True)
class ObstacleTruth:
    R: float
    theta: float
    phi: float
    v_r: float
    h_a: float
    altitude_ft: int
    address: int
    jitter: float
    flip_bits: tuple[int, ...]


def _snap_feet(h_ft: float, h_uav_ft: float, R_ft: float) -> int:
    """Nearest 25-ft level on the far side of h_ft from the UAV, kept inside the range."""
    step = ALT_STEP_FT if h_ft >= h_uav_ft else -ALT_STEP_FT
    grid = step * math.ceil(h_ft / step - 1e-9)
    while abs(grid - h_uav_ft) >= R_ft:
        grid -= step
    if grid == h_uav_ft:
        raise ConfigError("no 25-ft altitude level gives a nonzero elevation at this range")
    return int(grid)


def resolve_obstacle(ob: Obstacle, h: float) -> ObstacleTruth:
    """Snap the intruder altitude to the 25-ft code and derive a consistent elevation."""
    h_ft = meters_to_feet(h)
    if ob.h_a is not None:
        alt_ft = meters_to_feet(ob.h_a)
        if abs(alt_ft - ALT_STEP_FT * round(alt_ft / ALT_STEP_FT)) > 1e-6:
            raise ConfigError("h_a must be a multiple of 25 ft")
        alt_ft = int(ALT_STEP_FT * round(alt_ft / ALT_STEP_FT))
    else:
        alt_ft = _snap_feet(meters_to_feet(h + ob.R * math.sin(math.radians(ob.theta))), h_ft, meters_to_feet(ob.R))
    if not ALT_MIN_FT <= alt_ft <= ALT_MAX_FT:
        raise ConfigError(f"intruder altitude {alt_ft} ft outside the reportable range")
    h_a = feet_to_meters(alt_ft)
    ratio = (h_a - h) / ob.R
    if not -1 < ratio < 1 or ratio == 0:
        raise ConfigError("altitude difference incompatible with range")
    theta = math.degrees(math.asin(ratio))
    return ObstacleTruth(ob.R, theta, ob.phi, ob.v_r, h_a, alt_ft, ob.address, ob.jitter, ob.flip_bits)


@dataclass(frozen=True)
class ChannelConfig:
    P_t: float = 10 ** 0.8
    eta0: float = 1.0
    eta: float = 1.0
    alpha: float = 1.0
    N0: float = 2.4e-21
    f_c: float = CARRIER_HZ

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.f_c


@dataclass(frozen=True)
class Scenario:
    uav: UavState = field(default_factory=UavState)
    obstacles: tuple[Obstacle, ...] = ()
    channel: ChannelConfig = field(default_factory=ChannelConfig)
    receiver: ReceiverSetup = field(default_factory=ReceiverSetup)
    array: ArrayGeometry = field(default_factory=ArrayGeometry)
    thresholds: SafetyThresholds = field(default_factory=SafetyThresholds)
    epsilon_theta: float = 1.0
    sector_width_theta: float = 60.0
    sector_width_phi: float = 60.0
    grid_step: float = 0.5
    rtt_group_delay_correction: bool = False
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if self.epsilon_theta < 0:
            raise ConfigError("epsilon_theta must be non-negative")
        if self.grid_step <= 0 or self.sector_width_theta <= 0 or self.sector_width_phi <= 0:
            raise ConfigError("sector widths and grid step must be positive")
        geom = replace(self.array)  # validated by its own constructor
        if geom.eta != self.channel.eta or geom.alpha != self.channel.alpha:
            object.__setattr__(self, "array", replace(geom, eta=self.channel.eta, alpha=self.channel.alpha))
        for ob in self.obstacles:
            truth = resolve_obstacle(ob, self.uav.h)
            tau = 2 * truth.R / SPEED_OF_LIGHT + truth.jitter
            if self.receiver.delay_index(tau) > self.receiver.D:
                raise ConfigError(f"obstacle at {ob.R} m lies beyond the listening window")

    def truths(self) -> list[ObstacleTruth]:
        return [resolve_obstacle(ob, self.uav.h) for ob in self.obstacles]

    def sector_for(self, truth: ObstacleTruth) -> ScanSector:
        return ScanSector.centered(
            truth.theta, truth.phi, self.sector_width_theta, self.sector_width_phi, self.grid_step
        )


@dataclass(frozen=True)
class ObstacleEstimate:
    index: int
    n0_hat: int
    d: int
    b_hat: np.ndarray
    f_D_hat: float
    v_r_hat: float
    theta_hat: float
    phi_hat: float
    crc_ok: bool
    altitude_decoded: float | None
    range: RangeEstimate
    risk: RiskClass

    @property
    def R_hat(self) -> float:
        return self.range.R_hat


def obstacle_rng(seed: int, trial: int, k: int) -> np.random.Generator:
    # SFC64 draws normals noticeably faster than the default PCG64, and the
    # listening-window noise dominates trial cost
    return np.random.Generator(np.random.SFC64(np.random.SeedSequence(seed, spawn_key=(trial, k))))


def true_risk(truth: ObstacleTruth, scenario: Scenario) -> RiskClass:
    u = scenario.uav
    return classify(truth.R, truth.phi, truth.theta, truth.v_r, u.phi_v, u.theta_v, scenario.thresholds)


def transmitted_frame(truth: ObstacleTruth) -> Df4Frame:
    frame = build_frame(truth.altitude_ft, truth.address)
    if not truth.flip_bits:
        return frame
    bits = frame.bits.copy()
    bits[list(truth.flip_bits)] ^= 1
    return Df4Frame(bits)


def omni_signal(scenario: Scenario, truth: ObstacleTruth, rng: np.random.Generator):
    """Noisy omnidirectional reply, the clean reply, its delay index and channel."""
    rx = scenario.receiver
    ch = scenario.channel
    d = rx.delay_index(2 * truth.R / SPEED_OF_LIGHT + truth.jitter)
    s = synthesize_clean(transmitted_frame(truth), rx.sampled, d, rx.D)
    params = ChannelParams(
        R=truth.R,
        f_D=doppler_shift(truth.v_r, ch.f_c),
        psi0=rng.uniform(0, 2 * math.pi),
        P_t=ch.P_t,
        eta0=ch.eta0,
        N0=ch.N0,
        f_c=ch.f_c,
    )
    y = apply_channel(s, params, rx.T_s, rng)
    return SampledSignal(y, rx.T_s, rx.M, rx.D, rx.M_gr), s, d, params


@dataclass(frozen=True)
class Observation:
    """What the receiver has in hand for one reply before estimation proper."""

    y: SampledSignal
    params: ChannelParams
    d: int
    n0_hat: int
    b_hat: np.ndarray
    Y: np.ndarray  # array snapshot, one row per sample of the detected on-chips


def observe(scenario: Scenario, truth: ObstacleTruth, rng: np.random.Generator) -> Observation:
    """Omni reply, timing, bit decisions and the matching array snapshot."""
    rx = scenario.receiver
    y, s, d, params = omni_signal(scenario, truth, rng)
    n0_hat = estimate_timing(y).n0_hat
    b_hat = detect_symbols(y.samples, n0_hat, rx.M)
    # the snapshot uses the on-chips the receiver itself detected
    rows = snapshot_rows(n0_hat, nonzero_chip_indices(ppm_expand(b_hat)), rx.M)
    psi_a = rng.uniform(0, 2 * math.pi)
    Y = array_rows(rows, s, params, scenario.array, truth.theta, truth.phi, rx.T_s, psi_a, rng)
    return Observation(y, params, d, n0_hat, b_hat, Y)


def process_obstacle(scenario: Scenario, truth: ObstacleTruth, rng: np.random.Generator, index: int = 0) -> ObstacleEstimate:
    rx = scenario.receiver
    M, T_s = rx.M, rx.T_s
    ob = observe(scenario, truth, rng)

    f_D_hat = estimate_doppler(extract_phases(ob.y.samples, ob.n0_hat, ob.b_hat, M), M, T_s)
    v_r_hat = radial_velocity(f_D_hat, ob.params.f_c)
    theta_hat, phi_hat = estimate_aoa(ob.Y, scenario.sector_for(truth), scenario.array, ob.params.wavelength)

    crc_ok = check_crc(ob.b_hat, truth.address)
    altitude = None
    if crc_ok:
        try:
            altitude = feet_to_meters(decode_altitude(Df4Frame(ob.b_hat).altitude_code))
        except ValueError:
            crc_ok = False
    rng_est = select_range(
        crc_ok,
        theta_hat,
        scenario.epsilon_theta,
        scenario.uav.h,
        altitude,
        ob.n0_hat,
        T_s,
        rx.tau_gr,
        scenario.rtt_group_delay_correction,
    )
    u = scenario.uav
    risk = classify(rng_est.R_hat, phi_hat, theta_hat, v_r_hat, u.phi_v, u.theta_v, scenario.thresholds)
    return ObstacleEstimate(
        index=index,
        n0_hat=ob.n0_hat,
        d=ob.d,
        b_hat=ob.b_hat,
        f_D_hat=f_D_hat,
        v_r_hat=v_r_hat,
        theta_hat=theta_hat,
        phi_hat=phi_hat,
        crc_ok=crc_ok,
        altitude_decoded=altitude,
        range=rng_est,
        risk=risk,
    )


def run_saa(scenario: Scenario, trial: int = 0) -> list[ObstacleEstimate]:
    """One estimate record per obstacle; each obstacle draws from its own seed stream."""
    return [
        process_obstacle(scenario, truth, obstacle_rng(scenario.seed, trial, k), k)
        for k, truth in enumerate(scenario.truths())
    ]


def reference_scenario(obstacles=(), **overrides) -> Scenario:
    """Scenario with the default link budget, waveform, array and thresholds."""
    base = dict(
        receiver=ReceiverSetup(PulseSpec(), FilterSpec()),
        obstacles=tuple(obstacles),
    )
    base.update(overrides)
    return Scenario(**base)
