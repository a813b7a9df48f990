"""Monte Carlo sweeps, range-error probability curves and classification confusion."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .aoa import aoa_mse_theoretical, xi
from .channel import pathloss
from .classify import RiskClass
from .constants import SPEED_OF_LIGHT
from .doppler import (
    doppler_shift,
    estimate_doppler,
    extract_phases,
    rmse_theoretical,
    sigma_theta_sq,
)
from .exceptions import ConfigError
from .frames import nonzero_chip_indices, ppm_expand
from .pipeline import (
    Obstacle,
    ObstacleTruth,
    Scenario,
    omni_signal,
    process_obstacle,
    resolve_obstacle,
    transmitted_frame,
    true_risk,
)
from .ranging import RangeMethod, range_rmse_theoretical, range_rtt
from .sync_detect import detect_symbols, estimate_timing

SWEEP_VARIABLES = ("f_D", "R", "theta", "phi")
ESTIMATORS = ("doppler", "range", "aoa")


@dataclass(frozen=True)
class SweepConfig:
    """A one-dimensional sweep.

    ``theta=None`` draws |theta| ~ U(1, 90) with a random sign per trial and
    ``phi=None`` draws phi ~ U(0, 180).  ``f_D`` overrides ``v_r`` when set.
    """

    sweep: str
    values: tuple[float, ...]
    estimator: str = "doppler"
    trials: int = 1000
    seed: int = 0
    R: float = 600.0
    theta: float | None = 20.0
    phi: float | None = None
    v_r: float = 55.0
    f_D: float | None = None
    scenario: Scenario = field(default_factory=Scenario)

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.sweep not in SWEEP_VARIABLES:
            raise ConfigError(f"unknown sweep variable {self.sweep!r}; expected one of {SWEEP_VARIABLES}")
        if self.estimator not in ESTIMATORS:
            raise ConfigError(f"unknown estimator {self.estimator!r}; expected one of {ESTIMATORS}")
        if self.trials < 1 or not self.values:
            raise ConfigError("need at least one trial and one sweep value")


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    estimator: str
    empirical_rmse: float
    theoretical_rmse: float
    bias: float
    trials: int
    method_triangular_fraction: float

    CSV_COLUMNS = (
        "sweep_value",
        "estimator",
        "empirical_rmse",
        "theoretical_rmse",
        "bias",
        "trials",
        "method_triangular_fraction",
    )

    def as_tuple(self):
        return tuple(getattr(self, c) for c in self.CSV_COLUMNS)


def trial_rng(seed: int, point: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.SFC64(np.random.SeedSequence(seed, spawn_key=(point, trial))))


def draw_theta(rng: np.random.Generator, lo: float = 1.0, hi: float = 90.0) -> float:
    mag = rng.uniform(lo, hi)
    if mag >= 90:
        mag = np.nextafter(90.0, 0.0)
    return float(mag if rng.random() < 0.5 else -mag)


def draw_phi(rng: np.random.Generator) -> float:
    return float(rng.uniform(0, 180)) or 1e-9


def _point_obstacle(cfg: SweepConfig, value: float, rng: np.random.Generator) -> Obstacle:
    params = dict(R=cfg.R, theta=cfg.theta, phi=cfg.phi, v_r=cfg.v_r)
    if cfg.f_D is not None:
        params["v_r"] = cfg.f_D * SPEED_OF_LIGHT / cfg.scenario.channel.f_c
    if cfg.sweep == "f_D":
        params["v_r"] = value * SPEED_OF_LIGHT / cfg.scenario.channel.f_c
    else:
        params[cfg.sweep] = value
    if params["theta"] is None:
        params["theta"] = draw_theta(rng)
    if params["phi"] is None:
        params["phi"] = draw_phi(rng)
    return Obstacle(**params)


def _xi_and_noise(sc: Scenario, R: float):
    ch = sc.channel
    L = pathloss(R, ch.wavelength)
    return xi(ch.P_t, ch.eta, ch.alpha, L, sc.receiver.sampled.g), ch.N0, L


def doppler_trial(sc: Scenario, truth: ObstacleTruth, rng: np.random.Generator) -> float:
    """Doppler estimate from the omnidirectional channel alone."""
    y, _, _, _ = omni_signal(sc, truth, rng)
    M = sc.receiver.M
    n0 = estimate_timing(y).n0_hat
    b_hat = detect_symbols(y.samples, n0, M)
    return estimate_doppler(extract_phases(y.samples, n0, b_hat, M), M, sc.receiver.T_s)


def doppler_rmse_for(sc: Scenario, truth: ObstacleTruth) -> float:
    ch, rx = sc.channel, sc.receiver
    if ch.N0 == 0:
        return 0.0
    u = nonzero_chip_indices(ppm_expand(transmitted_frame(truth)))
    var = sigma_theta_sq(pathloss(truth.R, ch.wavelength), ch.N0, ch.P_t, ch.eta0, rx.sampled.g_nc)
    return rmse_theoretical(u, rx.M, rx.T_s, var)


def aoa_mse_for(sc: Scenario, truth: ObstacleTruth) -> float:
    if sc.channel.N0 == 0:
        return 0.0
    x, n0, _ = _xi_and_noise(sc, truth.R)
    mse, _ = aoa_mse_theoretical(
        truth.theta, truth.phi, sc.array, sc.channel.wavelength, x, n0, sc.receiver.M
    )
    return mse


def range_rmse_for(sc: Scenario, truth: ObstacleTruth) -> float:
    if sc.channel.N0 == 0:
        return 0.0
    x, n0, _ = _xi_and_noise(sc, truth.R)
    return range_rmse_theoretical(
        truth.theta, truth.phi, truth.h_a - sc.uav.h, sc.array, sc.channel.wavelength, x, n0, sc.receiver.M
    )


def run_point(cfg: SweepConfig, point: int, value: float) -> tuple[SweepRow, np.ndarray]:
    """Aggregate row plus the raw per-trial errors for one sweep value."""
    sc = cfg.scenario
    errors = np.empty(cfg.trials)
    theo_sq = np.empty(cfg.trials)
    tri = 0
    for t in range(cfg.trials):
        rng = trial_rng(cfg.seed, point, t)
        truth = resolve_obstacle(_point_obstacle(cfg, value, rng), sc.uav.h)
        if cfg.estimator == "doppler":
            f_true = doppler_shift(truth.v_r, sc.channel.f_c)
            errors[t] = doppler_trial(sc, truth, rng) - f_true
            theo_sq[t] = doppler_rmse_for(sc, truth) ** 2
            continue
        est = process_obstacle(sc, truth, rng)
        tri += est.range.method is RangeMethod.TRIANGULAR
        if cfg.estimator == "range":
            errors[t] = est.R_hat - truth.R
            theo_sq[t] = range_rmse_for(sc, truth) ** 2
        else:
            errors[t] = math.sin(math.radians(est.theta_hat)) - math.sin(math.radians(truth.theta))
            theo_sq[t] = aoa_mse_for(sc, truth)
    row = SweepRow(
        sweep_value=value,
        estimator=cfg.estimator,
        empirical_rmse=float(np.sqrt(np.mean(errors**2))),
        theoretical_rmse=float(np.sqrt(np.mean(theo_sq))),
        bias=float(np.mean(errors)),
        trials=cfg.trials,
        method_triangular_fraction=float("nan") if cfg.estimator == "doppler" else tri / cfg.trials,
    )
    return row, errors


def monte_carlo(cfg: SweepConfig) -> list[SweepRow]:
    return [run_point(cfg, k, v)[0] for k, v in enumerate(cfg.values)]


def write_sweep_csv(rows, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SweepRow.CSV_COLUMNS)
        for r in rows:
            w.writerow(r.as_tuple())


# range-error probability ---------------------------------------------------


@dataclass(frozen=True)
class RttConfig:
    """Range-error probability of the proposed ranging against RTT.

    Both use the same reply; the RTT curve removes the known filter group
    delay so that only transponder jitter and sample quantization remain.
    """

    epsilons: tuple[float, ...] = (0.1e-6, 0.5e-6, 1.0e-6)
    alpha_grid: tuple[float, ...] = tuple(float(a) for a in range(0, 201, 10))
    trials: int = 1000
    seed: int = 0
    R_range: tuple[float, float] = (100.0, 1000.0)
    v_r: float = 55.0
    scenario: Scenario = field(default_factory=Scenario)

    def __post_init__(self):
        if any(e < 0 for e in self.epsilons):
            raise ConfigError("transponder jitter bound must be non-negative")
        if self.trials < 1:
            raise ConfigError("need at least one trial")


@dataclass(frozen=True)
class RttCurve:
    epsilon: float
    alpha: np.ndarray
    p_triangular: np.ndarray
    p_rtt: np.ndarray


def error_probability(errors, alpha) -> np.ndarray:
    """P{|error| <= alpha} for each alpha."""
    e = np.sort(np.abs(np.asarray(errors, dtype=float)))
    return np.searchsorted(e, np.asarray(alpha, dtype=float), side="right") / e.size


def rtt_comparison(cfg: RttConfig) -> list[RttCurve]:
    sc = replace(cfg.scenario, rtt_group_delay_correction=True)
    rx = sc.receiver
    curves = []
    for k, eps in enumerate(cfg.epsilons):
        e_tri = np.empty(cfg.trials)
        e_rtt = np.empty(cfg.trials)
        for t in range(cfg.trials):
            rng = trial_rng(cfg.seed, k, t)
            ob = Obstacle(
                R=float(rng.uniform(*cfg.R_range)),
                theta=draw_theta(rng),
                phi=draw_phi(rng),
                v_r=cfg.v_r,
                jitter=float(rng.uniform(0, eps)) if eps > 0 else 0.0,
            )
            truth = resolve_obstacle(ob, sc.uav.h)
            est = process_obstacle(sc, truth, rng)
            e_tri[t] = est.R_hat - truth.R
            e_rtt[t] = range_rtt(est.n0_hat, rx.T_s, rx.tau_gr, True) - truth.R
        alpha = np.asarray(cfg.alpha_grid, dtype=float)
        curves.append(RttCurve(eps, alpha, error_probability(e_tri, alpha), error_probability(e_rtt, alpha)))
    return curves


def write_rtt_csv(curves, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("epsilon", "alpha_r", "p_triangular", "p_rtt"))
        for c in curves:
            for a, pt, pr in zip(c.alpha, c.p_triangular, c.p_rtt):
                w.writerow((c.epsilon, a, pt, pr))


# classification -------------------------------------------------------------

CLASSES = (RiskClass.H0, RiskClass.H1, RiskClass.H2)


@dataclass(frozen=True)
class ClassificationConfig:
    trials: int = 1000
    n_obstacles: int = 8
    seed: int = 0
    R_range: tuple[float, float] = (100.0, 1000.0)
    v_r_range: tuple[float, float] = (-139.0, 139.0)
    scenario: Scenario = field(default_factory=Scenario)

    def __post_init__(self):
        if self.trials < 1 or self.n_obstacles < 1:
            raise ConfigError("need at least one trial and one obstacle")


def random_roster(cfg: ClassificationConfig, rng: np.random.Generator) -> list[Obstacle]:
    return [
        Obstacle(
            R=float(rng.uniform(*cfg.R_range)),
            theta=draw_theta(rng),
            phi=draw_phi(rng),
            v_r=float(rng.uniform(*cfg.v_r_range)),
            address=int(rng.integers(0, 1 << 24)),
        )
        for _ in range(cfg.n_obstacles)
    ]


def classification_confusion(cfg: ClassificationConfig) -> dict[tuple[RiskClass, RiskClass], int]:
    """Counts keyed by (true class, predicted class), all nine cells present."""
    sc = cfg.scenario
    counts = {(a, b): 0 for a in CLASSES for b in CLASSES}
    for t in range(cfg.trials):
        rng = trial_rng(cfg.seed, 0, t)
        for ob in random_roster(cfg, rng):
            truth = resolve_obstacle(ob, sc.uav.h)
            est = process_obstacle(sc, truth, rng)
            counts[(true_risk(truth, sc), est.risk)] += 1
    return counts


def detection_probability(counts, cls: RiskClass = RiskClass.H0) -> float:
    total = sum(v for (a, _), v in counts.items() if a is cls)
    return counts[(cls, cls)] / total if total else float("nan")


def write_confusion_csv(counts, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(("true_class", "predicted_class", "count"))
        for (a, b), n in counts.items():
            w.writerow((a.value, b.value, n))
