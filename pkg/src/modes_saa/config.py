"""YAML configuration for scenarios and Monte Carlo runs.

Every section is optional and falls back to the default link budget,
waveform, array and thresholds.  Unknown keys are rejected so that typos do
not silently fall back to defaults.
"""

from __future__ import annotations

import dataclasses
import re
from pathlib import Path

import yaml

from .channel import ArrayGeometry
from .classify import SafetyThresholds
from .exceptions import ConfigError
from .montecarlo import ClassificationConfig, RttConfig, SweepConfig
from .pipeline import ChannelConfig, Obstacle, Scenario, UavState
from .waveform import FilterSpec, PulseSpec, ReceiverSetup

_WAVEFORM_KEYS = {"T", "tau_r", "B", "beta", "span", "tau_gr", "tau_max", "T_s"}
_SECTOR_KEYS = {"width_theta", "width_phi", "step"}


def _build(cls, data, what: str):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError(f"{what} must be a mapping")
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ConfigError(f"unknown {what} keys: {sorted(unknown)}")
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"bad {what}: {exc}") from exc


def _check_keys(data: dict, allowed: set, what: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown {what} keys: {sorted(unknown)}")


def receiver_from_dict(data) -> ReceiverSetup:
    data = dict(data or {})
    _check_keys(data, _WAVEFORM_KEYS, "waveform")
    pulse = PulseSpec(T=data.get("T", 0.5e-6), tau_r=data.get("tau_r", 0.01e-6))
    filt = FilterSpec(
        B=data.get("B", 6e6),
        beta=data.get("beta", 0.95),
        span=data.get("span", 8),
        tau_gr=data.get("tau_gr", 270e-6),
    )
    return ReceiverSetup(pulse, filt, tau_max=data.get("tau_max", 21.4e-3), T_s=data.get("T_s"))


SCENARIO_KEYS = {
    "uav",
    "obstacles",
    "channel",
    "waveform",
    "array",
    "thresholds",
    "epsilon_theta",
    "sector",
    "rtt_group_delay_correction",
    "seed",
}


def scenario_from_dict(data) -> Scenario:
    data = dict(data or {})
    _check_keys(data, SCENARIO_KEYS, "scenario")
    sector = dict(data.get("sector") or {})
    _check_keys(sector, _SECTOR_KEYS, "sector")
    obstacles = tuple(_build(Obstacle, ob, "obstacle") for ob in data.get("obstacles") or ())
    try:
        return Scenario(
            uav=_build(UavState, data.get("uav"), "uav"),
            obstacles=obstacles,
            channel=_build(ChannelConfig, data.get("channel"), "channel"),
            receiver=receiver_from_dict(data.get("waveform")),
            array=_build(ArrayGeometry, data.get("array"), "array"),
            thresholds=_build(SafetyThresholds, data.get("thresholds"), "thresholds"),
            epsilon_theta=data.get("epsilon_theta", 1.0),
            sector_width_theta=sector.get("width_theta", 60.0),
            sector_width_phi=sector.get("width_phi", 60.0),
            grid_step=sector.get("step", 0.5),
            rtt_group_delay_correction=bool(data.get("rtt_group_delay_correction", False)),
            seed=int(data.get("seed", 0)),
        )
    except ConfigError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def _run_config(cls, data, scenario: Scenario, seed: int, what: str):
    data = dict(data)
    data.pop("scenario", None)
    names = {f.name for f in dataclasses.fields(cls)}
    _check_keys(data, names - {"scenario", "seed"}, what)
    for key in ("values", "epsilons", "alpha_grid", "R_range", "v_r_range"):
        if key in data:
            data[key] = tuple(data[key])
    return cls(scenario=scenario, seed=seed, **data)


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads exponents without a sign (6.0e6) as floats."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


def load_yaml(path) -> dict:
    with open(Path(path)) as fh:
        data = yaml.load(fh, Loader=_Loader)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError("configuration file must hold a mapping")
    return data


def load_run(path, seed: int | None = None):
    """Parse a run file into (scenario, sweep, rtt, classification).

    Top-level keys are the scenario keys plus optional ``sweep``, ``rtt`` and
    ``classification`` sections; absent sections come back as None.
    """
    data = load_yaml(path)
    runs = {k: data.pop(k) for k in ("sweep", "rtt", "classification") if k in data}
    if seed is not None:
        data["seed"] = seed
    scenario = scenario_from_dict(data)
    s = scenario.seed
    sweep = _run_config(SweepConfig, runs["sweep"], scenario, s, "sweep") if "sweep" in runs else None
    rtt = _run_config(RttConfig, runs["rtt"], scenario, s, "rtt") if "rtt" in runs else None
    cls = (
        _run_config(ClassificationConfig, runs["classification"], scenario, s, "classification")
        if "classification" in runs
        else None
    )
    return scenario, sweep, rtt, cls
