"""Command-line entry point: ``modes-saa <subcommand> ...``."""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction

from . import __version__
from .aoa import dump_spectrum_csv, eigendecompose, refine_peak, sample_correlation, spectrum_grid
from .config import load_run
from .constants import CARRIER_HZ, SPEED_OF_LIGHT
from .doppler import max_unambiguous_doppler
from .exceptions import ConfigError
from .montecarlo import (
    ClassificationConfig,
    RttConfig,
    classification_confusion,
    detection_probability,
    monte_carlo,
    rtt_comparison,
    write_confusion_csv,
    write_rtt_csv,
    write_sweep_csv,
)
from .pipeline import Scenario, obstacle_rng, observe, run_saa


def _fmt_table(header, rows) -> str:
    cells = [list(map(str, header))] + [[str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells)


def cmd_simulate(args) -> int:
    scenario, _, _, _ = load_run(args.config, args.seed)
    if not scenario.obstacles:
        raise ConfigError("scenario lists no obstacles")
    results = run_saa(scenario, trial=args.trial)
    header = ("k", "R_true", "R_hat", "method", "theta_hat", "phi_hat", "v_r_hat", "crc", "alt_m", "risk")
    rows = []
    for truth, e in zip(scenario.truths(), results):
        alt = "-" if e.altitude_decoded is None else f"{e.altitude_decoded:.2f}"
        rows.append(
            (
                e.index,
                f"{truth.R:.1f}",
                f"{e.R_hat:.1f}",
                e.range.method.value,
                f"{e.theta_hat:.3f}",
                f"{e.phi_hat:.3f}",
                f"{e.v_r_hat:.2f}",
                "ok" if e.crc_ok else "fail",
                alt,
                e.risk.value,
            )
        )
    print(_fmt_table(header, rows))
    return 0


def cmd_montecarlo(args) -> int:
    scenario, sweep, _, cls = load_run(args.config, args.seed)
    if sweep is None and cls is None:
        raise ConfigError("configuration needs a 'sweep' or 'classification' section")
    if sweep is not None:
        if args.trials:
            sweep = type(sweep)(**{**sweep.__dict__, "trials": args.trials})
        rows = monte_carlo(sweep)
        write_sweep_csv(rows, args.output)
        print(f"wrote {len(rows)} rows to {args.output}")
    if cls is not None:
        if args.trials:
            cls = ClassificationConfig(**{**cls.__dict__, "trials": args.trials})
        counts = classification_confusion(cls)
        write_confusion_csv(counts, args.confusion)
        print(f"wrote confusion matrix to {args.confusion}; P(H0 -> H0) = {detection_probability(counts):.4f}")
    return 0


def cmd_rtt(args) -> int:
    if args.config:
        scenario, _, rtt, _ = load_run(args.config, args.seed)
        cfg = rtt or RttConfig(scenario=scenario, seed=scenario.seed)
    else:
        cfg = RttConfig(scenario=Scenario(seed=args.seed or 0), seed=args.seed or 0)
    overrides = {}
    if args.trials:
        overrides["trials"] = args.trials
    if args.epsilon:
        overrides["epsilons"] = tuple(e * 1e-6 for e in args.epsilon)
    if overrides:
        cfg = RttConfig(**{**cfg.__dict__, **overrides})
    curves = rtt_comparison(cfg)
    write_rtt_csv(curves, args.output)
    for c in curves:
        ok = bool((c.p_triangular >= c.p_rtt).all())
        print(f"epsilon={c.epsilon * 1e6:g} us: triangular >= rtt at every alpha_r: {ok}")
    return 0


def cmd_spectrum(args) -> int:
    scenario, _, _, _ = load_run(args.config, args.seed)
    truths = scenario.truths()
    if not 0 <= args.obstacle < len(truths):
        raise ConfigError(f"obstacle index {args.obstacle} out of range")
    truth = truths[args.obstacle]
    ob = observe(scenario, truth, obstacle_rng(scenario.seed, args.trial, args.obstacle))
    es = eigendecompose(sample_correlation(ob.Y))
    sector = scenario.sector_for(truth)
    th, ph, P = spectrum_grid(es.noise, sector, scenario.array, scenario.channel.wavelength)
    dump_spectrum_csv(args.output, th, ph, P)
    i, j = divmod(int(P.argmax()), P.shape[1])
    th_hat, ph_hat = refine_peak(es.noise, th[i], ph[j], sector, scenario.array, scenario.channel.wavelength)
    print(f"wrote {P.size} grid points to {args.output}; peak at theta={th_hat:.3f} phi={ph_hat:.3f}")
    return 0


def _parse_pri(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}") from exc


def cmd_ambiguity(args) -> int:
    scale = Fraction(1, 10**6) if args.microseconds else Fraction(1)
    pris = [p * scale for p in args.pri]
    f_max = max_unambiguous_doppler(pris)
    wavelength = SPEED_OF_LIGHT / args.carrier
    print(f"max |f_D| = {f_max} Hz ({float(f_max):.6g} Hz)")
    print(f"max |v_r| = {float(f_max) * wavelength:.6g} m/s")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="modes-saa", description="Mode S DF4 sense-and-avoid receiver simulator")
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--seed", type=int, default=None, help="base seed (default: config value, else 0)")
        sp.set_defaults(func=func)
        return sp

    sp = add("simulate", cmd_simulate, "run the receiver chain once on a scenario")
    sp.add_argument("config")
    sp.add_argument("--trial", type=int, default=0)

    sp = add("montecarlo", cmd_montecarlo, "run a sweep and/or classification study")
    sp.add_argument("config")
    sp.add_argument("--output", default="sweep.csv")
    sp.add_argument("--confusion", default="confusion.csv")
    sp.add_argument("--trials", type=int, default=None, help="override the trial count")

    sp = add("rtt-compare", cmd_rtt, "range-error probability: triangular vs round-trip time")
    sp.add_argument("config", nargs="?")
    sp.add_argument("--output", default="rtt.csv")
    sp.add_argument("--trials", type=int, default=None)
    sp.add_argument("--epsilon", type=float, nargs="+", help="jitter bounds in microseconds")

    sp = add("spectrum", cmd_spectrum, "dump the MUSIC spectrum grid for one obstacle")
    sp.add_argument("config")
    sp.add_argument("--obstacle", type=int, default=0)
    sp.add_argument("--trial", type=int, default=0)
    sp.add_argument("--output", default="spectrum.csv")

    sp = add("ambiguity", cmd_ambiguity, "largest unambiguous Doppler for a set of PRIs")
    sp.add_argument("pri", type=_parse_pri, nargs="+", help="PRIs as exact rationals, e.g. 1/2000000")
    sp.add_argument("--microseconds", action="store_true", help="PRIs are given in microseconds")
    sp.add_argument("--carrier", type=float, default=CARRIER_HZ)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
