"""Command-line front end: ``qwthermo {run,sweep,reproduce-fig2,reproduce-fig3,check}``."""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path

from . import harness
from .harness import ConfigError, ExperimentConfig, ThermoNotJustified
from .thermo import DegenerateDynamics, DegenerateTemperature
from .walk import ChiralitySpec, Gaussian, InitialStateSpec, Localized, Uniform

EXIT_OK = 0
EXIT_IO = 1
EXIT_CONFIG = 2
EXIT_THERMO = 3
EXIT_CHECK = 4

# config-file key -> (argparse dest, converter)
_CONFIG_KEYS = {
    "theta": ("theta", float),
    "sigma": ("sigma", float),
    "uniform": ("uniform", int),
    "localized": ("localized", int),
    "gamma": ("gamma", float),
    "phi": ("phi", float),
    "steps": ("steps", int),
    "epsilon": ("epsilon", float),
    "record_every": ("record_every", int),
    "out": ("out", str),
    "force_thermo": ("force_thermo", None),
    "sigmas": ("sigmas", str),
    "out_dir": ("out_dir", str),
    "jobs": ("jobs", int),
}
_FAMILIES = ("sigma", "uniform", "localized")


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"not a boolean: {text!r}")


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; blank lines and ``#`` comments are ignored."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        dest, conv = _CONFIG_KEYS[key]
        try:
            values[dest] = _parse_bool(value) if conv is None else conv(value)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key}: {value!r}") from exc
    return values


def _merge(args: argparse.Namespace) -> dict:
    # flags win over the config file
    merged = read_config_file(args.config) if args.config else {}
    flag_family = any(getattr(args, f, None) is not None for f in _FAMILIES)
    if flag_family:
        for f in _FAMILIES:
            merged.pop(f, None)
    for key, value in vars(args).items():
        if key in ("config", "command", "func"):
            continue
        if value is not None and value is not False:
            merged[key] = value
    return merged


def _chirality(opts: dict) -> ChiralitySpec:
    return ChiralitySpec(opts.get("gamma", 0.0), opts.get("phi", 0.0))


def _experiment(opts: dict, initial: InitialStateSpec) -> ExperimentConfig:
    return ExperimentConfig(
        initial=initial,
        theta=opts.get("theta", math.pi / 4),
        steps=opts.get("steps"),
        epsilon=opts.get("epsilon", 1.0),
        output_path=opts.get("out", "-"),
        record_every=opts.get("record_every", 1),
        force_thermo=bool(opts.get("force_thermo", False)),
    )


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    opts = _merge(args)
    given = [f for f in _FAMILIES if f in opts]
    if len(given) != 1:
        raise ConfigError("exactly one of --sigma, --uniform, --localized is required")
    family = {
        "sigma": Gaussian,
        "uniform": Uniform,
        "localized": Localized,
    }[given[0]](opts[given[0]])
    return _experiment(opts, InitialStateSpec(family, _chirality(opts)))


def _print_summary(summary: harness.RunSummary) -> None:
    for key, value in summary.as_dict().items():
        if key == "warnings":
            for w in value:
                print(f"warning = {w}", file=sys.stderr)
            continue
        print(f"{key} = {value}", file=sys.stderr)


def cmd_run(args) -> int:
    config = config_from_args(args)
    _, summary = harness.run(config)
    _print_summary(summary)
    return EXIT_OK


def cmd_sweep(args) -> int:
    opts = _merge(args)
    if "sigmas" not in opts:
        raise ConfigError("--sigmas is required for sweep")
    try:
        sigmas = [float(s) for s in opts["sigmas"].split(",") if s.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad --sigmas list {opts['sigmas']!r}") from exc
    base_sigma = sigmas[0] if sigmas and sigmas[0] > 0 else 1.0
    base = _experiment(
        dict(opts, out=None), InitialStateSpec(Gaussian(base_sigma), _chirality(opts))
    )
    out_dir = opts.get("out_dir")
    if out_dir is not None:
        Path(out_dir).mkdir(parents=True, exist_ok=True)
    results = harness.sweep(base, sigmas, jobs=opts.get("jobs", 1), out_dir=out_dir)
    with harness._open_output(opts.get("out", "-")) as fh:
        harness.write_sweep_csv(sigmas, results, fh)
    return EXIT_OK


def _cmd_reproduce(which):
    def cmd(args) -> int:
        result = harness.reproduce_figure(which, args.out_dir, steps=args.steps, jobs=args.jobs)
        for path in result.csv_paths:
            print(path)
        print(result.script_path)
        return EXIT_OK
    return cmd


def cmd_check(args) -> int:
    return harness.check(corrupt_beta_sign=args.corrupt_beta_sign)


def _add_experiment_flags(p: argparse.ArgumentParser, with_family: bool = True) -> None:
    p.add_argument("--config", help="key=value config file; command-line flags take precedence")
    p.add_argument("--theta", type=float, help="coin angle in radians (default pi/4)")
    if with_family:
        fam = p.add_mutually_exclusive_group()
        fam.add_argument("--sigma", type=float, help="Gaussian walker of width SIGMA")
        fam.add_argument("--uniform", type=int, help="uniform superposition over an odd number of sites")
        fam.add_argument("--localized", type=int, help="walker localized at one site")
    p.add_argument("--gamma", type=float, help="chirality polar angle in radians (default 0)")
    p.add_argument("--phi", type=float, help="chirality phase in radians (default 0)")
    p.add_argument("--steps", type=int, help="number of walk steps")
    p.add_argument("--epsilon", type=float, help="energy scale of the entanglement Hamiltonian")
    p.add_argument("--record-every", type=int, dest="record_every", help="CSV row stride")
    p.add_argument("--out", help="output CSV path ('-' for stdout, the default)")
    p.add_argument("--force-thermo", action="store_true", dest="force_thermo",
                   help="analyse a localized walker anyway")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwthermo",
        description="Entropy production of the coin in a discrete-time quantum walk on the line.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="simulate one walker and write its time series")
    _add_experiment_flags(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="one Gaussian run per width, summary as CSV")
    _add_experiment_flags(p, with_family=False)
    p.add_argument("--sigmas", help="comma-separated Gaussian widths, e.g. 5,10,20,30")
    p.add_argument("--out-dir", dest="out_dir", help="also write one time-series CSV per width here")
    p.add_argument("--jobs", type=int, help="worker processes (default 1)")
    p.set_defaults(func=cmd_sweep)

    for which in ("fig2", "fig3"):
        p = sub.add_parser(f"reproduce-{which}", help=f"data and gnuplot script for {which}")
        p.add_argument("--out-dir", dest="out_dir", default=".")
        p.add_argument("--steps", type=int, default=harness.FIGURE_STEPS)
        p.add_argument("--jobs", type=int, default=1)
        p.set_defaults(func=_cmd_reproduce(which))

    p = sub.add_parser("check", help="fast invariant suite")
    p.add_argument("--corrupt-beta-sign", action="store_true", dest="corrupt_beta_sign",
                   help=argparse.SUPPRESS)
    p.set_defaults(func=cmd_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s: %(message)s",
    )
    del args.verbose
    try:
        return args.func(args)
    except (ThermoNotJustified, DegenerateTemperature, DegenerateDynamics) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_THERMO
    except (ConfigError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
