"""
Experiment driver: evolve a walker, analyse the coin at every step, and write
the thermodynamic time series as CSV.
"""

from __future__ import annotations

import contextlib
import csv
import dataclasses
import logging
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence, TextIO, Union

import numpy as np

from . import reduced, thermo, walk
from .thermo import ThermoContext, TimeSeriesRecord
from .walk import ChiralitySpec, CoinParams, Gaussian, InitialStateSpec, Localized, Uniform

__all__ = [
    "CSV_COLUMNS",
    "ConfigError",
    "ThermoNotJustified",
    "ExperimentConfig",
    "RunSummary",
    "SweepFailure",
    "FigureOutput",
    "default_steps",
    "run",
    "write_csv",
    "sweep",
    "write_sweep_csv",
    "reproduce_figure",
    "check",
]

log = logging.getLogger(__name__)

CSV_COLUMNS = (
    "t", "norm", "s_vn", "energy", "heat_cum", "q_over_T",
    "sgen_balance", "sgen_relent", "bloch_x", "bloch_y", "bloch_z", "cos_alpha_t",
)
FIGURE_STEPS = 600
FIG2_SIGMAS = (30, 20, 10, 5)
FIG3_COUNT = 101


class ConfigError(ValueError):
    pass


class ThermoNotJustified(RuntimeError):
    """Thermodynamic analysis requested for a localized initial walker."""


@dataclass(frozen=True)
class ExperimentConfig:
    initial: InitialStateSpec
    theta: float = math.pi / 4
    steps: Optional[int] = None
    epsilon: float = 1.0
    output_path: Optional[Union[str, os.PathLike]] = None
    record_every: int = 1
    force_thermo: bool = False

    def __post_init__(self):
        if not isinstance(self.initial, InitialStateSpec):
            raise ConfigError(f"initial must be an InitialStateSpec, got {self.initial!r}")
        if not (math.isfinite(self.theta) and 0.0 <= self.theta <= math.pi / 2):
            raise ConfigError(f"theta must lie in [0, pi/2], got {self.theta!r}")
        if self.steps is not None and (int(self.steps) != self.steps or self.steps < 1):
            raise ConfigError(f"steps must be a positive integer, got {self.steps!r}")
        if not (math.isfinite(self.epsilon) and self.epsilon > 0):
            raise ConfigError(f"epsilon must be positive, got {self.epsilon!r}")
        if int(self.record_every) != self.record_every or self.record_every < 1:
            raise ConfigError(f"record_every must be a positive integer, got {self.record_every!r}")
        if self.record_every > self.n_steps:
            raise ConfigError(
                f"record_every ({self.record_every}) exceeds steps ({self.n_steps})"
            )

    @property
    def n_steps(self) -> int:
        return int(self.steps) if self.steps is not None else default_steps(self.initial)


def default_steps(initial: InitialStateSpec) -> int:
    """Run length long enough for the two outgoing peaks to separate."""
    family = initial.family
    if isinstance(family, Gaussian):
        return max(1, math.ceil(20 * family.sigma))
    if isinstance(family, Uniform):
        return 6 * family.count
    return 100


@dataclass(frozen=True)
class RunSummary:
    alpha: float
    beta_eps: float
    sgen_final: float
    sgen_asymptotic_predicted: float
    s_vn_final: float
    heat_final: float
    max_monotonicity_violation: float
    final_bloch_distance_to_eq: float
    steps_to_95pct: int
    max_energy_drift: float
    mean_rotation_deviation: float
    max_route_gap: float
    warnings: tuple[str, ...] = ()

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class SweepFailure:
    sigma: float
    error: str


@dataclass(frozen=True)
class FigureOutput:
    csv_paths: tuple[Path, ...]
    script_path: Path
    script_text: str


def _context_for(config: ExperimentConfig) -> ThermoContext:
    chirality = config.initial.chirality
    alpha = thermo.alpha_of(config.theta, chirality)
    return thermo.build_context(config.theta, config.epsilon, alpha)


def _simulate(config: ExperimentConfig, ctx: ThermoContext) -> list[TimeSeriesRecord]:
    state = walk.build_initial_state(config.initial)
    rho_0 = reduced.reduce(state)
    energy_0 = thermo.internal_energy(rho_0, ctx)
    records: list[TimeSeriesRecord] = []

    def observe(t, current):
        rho = reduced.reduce(current)
        norm = float(rho[0, 0].real + rho[1, 1].real)
        records.append(thermo.record(t, rho, rho_0, energy_0, norm, ctx))

    walk.evolve(state, CoinParams(config.theta), config.n_steps, observe)
    return records


def _summarize(records: Sequence[TimeSeriesRecord], ctx: ThermoContext,
               warnings: tuple[str, ...]) -> RunSummary:
    sgen = np.array([r.sgen_balance for r in records])
    final = records[-1]
    drops = sgen[:-1] - sgen[1:]
    violation = float(max(0.0, drops.max())) if drops.size else 0.0
    reached = np.flatnonzero(sgen >= 0.95 * sgen[-1])
    cos_alpha = math.cos(ctx.alpha)
    target = cos_alpha * ctx.axis_v
    blochs = [r.bloch for r in records]
    rotation = [thermo.rotation_diagnostic(b0, b1, ctx) for b0, b1 in zip(blochs, blochs[1:])]
    return RunSummary(
        alpha=ctx.alpha,
        beta_eps=ctx.beta_eps,
        sgen_final=final.sgen_balance,
        sgen_asymptotic_predicted=thermo.sgen_asymptotic(ctx.alpha),
        s_vn_final=final.s_vn,
        heat_final=final.heat_cum,
        max_monotonicity_violation=violation,
        final_bloch_distance_to_eq=float(np.linalg.norm(final.bloch.as_array() - target)),
        steps_to_95pct=int(records[reached[0]].t),
        max_energy_drift=float(max(abs(r.cos_alpha_t - cos_alpha) for r in records)),
        mean_rotation_deviation=float(np.mean(rotation)) if rotation else 0.0,
        max_route_gap=float(max(abs(r.sgen_balance - r.sgen_relent) for r in records)),
        warnings=warnings,
    )


def run(config: ExperimentConfig) -> tuple[list[TimeSeriesRecord], RunSummary]:
    """
    Evolve ``config`` and return the recorded rows and a run summary.

    Every step is analysed for the summary; rows are kept every
    ``record_every`` steps plus the final step. When ``output_path`` is set
    the rows are also written there as CSV ("-" means standard output).

    Raises
    ------
    ThermoNotJustified
        For a localized walker unless ``force_thermo`` is set.
    DegenerateTemperature, DegenerateDynamics
        If the thermal frame does not exist for this coin and chirality.
    """
    warnings: tuple[str, ...] = ()
    if isinstance(config.initial.family, Localized):
        if not config.force_thermo:
            raise ThermoNotJustified(
                "a localized walker does not relax to a Gibbs state of the "
                "entanglement Hamiltonian; pass force_thermo to analyse it anyway"
            )
        msg = "thermodynamic analysis forced for a localized initial state"
        log.warning(msg)
        warnings = (msg,)

    ctx = _context_for(config)
    records = _simulate(config, ctx)
    summary = _summarize(records, ctx, warnings)
    kept = [r for r in records if r.t % config.record_every == 0 or r.t == records[-1].t]
    if config.output_path is not None:
        with _open_output(config.output_path) as fh:
            write_csv(kept, fh)
    return kept, summary


@contextlib.contextmanager
def _open_output(path):
    if str(path) == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc
    with fh:
        yield fh


def _fmt(x: float) -> str:
    # + 0.0 folds -0.0 into 0.0
    return f"{x + 0.0:.12g}"


def write_csv(records: Iterable[TimeSeriesRecord], stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow([
            str(r.t), _fmt(r.norm), _fmt(r.s_vn), _fmt(r.energy), _fmt(r.heat_cum),
            _fmt(r.q_over_t), _fmt(r.sgen_balance), _fmt(r.sgen_relent),
            _fmt(r.bloch.x), _fmt(r.bloch.y), _fmt(r.bloch.z), _fmt(r.cos_alpha_t),
        ])


def _sweep_one(config: ExperimentConfig) -> Union[RunSummary, SweepFailure]:
    sigma = config.initial.family.sigma
    try:
        return run(config)[1]
    except Exception as exc:  # one bad run must not sink the sweep
        return SweepFailure(sigma, f"{type(exc).__name__}: {exc}")


def sweep(
    base: ExperimentConfig,
    sigma_list: Sequence[float],
    jobs: int = 1,
    out_dir: Optional[Union[str, os.PathLike]] = None,
) -> list[Union[RunSummary, SweepFailure]]:
    """
    Run ``base`` once per Gaussian width in ``sigma_list``.

    Results come back in input order. A width that fails (for example a
    nonpositive σ) yields a :class:`SweepFailure` in its slot. With
    ``out_dir`` each run writes ``sigma_<σ>.csv`` there.
    """
    configs: list[Union[ExperimentConfig, SweepFailure]] = []
    for sigma in sigma_list:
        try:
            initial = InitialStateSpec(Gaussian(float(sigma)), base.initial.chirality)
            out = None
            if out_dir is not None:
                out = Path(out_dir) / f"sigma_{_fmt(float(sigma))}.csv"
            configs.append(dataclasses.replace(base, initial=initial, output_path=out))
        except (ValueError, TypeError) as exc:
            configs.append(SweepFailure(sigma, f"{type(exc).__name__}: {exc}"))

    todo = [c for c in configs if isinstance(c, ExperimentConfig)]
    if jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            done = iter(list(pool.map(_sweep_one, todo)))
    else:
        done = iter([_sweep_one(c) for c in todo])
    return [next(done) if isinstance(c, ExperimentConfig) else c for c in configs]


SWEEP_COLUMNS = ("sigma", "status") + tuple(
    f.name for f in dataclasses.fields(RunSummary) if f.name != "warnings"
) + ("error",)


def write_sweep_csv(sigma_list, results, stream: TextIO) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(SWEEP_COLUMNS)
    for sigma, res in zip(sigma_list, results):
        if isinstance(res, SweepFailure):
            writer.writerow([str(sigma), "error"] + [""] * (len(SWEEP_COLUMNS) - 3) + [res.error])
            continue
        row = [str(sigma), "ok"]
        for name in SWEEP_COLUMNS[2:-1]:
            value = getattr(res, name)
            row.append(str(value) if isinstance(value, int) else _fmt(value))
        writer.writerow(row + [""])


_GNUPLOT_PANELS = (
    (3, "S_{vN} / k_B", "(a) von Neumann entropy"),
    (6, "Q_{0->t} / T_{ent}", "(b) entropy change due to heat"),
    (7, "S_{gen} / k_B", "(c) generated entropy"),
)


def _gnuplot_script(name: str, series: Sequence[tuple[str, str]]) -> str:
    lines = [
        f"# {name}: columns follow the qwthermo CSV layout",
        "set datafile separator ','",
        "set terminal pngcairo size 800,1200",
        f"set output '{name}.png'",
        "set multiplot layout 3,1",
        "set xlabel 't (steps)'",
    ]
    for col, ylabel, title in _GNUPLOT_PANELS:
        plots = ", \\\n     ".join(
            f"'{fname}' every ::1 using 1:{col} with lines title '{label}'"
            for fname, label in series
        )
        lines += [f"set title '{title}'", f"set ylabel '{ylabel}'", f"plot {plots}"]
    lines += ["unset multiplot", ""]
    return "\n".join(lines)


def reproduce_figure(
    which: str,
    out_dir: Union[str, os.PathLike],
    steps: int = FIGURE_STEPS,
    jobs: int = 1,
) -> FigureOutput:
    """
    Regenerate the data behind the entropy / heat / generated-entropy figures.

    ``fig2`` runs Gaussian walkers with σ = 30, 20, 10, 5; ``fig3`` runs a
    uniform superposition over 101 sites. All start in |+⟩ with the Hadamard
    coin. One CSV per run plus a gnuplot script are written to ``out_dir``.
    """
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create {out_dir}: {exc.strerror or exc}") from exc

    chirality = ChiralitySpec(0.0, 0.0)
    if which == "fig2":
        jobs_list = [
            (f"fig2_sigma{s}.csv", f"sigma={s}", InitialStateSpec(Gaussian(s), chirality))
            for s in FIG2_SIGMAS
        ]
    elif which == "fig3":
        jobs_list = [(
            f"fig3_uniform{FIG3_COUNT}.csv", f"uniform {FIG3_COUNT}",
            InitialStateSpec(Uniform(FIG3_COUNT), chirality),
        )]
    else:
        raise ValueError(f"unknown figure {which!r}; expected 'fig2' or 'fig3'")

    configs = [
        ExperimentConfig(initial=spec, steps=steps, output_path=out_dir / fname)
        for fname, _, spec in jobs_list
    ]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            list(pool.map(run, configs))
    else:
        for c in configs:
            run(c)

    text = _gnuplot_script(which, [(fname, label) for fname, label, _ in jobs_list])
    script_path = out_dir / f"{which}.gp"
    try:
        script_path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write {script_path}: {exc.strerror or exc}") from exc
    return FigureOutput(tuple(out_dir / f for f, _, _ in jobs_list), script_path, text)


# ---------------------------------------------------------------------------
# fast invariant suite

def _check_unitarity(ctx_hook):
    state = walk.build_initial_state(InitialStateSpec(Gaussian(10.0)))
    final = walk.evolve(state, CoinParams(math.pi / 4), 1000)
    drift = abs(final.norm() - 1.0)
    return drift < 1e-12, f"norm drift over 1000 steps = {drift:.2e}"


def _check_routes(ctx_hook):
    worst = 0.0
    for chirality in (ChiralitySpec(0.0, 0.0), ChiralitySpec(math.pi / 2, 0.0),
                      ChiralitySpec(2.0, 1.0)):
        config = ExperimentConfig(InitialStateSpec(Gaussian(10.0), chirality), steps=200)
        ctx = ctx_hook(_context_for(config))
        for r in _simulate(config, ctx):
            worst = max(worst, abs(r.sgen_balance - r.sgen_relent))
    return worst <= 1e-10, f"max |S_gen balance - S_gen relative entropy| = {worst:.2e}"


def _check_context(ctx_hook):
    worst = 0.0
    for theta in np.linspace(0.1, math.pi / 2 - 0.1, 7):
        for alpha in np.linspace(0.05, math.pi - 0.05, 11):
            ctx = ctx_hook(thermo.build_context(float(theta), 1.0, float(alpha)))
            gibbs = thermo._gibbs(ctx.hamiltonian, ctx.beta)
            worst = max(worst, float(np.abs(gibbs - ctx.rho_eq).max()))
            eig = np.linalg.eigvalsh(ctx.hamiltonian)
            worst = max(worst, float(np.abs(eig - np.array([-1.0, 1.0])).max()))
    return worst <= 1e-12, f"max Gibbs / asymptotic-state mismatch = {worst:.2e}"


def _check_closed_form(ctx_hook):
    worst = 0.0
    lo = thermo.ALPHA_MIN
    for alpha in np.linspace(lo, math.pi - lo, 102)[1:-1]:
        rho_eq = thermo.equilibrium_matrix(math.pi / 4, float(alpha))
        gap = abs(thermo.sgen_asymptotic(float(alpha)) - reduced.von_neumann_entropy(rho_eq))
        worst = max(worst, gap)
    return worst <= 1e-12, f"max |closed form - S_vN(rho_eq)| = {worst:.2e}"


CHECKS: tuple[tuple[str, Callable], ...] = (
    ("unitarity", _check_unitarity),
    ("sgen-route-identity", _check_routes),
    ("context-self-consistency", _check_context),
    ("closed-form-asymptote", _check_closed_form),
)


def check(stream: Optional[TextIO] = None, corrupt_beta_sign: bool = False) -> int:
    """
    Run the fast invariant suite, print one PASS/FAIL line per check and
    return the exit status (0 when everything passes, 4 otherwise).

    ``corrupt_beta_sign`` flips the inverse temperature of every context the
    checks use; it exists to demonstrate that the suite catches a wrong sign.
    """
    stream = sys.stdout if stream is None else stream
    if corrupt_beta_sign:
        def ctx_hook(ctx):
            return dataclasses.replace(ctx, beta=-ctx.beta, t_ent=-ctx.t_ent)
    else:
        def ctx_hook(ctx):
            return ctx

    failed = 0
    for name, fn in CHECKS:
        start = time.perf_counter()
        try:
            ok, detail = fn(ctx_hook)
        except Exception as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        elapsed = time.perf_counter() - start
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail} ({elapsed:.2f}s)", file=stream)
        failed += not ok
    return 0 if failed == 0 else 4
