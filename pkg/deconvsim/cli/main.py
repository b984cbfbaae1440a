"""CLI Function"""

import functools
import logging
import math
import time
from pathlib import Path
from typing import List, Optional

import click
import pandas as pd
from rich.align import Align
from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from deconvsim.adaptation import CvConfig, cross_validate, cv_frame
from deconvsim.config import activate_dotenv, read_config_file
from deconvsim.config.config import MODES
from deconvsim.distributions import CATALOG_NAMES, ScenarioSpec, catalog_scenario
from deconvsim.estimator import (
    EstimatorParams,
    fit_degree,
    read_paired_csv,
    write_estimate,
)
from deconvsim.exceptions import DeconvError, NumericalFailureError
from deconvsim.harness import (
    RunSettings,
    data_grid,
    read_sidecar,
    run_adapt_rho,
    run_risk,
    run_simulation,
    run_sweep,
    top_k,
)
from deconvsim.schema import RiskSpec, SweepSpec
from deconvsim.utils import common, create_logger

console = Console()
logger = logging.getLogger("deconvsim")

EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3

INIT_CHOICES = click.Choice(["oracle-projection", "zeros"])


def welcome():
    """Welcome message."""

    welcome_path = Path(__file__).parent / "static" / "welcome.txt"
    with open(welcome_path, mode="r", encoding="utf-8") as f:
        welcome_ascii = f.read()

    # Create welcome box content
    welcome_content = f"{welcome_ascii}\n"
    welcome_content += "[bold green]deconvsim: density deconvolution with repeated measurements - CLI[/bold green]\n\n"
    welcome_content += "[dim]Estimation, adaptation and Monte-Carlo studies[/dim]"

    welcome_box = Panel(
        welcome_content,
        border_style="green",
        padding=(1, 2),
        title="Welcome to deconvsim",
        subtitle="Deconvolution simulation harness",
    )
    console.print(Align.center(welcome_box))
    console.print()


def summary(title: str, stats: dict):
    """Summary message."""
    table = Table(title=title)
    for key in stats:
        table.add_column(key, justify="center")
    table.add_row(*(str(value) for value in stats.values()))
    console.print(table)


def frame_table(frame: pd.DataFrame, title: str):
    """Prints a data frame as a rich table."""
    table = Table(title=title)
    for column in frame.columns:
        table.add_column(str(column), justify="right")
    for row in frame.itertuples(index=False):
        table.add_row(
            *(f"{v:.4g}" if isinstance(v, float) else str(v) for v in row)
        )
    console.print(table)


def handle_errors(func):
    """Exit code 2 for validation and I/O errors, 3 for estimator failures."""

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except NumericalFailureError as e:
            click.echo(f"Numerical failure: {e}", err=True)
            raise SystemExit(EXIT_NUMERICAL) from e
        except (ValueError, OSError) as e:
            click.echo(f"Configuration error: {e}", err=True)
            raise SystemExit(EXIT_VALIDATION) from e
        except DeconvError as e:
            click.echo(f"Numerical failure: {e}", err=True)
            raise SystemExit(EXIT_NUMERICAL) from e

    return wrapper


def parse_floats(ctx, param, value) -> Optional[List[float]]:
    """Comma-separated numbers, e.g. "0.5,1,2"."""
    if value is None:
        return None
    try:
        return [float(v) for v in value.split(",") if v.strip()]
    except ValueError as e:
        raise click.BadParameter(f"expected numbers, got '{value}'") from e


def parse_ints(ctx, param, value) -> Optional[List[int]]:
    values = parse_floats(ctx, param, value)
    if values is None:
        return None
    if any(v != int(v) for v in values):
        raise click.BadParameter(f"expected integers, got '{value}'")
    return [int(v) for v in values]


def parse_triples(ctx, param, values) -> List[EstimatorParams]:
    """Repeated "m,nu_est,h" options."""
    triples = []
    for value in values:
        parts = parse_floats(ctx, param, value)
        if len(parts) != 3:
            raise click.BadParameter(f"expected m,nu_est,h, got '{value}'")
        try:
            triples.append(
                EstimatorParams(m=int(parts[0]), nu_est=parts[1], h=parts[2])
            )
        except ValueError as e:
            raise click.BadParameter(str(e)) from e
    return triples


def _elapsed(ctx) -> float:
    return round(time.time() - ctx.obj["start"], 2)


def _optimizer(run: RunSettings, init: Optional[str], oracle):
    """Optimizer config of a dataset command; oracle init needs a sidecar."""
    init = init or run.optimizer.init
    if init == "oracle-projection" and oracle is None:
        logger.warning("No scenario sidecar found, starting the fit from zeros.")
        init = "zeros"
    return run.optimizer.model_copy(update={"init": init})


def _with_optimizer(data: dict, run: RunSettings) -> dict:
    """Spec-file optimizer keys layered over the configured optimizer."""
    data["optimizer"] = {**run.optimizer.model_dump(), **data.get("optimizer", {})}
    return data


def _dataset(dataset: str):
    """Sample, sidecar scenario (or None) and oracle signal law (or None)."""
    sample = read_paired_csv(dataset)
    scenario = read_sidecar(dataset)
    return sample, scenario, scenario.signal if scenario else None


@click.group()
@click.option("--seed", type=int, default=None, help="Base seed (config SEED).")
@click.option("--workers", type=int, default=None, help="Worker processes.")
@click.option("--mode", type=click.Choice(MODES), default="desk", show_default=True)
@click.option(
    "--out",
    type=click.Path(file_okay=False),
    default="deconv-out",
    show_default=True,
    help="Output directory.",
)
@click.option("--quiet", is_flag=True, help="Skip the welcome panel.")
@click.pass_context
def cli(ctx, seed, workers, mode, out, quiet):
    """Deconvsim CLI tool."""
    settings = read_config_file()
    create_logger(
        level=settings["Logging"]["LOGLEVEL"],
        log_file=settings["Logging"].get("LOG_FILE"),
    )
    activate_dotenv(logger)

    if not quiet:
        welcome()

    ctx.obj = {
        "run": RunSettings.from_config(settings, mode=mode, workers=workers, seed=seed),
        "out": Path(out),
        "seed": seed,
        "start": time.time(),
    }


@cli.command()
@click.option("--scenario", type=click.Choice(CATALOG_NAMES), default=None)
@click.option(
    "--spec", "spec_file", type=click.Path(exists=True), help="ScenarioSpec file."
)
@click.option("--n", type=int, default=None, help="Sample size override.")
@click.option("--file", "file_name", default=None, help="Output CSV name.")
@click.pass_context
@handle_errors
def simulate(ctx, scenario, spec_file, n, file_name):
    """Draw a paired dataset from a scenario."""
    seed = ctx.obj["run"].seed
    if spec_file:
        data = common.read_yaml_file(spec_file)
        if n is not None:
            data["n"] = n
        if ctx.obj["seed"] is not None:
            data["seed"] = seed
        spec = ScenarioSpec.model_validate(data)
    elif scenario:
        spec = catalog_scenario(scenario, n=n, seed=seed)
    else:
        raise ValueError("give either --scenario or --spec")

    out = ctx.obj["out"] / (file_name or f"{spec.name}.csv")
    run_simulation(spec, out)
    summary(
        "Dataset",
        {"Scenario": spec.name, "n": spec.n, "Seed": spec.seed, "Path": str(out)},
    )


@cli.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--m", type=int, required=True, help="Truncation degree.")
@click.option("--nu-est", type=float, required=True, help="Criterion half-width.")
@click.option("--h", type=float, required=True, help="Inversion cutoff.")
@click.option("--fit-degree", "degree", type=int, help="CF fit degree (FIT_DEGREE).")
@click.option("--init", type=INIT_CHOICES, default=None)
@click.option("--emit-cf", is_flag=True, help="Also write the fitted polynomial.")
@click.pass_context
@handle_errors
def estimate(ctx, dataset, m, nu_est, h, degree, init, emit_cf):
    """Estimate the signal density of a dataset."""
    run: RunSettings = ctx.obj["run"]
    params = EstimatorParams(m=m, nu_est=nu_est, h=h)
    sample, scenario, oracle = _dataset(dataset)
    optimizer = _optimizer(run, init, oracle)
    degree = run.fit_degree if degree is None else degree

    pipeline = run.pipeline(
        optimizer, fit_degree=degree, oracle_law=oracle, workers=run.workers
    )
    stem = ctx.obj["out"] / f"{Path(dataset).stem}_estimate"
    try:
        density, fit = pipeline.run(
            sample, params, data_grid(sample, run.eval_points, scenario)
        )
    except NumericalFailureError as e:
        iterate = None if e.iterate is None else [float(x) for x in e.iterate]
        common.save_json_file(
            {
                "error": str(e),
                "iterate": iterate,
                "params": params.model_dump(),
                "optimizer": optimizer.model_dump(mode="json"),
            },
            stem.with_name(stem.name + "_failure.json"),
        )
        raise

    write_estimate(density, stem.with_suffix(".csv"))
    if emit_cf:
        common.save_json_file(
            fit.to_report(optimizer), stem.with_name(stem.name + "_cf.json")
        )

    summary(
        "Estimate",
        {
            "Params": str(params),
            "Fit degree": degree,
            "M_n": f"{fit.objective:.3e}",
            "Converged": fit.converged,
            "Duration": _elapsed(ctx),
        },
    )
    click.echo(f"Estimate saved to {stem.with_suffix('.csv')}")


@cli.command()
@click.argument("spec_file", type=click.Path(exists=True), required=False)
@click.option("--scenario", type=click.Choice(CATALOG_NAMES), default=None)
@click.option("--n", type=int, default=None, help="Sample size override.")
@click.option("--m-list", callback=parse_ints, help="Degrees, e.g. 3,4,5")
@click.option("--nu-list", callback=parse_floats, help="Half-widths, e.g. 1,2.5")
@click.option("--h-list", callback=parse_floats, help="Cutoffs, e.g. 0.5,2")
@click.option("--top-k", "top_count", type=int, default=0, help="List K best cells.")
@click.pass_context
@handle_errors
def sweep(ctx, spec_file, scenario, n, m_list, nu_list, h_list, top_count):
    """Loss table over m x nu_est x h on one dataset."""
    run: RunSettings = ctx.obj["run"]
    data = common.read_yaml_file(spec_file) if spec_file else {}
    if scenario:
        data["scenario"] = {"name": scenario, "n": n, "seed": run.seed}
    if "scenario" not in data:
        raise ValueError("give a spec file or --scenario")
    for key, value in (("m_list", m_list), ("nu_list", nu_list), ("h_list", h_list)):
        if value is not None:
            data[key] = value
    spec = SweepSpec.model_validate(_with_optimizer(data, run))

    table = run_sweep(spec, run)
    out = (
        Path(spec.output_path)
        if spec.output_path
        else ctx.obj["out"] / f"sweep_{spec.scenario.name}.csv"
    )
    out.parent.mkdir(parents=True, exist_ok=True)
    table.to_csv(out, index=False, lineterminator="\n")

    failed = int((~table["loss"].map(math.isfinite)).sum())
    summary(
        "Sweep",
        {
            "Cells": len(table),
            "Failed": failed,
            "Duration": _elapsed(ctx),
            "Path": str(out),
        },
    )
    if top_count:
        frame_table(top_k(table, top_count), f"{top_count} smallest losses")


@cli.command()
@click.argument("spec_file", type=click.Path(exists=True), required=False)
@click.option("--scenario", type=click.Choice(CATALOG_NAMES), default=None)
@click.option("--n", type=int, default=None, help="Sample size per repetition.")
@click.option("--repetitions", type=int, default=None)
@click.option(
    "--params",
    "param_sets",
    multiple=True,
    callback=parse_triples,
    help="m,nu_est,h; repeat up to four times.",
)
@click.pass_context
@handle_errors
def risk(ctx, spec_file, scenario, n, repetitions, param_sets):
    """Monte-Carlo empirical risk with a 95% interval."""
    run: RunSettings = ctx.obj["run"]
    data = common.read_yaml_file(spec_file) if spec_file else {}
    overrides = {
        "scenario": scenario,
        "n": n,
        "repetitions": repetitions,
        "param_sets": list(param_sets) or None,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    if ctx.obj["seed"] is not None or "base_seed" not in data:
        data["base_seed"] = run.seed
    spec = RiskSpec.model_validate(_with_optimizer(data, run))

    report = run_risk(spec, run)
    out = (
        Path(spec.output_path)
        if spec.output_path
        else ctx.obj["out"] / f"risk_{report.scenario}.json"
    )
    common.save_json_file(report.model_dump(mode="json"), out)
    if report.risk is None:
        raise NumericalFailureError("every repetition failed")

    summary(
        "Empirical risk",
        {
            "Scenario": report.scenario,
            "Repetitions": report.repetitions,
            "Dropped": report.dropped,
            "100 r": f"{100 * report.risk:.4f}",
            "95% CI (x100)": f"({100 * report.ci[0]:.4f}, {100 * report.ci[1]:.4f})",
            "Duration": _elapsed(ctx),
        },
    )
    click.echo(f"Risk report saved to {out}")


@cli.command()
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--candidate",
    "candidates",
    multiple=True,
    required=True,
    callback=parse_triples,
    help="m,nu_est,h; repeat for each candidate.",
)
@click.option("--fit-degree", "degree", type=int, help="CF fit degree (m otherwise).")
@click.option("--init", type=INIT_CHOICES, default=None)
@click.pass_context
@handle_errors
def cv(ctx, dataset, candidates, degree, init):
    """Cross-validated choice of (m, nu_est, h)."""
    run: RunSettings = ctx.obj["run"]
    sample, scenario, oracle = _dataset(dataset)
    pipeline = run.pipeline(
        _optimizer(run, init, oracle), fit_degree=degree, oracle_law=oracle
    )

    cfg = CvConfig(
        candidate_params=candidates,
        split_e1=run.split_e1,
        split_e2=run.split_e2,
        floor_eps=run.floor_eps,
        seed=run.seed,
        q_limit=run.noise_q_limit,
        cf_floor=run.noise_cf_floor,
    )
    best, table = cross_validate(
        sample,
        cfg,
        pipeline,
        data_grid(sample, run.eval_points, scenario),
        quad_points=run.quad_points,
        workers=run.workers,
    )

    stem = ctx.obj["out"] / f"{Path(dataset).stem}_cv"
    stem.parent.mkdir(parents=True, exist_ok=True)
    frame = cv_frame(table)
    frame.to_csv(stem.with_suffix(".csv"), index=False, lineterminator="\n")
    common.save_json_file(
        {"selected": best.model_dump(), "candidates": len(candidates)},
        stem.with_suffix(".json"),
    )

    frame_table(frame, "Cross-validation")
    summary("CV selection", {"Selected": str(best), "Duration": _elapsed(ctx)})


@cli.command(name="adapt-rho")
@click.argument("dataset", type=click.Path(exists=True, dir_okay=False))
@click.option("--rhos", callback=parse_floats, required=True, help="e.g. 1.5,2,3")
@click.option("--beta", type=float, required=True, help="Smoothness of the signal.")
@click.option(
    "--params",
    "shared",
    multiple=True,
    callback=parse_triples,
    help="m,nu_est,h for every rho (theoretical formulas otherwise).",
)
@click.option("--S", "scale", type=float, default=1.0, show_default=True)
@click.option("--c-h", type=float, default=math.exp(-4.0), show_default=True)
@click.option("--nu-est", type=float, default=1.0, show_default=True)
@click.option("--fit-degree", "degree", help="Integer, or 'theory'.")
@click.option("--init", type=INIT_CHOICES, default=None)
@click.option("--combine", "with_combination", is_flag=True)
@click.pass_context
@handle_errors
def adapt_rho(
    ctx, dataset, rhos, beta, shared, scale, c_h, nu_est, degree, init, with_combination
):
    """Goldenshluger-Lepski choice of rho, optionally combined."""
    run: RunSettings = ctx.obj["run"]
    if len(shared) > 1:
        raise click.BadParameter("give at most one triple", param_hint="--params")
    sample, scenario, oracle = _dataset(dataset)
    if degree == "theory":
        degree = fit_degree(sample.n, max(rhos))
    elif degree is not None:
        degree = int(degree)

    report, selected = run_adapt_rho(
        sample,
        rhos,
        beta,
        run,
        data_grid(sample, run.eval_points, scenario),
        optimizer=_optimizer(run, init, oracle),
        params=shared[0] if shared else None,
        S=scale,
        c_h=c_h,
        nu_est=nu_est,
        fit_degree=degree,
        oracle_law=oracle,
        with_combination=with_combination,
    )

    stem = ctx.obj["out"] / f"{Path(dataset).stem}_rho"
    common.save_json_file(report.model_dump(mode="json"), stem.with_suffix(".json"))
    write_estimate(selected, stem.with_name(stem.name + "_estimate.csv"))

    rows = pd.DataFrame(
        [
            {"rho": r.rho, "a_n": r.a_n, "sigma_n": r.sigma_n, "error": r.error or ""}
            for r in report.rows
        ]
    )
    frame_table(rows, "A_n and sigma_n")
    summary(
        "Rho selection",
        {
            "rho_hat": report.rho_hat,
            "Branch": report.branch or "-",
            "Duration": _elapsed(ctx),
        },
    )


@cli.command()
@click.argument("file_path", type=click.Path(exists=True))
@click.option("--top-k", "count", type=int, default=10, show_default=True)
def summarize(file_path: str, count: int) -> None:
    """Summarize a sweep loss table."""
    try:
        df = pd.read_csv(file_path)

        if "loss" not in df.columns:
            click.echo("Error: CSV file must contain a 'loss' column", err=True)
            raise SystemExit(EXIT_VALIDATION)

        best = top_k(df, count)
        if best.empty:
            click.echo("No finite loss found")
            return

        table = Table(title="Smallest losses")
        for column in ("m", "nu_est", "h", "loss"):
            table.add_column(column, justify="right")
        table.add_column("Bar", justify="left")

        worst = best["loss"].max()
        for row in best.itertuples(index=False):
            bar_len = int((row.loss / worst) * 40) if worst > 0 else 0
            table.add_row(
                str(row.m),
                f"{row.nu_est:g}",
                f"{row.h:g}",
                f"{row.loss:.3e}",
                "█" * bar_len,
            )

        console.print(table)
    except pd.errors.EmptyDataError as e:
        click.echo("Error: CSV file is empty", err=True)
        raise SystemExit(EXIT_VALIDATION) from e
    except pd.errors.ParserError as e:
        click.echo(f"Error parsing CSV file: {e}", err=True)
        raise SystemExit(EXIT_VALIDATION) from e
