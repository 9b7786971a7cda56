# src/hardyprobe/cli.py
import time
from pathlib import Path
from typing import Callable, List, Optional, Tuple

import typer
from rich.console import Console
from rich.table import Table

from .config import ExperimentConfig, load_config
from .errors import ConfigError, FailureLog
from .logging_utils import ProbeLogger, print_header, print_summary, setup_logging
from .reporting import ReportWriter
from .runner import ItemResult, RunOptions, run_bconst, run_check, run_sweep, run_validate, sweep_plot

console = Console()
app = typer.Typer(help="hardyprobe CLI")

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONFIG = 2

ConfigOption = typer.Option(Path("experiment.yml"), "--config", "-c", help="Path to the experiment config")
OutOption = typer.Option(None, "--out", "-o", help="Output directory (overrides outputs.dir)")
SeedOption = typer.Option(None, "--seed", help="Seed (overrides the config seed)")
TolOption = typer.Option(None, "--tol", help="Quadrature tolerance (overrides tolerances.quad_tol)")
JobsOption = typer.Option(1, "--jobs", "-j", min=1, help="Worker threads")
VerboseOption = typer.Option(False, "--verbose", help="Debug logging")


def version_callback(value: bool):
    if value:
        from hardyprobe import __version__
        console.print(f"hardyprobe version: {__version__}")
        raise typer.Exit()


@app.callback()
def main(
    version: bool = typer.Option(
        None,
        "--version",
        "-v",
        callback=version_callback,
        is_eager=True,
        help="Show version and exit"
    )
):
    """hardyprobe - numerical probes of weighted Hardy and Sobolev-type inequalities."""
    pass


def _load(config_file: Path) -> ExperimentConfig:
    try:
        return load_config(config_file)
    except ConfigError as e:
        console.print(f"[red][X] Failed to load config: {e}[/red]")
        raise typer.Exit(code=EXIT_CONFIG)


def _summary_table(command: str, results: List[ItemResult]) -> Table:
    table = Table(title=f"{command} results", show_header=True, header_style="bold")
    table.add_column("Name", style="cyan", no_wrap=True)
    table.add_column("Verdict", style="white")
    table.add_column("Status", justify="center")
    for r in results:
        table.add_row(r.name, r.verdict, "[green]OK[/green]" if r.ok else "[red]FAIL[/red]")
    return table


def _execute(
    command: str,
    config_file: Path,
    out: Optional[Path],
    seed: Optional[int],
    tol: Optional[float],
    jobs: int,
    verbose: bool,
    run: Callable[[ExperimentConfig, RunOptions], List[ItemResult]],
    expect_unbounded: bool = False,
    allow_inadmissible: bool = False,
    plot_name: Optional[str] = None,
):
    """Loads the config, runs one command, writes reports and exits with the command's code."""
    setup_logging(verbose)
    print_header(command)
    started = time.time()

    config = _load(config_file)
    options = RunOptions(
        seed=config.seed if seed is None else seed,
        tol=config.tolerances.quad_tol if tol is None else tol,
        jobs=jobs,
        expect_unbounded=expect_unbounded,
        allow_inadmissible=allow_inadmissible,
    )
    out_dir = out if out is not None else Path(config.outputs.dir)

    try:
        results = run(config, options)
    except ConfigError as e:
        console.print(f"[red][X] {e}[/red]")
        raise typer.Exit(code=EXIT_CONFIG)

    failure_log = FailureLog(command, out_dir)
    writer = ReportWriter(out_dir, command, options.seed, config.outputs.formats)
    for index, result in enumerate(results):
        log = ProbeLogger(result.name)
        if result.error is not None:
            log.error(f"{result.name}: {type(result.error).__name__}: {result.error}")
            failure_log.add_failure(result.name, result.error, index)
        else:
            log.complete(result.verdict, result.ok, result.elapsed)
            if result.verdict == "inconclusive":
                log.warning(f"{result.name}: no verdict, refine the grid or widen the family")
        writer.add(result.record, result.rows)
        for name, points in result.plots.items():
            writer.add_plot(name, points)
    if plot_name is not None:
        writer.add_plot(plot_name, sweep_plot(results))

    try:
        writer.write()
    except OSError as e:
        console.print(f"[red][X] Could not write reports to {out_dir}: {e}[/red]")
        raise typer.Exit(code=EXIT_FAILURE)
    if failure_log.has_failures():
        console.print(f"[yellow]{failure_log.failure_count()} item(s) raised; see {failure_log.save()}[/yellow]")

    if results:
        console.print(_summary_table(command, results))
    failed = sum(1 for r in results if not r.ok)
    print_summary(len(results), failed, time.time() - started)
    raise typer.Exit(code=EXIT_FAILURE if failed else EXIT_OK)


# ======================================================================================
# COMMAND: hardyprobe validate
# ======================================================================================
@app.command()
def validate(
    config_file: Path = ConfigOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    allow_inadmissible: bool = typer.Option(False, "--allow-inadmissible", help="Exit 0 even if a spec is inadmissible"),
    verbose: bool = VerboseOption,
):
    """Check admissibility of every problem and inequality."""
    _execute("validate", config_file, out, seed, None, 1, verbose, run_validate,
             allow_inadmissible=allow_inadmissible)


# ======================================================================================
# COMMAND: hardyprobe bconst
# ======================================================================================
@app.command()
def bconst(
    config_file: Path = ConfigOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    tol: Optional[float] = TolOption,
    jobs: int = JobsOption,
    verbose: bool = VerboseOption,
):
    """Compute the characterizing constants B1-B4."""
    _execute("bconst", config_file, out, seed, tol, jobs, verbose, run_bconst)


# ======================================================================================
# COMMAND: hardyprobe check
# ======================================================================================
@app.command()
def check(
    config_file: Path = ConfigOption,
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    tol: Optional[float] = TolOption,
    jobs: int = JobsOption,
    expect_unbounded: bool = typer.Option(False, "--expect-unbounded", help="Inadmissible specs must come out Unbounded"),
    verbose: bool = VerboseOption,
):
    """Run sandwich checks on problems and ratio checks on inequalities."""
    _execute("check", config_file, out, seed, tol, jobs, verbose, run_check, expect_unbounded=expect_unbounded)


def parse_range(text: str) -> Tuple[float, float, int]:
    """'start:stop:count' -> (start, stop, count)."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"Range must look like 'start:stop:count', got '{text}'")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"Range must look like 'start:stop:count', got '{text}'")
    if count < 0:
        raise ConfigError(f"Range count must be nonnegative, got {count}")
    return start, stop, count


# ======================================================================================
# COMMAND: hardyprobe sweep
# ======================================================================================
@app.command()
def sweep(
    config_file: Path = ConfigOption,
    axis: Optional[str] = typer.Option(None, "--axis", help="Parameter path '<name>.<field>'"),
    span: Optional[str] = typer.Option(None, "--range", help="start:stop:count"),
    out: Optional[Path] = OutOption,
    seed: Optional[int] = SeedOption,
    tol: Optional[float] = TolOption,
    jobs: int = JobsOption,
    verbose: bool = VerboseOption,
):
    """Sample one parameter and report the verdict at every value."""
    try:
        parsed = parse_range(span) if span is not None else None
    except ConfigError as e:
        console.print(f"[red][X] {e}[/red]")
        raise typer.Exit(code=EXIT_CONFIG)

    def run(config: ExperimentConfig, options: RunOptions) -> List[ItemResult]:
        return run_sweep(config, options, axis=axis, span=parsed)

    _execute("sweep", config_file, out, seed, tol, jobs, verbose, run, plot_name="sweep")


# ======================================================================================
# REGISTER TEMPLATE PLUGIN
# ======================================================================================
from hardyprobe.cli_plugins import template  # noqa: E402,F401
