"""Evaluation command: scripted rollouts or ingested logs -> success table."""

import json
from pathlib import Path
from typing import List, Optional

import typer
from rich.panel import Panel
from rich.progress import BarColumn, Progress, SpinnerColumn, TextColumn, TimeElapsedColumn
from rich.table import Table

from locokernel import __version__
from locokernel.cli.common import (
    console,
    get_config,
    init_run,
    kernel_errors,
    logger,
    parse_levels,
    parse_names,
)
from locokernel.harness.evaluation import (
    RESULT_COLUMNS,
    AggregateTable,
    CriteriaMode,
    aggregate,
    group_results,
    write_results,
)
from locokernel.harness.policies import POLICY_HELP
from locokernel.harness.runner import EvalPlan, ingest_directory, run_evaluation
from locokernel.util.fs import safe_mkdirs
from locokernel.util.metrics import Metrics


def register(app: typer.Typer) -> None:
    app.command("eval")(evaluate)


def render_table(table: AggregateTable, title: str) -> Table:
    out = Table(title=title)
    for col in RESULT_COLUMNS:
        out.add_column(col, justify="left" if col == "terrain" else "right")
    for row in table.rows():
        style = "bold" if row[0] == "overall" else None
        out.add_row(*row, style=style)
    return out


def evaluate(
    terrain: List[str] = typer.Option(["smooth"], "--terrain", help="Terrain names; repeat or comma-separate"),
    levels: str = typer.Option("0", "--levels", help="'0..9' or '0,5,9'"),
    n: int = typer.Option(10, "--n", min=1, help="Rollouts per group"),
    policy: str = typer.Option("scripted:trot", "--policy", help=POLICY_HELP),
    speed: float = typer.Option(1.0, "--speed", min=0.0, help="Forward command, m/s"),
    sweep: bool = typer.Option(False, "--sweep", help="Velocity sweep with half-expected criteria"),
    duration: Optional[float] = typer.Option(None, "--duration", help="Episode length, s"),
    criteria: Optional[CriteriaMode] = typer.Option(None, "--criteria", help="fixed | half_expected"),
    seed: int = typer.Option(0, "--seed"),
    randomize: bool = typer.Option(False, "--randomize/--no-randomize", help="Domain randomization"),
    ingest: Optional[Path] = typer.Option(None, "--ingest", help="Evaluate a directory of logs instead"),
    out: Optional[Path] = typer.Option(None, "--out", help="Results TSV"),
    log_dir: Optional[Path] = typer.Option(None, "--log-dir", help="Write every trajectory log here"),
    profile: str = typer.Option("default", "--profile"),
    config_path: Optional[Path] = typer.Option(None, "--config"),
    pretty: bool = typer.Option(False, "--pretty/--no-pretty", help="Progress bar and banner"),
    quiet: bool = typer.Option(False, "--quiet", help="Reduce log verbosity"),
    json_logs: bool = typer.Option(False, "--json-logs", help="Force JSON log format"),
) -> None:
    """Run the success/survival evaluation protocol."""
    run_id = init_run(quiet, json_logs, out.parent / "logs" if out else None)
    cfg = get_config(profile, config_path)
    metrics = Metrics()

    if ingest is not None:
        mode = criteria or CriteriaMode.FIXED_DISTANCE
        with kernel_errors():
            results, skipped = ingest_directory(ingest, mode)
        if skipped:
            console.print(f"[yellow]{len(skipped)} malformed logs skipped[/yellow]")
        title = f"Ingested {ingest} ({mode.value})"
    else:
        speeds = list(cfg.harness.sweep_speeds) if sweep else [speed]
        mode = criteria or (CriteriaMode.HALF_EXPECTED if sweep else CriteriaMode.FIXED_DISTANCE)
        plan = EvalPlan(
            terrains=parse_names(terrain),
            levels=parse_levels(levels),
            speeds=speeds,
            n=n,
            policy=policy,
            duration=duration or cfg.harness.duration,
            mode=mode,
            seed=seed,
            randomize=randomize,
        )
        if pretty:
            console.print(
                Panel.fit(
                    f"[bold blue]locokernel[/bold blue] v{__version__}\n"
                    f"Run ID: [yellow]{run_id}[/yellow]\n"
                    f"Profile: [green]{cfg.profile}[/green]\n"
                    f"Policy: [cyan]{policy}[/cyan]",
                    title="Evaluation",
                    border_style="blue",
                )
            )
        logger.info(f"Evaluating {plan.total} rollouts with {policy}")
        if log_dir:
            safe_mkdirs(log_dir)
        with kernel_errors():
            if pretty:
                with Progress(
                    SpinnerColumn(),
                    TextColumn("[progress.description]{task.description}"),
                    BarColumn(),
                    TextColumn("[progress.percentage]{task.percentage:>3.0f}%"),
                    TimeElapsedColumn(),
                    console=console,
                ) as progress:
                    task = progress.add_task("Rollouts", total=plan.total)
                    results = run_evaluation(
                        plan, cfg, log_dir, metrics, on_result=lambda r: progress.advance(task)
                    )
            else:
                results = run_evaluation(plan, cfg, log_dir, metrics)
        title = f"Evaluation ({mode.value}, {policy})"

    table = aggregate(group_results(results))
    if not table.groups:
        logger.error("No results to aggregate")
        raise typer.Exit(1)
    console.print(render_table(table, title))

    if out:
        write_results(table, out)
        summary = metrics.to_dict()
        summary.update({"run_id": run_id, "profile": cfg.profile, "overall": table.overall})
        (out.parent / "metrics.json").write_text(json.dumps(summary, indent=2))
        console.print(f"Results written to {out}")
