"""CLI for running the identity suites."""

from __future__ import annotations

from pathlib import Path
from typing import Annotated

import typer
from rich.panel import Panel
from rich.table import Table

from stiefel_transforms.cli._common import (
    DEFAULT_WORKERS,
    SEED_ENVVAR,
    build_config,
    domain_errors,
    emit,
    err_console,
    run_with_progress,
)
from stiefel_transforms.models import SuiteReport
from stiefel_transforms.reporting import render, report_to_csv, report_to_dict
from stiefel_transforms.suites import SUITES, run

app = typer.Typer(
    name="identity",
    help="Check closed forms and identities by Monte Carlo.",
    add_completion=False,
    rich_markup_mode="rich",
)

MAX_ROWS = 20


def display_summary(report: SuiteReport) -> None:
    """Display a rich summary of a suite run."""
    n_failed = len(report.failures)
    status = "[green]all passed[/]" if report.passed else f"[red]{n_failed} failed[/]"
    summary_text = (
        f"[bold]Suite:[/] {report.suite}\n"
        f"[bold]Seed:[/] {report.seed}\n"
        f"[bold]Checks:[/] {len(report.records)} ({status})"
    )
    border = "blue" if report.passed else "red"
    err_console.print(
        Panel(summary_text, title="[bold blue]Identity Suite", border_style=border)
    )

    table = Table(title="Checks", show_lines=False)
    table.add_column("Check", style="cyan")
    table.add_column("Value", justify="right")
    table.add_column("Reference", justify="right")
    table.add_column("Sigma", justify="right", style="magenta")
    table.add_column("Pass", justify="center")

    shown = report.failures or report.records
    for record in shown[:MAX_ROWS]:
        sigma = "" if record.sigma is None else f"{record.sigma:.2f}"
        table.add_row(
            record.name,
            f"{record.value.real:.6g}",
            f"{record.reference.real:.6g}",
            sigma,
            "[green]yes[/]" if record.passed else "[red]no[/]",
        )
    if len(shown) > MAX_ROWS:
        table.add_row(
            f"... and {len(shown) - MAX_ROWS} more", "", "", "", "", style="dim"
        )
    err_console.print(table)


@app.command()
def main(
    suite: Annotated[
        str | None,
        typer.Option(
            "--suite",
            help=f"Suite to run: {', '.join(SUITES)} or all",
        ),
    ] = None,
    n: Annotated[int | None, typer.Option("--n", help="Ambient dimension")] = None,
    m: Annotated[int | None, typer.Option("--m", help="Rank of f")] = None,
    k: Annotated[int | None, typer.Option("--k", help="Rank of the anchor")] = None,
    alpha: Annotated[
        str | None,
        typer.Option("--alpha", "-a", help="Complex parameter for single-case runs"),
    ] = None,
    n_samples: Annotated[
        int | None,
        typer.Option("--samples", "-s", help="Samples per check", min=2),
    ] = None,
    seed: Annotated[
        int | None,
        typer.Option("--seed", help="Random seed", envvar=SEED_ENVVAR),
    ] = None,
    workers: Annotated[
        int,
        typer.Option("--workers", "-w", help="Number of parallel workers", min=1),
    ] = DEFAULT_WORKERS,
    fmt: Annotated[
        str | None,
        typer.Option("--format", help="Report format: json or csv"),
    ] = None,
    output: Annotated[
        Path | None,
        typer.Option("--out", "-o", help="Report file (default: stdout)"),
    ] = None,
    config_path: Annotated[
        Path | None,
        typer.Option("--config", help="JSON run configuration", exists=True),
    ] = None,
    json_output: Annotated[
        bool,
        typer.Option(
            "--json", "-j", help="Output the report only (no rich formatting)"
        ),
    ] = False,
) -> None:
    """Run an identity suite and report each check.

    Exits 0 when every check passes and 1 when any fails.

    [bold]Examples:[/]

        # Closed form of the cosine transform of f = 1
        [cyan]stiefel identity --suite closed-form --n 3 --m 1 --k 1 --alpha 2[/]

        # Every suite, CSV report
        [cyan]stiefel identity --suite all --format csv -o report.csv[/]
    """
    with domain_errors():
        config = build_config(
            "identity",
            config_path=config_path,
            n=n,
            m=m,
            k=k,
            alpha=alpha,
            n_samples=n_samples,
            seed=seed,
            output=output,
            fmt=fmt,
            workers=workers,
            options={"suite": suite},
        )
        suite_name = config.options.get("suite", "closed-form")
        if not json_output:
            err_console.print(
                Panel(
                    f"[bold]Suite:[/] {suite_name}\n"
                    f"[bold]Workers:[/] {config.workers}\n"
                    f"[bold]Seed:[/] {config.seed}",
                    title="[bold green]Configuration",
                    border_style="green",
                )
            )
        report = run_with_progress(
            lambda callback: run(config, callback), "Running checks...", json_output
        )
        text = render(report_to_dict(report), config.format, report_to_csv(report))

    emit(text, config.output, json_output)
    if not json_output:
        display_summary(report)

    if not report.passed:
        raise typer.Exit(code=1)
