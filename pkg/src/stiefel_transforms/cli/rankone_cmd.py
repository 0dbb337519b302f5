"""CLI for rank-one Cos^lambda multiplier checks."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Annotated, Any

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
    parse_complex,
)
from stiefel_transforms.errors import ConfigError
from stiefel_transforms.models import (
    ComplexParam,
    Frame,
    MultiplierReport,
    RunConfig,
    SeededRng,
)
from stiefel_transforms.rankone import (
    composition_identity_check,
    funk_multiplier_check,
    multiplier_decay_check,
    multiplier_table,
)
from stiefel_transforms.reporting import (
    multiplier_report_to_csv,
    multiplier_report_to_dict,
    render,
)

app = typer.Typer(
    name="rankone",
    help="Rank-one Cos^lambda multipliers, composition, Funk limit and decay.",
    add_completion=False,
    rich_markup_mode="rich",
    no_args_is_help=True,
)

DEFAULT_N = 3
DEFAULT_SAMPLES = 1_000_000
DEFAULT_LAMBDAS = ["1.25", "2", "1.25,0.5"]
COMPOSE_LAMBDAS = ["0.3", "1.2", "0.5,0.5"]

FormatOption = Annotated[
    str | None,
    typer.Option("--format", help="Output format: json or csv"),
]
OutputOption = Annotated[
    Path | None,
    typer.Option("--out", "-o", help="Output file (default: stdout)"),
]
JsonOption = Annotated[
    bool,
    typer.Option("--json", "-j", help="Output the report only (no rich formatting)"),
]
ConfigOption = Annotated[
    Path | None,
    typer.Option("--config", help="JSON run configuration", exists=True),
]
DimOption = Annotated[int | None, typer.Option("--n", help="Ambient dimension")]
SeedOption = Annotated[
    int | None,
    typer.Option("--seed", help="Random seed", envvar=SEED_ENVVAR),
]
SamplesOption = Annotated[
    int | None,
    typer.Option("--samples", "-s", help="Monte Carlo samples per row"),
]
WorkersOption = Annotated[
    int,
    typer.Option("--workers", "-w", help="Number of parallel workers", min=1),
]
JMaxOption = Annotated[int | None, typer.Option("--j-max", help="Largest degree")]


def _config(
    config_path: Path | None,
    *,
    n: int | None,
    fmt: str | None,
    output: Path | None,
    options: dict[str, Any],
    n_samples: int | None = None,
    seed: int | None = None,
    workers: int | None = None,
) -> RunConfig:
    config = build_config(
        "rankone",
        config_path=config_path,
        n=n,
        n_samples=n_samples,
        seed=seed,
        output=output,
        fmt=fmt,
        workers=workers,
        options=options,
    )
    if config.n is not None and config.n < DEFAULT_N:
        raise ConfigError("n", f"rank-one checks need n >= 3, got {config.n}")
    return config


def _dim(config: RunConfig) -> int:
    return config.n if config.n is not None else DEFAULT_N


def _j_max(config: RunConfig, default: int, minimum: int = 0) -> int:
    j_max = int(config.options.get("j_max", default))
    if j_max < minimum:
        raise ConfigError("j_max", f"must be at least {minimum}, got {j_max}")
    return j_max


def _lambdas(texts: list[Any]) -> list[complex]:
    values = []
    for text in texts:
        if isinstance(text, str):
            value = parse_complex(text, "lambda")
        else:
            try:
                value = ComplexParam.coerce(text).value
            except (TypeError, ValueError) as e:
                raise ConfigError("lambda", f"invalid value {text!r}") from e
        if value is not None:
            values.append(value)
    return values


def display_report(report: MultiplierReport) -> None:
    """Display a rich table of multiplier rows."""
    status = "[green]pass[/]" if report.passed else "[red]fail[/]"
    err_console.print(
        Panel(
            f"[bold]Check:[/] {report.check}\n"
            f"[bold]n:[/] {report.n}\n"
            f"[bold]Statistic:[/] {report.statistic:.6g} ({status})",
            title="[bold blue]Rank One",
            border_style="blue" if report.passed else "red",
        )
    )
    table = Table(show_lines=False)
    table.add_column("j", justify="right", style="cyan")
    table.add_column("lambda", justify="right")
    table.add_column("Formula", justify="right")
    table.add_column("Value", justify="right")
    table.add_column("Std. error", justify="right", style="magenta")
    for row in report.rows[:20]:
        lam = "" if row.lam is None else f"{complex(row.lam):.4g}"
        stderr = "" if row.stderr is None else f"{row.stderr:.2g}"
        table.add_row(
            str(row.j),
            lam,
            f"{complex(row.formula).real:.6g}",
            f"{complex(row.value).real:.6g}",
            stderr,
        )
    if len(report.rows) > 20:
        more = f"... and {len(report.rows) - 20} more"
        table.add_row(more, "", "", "", "", style="dim")
    err_console.print(table)
    for note in report.notes:
        err_console.print(f"[dim]{note}[/]")


def _finish(
    report: MultiplierReport, fmt: str, output: Path | None, quiet: bool
) -> None:
    with domain_errors():
        text = render(
            multiplier_report_to_dict(report), fmt, multiplier_report_to_csv(report)
        )
    emit(text, output, quiet)
    if not quiet:
        display_report(report)
    if not report.passed:
        raise typer.Exit(code=1)


@app.command("multiplier")
def multiplier(
    n: DimOption = None,
    j_max: JMaxOption = None,
    lambdas: Annotated[
        list[str] | None,
        typer.Option("--lambda", "-l", help="lambda values, e.g. 1.25 or 1.25,0.5"),
    ] = None,
    n_samples: SamplesOption = None,
    seed: SeedOption = None,
    workers: WorkersOption = DEFAULT_WORKERS,
    fmt: FormatOption = None,
    output: OutputOption = None,
    config_path: ConfigOption = None,
    json_output: JsonOption = False,
) -> None:
    """Compare Monte Carlo multipliers of zonal harmonics with the formula."""
    with domain_errors():
        config = _config(
            config_path,
            n=n,
            n_samples=n_samples,
            seed=seed,
            workers=workers,
            fmt=fmt,
            output=output,
            options={"j_max": j_max, "lambda": lambdas},
        )
        report = multiplier_table(
            range(_j_max(config, 6) + 1),
            _lambdas(config.options.get("lambda", DEFAULT_LAMBDAS)),
            _dim(config),
            config.n_samples or DEFAULT_SAMPLES,
            SeededRng(config.seed),
            workers=config.workers,
        )
    _finish(report, config.format, config.output, json_output)


@app.command("compose")
def compose(
    n: DimOption = None,
    j_max: JMaxOption = None,
    lambdas: Annotated[
        list[str] | None,
        typer.Option("--lambda", "-l", help="lambda values, e.g. 0.3 or 0.5,0.5"),
    ] = None,
    fmt: FormatOption = None,
    output: OutputOption = None,
    config_path: ConfigOption = None,
    json_output: JsonOption = False,
) -> None:
    """Check c_{j,lambda} c_{j,-lambda} = 1 over even degrees."""
    with domain_errors():
        config = _config(
            config_path,
            n=n,
            fmt=fmt,
            output=output,
            options={"j_max": j_max, "lambda": lambdas},
        )
        report = composition_identity_check(
            _j_max(config, 40),
            _lambdas(config.options.get("lambda", COMPOSE_LAMBDAS)),
            _dim(config),
        )
    _finish(report, config.format, config.output, json_output)


@app.command("funk")
def funk(
    n: DimOption = None,
    degrees: Annotated[
        list[int] | None,
        typer.Option("--j", help="Even degrees to check", min=0),
    ] = None,
    tilt: Annotated[
        float | None,
        typer.Option("--tilt", help="Angle of the evaluation point from the axis"),
    ] = None,
    n_samples: SamplesOption = None,
    seed: SeedOption = None,
    fmt: FormatOption = None,
    output: OutputOption = None,
    config_path: ConfigOption = None,
    json_output: JsonOption = False,
) -> None:
    """Compare the pole-cancelled Cos^lambda limit with c_{1,1} times Funk."""
    with domain_errors():
        config = _config(
            config_path,
            n=n,
            n_samples=n_samples,
            seed=seed,
            fmt=fmt,
            output=output,
            options={"j": degrees, "tilt": tilt},
        )
        dim = _dim(config)
        js = [int(j) for j in config.options.get("j", [0, 2, 4])]
        odd = [j for j in js if j % 2]
        if odd:
            raise ConfigError("j", f"the Funk limit needs even degrees, got {odd}")
        angle = float(config.options.get("tilt", math.pi / 7))
        point = [[0.0] for _ in range(dim)]
        point[0][0] = math.sin(angle)
        point[-1][0] = math.cos(angle)
        frame = Frame(point)
        rng = SeededRng(config.seed)
        rows = []
        passed = True
        statistic = 0.0
        for index, j in enumerate(js):
            single = funk_multiplier_check(
                j,
                dim,
                config.n_samples or DEFAULT_SAMPLES,
                rng.child(index),
                point=frame,
            )
            rows.extend(single.rows)
            passed = passed and single.passed
            statistic = max(statistic, single.statistic)
        report = MultiplierReport(
            check="funk", n=dim, rows=rows, statistic=statistic, passed=passed
        )
    _finish(report, config.format, config.output, json_output)


@app.command("decay")
def decay(
    lam: Annotated[
        str | None,
        typer.Option("--lambda", "-l", help="lambda, e.g. 1 or 2,1"),
    ] = None,
    j_max: JMaxOption = None,
    n: DimOption = None,
    fmt: FormatOption = None,
    output: OutputOption = None,
    config_path: ConfigOption = None,
    json_output: JsonOption = False,
) -> None:
    """Fit the slope of log|c_{j,lambda}| against log j; it tends to -Re lambda."""
    with domain_errors():
        config = _config(
            config_path,
            n=n,
            fmt=fmt,
            output=output,
            options={"j_max": j_max, "lambda": lam},
        )
        (value,) = _lambdas([config.options.get("lambda", "1")])
        report = multiplier_decay_check(value, _j_max(config, 400, 4), _dim(config))
    _finish(report, config.format, config.output, json_output)
