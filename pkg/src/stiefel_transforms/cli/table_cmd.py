"""CLI for reproducing closed-form tables."""

from __future__ import annotations

from collections.abc import Callable
from pathlib import Path
from typing import Annotated

import typer

from stiefel_transforms.cli._common import (
    build_config,
    domain_errors,
    emit,
    err_console,
)
from stiefel_transforms.errors import ConfigError
from stiefel_transforms.gamma_toolkit import (
    cosine_const,
    funk_const,
    multiplier_c,
    stiefel_volume,
)
from stiefel_transforms.reporting import complex_pair, render, table_to_csv

app = typer.Typer(
    name="table",
    help="Tabulate closed-form constants and multipliers.",
    add_completion=False,
    rich_markup_mode="rich",
)

GRIDS = {
    "small": {
        "n": range(2, 6),
        "m": (1, 2),
        "alpha_im": (0.0,),
        "j": range(7),
        "multiplier_n": (3, 4),
    },
    "full": {
        "n": range(2, 9),
        "m": (1, 2, 3),
        "alpha_im": (0.0, 0.5),
        "j": range(21),
        "multiplier_n": (3, 4, 5, 6),
    },
}
TABLE_LAMBDAS = (0.5, 1.0, 1.0 + 0.5j)

Row = dict[str, float | int]
Table = tuple[tuple[str, ...], list[Row]]


def _split(z: complex, prefix: str) -> Row:
    return {f"{prefix}_re": z.real, f"{prefix}_im": z.imag}


def cosine_const_table(grid: dict) -> Table:
    columns = ("n", "m", "k", "alpha_re", "alpha_im", "value_re", "value_im")
    rows = []
    for n in grid["n"]:
        for m in grid["m"]:
            for k in range(m, n):
                alphas = [
                    complex(m + shift, im)
                    for shift in (0.5, 1.0, 2.0)
                    for im in grid["alpha_im"]
                ]
                for alpha in alphas:
                    value = cosine_const(n, m, k, alpha)
                    rows.append(
                        {"n": n, "m": m, "k": k}
                        | _split(alpha, "alpha")
                        | _split(value, "value")
                    )
    return columns, rows


def funk_const_table(grid: dict) -> Table:
    columns = ("n", "m", "k", "value")
    rows = [
        {"n": n, "m": m, "k": k, "value": funk_const(n, m, k)}
        for n in grid["n"]
        for m in grid["m"]
        for k in range(m, n - m + 1)
    ]
    return columns, rows


def stiefel_volume_table(grid: dict) -> Table:
    columns = ("n", "m", "value")
    rows = [
        {"n": n, "m": m, "value": stiefel_volume(n, m)}
        for n in grid["n"]
        for m in range(1, n + 1)
    ]
    return columns, rows


def multiplier_table(grid: dict) -> Table:
    columns = ("n", "j", "lambda_re", "lambda_im", "value_re", "value_im")
    rows = [
        {"n": n, "j": j}
        | _split(complex(lam), "lambda")
        | _split(multiplier_c(j, lam, n), "value")
        for n in grid["multiplier_n"]
        for lam in TABLE_LAMBDAS
        for j in grid["j"]
    ]
    return columns, rows


TABLES: dict[str, Callable[[dict], Table]] = {
    "cosine-const": cosine_const_table,
    "funk-const": funk_const_table,
    "stiefel-volume": stiefel_volume_table,
    "multiplier": multiplier_table,
}


def _json_rows(rows: list[Row]) -> list[dict]:
    """Fold ``x_re``/``x_im`` column pairs into ``x: [re, im]``."""
    folded = []
    for row in rows:
        out: dict = {}
        for key, value in row.items():
            if key.endswith("_re"):
                out[key[:-3]] = complex_pair(complex(value, row[key[:-3] + "_im"]))
            elif not key.endswith("_im"):
                out[key] = value
        folded.append(out)
    return folded


@app.command()
def main(
    which: Annotated[
        str,
        typer.Option("--which", help=f"Table: {', '.join(TABLES)}"),
    ] = "cosine-const",
    grid: Annotated[
        str,
        typer.Option("--grid", help="Grid size: small or full"),
    ] = "small",
    fmt: Annotated[
        str | None,
        typer.Option("--format", help="Output format: csv (default) or json"),
    ] = None,
    output: Annotated[
        Path | None,
        typer.Option("--out", "-o", help="Output file (default: stdout)"),
    ] = None,
    json_output: Annotated[
        bool,
        typer.Option(
            "--json", "-j", help="Output the table only (no rich formatting)"
        ),
    ] = False,
) -> None:
    """Tabulate closed forms over a dimension grid.

    [bold]Examples:[/]

        # Cosine transform of f = 1 for n <= 5, m <= 2
        [cyan]stiefel table --which cosine-const --grid small[/]

        # Rank-one multipliers as JSON
        [cyan]stiefel table --which multiplier --format json[/]
    """
    with domain_errors():
        config = build_config(
            "table",
            output=output,
            fmt=fmt,
            options={"which": which, "grid": grid},
            default_format="csv",
        )
        if which not in TABLES:
            raise ConfigError("which", f"unknown table {which!r}")
        if grid not in GRIDS:
            raise ConfigError("grid", f"expected small or full, got {grid!r}")
        columns, rows = TABLES[which](GRIDS[grid])
        text = render(
            {"table": which, "grid": grid, "rows": _json_rows(rows)},
            config.format,
            table_to_csv(columns, rows),
        )

    emit(text, config.output, json_output)
    if not json_output:
        err_console.print(f"[green]{len(rows)} rows in table {which} ({grid} grid)[/]")
