"""CLI for drawing Haar-distributed frames."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated

import typer

from stiefel_transforms.cli._common import (
    SEED_ENVVAR,
    build_config,
    domain_errors,
    emit,
    err_console,
    require,
)
from stiefel_transforms.errors import ConfigError
from stiefel_transforms.manifold import haar_frame
from stiefel_transforms.models import SeededRng

app = typer.Typer(
    name="sample",
    help="Draw frames uniformly from the Stiefel manifold V_{n,m}.",
    add_completion=False,
    rich_markup_mode="rich",
)


@app.command()
def main(
    n: Annotated[int | None, typer.Option("--n", help="Ambient dimension")] = None,
    m: Annotated[int | None, typer.Option("--m", help="Number of columns")] = None,
    count: Annotated[
        int | None,
        typer.Option("--count", "-c", help="Number of frames (default: 1)"),
    ] = None,
    seed: Annotated[
        int | None,
        typer.Option("--seed", help="Random seed", envvar=SEED_ENVVAR),
    ] = None,
    output: Annotated[
        Path | None,
        typer.Option("--out", "-o", help="Output JSON file (default: stdout)"),
    ] = None,
    config_path: Annotated[
        Path | None,
        typer.Option("--config", help="JSON run configuration", exists=True),
    ] = None,
    json_output: Annotated[
        bool,
        typer.Option("--json", "-j", help="Output raw JSON only (no rich formatting)"),
    ] = False,
) -> None:
    """Draw Haar frames as JSON {n, m, entries} objects.

    Frame i is drawn from stream i of the seed, so a longer run extends a
    shorter one.

    [bold]Examples:[/]

        [cyan]stiefel sample --n 4 --m 2 --count 3 --seed 7[/]
    """
    with domain_errors():
        config = build_config(
            "sample",
            config_path=config_path,
            n=n,
            m=m,
            seed=seed,
            output=output,
            options={"count": count},
        )
        n_value, m_value = require(config.n, "n"), require(config.m, "m")
        n_frames = int(config.options.get("count", 1))
        if n_frames < 1:
            raise ConfigError("count", f"must be at least 1, got {n_frames}")
        root = SeededRng(config.seed)
        frames = [
            haar_frame(root.child(i), n_value, m_value).to_dict()
            for i in range(n_frames)
        ]

    emit(json.dumps(frames, indent=2), config.output, json_output)
    if not json_output:
        space = f"V_{{{n_value},{m_value}}}"
        err_console.print(f"[green]Drew {len(frames)} frames in {space}[/]")
