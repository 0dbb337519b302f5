"""Root ``stiefel`` command composing the sub-commands."""

from __future__ import annotations

from typing import Annotated

import typer

from stiefel_transforms.cli import (
    identity_cmd,
    rankone_cmd,
    sample_cmd,
    table_cmd,
    transform_cmd,
    zeta_cmd,
)
from stiefel_transforms.cli._common import setup_logging

app = typer.Typer(
    name="stiefel",
    help="Cosine, sine and Funk transforms on Stiefel manifolds.",
    add_completion=False,
    rich_markup_mode="rich",
    no_args_is_help=True,
)

app.command("transform")(transform_cmd.main)
app.command("identity")(identity_cmd.main)
app.command("table")(table_cmd.main)
app.command("zeta")(zeta_cmd.main)
app.command("sample")(sample_cmd.main)
app.add_typer(rankone_cmd.app, name="rankone")


@app.callback()
def main(
    verbose: Annotated[
        int,
        typer.Option(
            "--verbose",
            "-v",
            count=True,
            help="Log progress to stderr (-v for INFO, -vv for DEBUG)",
        ),
    ] = 0,
) -> None:
    """Evaluate transforms, check identities and tabulate closed forms."""
    setup_logging(verbose)


if __name__ == "__main__":
    app()
