"""CLI for evaluating a single transform by Monte Carlo."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Annotated

import typer
from rich.panel import Panel

from stiefel_transforms.cli._common import (
    DEFAULT_WORKERS,
    SEED_ENVVAR,
    build_config,
    domain_errors,
    emit,
    err_console,
    require,
)
from stiefel_transforms.errors import ConfigError
from stiefel_transforms.models import TRANSFORM_KINDS, Frame, MCEstimate
from stiefel_transforms.registry import function_from_name
from stiefel_transforms.reporting import (
    estimate_to_dict,
    request_from_dict,
    request_to_dict,
)
from stiefel_transforms.transforms import evaluate_request, request_dims

app = typer.Typer(
    name="transform",
    help="Evaluate one cosine, sine or Funk transform.",
    add_completion=False,
    rich_markup_mode="rich",
)


def _load_frame(path: Path) -> Frame:
    try:
        return Frame.from_dict(json.loads(path.read_text()))
    except (OSError, json.JSONDecodeError, KeyError) as e:
        raise ConfigError("frame", f"cannot load a frame from {path}: {e}") from e


def display_estimate(kind: str, function: str, estimate: MCEstimate) -> None:
    """Display a rich summary of one transform value."""
    value = estimate.value
    text = (
        f"[bold]Transform:[/] {kind}\n"
        f"[bold]Function:[/] {function}\n"
        f"[bold]Value:[/] {value.real:.6g} {value.imag:+.6g}i\n"
        f"[bold]Std. error:[/] {estimate.stderr:.3g}\n"
        f"[bold]Samples:[/] {estimate.n_samples:,}"
    )
    if estimate.n_rejected:
        text += f" ([yellow]{estimate.n_rejected} rejected[/])"
    if estimate.degenerate:
        text += "\n[yellow]Kernel vanishes identically: value is exactly 0[/]"
    err_console.print(Panel(text, title="[bold blue]Transform", border_style="blue"))


@app.command()
def main(
    kind: Annotated[
        str | None,
        typer.Option(
            "--kind",
            help=f"Transform kind: {', '.join(TRANSFORM_KINDS)}",
        ),
    ] = None,
    n: Annotated[int | None, typer.Option("--n", help="Ambient dimension")] = None,
    m: Annotated[int | None, typer.Option("--m", help="Frame rank of f")] = None,
    k: Annotated[int | None, typer.Option("--k", help="Frame rank of u")] = None,
    alpha: Annotated[
        str | None,
        typer.Option("--alpha", "-a", help="Complex parameter, e.g. 2 or 1.5,0.5"),
    ] = None,
    function: Annotated[
        str | None,
        typer.Option("--function", "-f", help="Registered test function name"),
    ] = None,
    frame_path: Annotated[
        Path | None,
        typer.Option(
            "--frame",
            help="JSON frame to evaluate at (default: the standard frame)",
            exists=True,
            dir_okay=False,
        ),
    ] = None,
    request_path: Annotated[
        Path | None,
        typer.Option(
            "--request",
            help="JSON TransformRequest; flags override its fields",
            exists=True,
            dir_okay=False,
        ),
    ] = None,
    n_samples: Annotated[
        int | None,
        typer.Option("--samples", "-s", help="Number of Monte Carlo samples", min=2),
    ] = None,
    seed: Annotated[
        int | None,
        typer.Option("--seed", help="Random seed", envvar=SEED_ENVVAR),
    ] = None,
    workers: Annotated[
        int,
        typer.Option("--workers", "-w", help="Number of parallel workers", min=1),
    ] = DEFAULT_WORKERS,
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
    """Evaluate one transform of a registered function.

    [bold]Examples:[/]

        # Cosine transform of f = 1 on V_{3,1} at the standard frame
        [cyan]stiefel transform --kind cosine --n 3 --m 1 --k 1 --alpha 2[/]

        # Funk transform of a random quadratic
        [cyan]stiefel transform --kind funk --n 5 --m 2 --k 2 -f quad:1[/]

        # Re-run a saved request
        [cyan]stiefel transform --request request.json --json[/]
    """
    with domain_errors():
        base = {}
        if request_path is not None:
            try:
                base = json.loads(request_path.read_text())
            except json.JSONDecodeError as e:
                raise ConfigError("request", f"not valid JSON: {e.msg}") from e
        config = build_config(
            "transform",
            config_path=config_path,
            n=n if n is not None else base.get("n"),
            m=m if m is not None else base.get("m"),
            k=k if k is not None else base.get("k"),
            alpha=alpha,
            n_samples=n_samples if n_samples is not None else base.get("n_samples"),
            seed=seed if seed is not None else base.get("seed"),
            output=output,
            workers=workers,
            options={"kind": kind, "function": function},
        )
        alpha_value = config.alpha
        if alpha_value is None and base.get("alpha") is not None:
            alpha_value = base["alpha"]
        request = request_from_dict(
            {
                "kind": config.options.get("kind", base.get("kind")),
                "n": require(config.n, "n"),
                "m": require(config.m, "m"),
                "k": require(config.k, "k"),
                "alpha": alpha_value,
                "n_samples": config.n_samples or base.get("n_samples", 100_000),
                "seed": config.seed,
                "function": config.options.get(
                    "function", base.get("function", "const")
                ),
            }
        )
        f_dims, frame_dims = request_dims(request)
        f = function_from_name(request.function, *f_dims)
        if frame_path is not None:
            frame = _load_frame(frame_path)
        else:
            frame = Frame.standard(*frame_dims)

        if not json_output:
            with err_console.status(f"[bold blue]Sampling {request.kind}..."):
                estimate = evaluate_request(request, f, frame, workers=config.workers)
        else:
            estimate = evaluate_request(request, f, frame, workers=config.workers)

    result = {
        "request": request_to_dict(request),
        "frame": frame.to_dict(),
        "estimate": estimate_to_dict(estimate),
    }
    emit(json.dumps(result, indent=2), config.output, json_output)
    if not json_output:
        display_estimate(request.kind, request.function, estimate)
