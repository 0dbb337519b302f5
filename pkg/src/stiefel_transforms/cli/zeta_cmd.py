"""CLI for zeta integrals and their Bernstein continuation."""

from __future__ import annotations

import json
import math
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
from stiefel_transforms.reporting import complex_pair
from stiefel_transforms.zeta import (
    QuadratureSpec,
    SchwartzTestFunction,
    bernstein_continuation,
    zeta_integral,
    zeta_limit,
)

app = typer.Typer(
    name="zeta",
    help="Evaluate Z(f, alpha - n) directly or by Bernstein continuation.",
    add_completion=False,
    rich_markup_mode="rich",
)


def continuation_order(alpha: complex, m: int) -> int:
    """Smallest ell with Re alpha + 2 ell > m - 1."""
    return max(1, math.floor((m - 1 - alpha.real) / 2) + 1)


def _test_function(
    n: int, m: int, family: str, coefficients: list[float] | None
) -> SchwartzTestFunction:
    if family == "gaussian":
        scale = coefficients[0] if coefficients else 1.0
        return SchwartzTestFunction(n, m, "gaussian", (scale,))
    if family == "gaussian_times_poly":
        return SchwartzTestFunction(n, m, family, tuple(coefficients or (1.0,)))
    raise ConfigError(
        "family", f"expected gaussian or gaussian_times_poly, got {family!r}"
    )


@app.command()
def main(
    n: Annotated[int | None, typer.Option("--n", help="Rows of x")] = None,
    m: Annotated[int | None, typer.Option("--m", help="Columns of x")] = None,
    alpha: Annotated[
        str | None,
        typer.Option("--alpha", "-a", help="Complex parameter, e.g. 2.5 or -0.5,0.3"),
    ] = None,
    ell: Annotated[
        int | None,
        typer.Option(
            "--ell",
            help="Continuation order (default: direct inside the strip, else minimal)",
            min=0,
        ),
    ] = None,
    family: Annotated[
        str,
        typer.Option("--family", help="Test function: gaussian or gaussian_times_poly"),
    ] = "gaussian",
    coefficients: Annotated[
        list[float] | None,
        typer.Option("--coef", "-c", help="Coefficient of q(s), lowest power first"),
    ] = None,
    sampler: Annotated[
        str,
        typer.Option("--sampler", help="Sampler: polar or gaussian"),
    ] = "polar",
    limit: Annotated[
        bool,
        typer.Option("--limit", help="Extrapolate the normalised integral to alpha=0"),
    ] = False,
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
    """Evaluate the zeta integral of a Gaussian-type test function.

    Inside the convergence strip (Re alpha > m - 1) the integral is sampled
    directly; outside it, or when --ell is given, it is continued with the
    Bernstein identity.

    [bold]Examples:[/]

        # Direct evaluation
        [cyan]stiefel zeta --n 3 --m 1 --alpha 2.5[/]

        # Continued to alpha = -0.5
        [cyan]stiefel zeta --n 3 --m 1 --alpha -0.5[/]

        # Limit at alpha = 0
        [cyan]stiefel zeta --n 3 --m 1 --limit[/]
    """
    with domain_errors():
        config = build_config(
            "zeta",
            config_path=config_path,
            n=n,
            m=m,
            alpha=alpha,
            n_samples=n_samples,
            seed=seed,
            output=output,
            workers=workers,
            options={"ell": ell, "family": family, "sampler": sampler},
        )
        if sampler not in ("polar", "gaussian"):
            raise ConfigError("sampler", f"expected polar or gaussian, got {sampler!r}")
        f = _test_function(
            require(config.n, "n"), require(config.m, "m"), family, coefficients
        )
        quadrature = QuadratureSpec(
            n_samples=config.n_samples,
            seed=config.seed,
            sampler=sampler,  # type: ignore[arg-type]
            workers=config.workers,
        )

        if limit:
            result = zeta_limit(f, quadrature)
            data = {
                "value": complex_pair(result.estimate.value),
                "stderr": result.estimate.stderr,
                "reference": complex_pair(result.reference),
                "relative_error": result.relative_error,
                "path": "limit",
            }
        else:
            a = require(config.alpha, "alpha")
            order = config.options.get("ell")
            if order is None and a.real > f.m - 1:
                order = 0
            elif order is None:
                order = continuation_order(a, f.m)
            if order == 0:
                estimate = zeta_integral(f, a, quadrature)
            else:
                estimate = bernstein_continuation(f, a, order, quadrature)
            data = {
                "value": complex_pair(estimate.value),
                "stderr": estimate.stderr,
                "n_samples": estimate.n_samples,
                "ell": order,
                "path": "direct" if order == 0 else "continued",
            }

    emit(json.dumps(data, indent=2), config.output, json_output)
    if not json_output:
        value = complex(*data["value"])
        err_console.print(
            Panel(
                f"[bold]Path:[/] {data['path']}\n"
                f"[bold]Value:[/] {value.real:.6g} {value.imag:+.6g}i\n"
                f"[bold]Std. error:[/] {data['stderr']:.3g}",
                title="[bold blue]Zeta Integral",
                border_style="blue",
            )
        )
