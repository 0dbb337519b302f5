"""Shared CLI utilities for stiefel commands."""

from __future__ import annotations

import json
import logging
import os
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, TypeVar

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.progress import (
    BarColumn,
    MofNCompleteColumn,
    Progress,
    SpinnerColumn,
    TaskProgressColumn,
    TextColumn,
    TimeElapsedColumn,
    TimeRemainingColumn,
)

from stiefel_transforms.errors import ConfigError, StiefelError
from stiefel_transforms.models import ComplexParam, RunConfig

# Default number of workers: use half of CPU cores, minimum 1, maximum 8
DEFAULT_WORKERS = min(8, max(1, (os.cpu_count() or 4) // 2))

SEED_ENVVAR = "STIEFEL_SEED"
FORMATS = ("json", "csv")

# Rich consoles for output
console = Console()
err_console = Console(stderr=True)

T = TypeVar("T")


def create_progress() -> Progress:
    """Create a standardized rich progress bar."""
    return Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        BarColumn(),
        TaskProgressColumn(),
        MofNCompleteColumn(),
        TimeElapsedColumn(),
        TimeRemainingColumn(),
        console=err_console,
    )


def setup_logging(verbose: int) -> None:
    """Route library logging through rich on stderr.

    0 shows warnings only, 1 adds INFO, 2 or more adds DEBUG.
    """
    level = logging.WARNING
    if verbose == 1:
        level = logging.INFO
    elif verbose >= 2:
        level = logging.DEBUG
    handler = RichHandler(console=err_console, show_path=False, rich_tracebacks=True)
    logging.basicConfig(
        level=level, format="%(message)s", handlers=[handler], force=True
    )


def parse_complex(text: str | None, field: str = "alpha") -> complex | None:
    """Parse ``2``, ``1+0.5j``, ``1,0.5`` or ``[1, 0.5]`` into a complex number."""
    if text is None:
        return None
    cleaned = text.strip().strip("[]()").replace(" ", "")
    try:
        if "," in cleaned:
            re, im = cleaned.split(",")
            return ComplexParam(complex(float(re), float(im))).value
        return ComplexParam(complex(cleaned.replace("i", "j"))).value
    except ValueError as e:
        raise ConfigError(field, f"cannot parse {text!r} as a complex number") from e


def load_config(path: Path | None) -> dict[str, Any]:
    """Read a ``--config`` JSON object; an absent path yields ``{}``."""
    if path is None:
        return {}
    try:
        data = json.loads(path.read_text())
    except OSError as e:
        raise ConfigError("config", f"cannot read {path}: {e.strerror}") from e
    except json.JSONDecodeError as e:
        raise ConfigError("config", f"{path} is not valid JSON: {e.msg}") from e
    if not isinstance(data, dict):
        raise ConfigError("config", f"{path} must hold a JSON object")
    return data


def _pick(flag: T | None, file_config: dict[str, Any], key: str, default: T) -> T:
    if flag is not None:
        return flag
    return file_config.get(key, default)


def build_config(
    command: str,
    *,
    config_path: Path | None = None,
    n: int | None = None,
    m: int | None = None,
    k: int | None = None,
    alpha: str | None = None,
    n_samples: int | None = None,
    seed: int | None = None,
    output: Path | None = None,
    fmt: str | None = None,
    workers: int | None = None,
    options: dict[str, Any] | None = None,
    default_format: str = "json",
) -> RunConfig:
    """Assemble a RunConfig: defaults < ``--config`` file < STIEFEL_SEED < flags.

    Typer folds the environment variable into ``seed``, so a flag or
    environment value always beats the config file.
    """
    file_config = load_config(config_path)
    alpha_value = parse_complex(alpha)
    if alpha_value is None and file_config.get("alpha") is not None:
        try:
            alpha_value = ComplexParam.coerce(file_config["alpha"]).value
        except (TypeError, ValueError) as e:
            raise ConfigError("alpha", f"invalid value {file_config['alpha']!r}") from e

    merged_options = dict(file_config.get("options", {}))
    for key, value in (options or {}).items():
        if value is not None:
            merged_options[key] = value

    output_value = _pick(output, file_config, "output", None)
    config = RunConfig(
        command=command,  # type: ignore[arg-type]
        n=_pick(n, file_config, "n", None),
        m=_pick(m, file_config, "m", None),
        k=_pick(k, file_config, "k", None),
        alpha=alpha_value,
        n_samples=_pick(n_samples, file_config, "n_samples", None),
        seed=int(_pick(seed, file_config, "seed", 0)),
        output=None if output_value is None else Path(output_value),
        format=_pick(fmt, file_config, "format", default_format),
        workers=int(_pick(workers, file_config, "workers", 1)),
        options=merged_options,
    )
    validate_config(config)
    return config


def validate_config(config: RunConfig) -> None:
    """Check dimension and sampling fields before any work is dispatched."""
    if config.format not in FORMATS:
        raise ConfigError("format", f"expected one of {FORMATS}, got {config.format!r}")
    if config.workers < 1:
        raise ConfigError("workers", f"must be at least 1, got {config.workers}")
    if config.n_samples is not None and config.n_samples < 2:
        raise ConfigError("n_samples", f"must be at least 2, got {config.n_samples}")
    if config.seed < 0:
        raise ConfigError("seed", f"must be non-negative, got {config.seed}")
    n, m, k = config.n, config.m, config.k
    if n is not None and n < 1:
        raise ConfigError("n", f"must be at least 1, got {n}")
    if m is not None and n is not None and not 1 <= m <= n:
        raise ConfigError("m", f"need 1 <= m <= n, got n={n}, m={m}")
    if k is not None and n is not None and not 1 <= k <= n:
        raise ConfigError("k", f"need 1 <= k <= n, got n={n}, k={k}")


def require(value: T | None, field: str) -> T:
    """Return ``value`` or raise ConfigError naming the missing field."""
    if value is None:
        raise ConfigError(field, "is required for this command")
    return value


@contextmanager
def domain_errors() -> Iterator[None]:
    """Turn StiefelError into an error line and exit code 2."""
    try:
        yield
    except StiefelError as e:
        err_console.print(f"[red]Error:[/] {e}")
        raise typer.Exit(code=2) from e


def run_with_progress(
    work: Callable[[Callable[[int, int], None] | None], T],
    description: str,
    quiet: bool,
) -> T:
    """Call ``work(progress_callback)`` under a progress bar unless ``quiet``."""
    if quiet:
        return work(None)
    with create_progress() as progress:
        task = progress.add_task(f"[cyan]{description}", total=None)

        def callback(current: int, total: int) -> None:
            progress.update(task, completed=current, total=total)

        return work(callback)


def emit(text: str, output: Path | None, quiet: bool) -> None:
    """Write ``text`` to ``output`` or, without one, to stdout unformatted."""
    if output is None:
        console.out(text, highlight=False)
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(text if text.endswith("\n") else text + "\n")
    if not quiet:
        err_console.print(f"[green]Results written to {output}[/]")
