"""JSON and CSV serialisation of estimates, requests and reports."""

from __future__ import annotations

import csv
import io
import json
from typing import Literal

from stiefel_transforms.errors import ConfigError
from stiefel_transforms.models import (
    CheckRecord,
    ComplexParam,
    MCEstimate,
    MultiplierReport,
    SuiteReport,
    TransformRequest,
)

CSV_COLUMNS = (
    "name",
    "eq",
    "n",
    "m",
    "k",
    "alpha_re",
    "alpha_im",
    "value_re",
    "value_im",
    "stderr",
    "reference_re",
    "reference_im",
    "sigma",
    "pass",
)
MULTIPLIER_COLUMNS = (
    "check",
    "n",
    "j",
    "lambda_re",
    "lambda_im",
    "formula_re",
    "formula_im",
    "value_re",
    "value_im",
    "stderr",
    "pass",
)

Format = Literal["json", "csv"]


def complex_pair(z: complex | None) -> list[float] | None:
    """[re, im] for JSON; complex numbers are never emitted as strings."""
    if z is None:
        return None
    z = complex(z)
    return [z.real, z.imag]


def estimate_to_dict(estimate: MCEstimate) -> dict:
    return {
        "value": complex_pair(estimate.value),
        "stderr": estimate.stderr,
        "n_samples": estimate.n_samples,
        "n_rejected": estimate.n_rejected,
        "degenerate": estimate.degenerate,
    }


def estimate_from_dict(data: dict) -> MCEstimate:
    return MCEstimate(
        value=ComplexParam.coerce(data["value"]).value,
        stderr=float(data["stderr"]),
        n_samples=int(data["n_samples"]),
        n_rejected=int(data.get("n_rejected", 0)),
        degenerate=bool(data.get("degenerate", False)),
    )


def request_to_dict(request: TransformRequest) -> dict:
    return {
        "kind": request.kind,
        "n": request.n,
        "m": request.m,
        "k": request.k,
        "alpha": complex_pair(request.alpha),
        "n_samples": request.n_samples,
        "seed": request.seed,
        "function": request.function,
    }


def request_from_dict(data: dict) -> TransformRequest:
    """Build a TransformRequest, naming the offending field on bad input."""
    for key in ("kind", "n", "m", "k"):
        if key not in data:
            raise ConfigError(key, "missing from transform request")
    alpha = data.get("alpha")
    try:
        return TransformRequest(
            kind=data["kind"],
            n=int(data["n"]),
            m=int(data["m"]),
            k=int(data["k"]),
            alpha=None if alpha is None else ComplexParam.coerce(alpha).value,
            n_samples=int(data.get("n_samples", 100_000)),
            seed=int(data.get("seed", 0)),
            function=str(data.get("function", "const")),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError("request", str(e)) from e


def record_to_dict(record: CheckRecord) -> dict:
    return {
        "name": record.name,
        "identity": record.identity,
        "n": record.n,
        "m": record.m,
        "k": record.k,
        "alpha": complex_pair(record.alpha),
        "value": complex_pair(record.value),
        "reference": complex_pair(record.reference),
        "stderr": record.stderr,
        "sigma": record.sigma,
        "tolerance": record.tolerance,
        "pass": record.passed,
    }


def report_to_dict(report: SuiteReport) -> dict:
    """Convert a SuiteReport to a JSON-serializable dictionary."""
    return {
        "suite": report.suite,
        "seed": report.seed,
        "created": report.created,
        "passed": report.passed,
        "n_checks": len(report.records),
        "n_failed": len(report.failures),
        "records": [record_to_dict(r) for r in report.records],
    }


def multiplier_report_to_dict(report: MultiplierReport) -> dict:
    return {
        "check": report.check,
        "n": report.n,
        "statistic": report.statistic,
        "passed": report.passed,
        "notes": report.notes,
        "rows": [
            {
                "j": row.j,
                "lambda": complex_pair(row.lam),
                "formula": complex_pair(row.formula),
                "value": complex_pair(row.value),
                "stderr": row.stderr,
                "pass": row.passed,
            }
            for row in report.rows
        ],
    }


def _blank(x: float | int | None) -> str | float | int:
    return "" if x is None else x


def _csv(columns: tuple[str, ...], rows: list[dict]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=columns, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def report_to_csv(report: SuiteReport) -> str:
    rows = []
    for r in report.records:
        alpha = complex(r.alpha) if r.alpha is not None else None
        rows.append(
            {
                "name": r.name,
                "eq": r.identity,
                "n": _blank(r.n),
                "m": _blank(r.m),
                "k": _blank(r.k),
                "alpha_re": _blank(alpha.real if alpha is not None else None),
                "alpha_im": _blank(alpha.imag if alpha is not None else None),
                "value_re": r.value.real,
                "value_im": r.value.imag,
                "stderr": _blank(r.stderr),
                "reference_re": r.reference.real,
                "reference_im": r.reference.imag,
                "sigma": _blank(r.sigma),
                "pass": r.passed,
            }
        )
    return _csv(CSV_COLUMNS, rows)


def multiplier_report_to_csv(report: MultiplierReport) -> str:
    rows = []
    for row in report.rows:
        lam = complex(row.lam) if row.lam is not None else None
        rows.append(
            {
                "check": report.check,
                "n": report.n,
                "j": row.j,
                "lambda_re": _blank(lam.real if lam is not None else None),
                "lambda_im": _blank(lam.imag if lam is not None else None),
                "formula_re": row.formula.real,
                "formula_im": row.formula.imag,
                "value_re": row.value.real,
                "value_im": row.value.imag,
                "stderr": _blank(row.stderr),
                "pass": row.passed,
            }
        )
    return _csv(MULTIPLIER_COLUMNS, rows)


def table_to_csv(columns: tuple[str, ...], rows: list[dict]) -> str:
    return _csv(columns, rows)


def render(data: dict | list, fmt: Format, csv_text: str | None = None) -> str:
    """JSON text of ``data``, or the supplied CSV text."""
    if fmt == "csv":
        if csv_text is None:
            raise ConfigError(
                "format", "csv output is not available for this command"
            )
        return csv_text
    return json.dumps(data, indent=2)
