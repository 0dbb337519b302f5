"""Built-in test functions addressed by name.

Names: ``const``, ``zonal:<j>``, ``gram_poly:<degree>``, ``quad:<seed>`` and
``entry:<row>,<col>``.
"""

from __future__ import annotations

from stiefel_transforms.errors import ConfigError, DimensionError
from stiefel_transforms.functions import (
    Entry,
    GramPolynomial,
    ManifoldFunction,
    Quadratic,
    constant,
)
from stiefel_transforms.rankone import ZonalFunction

FUNCTION_NAMES = (
    "const",
    "zonal:<j>",
    "gram_poly:<degree>",
    "quad:<seed>",
    "entry:<i>,<j>",
)


def _int_arg(name: str, text: str) -> int:
    try:
        return int(text)
    except ValueError:
        message = f"{name} expects an integer, got {text!r}"
        raise ConfigError("function", message) from None


def function_from_name(name: str, n: int, m: int) -> ManifoldFunction:
    """Build the registered function ``name`` on V_{n,m}."""
    kind, _, arg = name.partition(":")
    if kind == "const" and not arg:
        return constant(n, m)
    if kind == "zonal":
        if m != 1:
            raise DimensionError(
                f"zonal harmonics live on the sphere (m = 1), got m={m}"
            )
        return ZonalFunction(n, _int_arg(kind, arg)).as_function()
    if kind == "gram_poly":
        degree = _int_arg(kind, arg)
        if degree < 0:
            raise ConfigError("function", f"degree must be non-negative, got {degree}")
        return ManifoldFunction(n, m, GramPolynomial(degree), name=name)
    if kind == "quad":
        quadratic = Quadratic.random(n, _int_arg(kind, arg))
        return ManifoldFunction(n, m, quadratic, name=name)
    if kind == "entry":
        row, _, col = arg.partition(",")
        i, j = _int_arg(kind, row), _int_arg(kind, col)
        if not (0 <= i < n and 0 <= j < m):
            raise DimensionError(f"entry ({i}, {j}) outside an {n} x {m} frame")
        return ManifoldFunction(n, m, Entry(i, j), right_o_invariant=False, name=name)
    expected = ", ".join(FUNCTION_NAMES)
    raise ConfigError(
        "function", f"unknown function {name!r}; expected one of {expected}"
    )
