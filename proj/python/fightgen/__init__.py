"""Two-fighter game-tree planner and fight simulator."""

from ._core import (
    ConfigError,
    ConstructionError,
    InputError,
    ValidationError,
    batch,
    load_scenario,
    parse_seeds,
    run,
    svg,
    table,
)

__all__ = [
    "ConfigError",
    "ConstructionError",
    "InputError",
    "ValidationError",
    "batch",
    "load_scenario",
    "parse_seeds",
    "run",
    "svg",
    "table",
]
