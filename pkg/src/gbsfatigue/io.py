"""Damage CSV ingestion, curve CSV emission and reproducible JSON reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from .errors import DomainError, InputError
from .estimation import DamageSeries

__all__ = ["GridSpec", "parse_damage_csv", "emit_curve_csv", "normalize", "dumps_report", "write_report",
           "write_damage_fixture"]

SIG_DIGITS = 12


def _fmt(x: float) -> str:
    return f"{x:.{SIG_DIGITS}g}"


def parse_damage_csv(path: str | Path, known_mean: float | None = None) -> DamageSeries:
    """Read a single-column damage file.

    A non-numeric first token is taken as a header. Blank lines are skipped.
    Errors name the 1-based line number of the offending row.
    """
    text = Path(path).read_text()
    values: list[float] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        fields = [f.strip() for f in line.split(",")]
        if len(fields) != 1:
            raise InputError(f"expected a single column, found {len(fields)}", lineno)
        try:
            value = float(fields[0])
        except ValueError:
            if not values and lineno == 1:
                continue  # header
            raise InputError(f"cannot parse {fields[0]!r} as a number", lineno) from None
        if not math.isfinite(value):
            raise InputError(f"non-finite value {fields[0]!r}", lineno)
        if value < 0:
            raise InputError(f"negative damage {value}", lineno)
        values.append(value)
    if not values:
        raise InputError(f"{path} contains no damage values")
    return DamageSeries(np.array(values), known_mean=known_mean)


def write_damage_fixture(path: str | Path, values: np.ndarray) -> None:
    """Write damages under a ``damage`` header with round-trip precision."""
    lines = ["damage"] + [repr(float(v)) for v in np.asarray(values, dtype=float).ravel()]
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class GridSpec:
    """Evaluation grid from ``start`` to ``stop`` with ``points`` nodes."""

    start: float
    stop: float
    points: int
    log: bool = False

    def __post_init__(self):
        if not self.start < self.stop:
            raise DomainError(f"grid needs min < max, got {self.start} >= {self.stop}")
        if self.points < 2:
            raise DomainError(f"grid needs at least 2 points, got {self.points}")
        if self.log and not self.start > 0:
            raise DomainError("a log grid needs a positive lower end")

    def values(self) -> np.ndarray:
        if self.log:
            return np.geomspace(self.start, self.stop, self.points)
        return np.linspace(self.start, self.stop, self.points)


def emit_curve_csv(fn: Callable[[np.ndarray], np.ndarray], grid: GridSpec | np.ndarray, path: str | Path) -> None:
    """Write ``t,value`` rows with 12 significant digits."""
    t = grid.values() if isinstance(grid, GridSpec) else np.asarray(grid, dtype=float)
    values = np.asarray(fn(t), dtype=float)
    lines = ["t,value"] + [f"{_fmt(a)},{_fmt(b)}" for a, b in zip(t, values)]
    Path(path).write_text("\n".join(lines) + "\n")


def normalize(obj):
    """Convert a report to JSON-ready builtins, rounding floats to 12 significant digits.

    Non-finite floats become ``None``.
    """
    if isinstance(obj, dict):
        return {str(k): normalize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [normalize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [normalize(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return float(_fmt(x)) if math.isfinite(x) else None
    return obj


def dumps_report(report: dict) -> str:
    return json.dumps(normalize(report), indent=2, sort_keys=True) + "\n"


def write_report(report: dict, path: str | Path | None) -> str:
    """Serialize ``report``; write it to ``path`` if given and return the text."""
    text = dumps_report(report)
    if path is not None:
        Path(path).write_text(text)
    return text
