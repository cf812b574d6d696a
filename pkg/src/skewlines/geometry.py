"""Directed lines in 3-space: canonical form, pair classification, distance,
chirality, and Plücker coordinates.

A directed line is stored as a unit direction ``v`` together with its moment
point ``w``, the point of the line closest to the origin (so ``<w, v> = 0``).
This pins down the otherwise-ambiguous offset and makes line equality and the
Plücker moment ``q = w x v`` unambiguous.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "UNIT_TOL",
    "DEFAULT_PAIR_TOL",
    "ZeroDirection",
    "CoplanarPair",
    "ConfigurationError",
    "PairClass",
    "DirectedLine",
    "PluckerLine",
    "LineConfiguration",
    "normalize_line",
    "classify_pair",
    "distance",
    "chirality",
    "reverse",
    "reflect_z",
    "plucker",
    "signed_gram_entry",
    "transform",
    "pair_indices",
    "configuration_to_dict",
    "configuration_from_dict",
    "load_configuration",
    "save_configuration",
]

UNIT_TOL = 1e-12
# Parallelism / coplanarity threshold.  ||v x v'|| < tol classifies as
# parallel; |<v x v', w - w'>| < tol * max(1, ||w - w'||) as intersecting.
DEFAULT_PAIR_TOL = 1e-9


class ZeroDirection(ValueError):
    """Direction vector too short to normalize."""


class CoplanarPair(ValueError):
    """An operation needed a skew pair but the lines are parallel,
    intersecting, or identical within tolerance."""

    def __init__(self, message: str, indices: tuple[int, int] | None = None):
        super().__init__(message)
        self.indices = indices


class ConfigurationError(ValueError):
    """Malformed line-configuration data."""


class PairClass(Enum):
    SKEW = "Skew"
    PARALLEL = "Parallel"
    INTERSECTING = "Intersecting"
    IDENTICAL = "Identical"


def _vec3(x) -> np.ndarray:
    v = np.asarray(x, dtype=float)
    if v.shape != (3,):
        raise ValueError(f"expected a 3-vector, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector components must be finite")
    return v


@dataclass(frozen=True, eq=False)
class DirectedLine:
    """The line ``R * direction + moment_point`` with unit direction and
    ``<moment_point, direction> = 0``.

    Use :func:`normalize_line` to build one from an arbitrary point and
    direction; the constructor only accepts already-canonical data.
    """

    direction: np.ndarray
    moment_point: np.ndarray

    def __post_init__(self):
        v = _vec3(self.direction)
        w = _vec3(self.moment_point)
        if abs(float(v @ v) - 1.0) > 1e-10:
            raise ValueError("direction must be a unit vector")
        if abs(float(w @ v)) > UNIT_TOL * max(1.0, float(np.linalg.norm(w))):
            raise ValueError("moment_point must be orthogonal to direction")
        v = v.copy()
        w = w.copy()
        v.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "direction", v)
        object.__setattr__(self, "moment_point", w)

    def point_at(self, t: float) -> np.ndarray:
        """The point ``moment_point + t * direction``."""
        return self.moment_point + t * self.direction

    def __repr__(self) -> str:
        v, w = self.direction, self.moment_point
        return f"DirectedLine(v=({v[0]:.6g}, {v[1]:.6g}, {v[2]:.6g}), w=({w[0]:.6g}, {w[1]:.6g}, {w[2]:.6g}))"


@dataclass(frozen=True, eq=False)
class PluckerLine:
    """Plücker coordinates (q, v) of a directed line, q = w x v."""

    q: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        q = _vec3(self.q)
        v = _vec3(self.v)
        if abs(float(v @ v) - 1.0) > 1e-10:
            raise ValueError("v must be a unit vector")
        if abs(float(q @ v)) > UNIT_TOL * max(1.0, float(np.linalg.norm(q))):
            raise ValueError("q must be orthogonal to v")
        object.__setattr__(self, "q", q.copy())
        object.__setattr__(self, "v", v.copy())


def normalize_line(point, direction) -> DirectedLine:
    """Canonicalize a line given by any point on it and any direction vector.

    The direction is rescaled to unit length (orientation preserved) and the
    point is replaced by the foot of the perpendicular from the origin.
    """
    p = _vec3(point)
    d = _vec3(direction)
    nd = float(np.linalg.norm(d))
    if nd < 1e-12:
        raise ZeroDirection("direction vector has norm < 1e-12")
    v = d / nd
    w = p - float(p @ v) * v
    return DirectedLine(v, w)


def classify_pair(a: DirectedLine, b: DirectedLine, tol: float = DEFAULT_PAIR_TOL) -> PairClass:
    """Classify a pair of lines as Skew, Parallel, Intersecting, or Identical.

    Parallel means ||v_a x v_b|| < tol; among parallel pairs, Identical means
    the canonical moment points agree to tol.  Non-parallel pairs are
    Intersecting when |<v_a x v_b, w_a - w_b>| < tol * max(1, ||w_a - w_b||),
    else Skew.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    c = np.cross(a.direction, b.direction)
    cn = float(np.linalg.norm(c))
    dw = a.moment_point - b.moment_point
    if cn < tol:
        if float(np.linalg.norm(dw)) < tol:
            return PairClass.IDENTICAL
        return PairClass.PARALLEL
    if abs(float(c @ dw)) < tol * max(1.0, float(np.linalg.norm(dw))):
        return PairClass.INTERSECTING
    return PairClass.SKEW


def distance(a: DirectedLine, b: DirectedLine) -> float:
    """Minimum Euclidean distance between the two lines.

    Skew pairs use |<(v_a x v_b)/||v_a x v_b||, w_a - w_b>|; parallel pairs
    the perpendicular offset; intersecting pairs return 0.
    """
    cls = classify_pair(a, b)
    dw = a.moment_point - b.moment_point
    if cls is PairClass.INTERSECTING:
        return 0.0
    if cls in (PairClass.PARALLEL, PairClass.IDENTICAL):
        perp = dw - float(dw @ a.direction) * a.direction
        return float(np.linalg.norm(perp))
    c = np.cross(a.direction, b.direction)
    return abs(float(c @ dw)) / float(np.linalg.norm(c))


def chirality(a: DirectedLine, b: DirectedLine) -> int:
    """Sign of <v_a x v_b, w_a - w_b> for a skew pair; +1 or -1.

    Symmetric in its arguments.  Raises :class:`CoplanarPair` when the pair
    is not skew (the sign argument is within tolerance of zero and therefore
    numerically meaningless).
    """
    cls = classify_pair(a, b)
    if cls is not PairClass.SKEW:
        raise CoplanarPair(f"chirality needs a skew pair, got {cls.value}")
    g = float(np.cross(a.direction, b.direction) @ (a.moment_point - b.moment_point))
    return 1 if g > 0.0 else -1


def reverse(a: DirectedLine) -> DirectedLine:
    """The same line with its direction negated."""
    return DirectedLine(-a.direction, a.moment_point)


def reflect_z(a: DirectedLine) -> DirectedLine:
    """Image of the line under the mirror (x, y, z) -> (x, y, -z).

    Flips the chirality of every skew pair when applied to both lines.
    """
    m = np.array([1.0, 1.0, -1.0])
    return DirectedLine(a.direction * m, a.moment_point * m)


def plucker(a: DirectedLine) -> PluckerLine:
    """Plücker coordinates (q, v) with q = moment_point x direction."""
    return PluckerLine(np.cross(a.moment_point, a.direction), a.direction)


def signed_gram_entry(a: DirectedLine, b: DirectedLine) -> float:
    """The bilinear pairing <v_a x v_b, w_a - w_b>.

    Equals <q_a, v_b> + <v_a, q_b> in Plücker coordinates, and
    chirality * distance * ||v_a x v_b|| for skew pairs.
    """
    return float(np.cross(a.direction, b.direction) @ (a.moment_point - b.moment_point))


def transform(a: DirectedLine, rotation, translation) -> DirectedLine:
    """Image of the line under x -> rotation @ x + translation."""
    r = np.asarray(rotation, dtype=float)
    t = _vec3(translation)
    if r.shape != (3, 3):
        raise ValueError("rotation must be a 3x3 matrix")
    return normalize_line(r @ a.moment_point + t, r @ a.direction)


def pair_indices(n: int) -> list[tuple[int, int]]:
    """All 1-based pairs (i, j), i < j, in lexicographic order."""
    return [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]


@dataclass(frozen=True, eq=False)
class LineConfiguration:
    """An ordered set of directed lines with a target pairwise distance."""

    lines: tuple[DirectedLine, ...]
    target_distance: float = 1.0
    label: str = ""

    def __post_init__(self):
        lines = tuple(self.lines)
        if len(lines) < 1:
            raise ConfigurationError("a configuration needs at least one line")
        if not all(isinstance(l, DirectedLine) for l in lines):
            raise ConfigurationError("lines must be DirectedLine instances")
        if not (self.target_distance > 0):
            raise ConfigurationError("target_distance must be positive")
        object.__setattr__(self, "lines", lines)

    @property
    def n(self) -> int:
        return len(self.lines)

    def __iter__(self) -> Iterator[DirectedLine]:
        return iter(self.lines)


def configuration_to_dict(config: LineConfiguration) -> dict:
    d = {
        "pair_distance": config.target_distance,
        "lines": [
            {"point": [float(x) for x in l.moment_point],
             "direction": [float(x) for x in l.direction]}
            for l in config.lines
        ],
    }
    if config.label:
        d["label"] = config.label
    return d


def configuration_from_dict(data: dict) -> LineConfiguration:
    """Parse and canonicalize a configuration from its JSON dictionary."""
    if not isinstance(data, dict):
        raise ConfigurationError("configuration must be a JSON object")
    try:
        target = float(data["pair_distance"])
        raw_lines = data["lines"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"bad configuration: {exc}") from exc
    if not isinstance(raw_lines, list) or not raw_lines:
        raise ConfigurationError("'lines' must be a non-empty list")
    lines = []
    for idx, entry in enumerate(raw_lines, start=1):
        try:
            point = entry["point"]
            direction = entry["direction"]
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"line {idx}: {exc}") from exc
        try:
            lines.append(normalize_line(point, direction))
        except (ValueError, ZeroDirection) as exc:
            raise ConfigurationError(f"line {idx}: {exc}") from exc
    label = str(data.get("label", ""))
    if not (target > 0):
        raise ConfigurationError("pair_distance must be positive")
    return LineConfiguration(tuple(lines), target, label)


def load_configuration(path) -> LineConfiguration:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigurationError(f"cannot read configuration {path}: {exc}") from exc
    return configuration_from_dict(data)


def save_configuration(config: LineConfiguration, path) -> None:
    Path(path).write_text(json.dumps(configuration_to_dict(config), indent=2) + "\n")
