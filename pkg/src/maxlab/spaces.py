"""Finite atomic metric measure spaces over exact rational arithmetic.

A space is a list of labelled atoms, a dense symmetric matrix of rational
distances, and a vector of strictly positive rational weights.  All operations
here are pure; spaces are immutable and safe to share between workers.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

from .rationals import format_rational, parse_rational


class PointId(NamedTuple):
    index: int
    label: str | None = None


@dataclass(frozen=True)
class Violation:
    kind: str
    where: tuple[int, ...]


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...]


@dataclass(frozen=True, eq=False)
class MetricMeasureSpace:
    points: tuple[str, ...]
    dist: tuple[tuple[Fraction, ...], ...]
    weight: tuple[Fraction, ...]
    provenance: str = ""

    @property
    def n(self) -> int:
        return len(self.points)

    def point_ids(self) -> tuple[PointId, ...]:
        return tuple(PointId(i, lab) for i, lab in enumerate(self.points))

    def label(self, index: int) -> str:
        return self.points[index]

    def index_of(self, label: str) -> int:
        return self.points.index(label)

    def descriptor(self) -> dict | None:
        """Construction descriptor recovered from provenance, if recorded."""
        if not self.provenance:
            return None
        try:
            data = json.loads(self.provenance)
        except ValueError:
            return None
        if isinstance(data, dict) and "kind" in data:
            return {"kind": data["kind"], "params": data.get("params", {})}
        return None

    def to_json_dict(self) -> dict:
        return {
            "points": list(self.points),
            "dist": [[format_rational(d) for d in row] for row in self.dist],
            "weight": [format_rational(w) for w in self.weight],
            "provenance": self.provenance,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)

    @classmethod
    def from_json_dict(cls, data: dict) -> "MetricMeasureSpace":
        return make_space(
            data["points"],
            data["dist"],
            data["weight"],
            data.get("provenance", ""),
        )

    @classmethod
    def from_json(cls, text: str) -> "MetricMeasureSpace":
        return cls.from_json_dict(json.loads(text))

    def subspace(self, indices: Sequence[int], provenance: str = "") -> "MetricMeasureSpace":
        """Restriction to a subset of atoms (same metric and weights)."""
        idx = list(indices)
        return MetricMeasureSpace(
            points=tuple(self.points[i] for i in idx),
            dist=tuple(tuple(self.dist[i][j] for j in idx) for i in idx),
            weight=tuple(self.weight[i] for i in idx),
            provenance=provenance or json.dumps({"kind": "subspace", "params": {"indices": idx}}),
        )


def make_space(
    points: Iterable[str],
    dist: Iterable[Iterable[object]],
    weight: Iterable[object],
    provenance: str = "",
) -> MetricMeasureSpace:
    """Coerce raw data (labels, nested distances, weights) into a space value."""
    pts = tuple(str(p) for p in points)
    matrix = tuple(tuple(parse_rational(d) for d in row) for row in dist)
    weights = tuple(parse_rational(w) for w in weight)
    if len(matrix) != len(pts) or any(len(row) != len(pts) for row in matrix):
        raise ValueError("distance matrix shape does not match the point list")
    if len(weights) != len(pts):
        raise ValueError("weight vector length does not match the point list")
    return MetricMeasureSpace(pts, matrix, weights, provenance)


def validate_metric(space: MetricMeasureSpace) -> ValidationReport:
    """Check symmetry, positivity, zero diagonal, and the triangle inequality.

    Violations are reported as data with witness indices, never raised.
    """
    n = space.n
    violations: list[Violation] = []
    for i in range(n):
        if space.dist[i][i] != 0:
            violations.append(Violation("diagonal", (i,)))
        if space.weight[i] <= 0:
            violations.append(Violation("nonpositive-weight", (i,)))
    for i in range(n):
        for j in range(i + 1, n):
            if space.dist[i][j] != space.dist[j][i]:
                violations.append(Violation("asymmetry", (i, j)))
            if space.dist[i][j] <= 0:
                violations.append(Violation("nonpositive-distance", (i, j)))

    # Triangle check on integers over a common denominator; Fractions are too
    # slow for the O(n^3) loop.
    den = math.lcm(*(d.denominator for row in space.dist for d in row)) if n else 1
    d_int = [[int(d * den) for d in row] for row in space.dist]
    for l in range(n):
        row_l = d_int[l]
        for i in range(n):
            dil = row_l[i]
            row_i = d_int[i]
            for j in range(i + 1, n):
                if row_i[j] > dil + row_l[j]:
                    violations.append(Violation("triangle", (i, l, j)))
    return ValidationReport(ok=not violations, violations=tuple(violations))


def total_measure(space: MetricMeasureSpace) -> Fraction:
    return sum(space.weight, Fraction(0))


def diameter(space: MetricMeasureSpace) -> Fraction:
    if space.n == 0:
        raise ValueError("diameter of an empty space")
    best = Fraction(0)
    for i in range(space.n):
        for j in range(i + 1, space.n):
            if space.dist[i][j] > best:
                best = space.dist[i][j]
    return best


def _scaled_provenance(space: MetricMeasureSpace, kind: str, factor: Fraction) -> str:
    base: object
    try:
        base = json.loads(space.provenance) if space.provenance else ""
    except ValueError:
        base = space.provenance
    return json.dumps(
        {"kind": kind, "params": {"factor": format_rational(factor), "base": base}},
        sort_keys=True,
    )


def scale_metric(space: MetricMeasureSpace, c: Fraction) -> MetricMeasureSpace:
    c = parse_rational(c)
    if c <= 0:
        raise ValueError("metric scale factor must be positive")
    return MetricMeasureSpace(
        points=space.points,
        dist=tuple(tuple(d * c for d in row) for row in space.dist),
        weight=space.weight,
        provenance=_scaled_provenance(space, "scale_metric", c),
    )


def scale_measure(space: MetricMeasureSpace, c: Fraction) -> MetricMeasureSpace:
    c = parse_rational(c)
    if c <= 0:
        raise ValueError("measure scale factor must be positive")
    return MetricMeasureSpace(
        points=space.points,
        dist=space.dist,
        weight=tuple(w * c for w in space.weight),
        provenance=_scaled_provenance(space, "scale_measure", c),
    )
