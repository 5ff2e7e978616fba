"""Exact evaluation of the modified maximal operators on finite spaces.

Both operators take suprema of ball averages int_B f dmu / mu(B(z, k r)) over
radii r > 0; on a finite space the pair (B(z,r), B(z,kr)) is a step function
of r, so it suffices to evaluate at one representative radius per step.  The
representatives are chosen strictly inside each breakpoint gap, so open-ball
membership is never tested at a boundary.

The evaluator keeps an integer core: weights and function values are lifted to
integers over common denominators and the per-point maximisation compares
ratios by cross-multiplication.  A dense-sampling oracle with an independent
evaluation path cross-checks the enumeration, and a float twin (numpy) backs
the randomised searches in `constants`.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple
from weakref import WeakKeyDictionary

import numpy as np

from .rationals import format_rational, parse_rational
from .spaces import MetricMeasureSpace, PointId


@dataclass(frozen=True)
class TestFunction:
    """Nonnegative rational value per atom."""

    __test__ = False  # domain type, not a pytest collectable

    values: tuple[Fraction, ...]

    def __post_init__(self):
        if any(v < 0 for v in self.values):
            raise ValueError("test functions must be nonnegative")

    @classmethod
    def coerce(cls, space: MetricMeasureSpace, values: Iterable[object]) -> "TestFunction":
        vals = tuple(parse_rational(v) for v in values)
        if len(vals) != space.n:
            raise ValueError("function length does not match the space")
        return cls(vals)

    @classmethod
    def delta(cls, space: MetricMeasureSpace, point: int | str) -> "TestFunction":
        idx = space.index_of(point) if isinstance(point, str) else int(point)
        vals = [Fraction(0)] * space.n
        vals[idx] = Fraction(1)
        return cls(tuple(vals))

    @classmethod
    def constant(cls, space: MetricMeasureSpace, value: object) -> "TestFunction":
        return cls((parse_rational(value),) * space.n)

    def is_zero(self) -> bool:
        return all(v == 0 for v in self.values)

    def to_json_list(self) -> list[str]:
        return [format_rational(v) for v in self.values]


class Witness(NamedTuple):
    center: int
    radius: Fraction


@dataclass(frozen=True)
class BallPair:
    """A ball realised by an explicit center and radius, with its dilate.

    Sets alone do not determine center or radius, so both stay explicit;
    members use the strict inequality dist < r (open balls).
    """

    center: PointId
    radius: Fraction
    members: frozenset[int]
    k_members: frozenset[int]


@dataclass(frozen=True)
class MaximalValues:
    op_kind: str  # "centered" | "noncentered"
    k: Fraction
    values: tuple[Fraction, ...]
    witnesses: tuple[Witness, ...]

    def to_json_dict(self) -> dict:
        return {
            "op_kind": self.op_kind,
            "k": format_rational(self.k),
            "values": [format_rational(v) for v in self.values],
            "witnesses": [
                {"center": w.center, "radius": format_rational(w.radius)} for w in self.witnesses
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def witness_balls(space: MetricMeasureSpace, values: "MaximalValues") -> list[BallPair]:
    """Materialise the optimal ball pair behind each point's maximal value."""
    return [ball_at(space, values.k, w.center, w.radius) for w in values.witnesses]


def critical_radii(space: MetricMeasureSpace, k: object, center: int) -> list[Fraction]:
    """Representative radii realising every (B(c,r), B(c,kr)) pair for a center.

    Breakpoints are the distances from the center and those distances divided
    by k; representatives are the midpoints of consecutive breakpoint gaps plus
    one radius below the smallest and one above the largest breakpoint.
    """
    k = parse_rational(k)
    if k < 1:
        raise ValueError("k must be at least 1")
    row = space.dist[center]
    breaks = sorted({d for d in row if d > 0} | {d / k for d in row if d > 0})
    if not breaks:
        return [Fraction(1)]
    reps = [breaks[0] / 2]
    for lo, hi in zip(breaks, breaks[1:]):
        reps.append((lo + hi) / 2)
    reps.append(breaks[-1] + 1)
    return reps


def ball_at(space: MetricMeasureSpace, k: object, center: int, radius: Fraction) -> BallPair:
    k = parse_rational(k)
    radius = parse_rational(radius)
    if radius <= 0:
        raise ValueError("ball radius must be positive")
    row = space.dist[center]
    kr = k * radius
    return BallPair(
        center=PointId(center, space.points[center]),
        radius=radius,
        members=frozenset(i for i in range(space.n) if row[i] < radius),
        k_members=frozenset(i for i in range(space.n) if row[i] < kr),
    )


def ball_table(space: MetricMeasureSpace, k: object) -> list[BallPair]:
    """All distinct (members, k_members) pairs over centers and representative radii."""
    seen: set[tuple[frozenset[int], frozenset[int]]] = set()
    table: list[BallPair] = []
    for center in range(space.n):
        for r in critical_radii(space, k, center):
            pair = ball_at(space, k, center, r)
            key = (pair.members, pair.k_members)
            if key not in seen:
                seen.add(key)
                table.append(pair)
    return table


class _CenterData(NamedTuple):
    order: list[int]            # atoms sorted by distance from the center
    pref_w: list[int]           # integer weight prefix sums over `order`
    pos: list[int]              # pos[x] = #{y : d(center,y) <= d(center,x)}
    radii: list[Fraction]       # kept representative radii (ascending)
    counts: list[int]           # |B(center, r)| per kept radius
    dens: list[int]             # integer mu(B(center, k r)) per kept radius
    entry: list[int]            # entry[x] = first kept index whose ball contains x
    by_entry: list[list[int]]   # atoms grouped by entry index


class Evaluator:
    """Shared enumeration structure for one (space, k); function-independent."""

    def __init__(self, space: MetricMeasureSpace, k: object):
        self.space = space
        self.k = parse_rational(k)
        if self.k < 1:
            raise ValueError("k must be at least 1")
        n = space.n
        self.weight_den = math.lcm(*(w.denominator for w in space.weight))
        self.weights_int = [int(w * self.weight_den) for w in space.weight]
        self.centers: list[_CenterData] = []
        for z in range(n):
            row = space.dist[z]
            order = sorted(range(n), key=lambda j: (row[j], j))
            sorted_d = [row[j] for j in order]
            pref_w = [0]
            for j in order:
                pref_w.append(pref_w[-1] + self.weights_int[j])
            pos = [bisect_right(sorted_d, row[x]) for x in range(n)]
            radii: list[Fraction] = []
            counts: list[int] = []
            dens: list[int] = []
            for r in critical_radii(space, self.k, z):
                c = bisect_left(sorted_d, r)
                ck = bisect_left(sorted_d, self.k * r)
                # Radii sharing |B| are dominated by the first one (same
                # integral, smallest dilate), so keep one radius per count.
                if counts and counts[-1] == c:
                    continue
                radii.append(r)
                counts.append(c)
                dens.append(pref_w[ck])
            entry_for_pos = [0] * (n + 2)
            j = 0
            for pval in range(1, n + 1):
                while counts[j] < pval:
                    j += 1
                entry_for_pos[pval] = j
            entry = [entry_for_pos[pos[x]] for x in range(n)]
            by_entry = [[] for _ in radii]
            for x in range(n):
                by_entry[entry[x]].append(x)
            self.centers.append(_CenterData(order, pref_w, pos, radii, counts, dens, entry, by_entry))

    def _lift(self, f: TestFunction) -> tuple[int, list[int]]:
        den = math.lcm(*(v.denominator for v in f.values))
        g = [int(v * den) * w for v, w in zip(f.values, self.weights_int)]
        return den, g

    def centered(self, f: TestFunction) -> MaximalValues:
        n = self.space.n
        f_den, g = self._lift(f)
        values: list[Fraction] = []
        witnesses: list[Witness] = []
        for z in range(n):
            data = self.centers[z]
            pref_g = [0]
            acc = 0
            for j in data.order:
                acc += g[j]
                pref_g.append(acc)
            best_n, best_d, best_r = -1, 1, data.radii[0]
            for r, c, d in zip(data.radii, data.counts, data.dens):
                num = pref_g[c]
                if num * best_d > best_n * d:
                    best_n, best_d, best_r = num, d, r
            values.append(Fraction(best_n, f_den * best_d))
            witnesses.append(Witness(z, best_r))
        return MaximalValues("centered", self.k, tuple(values), tuple(witnesses))

    def noncentered(self, f: TestFunction) -> MaximalValues:
        n = self.space.n
        f_den, g = self._lift(f)
        val_n = [-1] * n
        val_d = [1] * n
        wit: list[Witness | None] = [None] * n
        for z in range(n):
            data = self.centers[z]
            pref_g = [0]
            acc = 0
            for j in data.order:
                acc += g[j]
                pref_g.append(acc)
            nums = [pref_g[c] for c in data.counts]
            dens = data.dens
            radii = data.radii
            by_entry = data.by_entry
            # Walk radii downwards keeping the best suffix ratio; ties prefer
            # the smaller radius so witnesses are lexicographically minimal.
            best_n, best_d, best_r = -1, 1, radii[-1]
            for j in range(len(radii) - 1, -1, -1):
                num, den = nums[j], dens[j]
                if num * best_d >= best_n * den:
                    best_n, best_d, best_r = num, den, radii[j]
                for x in by_entry[j]:
                    if best_n * val_d[x] > val_n[x] * best_d:
                        val_n[x] = best_n
                        val_d[x] = best_d
                        wit[x] = Witness(z, best_r)
        values = tuple(Fraction(vn, f_den * vd) for vn, vd in zip(val_n, val_d))
        return MaximalValues("noncentered", self.k, tuple(values), tuple(wit))


_EVAL_CACHE: "WeakKeyDictionary[MetricMeasureSpace, dict[Fraction, Evaluator]]" = WeakKeyDictionary()


def evaluator(space: MetricMeasureSpace, k: object) -> Evaluator:
    k = parse_rational(k)
    per_space = _EVAL_CACHE.setdefault(space, {})
    ev = per_space.get(k)
    if ev is None:
        ev = per_space[k] = Evaluator(space, k)
    return ev


def m_centered(space: MetricMeasureSpace, k: object, f: TestFunction) -> MaximalValues:
    """Exact values of the centered operator: sup_r A(f; B(x,r)) / mu(B(x,kr))."""
    return evaluator(space, k).centered(_coerce(space, f))


def m_noncentered(space: MetricMeasureSpace, k: object, f: TestFunction) -> MaximalValues:
    """Exact values of the non-centered operator, maximising over all
    (center, radius) realisations of balls containing each point."""
    return evaluator(space, k).noncentered(_coerce(space, f))


def _coerce(space: MetricMeasureSpace, f) -> TestFunction:
    if isinstance(f, TestFunction):
        if len(f.values) != space.n:
            raise ValueError("function length does not match the space")
        return f
    return TestFunction.coerce(space, f)


def _oracle_radii(space: MetricMeasureSpace, k: Fraction, center: int, samples_per_gap: int) -> list[Fraction]:
    row = space.dist[center]
    breaks = sorted({d for d in row if d > 0} | {d / k for d in row if d > 0})
    s = samples_per_gap
    if not breaks:
        return [Fraction(1)]
    radii = [breaks[0] * t / (s + 1) for t in range(1, s + 1)]
    for lo, hi in zip(breaks, breaks[1:]):
        radii.extend(lo + (hi - lo) * t / (s + 1) for t in range(1, s + 1))
    radii.extend(breaks[-1] + t for t in range(1, s + 1))
    return radii


def m_centered_oracle(
    space: MetricMeasureSpace, k: object, f: TestFunction, samples_per_gap: int = 1
) -> MaximalValues:
    """Brute-force lower bound: sample radii densely and average directly.

    With odd samples_per_gap the sampling hits every gap midpoint and the
    result matches `m_centered` exactly; this is the enumeration's oracle and
    deliberately shares none of its prefix-sum machinery.
    """
    k = parse_rational(k)
    f = _coerce(space, f)
    if samples_per_gap < 1:
        raise ValueError("samples_per_gap must be at least 1")
    n = space.n
    values: list[Fraction] = []
    witnesses: list[Witness] = []
    for z in range(n):
        row = space.dist[z]
        best: Fraction | None = None
        best_r = Fraction(1)
        for r in _oracle_radii(space, k, z, samples_per_gap):
            kr = k * r
            num = sum((f.values[i] * space.weight[i] for i in range(n) if row[i] < r), Fraction(0))
            den = sum((space.weight[i] for i in range(n) if row[i] < kr), Fraction(0))
            ratio = num / den
            if best is None or ratio > best:
                best, best_r = ratio, r
        values.append(best if best is not None else Fraction(0))
        witnesses.append(Witness(z, best_r))
    return MaximalValues("centered", k, tuple(values), tuple(witnesses))


def m_noncentered_oracle(
    space: MetricMeasureSpace, k: object, f: TestFunction, samples_per_gap: int = 1
) -> MaximalValues:
    k = parse_rational(k)
    f = _coerce(space, f)
    if samples_per_gap < 1:
        raise ValueError("samples_per_gap must be at least 1")
    n = space.n
    best: list[Fraction | None] = [None] * n
    wit: list[Witness] = [Witness(0, Fraction(1))] * n
    for z in range(n):
        row = space.dist[z]
        for r in _oracle_radii(space, k, z, samples_per_gap):
            kr = k * r
            members = [i for i in range(n) if row[i] < r]
            num = sum((f.values[i] * space.weight[i] for i in members), Fraction(0))
            den = sum((space.weight[i] for i in range(n) if row[i] < kr), Fraction(0))
            ratio = num / den
            for x in members:
                if best[x] is None or ratio > best[x]:
                    best[x] = ratio
                    wit[x] = Witness(z, r)
    values = tuple(v if v is not None else Fraction(0) for v in best)
    return MaximalValues("noncentered", k, values, tuple(wit))


class FloatEvaluator:
    """Vectorised float twin of `Evaluator` used inside randomised searches.

    Search decisions may rely on doubles; any reported bound is re-certified
    through the exact path afterwards.
    """

    def __init__(self, space: MetricMeasureSpace, k: object):
        ev = evaluator(space, k)
        n = space.n
        self.n = n
        self.weights = np.array([float(w) for w in space.weight])
        self.order = np.array([data.order for data in ev.centers], dtype=np.intp)
        pair_center: list[int] = []
        pair_count: list[int] = []
        pair_den: list[float] = []
        for z, data in enumerate(ev.centers):
            for c, d in zip(data.counts, data.dens):
                pair_center.append(z)
                pair_count.append(c)
                pair_den.append(d / ev.weight_den)
        self.pair_center = np.array(pair_center, dtype=np.intp)
        self.pair_count = np.array(pair_count, dtype=np.intp)
        self.pair_den = np.array(pair_den)
        n_pairs = len(pair_center)
        incl = np.zeros((n_pairs, n), dtype=bool)
        row = 0
        for z, data in enumerate(ev.centers):
            for j, c in enumerate(data.counts):
                for x in range(n):
                    if data.pos[x] <= c:
                        incl[row, x] = True
                row += 1
        self.incl = incl
        self.own = self.pair_center[:, None] == np.arange(n)[None, :]

    def _ratios(self, f: np.ndarray) -> np.ndarray:
        g = f * self.weights
        pref = np.zeros((self.n, self.n + 1))
        np.cumsum(g[self.order], axis=1, out=pref[:, 1:])
        nums = pref[self.pair_center, self.pair_count]
        return nums / self.pair_den

    def centered(self, f: np.ndarray) -> np.ndarray:
        r = self._ratios(f)
        return np.where(self.own, r[:, None], -np.inf).max(axis=0)

    def noncentered(self, f: np.ndarray) -> np.ndarray:
        r = self._ratios(f)
        return np.where(self.incl, r[:, None], -np.inf).max(axis=0)


_FLOAT_CACHE: "WeakKeyDictionary[MetricMeasureSpace, dict[Fraction, FloatEvaluator]]" = WeakKeyDictionary()


def float_evaluator(space: MetricMeasureSpace, k: object) -> FloatEvaluator:
    k = parse_rational(k)
    per_space = _FLOAT_CACHE.setdefault(space, {})
    ev = per_space.get(k)
    if ev is None:
        ev = per_space[k] = FloatEvaluator(space, k)
    return ev
