"""Seeded random generators for spaces and test functions.

Everything draws from a caller-supplied ``random.Random`` so experiment
reports and test suites are reproducible from a single integer seed.
"""

from __future__ import annotations

import random
from fractions import Fraction

from . import constructions as cons
from .maximal import TestFunction
from .spaces import MetricMeasureSpace, make_space

_LOG_SCALE = 2**20


def random_fraction(rng: random.Random, lo: Fraction, hi: Fraction, max_den: int = 8) -> Fraction:
    den = rng.randint(1, max_den)
    lo_n = -((-lo.numerator * den) // lo.denominator)  # ceil(lo * den)
    hi_n = (hi.numerator * den) // hi.denominator
    if hi_n < lo_n:
        return Fraction(lo)
    return Fraction(rng.randint(lo_n, hi_n), den)


def log_uniform_fraction(rng: random.Random) -> Fraction:
    """Log-uniform over [2^-10, 2^10], rationalised to denominator 2^20."""
    u = rng.uniform(-10.0, 10.0)
    return Fraction(max(1, round(2.0**u * _LOG_SCALE)), _LOG_SCALE)


def random_function(rng: random.Random, space: MetricMeasureSpace) -> TestFunction:
    return TestFunction(tuple(log_uniform_fraction(rng) for _ in range(space.n)))


def random_delta(rng: random.Random, space: MetricMeasureSpace) -> TestFunction:
    return TestFunction.delta(space, rng.randrange(space.n))


def random_box_space(rng: random.Random, n_points: int, max_den: int = 8) -> MetricMeasureSpace:
    """Random space with distances in [1, 2]; the triangle inequality is then
    automatic because every distance sum is at least 2."""
    one, two = Fraction(1), Fraction(2)
    dist = [[Fraction(0)] * n_points for _ in range(n_points)]
    for i in range(n_points):
        for j in range(i + 1, n_points):
            d = random_fraction(rng, one, two, max_den)
            dist[i][j] = dist[j][i] = d
    weights = [random_fraction(rng, Fraction(1, 4), Fraction(4), max_den) for _ in range(n_points)]
    return make_space([f"p_{i}" for i in range(n_points)], dist, weights, "")


def _random_basic_s(rng: random.Random) -> MetricMeasureSpace:
    tau = rng.randint(1, 4)
    d = 1 + Fraction(rng.randint(1, 8), 8)
    m = 1 + random_fraction(rng, Fraction(1, 2), Fraction(3))
    return cons.basic_s(tau, d, m)


def _random_basic_t(rng: random.Random) -> MetricMeasureSpace:
    tau = rng.randint(1, 3)
    d = 1 + Fraction(rng.randint(1, 16), 8)
    m = 1 + random_fraction(rng, Fraction(1, 2), Fraction(3))
    return cons.basic_t(tau, d, m)


def _random_segment(rng: random.Random) -> MetricMeasureSpace:
    n_max = rng.randint(1, 3)
    gaps, table = [], []
    for n in range(1, n_max + 1):
        raw = [random_fraction(rng, Fraction(1, 4), Fraction(2)) for _ in range(n)]
        total = sum(raw, Fraction(0))
        gaps.append([g / (2 * total) for g in raw])
        raw_w = [random_fraction(rng, Fraction(1, 4), Fraction(2)) for _ in range(n + 1)]
        total_w = sum(raw_w, Fraction(0))
        cap = Fraction(1, 2**n)
        table.append([w * cap / (2 * total_w) for w in raw_w])
    return cons.segment_type(gaps, table)


def random_first_generation(rng: random.Random) -> MetricMeasureSpace:
    tau = [rng.randint(1, 3) for _ in range(rng.randint(1, 3))]
    table = [[random_fraction(rng, Fraction(1, 4), Fraction(2)) for _ in range(t)] for t in tau]
    return cons.first_generation(tau, table)


def random_second_generation(rng: random.Random) -> MetricMeasureSpace:
    tau = [rng.randint(1, 3) for _ in range(rng.randint(1, 3))]
    table = [[random_fraction(rng, Fraction(1, 4), Fraction(2)) for _ in range(t)] for t in tau]
    return cons.second_generation(tau, table)


def _random_glue(rng: random.Random) -> MetricMeasureSpace:
    comps = [_random_basic_s(rng), _random_basic_t(rng)]
    k0 = Fraction(rng.randint(2, 6), 2)
    return cons.glue(comps, k0)


_KINDS = (
    "box",
    "basic_s",
    "basic_t",
    "segment",
    "first_generation",
    "second_generation",
    "modified",
    "glue",
)


def random_space(rng: random.Random, kind: str | None = None) -> MetricMeasureSpace:
    kind = kind or rng.choice(_KINDS)
    if kind == "box":
        return random_box_space(rng, rng.randint(2, 8))
    if kind == "basic_s":
        return _random_basic_s(rng)
    if kind == "basic_t":
        return _random_basic_t(rng)
    if kind == "segment":
        return _random_segment(rng)
    if kind == "first_generation":
        return random_first_generation(rng)
    if kind == "second_generation":
        return random_second_generation(rng)
    if kind == "modified":
        return cons.lemma1_modify(random_second_generation(rng))
    if kind == "glue":
        return _random_glue(rng)
    raise ValueError(f"unknown random space kind {kind!r}")
