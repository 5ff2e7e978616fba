"""Builders for every space family used by the lab.

Branch/star/segment constructions, the two-valued-metric modification, the
distance-(k0+1) gluing of rescaled components, and the parametric families
behind the region and threshold experiments.  Everything is exact: solved
weight sequences and metric entries are rationals, never floats.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .rationals import format_rational, parse_rational, pow_ceil, pow_floor
from .spaces import (
    MetricMeasureSpace,
    diameter,
    make_space,
    scale_measure,
    scale_metric,
    total_measure,
)

WeightTable = Sequence[Sequence[object]]


def _prov(kind: str, params: dict, **extra) -> str:
    data = {"kind": kind, "params": params}
    data.update(extra)
    return json.dumps(data, sort_keys=True)


def _table(values: WeightTable) -> list[list[Fraction]]:
    return [[parse_rational(v) for v in row] for row in values]


def _table_json(values: Sequence[Sequence[Fraction]]) -> list[list[str]]:
    return [[format_rational(v) for v in row] for row in values]


def constant_table(row_lengths: Sequence[int], value: object) -> list[list[Fraction]]:
    """Weight table with one constant value, shaped ``row_lengths``."""
    v = parse_rational(value)
    return [[v] * length for length in row_lengths]


def single_point(weight: object = 1, label: str = "a") -> MetricMeasureSpace:
    w = parse_rational(weight)
    if w <= 0:
        raise ValueError("atom weight must be positive")
    return make_space(
        [label],
        [[Fraction(0)]],
        [w],
        _prov("point", {"weight": format_rational(w), "label": label}),
    )


def first_generation(tau: Sequence[int], F: WeightTable) -> MetricMeasureSpace:
    """Hub-and-leaves branches with a two-valued metric and halving branch measures.

    Branch n has a hub x_n at distance 1 from its tau_n leaves; every other
    pair sits at distance 2.  Hub weights d_n solve mu(branch n) =
    mu(branch n-1)/2 with d_1 = 1; leaf weights are d_n * F(n, i).
    """
    tau = [int(t) for t in tau]
    table = _table(F)
    if len(table) != len(tau):
        raise ValueError("F must provide one row per branch")
    if not tau or any(t < 1 for t in tau):
        raise ValueError("tau entries must be positive integers")
    for n0, t in enumerate(tau):
        if len(table[n0]) != t:
            raise ValueError(f"F row {n0 + 1} must have {t} entries")
        if any(v <= 0 for v in table[n0]):
            raise ValueError("F must be strictly positive")

    labels: list[str] = []
    weights: list[Fraction] = []
    branch_of: list[int] = []
    hub_flags: list[bool] = []
    prev_branch_measure: Fraction | None = None
    for n0, t in enumerate(tau):
        f_sum = sum(table[n0], Fraction(0))
        if prev_branch_measure is None:
            d_n = Fraction(1)
        else:
            d_n = prev_branch_measure / (2 * (1 + f_sum))
        if d_n <= 0:
            raise ValueError("solved hub weight is not positive")
        labels.append(f"x_{n0 + 1}")
        weights.append(d_n)
        branch_of.append(n0)
        hub_flags.append(True)
        for i in range(t):
            labels.append(f"x_{n0 + 1}_{i + 1}")
            weights.append(d_n * table[n0][i])
            branch_of.append(n0)
            hub_flags.append(False)
        prev_branch_measure = d_n * (1 + f_sum)

    n_pts = len(labels)
    one, two = Fraction(1), Fraction(2)
    dist = [[Fraction(0)] * n_pts for _ in range(n_pts)]
    for i in range(n_pts):
        for j in range(i + 1, n_pts):
            same_branch = branch_of[i] == branch_of[j]
            d = one if same_branch and (hub_flags[i] or hub_flags[j]) else two
            dist[i][j] = dist[j][i] = d
    return make_space(
        labels,
        dist,
        weights,
        _prov("first_generation", {"tau": tau, "F": _table_json(table)}),
    )


def second_generation(tau_star: Sequence[int], F_star: WeightTable) -> MetricMeasureSpace:
    """Branches y_n -- y_ni -- y'_ni with unit edges only along those pairs.

    Weights: mu(y_n) = d*_n, mu(y_ni) = d*_n / tau*_n, mu(y'_ni) = d*_n F*(n,i),
    with d*_1 = 1 and d*_n solving the branch-measure halving.
    """
    tau_star = [int(t) for t in tau_star]
    table = _table(F_star)
    if len(table) != len(tau_star):
        raise ValueError("F_star must provide one row per branch")
    if not tau_star or any(t < 1 for t in tau_star):
        raise ValueError("tau_star entries must be positive integers")
    for n0, t in enumerate(tau_star):
        if len(table[n0]) != t:
            raise ValueError(f"F_star row {n0 + 1} must have {t} entries")
        if any(v <= 0 for v in table[n0]):
            raise ValueError("F_star must be strictly positive")

    labels: list[str] = []
    weights: list[Fraction] = []
    roles: list[tuple[int, str, int]] = []  # (branch, role, i) with role in hub/mid/outer
    prev_branch_measure: Fraction | None = None
    for n0, t in enumerate(tau_star):
        f_sum = sum(table[n0], Fraction(0))
        if prev_branch_measure is None:
            d_n = Fraction(1)
        else:
            d_n = prev_branch_measure / (2 * (2 + f_sum))
        if d_n <= 0:
            raise ValueError("solved hub weight is not positive")
        labels.append(f"y_{n0 + 1}")
        weights.append(d_n)
        roles.append((n0, "hub", 0))
        for i in range(t):
            labels.append(f"y_{n0 + 1}_{i + 1}")
            weights.append(d_n / t)
            roles.append((n0, "mid", i))
            labels.append(f"yp_{n0 + 1}_{i + 1}")
            weights.append(d_n * table[n0][i])
            roles.append((n0, "outer", i))
        prev_branch_measure = d_n * (2 + f_sum)

    n_pts = len(labels)
    one, two = Fraction(1), Fraction(2)
    dist = [[Fraction(0)] * n_pts for _ in range(n_pts)]
    for i in range(n_pts):
        bi, ri, ii = roles[i]
        for j in range(i + 1, n_pts):
            bj, rj, ij = roles[j]
            d = two
            if bi == bj:
                pair = {ri, rj}
                if pair == {"mid", "outer"} and ii == ij:
                    d = one
                elif pair == {"hub", "mid"}:
                    d = one
            dist[i][j] = dist[j][i] = d
    return make_space(
        labels,
        dist,
        weights,
        _prov("second_generation", {"tau_star": tau_star, "F_star": _table_json(table)}),
    )


def lemma1_modify(space: MetricMeasureSpace) -> MetricMeasureSpace:
    """Stretch a {1,2}-valued metric: pairs joined through a common unit
    neighbour stay at 2, all other former-2 pairs move out to 3.

    Rejects inputs whose metric is not {1,2}-valued or that contain a
    unit-distance triangle (the stretched metric would be ill-defined).
    """
    n = space.n
    one, two, three = Fraction(1), Fraction(2), Fraction(3)
    for i in range(n):
        for j in range(i + 1, n):
            if space.dist[i][j] not in (one, two):
                raise ValueError("metric must take only the values 1 and 2")
    unit = [set() for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j and space.dist[i][j] == one:
                unit[i].add(j)
    for i in range(n):
        for j in unit[i]:
            if unit[i] & unit[j]:
                raise ValueError("input contains a unit-distance triangle")

    dist = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            if space.dist[i][j] == one:
                d = one
            elif unit[i] & unit[j]:
                d = two
            else:
                d = three
            dist[i][j] = dist[j][i] = d
    base = space.descriptor()
    return make_space(
        space.points,
        dist,
        space.weight,
        _prov("lemma1_modify", {"base": base if base is not None else space.provenance}),
    )


def segment_type(d: WeightTable, F: WeightTable) -> MetricMeasureSpace:
    """Branches of collinear atoms x_{n,0..n} with gap lengths d_{n,i}.

    Distances inside a branch are partial sums of the gaps; atoms in different
    branches sit at distance 1.  Requires sum_i d_{n,i} <= 1 and
    sum_i F(n,i) <= 2^-n per branch.
    """
    gaps = _table(d)
    table = _table(F)
    if len(gaps) != len(table) or not gaps:
        raise ValueError("d and F must provide the same positive number of branches")
    for n0, row in enumerate(gaps):
        n = n0 + 1
        if len(row) != n:
            raise ValueError(f"branch {n} needs {n} gap lengths")
        if any(g <= 0 for g in row):
            raise ValueError("gap lengths must be positive")
        if sum(row, Fraction(0)) > 1:
            raise ValueError(f"branch {n} gap lengths sum beyond 1")
        if len(table[n0]) != n + 1:
            raise ValueError(f"branch {n} needs {n + 1} atom weights")
        if any(w <= 0 for w in table[n0]):
            raise ValueError("atom weights must be positive")
        if sum(table[n0], Fraction(0)) > Fraction(1, 2**n):
            raise ValueError(f"branch {n} weights sum beyond 2^-{n}")

    labels: list[str] = []
    weights: list[Fraction] = []
    coords: list[tuple[int, Fraction]] = []  # (branch, position along the branch)
    for n0, row in enumerate(gaps):
        pos = Fraction(0)
        for i in range(n0 + 2):
            if i > 0:
                pos += row[i - 1]
            labels.append(f"x_{n0 + 1}_{i}")
            weights.append(table[n0][i])
            coords.append((n0, pos))

    n_pts = len(labels)
    dist = [[Fraction(0)] * n_pts for _ in range(n_pts)]
    for i in range(n_pts):
        bi, pi = coords[i]
        for j in range(i + 1, n_pts):
            bj, pj = coords[j]
            dij = abs(pi - pj) if bi == bj else Fraction(1)
            dist[i][j] = dist[j][i] = dij
    return make_space(
        labels,
        dist,
        weights,
        _prov("segment_type", {"d": _table_json(gaps), "F": _table_json(table)}),
    )


def segment_preset_lemma2(k: object, n_max: int) -> MetricMeasureSpace:
    """Segment space with geometric gaps (k+1)^(i-n-1) and equal atom weights
    2^-n/(n+1) along each branch; needs k >= 2."""
    k = parse_rational(k)
    if k < 2:
        raise ValueError("this preset needs k >= 2")
    gaps = [[(k + 1) ** (i - n - 1) for i in range(1, n + 1)] for n in range(1, n_max + 1)]
    table = [[Fraction(1, 2**n * (n + 1))] * (n + 1) for n in range(1, n_max + 1)]
    space = segment_type(gaps, table)
    return MetricMeasureSpace(
        space.points,
        space.dist,
        space.weight,
        _prov("segment_lemma2", {"k": format_rational(k), "n_max": n_max}),
    )


def segment_preset_lemma3(k: object, n_max: int) -> MetricMeasureSpace:
    """Segment space with gaps (k-1/2)^(i-n-1) and super-geometric weights
    F(n,n) = 2^(-n-1), F(n,i) = F(n,i+1)/2^(i+1); needs k >= 3."""
    k = parse_rational(k)
    if k < 3:
        raise ValueError("this preset needs k >= 3")
    gaps = [[(k - Fraction(1, 2)) ** (i - n - 1) for i in range(1, n + 1)] for n in range(1, n_max + 1)]
    table = []
    for n in range(1, n_max + 1):
        row = [Fraction(0)] * (n + 1)
        row[n] = Fraction(1, 2 ** (n + 1))
        for i in range(n - 1, -1, -1):
            row[i] = row[i + 1] / 2 ** (i + 1)
        table.append(row)
    space = segment_type(gaps, table)
    return MetricMeasureSpace(
        space.points,
        space.dist,
        space.weight,
        _prov("segment_lemma3", {"k": format_rational(k), "n_max": n_max}),
    )


def basic_s(tau: int, d: object, m: object) -> MetricMeasureSpace:
    """Star space: hub x_0 (weight 1) at distance 1 from tau leaves of weight m;
    leaves sit at mutual distance d, with 1 < d <= 2 and m > 1."""
    tau = int(tau)
    d = parse_rational(d)
    m = parse_rational(m)
    if tau < 1:
        raise ValueError("tau must be a positive integer")
    if not (1 < d <= 2):
        raise ValueError("d must satisfy 1 < d <= 2")
    if m <= 1:
        raise ValueError("m must exceed 1")
    labels = ["x_0"] + [f"x_{i}" for i in range(1, tau + 1)]
    weights = [Fraction(1)] + [m] * tau
    n_pts = tau + 1
    dist = [[Fraction(0)] * n_pts for _ in range(n_pts)]
    for i in range(n_pts):
        for j in range(i + 1, n_pts):
            dij = Fraction(1) if i == 0 else d
            dist[i][j] = dist[j][i] = dij
    return make_space(
        labels,
        dist,
        weights,
        _prov("basic_s", {"tau": tau, "d": format_rational(d), "m": format_rational(m)}),
    )


def basic_t(tau: int, d: object, m: object) -> MetricMeasureSpace:
    """Two-layer space: hub y_0, inner ring yo_i (weight 1/tau), outer ring
    yp_i (weight m); 1 < d <= 3 and m > 1.

    Distances: 1 on hub--inner edges and on the rungs (yo_i, yp_i);
    (d+1)/2 inside the inner ring and inside {hub} + outer ring; d otherwise.
    """
    tau = int(tau)
    d = parse_rational(d)
    m = parse_rational(m)
    if tau < 1:
        raise ValueError("tau must be a positive integer")
    if not (1 < d <= 3):
        raise ValueError("d must satisfy 1 < d <= 3")
    if m <= 1:
        raise ValueError("m must exceed 1")
    labels = ["y_0"] + [f"yo_{i}" for i in range(1, tau + 1)] + [f"yp_{i}" for i in range(1, tau + 1)]
    weights = [Fraction(1)] + [Fraction(1, tau)] * tau + [m] * tau
    mid = (d + 1) / 2

    def role(i: int) -> tuple[str, int]:
        if i == 0:
            return "hub", 0
        if i <= tau:
            return "inner", i
        return "outer", i - tau

    n_pts = 2 * tau + 1
    dist = [[Fraction(0)] * n_pts for _ in range(n_pts)]
    for i in range(n_pts):
        ri, ai = role(i)
        for j in range(i + 1, n_pts):
            rj, aj = role(j)
            pair = {ri, rj}
            if pair == {"hub", "inner"} or (pair == {"inner", "outer"} and ai == aj):
                dij = Fraction(1)
            elif pair == {"inner"} or pair == {"outer"} or pair == {"hub", "outer"}:
                dij = mid
            else:
                dij = d
            dist[i][j] = dist[j][i] = dij
    return make_space(
        labels,
        dist,
        weights,
        _prov("basic_t", {"tau": tau, "d": format_rational(d), "m": format_rational(m)}),
    )


def glue_parts(
    components: Sequence[MetricMeasureSpace], k0: object
) -> tuple[MetricMeasureSpace, list[MetricMeasureSpace]]:
    """Glue rescaled components at mutual distance k0 + 1.

    Component n (1-based, list order) is metric-rescaled to diameter <= 1 and
    measure-rescaled by min(1, 2^-n / mu); returns the glued space together
    with the rescaled parts (whose maximal behaviour the glued space extends).
    """
    k0 = parse_rational(k0)
    if k0 < 1:
        raise ValueError("k0 must be at least 1")
    if not components:
        raise ValueError("glue needs at least one component")
    parts: list[MetricMeasureSpace] = []
    scales: list[dict] = []
    for n, comp in enumerate(components, start=1):
        diam = diameter(comp) if comp.n > 1 else Fraction(0)
        c_metric = Fraction(1) if diam <= 1 else 1 / diam
        mu = total_measure(comp)
        cap = Fraction(1, 2**n)
        c_measure = Fraction(1) if mu <= cap else cap / mu
        part = MetricMeasureSpace(
            points=tuple(f"g{n}:{lab}" for lab in comp.points),
            dist=tuple(tuple(dv * c_metric for dv in row) for row in comp.dist),
            weight=tuple(w * c_measure for w in comp.weight),
            provenance=comp.provenance,
        )
        parts.append(part)
        scales.append({"metric": format_rational(c_metric), "measure": format_rational(c_measure)})

    labels: list[str] = []
    weights: list[Fraction] = []
    owner: list[int] = []
    for idx, part in enumerate(parts):
        labels.extend(part.points)
        weights.extend(part.weight)
        owner.extend([idx] * part.n)
    if len(set(labels)) != len(labels):
        raise ValueError("component labels collide after relabelling")

    cross = k0 + 1
    n_pts = len(labels)
    offsets = []
    acc = 0
    for part in parts:
        offsets.append(acc)
        acc += part.n
    dist = [[cross] * n_pts for _ in range(n_pts)]
    for idx, part in enumerate(parts):
        base = offsets[idx]
        for i in range(part.n):
            row = dist[base + i]
            for j in range(part.n):
                row[base + j] = part.dist[i][j]
    comp_descs = []
    for comp in components:
        desc = comp.descriptor()
        comp_descs.append(desc if desc is not None else {"kind": "opaque", "params": {}})
    glued = make_space(
        labels,
        dist,
        weights,
        _prov("glue", {"k0": format_rational(k0), "components": comp_descs}, scales=scales),
    )
    return glued, parts


def glue(components: Sequence[MetricMeasureSpace], k0: object) -> MetricMeasureSpace:
    return glue_parts(components, k0)[0]


@dataclass(frozen=True)
class FamilyParams:
    """Parameters for the graded star/two-layer families feeding the glue."""

    k: Fraction
    p: Fraction
    epsilon: Fraction
    delta: Fraction
    N: int
    n_lo: int
    n_hi: int

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if not (0 < self.epsilon <= Fraction(1, 4)):
            raise ValueError("epsilon must lie in (0, 1/4]")
        if self.N < 1:
            raise ValueError("N must be a positive integer")
        if self.n_lo <= self.N:
            raise ValueError("family indices must start above N")
        if self.n_hi < self.n_lo:
            raise ValueError("empty index range")


def family_params_lemma6(params: FamilyParams, family: str = "s") -> list[tuple[int, int, Fraction, Fraction]]:
    """Exact per-index (n, tau_n, d_n, m_n) for the graded family.

    tau_n = ceil(N^2p) * floor(n^(p(p-1)/eps)) and m_n = ceil(n^(p/eps));
    non-integer rational exponents are rounded through integer power/root
    bounds so every space stays exactly rational.
    """
    limit = Fraction(2) if family == "s" else Fraction(3)
    if not (1 <= params.k < limit):
        raise ValueError(f"k must lie in [1, {limit}) for this family")
    if not (0 < params.delta < limit - params.k):
        raise ValueError("delta must lie in (0, %s - k)" % limit)
    lead = pow_ceil(params.N, 2 * params.p)
    exp_tau = params.p * (params.p - 1) / params.epsilon
    exp_m = params.p / params.epsilon
    out = []
    for n in range(params.n_lo, params.n_hi + 1):
        tau_n = lead * pow_floor(n, exp_tau)
        m_n = Fraction(pow_ceil(n, exp_m))
        d_n = params.k + params.delta / n
        out.append((n, tau_n, d_n, m_n))
    return out


def family_lemma6(params: FamilyParams) -> list[MetricMeasureSpace]:
    return [basic_s(tau, d, m) for _, tau, d, m in family_params_lemma6(params, "s")]


def family_lemma6p(params: FamilyParams) -> list[MetricMeasureSpace]:
    return [basic_t(tau, d, m) for _, tau, d, m in family_params_lemma6(params, "t")]


def family_params_lemma7(
    k: object, mode: str, n_max: int, family: str = "s"
) -> list[tuple[int, int, Fraction, Fraction]]:
    """Per-index (n, tau_n = n, d_n, m_n = 2) for the threshold family.

    mode "strict": d_n = k (needs k > 1); mode "weak": d_n = k + (limit - k)/n.
    """
    k = parse_rational(k)
    limit = Fraction(2) if family == "s" else Fraction(3)
    if mode == "strict":
        if not (1 < k <= limit):
            raise ValueError(f"strict mode needs 1 < k <= {limit}")
        d_of = lambda n: k
    elif mode == "weak":
        if not (1 <= k < limit):
            raise ValueError(f"weak mode needs 1 <= k < {limit}")
        d_of = lambda n: k + (limit - k) / n
    else:
        raise ValueError("mode must be 'strict' or 'weak'")
    return [(n, n, d_of(n), Fraction(2)) for n in range(1, n_max + 1)]


def family_lemma7(k: object, mode: str, n_max: int) -> list[MetricMeasureSpace]:
    return [basic_s(tau, d, m) for _, tau, d, m in family_params_lemma7(k, mode, n_max, "s")]


def family_lemma7p(k: object, mode: str, n_max: int) -> list[MetricMeasureSpace]:
    return [basic_t(tau, d, m) for _, tau, d, m in family_params_lemma7(k, mode, n_max, "t")]


def build_space(descriptor: dict) -> MetricMeasureSpace:
    """Build a space from a JSON descriptor {"kind": ..., "params": {...}}."""
    kind = descriptor.get("kind")
    params = descriptor.get("params", {})
    builder = _REGISTRY.get(kind)
    if builder is None:
        raise ValueError(f"unknown construction kind {kind!r}")
    return builder(params)


def _build_scale(op: Callable, params: dict) -> MetricMeasureSpace:
    base = params["base"]
    if not isinstance(base, dict):
        raise ValueError("scaled descriptor needs an inline base descriptor")
    return op(build_space(base), parse_rational(params["factor"]))


_REGISTRY: dict[str, Callable[[dict], MetricMeasureSpace]] = {
    "point": lambda p: single_point(p.get("weight", 1), p.get("label", "a")),
    "basic_s": lambda p: basic_s(p["tau"], p["d"], p["m"]),
    "basic_t": lambda p: basic_t(p["tau"], p["d"], p["m"]),
    "first_generation": lambda p: first_generation(p["tau"], p["F"]),
    "second_generation": lambda p: second_generation(p["tau_star"], p["F_star"]),
    "lemma1_modify": lambda p: lemma1_modify(build_space(p["base"])),
    "segment_type": lambda p: segment_type(p["d"], p["F"]),
    "segment_lemma2": lambda p: segment_preset_lemma2(p["k"], int(p["n_max"])),
    "segment_lemma3": lambda p: segment_preset_lemma3(p["k"], int(p["n_max"])),
    "glue": lambda p: glue([build_space(c) for c in p["components"]], p["k0"]),
    "scale_metric": lambda p: _build_scale(scale_metric, p),
    "scale_measure": lambda p: _build_scale(scale_measure, p),
}
