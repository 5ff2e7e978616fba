"""Weak and strong (p,p) ratios and best-constant lower-bound search.

Ratios are computed from exact ingredients (level sets, weighted power sums)
with p-th roots taken in doubles only at the reporting layer; the comparison
tolerance everywhere downstream is 1e-9.  Best constants over all functions
are never claimed exactly: the module certifies witnessed lower bounds and,
where available, closed-form upper bounds for recognised space kinds.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np

from .maximal import (
    MaximalValues,
    TestFunction,
    float_evaluator,
    m_centered,
    m_noncentered,
)
from .rationals import (
    INF,
    format_p,
    format_rational,
    is_inf,
    log_fraction,
    parse_p,
    parse_rational,
    pow_float,
)
from .sampling import log_uniform_fraction
from .spaces import MetricMeasureSpace

KINDS = ("weak", "strong")
OP_KINDS = ("centered", "noncentered")


@dataclass(frozen=True)
class RatioResult:
    p: Fraction | float
    kind: str
    op_kind: str
    k: Fraction
    value: float
    exact_core: object = None
    exact_value: Fraction | None = None

    def to_json_dict(self) -> dict:
        return {
            "p": format_p(self.p),
            "kind": self.kind,
            "op_kind": self.op_kind,
            "k": format_rational(self.k),
            "value": self.value,
            "exact_value": format_rational(self.exact_value) if self.exact_value is not None else None,
        }


@dataclass(frozen=True)
class AnalyticBound:
    value: float
    formula: str


@dataclass(frozen=True)
class ConstantEstimate:
    k: Fraction
    p: Fraction | float
    kind: str
    op_kind: str
    lower_bound: float
    witness: TestFunction
    analytic_upper: AnalyticBound | None = None
    search_log: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "k": format_rational(self.k),
            "p": format_p(self.p),
            "kind": self.kind,
            "op_kind": self.op_kind,
            "lower_bound": self.lower_bound,
            "witness": self.witness.to_json_list(),
            "seed": self.search_log.get("seed"),
            "analytic_upper": self.analytic_upper.value if self.analytic_upper else None,
            "paper_upper": self.analytic_upper.formula if self.analytic_upper else None,
            "search_log": self.search_log,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def average_on_set(space: MetricMeasureSpace, f: TestFunction, subset: Sequence[int]) -> Fraction:
    """Exact weighted average of f over a nonempty index set."""
    idx = list(subset)
    if not idx:
        raise ValueError("average over an empty set")
    num = sum((f.values[i] * space.weight[i] for i in idx), Fraction(0))
    den = sum((space.weight[i] for i in idx), Fraction(0))
    return num / den


def _check_args(p, kind: str, op_kind: str) -> Fraction | float:
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if op_kind not in OP_KINDS:
        raise ValueError(f"op_kind must be one of {OP_KINDS}")
    p = parse_p(p)
    if not is_inf(p) and p < 1:
        raise ValueError("p must be at least 1")
    return p


def _maximal(space, k, op_kind: str, f: TestFunction) -> MaximalValues:
    return (m_centered if op_kind == "centered" else m_noncentered)(space, k, f)


def _power_sum(space, values: Sequence[Fraction], p: Fraction) -> tuple[Fraction | None, float]:
    """(exact sum, log of sum) of sum_i v_i^p w_i; exact only for integer p."""
    if p.denominator == 1:
        e = int(p)
        total = sum((v**e * w for v, w in zip(values, space.weight)), Fraction(0))
        return total, log_fraction(total) if total > 0 else -np.inf
    pf = float(p)
    total_f = sum(pow_float(v, pf) * float(w) for v, w in zip(values, space.weight))
    return None, np.log(total_f) if total_f > 0 else -np.inf


def _weak_core(space, values: Sequence[Fraction], p: Fraction) -> tuple[Fraction, Fraction, float]:
    """Maximising (level, measure of {g >= level}) pair and its log value.

    The level sup is a finite scan: mu({g > lam}) is a step function jumping
    exactly at the values of g, so the sup is attained as lam increases to a
    value of g and equals max_v v * mu({g >= v})^(1/p).
    """
    order = sorted(range(len(values)), key=lambda i: values[i], reverse=True)
    best: tuple[Fraction, Fraction] | None = None
    cum = Fraction(0)
    exact = p.denominator == 1
    i = 0
    n = len(order)
    while i < n:
        v = values[order[i]]
        while i < n and values[order[i]] == v:
            cum += space.weight[order[i]]
            i += 1
        if v <= 0:
            continue
        if best is None:
            best = (v, cum)
        elif exact:
            if v ** int(p) * cum > best[0] ** int(p) * best[1]:
                best = (v, cum)
        else:
            if log_fraction(v) + log_fraction(cum) / float(p) > log_fraction(best[0]) + log_fraction(best[1]) / float(p):
                best = (v, cum)
    if best is None:
        return Fraction(0), Fraction(0), -np.inf
    lam, mu = best
    return lam, mu, log_fraction(lam) + log_fraction(mu) / float(p)


def weak_ratio(space: MetricMeasureSpace, k, p, op_kind: str, f: TestFunction) -> RatioResult:
    """||M f||_{p,inf} / ||f||_p; at p = inf this aliases the strong ratio."""
    p = _check_args(p, "weak", op_kind)
    if f.is_zero():
        raise ValueError("ratio of the zero function")
    if is_inf(p):
        return _sup_ratio(space, k, "weak", op_kind, f)
    g = _maximal(space, k, op_kind, f).values
    lam, mu, log_num = _weak_core(space, g, p)
    f_exact, log_den = _power_sum(space, f.values, p)
    value = float(np.exp(log_num - log_den / float(p)))
    exact_value = lam * mu / f_exact if p == 1 else None
    return RatioResult(p, "weak", op_kind, parse_rational(k), value, (lam, mu), exact_value)


def strong_ratio(space: MetricMeasureSpace, k, p, op_kind: str, f: TestFunction) -> RatioResult:
    """||M f||_p / ||f||_p; exact core kept when p is an integer."""
    p = _check_args(p, "strong", op_kind)
    if f.is_zero():
        raise ValueError("ratio of the zero function")
    if is_inf(p):
        return _sup_ratio(space, k, "strong", op_kind, f)
    g = _maximal(space, k, op_kind, f).values
    g_exact, log_num = _power_sum(space, g, p)
    f_exact, log_den = _power_sum(space, f.values, p)
    value = float(np.exp((log_num - log_den) / float(p)))
    exact_value = g_exact / f_exact if p == 1 else None
    return RatioResult(p, "strong", op_kind, parse_rational(k), value, g_exact, exact_value)


def _sup_ratio(space, k, kind: str, op_kind: str, f: TestFunction) -> RatioResult:
    g = _maximal(space, k, op_kind, f).values
    ratio = max(g) / max(f.values)
    return RatioResult(INF, kind, op_kind, parse_rational(k), float(ratio), (max(g), max(f.values)), ratio)


def ratio(space, k, p, kind: str, op_kind: str, f: TestFunction) -> RatioResult:
    return (weak_ratio if kind == "weak" else strong_ratio)(space, k, p, op_kind, f)


def delta_scan(space: MetricMeasureSpace, k, p, kind: str, op_kind: str) -> ConstantEstimate:
    """Best ratio over single-atom indicator functions; ties keep the smallest atom."""
    p = _check_args(p, kind, op_kind)
    best: RatioResult | None = None
    best_f: TestFunction | None = None
    for i in range(space.n):
        f = TestFunction.delta(space, i)
        r = ratio(space, k, p, kind, op_kind, f)
        if best is None or r.value > best.value:
            best, best_f = r, f
    assert best is not None and best_f is not None
    return ConstantEstimate(
        k=parse_rational(k),
        p=p,
        kind=kind,
        op_kind=op_kind,
        lower_bound=best.value,
        witness=best_f,
        search_log={"method": "delta_scan", "atoms": space.n},
    )


class _FloatRatio:
    """Float-layer ratio used to steer the ascent; results get re-certified."""

    def __init__(self, space: MetricMeasureSpace, k, p, kind: str, op_kind: str):
        self.ev = float_evaluator(space, k)
        self.weights = self.ev.weights
        self.p = p
        self.kind = kind
        self.op = op_kind

    def __call__(self, f: np.ndarray) -> float:
        g = self.ev.centered(f) if self.op == "centered" else self.ev.noncentered(f)
        if is_inf(self.p):
            return float(g.max() / f.max())
        pf = float(self.p)
        norm_f = float((f**pf * self.weights).sum() ** (1.0 / pf))
        if self.kind == "strong":
            return float((g**pf * self.weights).sum() ** (1.0 / pf)) / norm_f
        order = np.argsort(-g)
        cum = np.cumsum(self.weights[order])
        return float((g[order] * cum ** (1.0 / pf)).max()) / norm_f


def ascent_search(
    space: MetricMeasureSpace,
    k,
    p,
    kind: str,
    op_kind: str,
    restarts: int = 8,
    iters: int = 4,
    seed: int = 0,
) -> ConstantEstimate:
    """Lower-bound refinement by multiplicative coordinate ascent.

    Starts from the best single-atom indicator and the constant function, then
    from `restarts` random log-uniform functions; each pass tries f_i * 2 and
    f_i / 2 per coordinate and keeps strict improvements.  Deterministic for a
    fixed seed; the returned bound is re-certified through the exact ratio.
    """
    p = _check_args(p, kind, op_kind)
    if restarts < 1 or iters < 1:
        raise ValueError("restarts and iters must be at least 1")
    base = delta_scan(space, k, p, kind, op_kind)
    n = space.n
    rng = random.Random(seed)
    starts: list[tuple[Fraction, ...]] = [base.witness.values, (Fraction(1),) * n]
    for _ in range(restarts):
        starts.append(tuple(log_uniform_fraction(rng) for _ in range(n)))

    fr = _FloatRatio(space, k, p, kind, op_kind)
    best_value = -1.0
    best_witness = base.witness
    best_start = -1
    steps_accepted = 0
    for s_idx, start in enumerate(starts):
        exps = [0] * n
        f = np.array([float(v) for v in start])
        current = fr(f)
        for _ in range(iters):
            improved = False
            for i in range(n):
                for gamma in (2.0, 0.5):
                    trial = f.copy()
                    trial[i] *= gamma
                    cand = fr(trial)
                    if cand > current:
                        current = cand
                        f = trial
                        exps[i] += 1 if gamma == 2.0 else -1
                        improved = True
                        steps_accepted += 1
            if not improved:
                break
        witness = TestFunction(tuple(v * Fraction(2) ** e for v, e in zip(start, exps)))
        certified = ratio(space, k, p, kind, op_kind, witness).value
        if certified > best_value:
            best_value = certified
            best_witness = witness
            best_start = s_idx
    return ConstantEstimate(
        k=parse_rational(k),
        p=p,
        kind=kind,
        op_kind=op_kind,
        lower_bound=best_value,
        witness=best_witness,
        search_log={
            "method": "ascent",
            "seed": seed,
            "restarts": restarts,
            "iters": iters,
            "starts": len(starts),
            "best_start": best_start,
            "accepted_steps": steps_accepted,
        },
    )


def analytic_upper(
    space_kind: str,
    params: dict,
    k,
    p,
    kind: str = "strong",
    op_kind: str = "noncentered",
) -> AnalyticBound | None:
    """Closed-form upper bound for a recognised space kind, if one applies.

    Bounds are stated for the dominating (strong, noncentered) side unless
    keyed otherwise, so they cover the weaker combinations as well.  Returns
    None when no closed form covers the requested regime.
    """
    p = _check_args(p, kind, op_kind)
    k = parse_rational(k)
    if space_kind == "point":
        # One atom: every ball is the whole space, so M f = f exactly.
        return AnalyticBound(1.0, "single-atom-identity")
    if is_inf(p):
        # Averages never exceed the sup, for either operator and any k.
        return AnalyticBound(1.0, "sup-norm-exact")
    pf = float(p)
    if space_kind == "basic_s":
        d = parse_rational(params["d"])
        tau = int(params["tau"])
        m = parse_rational(params["m"])
        if k >= d:
            # Every ball with two or more points has its dilate equal to the
            # whole space, so M f <= max(f, global average) pointwise.
            return AnalyticBound(2.0 ** (1.0 / pf), "dilate-covers-space")
        value = (2.0 ** (pf - 1) * (2.0 ** (pf - 1) + 1 + tau * pow_float(m, 1 - pf))) ** (1.0 / pf)
        return AnalyticBound(value, "star-split-bound")
    if space_kind == "basic_t":
        d = parse_rational(params["d"])
        tau = int(params["tau"])
        m = parse_rational(params["m"])
        if op_kind == "centered":
            return AnalyticBound(24.0, "two-layer-centered-24")
        if k >= d:
            return AnalyticBound(2.0 ** (1.0 / pf), "dilate-covers-space")
        value = (
            3.0
            * 5.0 ** (pf - 1)
            * (2 + 3.0**pf + 6.0**pf + 3.0**pf * 2.0 ** (2 * pf - 1) * tau * pow_float(m, 1 - pf))
        ) ** (1.0 / pf)
        return AnalyticBound(value, "two-layer-split-bound")
    if space_kind == "segment_lemma2":
        k_build = parse_rational(params["k"])
        if op_kind == "noncentered" and kind == "weak" and p == 1 and k >= k_build:
            return AnalyticBound(2.0, "segment-window-cover-2")
        return None
    if space_kind == "segment_lemma3":
        k_build = parse_rational(params["k"])
        if op_kind == "centered" and p == 1 and k >= k_build:
            return AnalyticBound(4.0, "segment-weighted-chain-4")
        return None
    raise ValueError(f"no analytic bounds catalogued for space kind {space_kind!r}")


def upper_for_space(space: MetricMeasureSpace, k, p, kind: str, op_kind: str) -> AnalyticBound | None:
    """Dispatch `analytic_upper` from a space's construction descriptor."""
    desc = space.descriptor()
    if desc is None:
        return None
    try:
        return analytic_upper(desc["kind"], desc["params"], k, p, kind, op_kind)
    except ValueError:
        return None


def with_upper(estimate: ConstantEstimate, space: MetricMeasureSpace) -> ConstantEstimate:
    """Attach the catalogued upper bound for the space's kind, if any."""
    bound = upper_for_space(space, estimate.k, estimate.p, estimate.kind, estimate.op_kind)
    if bound is None:
        return estimate
    return replace(estimate, analytic_upper=bound)
