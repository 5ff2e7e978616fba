"""Reproduction harness: named experiments, grid sweeps, CSV/JSON reports.

Every run_* function returns a JSON-serialisable report that is deterministic
given its parameters and seed.  Divergence/boundedness of the graded families
is rendered as finite-truncation evidence against explicit thresholds
(T_div, C_bnd), which are always reported, never hidden.

Components of the graded families grow like n^(p(p-1)/eps) atoms, far beyond
what can be materialised, so the per-component evidence is the closed-form
weak ratio of the hub indicator (an exact expression cross-validated against
materialised small components in the test suite).
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import random
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import constructions as cons
from .constants import ascent_search, delta_scan, ratio, upper_for_space
from .maximal import TestFunction, m_centered, m_noncentered
from .rationals import (
    format_double,
    format_p,
    format_rational,
    is_inf,
    log_fraction,
    parse_p,
    parse_rational,
)
from .sampling import random_function
from .spaces import MetricMeasureSpace, total_measure

TOL = 1e-9


def thread_count() -> int:
    """Parallelism cap from MAXLAB_THREADS (default: sequential)."""
    try:
        return max(1, int(os.environ.get("MAXLAB_THREADS", "1")))
    except ValueError:
        return 1


def _map(fn: Callable, items: Sequence) -> list:
    workers = thread_count()
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# Closed-form per-component evidence for the graded families.


def s_hub_delta_weak_bound(tau: int, d: Fraction, m: Fraction, k: Fraction, p) -> float:
    """Weak (p,p) ratio of the hub indicator on the star space under the
    centered operator: max(1, (1 + tau*m)^(1/p) / (1 + m)) when k < d, else 1.

    This is an exact evaluation (the maximal function equals 1 at the hub and
    1/(1+m) at each leaf when k < d); the test suite re-derives it from the
    full enumeration on materialisable instances.
    """
    if is_inf(p) or k >= d:
        return 1.0
    level = log_fraction(1 + tau * m) / float(p) - log_fraction(1 + m)
    return max(1.0, float(np.exp(level)))


def t_hub_delta_weak_bound(tau: int, d: Fraction, m: Fraction, k: Fraction, p) -> float:
    """Weak (p,p) ratio of the hub indicator on the two-layer space under the
    non-centered operator; the reachable dilate depends on where k sits
    relative to (d+1)/2 and d."""
    if is_inf(p) or k >= d:
        return 1.0
    if k < (d + 1) / 2:
        level = log_fraction(2 + tau * m) / float(p) - log_fraction(1 + Fraction(1, tau) + m)
    else:
        level = log_fraction(2 + tau * m) / float(p) - log_fraction(2 + m)
    return max(1.0, float(np.exp(level)))


def _component_bound(family: str, tau: int, d: Fraction, m: Fraction, k: Fraction, p) -> float:
    fn = s_hub_delta_weak_bound if family == "s" else t_hub_delta_weak_bound
    return fn(tau, d, m, k, p)


# ---------------------------------------------------------------------------
# Segment-space experiments.


def _harmonic_tail(n: int) -> Fraction:
    return sum((Fraction(1, j + 1) for j in range(1, n)), Fraction(0))


def run_lemma2(k, n_max: int = 20, trials: int = 1000, seed: int = 0, trials_n_max: int = 12) -> dict:
    """Geometric-gap segment space, k >= 2: hub-indicator centered strong
    (1,1) ratios grow at least like the harmonic sum, while the non-centered
    weak (1,1) ratio of any function stays at most 2 (checked on random f)."""
    k = parse_rational(k)
    space = cons.segment_preset_lemma2(k, n_max)
    delta_rows = []
    for n in range(1, n_max + 1):
        f = TestFunction.delta(space, f"x_{n}_0")
        r = ratio(space, k, 1, "strong", "centered", f)
        bound = _harmonic_tail(n)
        delta_rows.append(
            {
                "n": n,
                "ratio": format_rational(r.exact_value),
                "ratio_float": r.value,
                "bound": format_rational(bound),
                "ok": r.exact_value >= bound,
            }
        )
    rng = random.Random(seed)
    small = cons.segment_preset_lemma2(k, min(n_max, trials_n_max))
    worst = Fraction(0)
    ok_random = True
    for _ in range(trials):
        f = random_function(rng, small)
        r = ratio(small, k, 1, "weak", "noncentered", f)
        worst = max(worst, r.exact_value)
        ok_random = ok_random and r.exact_value <= 2
    report = {
        "experiment": "lemma2",
        "k": format_rational(k),
        "n_max": n_max,
        "seed": seed,
        "delta_checks": delta_rows,
        "random_check": {
            "trials": trials,
            "n_max": min(n_max, trials_n_max),
            "max_ratio": format_rational(worst),
            "max_ratio_float": float(worst),
            "bound": 2.0,
            "ok": ok_random,
        },
        "ok": ok_random and all(row["ok"] for row in delta_rows),
    }
    return report


def run_lemma3(k, n_max: int = 20, trials: int = 1000, seed: int = 0, trials_n_max: int = 12) -> dict:
    """Super-geometric segment space, k >= 3: hub-indicator non-centered
    strong (1,1) ratios grow like (n-1)/2, while the centered strong (1,1)
    ratio of any function stays at most 4 (checked on random f)."""
    k = parse_rational(k)
    space = cons.segment_preset_lemma3(k, n_max)
    delta_rows = []
    for n in range(1, n_max + 1):
        f = TestFunction.delta(space, f"x_{n}_0")
        r = ratio(space, k, 1, "strong", "noncentered", f)
        bound = Fraction(n - 1, 2)
        delta_rows.append(
            {
                "n": n,
                "ratio": format_rational(r.exact_value),
                "ratio_float": r.value,
                "bound": format_rational(bound),
                "ok": r.exact_value >= bound,
            }
        )
    rng = random.Random(seed)
    small = cons.segment_preset_lemma3(k, min(n_max, trials_n_max))
    worst = Fraction(0)
    ok_random = True
    for _ in range(trials):
        f = random_function(rng, small)
        r = ratio(small, k, 1, "strong", "centered", f)
        worst = max(worst, r.exact_value)
        ok_random = ok_random and r.exact_value <= 4
    return {
        "experiment": "lemma3",
        "k": format_rational(k),
        "n_max": n_max,
        "seed": seed,
        "delta_checks": delta_rows,
        "random_check": {
            "trials": trials,
            "n_max": min(n_max, trials_n_max),
            "max_ratio": format_rational(worst),
            "max_ratio_float": float(worst),
            "bound": 4.0,
            "ok": ok_random,
        },
        "ok": ok_random and all(row["ok"] for row in delta_rows),
    }


# ---------------------------------------------------------------------------
# Star / two-layer bracketing experiments.


def _target(tau: int, m: Fraction, p) -> float:
    """max(1, tau^(1/p) m^(1/p-1))."""
    if is_inf(p):
        return 1.0
    pf = float(p)
    return max(1.0, float(np.exp(math.log(tau) / pf + log_fraction(m) * (1.0 / pf - 1.0))))


def run_lemma4(
    seed: int = 0,
    tau_list: Sequence[int] = (1, 2, 4, 8, 16),
    m_list: Sequence[object] = (2, 4, 16),
    p_list: Sequence[object] = (1, Fraction(3, 2), 2),
    d: object = Fraction(3, 2),
    k_small: object = 1,
    k_ge_list: Sequence[object] = (Fraction(3, 2), 2),
    restarts: int = 8,
    iters: int = 2,
) -> dict:
    """Star spaces: hub-indicator scans bracket max(1, tau^(1/p) m^(1/p-1))
    within a factor 3 for k < d, and every searched ratio in the k >= d regime
    stays below the dilate-covers-space bound 2^(1/p)."""
    d = parse_rational(d)
    k_small = parse_rational(k_small)
    rows = []
    for tau in tau_list:
        for m in (parse_rational(x) for x in m_list):
            space = cons.basic_s(tau, d, m)
            for p in (parse_p(x) for x in p_list):
                est = delta_scan(space, k_small, p, "weak", "centered")
                target = _target(tau, m, p)
                upper = upper_for_space(space, k_small, p, "weak", "centered")
                rows.append(
                    {
                        "tau": tau,
                        "m": format_rational(m),
                        "p": format_p(p),
                        "k": format_rational(k_small),
                        "regime": "k<d",
                        "lower_bound": est.lower_bound,
                        "target": target,
                        "bracket_ok": target / 3 - TOL <= est.lower_bound <= target + TOL,
                        "analytic_upper": upper.value if upper else None,
                        "upper_ok": upper is None or est.lower_bound <= upper.value + TOL,
                    }
                )
    regime_rows = []
    for k_ge in (parse_rational(x) for x in k_ge_list):
        if k_ge < d:
            raise ValueError("k_ge_list entries must be >= d")
        for tau in (min(tau_list), max(tau_list)):
            for m in (parse_rational(m_list[0]), parse_rational(m_list[-1])):
                space = cons.basic_s(tau, d, m)
                for p in (parse_p(x) for x in p_list):
                    cap = 2.0 ** (1.0 / float(p)) if not is_inf(p) else 1.0
                    searched = [
                        delta_scan(space, k_ge, p, kind, op).lower_bound
                        for kind in ("weak", "strong")
                        for op in ("centered", "noncentered")
                    ]
                    searched.append(
                        ascent_search(
                            space, k_ge, p, "strong", "noncentered", restarts, iters, seed
                        ).lower_bound
                    )
                    regime_rows.append(
                        {
                            "tau": tau,
                            "m": format_rational(m),
                            "p": format_p(p),
                            "k": format_rational(k_ge),
                            "regime": "k>=d",
                            "max_searched": max(searched),
                            "cap": cap,
                            "ok": max(searched) <= cap + TOL,
                        }
                    )
    ok = all(r["bracket_ok"] and r["upper_ok"] for r in rows) and all(r["ok"] for r in regime_rows)
    return {
        "experiment": "lemma4",
        "seed": seed,
        "d": format_rational(d),
        "rows": rows,
        "regime_rows": regime_rows,
        "ok": ok,
    }


def run_lemma5(
    seed: int = 0,
    tau_list: Sequence[int] = (1, 2, 4, 8, 16),
    m_list: Sequence[object] = (2, 4, 16),
    p_list: Sequence[object] = (1, Fraction(3, 2), 2),
    d: object = 2,
    k: object = 1,
    restarts: int = 200,
    iters: int = 1,
) -> dict:
    """Two-layer spaces: hub-indicator non-centered scans bracket the same
    target within a factor 4, and centered ascent searches never beat 24."""
    d = parse_rational(d)
    k = parse_rational(k)
    rows = []
    centered_rows = []

    def one_cell(args):
        tau, m, p = args
        space = cons.basic_t(tau, d, m)
        est = delta_scan(space, k, p, "weak", "noncentered")
        target = _target(tau, m, p)
        # The [1/4, 1] factors are realised by the hub indicator (the level
        # bound at 1/(4m)); the scan over all atoms dominates it and may
        # legitimately exceed the target, so it is capped by the closed form.
        hub = ratio(space, k, p, "weak", "noncentered", TestFunction.delta(space, "y_0"))
        upper = upper_for_space(space, k, p, "weak", "noncentered")
        row = {
            "tau": tau,
            "m": format_rational(m),
            "p": format_p(p),
            "lower_bound": est.lower_bound,
            "hub_ratio": hub.value,
            "target": target,
            "bracket_ok": (
                target / 4 - TOL <= hub.value <= target + TOL
                and est.lower_bound >= hub.value - TOL
            ),
            "analytic_upper": upper.value if upper else None,
            "upper_ok": upper is None or est.lower_bound <= upper.value + TOL,
        }
        crow = {"tau": tau, "m": format_rational(m), "p": format_p(p), "results": {}}
        for kind in ("weak", "strong"):
            est_c = ascent_search(space, k, p, kind, "centered", restarts, iters, seed)
            crow["results"][kind] = est_c.lower_bound
        crow["ok"] = all(v <= 24.0 + TOL for v in crow["results"].values())
        return row, crow

    cells = [
        (tau, m, p)
        for tau in tau_list
        for m in (parse_rational(x) for x in m_list)
        for p in (parse_p(x) for x in p_list)
    ]
    for row, crow in _map(one_cell, cells):
        rows.append(row)
        centered_rows.append(crow)
    ok = all(r["bracket_ok"] and r["upper_ok"] for r in rows) and all(r["ok"] for r in centered_rows)
    return {
        "experiment": "lemma5",
        "seed": seed,
        "d": format_rational(d),
        "k": format_rational(k),
        "restarts": restarts,
        "rows": rows,
        "centered_rows": centered_rows,
        "ok": ok,
    }


# ---------------------------------------------------------------------------
# Region and threshold evidence for the graded glued families.


def _classify(bounds: Sequence[float], t_div: float, c_bnd: float) -> tuple[str, bool]:
    monotone = all(b2 >= b1 - 1e-12 for b1, b2 in zip(bounds, bounds[1:]))
    sup = max(bounds)
    if monotone and sup > t_div:
        return "DIVERGING", monotone
    if sup <= c_bnd:
        return "BOUNDED", monotone
    return "UNCLASSIFIED", monotone


def run_lemma6_region(
    k,
    p,
    epsilon,
    delta,
    N: int,
    n_hi: int = 40,
    k_grid: Sequence[object] | None = None,
    p_grid: Sequence[object] | None = None,
    t_div: float = 100.0,
    c_bnd: float = 100.0,
    family: str = "s",
) -> dict:
    """Finite-truncation region evidence for the graded glued family.

    Builds the per-index parameters exactly and reports, per grid cell
    (k', p'), the per-component lower-bound sequence with a threshold-tagged
    classification.  Cells with k' <= k and p' in [p, p+eps] are flagged as
    bracket cells and reported with their measured sup.
    """
    k = parse_rational(k)
    p = parse_rational(p)
    epsilon = parse_rational(epsilon)
    delta = parse_rational(delta)
    params = cons.FamilyParams(k=k, p=p, epsilon=epsilon, delta=delta, N=N, n_lo=N + 1, n_hi=n_hi)
    per_n = cons.family_params_lemma6(params, family)
    if k_grid is None:
        k_grid = [k, k + delta]
    if p_grid is None:
        p_grid = [Fraction(1), p, p + 4 * epsilon]
    k_grid = [parse_rational(x) for x in k_grid]
    p_grid = [parse_p(x) for x in p_grid]

    cells = []
    for kp in k_grid:
        for pp in p_grid:
            bounds = [_component_bound(family, tau, d_n, m, kp, pp) for (_, tau, d_n, m) in per_n]
            label, monotone = _classify(bounds, t_div, c_bnd)
            sup = max(bounds)
            first_exceed = next((per_n[i][0] for i, b in enumerate(bounds) if b > t_div), None)
            bracket = kp <= k and (not is_inf(pp)) and p <= pp <= p + epsilon
            cells.append(
                {
                    "k_prime": format_rational(kp),
                    "p_prime": format_p(pp),
                    "classification": label,
                    "monotone": monotone,
                    "sup": sup,
                    "n_range": [per_n[0][0], per_n[-1][0]],
                    "first_exceed_n": first_exceed,
                    "bracket_cell": bracket,
                    "bounds": bounds,
                }
            )
    report = {
        "experiment": "lemma6-region",
        "family": family,
        "k": format_rational(k),
        "p": format_rational(p),
        "epsilon": format_rational(epsilon),
        "delta": format_rational(delta),
        "N": N,
        "n_hi": n_hi,
        "t_div": t_div,
        "c_bnd": c_bnd,
        "cells": cells,
    }
    report["csv"] = region_csv(report)
    return report


def region_csv(report: dict) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(
        ["k_prime", "p_prime", "classification", "monotone", "sup", "first_exceed_n", "bracket_cell"]
    )
    for cell in report["cells"]:
        writer.writerow(
            [
                cell["k_prime"],
                cell["p_prime"],
                cell["classification"],
                cell["monotone"],
                format_double(cell["sup"]),
                cell["first_exceed_n"] if cell["first_exceed_n"] is not None else "",
                cell["bracket_cell"],
            ]
        )
    return out.getvalue()


def run_lemma7_threshold(
    k,
    mode: str,
    n_max: int = 200,
    p_list: Sequence[object] = (1, 2),
    k_prime_list: Sequence[object] | None = None,
    t_div: float = 100.0,
    c_bnd: float = 100.0,
    family: str = "s",
) -> dict:
    """Threshold evidence: components tau_n = n, m_n = 2 make the centered
    hub-indicator bound grow like n^(1/p) exactly when k' is below the family
    threshold, and collapse to 1 otherwise."""
    k = parse_rational(k)
    per_n = cons.family_params_lemma7(k, mode, n_max, family)
    if k_prime_list is None:
        k_prime_list = [max(Fraction(1), k - Fraction(1, 4)), k, k + Fraction(1, 4)]
    k_prime_list = [parse_rational(x) for x in k_prime_list]
    rows = []
    for kp in k_prime_list:
        for p in (parse_p(x) for x in p_list):
            bounds = [_component_bound(family, tau, d_n, m, kp, p) for (_, tau, d_n, m) in per_n]
            label, monotone = _classify(bounds, t_div, c_bnd)
            first_exceed = next((per_n[i][0] for i, b in enumerate(bounds) if b > t_div), None)
            rows.append(
                {
                    "k_prime": format_rational(kp),
                    "p": format_p(p),
                    "classification": label,
                    "monotone": monotone,
                    "sup": max(bounds),
                    "first_exceed_n": first_exceed,
                }
            )
    return {
        "experiment": "lemma7-threshold",
        "family": family,
        "k": format_rational(k),
        "mode": mode,
        "n_max": n_max,
        "t_div": t_div,
        "c_bnd": c_bnd,
        "rows": rows,
    }


# ---------------------------------------------------------------------------
# Gluing identity and the rational-grid family.


def run_prop1_identity(
    components: Sequence[dict | MetricMeasureSpace],
    k0,
    k,
    trials: int = 100,
    seed: int = 0,
) -> dict:
    """Exact identity on glued spaces: for x in component n,
    M_glued f(x) = max(M_component f_n(x), ||f||_1 / mu(X)), both operators.

    Zero tolerance: every comparison is between exact rationals.
    """
    k0 = parse_rational(k0)
    k = parse_rational(k)
    if k > k0:
        raise ValueError("the identity needs k <= k0")
    spaces = [c if isinstance(c, MetricMeasureSpace) else cons.build_space(c) for c in components]
    glued, parts = cons.glue_parts(spaces, k0)
    offsets = []
    acc = 0
    for part in parts:
        offsets.append(acc)
        acc += part.n
    mu_total = total_measure(glued)
    rng = random.Random(seed)
    failures = []
    for t in range(trials):
        f = random_function(rng, glued)
        mass = sum((v * w for v, w in zip(f.values, glued.weight)), Fraction(0))
        floor_term = mass / mu_total
        for op, m_op in (("centered", m_centered), ("noncentered", m_noncentered)):
            glued_vals = m_op(glued, k, f).values
            for idx, part in enumerate(parts):
                base = offsets[idx]
                f_part = TestFunction(f.values[base : base + part.n])
                part_vals = (
                    m_op(part, k, f_part).values
                    if not f_part.is_zero()
                    else (Fraction(0),) * part.n
                )
                for i in range(part.n):
                    expected = max(part_vals[i], floor_term)
                    if glued_vals[base + i] != expected:
                        failures.append({"trial": t, "op": op, "component": idx, "atom": i})
    return {
        "experiment": "prop1-identity",
        "k0": format_rational(k0),
        "k": format_rational(k),
        "trials": trials,
        "seed": seed,
        "components": len(parts),
        "failures": failures,
        "ok": not failures,
    }


def run_example1(
    samples: Sequence[tuple[object, object, object]],
    n_max: int = 12,
    t_div: float = 100.0,
    c_bnd: float = 100.0,
) -> dict:
    """Graded-family evidence over rational (k, p) samples below a target
    threshold curve.  Each sample carries (k, p, hc) where hc is the curve
    value at k; samples with p >= hc are outside the region and not built.

    For built samples the family (eps = 1/4, N = 1) is scanned at the
    divergence cell (k' = k, p' = 1, needs p > 1) and at the bounded cell
    p' = hc + 1.  An empty sample set reports the one-point space.
    """
    rows = []
    built_any = False
    for k_raw, p_raw, hc_raw in samples:
        k = parse_rational(k_raw)
        p = parse_rational(p_raw)
        hc = parse_p(hc_raw)
        if not is_inf(hc) and p >= hc:
            rows.append({"k": format_rational(k), "p": format_rational(p), "built": False})
            continue
        built_any = True
        delta = (2 - k) / 2
        params = cons.FamilyParams(
            k=k, p=p, epsilon=Fraction(1, 4), delta=delta, N=1, n_lo=2, n_hi=n_max
        )
        per_n = cons.family_params_lemma6(params, "s")
        row: dict = {
            "k": format_rational(k),
            "p": format_rational(p),
            "hc": format_p(hc),
            "built": True,
            "delta": format_rational(delta),
        }
        if p > 1:
            bounds = [_component_bound("s", tau, d_n, m, k, Fraction(1)) for (_, tau, d_n, m) in per_n]
            label, monotone = _classify(bounds, t_div, c_bnd)
            row["divergence_cell"] = {
                "p_prime": "1/1",
                "classification": label,
                "monotone": monotone,
                "sup": max(bounds),
                "first_exceed_n": next(
                    (per_n[i][0] for i, b in enumerate(bounds) if b > t_div), None
                ),
            }
        else:
            row["divergence_cell"] = None
        if not is_inf(hc):
            p_bnd = hc + 1
            bounds = [_component_bound("s", tau, d_n, m, k, p_bnd) for (_, tau, d_n, m) in per_n]
            row["bounded_cell"] = {
                "p_prime": format_rational(p_bnd),
                "sup": max(bounds),
                "ok": max(bounds) <= c_bnd,
            }
        rows.append(row)
    report = {
        "experiment": "example1-family",
        "n_max": n_max,
        "t_div": t_div,
        "c_bnd": c_bnd,
        "samples": rows,
        "empty_region": not built_any,
    }
    if not built_any:
        report["space"] = cons.single_point().to_json_dict()
    return report


# ---------------------------------------------------------------------------
# Grid sweeps.

SWEEP_COLUMNS = (
    "space_id",
    "k",
    "p",
    "op_kind",
    "kind",
    "lower_bound",
    "analytic_upper",
    "witness_id",
    "runtime_ms",
)


def _witness_id(witness: TestFunction) -> str:
    payload = json.dumps(witness.to_json_list()).encode()
    return hashlib.sha1(payload).hexdigest()[:12]


def sweep(
    spaces: Sequence[tuple[str, dict | MetricMeasureSpace]],
    k_grid: Sequence[object],
    p_grid: Sequence[object],
    kinds: Sequence[str] = ("weak", "strong"),
    op_kinds: Sequence[str] = ("centered", "noncentered"),
    budget: dict | None = None,
    seed: int = 0,
) -> dict:
    """One row per (space, k, p, kind, op) cell: indicator-scan plus ascent
    lower bounds and the analytic upper bound when the space kind has one.

    The ascent work per cell is capped by budget["max_evals"]; exhaustion is
    recorded on the row (restarts are reduced deterministically, never by
    wall-clock), so a sweep always completes every cell.
    """
    budget = dict(budget or {})
    restarts = int(budget.get("restarts", 8))
    iters = int(budget.get("iters", 2))
    max_evals = budget.get("max_evals")
    built = [(sid, s if isinstance(s, MetricMeasureSpace) else cons.build_space(s)) for sid, s in spaces]

    def one_cell(cell):
        sid, space, k, p, kind, op = cell
        t0 = time.perf_counter()
        exhausted = False
        eff_restarts = restarts
        per_start = 1 + iters * 2 * space.n
        if max_evals is not None:
            allowed = max(0, int(max_evals) // per_start - 2)
            if allowed < restarts:
                eff_restarts = allowed
                exhausted = True
        if eff_restarts >= 1:
            est = ascent_search(space, k, p, kind, op, eff_restarts, iters, seed)
        else:
            est = delta_scan(space, k, p, kind, op)
        upper = upper_for_space(space, k, p, kind, op)
        runtime_ms = (time.perf_counter() - t0) * 1000.0
        return {
            "space_id": sid,
            "k": format_rational(parse_rational(k)),
            "p": format_p(parse_p(p)),
            "op_kind": op,
            "kind": kind,
            "lower_bound": est.lower_bound,
            "analytic_upper": upper.value if upper else None,
            "witness_id": _witness_id(est.witness),
            "runtime_ms": runtime_ms,
            "budget_exhausted": exhausted,
        }

    cells = [
        (sid, space, k, p, kind, op)
        for sid, space in built
        for k in k_grid
        for p in p_grid
        for kind in kinds
        for op in op_kinds
    ]
    rows = _map(one_cell, cells)
    rows.sort(
        key=lambda r: (
            r["space_id"],
            parse_rational(r["k"]),
            float("inf") if r["p"] == "inf" else parse_rational(r["p"]),
            r["kind"],
            r["op_kind"],
        )
    )
    return {"experiment": "sweep", "seed": seed, "rows": rows, "csv": sweep_csv(rows)}


def sweep_csv(rows: Sequence[dict]) -> str:
    out = io.StringIO()
    writer = csv.writer(out)
    writer.writerow(SWEEP_COLUMNS)
    for r in rows:
        writer.writerow(
            [
                r["space_id"],
                r["k"],
                r["p"],
                r["op_kind"],
                r["kind"],
                format_double(r["lower_bound"]),
                format_double(r["analytic_upper"]) if r["analytic_upper"] is not None else "",
                r["witness_id"],
                format_double(r["runtime_ms"]),
            ]
        )
    return out.getvalue()


def parse_sweep_csv(text: str) -> list[dict]:
    reader = csv.DictReader(io.StringIO(text))
    rows = []
    for rec in reader:
        rows.append(
            {
                "space_id": rec["space_id"],
                "k": rec["k"],
                "p": rec["p"],
                "op_kind": rec["op_kind"],
                "kind": rec["kind"],
                "lower_bound": float(rec["lower_bound"]),
                "analytic_upper": float(rec["analytic_upper"]) if rec["analytic_upper"] else None,
                "witness_id": rec["witness_id"],
                "runtime_ms": float(rec["runtime_ms"]),
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Dispatcher used by the service and the CLI.

EXPERIMENT_NAMES = (
    "lemma2",
    "lemma3",
    "lemma4",
    "lemma5",
    "lemma6-region",
    "lemma7-threshold",
    "prop1-identity",
    "example1-family",
    "sweep",
)


def reproduce(name: str, params: dict | None = None, out_dir: str | Path | None = None) -> dict:
    """Run a named experiment and optionally write its JSON (and CSV) report."""
    params = dict(params or {})
    if name == "lemma2":
        report = run_lemma2(**{"k": 2, **params})
    elif name == "lemma3":
        report = run_lemma3(**{"k": 3, **params})
    elif name == "lemma4":
        report = run_lemma4(**params)
    elif name == "lemma5":
        report = run_lemma5(**params)
    elif name == "lemma6-region":
        report = run_lemma6_region(
            **{"k": Fraction(3, 2), "p": 2, "epsilon": Fraction(1, 4), "delta": Fraction(1, 4), "N": 2, **params}
        )
    elif name == "lemma7-threshold":
        report = run_lemma7_threshold(**{"k": Fraction(3, 2), "mode": "strict", **params})
    elif name == "prop1-identity":
        defaults = {
            "components": [
                {"kind": "basic_s", "params": {"tau": 2, "d": "3/2", "m": "2/1"}},
                {"kind": "basic_t", "params": {"tau": 1, "d": "2/1", "m": "3/1"}},
                {"kind": "basic_s", "params": {"tau": 1, "d": "7/4", "m": "3/1"}},
            ],
            "k0": 2,
            "k": 2,
        }
        report = run_prop1_identity(**{**defaults, **params})
    elif name == "example1-family":
        report = run_example1(**{"samples": [("5/4", "3/2", "2/1")], **params})
    elif name == "sweep":
        report = sweep(
            [(f"space{i}", desc) for i, desc in enumerate(params.pop("spaces"))],
            **params,
        )
    else:
        raise ValueError(f"unknown experiment {name!r}; choose from {EXPERIMENT_NAMES}")
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"{name}.json").write_text(json.dumps(report, indent=2, sort_keys=True))
        if "csv" in report:
            (out / f"{name}.csv").write_text(report["csv"])
    return report
