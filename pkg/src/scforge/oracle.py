"""Brute-force ground truth for the counting and diversity bounds.

Assignments are enumerated as mixed-radix integers: one digit per cell in
row-major order (first cell most significant), digit ``P * Z + L``. The
integer order coincides with the lexicographic order used for canonical
keys, so an assignment is its orbit representative iff no joint
permutation maps it to a smaller integer.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

import numpy as np

from .bounds import (
    BoundReport,
    corollary1_bound,
    event_probabilities,
    mt_support_lower_bound,
    noneq_count_lower_bound,
)
from .csp import CspInstance, build_csp_instance
from .entropy import collision_entropy_estimate
from .equivalence import ORBIT_GUARD, canonical_form
from .errors import OrbitTooLarge, SpaceTooLarge
from .model import CodeParams
from .mt import DEFAULT_RESAMPLE_CAP, run_many

__all__ = [
    "BoundCheck",
    "OracleReport",
    "exhaustive_count",
    "exhaustive_noneq_count",
    "check_bounds",
    "empirical_support_and_entropy",
    "survival_product_check",
    "DEFAULT_SPACE_CAP",
]

DEFAULT_SPACE_CAP = 2**28
CHUNK = 1 << 18


@dataclass
class BoundCheck:
    name: str
    log_bound: float
    holds: bool


@dataclass
class OracleReport:
    params: dict
    g_set: list[int]
    space_size: int
    feasible_count: int
    noneq_count: int | None = None
    bounds_checked: list[BoundCheck] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "params": self.params,
            "g_set": self.g_set,
            "space_size": self.space_size,
            "feasible_count": self.feasible_count,
            "noneq_count": self.noneq_count,
            "bounds_checked": [
                {"name": b.name, "log_bound": _num(b.log_bound), "holds": b.holds} for b in self.bounds_checked
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["bound", "log_bound", "holds", "feasible_count", "noneq_count", "space_size"])
        for b in self.bounds_checked:
            writer.writerow([b.name, _num(b.log_bound), b.holds, self.feasible_count, self.noneq_count, self.space_size])
        return buf.getvalue()


def _num(v):
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


class _Enumerator:
    """Vectorized evaluation of contiguous index ranges of the assignment space."""

    def __init__(self, params: CodeParams, instance: CspInstance, with_orbits: bool):
        self.g, self.k = params.gamma, params.kappa
        self.n = self.g * self.k
        self.Z = params.lift
        self.X = params.alphabet_size
        self.weights = np.array([self.X ** (self.n - 1 - p) for p in range(self.n)], dtype=np.int64)
        idx = lambda c: c[0] * self.k + c[1]  # noqa: E731
        self.plus = [[idx(c) for c in ev.cells_plus] for ev in instance.events]
        self.minus = [[idx(c) for c in ev.cells_minus] for ev in instance.events]
        self.perms = []
        if with_orbits:
            for rp in itertools.permutations(range(self.g)):
                for cp in itertools.permutations(range(self.k)):
                    src = [rp[i] * self.k + cp[j] for i in range(self.g) for j in range(self.k)]
                    if src != list(range(self.n)):
                        self.perms.append(np.array(src))

    def digits(self, start: int, stop: int) -> tuple[np.ndarray, np.ndarray]:
        codes = np.arange(start, stop, dtype=np.int64)
        d = (codes[:, None] // self.weights[None, :]) % self.X
        return codes, d

    def feasible(self, d: np.ndarray) -> np.ndarray:
        P, L = d // self.Z, d % self.Z
        ok = np.ones(d.shape[0], dtype=bool)
        for plus, minus in zip(self.plus, self.minus):
            dp = P[:, plus].sum(axis=1) - P[:, minus].sum(axis=1)
            dl = L[:, plus].sum(axis=1) - L[:, minus].sum(axis=1)
            ok &= ~((dp == 0) & (dl % self.Z == 0))
        return ok

    def count(self, start: int, stop: int) -> tuple[int, int]:
        codes, d = self.digits(start, stop)
        ok = self.feasible(d)
        if not self.perms:
            return int(ok.sum()), int(ok.sum())
        rep = ok.copy()
        sub_codes, sub = codes[rep], d[rep]
        keep = np.ones(len(sub_codes), dtype=bool)
        for src in self.perms:
            keep &= sub[:, src] @ self.weights >= sub_codes
        return int(ok.sum()), int(keep.sum())


def _count_range(args):
    params, instance, with_orbits, start, stop = args
    en = _Enumerator(params, instance, with_orbits)
    feas = reps = 0
    for a in range(start, stop, CHUNK):
        f, r = en.count(a, min(a + CHUNK, stop))
        feas += f
        reps += r
    return feas, reps


def _enumerate(params, g_set, cap, with_orbits, workers, instance):
    space = params.alphabet_size ** params.n_cells
    if space > cap:
        raise SpaceTooLarge(f"assignment space {space} exceeds cap {cap}")
    if with_orbits and factorial(params.gamma) * factorial(params.kappa) > ORBIT_GUARD:
        raise OrbitTooLarge("joint permutation group too large for orbit counting")
    if instance is None:
        instance = build_csp_instance(params, g_set)
    if workers <= 1:
        feas, reps = _count_range((params, instance, with_orbits, 0, space))
    else:
        step = math.ceil(space / workers)
        jobs = [(params, instance, with_orbits, a, min(a + step, space)) for a in range(0, space, step)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_count_range, jobs))
        feas = sum(p[0] for p in parts)
        reps = sum(p[1] for p in parts)
    return space, feas, reps


def exhaustive_count(
    params: CodeParams,
    g_set: Iterable[int] = (2,),
    cap: int = DEFAULT_SPACE_CAP,
    workers: int = 1,
    instance: CspInstance | None = None,
) -> OracleReport:
    """Exact number of assignments with no lifted-active candidate.

    Raises
    ------
    SpaceTooLarge
        If ``(Z (m + 1))**(gamma kappa)`` exceeds ``cap``.
    """
    g_set = sorted(set(g_set))
    space, feas, _ = _enumerate(params, g_set, cap, False, workers, instance)
    return OracleReport(params.to_dict(), g_set, space, feas)


def exhaustive_noneq_count(
    params: CodeParams,
    g_set: Iterable[int] = (2,),
    cap: int = DEFAULT_SPACE_CAP,
    workers: int = 1,
    instance: CspInstance | None = None,
) -> OracleReport:
    """Exact feasible count and number of feasible joint-permutation orbits."""
    g_set = sorted(set(g_set))
    space, feas, reps = _enumerate(params, g_set, cap, True, workers, instance)
    return OracleReport(params.to_dict(), g_set, space, feas, reps)


def _holds(count: int, report: BoundReport) -> bool:
    if report.exact_bound is not None:
        return count >= report.exact_bound
    if report.log_bound == -math.inf:
        return True
    return count > 0 and math.log(count) >= report.log_bound


def check_bounds(oracle: OracleReport, params: CodeParams, instance: CspInstance) -> OracleReport:
    """Append a verdict for every applicable bound whose condition holds."""
    c1 = corollary1_bound(params, instance)
    pairs: list[tuple[BoundReport, int | None]] = [(c1, oracle.feasible_count)]
    pairs.append((noneq_count_lower_bound(c1, params.gamma, params.kappa), oracle.noneq_count))
    support = mt_support_lower_bound(params, instance)
    pairs += [
        (support.eq19, oracle.feasible_count),
        (support.eq20, oracle.feasible_count),
        (support.eq19_noneq, oracle.noneq_count),
        (support.eq20_noneq, oracle.noneq_count),
    ]
    for rep, count in pairs:
        if count is None or not rep.satisfied:
            continue
        oracle.bounds_checked.append(BoundCheck(rep.name, rep.log_bound, _holds(count, rep)))
    return oracle


def survival_product_check(params: CodeParams, instance: CspInstance, oracle: OracleReport) -> dict:
    """Compare the exact feasible fraction with the independent-events product.

    The two agree exactly when no two events share a variable; with shared
    variables the mismatch exposes the dependence recorded in ``instance``.
    """
    fraction = Fraction(oracle.feasible_count, oracle.space_size)
    product = Fraction(1)
    for p in event_probabilities(params, instance):
        product *= 1 - p
    disjoint = all(not nb for nb in instance.dependency)
    return {"fraction": fraction, "product": product, "disjoint": disjoint, "equal": fraction == product}


def empirical_support_and_entropy(
    params: CodeParams,
    instance: CspInstance,
    n_runs: int,
    alpha: float = 2,
    seeds: Sequence[int] | None = None,
    variant: str = "paper_recursive",
    cap: int = DEFAULT_RESAMPLE_CAP,
    oracle: OracleReport | None = None,
    workers: int = 1,
) -> dict:
    """Run MT repeatedly and compare observed diversity with the bounds.

    The distinct-output count is only a lower estimate of the MT support;
    it is never reported as the support size. Only the collision entropy
    (``alpha = 2``) is estimated.
    """
    if n_runs < 2:
        raise ValueError("n_runs must be >= 2")
    if alpha != 2:
        raise ValueError("only the collision (alpha = 2) estimator is provided")
    seeds = list(range(n_runs)) if seeds is None else list(seeds)[:n_runs]
    results = run_many(params, instance, seeds, variant, cap, workers)
    outputs = [a for a, _ in results]
    keys = [a.key() for a in outputs]
    distinct = len(set(keys))
    try:
        distinct_canonical = len({canonical_form(a) for a in outputs})
    except OrbitTooLarge:
        distinct_canonical = None
    h2, h2_se = collision_entropy_estimate(keys)

    record = {
        "n_runs": len(seeds),
        "distinct_outputs_lower_estimate": distinct,
        "distinct_canonical_outputs": distinct_canonical,
        "collision_entropy": h2,
        "collision_entropy_stderr": h2_se,
        "verdicts": {},
    }
    support = mt_support_lower_bound(params, instance)
    record["eq19_log_bound"] = support.eq19.log_bound
    record["eq20_log_bound"] = support.eq20.log_bound
    if oracle is not None:
        v = record["verdicts"]
        feas = oracle.feasible_count
        v["distinct_le_feasible"] = distinct <= feas
        if support.eq19.satisfied:
            v["eq19_le_feasible"] = _log_le(support.eq19.log_bound, feas)
            v["eq20_le_feasible"] = _log_le(support.eq20.log_bound, feas)
        if oracle.noneq_count is not None and distinct_canonical is not None:
            v["canonical_le_noneq"] = distinct_canonical <= oracle.noneq_count
        if feas > 0 and math.isfinite(h2):
            v["entropy_le_log_feasible"] = h2 <= math.log(feas) + 3 * h2_se
    return record


def _log_le(log_bound: float, count: int) -> bool:
    if log_bound == -math.inf:
        return True
    return count > 0 and log_bound <= math.log(count)
