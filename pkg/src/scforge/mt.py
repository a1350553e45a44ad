"""Moser-Tardos resampling over the composite ``(P, L)`` edge variables.

Two event-selection rules are offered:

``paper_recursive``
    Pick the least-indexed violated event, resample it, then keep
    resampling the least-indexed violated event that shares a cell with the
    event on top of the stack (pushing it), popping once none is left. The
    outer loop rescans from the least index. This is the nested RESAMPLE
    procedure, run on an explicit stack.
``classic_least_index``
    Always resample the globally least-indexed violated event.

Randomness is counter based: the value of cell ``v`` at its ``e``-th draw
comes from numpy's Philox4x64 keyed by the run seed with counter
``v + (e << 64)``. A design is therefore a pure function of
``(seed, variant, params, instance)`` and does not depend on draw order.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .csp import CspInstance
from .errors import ResampleCapExceeded
from .model import Assignment, CodeParams

__all__ = [
    "MtRunStats",
    "MtBatchStats",
    "run_mt",
    "mt_batch_stats",
    "draw_cell",
    "run_artifact",
    "VARIANTS",
    "DEFAULT_RESAMPLE_CAP",
]

VARIANTS = ("paper_recursive", "classic_least_index")
DEFAULT_RESAMPLE_CAP = 10**7
_SEED_LIMIT = 1 << 128
_TO_UNIT = 2.0**-53


def _inverse_cdf(cdf: np.ndarray, u: float) -> int:
    return min(int(np.searchsorted(cdf, u, side="right")), len(cdf) - 1)


def draw_cell(seed: int, var: int, epoch: int, spread_cdf: np.ndarray, lift_cdf: np.ndarray) -> tuple[int, int]:
    """Draw ``(P, L)`` for cell ``var`` at resample epoch ``epoch``."""
    raw = np.random.Philox(key=seed, counter=var + (epoch << 64)).random_raw(2)
    u_p = float(int(raw[0]) >> 11) * _TO_UNIT
    u_l = float(int(raw[1]) >> 11) * _TO_UNIT
    return _inverse_cdf(spread_cdf, u_p), _inverse_cdf(lift_cdf, u_l)


@dataclass(frozen=True)
class MtRunStats:
    total_resamples: int
    per_event_resamples: tuple[int, ...]
    initial_violations: int
    terminated: bool
    seed: int
    variant: str

    def to_dict(self) -> dict:
        d = asdict(self)
        d["per_event_resamples"] = list(self.per_event_resamples)
        return d


class _Engine:
    def __init__(self, params: CodeParams, instance: CspInstance, seed: int):
        self.Z = params.lift
        self.seed = seed
        self.spread_cdf = np.cumsum(params.spread_probs)
        self.lift_cdf = np.cumsum(params.lift_probs)
        k = params.kappa
        self.n_vars = params.gamma * k
        idx = lambda cell: cell[0] * k + cell[1]  # noqa: E731
        self.plus = [[idx(c) for c in ev.cells_plus] for ev in instance.events]
        self.minus = [[idx(c) for c in ev.cells_minus] for ev in instance.events]
        self.scope = [sorted({idx(c) for c in cells}) for cells in instance.var_of]
        self.overlap = [instance.closed_neighborhood(i) for i in range(instance.n_events)]
        self.P = [0] * self.n_vars
        self.L = [0] * self.n_vars
        self.epoch = [0] * self.n_vars
        for v in range(self.n_vars):
            self._draw(v)

    def _draw(self, v: int) -> None:
        self.P[v], self.L[v] = draw_cell(self.seed, v, self.epoch[v], self.spread_cdf, self.lift_cdf)
        self.epoch[v] += 1

    def violated(self, e: int) -> bool:
        P, L = self.P, self.L
        dp = sum(P[v] for v in self.plus[e]) - sum(P[v] for v in self.minus[e])
        if dp != 0:
            return False
        dl = sum(L[v] for v in self.plus[e]) - sum(L[v] for v in self.minus[e])
        return dl % self.Z == 0

    def resample(self, e: int) -> None:
        for v in self.scope[e]:
            self._draw(v)

    def first_violated(self, events) -> int | None:
        for e in events:
            if self.violated(e):
                return e
        return None


def run_mt(
    params: CodeParams,
    instance: CspInstance,
    seed: int,
    variant: str = "paper_recursive",
    cap: int = DEFAULT_RESAMPLE_CAP,
) -> tuple[Assignment, MtRunStats]:
    """Run MT until no event of ``instance`` is lifted-active.

    Raises
    ------
    ResampleCapExceeded
        After ``cap`` resamples without success; the exception carries the
        last assignment and stats with ``terminated=False``.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; choose from {VARIANTS}")
    if cap < 1:
        raise ValueError("cap must be >= 1")
    if not 0 <= seed < _SEED_LIMIT:
        raise ValueError("seed must be a non-negative integer below 2**128")

    eng = _Engine(params, instance, seed)
    n = instance.n_events
    all_events = range(n)
    counts = [0] * n
    initial = sum(eng.violated(e) for e in all_events)
    total = 0

    def bump(e: int) -> None:
        nonlocal total
        if total >= cap:
            raise _CapHit
        eng.resample(e)
        counts[e] += 1
        total += 1

    try:
        if variant == "classic_least_index":
            while (e := eng.first_violated(all_events)) is not None:
                bump(e)
        else:
            while (e := eng.first_violated(all_events)) is not None:
                bump(e)
                stack = [e]
                while stack:
                    nxt = eng.first_violated(eng.overlap[stack[-1]])
                    if nxt is None:
                        stack.pop()
                    else:
                        bump(nxt)
                        stack.append(nxt)
    except _CapHit:
        stats = MtRunStats(total, tuple(counts), initial, False, seed, variant)
        raise ResampleCapExceeded(
            f"no feasible assignment after {cap} resamples", _assignment(eng, params), stats
        ) from None

    stats = MtRunStats(total, tuple(counts), initial, True, seed, variant)
    return _assignment(eng, params), stats


class _CapHit(Exception):
    pass


def _assignment(eng: _Engine, params: CodeParams) -> Assignment:
    shape = (params.gamma, params.kappa)
    return Assignment(np.array(eng.P).reshape(shape), np.array(eng.L).reshape(shape))


def run_artifact(params: CodeParams, assignment: Assignment, stats: MtRunStats) -> dict:
    """JSON-ready record ``{params, seed, variant, assignment, stats}``."""
    return {
        "params": params.to_dict(),
        "seed": stats.seed,
        "variant": stats.variant,
        "assignment": assignment.to_dict(),
        "stats": stats.to_dict(),
    }


@dataclass
class MtBatchStats:
    n_runs: int
    variant: str
    success_rate: float
    mean_total: float
    stderr_total: float
    per_event_mean: list[float]
    per_event_stderr: list[float]
    distinct_outputs: int
    distinct_canonical: int | None
    clique_resample_bound: float | None = None
    clique_per_event_bound: list[float] | None = None
    mu_tilde: list[float] | None = None
    checks: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _run_chunk(args):
    params, instance, seeds, variant, cap = args
    return [run_mt(params, instance, s, variant, cap) for s in seeds]


def run_many(
    params: CodeParams,
    instance: CspInstance,
    seeds: Sequence[int],
    variant: str = "paper_recursive",
    cap: int = DEFAULT_RESAMPLE_CAP,
    workers: int = 1,
) -> list[tuple[Assignment, MtRunStats]]:
    """Run MT once per seed; results come back in seed order for any ``workers``."""
    seeds = list(seeds)
    if workers <= 1 or len(seeds) < 2:
        return _run_chunk((params, instance, seeds, variant, cap))
    size = math.ceil(len(seeds) / workers)
    chunks = [(params, instance, seeds[i : i + size], variant, cap) for i in range(0, len(seeds), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_run_chunk, chunks))
    return [r for part in parts for r in part]


def mt_batch_stats(
    params: CodeParams,
    instance: CspInstance,
    seeds: Sequence[int],
    variant: str = "paper_recursive",
    cap: int = DEFAULT_RESAMPLE_CAP,
    workers: int = 1,
    canonical: bool = True,
    results: list[tuple[Assignment, MtRunStats]] | None = None,
) -> MtBatchStats:
    """Aggregate resampling statistics over many seeded runs.

    Per-event means are compared against the clique-LLL expected-resample
    bound (default clique weights) and against ``mu_tilde`` from the
    cluster-expansion condition with ``mu = 1/(delta - 1)``, each only when
    the corresponding condition holds. A comparison passes if the mean is at
    most the bound plus three standard errors.
    """
    from .bounds import clique_lll_bound, cluster_expansion_bound, event_probabilities, independence_polynomial
    from .equivalence import canonical_form

    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    if results is None:
        results = run_many(params, instance, seeds, variant, cap, workers)
    n = len(results)
    counts = np.array([st.per_event_resamples for _, st in results], dtype=float).reshape(n, instance.n_events)
    totals = counts.sum(axis=1)
    sd = lambda a: a.std(axis=0, ddof=1) / math.sqrt(n) if n > 1 else np.zeros_like(a.mean(axis=0))  # noqa: E731

    stats = MtBatchStats(
        n_runs=n,
        variant=variant,
        success_rate=float(np.mean([st.terminated for _, st in results])),
        mean_total=float(totals.mean()),
        stderr_total=float(sd(totals)),
        per_event_mean=counts.mean(axis=0).tolist(),
        per_event_stderr=np.atleast_1d(sd(counts)).tolist(),
        distinct_outputs=len({a for a, _ in results}),
        distinct_canonical=len({canonical_form(a) for a, _ in results}) if canonical else None,
    )

    if instance.n_events == 0:
        return stats
    probs = event_probabilities(params, instance)
    se = np.array(stats.per_event_stderr)
    mean = np.array(stats.per_event_mean)
    try:
        clique = clique_lll_bound(instance, probs)
    except Exception:  # weights overflow for degenerate covers
        clique = None
    if clique is not None and clique.satisfied:
        per = np.array([float(v) for v in clique.extras["per_event_resample"]])
        stats.clique_resample_bound = float(clique.extras["resample_bound"])
        stats.clique_per_event_bound = per.tolist()
        stats.checks["clique_per_event"] = bool(np.all(mean <= per + 3 * se))
        stats.checks["clique_total"] = bool(stats.mean_total <= stats.clique_resample_bound + 3 * stats.stderr_total)

    d = instance.delta - 1
    if d > 0 and instance.n_events <= 30:
        mu = Fraction(1, d)
        ce = cluster_expansion_bound(instance, probs, mu)
        if ce.satisfied:
            mt = [float(mu)] * instance.n_events
            stats.mu_tilde = mt
            stats.checks["mu_tilde_per_event"] = bool(np.all(mean <= np.array(mt) + 3 * se))
    return stats
