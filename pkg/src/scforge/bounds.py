"""Local-lemma conditions and the counting / diversity lower bounds.

Everything is reported in the natural-log domain: ``(Z (m + 1))**(gamma kappa)``
and ``Delta**Delta`` overflow floats long before the interesting parameter
range. Where every input is rational (``Fraction``) the same quantities are
also carried exactly and exposed as ``exact_bound``.

Conventions
-----------
* ``delta`` is the closed-neighbourhood degree of the dependency graph,
  ``(2 gamma - 3)(2 kappa - 3)`` for 4-cycles.
* ``|H|`` in the case-II threshold is the number of composite cell
  variables of an event (4 for a 4-cycle).
* Conditions are inclusive (``<=``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, factorial, inf, log
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .csp import CspInstance
from .entropy import alpha_factor, h_alpha_product
from .errors import CliqueWeightOverflow, GraphTooLarge, WeightOutOfRange
from .model import CodeParams

__all__ = [
    "BoundReport",
    "activation_probability",
    "activation_probability_closed_form",
    "event_probabilities",
    "asymmetric_lll_bound",
    "clique_lll_bound",
    "default_clique_weights",
    "independence_polynomial",
    "cluster_expansion_bound",
    "count_lower_bound",
    "corollary1_bound",
    "noneq_count_lower_bound",
    "MtEntropyBounds",
    "mt_entropy_lower_bound",
    "SupportBounds",
    "mt_support_lower_bound",
    "penalty_terms",
    "bound_comparison_check",
    "DEFAULT_INDEPENDENCE_CAP",
]

DEFAULT_INDEPENDENCE_CAP = 30
EXACT_CELL_LIMIT = 12

Number = Any  # float or Fraction


@dataclass
class BoundReport:
    """Condition verdict plus (log-domain) bound value for one lemma/theorem."""

    name: str
    condition_lhs: float | None = None
    threshold_I: float | None = None
    threshold_II: float | None = None
    satisfied: bool = False
    case_taken: str = "none"
    log_bound: float | None = None
    exact_bound: Fraction | None = None
    extras: dict = field(default_factory=dict)

    @property
    def bound(self) -> float | None:
        if self.log_bound is None:
            return None
        return math.exp(self.log_bound) if self.log_bound < 709 else inf

    def require(self) -> "BoundReport":
        from .errors import ConditionUnsatisfied

        if not self.satisfied:
            raise ConditionUnsatisfied(f"{self.name}: condition does not hold", self)
        return self

    def to_dict(self) -> dict:
        def enc(v):
            if isinstance(v, Fraction):
                return str(v)
            if isinstance(v, float) and not math.isfinite(v):
                return str(v)
            if isinstance(v, dict):
                return {str(k): enc(x) for k, x in v.items()}
            if isinstance(v, (list, tuple)):
                return [enc(x) for x in v]
            if isinstance(v, np.generic):
                return v.item()
            return v

        return {
            "name": self.name,
            "condition_lhs": enc(self.condition_lhs),
            "threshold_I": enc(self.threshold_I),
            "threshold_II": enc(self.threshold_II),
            "satisfied": self.satisfied,
            "case_taken": self.case_taken,
            "log_bound": enc(self.log_bound),
            "exact_bound": enc(self.exact_bound),
            "extras": enc(self.extras),
        }


def _is_exact(*values) -> bool:
    return all(isinstance(v, (Fraction, int)) for v in values)


def _safe_log(x: Number) -> float:
    return log(x) if x > 0 else -inf


# ---------------------------------------------------------------------------
# activation probabilities


def activation_probability_closed_form(m: int, Z: int) -> Fraction:
    """``(2m^2 + 4m + 3) / (3 (m+1)^3 Z)`` for a 4-cycle under uniform draws."""
    return Fraction(2 * m * m + 4 * m + 3, 3 * (m + 1) ** 3 * Z)


def _signed_sum_zero_prob(dist: Sequence[Fraction], coeffs: Sequence[int], modulus: int | None) -> Fraction:
    """Pr[sum_v c_v X_v == 0] (mod ``modulus`` if given) for i.i.d. ``X_v ~ dist``."""
    acc: dict[int, Fraction] = {0: Fraction(1)}
    for c in coeffs:
        nxt: dict[int, Fraction] = {}
        for s, ps in acc.items():
            for x, px in enumerate(dist):
                if px == 0:
                    continue
                t = s + c * x
                if modulus is not None:
                    t %= modulus
                nxt[t] = nxt.get(t, Fraction(0)) + ps * px
        acc = nxt
    return acc.get(0, Fraction(0))


def _candidate_coefficients(candidate) -> list[int]:
    coeff: dict[tuple[int, int], int] = {}
    for c in candidate.cells_plus:
        coeff[c] = coeff.get(c, 0) + 1
    for c in candidate.cells_minus:
        coeff[c] = coeff.get(c, 0) - 1
    return [v for v in coeff.values() if v != 0]


def activation_probability(params: CodeParams, g: int = 2, candidate=None) -> Fraction:
    """Probability that a fixed candidate is lifted-active under i.i.d. draws.

    The partition and lifting sums along a walk only depend on each cell's
    net coefficient (plus-count minus minus-count), so the probability is a
    product of two signed-sum-is-zero probabilities, computed by exact
    convolution. ``candidate`` defaults to a simple length-``2g`` cycle.
    """
    if candidate is None:
        coeffs = [1, -1] * g
    else:
        coeffs = _candidate_coefficients(candidate)
    p_part = _signed_sum_zero_prob(params.spread_dist, coeffs, None)
    p_lift = _signed_sum_zero_prob(params.lift_dist, coeffs, params.lift)
    return p_part * p_lift


def event_probabilities(params: CodeParams, instance: CspInstance) -> list[Fraction]:
    cache: dict[tuple[int, ...], Fraction] = {}
    out = []
    for ev in instance.events:
        key = tuple(sorted(_candidate_coefficients(ev)))
        if key not in cache:
            cache[key] = activation_probability(params, candidate=ev)
        out.append(cache[key])
    return out


# ---------------------------------------------------------------------------
# local lemma checkers


def _per_event(values, n: int) -> list:
    if isinstance(values, (int, float, Fraction)):
        return [values] * n
    vals = list(values)
    if len(vals) != n:
        raise ValueError(f"expected {n} per-event values, got {len(vals)}")
    return vals


def _adjacency(graph) -> tuple[tuple[int, ...], ...]:
    if isinstance(graph, CspInstance):
        return graph.dependency
    return tuple(tuple(sorted(n)) for n in graph)


def asymmetric_lll_bound(instance, probs, x) -> BoundReport:
    """Asymmetric LLL: ``P(A_i) <= x_i prod_{j in N(i)} (1 - x_j)`` for all ``i``.

    ``instance`` may be a :class:`CspInstance` or a bare adjacency list.
    The bound is ``Pr(no bad event) >= prod_j (1 - x_j)``.
    """
    adj = _adjacency(instance)
    n = len(adj)
    probs = _per_event(probs, n)
    x = _per_event(x, n)
    for xi in x:
        if not 0 < xi < 1:
            raise WeightOutOfRange(f"weight {xi!r} not in (0, 1)")

    slack = []
    for i in range(n):
        rhs = x[i]
        for j in adj[i]:
            rhs = rhs * (1 - x[j])
        slack.append(rhs - probs[i])
    satisfied = all(s >= 0 for s in slack)
    log_bound = sum(log(1 - float(xj)) for xj in x)
    exact = None
    if _is_exact(*x):
        exact = Fraction(1)
        for xj in x:
            exact *= 1 - xj
    return BoundReport(
        name="asymmetric_lll",
        condition_lhs=float(max(probs, default=0)),
        satisfied=satisfied,
        case_taken="I" if satisfied else "none",
        log_bound=log_bound,
        exact_bound=exact,
        extras={"min_slack": min((float(s) for s in slack), default=inf)},
    )


def default_clique_weights(instance: CspInstance) -> dict[tuple[int, tuple[int, int]], Fraction]:
    """Uniform clique weights ``x = 1 / ((W - 1) |H|)`` on every (event, cell).

    For 4-cycles this choice maximizes ``x (1 - (W - 1) x)**(|H| - 1)``,
    whose maximum is exactly the case-II threshold.
    """
    c = max(instance.event_cells, 1)
    w = max(instance.w_max - 1, 1)
    x = Fraction(1, w * c)
    return {(i, cell): x for cell, members in instance.cliques.items() for i in members}


def clique_lll_bound(
    instance: CspInstance | Mapping[Any, Sequence[int]],
    probs,
    x: Mapping[tuple[int, Any], Number] | Callable | Number | None = None,
) -> BoundReport:
    """Clique LLL over a clique cover of the dependency graph.

    ``instance`` is either a :class:`CspInstance` (one clique per cell) or a
    bare mapping ``clique key -> member events``. ``x`` maps
    ``(event, clique key)`` to a weight in ``(0, 1)``; a scalar or callable
    is accepted too, and ``None`` uses :func:`default_clique_weights`.
    The report carries ``resample_bound`` (expected total MT resamples) and
    ``per_event_resample`` in ``extras``.

    Raises
    ------
    CliqueWeightOverflow
        If the weights inside one clique sum to 1 or more.
    """
    if isinstance(instance, CspInstance):
        n = instance.n_events
        cover = instance.cliques
    else:
        cover = {k: tuple(m) for k, m in instance.items()}
        n = len(probs) if not isinstance(probs, (int, float, Fraction)) else 1 + max(
            (i for m in cover.values() for i in m), default=-1
        )
    probs = _per_event(probs, n)
    if x is None:
        x = default_clique_weights(instance)
    if callable(x):
        weight = x
    elif isinstance(x, Mapping):
        weight = lambda i, v: x[(i, v)]  # noqa: E731
    else:
        weight = lambda i, v: x  # noqa: E731

    cliques = {v: m for v, m in cover.items() if m}
    xs = {(i, v): weight(i, v) for v, m in cliques.items() for i in m}
    for w in xs.values():
        if not 0 < w < 1:
            raise WeightOutOfRange(f"weight {w!r} not in (0, 1)")
    totals = {v: sum(xs[(i, v)] for i in m) for v, m in cliques.items()}
    for v, t in totals.items():
        if t >= 1:
            raise CliqueWeightOverflow(f"clique at cell {v} has total weight {float(t)}")

    event_cliques: dict[int, list] = {i: [] for i in range(n)}
    for v, m in cliques.items():
        for i in m:
            event_cliques[i].append(v)

    satisfied = True
    for i in range(n):
        for v in event_cliques[i]:
            rhs = xs[(i, v)]
            for u in event_cliques[i]:
                if u != v:
                    rhs = rhs * (1 - (totals[u] - xs[(i, u)]))
            if probs[i] > rhs:
                satisfied = False

    per_event = []
    for i in range(n):
        per_event.append(min(xs[(i, v)] / (1 - totals[v]) for v in event_cliques[i]) if event_cliques[i] else 0)
    resample_bound = sum(per_event)
    log_bound = sum(log(1 - float(t)) for t in totals.values())
    exact = None
    if _is_exact(*xs.values()):
        exact = Fraction(1)
        for t in totals.values():
            exact *= 1 - t
    return BoundReport(
        name="clique_lll",
        condition_lhs=float(max(probs, default=0)),
        satisfied=satisfied,
        case_taken="clique" if satisfied else "none",
        log_bound=log_bound,
        exact_bound=exact,
        extras={
            "resample_bound": resample_bound,
            "per_event_resample": per_event,
        },
    )


def independence_polynomial(graph, weights, cap: int = DEFAULT_INDEPENDENCE_CAP) -> Number:
    """Hard-core partition function ``sum_{I independent} prod_{v in I} w_v``.

    Exact (and exact-rational for ``Fraction`` weights) via the vertex
    recursion ``Z(G) = Z(G - v) + w_v Z(G - N[v])``, memoized on the vertex
    subset.

    Raises
    ------
    GraphTooLarge
        If the graph has more than ``cap`` vertices.
    """
    adj = _adjacency(graph)
    n = len(adj)
    if n > cap:
        raise GraphTooLarge(f"{n} vertices exceed the exact-enumeration cap {cap}")
    w = _per_event(weights, n)
    closed = [(1 << v) | sum(1 << u for u in adj[v]) for v in range(n)]
    memo: dict[int, Number] = {0: 1}

    def z(mask: int) -> Number:
        if mask in memo:
            return memo[mask]
        v = (mask & -mask).bit_length() - 1
        val = z(mask & ~(1 << v)) + w[v] * z(mask & ~closed[v])
        memo[mask] = val
        return val

    return z((1 << n) - 1)


def _induced(adj, vertices: Sequence[int]):
    index = {v: k for k, v in enumerate(vertices)}
    return [tuple(index[u] for u in adj[v] if u in index) for v in vertices]


def cluster_expansion_bound(
    instance,
    probs,
    mu_tilde,
    mu=None,
    cap: int = DEFAULT_INDEPENDENCE_CAP,
) -> BoundReport:
    """Cluster-expansion LLL with independence-polynomial weights.

    Condition: ``mu_tilde(A_i) >= P(A_i) * Z_{N+(A_i)}(mu)`` for all ``i``.
    Bound: ``Pr(no bad event) >= prod_j (1 - P(A_j))**phi(A_j)`` with
    ``phi(A_j) = Z_{N(A_j)}(mu)`` over the open neighbourhood. ``mu``
    defaults to ``mu_tilde``.
    """
    adj = _adjacency(instance)
    n = len(adj)
    probs = _per_event(probs, n)
    mu_tilde = _per_event(mu_tilde, n)
    mu = mu_tilde if mu is None else _per_event(mu, n)

    satisfied = True
    log_bound = 0.0
    closed_z, open_z = [], []
    for i in range(n):
        nplus = sorted((i,) + tuple(adj[i]))
        zc = independence_polynomial(_induced(adj, nplus), [mu[v] for v in nplus], cap)
        nopen = sorted(adj[i])
        zo = independence_polynomial(_induced(adj, nopen), [mu[v] for v in nopen], cap)
        closed_z.append(zc)
        open_z.append(zo)
        if mu_tilde[i] < probs[i] * zc:
            satisfied = False
        log_bound += float(zo) * _safe_log(1 - float(probs[i]))
    return BoundReport(
        name="cluster_expansion_lll",
        condition_lhs=float(max(probs, default=0)),
        satisfied=satisfied,
        case_taken="CE" if satisfied else "none",
        log_bound=log_bound,
        extras={
            "closed_polynomials": [float(v) for v in closed_z],
            "phi": [float(v) for v in open_z],
        },
    )


# ---------------------------------------------------------------------------
# counting bounds


def _threshold_I(delta: int) -> Fraction:
    if delta < 1:
        return Fraction(1)
    return Fraction((delta - 1) ** (delta - 1), delta**delta)


def _threshold_II(event_cells: int, w: int) -> Fraction | float:
    if w <= 1:
        return inf
    c = event_cells
    return Fraction((c - 1) ** (c - 1), (w - 1) * c**c)


def count_lower_bound(
    params: CodeParams,
    instance: CspInstance,
    exponent_caseI: int,
    exponent_caseII: int,
) -> BoundReport:
    """Lower bound on the number of feasible ``(P, L)`` assignments.

    If ``max P(A) <= max(I, II)`` the count is at least
    ``(1 / (p_max q_max))**(gamma kappa)`` times ``(1 - 2/delta)**e_I`` when
    ``I > II`` and ``(1 - W / (|H| (W - 1)))**e_II`` otherwise. A penalty
    base at or below zero makes the bound vacuous; it is then reported as
    ``log_bound = -inf`` (a count of at least zero).

    An unsatisfied condition is not an exception here: the report comes
    back with ``satisfied=False`` and no bound. Use
    :meth:`BoundReport.require` to turn that into ``ConditionUnsatisfied``.
    """
    probs = event_probabilities(params, instance)
    lhs = max(probs, default=Fraction(0))
    t1 = _threshold_I(instance.delta)
    t2 = _threshold_II(instance.event_cells, instance.w_max)
    report = BoundReport(
        name="count_lower_bound",
        condition_lhs=float(lhs),
        threshold_I=float(t1),
        threshold_II=float(t2),
        extras={
            "delta": instance.delta,
            "w_max": instance.w_max,
            "event_cells": instance.event_cells,
            "exponent_caseI": exponent_caseI,
            "exponent_caseII": exponent_caseII,
            "condition_lhs_exact": lhs,
        },
    )
    if lhs > max(t1, t2):
        return report

    report.satisfied = True
    if t1 > t2:
        report.case_taken = "I"
        penalty = 1 - Fraction(2, instance.delta)
        exponent = exponent_caseI
    else:
        report.case_taken = "II"
        w = instance.w_max
        # W = 1 sends the penalty base to -inf (vacuous bound)
        penalty = 1 - Fraction(w, instance.event_cells * (w - 1)) if w > 1 else Fraction(-1)
        exponent = exponent_caseII
    base = 1 / (params.p_max * params.q_max)
    n = params.n_cells
    report.extras["penalty"] = penalty
    if penalty <= 0:
        report.extras["vacuous"] = True
        report.log_bound = -inf
        report.exact_bound = Fraction(0)
        return report
    report.extras["vacuous"] = False
    report.log_bound = n * log(base) + exponent * log(penalty)
    if n <= EXACT_CELL_LIMIT:
        report.exact_bound = base**n * penalty**exponent
    return report


def corollary1_bound(params: CodeParams, instance: CspInstance) -> BoundReport:
    """:func:`count_lower_bound` with the 4-cycle exponent presets.

    Case I uses the number of 4-cycle candidates ``C(gamma,2) C(kappa,2)``,
    case II the number of edge variables ``gamma kappa``.
    """
    g, k = params.gamma, params.kappa
    report = count_lower_bound(params, instance, comb(g, 2) * comb(k, 2), g * k)
    report.name = "corollary1"
    return report


def noneq_count_lower_bound(report: BoundReport, gamma: int, kappa: int) -> BoundReport:
    """Divide a count bound by ``gamma! kappa!`` (non-equivalent designs)."""
    divisor = factorial(gamma) * factorial(kappa)
    out = BoundReport(
        name=f"{report.name}_noneq",
        condition_lhs=report.condition_lhs,
        threshold_I=report.threshold_I,
        threshold_II=report.threshold_II,
        satisfied=report.satisfied,
        case_taken=report.case_taken,
        extras=dict(report.extras, divisor=divisor),
    )
    if report.satisfied and report.log_bound is not None:
        out.log_bound = report.log_bound - log(divisor)
        if report.exact_bound is not None:
            out.exact_bound = report.exact_bound / divisor
    return out


# ---------------------------------------------------------------------------
# MT output diversity


@dataclass
class MtEntropyBounds:
    """Lower bounds on ``H_alpha`` of the MT output distribution (nats)."""

    h_omega: float
    alpha: float
    lemma3: float | None
    lemma4: float
    lemma5: float
    independence_log: float | None
    mu_sum: float
    product_log: float
    l_values: list[float]


def _default_mu(instance: CspInstance) -> float:
    d = instance.delta - 1
    return 1.0 / d if d > 0 else inf


def mt_entropy_lower_bound(
    params: CodeParams,
    instance: CspInstance,
    mu=None,
    alpha: float = inf,
    cap: int = DEFAULT_INDEPENDENCE_CAP,
) -> MtEntropyBounds:
    """Three lower bounds on the MT output entropy.

    * ``lemma3``: ``H_alpha(Omega) - a * ln Z_Ind(mu)`` with the exact
      independence polynomial (``None`` if the graph exceeds ``cap``).
    * ``lemma4``: ``H_alpha(Omega) - a * sum mu``.
    * ``lemma5``: ``H_alpha(Omega) - a * sum_cells ln(1 + sum_{A at cell} l(A))``
      with ``l(A) = (1 + mu(A))**(1/|var(A)|) - 1``.

    ``a = alpha / (alpha - 1)``; ``mu`` defaults to ``1/(delta - 1)``
    and ``|var(A)|`` is ``instance.event_size``.
    """
    n = instance.n_events
    mu = _per_event(_default_mu(instance) if mu is None else mu, n)
    a = alpha_factor(alpha)
    h = h_alpha_product(params, alpha)

    mu_sum = float(sum(float(v) for v in mu))
    lemma4 = h - a * mu_sum

    size = max(instance.event_size, 1)
    l_values = [(1 + float(v)) ** (1 / size) - 1 for v in mu]
    product_log = 0.0
    for members in instance.cliques.values():
        product_log += math.log1p(sum(l_values[i] for i in members))
    lemma5 = h - a * product_log

    lemma3 = ind_log = None
    if n <= cap and all(math.isfinite(float(v)) for v in mu):
        ind_log = log(float(independence_polynomial(instance, mu, cap)))
        lemma3 = h - a * ind_log
    elif n <= cap:
        lemma3 = -inf
    return MtEntropyBounds(h, alpha, lemma3, lemma4, lemma5, ind_log, mu_sum, product_log, l_values)


@dataclass
class SupportBounds:
    """Lower bounds on the number of distinct MT outputs (log domain)."""

    eq19: BoundReport
    eq20: BoundReport
    eq19_noneq: BoundReport
    eq20_noneq: BoundReport

    def to_dict(self) -> dict:
        return {k: getattr(self, k).to_dict() for k in ("eq19", "eq20", "eq19_noneq", "eq20_noneq")}


def mt_support_lower_bound(
    params: CodeParams,
    instance: CspInstance,
    alpha: float = inf,
) -> SupportBounds:
    """Support-size bounds for the MT output distribution.

    ``eq19`` subtracts ``sum mu`` from ``H_alpha(Omega)``, ``eq20`` the
    per-variable product term, both with ``mu = 1/(delta - 1)``. For the
    4-cycle family at ``alpha = inf`` these are
    ``gamma kappa ln X - C(gamma,2) C(kappa,2) / (4 gamma kappa - 6 gamma - 6 kappa + 8)``
    and ``gamma kappa [ln X - ln(1 + (gamma-1)(kappa-1) l(A))]``. The gate is
    ``max P(A) <= delta**delta / (delta + 1)**(delta + 1)``.
    """
    probs = event_probabilities(params, instance)
    lhs = max(probs, default=Fraction(0))
    d = instance.delta
    threshold = Fraction(d**d, (d + 1) ** (d + 1))
    satisfied = lhs <= threshold
    ent = mt_entropy_lower_bound(params, instance, alpha=alpha)
    divisor = factorial(params.gamma) * factorial(params.kappa)

    def make(name, value, noneq):
        extras = {"h_omega": ent.h_omega, "alpha": alpha, "mu_sum": ent.mu_sum, "product_log": ent.product_log}
        if noneq:
            extras["divisor"] = divisor
        lb = None
        if satisfied:
            lb = value - (log(divisor) if noneq else 0.0)
        return BoundReport(
            name=name,
            condition_lhs=float(lhs),
            threshold_I=float(threshold),
            satisfied=satisfied,
            case_taken="C3" if satisfied else "none",
            log_bound=lb,
            extras=extras,
        )

    return SupportBounds(
        eq19=make("corollary3_eq19", ent.lemma4, False),
        eq20=make("corollary3_eq20", ent.lemma5, False),
        eq19_noneq=make("corollary4_eq19_noneq", ent.lemma4, True),
        eq20_noneq=make("corollary5_eq20_noneq", ent.lemma5, True),
    )


def penalty_terms(gamma: int, kappa: int) -> dict[str, float]:
    """Closed-form 4-cycle penalty quantities for the two support bounds.

    ``D = 4 gamma kappa - 6 gamma - 6 kappa + 8``, ``l = (1 + 1/D)**(1/8) - 1``,
    ``u = (gamma - 1)(kappa - 1) l`` and ``E = C(gamma,2) C(kappa,2) / D``.
    """
    D = 4 * gamma * kappa - 6 * gamma - 6 * kappa + 8
    n = gamma * kappa
    if D <= 0:
        return {"D": D, "l": inf, "u": inf, "E": inf, "exp_E": inf, "one_plus_u_pow": inf,
                "inv_one_plus_u_pow": 0.0, "exp_minus_E": 0.0}
    l = (1 + 1 / D) ** (1 / 8) - 1
    u = (gamma - 1) * (kappa - 1) * l
    E = comb(gamma, 2) * comb(kappa, 2) / D
    return {
        "D": D,
        "l": l,
        "u": u,
        "E": E,
        "exp_E": math.exp(E),
        "one_plus_u_pow": (1 + u) ** n,
        "inv_one_plus_u_pow": (1 / (1 + u)) ** n,
        "exp_minus_E": math.exp(-E),
    }


def bound_comparison_check(gamma: int, kappa: int) -> dict[str, Any]:
    """Check that the product-form support bound beats the sum form.

    ``margin = E - gamma kappa ln(1 + u)`` is the log-ratio of the two
    bounds; it is positive exactly when ``(1 + u)**(gamma kappa) < exp(E)``.
    Guaranteed for ``gamma, kappa > 3``; evaluated without guarantee
    elsewhere.
    """
    t = penalty_terms(gamma, kappa)
    if not math.isfinite(t["E"]):
        return {"eq20_exceeds_eq19": False, "margin": float("nan"), "guaranteed": False}
    margin = t["E"] - gamma * kappa * math.log1p(t["u"])
    return {
        "eq20_exceeds_eq19": margin > 0,
        "margin": margin,
        "guaranteed": gamma > 3 and kappa > 3,
    }

