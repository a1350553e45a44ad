"""Rényi entropies (natural log) and the collision-entropy plug-in estimator."""

from __future__ import annotations

import math
from collections import Counter
from typing import Hashable, Iterable

import numpy as np

from .errors import InvalidAlpha, NonStochasticDistribution
from .model import CodeParams

__all__ = [
    "renyi_entropy_exact",
    "h_alpha_product",
    "alpha_factor",
    "collision_entropy_estimate",
]


def _check_alpha(alpha: float) -> None:
    if not alpha > 0 or alpha == 1:
        raise InvalidAlpha(f"alpha must be > 0 and != 1, got {alpha!r}")


def alpha_factor(alpha: float) -> float:
    """``alpha / (alpha - 1)``, which tends to 1 as alpha grows."""
    _check_alpha(alpha)
    if math.isinf(alpha):
        return 1.0
    return alpha / (alpha - 1.0)


def renyi_entropy_exact(dist, alpha: float) -> float:
    """Rényi entropy ``ln(sum p**alpha) / (1 - alpha)`` in nats.

    ``alpha = inf`` gives the min-entropy ``-ln max p``. Zero-probability
    outcomes are ignored.

    Examples
    --------
    >>> round(renyi_entropy_exact([0.5, 0.5], 2), 12) == round(math.log(2), 12)
    True
    """
    _check_alpha(alpha)
    p = np.asarray(dist, dtype=float)
    if p.ndim != 1 or np.any(p < 0) or abs(p.sum() - 1.0) > 1e-9:
        raise NonStochasticDistribution("not a probability vector")
    p = p[p > 0]
    if math.isinf(alpha):
        return float(-np.log(p.max()))
    # factor out max p for stability at large alpha
    pmax = p.max()
    s = np.sum((p / pmax) ** alpha)
    return float((alpha * np.log(pmax) + np.log(s)) / (1.0 - alpha))


def h_alpha_product(params: CodeParams, alpha: float) -> float:
    """Rényi entropy of the product assignment space ``Omega``.

    Every edge variable is an independent ``(P, L)`` draw, so the entropy
    is ``gamma * kappa`` times the sum of the two marginal entropies.
    """
    n = params.n_cells
    return n * (
        renyi_entropy_exact(params.spread_probs, alpha)
        + renyi_entropy_exact(params.lift_probs, alpha)
    )


def collision_entropy_estimate(samples: Iterable[Hashable]) -> tuple[float, float]:
    """Estimate ``H_2 = -ln sum p**2`` from i.i.d. samples.

    Uses the unbiased collision-probability estimator over unordered pairs,
    ``sum n_x (n_x - 1) / (n (n - 1))``. The returned standard error comes
    from the delta method on the exact U-statistic variance
    ``(4 (n - 2) z1 + 2 z2) / (n (n - 1))`` with ``z1 = sum p**3 - (sum p**2)**2``
    and ``z2 = sum p**2 - (sum p**2)**2``, using plug-in frequencies.

    Returns
    -------
    (estimate, stderr) : tuple of float
        ``estimate`` is ``inf`` if no collision was observed.
    """
    counts = np.array(list(Counter(samples).values()), dtype=float)
    n = counts.sum()
    if n < 2:
        raise ValueError("need at least two samples")
    coll = float(np.sum(counts * (counts - 1)) / (n * (n - 1)))
    if coll == 0.0:
        return math.inf, math.inf
    freq = counts / n
    p2 = float(np.sum(freq**2))
    p3 = float(np.sum(freq**3))
    z1 = max(p3 - p2 * p2, 0.0)
    z2 = max(p2 - p2 * p2, 0.0)
    var = (4.0 * (n - 2) * z1 + 2.0 * z2) / (n * (n - 1))
    return -math.log(coll), math.sqrt(var) / coll
