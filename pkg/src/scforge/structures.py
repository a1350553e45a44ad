"""Harmful-structure candidates in the base matrix and their activation.

A length-``2g`` cycle candidate is a closed alternating walk
``(j_1, i_1, j_2, i_2, ..., j_g, i_g)`` through the all-one base matrix.
It touches the "plus" cells ``(i_k, j_k)`` and the "minus" cells
``(i_k, j_{k+1})`` (indices wrap). It survives edge spreading iff the
partition sums over plus and minus cells agree, and it becomes a Tanner
graph cycle after lifting iff additionally the lifting sums agree mod Z.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from math import comb, inf
from typing import Iterable

import numpy as np

from .errors import CandidateExplosion, EmptySet
from .model import Assignment, BinaryMatrix, CodeParams

__all__ = [
    "CycleCandidate",
    "Activation",
    "AbsorbingSetVerdict",
    "enumerate_cycle_candidates",
    "cycle_active",
    "count_active_structures",
    "girth",
    "check_absorbing_set",
    "DEFAULT_CANDIDATE_CAP",
    "MAX_G",
]

DEFAULT_CANDIDATE_CAP = 10**7
MAX_G = 4


@dataclass(frozen=True, order=True)
class CycleCandidate:
    """A cycle candidate stored in canonical (rotation/reflection-minimal) form."""

    length_param: int
    rows: tuple[int, ...]
    cols: tuple[int, ...]

    @property
    def cells_plus(self) -> tuple[tuple[int, int], ...]:
        return tuple(zip(self.rows, self.cols))

    @property
    def cells_minus(self) -> tuple[tuple[int, int], ...]:
        g = self.length_param
        return tuple((self.rows[k], self.cols[(k + 1) % g]) for k in range(g))

    @property
    def cells(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.cells_plus) | frozenset(self.cells_minus)

    @property
    def is_simple(self) -> bool:
        """False when a row or column repeats non-consecutively along the walk."""
        return len(set(self.rows)) == self.length_param and len(set(self.cols)) == self.length_param

    def sort_key(self) -> tuple:
        return (self.length_param, tuple(sorted(self.rows)), tuple(sorted(self.cols)), self.rows, self.cols)

    def representations(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        """All ``2g`` (rows, cols) encodings of the same closed walk."""
        return _walk_representations(self.rows, self.cols)

    def to_dict(self) -> dict:
        return {
            "g": self.length_param,
            "rows": list(self.rows),
            "cols": list(self.cols),
            "simple": self.is_simple,
        }


def _walk_representations(rows, cols):
    g = len(rows)
    reps = []
    # reflection of the node sequence [c1, r1, ..., cg, rg] re-rooted at c1
    rrows = tuple(reversed(rows))
    rcols = (cols[0],) + tuple(reversed(cols[1:]))
    for rs, cs in ((tuple(rows), tuple(cols)), (rrows, rcols)):
        for s in range(g):
            reps.append((rs[s:] + rs[:s], cs[s:] + cs[:s]))
    return reps


def _canonical(rows, cols) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return min(_walk_representations(rows, cols), key=lambda rc: (rc[1], rc[0]))


def _closed_sequences(n: int, g: int) -> Iterable[tuple[int, ...]]:
    for seq in itertools.product(range(n), repeat=g):
        if all(seq[k] != seq[(k + 1) % g] for k in range(g)):
            yield seq


def _n_closed_sequences(n: int, g: int) -> int:
    # closed walks of length g on the complete graph K_n
    return (n - 1) ** g + (-1) ** g * (n - 1)


def enumerate_cycle_candidates(
    gamma: int, kappa: int, g: int, cap: int = DEFAULT_CANDIDATE_CAP
) -> list[CycleCandidate]:
    """All distinct length-``2g`` cycle candidates of the ``gamma x kappa`` base.

    For ``g = 2`` there are ``C(gamma, 2) * C(kappa, 2)`` of them. For
    ``g >= 3`` walks that revisit a row or column non-consecutively are
    kept and flagged through :attr:`CycleCandidate.is_simple`.

    Raises
    ------
    CandidateExplosion
        If the (estimated) number of candidates exceeds ``cap``.
    """
    if g < 2 or g > MAX_G:
        raise ValueError(f"g must be in 2..{MAX_G}, got {g}")
    if gamma < 2 or kappa < 2:
        return []
    if g == 2:
        count = comb(gamma, 2) * comb(kappa, 2)
        if count > cap:
            raise CandidateExplosion(f"{count} candidates exceed cap {cap}")
        return [
            CycleCandidate(2, (i1, i2), (j1, j2))
            for i1, i2 in itertools.combinations(range(gamma), 2)
            for j1, j2 in itertools.combinations(range(kappa), 2)
        ]

    walks = _n_closed_sequences(gamma, g) * _n_closed_sequences(kappa, g)
    if walks // (2 * g) > cap:
        raise CandidateExplosion(f"~{walks // (2 * g)} candidates exceed cap {cap}")
    row_seqs = list(_closed_sequences(gamma, g))
    col_seqs = list(_closed_sequences(kappa, g))
    found = set()
    for rows in row_seqs:
        for cols in col_seqs:
            found.add(_canonical(rows, cols))
    return sorted(
        (CycleCandidate(g, rows, cols) for rows, cols in found),
        key=CycleCandidate.sort_key,
    )


@dataclass(frozen=True)
class Activation:
    protograph_active: bool
    lifted_active: bool


def cycle_active(candidate: CycleCandidate, assignment: Assignment, Z: int) -> Activation:
    P, L = assignment.partition, assignment.lifting
    plus, minus = candidate.cells_plus, candidate.cells_minus
    proto = sum(int(P[c]) for c in plus) == sum(int(P[c]) for c in minus)
    lifted = proto and (sum(int(L[c]) for c in plus) - sum(int(L[c]) for c in minus)) % Z == 0
    return Activation(proto, lifted)


def count_active_structures(
    params: CodeParams,
    assignment: Assignment,
    g_set: Iterable[int] = (2,),
    cap: int = DEFAULT_CANDIDATE_CAP,
) -> dict[int, int]:
    """Number of lifted-active candidates per ``g``; all zero iff feasible."""
    assignment.validate(params)
    counts = {}
    for g in sorted(set(g_set)):
        cands = enumerate_cycle_candidates(params.gamma, params.kappa, g, cap)
        counts[g] = sum(cycle_active(c, assignment, params.lift).lifted_active for c in cands)
    return counts


def girth(matrix: BinaryMatrix) -> float:
    """Length of the shortest cycle of the Tanner graph, ``inf`` if acyclic.

    BFS from every variable node; a non-tree edge closing at depths ``d_u``
    and ``d_w`` witnesses a closed walk of length ``d_u + d_w + 1`` through
    the root, and the minimum over roots is the girth. Branches deeper than
    half the best cycle found so far are pruned.
    """
    n_var = matrix.cols
    adj: list[list[int]] = [[] for _ in range(matrix.cols + matrix.rows)]
    for r, c in matrix.ones:
        adj[c].append(n_var + r)
        adj[n_var + r].append(c)

    best = inf
    for root in range(n_var):
        if not adj[root]:
            continue
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            du = dist[u]
            if 2 * du + 1 >= best:
                break
            for w in adj[u]:
                if w == parent[u]:
                    continue
                dw = dist.get(w)
                if dw is None:
                    dist[w] = du + 1
                    parent[w] = u
                    queue.append(w)
                else:
                    best = min(best, du + dw + 1)
    return best


@dataclass(frozen=True)
class AbsorbingSetVerdict:
    a: int
    b: int
    is_absorbing: bool


def check_absorbing_set(matrix: BinaryMatrix, vn_set: Iterable[int]) -> AbsorbingSetVerdict:
    """Classify a variable-node set as an ``(a, b)`` absorbing set or not."""
    vns = sorted(set(int(v) for v in vn_set))
    if not vns:
        raise EmptySet("absorbing-set check needs at least one variable node")
    for v in vns:
        if not 0 <= v < matrix.cols:
            raise IndexError(f"variable node {v} outside 0..{matrix.cols - 1}")
    dense = matrix.to_sparse().tocsc()[:, vns]
    induced = np.asarray(dense.sum(axis=1)).ravel()
    odd = induced % 2 == 1
    b = int(odd.sum())
    absorbing = True
    for col in range(len(vns)):
        checks = dense[:, col].nonzero()[0]
        n_odd = int(odd[checks].sum())
        if len(checks) - n_odd <= n_odd:
            absorbing = False
            break
    return AbsorbingSetVerdict(len(vns), b, absorbing)
