"""Canonical forms of ``(P, L)`` under joint row and column permutations.

A row/column permutation of a design permutes both matrices at once;
permuting ``P`` alone would not describe a relabelled code. The canonical
key is the lexicographically smallest row-major serialization of the
``(P, L)`` cell pairs over all ``gamma! kappa!`` joint permutations.
"""

from __future__ import annotations

import hashlib
import itertools
from dataclasses import dataclass
from math import factorial
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, OrbitTooLarge
from .model import Assignment

__all__ = [
    "CanonicalKey",
    "canonical_form",
    "canonical_assignment",
    "are_equivalent",
    "permute",
    "orbit",
    "ORBIT_GUARD",
]

ORBIT_GUARD = 10**6


@dataclass(frozen=True, order=True)
class CanonicalKey:
    shape: tuple[int, int]
    key: bytes

    def hex(self) -> str:
        """Short hex digest for reports."""
        return hashlib.sha256(repr(self.shape).encode() + self.key).hexdigest()[:16]


def permute(assignment: Assignment, row_perm: Sequence[int], col_perm: Sequence[int]) -> Assignment:
    """Apply a joint permutation: row ``i`` goes to ``row_perm[i]``, column ``j`` to ``col_perm[j]``."""
    g, k = assignment.shape
    rp = np.asarray(row_perm)
    cp = np.asarray(col_perm)
    if sorted(rp.tolist()) != list(range(g)) or sorted(cp.tolist()) != list(range(k)):
        raise ValueError("row_perm / col_perm must be permutations of the index ranges")
    P = np.empty_like(assignment.partition)
    L = np.empty_like(assignment.lifting)
    P[np.ix_(rp, cp)] = assignment.partition
    L[np.ix_(rp, cp)] = assignment.lifting
    return Assignment(P, L)


def _check_guard(shape) -> None:
    g, k = shape
    size = factorial(g) * factorial(k)
    if size > ORBIT_GUARD:
        raise OrbitTooLarge(f"{g}!*{k}! = {size} joint permutations exceed {ORBIT_GUARD}")


def _lex_min_row(rows: np.ndarray) -> np.ndarray:
    idx = np.arange(rows.shape[0])
    for col in range(rows.shape[1]):
        vals = rows[idx, col]
        idx = idx[vals == vals.min()]
        if idx.size == 1:
            break
    return rows[idx[0]]


def _min_serialization(assignment: Assignment) -> np.ndarray:
    g, k = assignment.shape
    _check_guard((g, k))
    pairs = np.stack([assignment.partition, assignment.lifting], axis=-1)
    col_perms = np.array(list(itertools.permutations(range(k))), dtype=np.int64)
    best = None
    for rp in itertools.permutations(range(g)):
        block = pairs[list(rp)][:, col_perms]  # (g, n_col_perms, k, 2)
        flat = block.transpose(1, 0, 2, 3).reshape(len(col_perms), -1)
        cand = _lex_min_row(flat)
        if best is None or tuple(cand) < tuple(best):
            best = cand
    return best


def canonical_form(assignment: Assignment) -> CanonicalKey:
    """Orbit key of ``assignment``; equal keys iff jointly permutation-equivalent.

    Raises
    ------
    OrbitTooLarge
        If ``gamma! kappa!`` exceeds ``ORBIT_GUARD``.
    """
    best = _min_serialization(assignment)
    return CanonicalKey(assignment.shape, best.astype(">i8").tobytes())


def canonical_assignment(assignment: Assignment) -> Assignment:
    """The orbit representative whose serialization is the canonical key."""
    g, k = assignment.shape
    pairs = _min_serialization(assignment).reshape(g, k, 2)
    return Assignment(pairs[..., 0], pairs[..., 1])


def are_equivalent(a: Assignment, b: Assignment) -> bool:
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes differ: {a.shape} vs {b.shape}")
    return canonical_form(a) == canonical_form(b)


def orbit(assignment: Assignment) -> set[Assignment]:
    """All distinct images of ``assignment`` under joint permutations."""
    g, k = assignment.shape
    _check_guard((g, k))
    return {
        permute(assignment, rp, cp)
        for rp in itertools.permutations(range(g))
        for cp in itertools.permutations(range(k))
    }
