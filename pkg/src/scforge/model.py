"""QC-SC-LDPC code model: parameters, assignments, coupling and lifting.

A design is fixed by ``(gamma, kappa, m, Z, L)`` plus a partition matrix
``P`` (edge spreading, entries in ``0..m``) and a lifting matrix over
``Z_Z``. The base matrix is always the all-one ``gamma x kappa`` matrix.

Circulant convention: ``sigma`` has a 1 at ``(r, (r + 1) mod Z)``, so
``sigma**x`` has its ones at ``(r, (r + x) mod Z)``. Only labels depend on
this choice; cycle structure does not.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Any, Mapping, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    NonStochasticDistribution,
    UnsupportedFormat,
    ZeroAlphabet,
)

__all__ = [
    "CodeParams",
    "Assignment",
    "BinaryMatrix",
    "validate_params",
    "build_coupled_protograph",
    "lift_to_parity_check",
    "export_matrix",
    "import_matrix",
    "DEFAULT_COUPLING_LEN",
]

DEFAULT_COUPLING_LEN = 10
STOCHASTIC_TOL = 1e-12


def _as_fraction(value: Any) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(float(value))


@dataclass(frozen=True)
class CodeParams:
    """Design-space parameters.

    Probabilities are held as exact ``Fraction`` values so the rational
    verification paths can use them directly; ``spread_probs`` and
    ``lift_probs`` give float views.
    """

    gamma: int
    kappa: int
    memory: int
    lift: int
    coupling_len: int = DEFAULT_COUPLING_LEN
    spread_dist: tuple[Fraction, ...] = ()
    lift_dist: tuple[Fraction, ...] = ()

    @cached_property
    def spread_probs(self) -> np.ndarray:
        return np.array([float(v) for v in self.spread_dist])

    @cached_property
    def lift_probs(self) -> np.ndarray:
        return np.array([float(v) for v in self.lift_dist])

    @property
    def p_max(self) -> Fraction:
        return max(self.spread_dist)

    @property
    def q_max(self) -> Fraction:
        return max(self.lift_dist)

    @property
    def alphabet_size(self) -> int:
        """Number of values ``(m + 1) * Z`` a single edge variable can take."""
        return (self.memory + 1) * self.lift

    @property
    def n_cells(self) -> int:
        return self.gamma * self.kappa

    @property
    def is_uniform(self) -> bool:
        return (
            all(v == Fraction(1, self.memory + 1) for v in self.spread_dist)
            and all(v == Fraction(1, self.lift) for v in self.lift_dist)
        )

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "kappa": self.kappa,
            "memory": self.memory,
            "lift": self.lift,
            "coupling_len": self.coupling_len,
            "spread_dist": [str(v) for v in self.spread_dist],
            "lift_dist": [str(v) for v in self.lift_dist],
        }


_ALIASES = {
    "m": "memory",
    "Z": "lift",
    "L": "coupling_len",
    "p": "spread_dist",
    "q": "lift_dist",
}


def validate_params(raw: Mapping[str, Any] | None = None, **kwargs) -> CodeParams:
    """Build a validated :class:`CodeParams` from a loose parameter record.

    Accepts either the field names of :class:`CodeParams` or the short
    aliases ``m``, ``Z``, ``L``, ``p`` and ``q``. Missing distributions
    default to uniform.

    Raises
    ------
    ZeroAlphabet
        If ``Z < 1`` or ``m < 0``.
    DimensionMismatch
        If a distribution has the wrong length or a dimension is
        non-positive.
    NonStochasticDistribution
        If a distribution has a negative entry or does not sum to one
        within ``1e-12``.
    """
    record = dict(raw or {})
    record.update(kwargs)
    record = {_ALIASES.get(k, k): v for k, v in record.items()}

    try:
        gamma = int(record["gamma"])
        kappa = int(record["kappa"])
        memory = int(record["memory"])
        lift = int(record["lift"])
    except KeyError as exc:
        raise DimensionMismatch(f"missing parameter {exc.args[0]!r}") from None
    coupling_len = int(record.get("coupling_len") or DEFAULT_COUPLING_LEN)

    if lift < 1 or memory < 0:
        raise ZeroAlphabet(f"empty alphabet: Z={lift}, m={memory}")
    if gamma < 1 or kappa < 1:
        raise DimensionMismatch(f"base matrix must be non-empty, got {gamma}x{kappa}")
    if coupling_len < 1:
        raise DimensionMismatch(f"coupling length must be >= 1, got {coupling_len}")

    def _dist(values, size, name):
        if values is None:
            return tuple(Fraction(1, size) for _ in range(size))
        vals = tuple(_as_fraction(v) for v in values)
        if len(vals) != size:
            raise DimensionMismatch(f"{name} has length {len(vals)}, expected {size}")
        if any(v < 0 for v in vals):
            raise NonStochasticDistribution(f"{name} has a negative entry")
        total = sum(vals)
        if abs(float(total) - 1.0) > STOCHASTIC_TOL:
            raise NonStochasticDistribution(f"{name} sums to {float(total)!r}")
        return vals

    spread = _dist(record.get("spread_dist"), memory + 1, "spread_dist")
    lift_dist = _dist(record.get("lift_dist"), lift, "lift_dist")
    return CodeParams(gamma, kappa, memory, lift, coupling_len, spread, lift_dist)


def _frozen_int_array(values, shape=None) -> np.ndarray:
    arr = np.array(values, dtype=np.int64)
    if shape is not None:
        arr = arr.reshape(shape)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Assignment:
    """A concrete ``(P, L)`` pair, one entry per base edge."""

    partition: np.ndarray
    lifting: np.ndarray

    def __post_init__(self):
        p = _frozen_int_array(self.partition)
        l = _frozen_int_array(self.lifting)
        if p.ndim != 2 or p.shape != l.shape:
            raise DimensionMismatch(
                f"partition {p.shape} and lifting {l.shape} must be equal 2-D shapes"
            )
        object.__setattr__(self, "partition", p)
        object.__setattr__(self, "lifting", l)

    @property
    def shape(self) -> tuple[int, int]:
        return self.partition.shape

    def validate(self, params: CodeParams) -> "Assignment":
        if self.shape != (params.gamma, params.kappa):
            raise DimensionMismatch(
                f"assignment is {self.shape}, params need {(params.gamma, params.kappa)}"
            )
        if self.partition.min(initial=0) < 0 or self.partition.max(initial=0) > params.memory:
            raise DimensionMismatch("partition entry outside 0..m")
        if self.lifting.min(initial=0) < 0 or self.lifting.max(initial=0) >= params.lift:
            raise DimensionMismatch("lifting entry outside 0..Z-1")
        return self

    def digits(self, lift: int) -> np.ndarray:
        """Row-major composite digits ``P * Z + L`` (one per edge variable)."""
        return (self.partition * lift + self.lifting).ravel()

    @classmethod
    def from_digits(cls, digits: Sequence[int], shape: tuple[int, int], lift: int) -> "Assignment":
        d = np.asarray(digits, dtype=np.int64).reshape(shape)
        return cls(d // lift, d % lift)

    def key(self) -> bytes:
        return self.partition.tobytes() + b"|" + self.lifting.tobytes()

    def __eq__(self, other):
        if not isinstance(other, Assignment):
            return NotImplemented
        return (
            self.shape == other.shape
            and np.array_equal(self.partition, other.partition)
            and np.array_equal(self.lifting, other.lifting)
        )

    def __hash__(self):
        return hash((self.shape, self.key()))

    def __repr__(self):
        return f"Assignment(partition={self.partition.tolist()}, lifting={self.lifting.tolist()})"

    def to_dict(self) -> dict:
        return {"partition": self.partition.tolist(), "lifting": self.lifting.tolist()}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "Assignment":
        return cls(data["partition"], data["lifting"])


@dataclass(frozen=True)
class BinaryMatrix:
    """Sparse binary matrix stored as a set of ``(row, col)`` positions."""

    rows: int
    cols: int
    ones: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        ones = frozenset((int(r), int(c)) for r, c in self.ones)
        for r, c in ones:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise DimensionMismatch(f"position {(r, c)} outside {self.rows}x{self.cols}")
        object.__setattr__(self, "ones", ones)

    @classmethod
    def from_dense(cls, dense) -> "BinaryMatrix":
        arr = np.asarray(dense)
        rs, cs = np.nonzero(arr)
        return cls(arr.shape[0], arr.shape[1], frozenset(zip(rs.tolist(), cs.tolist())))

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for r, c in self.ones:
            out[r, c] = 1
        return out

    def to_sparse(self):
        from scipy import sparse

        if not self.ones:
            return sparse.csr_matrix((self.rows, self.cols), dtype=np.uint8)
        rs, cs = zip(*self.ones)
        data = np.ones(len(rs), dtype=np.uint8)
        return sparse.csr_matrix((data, (rs, cs)), shape=(self.rows, self.cols))

    @property
    def nnz(self) -> int:
        return len(self.ones)

    def sorted_ones(self) -> list[tuple[int, int]]:
        return sorted(self.ones)

    def col_lists(self) -> list[list[int]]:
        out = [[] for _ in range(self.cols)]
        for r, c in sorted(self.ones):
            out[c].append(r)
        return out

    def row_lists(self) -> list[list[int]]:
        out = [[] for _ in range(self.rows)]
        for r, c in sorted(self.ones):
            out[r].append(c)
        return out


def build_coupled_protograph(params: CodeParams, assignment: Assignment) -> BinaryMatrix:
    """Coupled protograph ``H_SC^P`` of a Type-I terminated chain.

    Replica ``r`` occupies column block ``r``; component ``H_l`` sits in row
    block ``r + l``. The result is ``(L + m) * gamma`` by ``L * kappa``.
    """
    assignment.validate(params)
    g, k, L = params.gamma, params.kappa, params.coupling_len
    ones = set()
    P = assignment.partition
    for r in range(L):
        for i in range(g):
            for j in range(k):
                ones.add(((r + int(P[i, j])) * g + i, r * k + j))
    return BinaryMatrix((L + params.memory) * g, L * k, frozenset(ones))


def lift_to_parity_check(
    protograph: BinaryMatrix, params: CodeParams, assignment: Assignment
) -> BinaryMatrix:
    """Replace each protograph 1 of base edge ``(i, j)`` by ``sigma**L[i, j]``."""
    g, k, Z = params.gamma, params.kappa, params.lift
    shifts = assignment.lifting
    ones = set()
    for pr, pc in protograph.ones:
        x = int(shifts[pr % g, pc % k])
        for r in range(Z):
            ones.add((pr * Z + r, pc * Z + (r + x) % Z))
    return BinaryMatrix(protograph.rows * Z, protograph.cols * Z, frozenset(ones))


def _export_alist(matrix: BinaryMatrix) -> str:
    cols = matrix.col_lists()
    rows = matrix.row_lists()
    col_deg = [len(c) for c in cols]
    row_deg = [len(r) for r in rows]
    lines = [
        f"{matrix.cols} {matrix.rows}",
        f"{max(col_deg, default=0)} {max(row_deg, default=0)}",
        " ".join(map(str, col_deg)),
        " ".join(map(str, row_deg)),
    ]
    lines += [" ".join(str(r + 1) for r in c) for c in cols]
    lines += [" ".join(str(c + 1) for c in r) for r in rows]
    return "\n".join(lines) + "\n"


def _import_alist(text: str) -> BinaryMatrix:
    lines = text.split("\n")
    n_cols, n_rows = (int(v) for v in lines[0].split())
    ones = set()
    for c in range(n_cols):
        for tok in lines[4 + c].split():
            idx = int(tok)
            if idx == 0:
                raise UnsupportedFormat("zero-padded alist entries are not accepted")
            ones.add((idx - 1, c))
    row_ones = set()
    for r in range(n_rows):
        for tok in lines[4 + n_cols + r].split():
            row_ones.add((r, int(tok) - 1))
    if row_ones != ones:
        raise UnsupportedFormat("alist column and row lists disagree")
    return BinaryMatrix(n_rows, n_cols, frozenset(ones))


def export_matrix(matrix: BinaryMatrix, format: str = "alist") -> bytes:
    """Serialize a matrix as MacKay alist (1-based, unpadded) or JSON."""
    if format == "alist":
        return _export_alist(matrix).encode()
    if format == "json":
        payload = {
            "rows": matrix.rows,
            "cols": matrix.cols,
            "ones": [list(p) for p in matrix.sorted_ones()],
        }
        return json.dumps(payload).encode()
    raise UnsupportedFormat(f"unknown matrix format {format!r}")


def import_matrix(data: bytes | str, format: str = "alist") -> BinaryMatrix:
    text = data.decode() if isinstance(data, bytes) else data
    if format == "alist":
        return _import_alist(text)
    if format == "json":
        payload = json.loads(text)
        return BinaryMatrix(payload["rows"], payload["cols"], frozenset(map(tuple, payload["ones"])))
    raise UnsupportedFormat(f"unknown matrix format {format!r}")


def component_matrices(params: CodeParams, assignment: Assignment) -> list[np.ndarray]:
    """Dense ``H_0 .. H_m`` (each ``gamma x kappa``) for the given partition."""
    P = assignment.partition
    return [(P == l).astype(np.uint8) for l in range(params.memory + 1)]

