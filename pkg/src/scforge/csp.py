"""Constraint-satisfaction view of a structure-avoidance design problem.

Variables are the base cells ``(i, j)``; each carries the composite value
``(P[i, j], L[i, j])``. Every cycle candidate is a bad event over the cells
it touches. Two events depend on each other iff they share a cell, and the
events through one cell form a clique of the dependency graph.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

from .model import CodeParams
from .structures import DEFAULT_CANDIDATE_CAP, CycleCandidate, enumerate_cycle_candidates

__all__ = ["CspInstance", "build_csp_instance", "load_candidates"]

Cell = tuple[int, int]


@dataclass(frozen=True)
class CspInstance:
    """Events, their variable sets and the derived degree statistics.

    ``delta`` follows the closed-neighbourhood convention (an event counts
    itself), which gives ``(2 gamma - 3)(2 kappa - 3)`` for 4-cycles on a
    full base; ``neighbor_degree`` is the ordinary graph degree
    ``delta - 1``. ``event_cells`` is the largest number of composite
    variables in one event and ``event_size`` the largest number of scalar
    coordinates (two per cell), i.e. 4 and 8 for 4-cycles.
    """

    gamma: int
    kappa: int
    events: tuple[CycleCandidate, ...]
    var_of: tuple[frozenset[Cell], ...]
    dependency: tuple[tuple[int, ...], ...]
    cliques: dict[Cell, tuple[int, ...]]
    delta: int
    neighbor_degree: int
    w_max: int
    event_cells: int
    event_size: int

    @property
    def n_events(self) -> int:
        return len(self.events)

    @property
    def cells(self) -> list[Cell]:
        return [(i, j) for i in range(self.gamma) for j in range(self.kappa)]

    def closed_neighborhood(self, i: int) -> tuple[int, ...]:
        return tuple(sorted((i,) + self.dependency[i]))

    def edges(self) -> list[tuple[int, int]]:
        return [(a, b) for a, nbrs in enumerate(self.dependency) for b in nbrs if a < b]

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "kappa": self.kappa,
            "events": [e.to_dict() for e in self.events],
            "var_of": [sorted(list(c) for c in v) for v in self.var_of],
            "dependency": [list(n) for n in self.dependency],
            "cliques": {f"{i},{j}": list(ev) for (i, j), ev in sorted(self.cliques.items())},
            "delta": self.delta,
            "neighbor_degree": self.neighbor_degree,
            "w_max": self.w_max,
            "event_cells": self.event_cells,
            "event_size": self.event_size,
            "n_events": self.n_events,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def load_candidates(gamma: int, kappa: int, g: int, cap: int = DEFAULT_CANDIDATE_CAP) -> list[CycleCandidate]:
    """Candidate list, memoized on disk under ``$FORGE_CACHE_DIR`` when set."""
    cache_dir = os.environ.get("FORGE_CACHE_DIR")
    if not cache_dir:
        return enumerate_cycle_candidates(gamma, kappa, g, cap)
    path = Path(cache_dir) / f"candidates_{gamma}x{kappa}_g{g}.json"
    if path.exists():
        data = json.loads(path.read_text())
        if len(data) > cap:
            # re-run enumeration to raise the usual error
            return enumerate_cycle_candidates(gamma, kappa, g, cap)
        return [CycleCandidate(g, tuple(d["rows"]), tuple(d["cols"])) for d in data]
    cands = enumerate_cycle_candidates(gamma, kappa, g, cap)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps([c.to_dict() for c in cands]))
    return cands


def build_csp_instance(
    params: CodeParams | tuple[int, int],
    g_set: Iterable[int] = (2,),
    cap: int = DEFAULT_CANDIDATE_CAP,
) -> CspInstance:
    """Build the event/variable incidence and dependency data.

    ``params`` may be a :class:`CodeParams` or a bare ``(gamma, kappa)``
    pair, since the instance depends only on the base dimensions.
    """
    if isinstance(params, CodeParams):
        gamma, kappa = params.gamma, params.kappa
    else:
        gamma, kappa = params

    events: list[CycleCandidate] = []
    for g in sorted(set(g_set)):
        events.extend(load_candidates(gamma, kappa, g, cap))
    events.sort(key=CycleCandidate.sort_key)

    var_of = tuple(e.cells for e in events)
    cliques: dict[Cell, list[int]] = {}
    for idx, cells in enumerate(var_of):
        for cell in sorted(cells):
            cliques.setdefault(cell, []).append(idx)

    neighbors: list[set[int]] = [set() for _ in events]
    for members in cliques.values():
        for a in members:
            neighbors[a].update(members)
    for a, nb in enumerate(neighbors):
        nb.discard(a)
    dependency = tuple(tuple(sorted(nb)) for nb in neighbors)

    neighbor_degree = max((len(nb) for nb in dependency), default=0)
    event_cells = max((len(v) for v in var_of), default=0)
    return CspInstance(
        gamma=gamma,
        kappa=kappa,
        events=tuple(events),
        var_of=var_of,
        dependency=dependency,
        cliques={cell: tuple(m) for cell, m in sorted(cliques.items())},
        delta=neighbor_degree + 1 if events else 0,
        neighbor_degree=neighbor_degree,
        w_max=max((len(m) for m in cliques.values()), default=0),
        event_cells=event_cells,
        event_size=2 * event_cells,
    )
