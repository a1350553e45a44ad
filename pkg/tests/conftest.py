"""Independent brute-force referees shared by the test modules.

Nothing here calls into the code under test beyond plain data types; each
helper recomputes its quantity from first principles with itertools.
"""

from __future__ import annotations

import itertools
from fractions import Fraction

import numpy as np
import pytest


def brute_activation_fraction(m: int, Z: int) -> Fraction:
    """Fraction of all (m+1)^4 Z^4 uniform 4-cycle draws that are lifted-active.

    Cells are ordered (a, b, c, d) = (i1j1, i1j2, i2j1, i2j2); the 4-cycle
    closes iff a + d == b + c for P and a + d == b + c (mod Z) for L.
    """
    grid = np.indices((m + 1,) * 4 + (Z,) * 4).reshape(8, -1)
    a, b, c, d, la, lb, lc, ld = grid
    active = (a + d == b + c) & ((la + ld - lb - lc) % Z == 0)
    return Fraction(int(active.sum()), grid.shape[1])


def four_cycle_active(P, L, Z: int, i1: int, i2: int, j1: int, j2: int) -> bool:
    if P[i1][j1] + P[i2][j2] != P[i1][j2] + P[i2][j1]:
        return False
    return (L[i1][j1] + L[i2][j2] - L[i1][j2] - L[i2][j1]) % Z == 0


def four_cycle_feasible(P, L, Z: int) -> bool:
    g, k = len(P), len(P[0])
    for i1, i2 in itertools.combinations(range(g), 2):
        for j1, j2 in itertools.combinations(range(k), 2):
            if four_cycle_active(P, L, Z, i1, i2, j1, j2):
                return False
    return True


def all_assignments(gamma: int, kappa: int, m: int, Z: int):
    """Yield every (P, L) as nested tuples."""
    n = gamma * kappa
    for ps in itertools.product(range(m + 1), repeat=n):
        P = [ps[i * kappa : (i + 1) * kappa] for i in range(gamma)]
        for ls in itertools.product(range(Z), repeat=n):
            L = [ls[i * kappa : (i + 1) * kappa] for i in range(gamma)]
            yield P, L


def orbit_key(P, L) -> tuple:
    """Smallest row-major (P, L) serialization over joint row/column permutations."""
    g, k = len(P), len(P[0])
    best = None
    for rp in itertools.permutations(range(g)):
        for cp in itertools.permutations(range(k)):
            ser = tuple(x for i in range(g) for j in range(k) for x in (P[rp[i]][cp[j]], L[rp[i]][cp[j]]))
            if best is None or ser < best:
                best = ser
    return best


def brute_counts(gamma: int, kappa: int, m: int, Z: int) -> tuple[int, int]:
    """(feasible count, orbit count among feasible) by pure enumeration."""
    feasible = 0
    orbits = set()
    for P, L in all_assignments(gamma, kappa, m, Z):
        if four_cycle_feasible(P, L, Z):
            feasible += 1
            orbits.add(orbit_key(P, L))
    return feasible, len(orbits)


def independent_sets(adj):
    n = len(adj)
    for r in range(n + 1):
        for subset in itertools.combinations(range(n), r):
            s = set(subset)
            if all(not (set(adj[v]) & s) for v in subset):
                yield subset


def brute_independence_polynomial(adj, weights):
    total = 0
    for subset in independent_sets(adj):
        term = 1
        for v in subset:
            term *= weights[v]
        total += term
    return total


def random_graph(rng, n: int, p: float):
    adj = [set() for _ in range(n)]
    for u, v in itertools.combinations(range(n), 2):
        if rng.random() < p:
            adj[u].add(v)
            adj[v].add(u)
    return [sorted(a) for a in adj]


@pytest.fixture
def tmp_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("FORGE_CACHE_DIR", str(tmp_path / "cache"))
    return tmp_path / "cache"


# ---------------------------------------------------------------------------
# acceptance reporting: one PASS/FAIL line per criterion

_CRITERIA: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _CRITERIA.setdefault(marker.args[0], []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        verdict = "PASS" if all(_CRITERIA[n]) else "FAIL"
        terminalreporter.write_line(f"criterion {n}: {verdict} ({len(_CRITERIA[n])} checks)")
