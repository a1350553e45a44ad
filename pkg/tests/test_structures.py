from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scforge import (
    Assignment,
    BinaryMatrix,
    CycleCandidate,
    build_coupled_protograph,
    check_absorbing_set,
    count_active_structures,
    cycle_active,
    enumerate_cycle_candidates,
    girth,
    lift_to_parity_check,
    validate_params,
)
from scforge.errors import CandidateExplosion, EmptySet

from conftest import four_cycle_active


class TestEnumeration:
    @pytest.mark.parametrize("g,k,n", [(2, 2, 1), (3, 5, 30), (2, 3, 3)])
    def test_examples(self, g, k, n):
        assert len(enumerate_cycle_candidates(g, k, 2)) == n

    def test_g2_count_grid(self):
        for g in range(2, 9):
            for k in range(2, 9):
                assert len(enumerate_cycle_candidates(g, k, 2)) == math.comb(g, 2) * math.comb(k, 2)

    def test_g2_matches_walk_enumeration(self):
        # canonicalize every closed 4-walk by its cell set; distinct sets = candidates
        for g, k in [(2, 3), (3, 3), (3, 4)]:
            seen = set()
            for i1, i2 in itertools.permutations(range(g), 2):
                for j1, j2 in itertools.permutations(range(k), 2):
                    seen.add(frozenset({(i1, j1), (i1, j2), (i2, j1), (i2, j2)}))
            cells = {c.cells for c in enumerate_cycle_candidates(g, k, 2)}
            assert cells == seen

    @pytest.mark.parametrize("g,k", [(3, 3), (3, 4), (4, 4)])
    def test_simple_six_cycles(self, g, k):
        # 6-cycles of K_{g,k}: choose 3 rows and 3 cols, 3!3!/(2*3) cyclic orders
        cands = enumerate_cycle_candidates(g, k, 3)
        simple = [c for c in cands if c.is_simple]
        assert len(simple) == math.comb(g, 3) * math.comb(k, 3) * 6
        assert len(set(cands)) == len(cands)

    def test_simple_eight_cycles(self):
        cands = enumerate_cycle_candidates(4, 4, 4)
        assert sum(c.is_simple for c in cands) == 72

    def test_small_bases(self):
        assert enumerate_cycle_candidates(1, 5, 2) == []
        with pytest.raises(ValueError):
            enumerate_cycle_candidates(3, 3, 5)

    def test_explosion(self):
        with pytest.raises(CandidateExplosion):
            enumerate_cycle_candidates(3, 5, 2, cap=29)
        with pytest.raises(CandidateExplosion):
            enumerate_cycle_candidates(6, 6, 4, cap=1000)

    def test_consecutive_distinct(self):
        for c in enumerate_cycle_candidates(3, 3, 4):
            g = c.length_param
            assert all(c.rows[t] != c.rows[(t + 1) % g] for t in range(g))
            assert all(c.cols[t] != c.cols[(t + 1) % g] for t in range(g))


class TestActivation:
    cand = CycleCandidate(2, (0, 1), (0, 1))

    def test_unequal_sums(self):
        a = Assignment([[0, 1], [1, 0]], [[0, 0], [0, 0]])
        assert not cycle_active(self.cand, a, 3).protograph_active

    def test_all_zero(self):
        a = Assignment(np.zeros((2, 2), int), np.zeros((2, 2), int))
        act = cycle_active(self.cand, a, 5)
        assert act.protograph_active and act.lifted_active

    def test_lift_breaks_cycle(self):
        a = Assignment(np.zeros((2, 2), int), [[0, 1], [0, 0]])
        act = cycle_active(self.cand, a, 2)
        assert act.protograph_active and not act.lifted_active

    @settings(max_examples=60, deadline=None)
    @given(st.integers(2, 3), st.integers(3, 4), st.integers(0, 3), st.integers(1, 5), st.data())
    def test_rotation_reflection_invariance(self, g, k, m, Z, data):
        P = data.draw(st.lists(st.lists(st.integers(0, m), min_size=k, max_size=k), min_size=g, max_size=g))
        L = data.draw(st.lists(st.lists(st.integers(0, Z - 1), min_size=k, max_size=k), min_size=g, max_size=g))
        a = Assignment(P, L)
        for cand in enumerate_cycle_candidates(g, k, 3):
            base = cycle_active(cand, a, Z)
            assert base.protograph_active or not base.lifted_active
            for rows, cols in cand.representations():
                assert cycle_active(CycleCandidate(3, rows, cols), a, Z) == base


class TestCountActive:
    def test_all_zero(self):
        p = validate_params(gamma=2, kappa=2, m=1, Z=1)
        a = Assignment(np.zeros((2, 2), int), np.zeros((2, 2), int))
        assert count_active_structures(p, a) == {2: 1}

    def test_inactive(self):
        p = validate_params(gamma=2, kappa=2, m=1, Z=1)
        a = Assignment([[0, 1], [1, 0]], np.zeros((2, 2), int))
        assert count_active_structures(p, a) == {2: 0}

    def test_two_by_three(self):
        p = validate_params(gamma=2, kappa=3, m=1, Z=1)
        P = [[0, 0, 0], [0, 1, 0]]
        a = Assignment(P, np.zeros((2, 3), int))
        expected = sum(
            four_cycle_active(P, a.lifting.tolist(), 1, 0, 1, j1, j2)
            for j1, j2 in itertools.combinations(range(3), 2)
        )
        assert expected == 1
        assert count_active_structures(p, a) == {2: expected}


def _lifted(params, a):
    return lift_to_parity_check(build_coupled_protograph(params, a), params, a)


class TestGirth:
    def test_all_one(self):
        assert girth(BinaryMatrix.from_dense(np.ones((2, 2), int))) == 4

    def test_forest(self):
        assert girth(BinaryMatrix.from_dense(np.eye(2, dtype=int))) == math.inf

    def test_six_cycle(self):
        # the incidence matrix of a hexagon: 3 checks, 3 variables, each check on 2 vars
        H = np.array([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
        assert girth(BinaryMatrix.from_dense(H)) == 6

    def test_matches_dense_bfs_on_random(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            H = (rng.random((6, 7)) < 0.35).astype(int)
            assert girth(BinaryMatrix.from_dense(H)) == _girth_reference(H)

    @settings(max_examples=40, deadline=None)
    @given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2), st.integers(1, 5), st.data())
    def test_four_cycles_iff_active(self, g, k, m, Z, data):
        # L = 10 > m, so every protograph-active candidate is realised across replicas
        p = validate_params(gamma=g, kappa=k, m=m, Z=Z)
        P = data.draw(st.lists(st.lists(st.integers(0, m), min_size=k, max_size=k), min_size=g, max_size=g))
        L = data.draw(st.lists(st.lists(st.integers(0, Z - 1), min_size=k, max_size=k), min_size=g, max_size=g))
        a = Assignment(P, L)
        has_four = girth(_lifted(p, a)) == 4
        assert has_four == (count_active_structures(p, a)[2] > 0)


def _girth_reference(H):
    """Shortest cycle via all-pairs BFS on the dense bipartite adjacency, edge by edge."""
    r, c = H.shape
    n = r + c
    A = np.zeros((n, n), int)
    A[:r, r:] = H
    A[r:, :r] = H.T
    best = math.inf
    edges = [(u, v) for u in range(n) for v in range(u + 1, n) if A[u, v]]
    for u, v in edges:
        # shortest u-v path avoiding the edge (u, v), plus the edge
        B = A.copy()
        B[u, v] = B[v, u] = 0
        dist = {u: 0}
        frontier = [u]
        while frontier and v not in dist:
            nxt = []
            for x in frontier:
                for y in np.nonzero(B[x])[0]:
                    if y not in dist:
                        dist[int(y)] = dist[x] + 1
                        nxt.append(int(y))
            frontier = nxt
        if v in dist:
            best = min(best, dist[v] + 1)
    return best


class TestAbsorbing:
    def test_single_vn(self):
        v = check_absorbing_set(BinaryMatrix.from_dense(np.ones((3, 1), int)), [0])
        assert (v.a, v.b, v.is_absorbing) == (1, 3, False)

    def test_two_vns_all_shared(self):
        v = check_absorbing_set(BinaryMatrix.from_dense(np.ones((3, 2), int)), [0, 1])
        assert (v.a, v.b, v.is_absorbing) == (2, 0, True)

    def test_empty(self):
        with pytest.raises(EmptySet):
            check_absorbing_set(BinaryMatrix(2, 2), [])

    def test_out_of_range(self):
        with pytest.raises(IndexError):
            check_absorbing_set(BinaryMatrix(2, 2), [5])

    def test_random_against_definition(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            H = (rng.random((7, 6)) < 0.5).astype(int)
            vs = sorted(rng.choice(6, size=rng.integers(1, 5), replace=False).tolist())
            induced = H[:, vs].sum(axis=1)
            odd = induced % 2 == 1
            expect_abs = all(
                (H[:, v] & ~odd).sum() > (H[:, v] & odd).sum() for v in vs
            )
            verdict = check_absorbing_set(BinaryMatrix.from_dense(H), vs)
            assert verdict.b == int(odd.sum())
            assert verdict.is_absorbing == expect_abs
