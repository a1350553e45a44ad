from __future__ import annotations

import itertools
import json
import math

import pytest

from scforge import build_csp_instance, validate_params
from scforge.csp import load_candidates
from scforge.errors import CandidateExplosion


def test_three_by_five():
    inst = build_csp_instance(validate_params(gamma=3, kappa=5, m=1, Z=21))
    assert inst.delta == 21
    assert inst.neighbor_degree == 20
    assert inst.w_max == 8
    assert inst.n_events == 30
    assert inst.event_cells == 4 and inst.event_size == 8


def test_single_event():
    inst = build_csp_instance((2, 2))
    assert inst.n_events == 1
    assert inst.dependency == ((),)
    assert inst.edges() == []


def test_triangle():
    inst = build_csp_instance((2, 3))
    assert inst.n_events == 3
    assert sorted(inst.edges()) == [(0, 1), (0, 2), (1, 2)]


@pytest.mark.parametrize("g,k", [(g, k) for g in range(3, 9) for k in range(3, 9)])
def test_degree_grid(g, k):
    inst = build_csp_instance((g, k))
    assert inst.w_max == (g - 1) * (k - 1)
    assert inst.n_events == math.comb(g, 2) * math.comb(k, 2)
    assert inst.delta == (2 * g - 3) * (2 * k - 3)
    for i, nb in enumerate(inst.dependency):
        assert len(nb) <= inst.delta
        assert i not in nb


def test_dependency_definition_and_cover():
    inst = build_csp_instance((3, 4), g_set=(2, 3))
    covered = set()
    for members in inst.cliques.values():
        covered.update(itertools.combinations(sorted(members), 2))
    for a, b in itertools.combinations(range(inst.n_events), 2):
        shares = bool(inst.var_of[a] & inst.var_of[b])
        assert (b in inst.dependency[a]) == shares
        assert (a in inst.dependency[b]) == shares
        if shares:
            assert (a, b) in covered


def test_event_order_is_pinned():
    inst = build_csp_instance((3, 4), g_set=(3, 2))
    keys = [e.sort_key() for e in inst.events]
    assert keys == sorted(keys)
    assert inst.events[0].length_param == 2


def test_json_dump():
    data = json.loads(build_csp_instance((2, 3)).to_json())
    assert data["n_events"] == 3 and data["delta"] == 3 and data["w_max"] == 2


def test_candidate_cache(tmp_cache):
    first = load_candidates(3, 4, 3)
    assert (tmp_cache / "candidates_3x4_g3.json").exists()
    assert load_candidates(3, 4, 3) == first
    with pytest.raises(CandidateExplosion):
        load_candidates(3, 4, 3, cap=10)


def test_explosion_propagates():
    with pytest.raises(CandidateExplosion):
        build_csp_instance((3, 5), cap=10)
