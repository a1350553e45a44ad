from __future__ import annotations

import csv
import io
import itertools
import json
import math

import numpy as np
import pytest

from scforge import (
    Assignment,
    build_csp_instance,
    check_bounds,
    count_active_structures,
    empirical_support_and_entropy,
    exhaustive_count,
    exhaustive_noneq_count,
    survival_product_check,
    validate_params,
)
from scforge.errors import OrbitTooLarge, SpaceTooLarge

from conftest import brute_counts


def P(g, k, m, Z, **kw):
    return validate_params(gamma=g, kappa=k, m=m, Z=Z, **kw)


def test_hand_case():
    r = exhaustive_noneq_count(P(2, 2, 1, 1))
    assert (r.space_size, r.feasible_count, r.noneq_count) == (16, 10, 3)


def test_hand_case_by_rule():
    # the sole candidate is active iff a + d == b + c
    feasible = sum(a + d != b + c for a, b, c, d in itertools.product((0, 1), repeat=4))
    assert feasible == exhaustive_count(P(2, 2, 1, 1)).feasible_count == 10


def test_always_active():
    r = exhaustive_noneq_count(P(2, 2, 0, 1))
    assert r.feasible_count == 0 and r.noneq_count == 0


def test_two_by_three_dominates_bound():
    r = exhaustive_count(P(2, 3, 1, 4))
    assert r.space_size == 8**6
    assert r.feasible_count >= 9710


@pytest.mark.parametrize(
    "case", [(2, 3, 1, 2), (3, 2, 1, 2), (2, 2, 1, 3), (2, 3, 0, 3), (3, 3, 1, 1), (2, 2, 2, 2), (2, 4, 1, 2)]
)
def test_against_pure_enumeration(case):
    r = exhaustive_noneq_count(P(*case))
    assert (r.feasible_count, r.noneq_count) == brute_counts(*case)


def test_general_family_against_structures():
    params = P(3, 3, 1, 1)
    r = exhaustive_count(params, g_set=(2, 3))
    direct = 0
    for bits in itertools.product((0, 1), repeat=9):
        a = Assignment(np.array(bits).reshape(3, 3), np.zeros((3, 3), int))
        if not any(count_active_structures(params, a, (2, 3)).values()):
            direct += 1
    assert r.feasible_count == direct


def test_parallel_equals_sequential():
    params = P(2, 3, 1, 3)
    a = exhaustive_noneq_count(params, workers=1)
    b = exhaustive_noneq_count(params, workers=3)
    assert (a.feasible_count, a.noneq_count) == (b.feasible_count, b.noneq_count)


def test_orbit_lower_bound():
    for case in [(2, 3, 1, 2), (3, 3, 1, 1), (2, 2, 2, 3)]:
        r = exhaustive_noneq_count(P(*case))
        g, k = case[:2]
        assert r.noneq_count >= math.ceil(r.feasible_count / (math.factorial(g) * math.factorial(k)))
        assert 0 <= r.noneq_count <= r.feasible_count <= r.space_size


def test_caps():
    with pytest.raises(SpaceTooLarge):
        exhaustive_count(P(3, 5, 1, 21))
    with pytest.raises(SpaceTooLarge):
        exhaustive_count(P(2, 3, 1, 4), cap=1000)
    with pytest.raises(OrbitTooLarge):
        exhaustive_noneq_count(P(1, 10, 0, 1))


def test_bound_verdicts_and_serialization():
    params = P(2, 3, 1, 4)
    inst = build_csp_instance(params)
    r = check_bounds(exhaustive_noneq_count(params), params, inst)
    names = [b.name for b in r.bounds_checked]
    assert names[:2] == ["corollary1", "corollary1_noneq"]
    assert "corollary3_eq19" in names and "corollary3_eq20" in names
    assert all(b.holds for b in r.bounds_checked)
    doc = json.loads(r.to_json())
    assert doc["feasible_count"] == r.feasible_count
    rows = list(csv.DictReader(io.StringIO(r.to_csv())))
    assert [row["bound"] for row in rows] == names


def test_unsatisfied_bounds_are_not_checked():
    params = P(2, 3, 1, 2)
    r = check_bounds(exhaustive_noneq_count(params), params, build_csp_instance(params))
    assert r.bounds_checked == []


def test_survival_product():
    seen_dependent = 0
    for g, k in [(2, 2), (2, 3), (3, 2), (2, 4), (4, 2)]:
        inst = build_csp_instance((g, k))
        for m in range(4):
            for Z in range(1, 5):
                params = P(g, k, m, Z)
                if params.alphabet_size ** params.n_cells > 2**22:
                    continue
                out = survival_product_check(params, inst, exhaustive_count(params, instance=inst))
                if out["disjoint"]:
                    assert out["equal"]
                elif 0 < out["product"] < 1:
                    seen_dependent += 1
                    assert not out["equal"]
    assert seen_dependent > 0


class TestEmpirical:
    def test_identical_seeds(self):
        params = P(2, 3, 1, 4)
        rec = empirical_support_and_entropy(params, build_csp_instance(params), 2, seeds=[5, 5])
        assert rec["distinct_outputs_lower_estimate"] == 1
        assert rec["collision_entropy"] == 0

    def test_verdicts(self):
        params = P(2, 3, 1, 4)
        inst = build_csp_instance(params)
        oracle = exhaustive_noneq_count(params)
        rec = empirical_support_and_entropy(params, inst, 2000, oracle=oracle)
        v = rec["verdicts"]
        assert set(v) == {
            "distinct_le_feasible",
            "eq19_le_feasible",
            "eq20_le_feasible",
            "canonical_le_noneq",
            "entropy_le_log_feasible",
        }
        assert all(v.values())

    def test_arguments(self):
        params = P(2, 3, 1, 4)
        inst = build_csp_instance(params)
        with pytest.raises(ValueError):
            empirical_support_and_entropy(params, inst, 1)
        with pytest.raises(ValueError):
            empirical_support_and_entropy(params, inst, 10, alpha=3)
