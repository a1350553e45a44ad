from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from scforge import alpha_factor, collision_entropy_estimate, h_alpha_product, renyi_entropy_exact, validate_params
from scforge.errors import InvalidAlpha, NonStochasticDistribution

ALPHAS = [1.5, 2, 4, math.inf]


def test_uniform_any_alpha():
    for n in (1, 2, 7, 64):
        for a in [0.5] + ALPHAS:
            assert renyi_entropy_exact(np.full(n, 1 / n), a) == pytest.approx(math.log(n), abs=1e-12)


def test_two_point():
    assert renyi_entropy_exact([0.5, 0.5], 2) == pytest.approx(math.log(2))
    assert renyi_entropy_exact([0.9, 0.1], math.inf) == pytest.approx(0.10536051565782628)


def test_direct_formula():
    p = np.array([0.5, 0.3, 0.2])
    assert renyi_entropy_exact(p, 3) == pytest.approx(math.log((p**3).sum()) / (1 - 3))


def test_zero_entries_ignored():
    assert renyi_entropy_exact([0.5, 0.0, 0.5], 2) == pytest.approx(math.log(2))


def test_large_alpha_is_stable():
    v = renyi_entropy_exact([0.6, 0.4], 2000)
    assert math.isfinite(v)
    assert v == pytest.approx(-math.log(0.6) * 2000 / 1999, rel=1e-6)


@pytest.mark.parametrize("a", [1, 0, -2])
def test_invalid_alpha(a):
    with pytest.raises(InvalidAlpha):
        renyi_entropy_exact([0.5, 0.5], a)
    with pytest.raises(InvalidAlpha):
        alpha_factor(a)


def test_non_stochastic():
    with pytest.raises(NonStochasticDistribution):
        renyi_entropy_exact([0.5, 0.4], 2)


def test_alpha_factor():
    assert alpha_factor(2) == 2 and alpha_factor(math.inf) == 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.0, 1.0), min_size=1, max_size=64).filter(lambda v: sum(v) > 0))
def test_monotone_and_ceiling(weights):
    p = np.asarray(weights) / sum(weights)
    support = int((p > 0).sum())
    vals = [renyi_entropy_exact(p, a) for a in ALPHAS]
    for a, b in zip(vals, vals[1:]):
        assert b <= a + 1e-12
    assert vals[0] <= math.log(support) + 1e-12


class TestProduct:
    def test_uniform(self):
        params = validate_params(gamma=3, kappa=5, m=1, Z=21)
        for a in ALPHAS:
            assert h_alpha_product(params, a) == pytest.approx(15 * math.log(42))

    def test_trivial(self):
        assert h_alpha_product(validate_params(gamma=1, kappa=1, m=0, Z=1), 2) == 0

    def test_two_cells(self):
        params = validate_params(gamma=1, kappa=2, m=1, Z=1, p=(0.5, 0.5))
        assert h_alpha_product(params, 2) == pytest.approx(2 * math.log(2))


class TestCollision:
    def test_two_point_calibration(self):
        rng = np.random.default_rng(1)
        p = 0.3
        samples = (rng.random(10_000) < p).astype(int).tolist()
        est, se = collision_entropy_estimate(samples)
        truth = -math.log(p * p + (1 - p) ** 2)
        assert abs(est - truth) <= 3 * se

    def test_uniform_two_point_has_positive_stderr(self):
        est, se = collision_entropy_estimate([0, 1] * 50)
        assert se > 0

    def test_no_collision(self):
        est, se = collision_entropy_estimate(range(10))
        assert est == math.inf

    def test_constant(self):
        est, se = collision_entropy_estimate([7] * 20)
        assert est == 0 and se == 0

    def test_needs_two(self):
        with pytest.raises(ValueError):
            collision_entropy_estimate([1])

    def test_stderr_matches_simulation(self):
        rng = np.random.default_rng(2)
        p = np.array([0.4, 0.3, 0.2, 0.1])
        ests, ses = [], []
        for _ in range(300):
            s = rng.choice(4, size=400, p=p).tolist()
            e, se = collision_entropy_estimate(s)
            ests.append(e)
            ses.append(se)
        assert np.std(ests) == pytest.approx(np.mean(ses), rel=0.2)
