"""Tests for the Welch t-test and lift helpers."""

import numpy as np
import pytest
from scipy import stats

from twlab.errors import DegenerateVariance, DomainError
from twlab.stats import lift, welch_t_test


class TestWelch:
    def test_known_values(self):
        res = welch_t_test([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
        assert res.t == pytest.approx(-1.0)
        assert res.dof == pytest.approx(8.0)
        assert res.p == pytest.approx(0.3466, abs=1e-4)

    def test_matches_scipy(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            a = rng.normal(0.0, rng.uniform(0.5, 3.0), rng.integers(2, 30))
            b = rng.normal(0.5, rng.uniform(0.5, 3.0), rng.integers(2, 30))
            want = stats.ttest_ind(a, b, equal_var=False)
            res = welch_t_test(a, b)
            assert res.t == pytest.approx(want.statistic, rel=1e-10)
            assert res.p == pytest.approx(want.pvalue, rel=1e-8)

    def test_far_apart(self):
        assert welch_t_test([1, 1.001], [100, 100.1]).p < 0.01

    def test_identical_samples(self):
        res = welch_t_test([1.0, 2.0, 4.0], [1.0, 2.0, 4.0])
        assert res.t == 0.0
        assert res.p == pytest.approx(1.0)

    def test_p_shrinks_with_gap(self):
        base = np.array([0.0, 1.0, 2.0, 3.0])
        ps = [welch_t_test(base + gap, base).p for gap in (0.5, 1.0, 2.0, 4.0)]
        assert all(x > y for x, y in zip(ps, ps[1:]))

    def test_one_sample_constant(self):
        res = welch_t_test([3.0, 3.0, 3.0], [1.0, 2.0, 3.0])
        assert 0 < res.p < 1

    def test_both_constant(self):
        with pytest.raises(DegenerateVariance):
            welch_t_test([1.0, 1.0], [2.0, 2.0])

    def test_too_small(self):
        with pytest.raises(DomainError):
            welch_t_test([1.0], [1.0, 2.0])


class TestLift:
    def test_percent(self):
        assert lift([110, 110], [100, 100]) == pytest.approx(10.0)
        assert lift([90], [100]) == pytest.approx(-10.0)

    def test_zero_baseline(self):
        with pytest.raises(DomainError):
            lift([1.0], [0.0, 0.0])
