"""Tests for the Tweedie compound Poisson-gamma distribution."""

import numpy as np
import pytest
from scipy import stats

from twlab.errors import DomainError, InvalidParams
from twlab.fit import ks_statistic
from twlab.tweedie import (CompoundParams, TweedieParams, cdf,
                           compound_moments, histogram, mean_variance,
                           poisson_terms, sample, to_compound)

REFERENCE = TweedieParams(mu=0.2, phi=1.5, p=1.5)


def random_params(n, seed):
    rng = np.random.default_rng(seed)
    return [TweedieParams(float(mu), float(phi), float(p)) for mu, phi, p in
            zip(rng.uniform(0.01, 50.0, n), rng.uniform(0.05, 5.0, n),
                rng.uniform(1.01, 1.99, n))]


class TestParams:
    @pytest.mark.parametrize("mu,phi,p", [(0.0, 1.0, 1.5), (1.0, 0.0, 1.5),
                                          (1.0, 1.0, 1.0), (1.0, 1.0, 2.0),
                                          (-1.0, 1.0, 1.5),
                                          (float('nan'), 1.0, 1.5)])
    def test_invalid(self, mu, phi, p):
        with pytest.raises(InvalidParams):
            TweedieParams(mu, phi, p)

    def test_invalid_compound(self):
        with pytest.raises(InvalidParams):
            CompoundParams(0.0, 1.0, 1.0)


class TestCompound:
    def test_reference_values(self):
        comp = to_compound(REFERENCE)
        assert comp.lam == pytest.approx(0.5962848, abs=1e-6)
        assert comp.alpha == pytest.approx(1.0)
        assert comp.scale == pytest.approx(0.3354102, abs=1e-6)

    def test_unit_values(self):
        comp = to_compound(TweedieParams(1.0, 1.0, 1.5))
        assert (comp.lam, comp.alpha, comp.scale) == pytest.approx(
            (2.0, 1.0, 0.5))

    def test_moments_round_trip(self):
        """The compound law reproduces mu and phi * mu**p."""
        for params in random_params(1000, 7):
            mean, var = compound_moments(to_compound(params))
            want_mean, want_var = mean_variance(params)
            assert mean == pytest.approx(want_mean, rel=1e-12)
            assert var == pytest.approx(want_var, rel=1e-12)

    def test_mean_variance(self):
        mean, var = mean_variance(REFERENCE)
        assert mean == 0.2
        assert var == pytest.approx(1.5 * 0.2 ** 1.5)


class TestSample:
    def test_deterministic(self):
        np.testing.assert_array_equal(sample(REFERENCE, 1000, 3),
                                      sample(REFERENCE, 1000, 3))
        assert not np.array_equal(sample(REFERENCE, 1000, 3),
                                  sample(REFERENCE, 1000, 4))

    def test_accepts_generator(self):
        rng = np.random.default_rng(0)
        assert sample(REFERENCE, 10, rng).shape == (10,)

    def test_nonnegative_with_exact_zeros(self):
        draws = sample(REFERENCE, 10000, 0)
        assert np.all(draws >= 0)
        assert np.any(draws == 0)

    def test_zero_fraction(self):
        n = 200000
        draws = sample(REFERENCE, n, 11)
        expected = np.exp(-to_compound(REFERENCE).lam)
        tolerance = 3 * np.sqrt(expected * (1 - expected) / n)
        assert abs(np.mean(draws == 0) - expected) < tolerance
        assert expected == pytest.approx(np.exp(-0.2 ** 0.5 / 0.75))
        assert expected == pytest.approx(0.55080, abs=1e-4)

    def test_moments(self):
        draws = sample(REFERENCE, 1000000, 5)
        mean, var = mean_variance(REFERENCE)
        assert draws.mean() == pytest.approx(mean, rel=0.01)
        assert draws.var() == pytest.approx(var, rel=0.03)

    def test_large_rate_has_no_zeros(self):
        draws = sample(TweedieParams(50.0, 0.1, 1.5), 1000, 0)
        assert np.all(draws > 0)

    def test_bad_size(self):
        with pytest.raises(InvalidParams):
            sample(REFERENCE, 0, 0)

    def test_histogram(self):
        zero, edges, counts = histogram(REFERENCE, 50000, 20, 0)
        assert len(edges) == 21
        assert counts.sum() == round(50000 * (1 - zero))
        assert 0.54 < zero < 0.56


class TestCdf:
    def test_atom_at_zero(self):
        assert cdf(REFERENCE, 0.0) == pytest.approx(0.55080, abs=1e-4)

    def test_saturates(self):
        scale = to_compound(REFERENCE).scale
        assert cdf(REFERENCE, 1e6 * scale) >= 1 - 1e-9

    def test_monotone(self):
        xs = np.linspace(0.0, 10.0, 2001)
        values = cdf(REFERENCE, xs)
        assert values.shape == xs.shape
        assert np.all(np.diff(values) >= -1e-15)
        assert np.all((values >= 0) & (values <= 1))

    def test_scalar_in_scalar_out(self):
        assert isinstance(cdf(REFERENCE, 0.5), float)

    def test_negative_x(self):
        with pytest.raises(DomainError):
            cdf(REFERENCE, -0.1)
        with pytest.raises(DomainError):
            cdf(REFERENCE, np.array([0.1, -1.0]))

    def test_series_truncation(self):
        """The truncated series matches a long explicit sum."""
        params = TweedieParams(1.0, 0.5, 1.3)
        comp = to_compound(params)
        xs = np.array([0.1, 0.5, 1.0, 2.0, 4.0])
        counts = np.arange(1, 200)
        weights = stats.poisson.pmf(counts, comp.lam)
        reference = np.exp(-comp.lam) + np.array([
            np.dot(weights, stats.gamma.cdf(x, counts * comp.alpha,
                                            scale=comp.scale)) for x in xs])
        np.testing.assert_allclose(cdf(params, xs), reference, atol=1e-10)

    def test_poisson_terms_tail(self):
        counts, weights = poisson_terms(3.0)
        assert counts[0] == 1
        tail = 1 - np.exp(-3.0) - weights.sum()
        assert tail < 1e-11

    @pytest.mark.parametrize("params", [
        TweedieParams(0.2, 1.5, 1.5), TweedieParams(1.0, 1.0, 1.2),
        TweedieParams(0.5, 2.0, 1.8), TweedieParams(3.0, 0.5, 1.4),
        TweedieParams(0.05, 0.7, 1.6)])
    def test_matches_own_samples(self, params):
        draws = sample(params, 100000, 1)
        assert ks_statistic(draws, params) < 0.01

    @pytest.mark.slow
    @pytest.mark.parametrize("params", [
        TweedieParams(0.2, 1.5, 1.5), TweedieParams(1.0, 1.0, 1.2),
        TweedieParams(0.5, 2.0, 1.8), TweedieParams(3.0, 0.5, 1.4),
        TweedieParams(0.05, 0.7, 1.6)])
    def test_matches_own_samples_large(self, params):
        draws = sample(params, 1000000, 2)
        assert ks_statistic(draws, params) < 0.005
