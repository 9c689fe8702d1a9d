import numpy as np
import pytest
from scipy import stats

from arbls.noise import OutlierSpec, StableSpec, add_stable_noise, inject_outliers, sample_stable


class TestOutliers:
    def test_zero_proportion(self, rng):
        y = rng.uniform(size=50)
        out, idx = inject_outliers(y, OutlierSpec(0.0))
        np.testing.assert_array_equal(out, y)
        assert idx.size == 0

    def test_all_rows_fixed_shift(self, rng):
        y = rng.uniform(size=40)
        out, idx = inject_outliers(y, OutlierSpec(1.0, 3.0, 3.0))
        np.testing.assert_allclose(out, y + 3.0)
        assert idx.size == 40

    def test_count_and_distinct(self):
        y = np.zeros(1000)
        out, idx = inject_outliers(y, OutlierSpec(0.3, seed=4))
        assert idx.size == 300 == np.unique(idx).size
        assert np.count_nonzero(out) == 300
        assert np.all((out[idx] >= 0) & (out[idx] <= 1))

    def test_untouched_rows(self, rng):
        y = rng.normal(size=200)
        out, idx = inject_outliers(y, OutlierSpec(0.25, 0.5, 2.0, seed=9))
        mask = np.ones(200, bool)
        mask[idx] = False
        np.testing.assert_array_equal(out[mask], y[mask])
        d = out[idx] - y[idx]
        assert d.min() >= 0.5 and d.max() <= 2.0

    def test_input_not_modified(self):
        y = np.zeros(10)
        inject_outliers(y, OutlierSpec(0.5))
        assert not y.any()

    def test_reproducible_and_nested(self):
        y = np.zeros(500)
        a = inject_outliers(y, OutlierSpec(0.1, seed=3))[1]
        b = inject_outliers(y, OutlierSpec(0.3, seed=3))[1]
        np.testing.assert_array_equal(a, inject_outliers(y, OutlierSpec(0.1, seed=3))[1])
        assert set(a) <= set(b)

    def test_floor_count(self):
        assert inject_outliers(np.zeros(7), OutlierSpec(0.5))[1].size == 3

    @pytest.mark.parametrize("kw", [dict(proportion=-0.1), dict(proportion=1.1),
                                    dict(proportion=0.1, low=2.0, high=1.0)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            OutlierSpec(**kw)


class TestStable:
    def test_gaussian_case_variance(self):
        rho = 0.1
        x = sample_stable(StableSpec(rho, 2.0, seed=1), 100_000)
        assert x.var() == pytest.approx(2 * rho, rel=0.05)

    def test_cauchy_case_quartiles(self):
        x = sample_stable(StableSpec(1.0, 1.0, seed=2), 100_000)
        q1, med, q3 = np.percentile(x, [25, 50, 75])
        assert abs(med) < 0.02
        assert q3 - q1 == pytest.approx(2.0, rel=0.05)

    def test_symmetry(self):
        x = sample_stable(StableSpec(0.1, 1.5, seed=3), 100_000)
        assert abs(np.median(x)) < 0.02

    @pytest.mark.parametrize("mu", [0.8, 1.5])
    def test_matches_reference_distribution(self, mu):
        # characteristic function exp(-rho |t|^mu) is S(mu, 0, rho^(1/mu)) in scipy's S1 form
        rho = 0.5
        x = sample_stable(StableSpec(rho, mu, seed=11), 1500)
        ref = stats.levy_stable(mu, 0.0, loc=0.0, scale=rho ** (1 / mu))
        assert stats.kstest(x, ref.cdf).pvalue > 1e-3

    def test_dispersion_scaling_identity(self):
        for mu in (0.7, 1.0, 1.5, 2.0):
            base = sample_stable(StableSpec(1.0, mu, seed=5), 64)
            scaled = sample_stable(StableSpec(0.3, mu, seed=5), 64)
            np.testing.assert_allclose(scaled, 0.3 ** (1 / mu) * base, rtol=1e-12)

    def test_vanishing_dispersion(self, rng):
        y = rng.uniform(size=100)
        out = add_stable_noise(y, StableSpec(1e-12, 2.0, seed=6))
        assert np.max(np.abs(out - y)) < 1e-3

    def test_add_is_sum(self, rng):
        y = rng.uniform(size=30)
        spec = StableSpec(0.1, 1.5, seed=8)
        np.testing.assert_array_equal(add_stable_noise(y, spec), y + sample_stable(spec, 30))

    def test_determinism(self, rng):
        y = rng.uniform(size=20)
        a = add_stable_noise(y, StableSpec(seed=1))
        np.testing.assert_array_equal(a, add_stable_noise(y, StableSpec(seed=1)))
        assert np.any(a != add_stable_noise(y, StableSpec(seed=2)))

    @pytest.mark.parametrize("kw", [dict(dispersion=0.0), dict(exponent=0.0), dict(exponent=2.1)])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            StableSpec(**kw)

    def test_bad_count(self):
        with pytest.raises(ValueError):
            sample_stable(StableSpec(), 0)
