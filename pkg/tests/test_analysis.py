import numpy as np
import pytest
from scipy import stats as sp_stats

from emdhedge.analysis import (
    determinant_regression,
    matching_degree,
    relative_performance,
    significance_stars,
    variance_decomposition,
)
from emdhedge.emd import decompose
from emdhedge.errors import DataError, DegenerateInputError, InsufficientDataError
from emdhedge.estimators import ImfPair, pair_imfs


def two_tone(n=1200, scale=1.0):
    t = np.arange(float(n))
    return scale * (np.sin(2 * np.pi * t / 12) + np.sin(2 * np.pi * t / 90) + 3.0)


class TestVarianceDecomposition:
    def test_separated_tones_split_roughly_evenly(self):
        x = two_tone()
        s = decompose(x)
        rows = variance_decomposition(s, x)
        # equal-amplitude orthogonal tones each carry ~50% of the variance
        assert rows[0].percent == pytest.approx(50.0, abs=5.0)
        assert rows[1].percent == pytest.approx(50.0, abs=5.0)

    def test_shares_sum_near_total_for_orthogonal_modes(self):
        x = two_tone()
        rows = variance_decomposition(decompose(x), x)
        assert sum(r.percent for r in rows) == pytest.approx(100.0, abs=5.0)

    def test_variance_matches_numpy_oracle(self):
        x = two_tone()
        s = decompose(x)
        rows = variance_decomposition(s, x)
        for imf, row in zip(s.imfs, rows):
            assert row.variance == pytest.approx(np.var(imf.values, ddof=1), abs=1e-14)

    def test_constant_source_rejected(self):
        s = decompose(two_tone())
        with pytest.raises(DegenerateInputError):
            variance_decomposition(s, np.full(100, 1.0))


class TestMatchingDegree:
    def test_self_pairing_is_perfect(self):
        s = decompose(two_tone())
        pairs, _ = pair_imfs(s, s)
        for row in matching_degree(pairs[:-1]):
            assert row.beta == pytest.approx(1.0)
            assert row.r_squared == pytest.approx(1.0)

    def test_scaled_futures_leg(self):
        x = two_tone()
        a, b = decompose(x), decompose(0.25 * x)
        pairs, _ = pair_imfs(a, b)
        rows = matching_degree(pairs[:-1])
        assert rows[0].beta == pytest.approx(4.0, abs=1e-6)
        assert rows[0].r_squared == pytest.approx(1.0, abs=1e-9)

    def test_noise_halves_r_squared(self):
        # y = x + e with var(e) = var(x) gives R^2 ~ 0.5
        rng = np.random.default_rng(23)
        x = np.sin(2 * np.pi * np.arange(4000.0) / 25)
        e = rng.normal(0, x.std(), 4000)
        pair = ImfPair(index=1, spot=x + e, fut=x, spot_cycle=25.0, fut_cycle=25.0)
        (row,) = matching_degree([pair])
        assert row.r_squared == pytest.approx(0.5, abs=0.05)

    def test_independent_noise_near_zero(self):
        rng = np.random.default_rng(29)
        pair = ImfPair(
            index=1,
            spot=rng.normal(size=3000),
            fut=rng.normal(size=3000),
            spot_cycle=3.0,
            fut_cycle=3.0,
        )
        (row,) = matching_degree([pair])
        assert row.r_squared < 0.05


class TestDeterminantRegression:
    def test_exact_proportionality(self):
        m = np.linspace(0.1, 0.9, 12)
        fit = determinant_regression(0.8 * m, m)
        assert fit.beta_origin == pytest.approx(0.8, abs=1e-10)
        assert fit.r2_origin == pytest.approx(1.0, abs=1e-10)
        assert fit.beta_affine == pytest.approx(0.8, abs=1e-10)
        assert fit.alpha == pytest.approx(0.0, abs=1e-10)

    def test_exact_affine(self):
        m = np.linspace(0.1, 0.9, 12)
        fit = determinant_regression(0.5 * m + 0.2, m)
        assert fit.beta_affine == pytest.approx(0.5, abs=1e-10)
        assert fit.alpha == pytest.approx(0.2, abs=1e-10)
        assert fit.r2_affine == pytest.approx(1.0, abs=1e-10)

    def test_matches_scipy_linregress_oracle(self):
        rng = np.random.default_rng(41)
        m = rng.random(40)
        p = 0.6 * m + rng.normal(0, 0.1, 40)
        fit = determinant_regression(p, m)
        lr = sp_stats.linregress(m, p)
        assert fit.beta_affine == pytest.approx(lr.slope, abs=1e-10)
        assert fit.alpha == pytest.approx(lr.intercept, abs=1e-10)
        assert fit.r2_affine == pytest.approx(lr.rvalue**2, abs=1e-10)
        assert fit.t_affine == pytest.approx(lr.slope / lr.stderr, abs=1e-8)

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            determinant_regression(np.zeros(5), np.zeros(6))

    def test_too_few(self):
        with pytest.raises(InsufficientDataError):
            determinant_regression(np.zeros(2), np.zeros(2))


class TestRelativePerformance:
    def test_identical_is_zero(self):
        assert relative_performance(0.8, 0.8) == pytest.approx(0.0)

    def test_improvement_fraction(self):
        assert relative_performance(0.9, 0.8) == pytest.approx(0.125)

    def test_negative_baseline_keeps_sign(self):
        # a model beating a harmful baseline must show positive relative gain
        assert relative_performance(-0.1, -0.5) == pytest.approx(0.8)
        assert relative_performance(-0.9, -0.5) == pytest.approx(-0.8)

    def test_near_zero_baseline_rejected(self):
        with pytest.raises(DegenerateInputError):
            relative_performance(0.5, 1e-15)


class TestSignificanceStars:
    def test_thresholds(self):
        dof = 100
        t_10 = sp_stats.t.ppf(1 - 0.05, dof)  # p just at 0.10
        assert significance_stars(t_10 + 0.01, dof) == "*"
        t_05 = sp_stats.t.ppf(1 - 0.025, dof)
        assert significance_stars(t_05 + 0.01, dof) == "**"
        t_01 = sp_stats.t.ppf(1 - 0.005, dof)
        assert significance_stars(t_01 + 0.01, dof) == "***"
        assert significance_stars(0.5, dof) == ""

    def test_sign_symmetric(self):
        assert significance_stars(-5.0, 30) == significance_stars(5.0, 30)

    def test_invalid_inputs_blank(self):
        assert significance_stars(float("nan"), 30) == ""
        assert significance_stars(3.0, 0) == ""
