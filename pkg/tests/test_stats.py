import math

import numpy as np
import pytest
from oracles import brute_force_wilcoxon_p
from scipy import stats as sps

from attnet.errors import ContractError, DegenerateDataError
from attnet.stats import (
    ContingencyTable,
    bivariate_normal_cdf,
    biserial,
    cles_paired,
    crosstab,
    ols_simple,
    pearson,
    polychoric,
    t_test_ind,
    tetrachoric,
    wilcoxon_signed_rank,
    zscore,
)


# ---------------------------------------------------------------------------
# bivariate normal CDF


class TestBivariateNormalCdf:
    def test_independence_origin(self):
        assert bivariate_normal_cdf(0.0, 0.0, 0.0) == pytest.approx(0.25, abs=1e-12)

    @pytest.mark.parametrize("rho", [-0.9, -0.5, 0.3, 0.5, 0.999])
    def test_closed_form_at_origin(self, rho):
        # Phi2(0, 0, rho) = 1/4 + asin(rho) / (2 pi)
        expected = 0.25 + math.asin(rho) / (2 * math.pi)
        assert bivariate_normal_cdf(0.0, 0.0, rho) == pytest.approx(expected, abs=1e-12)

    def test_marginalization_at_infinity(self):
        assert bivariate_normal_cdf(np.inf, 0.7, 0.5) == pytest.approx(sps.norm.cdf(0.7), abs=1e-12)
        assert bivariate_normal_cdf(-1.2, np.inf, -0.8) == pytest.approx(sps.norm.cdf(-1.2), abs=1e-12)
        assert bivariate_normal_cdf(-np.inf, 0.7, 0.5) == 0.0

    def test_against_scipy_quadrature(self):
        # independent oracle: scipy's multivariate normal CDF
        rng = np.random.default_rng(7)
        for _ in range(50):
            h, k = rng.normal(size=2) * 2
            rho = rng.uniform(-0.999, 0.999)
            ref = sps.multivariate_normal([0, 0], [[1, rho], [rho, 1]]).cdf([h, k])
            assert bivariate_normal_cdf(h, k, rho) == pytest.approx(ref, abs=1e-7)

    def test_vectorized_matches_scalar(self):
        h = np.array([-1.0, 0.0, 0.5, 2.0])
        k = np.array([0.3, -0.2, 0.0, 1.0])
        vec = bivariate_normal_cdf(h, k, 0.4)
        for i in range(4):
            assert vec[i] == pytest.approx(bivariate_normal_cdf(h[i], k[i], 0.4), abs=1e-14)

    def test_zero_coordinate_edge_cases(self):
        ref = sps.multivariate_normal([0, 0], [[1, 0.6], [0.6, 1]]).cdf([0.0, 1.3])
        assert bivariate_normal_cdf(0.0, 1.3, 0.6) == pytest.approx(ref, abs=1e-9)
        ref = sps.multivariate_normal([0, 0], [[1, -0.4], [-0.4, 1]]).cdf([-0.8, 0.0])
        assert bivariate_normal_cdf(-0.8, 0.0, -0.4) == pytest.approx(ref, abs=1e-9)

    def test_scalar_fast_path_matches_vectorized(self):
        from attnet.stats import _bvn_point

        rng = np.random.default_rng(31)
        for _ in range(200):
            h, k = rng.normal(size=2) * 1.5
            if rng.random() < 0.2:
                h = 0.0
            rho = rng.uniform(-0.998, 0.998)
            nh, nk = sps.norm.cdf(h), sps.norm.cdf(k)
            assert _bvn_point(h, k, rho, nh, nk) == pytest.approx(
                bivariate_normal_cdf(h, k, rho), abs=1e-13)


# ---------------------------------------------------------------------------
# pearson


class TestPearson:
    def test_perfect_positive(self):
        assert pearson([1, 2, 3], [2, 4, 6]).r == pytest.approx(1.0)

    def test_perfect_negative(self):
        assert pearson([1, 2, 3], [3, 2, 1]).r == pytest.approx(-1.0)

    def test_hand_computed_half(self):
        # means 2, 2; cov = 0.5; sds = 1 -> r = 0.5
        assert pearson([1, 2, 3], [1, 3, 2]).r == pytest.approx(0.5)

    def test_p_value_matches_scipy(self):
        rng = np.random.default_rng(3)
        x = rng.normal(size=30)
        y = 0.4 * x + rng.normal(size=30)
        got = pearson(x, y)
        ref_r, ref_p = sps.pearsonr(x, y)
        assert got.r == pytest.approx(ref_r, abs=1e-12)
        assert got.p_value == pytest.approx(ref_p, abs=1e-12)

    def test_constant_input_rejected(self):
        with pytest.raises(DegenerateDataError):
            pearson([1, 1, 1], [1, 2, 3])

    def test_too_short_rejected(self):
        with pytest.raises(ContractError):
            pearson([1, 2], [3, 4])


# ---------------------------------------------------------------------------
# biserial


class TestBiserial:
    def test_equal_group_means_give_zero(self):
        y = np.array([1.0, 2.0, 3.0, 1.0, 2.0, 3.0])
        b = np.array([0, 0, 0, 1, 1, 1])
        assert biserial(y, b) == 0.0

    def test_recovers_latent_correlation(self):
        # oracle: threshold a latent bivariate normal with known rho = 0.6
        rng = np.random.default_rng(11)
        n = 100_000
        rho = 0.6
        z1 = rng.normal(size=n)
        z2 = rho * z1 + math.sqrt(1 - rho**2) * rng.normal(size=n)
        b = (z2 > 0.25).astype(int)
        assert biserial(z1, b) == pytest.approx(rho, abs=0.01)

    def test_point_biserial_identity_at_half(self):
        # r_b = r_pb * sqrt(pq) / phi(0) when p = 1/2
        rng = np.random.default_rng(5)
        y = rng.normal(size=400)
        b = np.repeat([0, 1], 200)
        rb = biserial(y, b)
        rpb = biserial(y, b, point=True)
        phi0 = 1.0 / math.sqrt(2 * math.pi)
        assert rb == pytest.approx(rpb * 0.5 / phi0, abs=1e-12)

    def test_point_biserial_is_pearson(self):
        rng = np.random.default_rng(6)
        y = rng.normal(size=50)
        b = (rng.random(50) < 0.4).astype(int)
        assert biserial(y, b, point=True) == pytest.approx(pearson(y, b.astype(float)).r, abs=1e-12)

    def test_single_class_rejected(self):
        with pytest.raises(DegenerateDataError):
            biserial([1.0, 2.0, 3.0], [1, 1, 1])


# ---------------------------------------------------------------------------
# polychoric / tetrachoric


class TestPolychoric:
    def test_independence_table(self):
        assert polychoric([[25, 25], [25, 25]]).rho == pytest.approx(0.0, abs=1e-4)

    def test_median_split_closed_form(self):
        # balanced 2x2 margins: rho = sin(2 pi (p11 - 1/4))
        est = polychoric([[200, 100], [100, 200]])
        assert est.rho == pytest.approx(math.sin(2 * math.pi * (1 / 3 - 0.25)), abs=1e-3)
        assert est.rho == pytest.approx(0.5, abs=1e-3)

    @pytest.mark.parametrize("rho", [-0.7, 0.0, 0.7])
    def test_recovers_generating_rho_4x2(self, rho):
        # oracle: discretize bivariate normal draws with known correlation
        rng = np.random.default_rng(23)
        n = 100_000
        z1 = rng.normal(size=n)
        z2 = rho * z1 + math.sqrt(1 - rho**2) * rng.normal(size=n)
        x = np.digitize(z1, [-0.5, 0.0, 0.8])
        y = (z2 > 0.0).astype(int)
        est = polychoric(crosstab(x, y))
        assert est.rho == pytest.approx(rho, abs=0.02)

    def test_transpose_invariance(self):
        rng = np.random.default_rng(2)
        table = rng.integers(5, 60, size=(3, 4))
        assert polychoric(table).rho == pytest.approx(polychoric(table.T).rho, abs=1e-8)

    def test_category_reversal_flips_sign(self):
        rng = np.random.default_rng(4)
        table = rng.integers(5, 60, size=(4, 4))
        assert polychoric(table).rho == pytest.approx(-polychoric(table[::-1]).rho, abs=1e-8)

    def test_perfect_association_clamps_and_flags(self):
        est = polychoric([[500, 0], [0, 500]])
        assert est.rho == pytest.approx(0.999)
        assert est.saturated
        assert est.corrected

    def test_zero_cell_without_saturation_not_corrected(self):
        est = polychoric([[40, 20, 1], [0, 25, 40]])
        assert not est.corrected or est.saturated  # correction only on clamp

    def test_degenerate_margins_rejected(self):
        with pytest.raises(DegenerateDataError):
            polychoric([[5, 5]])
        with pytest.raises(DegenerateDataError):
            polychoric([[5, 0], [7, 0]])

    def test_tetrachoric_requires_2x2(self):
        with pytest.raises(ContractError):
            tetrachoric([[1, 2, 3], [4, 5, 6]])
        assert tetrachoric([[25, 25], [25, 25]]).rho == pytest.approx(0.0, abs=1e-4)

    def test_result_in_bounds(self):
        rng = np.random.default_rng(8)
        for _ in range(20):
            table = rng.integers(0, 30, size=(2, 2)) + 1
            assert abs(polychoric(table).rho) <= 0.999

    @pytest.mark.parametrize("shape", [(2, 2), (3, 3), (4, 2)])
    def test_matches_independent_likelihood_grid(self, shape):
        # oracle: same two-step likelihood built from scipy's own bivariate
        # CDF, maximized by dense grid scan
        rng = np.random.default_rng(33)
        counts = rng.integers(3, 40, size=shape).astype(float)
        a = np.concatenate(([-np.inf], sps.norm.ppf(np.cumsum(counts.sum(1))[:-1] / counts.sum()), [np.inf]))
        b = np.concatenate(([-np.inf], sps.norm.ppf(np.cumsum(counts.sum(0))[:-1] / counts.sum()), [np.inf]))

        def loglik(rho):
            grid = np.empty((shape[0] + 1, shape[1] + 1))
            for i in range(shape[0] + 1):
                for j in range(shape[1] + 1):
                    if a[i] == -np.inf or b[j] == -np.inf:
                        grid[i, j] = 0.0
                    elif a[i] == np.inf:
                        grid[i, j] = sps.norm.cdf(b[j])
                    elif b[j] == np.inf:
                        grid[i, j] = sps.norm.cdf(a[i])
                    else:
                        grid[i, j] = sps.multivariate_normal(
                            [0, 0], [[1, rho], [rho, 1]]).cdf([a[i], b[j]])
            cell = grid[1:, 1:] - grid[:-1, 1:] - grid[1:, :-1] + grid[:-1, :-1]
            return np.sum(counts * np.log(np.maximum(cell, 1e-300)))

        grid_rhos = np.linspace(-0.99, 0.99, 397)
        best = grid_rhos[int(np.argmax([loglik(r) for r in grid_rhos]))]
        assert polychoric(counts).rho == pytest.approx(best, abs=0.006)


class TestCrosstab:
    def test_counts_and_labels(self):
        table = crosstab([1, 1, 2, 2, 2], [0, 1, 0, 0, 1])
        assert table.row_labels == [1, 2]
        assert table.col_labels == [0, 1]
        assert table.counts.tolist() == [[1.0, 1.0], [2.0, 1.0]]

    def test_from_pairs_alias(self):
        t = ContingencyTable.from_pairs([1, 2], [3, 4])
        assert t.counts.sum() == 2


# ---------------------------------------------------------------------------
# zscore and ols


class TestZscore:
    def test_hand_example(self):
        assert zscore([1, 2, 3]) == pytest.approx([-1.0, 0.0, 1.0])

    def test_idempotent_on_standardized(self):
        rng = np.random.default_rng(9)
        z = zscore(rng.normal(size=100))
        assert zscore(z) == pytest.approx(z, abs=1e-12)
        assert z.mean() == pytest.approx(0.0, abs=1e-12)
        assert z.std(ddof=1) == pytest.approx(1.0, abs=1e-12)

    def test_constant_rejected(self):
        with pytest.raises(DegenerateDataError):
            zscore([5, 5])


class TestOlsSimple:
    def test_exact_line(self):
        x = np.array([0.0, 1.0, 2.0, 3.0])
        fit = ols_simple(x, 2 * x + 1)
        assert fit.intercept == pytest.approx(1.0)
        assert fit.slope == pytest.approx(2.0)

    def test_constant_y_gives_zero_slope(self):
        fit = ols_simple([1.0, 2.0, 3.0], [4.0, 4.0, 4.0])
        assert fit.slope == pytest.approx(0.0)
        assert fit.intercept == pytest.approx(4.0)

    def test_matches_normal_equations(self):
        # oracle: closed-form normal equations via lstsq
        rng = np.random.default_rng(10)
        x = rng.normal(size=40)
        y = 0.7 - 1.3 * x + rng.normal(size=40)
        design = np.column_stack([np.ones_like(x), x])
        beta = np.linalg.lstsq(design, y, rcond=None)[0]
        fit = ols_simple(x, y)
        assert fit.intercept == pytest.approx(beta[0], abs=1e-10)
        assert fit.slope == pytest.approx(beta[1], abs=1e-10)

    def test_residuals_orthogonal_to_x(self):
        rng = np.random.default_rng(12)
        x = rng.normal(size=30)
        y = rng.normal(size=30)
        fit = ols_simple(x, y)
        resid = y - fit.predict(x)
        assert abs(resid @ x) < 1e-10

    def test_slope_equals_scaled_pearson(self):
        rng = np.random.default_rng(13)
        x = rng.normal(size=25)
        y = rng.normal(size=25)
        r = pearson(x, y).r
        expected = r * y.std(ddof=1) / x.std(ddof=1)
        assert ols_simple(x, y).slope == pytest.approx(expected, abs=1e-10)

    def test_constant_x_rejected(self):
        with pytest.raises(DegenerateDataError):
            ols_simple([2.0, 2.0, 2.0], [1.0, 2.0, 3.0])


# ---------------------------------------------------------------------------
# wilcoxon signed rank


class TestWilcoxon:
    def test_all_positive_three(self):
        res = wilcoxon_signed_rank([2, 3, 4], [1, 1, 1])
        assert res.statistic == 6.0
        assert res.p_value == pytest.approx(0.25)

    def test_single_nonzero_difference(self):
        res = wilcoxon_signed_rank([1, 1, 2], [1, 1, 1])
        assert res.statistic == 1.0
        assert res.p_value == pytest.approx(1.0)
        assert res.n == 1

    @pytest.mark.parametrize("seed", range(6))
    def test_exact_p_matches_brute_force(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 13))
        a = rng.normal(size=n)
        b = a + rng.normal(scale=0.8, size=n)
        res = wilcoxon_signed_rank(a, b)
        assert res.p_value == pytest.approx(brute_force_wilcoxon_p(a - b), abs=1e-12)

    def test_exact_p_with_ties_matches_brute_force(self):
        a = np.array([1.0, 2.0, 3.0, 4.0, 5.0, 6.0])
        b = np.array([0.5, 1.5, 3.5, 4.5, 4.0, 7.0])  # |d| ties of 0.5 and 1.0
        res = wilcoxon_signed_rank(a, b)
        assert res.p_value == pytest.approx(brute_force_wilcoxon_p(a - b), abs=1e-12)

    def test_normal_approximation_close_to_exact(self):
        rng = np.random.default_rng(21)
        a = rng.normal(size=20)
        b = a + rng.normal(scale=1.0, size=20) + 0.3
        exact = wilcoxon_signed_rank(a, b).p_value
        approx = wilcoxon_signed_rank(a, b, exact_limit=5).p_value
        assert approx == pytest.approx(exact, abs=0.01)

    def test_all_zero_differences_rejected(self):
        with pytest.raises(DegenerateDataError):
            wilcoxon_signed_rank([1.0, 2.0], [1.0, 2.0])

    def test_effect_size_is_cles(self):
        a = np.array([1.0, 1.0, 5.0, 2.0])
        b = np.array([2.0, 2.0, 4.0, 2.0])
        assert wilcoxon_signed_rank(a, b).effect_size == pytest.approx(cles_paired(a, b))


class TestClesPaired:
    def test_all_smaller(self):
        assert cles_paired([1, 1, 1], [2, 2, 2]) == 1.0

    def test_identical_is_half(self):
        assert cles_paired([1, 2], [1, 2]) == 0.5

    def test_ties_split(self):
        # a - b = [-1, -1, +1, 0] -> (2 + 0.5) / 4
        a = np.array([1.0, 1.0, 3.0, 2.0])
        b = np.array([2.0, 2.0, 2.0, 2.0])
        assert cles_paired(a, b) == pytest.approx(0.625)

    def test_empty_rejected(self):
        with pytest.raises(ContractError):
            cles_paired([], [])


class TestTTestInd:
    def test_identical_groups(self):
        res = t_test_ind([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])
        assert res.statistic == 0.0
        assert res.effect_size == 0.0

    def test_zero_variance_rejected(self):
        with pytest.raises(DegenerateDataError):
            t_test_ind([0.0, 0.0], [1.0, 1.0])

    def test_matches_scipy(self):
        rng = np.random.default_rng(14)
        a = rng.normal(size=40)
        b = rng.normal(0.5, 1, size=30)
        res = t_test_ind(a, b)
        ref = sps.ttest_ind(a, b, equal_var=True)
        assert res.statistic == pytest.approx(ref.statistic, abs=1e-12)
        assert res.p_value == pytest.approx(ref.pvalue, abs=1e-12)

    def test_cohens_d_monte_carlo(self):
        rng = np.random.default_rng(15)
        a = rng.normal(0.0, 1.0, size=1000)
        b = rng.normal(0.5, 1.0, size=1000)
        assert t_test_ind(a, b).effect_size == pytest.approx(-0.5, abs=0.1)
