import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from savskit import DataError, RegressionData, coordinate_descent, savs, savs_inclusion_frequency
from savskit.savs import adaptive_penalties

finite_beta = st.floats(
    min_value=-100.0, max_value=100.0, allow_nan=False, allow_infinity=False
)
positive_norm = st.floats(min_value=1e-3, max_value=1e6)


class TestSavsRule:
    def test_zero_input_stays_zero(self):
        est = savs(np.zeros(3), np.full(3, 10.0))
        np.testing.assert_array_equal(est.beta_star, 0.0)
        assert est.support == frozenset()
        assert np.isinf(est.mu).all()

    def test_kept_coordinate_hand_value(self):
        # b=2, norm=100, kappa=2: mu=0.25, 2*100 > 0.25 -> (200 - 0.25)/100
        est = savs(np.array([2.0]), np.array([100.0]))
        assert est.beta_star[0] == pytest.approx(1.9975, abs=1e-15)
        assert est.mu[0] == 0.25
        assert est.support == frozenset({0})

    def test_thresholded_coordinate(self):
        # b=0.05, norm=100: mu=400, 0.05*100 = 5 <= 400 -> zero
        est = savs(np.array([0.05]), np.array([100.0]))
        assert est.beta_star[0] == 0.0
        assert est.support == frozenset()

    def test_boundary_cut_at_unit_product(self):
        # kappa=2: kept iff |b|^3 * norm > 1; at norm=1000 the cut is |b| = 0.1
        cn = np.array([1000.0])
        eps = 1e-9
        assert savs(np.array([0.1 - eps]), cn).support == frozenset()
        assert savs(np.array([0.1 + eps]), cn).support == frozenset({0})

    def test_exact_tie_zeroes_out(self):
        # |b| * norm == mu exactly: b=1, norm=1 -> product 1 == mu 1
        est = savs(np.array([1.0]), np.array([1.0]))
        assert est.beta_star[0] == 0.0

    def test_negative_coefficients_keep_sign(self):
        est = savs(np.array([-2.0]), np.array([100.0]))
        assert est.beta_star[0] == pytest.approx(-1.9975, abs=1e-15)

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            savs(np.ones(3), np.ones(2))

    def test_nonpositive_norm_rejected(self):
        with pytest.raises(DataError):
            savs(np.ones(2), np.array([1.0, 0.0]))

    def test_nonfinite_estimate_rejected(self):
        with pytest.raises(DataError):
            savs(np.array([1.0, np.nan]), np.ones(2))


class TestSavsProperties:
    @given(
        b=st.lists(finite_beta, min_size=1, max_size=20),
        cn=st.lists(positive_norm, min_size=1, max_size=20),
    )
    @settings(max_examples=200, deadline=None)
    def test_support_sign_and_shrinkage(self, b, cn):
        p = min(len(b), len(cn))
        b = np.asarray(b[:p])
        cn = np.asarray(cn[:p])
        est = savs(b, cn)
        assert est.support == frozenset(int(j) for j in np.flatnonzero(est.beta_star))
        for j in est.support:
            assert np.sign(est.beta_star[j]) == np.sign(b[j])
        assert np.all(np.abs(est.beta_star) <= np.abs(b))

    @given(
        b=st.lists(finite_beta, min_size=2, max_size=12),
        c=st.floats(min_value=1.001, max_value=1e4),
    )
    @settings(max_examples=200, deadline=None)
    def test_support_grows_with_column_norms(self, b, c):
        b = np.asarray(b)
        cn = np.full(b.shape, 5.0)
        small = savs(b, cn).support
        large = savs(b, c * cn).support
        assert small <= large

    def test_kappa_monotonicity_small_coefficients(self):
        rng = np.random.default_rng(0)
        b = rng.uniform(-0.99, 0.99, size=50)
        cn = rng.uniform(1.0, 500.0, size=50)
        supports = [savs(b, cn, kappa=k).support for k in (0.5, 1.0, 2.0, 4.0)]
        for a, bb in zip(supports, supports[1:]):
            assert bb <= a  # |b|<1: larger kappa penalizes harder

    def test_kappa_monotonicity_large_coefficients(self):
        rng = np.random.default_rng(1)
        b = rng.uniform(1.01, 5.0, size=50) * rng.choice([-1, 1], size=50)
        cn = rng.uniform(0.01, 2.0, size=50)
        supports = [savs(b, cn, kappa=k).support for k in (0.5, 1.0, 2.0, 4.0)]
        for a, bb in zip(supports, supports[1:]):
            assert a <= bb  # |b|>1: larger kappa relaxes the penalty


class TestOneSweepIdentity:
    def test_savs_equals_single_jacobi_sweep_bitwise(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            n, p = 30, 45
            X = rng.standard_normal((n, p))
            data = RegressionData.from_arrays(X, np.zeros(n))
            beta_hat = rng.standard_normal(p) * rng.choice([0.01, 0.3, 2.0], size=p)
            est = savs(beta_hat, data.col_sq_norms)
            trace = coordinate_descent(
                beta_hat, data, adaptive_penalties(beta_hat),
                init=beta_hat, mode="jacobi", max_iter=1, rel_tol=1e-12,
            )
            np.testing.assert_array_equal(trace.solution, est.beta_star)


class TestInclusionFrequency:
    def test_constant_chain_gives_indicator(self):
        cn = np.full(3, 100.0)
        draw = np.array([2.0, 0.01, -1.5])
        draws = np.tile(draw, (7, 1))
        freq = savs_inclusion_frequency(draws, cn)
        indicator = (savs(draw, cn).beta_star != 0).astype(float)
        np.testing.assert_array_equal(freq, indicator)
        assert set(np.unique(freq)) <= {0.0, 1.0}

    def test_half_selected_gives_half(self):
        cn = np.array([100.0])
        draws = np.array([[2.0], [0.01]])  # selected in exactly one of two draws
        freq = savs_inclusion_frequency(draws, cn)
        np.testing.assert_array_equal(freq, [0.5])

    def test_empty_draws_rejected(self):
        with pytest.raises(DataError):
            savs_inclusion_frequency(np.empty((0, 3)), np.ones(3))

    def test_width_mismatch_rejected(self):
        with pytest.raises(DataError):
            savs_inclusion_frequency(np.ones((4, 3)), np.ones(2))
