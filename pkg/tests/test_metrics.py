import math
from itertools import product

import numpy as np
import pytest

from savskit import DataError, SparseEstimate, TruthSpec, aggregate, classify, from_counts


def _estimate(p, selected):
    beta = np.zeros(p)
    for j in selected:
        beta[j] = 1.0
    return SparseEstimate(
        beta_star=beta, support=frozenset(selected), kappa=2.0, mu=np.ones(p)
    )


def _truth(p, support):
    beta = np.zeros(p)
    for j in support:
        beta[j] = 2.0
    return TruthSpec.from_beta(beta)


class TestClassify:
    def test_perfect_classification(self):
        support = set(range(10))
        m = classify(_estimate(500, support), _truth(500, support))
        assert (m.mcc, m.tpr, m.tnr) == (1.0, 1.0, 1.0)
        assert m.exact_model

    def test_hand_derived_mcc(self):
        # TP=8, FN=2, FP=1, TN=489
        m = from_counts(tp=8, tn=489, fp=1, fn=2)
        expected = 3910.0 / math.sqrt(9 * 10 * 490 * 491)
        assert abs(m.mcc - expected) < 1e-10
        assert abs(m.mcc - 0.8403) < 5e-5

    def test_empty_estimate_with_signals(self):
        m = classify(_estimate(20, set()), _truth(20, {1, 2, 3}))
        assert (m.tp, m.fp) == (0, 0)
        assert m.mcc == 0.0
        assert m.tpr == 0.0
        assert m.tnr == 1.0
        assert not m.exact_model

    def test_length_mismatch(self):
        with pytest.raises(DataError):
            classify(_estimate(5, {0}), _truth(6, {0}))

    def test_counts_sum_to_p(self):
        m = classify(_estimate(30, {1, 5, 9}), _truth(30, {5, 9, 22}))
        assert m.tp + m.tn + m.fp + m.fn == 30
        assert m.p == 30

    def test_matches_naive_loop_on_random_pairs(self):
        rng = np.random.default_rng(99)
        for _ in range(10_000):
            p = int(rng.integers(1, 40))
            est = set(int(j) for j in rng.choice(p, size=rng.integers(0, p + 1), replace=False))
            tru = set(int(j) for j in rng.choice(p, size=rng.integers(0, p + 1), replace=False))
            m = classify(_estimate(p, est), _truth(p, tru))
            tp = tn = fp = fn = 0
            for j in range(p):
                if j in est and j in tru:
                    tp += 1
                elif j in est:
                    fp += 1
                elif j in tru:
                    fn += 1
                else:
                    tn += 1
            assert (m.tp, m.tn, m.fp, m.fn) == (tp, tn, fp, fn)
            den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn)
            expected_mcc = 0.0 if den == 0 else (tp * tn - fp * fn) / math.sqrt(den)
            assert m.mcc == pytest.approx(expected_mcc, abs=1e-14)


class TestMccProperties:
    def test_symmetry_under_label_swap(self):
        for tp, tn, fp, fn in [(8, 489, 1, 2), (3, 4, 2, 1), (0, 5, 5, 0)]:
            a = from_counts(tp=tp, tn=tn, fp=fp, fn=fn)
            b = from_counts(tp=tn, tn=tp, fp=fn, fn=fp)
            assert a.mcc == pytest.approx(b.mcc, abs=1e-15)

    def test_bounded_for_all_small_tuples(self):
        for p in range(1, 13):
            for tp, tn, fp in product(range(p + 1), repeat=3):
                fn = p - tp - tn - fp
                if fn < 0:
                    continue
                m = from_counts(tp=tp, tn=tn, fp=fp, fn=fn)
                assert -1.0 <= m.mcc <= 1.0

    def test_degenerate_denominator_is_zero(self):
        assert from_counts(tp=0, tn=10, fp=0, fn=0).mcc == 0.0

    def test_vacuous_rates(self):
        m = from_counts(tp=0, tn=4, fp=0, fn=0)
        assert m.tpr == 1.0  # no true signals
        m = from_counts(tp=4, tn=0, fp=0, fn=0)
        assert m.tnr == 1.0  # no true nulls


class TestAggregate:
    def test_single_element(self):
        m = from_counts(tp=2, tn=2, fp=0, fn=0)
        agg = aggregate([m])
        assert agg.mcc_mean == m.mcc
        assert agg.mcc_sd == 0.0
        assert agg.prop == 1.0

    def test_two_point_sd(self):
        a = from_counts(tp=9, tn=490, fp=0, fn=1)
        b = from_counts(tp=10, tn=490, fp=0, fn=0)
        agg = aggregate([_with_mcc(a, 0.9), _with_mcc(b, 1.0)])
        assert agg.mcc_mean == pytest.approx(0.95)
        assert agg.mcc_sd == pytest.approx(np.std([0.9, 1.0], ddof=1))
        assert agg.mcc_sd == pytest.approx(0.0707, abs=5e-5)

    def test_all_exact_gives_prop_one(self):
        ms = [from_counts(tp=1, tn=3, fp=0, fn=0)] * 4
        assert aggregate(ms).prop == 1.0

    def test_empty_rejected(self):
        with pytest.raises(DataError):
            aggregate([])

    def test_matches_naive_recomputation(self):
        rng = np.random.default_rng(5)
        ms = []
        for _ in range(37):
            tp, tn = int(rng.integers(0, 10)), int(rng.integers(0, 100))
            fp, fn = int(rng.integers(0, 5)), int(rng.integers(0, 5))
            ms.append(from_counts(tp=tp, tn=tn, fp=fp, fn=fn))
        agg = aggregate(ms)
        vals = [m.mcc for m in ms]
        mean = sum(vals) / len(vals)
        sd = math.sqrt(sum((v - mean) ** 2 for v in vals) / (len(vals) - 1))
        assert agg.mcc_mean == pytest.approx(mean, rel=1e-12)
        assert agg.mcc_sd == pytest.approx(sd, rel=1e-12)
        assert agg.prop == pytest.approx(
            sum(m.exact_model for m in ms) / len(ms), rel=1e-12
        )


def _with_mcc(m, value):
    return type(m)(
        tp=m.tp, tn=m.tn, fp=m.fp, fn=m.fn, mcc=value, tpr=m.tpr, tnr=m.tnr,
        exact_model=m.exact_model,
    )
