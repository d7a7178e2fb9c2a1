import numpy as np
import pytest

from sdnguard.errors import UsageError
from sdnguard.special import betainc, digamma, f_sf
from sdnguard.stats import MiScores, anova_f, mutual_info, select_k_best

scipy_special = pytest.importorskip("scipy.special")
scipy_stats = pytest.importorskip("scipy.stats")


class TestSpecial:
    def test_digamma_matches_oracle(self):
        xs = np.concatenate([np.linspace(0.05, 10, 200), [50.0, 123.4, 1e4]])
        ours = digamma(xs)
        ref = scipy_special.digamma(xs)
        np.testing.assert_allclose(ours, ref, rtol=1e-11, atol=1e-11)

    def test_digamma_recurrence(self):
        # digamma(x + 1) = digamma(x) + 1/x
        for x in [0.3, 1.7, 4.2]:
            assert digamma(x + 1) == pytest.approx(digamma(x) + 1 / x, rel=1e-12)

    def test_betainc_matches_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(300):
            a = rng.uniform(0.1, 20)
            b = rng.uniform(0.1, 20)
            x = rng.uniform(0, 1)
            ref = scipy_special.betainc(a, b, x)
            assert betainc(x, a, b) == pytest.approx(ref, rel=1e-10, abs=1e-12)

    def test_betainc_endpoints(self):
        assert betainc(0.0, 2.0, 3.0) == 0.0
        assert betainc(1.0, 2.0, 3.0) == 1.0

    def test_f_sf_matches_oracle(self):
        rng = np.random.default_rng(1)
        for _ in range(200):
            f = rng.uniform(0, 30)
            df1 = rng.integers(1, 40)
            df2 = rng.integers(1, 400)
            ref = scipy_stats.f.sf(f, df1, df2)
            assert f_sf(f, int(df1), int(df2)) == pytest.approx(ref, rel=1e-9, abs=1e-13)


class TestAnova:
    def test_hand_fixture(self):
        # groups [0,1] and [4,5]: grand mean 2.5, SSB = 2*4 + 2*4 = 16 (df 1),
        # SSW = 0.5 + 0.5 = 1 (df 2), so F = 16 / 0.5 = 32
        X = np.array([[0.0], [1.0], [4.0], [5.0]])
        y = np.array([0, 0, 1, 1])
        res = anova_f(X, y)
        assert res.f_values[0] == pytest.approx(32.0, rel=1e-12)
        assert res.df_between == 1
        assert res.df_within == 2

    def test_matches_scipy_on_random_data(self, blobs):
        res = anova_f(blobs.X, blobs.y)
        for j in range(blobs.n_features):
            groups = [blobs.X[blobs.y == c, j] for c in range(blobs.n_classes)]
            f_ref, p_ref = scipy_stats.f_oneway(*groups)
            assert res.f_values[j] == pytest.approx(f_ref, rel=1e-9)
            assert res.p_values[j] == pytest.approx(p_ref, rel=1e-8, abs=1e-12)

    def test_frozen_small_case(self):
        # groups [1,3] and [5,7]: F = 8, survival of F(1,2) at 8 is 0.105573
        X = np.array([[1.0], [3.0], [5.0], [7.0]])
        y = np.array([0, 0, 1, 1])
        res = anova_f(X, y)
        assert res.f_values[0] == pytest.approx(8.0, rel=1e-12)
        assert res.p_values[0] == pytest.approx(0.1055728090000841, rel=1e-10)
        f_ref, p_ref = scipy_stats.f_oneway(X[:2, 0], X[2:, 0])
        assert res.f_values[0] == pytest.approx(f_ref, rel=1e-12)
        assert res.p_values[0] == pytest.approx(p_ref, rel=1e-10)

    def test_constant_feature_is_insignificant(self):
        X = np.column_stack([np.ones(10), np.arange(10, dtype=float)])
        y = np.array([0] * 5 + [1] * 5)
        res = anova_f(X, y)
        assert 0 in res.insignificant(0.05)
        assert 1 not in res.insignificant(0.05)

    def test_requires_two_classes(self):
        with pytest.raises(UsageError):
            anova_f(np.zeros((3, 1)), np.zeros(3, dtype=int))

    def test_separating_feature_significant(self, blobs):
        res = anova_f(blobs.X, blobs.y)
        # blobs separate along the first n_classes-cycled axes; at least one tiny p
        assert res.p_values.min() < 1e-6


class TestMutualInfo:
    def test_independent_feature_near_zero(self):
        rng = np.random.default_rng(3)
        n = 2000
        X = rng.standard_normal((n, 1))
        y = rng.integers(0, 2, n)
        mi = mutual_info(X, y, k=3, seed=0)
        assert mi.scores[0] < 0.02

    def test_deterministic_feature_near_label_entropy(self):
        n = 2000
        y = np.arange(n) % 2
        X = y.astype(float)[:, None]
        mi = mutual_info(X, y, k=3, seed=0)
        assert mi.scores[0] == pytest.approx(np.log(2), abs=0.05)

    def test_scores_nonnegative(self, blobs):
        mi = mutual_info(blobs.X, blobs.y, k=3, seed=0)
        assert (mi.scores >= 0).all()

    def test_informative_beats_noise(self, blobs):
        mi = mutual_info(blobs.X, blobs.y, k=3, seed=0)
        # features 0..2 carry the class means, feature 3 is pure noise
        assert mi.scores[:3].min() > mi.scores[3] + 0.1

    def test_seeded_jitter_makes_it_deterministic(self, blobs):
        a = mutual_info(blobs.X, blobs.y, k=3, seed=5)
        b = mutual_info(blobs.X, blobs.y, k=3, seed=5)
        np.testing.assert_array_equal(a.scores, b.scores)


class TestSelectKBest:
    def test_orders_by_score_then_index(self):
        scores = MiScores(
            np.array([0.3, 0.9, 0.9, 0.1]),
            n_neighbors=3,
            jitter_seed=0,
            feature_names=["a", "b", "c", "d"],
        )
        sel = select_k_best(scores, 3)
        assert list(sel.indices) == [1, 2, 0]
        assert list(sel.names) == ["b", "c", "a"]

    def test_k_too_large(self):
        with pytest.raises(UsageError):
            select_k_best(
                MiScores(np.array([1.0]), n_neighbors=3, jitter_seed=0, feature_names=["a"]), 2
            )
