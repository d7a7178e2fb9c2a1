import numpy as np
import pytest

from sdnguard._kernels import BACKEND
from sdnguard._kernels import _fallback as fb


def _compiled_or_skip():
    try:
        from sdnguard._kernels import _core
    except ImportError:
        pytest.skip("compiled kernel extension not built")
    return _core


class TestBackendSelection:
    def test_backend_is_named(self):
        assert BACKEND in ("compiled", "fallback")

    def test_force_fallback_env(self, tmp_path):
        import subprocess
        import sys

        out = subprocess.run(
            [sys.executable, "-c", "from sdnguard._kernels import BACKEND; print(BACKEND)"],
            capture_output=True,
            text=True,
            env={"PATH": "/usr/bin:/bin", "SDNGUARD_FORCE_FALLBACK": "1"},
            check=True,
        )
        assert out.stdout.strip() == "fallback"


class TestGiniSplitScan:
    def cases(self):
        rng = np.random.default_rng(0)
        for _ in range(200):
            n = int(rng.integers(2, 60))
            C = int(rng.integers(2, 5))
            x = np.sort(np.round(rng.standard_normal(n), 1))
            y = rng.integers(0, C, n)
            min_leaf = int(rng.integers(1, 3))
            yield x, y.astype(np.int64), C, min_leaf

    def test_backends_agree(self):
        core = _compiled_or_skip()
        for x, y, C, min_leaf in self.cases():
            pos_a, score_a = core.gini_split_scan(x, y, C, min_leaf)
            pos_b, score_b = fb.gini_split_scan(x, y, C, min_leaf)
            assert pos_a == pos_b
            assert score_a == pytest.approx(score_b, rel=1e-12, abs=1e-12)

    def test_fallback_matches_brute_force(self):
        # oracle: maximize sum over children of (class count squared / size)
        for x, y, C, min_leaf in self.cases():
            n = len(x)
            best_pos, best_score = -1, -np.inf
            for pos in range(min_leaf, n - min_leaf + 1):
                if pos < n and x[pos - 1] == x[pos]:
                    continue  # can't split between equal values
                cl = np.bincount(y[:pos], minlength=C).astype(float)
                cr = np.bincount(y[pos:], minlength=C).astype(float)
                score = (cl @ cl) / pos + (cr @ cr) / (n - pos)
                if score > best_score + 1e-12:
                    best_pos, best_score = pos, score
            pos, score = fb.gini_split_scan(x, y, C, min_leaf)
            if best_pos == -1 or len(np.unique(x)) == 1:
                continue
            # the returned split must be a legal boundary achieving the
            # optimal score; ties may resolve to a different position
            assert min_leaf <= pos <= n - min_leaf
            assert x[pos - 1] != x[pos]
            assert score == pytest.approx(best_score, rel=1e-12)


class TestHistBuild:
    def cases(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            n = int(rng.integers(1, 200))
            n_bins = int(rng.integers(1, 16))
            codes = rng.integers(0, n_bins, n).astype(np.int32)
            rows = np.sort(
                rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
            ).astype(np.int32)
            grad = rng.standard_normal(n)
            hess = rng.random(n)
            yield codes, rows, grad, hess, n_bins

    def test_backends_agree(self):
        core = _compiled_or_skip()
        for codes, rows, grad, hess, n_bins in self.cases():
            ga, ha, ca = core.hist_build(codes, rows, grad, hess, n_bins)
            gb, hb, cb = fb.hist_build(codes, rows, grad, hess, n_bins)
            np.testing.assert_allclose(ga, gb, rtol=1e-12, atol=1e-12)
            np.testing.assert_allclose(ha, hb, rtol=1e-12, atol=1e-12)
            np.testing.assert_array_equal(ca, cb)

    def test_fallback_matches_direct_sums(self):
        for codes, rows, grad, hess, n_bins in self.cases():
            g, h, cnt = fb.hist_build(codes, rows, grad, hess, n_bins)
            for b in range(n_bins):
                members = rows[codes[rows] == b]
                assert g[b] == pytest.approx(grad[members].sum(), abs=1e-12)
                assert h[b] == pytest.approx(hess[members].sum(), abs=1e-12)
                assert cnt[b] == len(members)
