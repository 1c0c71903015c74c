import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import stats

from wmlab import detect, embed, models, theory
from wmlab.embed import SchemeConfig, gen_watermark
from wmlab.models import HostModel, mvr, q, q_inv

shapes = st.floats(0.3, 2.5)
seeds = st.integers(0, 2**32 - 1)
lengths = st.integers(1, 200).map(lambda k: 2 * k)
FAST = settings(max_examples=40, deadline=None)


def host(n, seed, c=1.0, sigma=10.0):
    return models.sample(HostModel.ggd(c, sigma), n, seed).values


class TestModelProperties:
    @FAST
    @given(c=st.floats(0.1, 2.5))
    def test_mvr_peak_at_c(self, c):
        m = HostModel.ggd(c, 1.0)
        grid = np.arange(0.1, 2.505, 0.01)
        best = grid[int(np.argmax([mvr(m, xi) for xi in grid]))]
        assert abs(best - c) <= 0.01 + 1e-9

    @FAST
    @given(d=st.floats(0.1, 4.0))
    def test_weibull_mvr_peak_at_delta(self, d):
        m = HostModel.weibull(1.0, d)
        grid = np.arange(0.1, 4.005, 0.01)
        best = grid[int(np.argmax([mvr(m, xi) for xi in grid]))]
        assert abs(best - d) <= 0.01 + 1e-9

    @pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
    def test_mvr_over_xi_diverges(self, c):
        m = HostModel.ggd(c, 1.0)
        assert mvr(m, 0.05) / 0.05 > mvr(m, 0.2) / 0.2

    @FAST
    @given(c=shapes, sigma=st.floats(0.1, 100.0))
    def test_mvr_scale_free(self, c, sigma):
        assert_allclose(mvr(HostModel.ggd(c, sigma), 0.8), mvr(HostModel.ggd(c, 1.0), 0.8),
                        rtol=1e-10)

    @FAST
    @given(p=st.floats(1e-12, 1 - 1e-12))
    def test_q_inverse(self, p):
        assert_allclose(q(q_inv(p)), p, rtol=1e-9, atol=1e-15)

    @pytest.mark.parametrize("m", [HostModel.ggd(0.5, 3.0), HostModel.ggd(1.0, 3.0),
                                   HostModel.ggd(2.0, 3.0), HostModel.weibull(1.0, 1.0),
                                   HostModel.weibull(0.05, 1.5), HostModel.cauchy(2.0)])
    def test_sampler_matches_inverse_cdf(self, m):
        a = models.sample(m, 10**5, 1).values
        ref = models.ppf(m, models.rng_for(2).uniform(size=10**5))
        res = stats.ks_2samp(a, ref)
        crit = 1.63 * math.sqrt(2 / 10**5)
        assert res.statistic < crit


class TestEmbedProperties:
    @FAST
    @given(seed=seeds, n=lengths)
    def test_zero_sum(self, seed, n):
        assert gen_watermark(seed, n).w.sum() == 0

    @FAST
    @given(seed=seeds, n=lengths, a=st.floats(0.01, 5.0))
    def test_double_sided_magnitude(self, seed, n, a):
        x = host(n, seed)
        w = gen_watermark(seed + 1, n).w
        xbar = embed.projection(x, w)
        if xbar == 0:
            return
        s = embed.embed_double_sided(x, w, SchemeConfig("DS_ASS", a=a))
        assert abs(embed.projection(s, w)) > abs(xbar)

    @FAST
    @given(seed=seeds, n=lengths, l=st.floats(0.01, 10.0))
    def test_hir_exact(self, seed, n, l):
        x = host(n, seed)
        w = gen_watermark(seed, n).w
        s = embed.embed_quantized(x, w, SchemeConfig("DS_ASS_HIR", target_l=l))
        assert abs(abs(embed.projection(s, w)) - l) < 1e-12 * max(1.0, l)

    @FAST
    @given(seed=seeds, n=lengths, a=st.floats(0.001, 0.2), g=st.floats(0.2, 2.0),
           b=st.sampled_from([1, -1]))
    def test_lambda_zero_is_mss(self, seed, n, a, g, b):
        x = host(n, seed, c=0.7)
        w = gen_watermark(seed, n)
        e = embed.embed_emss(x, w, SchemeConfig("EMSS", a=a, lam=0.0, b=b, gamma_order=g))
        m = embed.embed_ss(x, w, SchemeConfig("MSS", a=a, b=b))
        assert np.array_equal(e, m)

    @pytest.mark.parametrize("n", [100, 1000])
    def test_hir_distortion(self, n):
        x = models.draw(HostModel.ggd(2.0, 10.0), (20_000, n), models.rng_for(n))
        w = gen_watermark(1, n)
        s = embed.embed(x, w, SchemeConfig("DS_ASS_HIR", target_l=1.0))
        emp = np.mean(np.mean((s - x) ** 2, axis=1))
        assert_allclose(emp, theory.hir_distortion(1.0, 10.0, n), rtol=0.02)


class TestDetectProperties:
    @FAST
    @given(seed=seeds, psi=st.floats(0.0, 10.0), stat=st.floats(-20.0, 20.0))
    def test_decide_rules(self, seed, psi, stat):
        single = detect.decide(stat, psi, "single").verdict
        double = detect.decide(stat, psi, "double").verdict
        assert single == ("H1" if stat > psi else "H0")
        assert double == ("H1" if abs(stat) > psi else "H0")
        if single == "H1":
            assert double == "H1"

    @pytest.mark.parametrize("stat", ["correlator", "generalized", "opt_ass_decode"])
    def test_decoding_antisymmetry(self, stat):
        n, trials = 100, 50_000
        x = models.draw(HostModel.ggd(1.0, 10.0), (trials, n), models.rng_for(3))
        w = gen_watermark(4, n)
        scheme = "MSS" if stat == "generalized" else "ASS"
        a = 0.1 if scheme == "MSS" else 0.5
        det = detect.DetectorConfig(stat, xi=1.0, a=a)
        means, sds = [], []
        for b in (1, -1):
            s = embed.embed(x, w, SchemeConfig(scheme, a=a, b=b))
            v = np.asarray(detect.compute_statistic(s, w, det))
            means.append(v.mean())
            sds.append(v.std() / math.sqrt(trials))
        # Same hosts under both bits, so the sum has a small common-mode error.
        assert abs(means[0] + means[1]) < 6 * math.hypot(*sds)
        assert means[0] > 0

    def test_h0_symmetry(self):
        n, trials = 20, 10**6
        x = models.draw(HostModel.ggd(0.8, 10.0), (trials, n), models.rng_for(5))
        v = detect.generalized_correlate(x, gen_watermark(6, n), 1.0)
        assert abs(stats.skew(v)) < 3 * math.sqrt(6 / trials)

    def test_indicator_independence(self):
        n, trials = 20, 10**5
        x = models.draw(HostModel.ggd(0.8, 10.0), (trials, n), models.rng_for(7))
        w = gen_watermark(8, n).w
        total = np.sum(np.abs(x), axis=1)
        ind = (embed.projection(x, w) > 0).astype(float)
        r = np.corrcoef(total, ind)[0, 1]
        assert abs(r) < 3 / math.sqrt(trials)


class TestTheoryProperties:
    @FAST
    @given(mask=st.lists(st.floats(0.01, 50.0), min_size=1, max_size=64),
           a=st.floats(0.01, 5.0))
    def test_perceptual_inequality(self, mask, a):
        k = theory.perceptual_k(a, mask)
        dw = theory.perceptual_dw(a, mask)
        assert k * k <= dw * (1 + 1e-12)
        if np.ptp(mask) == 0:
            assert_allclose(k * k, dw, rtol=1e-12)

    @pytest.mark.parametrize("c", [0.5, 1.0])
    def test_mmt_is_one_over_c(self, c):
        m = HostModel.ggd(c, 10.0)
        for g in (0.5, 1.0, 1.5, 2.0):
            assert_allclose(theory.mmt(m, c, g), 1 / c, rtol=1e-9)

    @FAST
    @given(k=st.floats(0.1, 5.0), p=st.floats(1e-6, 0.3))
    def test_ds_dominance(self, k, p):
        assert theory.ds_roc(k, p) <= 1 - q(q_inv(p) - k) + 1e-15

    def test_ass_mss_crossover(self):
        def diff(c):
            m = HostModel.ggd(c, 10.0)
            a_ass = theory.strength_for_dwr("ASS", m, 20.0)
            a_mss = theory.strength_for_dwr("MSS", m, 20.0)
            ass = theory.pe_gaussian(theory.moments_for("ass_optimum_decode", m, a=a_ass, n=100,
                                                        xi=c))
            return theory.mss_pe(m, a_mss, 100, c) - ass
        assert diff(1.2) > 0 > diff(1.4)
        assert abs(diff(1.3)) < 0.01
