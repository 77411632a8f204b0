import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from sampvar.oracles import (
    ExactLaw,
    chisq_cumulants,
    exact_cumulants,
    exact_law,
    gamma_reference,
    gaussian_quadratic_cumulants,
    kstatistic_standard_errors,
    kstatistics,
    sample_cumulants,
    simulate_ar1,
    simulate_ar1_s2,
)
from sampvar.process import FiniteJoint, IIDProcess, iid_to_finite_joint, markov_to_finite_joint

from conftest import markov_chain


class TestExactLaw:
    def test_rademacher_n4(self):
        law = exact_law(iid_to_finite_joint(IIDProcess.rademacher(), 4))
        got = law.as_dict()
        assert sorted(got) == pytest.approx([0.0, 1.0, 4 / 3])
        by_value = {round(v, 12): p for v, p in got.items()}
        assert by_value[0.0] == pytest.approx(2 / 16, abs=1e-15)
        assert by_value[1.0] == pytest.approx(8 / 16, abs=1e-15)
        assert by_value[round(4 / 3, 12)] == pytest.approx(6 / 16, abs=1e-15)

    def test_constant(self):
        law = exact_law(FiniteJoint.constant(3.0, 5))
        assert law.as_dict() == {0.0: 1.0}

    def test_absorbing_chain(self):
        chain = markov_to_finite_joint([-1.0, 1.0], [[1.0, 0.0], [0.0, 1.0]], [0.5, 0.5], 4)
        assert len(chain.probs) == 2
        assert exact_law(chain).as_dict() == {0.0: 1.0}

    def test_probabilities_sum_to_one(self):
        law = exact_law(markov_chain(8))
        assert math.fsum(law.probs) == pytest.approx(1.0, abs=1e-12)
        assert np.all(law.values >= 0)
        assert np.all(np.diff(law.values) > 0)

    def test_permuting_atoms_gives_identical_law(self):
        chain = markov_chain(6)
        perm = np.random.default_rng(3).permutation(len(chain.probs))
        shuffled = FiniteJoint(chain.atoms[perm], chain.probs[perm])
        assert exact_law(shuffled) == exact_law(chain)

    def test_rejects_negative_values(self):
        with pytest.raises(ValueError):
            ExactLaw(2, np.array([-1.0]), np.array([1.0]))


class TestExactCumulants:
    def test_rademacher_n4(self):
        cs = exact_cumulants(exact_law(iid_to_finite_joint(IIDProcess.rademacher(), 4)))
        assert cs.k1 == pytest.approx(1.0, rel=1e-14)
        assert cs.k2 == pytest.approx(1 / 6, rel=1e-13)
        # E[s^4] = 7/6 by hand
        assert cs.k2 + cs.k1**2 == pytest.approx(7 / 6, rel=1e-14)

    def test_point_mass_is_all_zero(self):
        cs = exact_cumulants(exact_law(FiniteJoint.constant(1.0, 4)))
        assert cs.kappas == (0.0, 0.0, 0.0, 0.0)

    def test_matches_rational_hand_enumeration(self):
        # 3 i.i.d. Bernoulli(1/2) observations: s^2 in {0, 1/3}
        law = exact_law(iid_to_finite_joint(IIDProcess.discrete([0.0, 1.0], [0.5, 0.5]), 3))
        cs = exact_cumulants(law)
        p = Fraction(6, 8)  # P(s^2 = 1/3)
        v = Fraction(1, 3)
        mean = p * v
        assert cs.k1 == pytest.approx(float(mean), rel=1e-15)
        assert cs.k2 == pytest.approx(float(p * v * v - mean * mean), rel=1e-13)


class TestGaussianOracles:
    def test_identity_covariance_is_chi_squared(self):
        for n in (3, 8, 25):
            got = gaussian_quadratic_cumulants(np.eye(n)).kappas
            assert got == pytest.approx(chisq_cumulants(n).kappas, rel=1e-12)

    def test_chisq_cumulants_n10(self):
        assert chisq_cumulants(10).kappas == pytest.approx((1.0, 2 / 9, 8 / 81, 48 / 729), rel=1e-15)

    def test_chisq_cumulants_scale(self):
        base = chisq_cumulants(7).kappas
        scaled = chisq_cumulants(7, sigma=2.0).kappas
        assert scaled == pytest.approx([k * 4**r for r, k in enumerate(base, 1)], rel=1e-15)

    def test_gamma_reference_moments(self):
        law = stats.gamma(4.5, scale=2 / 9)
        assert law.mean() == pytest.approx(1.0)
        assert law.var() == pytest.approx(2 / 9)
        pdf, cdf = gamma_reference(10, 1.0, 1.0)
        assert pdf == pytest.approx(law.pdf(1.0), rel=1e-14)
        assert cdf == pytest.approx(law.cdf(1.0), rel=1e-14)

    def test_gamma_reference_density_at_zero(self):
        for n in (4, 6, 10):
            assert gamma_reference(n, 1.0, 0.0)[0] == 0.0

    def test_gamma_reference_cdf_tail(self):
        assert gamma_reference(10, 1.0, 50.0)[1] >= 1 - 1e-12

    def test_gamma_reference_integrates_to_one(self):
        total, _ = integrate.quad(lambda x: gamma_reference(10, 1.3, x)[0], 0, np.inf, epsabs=1e-13)
        assert total == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("args", [(1, 1.0, 1.0), (10, 0.0, 1.0), (10, 1.0, -0.5)])
    def test_gamma_reference_domain(self, args):
        with pytest.raises(ValueError):
            gamma_reference(*args)


class TestKStatistics:
    def test_match_scipy(self):
        x = np.random.default_rng(0).gamma(2.0, size=5000)
        ours = kstatistics(x)
        for r in range(1, 5):
            assert ours[r - 1] == pytest.approx(stats.kstat(x, r), rel=1e-9)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(-50, 50), st.integers(0, 2**32 - 1))
    def test_shift_moves_only_k1(self, c, seed):
        x = np.random.default_rng(seed).normal(size=200)
        a, b = kstatistics(x), kstatistics(x + c)
        assert b[0] == pytest.approx(a[0] + c, abs=1e-9)
        for r in (1, 2, 3):
            assert b[r] == pytest.approx(a[r], rel=1e-6, abs=1e-9)

    def test_plug_in_cumulants_of_normal_sample(self):
        x = np.random.default_rng(1).normal(size=200_000)
        kap = sample_cumulants(x, 8)
        assert kap[1] == pytest.approx(1.0, abs=0.02)
        # higher plug-in cumulants of a normal sample are noisy; only the low ones are tight
        assert all(abs(k) < 0.1 for k in kap[2:4])
        assert len(kap) == 8

    def test_standard_errors_of_normal(self):
        se = kstatistic_standard_errors([0, 1, 0, 0, 0, 0, 0, 0], 1000)
        assert se[0] == pytest.approx(math.sqrt(1 / 1000))
        assert se[1] == pytest.approx(math.sqrt(2 / 999))


class TestSimulation:
    def test_reproducible(self):
        a = simulate_ar1(0.5, 0.8, 6, 20_000, seed=42)
        b = simulate_ar1(0.5, 0.8, 6, 20_000, seed=42)
        assert a.to_dict() == b.to_dict()

    def test_parallel_streams_match_serial(self):
        serial = simulate_ar1_s2(0.3, 1.0, 5, 12_345, seed=9, streams=4)
        parallel = simulate_ar1_s2(0.3, 1.0, 5, 12_345, seed=9, streams=4, workers=2)
        assert np.array_equal(serial, parallel)

    def test_different_seed_differs(self):
        a = simulate_ar1_s2(0.3, 1.0, 5, 1000, seed=1)
        b = simulate_ar1_s2(0.3, 1.0, 5, 1000, seed=2)
        assert not np.array_equal(a, b)

    def test_phi_zero_is_iid_normal(self):
        summary = simulate_ar1(0.0, 1.5, 8, 100_000, seed=5)
        sigma2 = 1.5**2
        assert abs(summary.k[0] - sigma2) < 4 * summary.se[0]
        assert abs(summary.k[1] - chisq_cumulants(8, 1.5).k2) < 4 * summary.se[1]

    def test_summary_invariants(self):
        summary = simulate_ar1(-0.4, 1.0, 4, 10_000, seed=0, bins=20)
        assert math.fsum(summary.hist_masses) == pytest.approx(1.0, abs=1e-12)
        assert all(s > 0 for s in summary.se)
        assert len(summary.histogram_rows()) == 20

    @pytest.mark.parametrize("phi", [1.0, -1.0, 1.5])
    def test_rejects_nonstationary(self, phi):
        with pytest.raises(ValueError):
            simulate_ar1(phi, 1.0, 5, 10_000, seed=0)

    def test_minimum_draws(self):
        with pytest.raises(ValueError):
            simulate_ar1(0.2, 1.0, 5, 999, seed=0)
