import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from sampvar.cumulants import CumulantSet
from sampvar.expansion import (
    GRID_COLUMNS,
    ExpansionSpec,
    affine_cumulants,
    bell_coefficient,
    bell_polynomial,
    cdf,
    density,
    density_grid,
    edgeworth_cdf,
    edgeworth_density,
    gc_cdf,
    gc_density,
    hermite_he,
    negativity,
    normal_density,
    series_coefficients,
)
from sampvar.oracles import chisq_cumulants, gamma_reference

PHI0 = 1 / math.sqrt(2 * math.pi)
CHISQ10 = chisq_cumulants(10)


def quad(f, a, b):
    return integrate.quad(f, a, b, epsabs=1e-12, epsrel=1e-12, limit=400)[0]


class TestHermite:
    def test_examples(self):
        assert hermite_he(3, 2.0) == 2.0
        assert hermite_he(4, 1.0) == -2.0
        assert hermite_he(0, 123.4) == 1.0

    @given(st.floats(-5, 5))
    def test_matches_numpy(self, x):
        from numpy.polynomial import hermite_e

        for j in range(9):
            coefs = [0] * j + [1]
            assert hermite_he(j, x) == pytest.approx(hermite_e.hermeval(x, coefs), rel=1e-10, abs=1e-10)

    def test_orthogonality(self):
        for j in range(1, 7):
            assert quad(lambda t: hermite_he(j, t) * math.exp(-t * t / 2) * PHI0, -40, 40) == pytest.approx(0, abs=1e-12)

    def test_vectorised(self):
        xs = np.linspace(-2, 2, 5)
        assert hermite_he(2, xs) == pytest.approx(xs**2 - 1)

    def test_degree_range(self):
        with pytest.raises(ValueError):
            hermite_he(13, 0.0)


class TestBell:
    def test_examples(self):
        assert bell_coefficient(0) == 1.0
        assert bell_coefficient(3, [0.7]) == 0.7
        assert bell_coefficient(4, [0.7, 0.3]) == 0.3
        assert bell_coefficient(6, [0.7, 0.3]) == pytest.approx(10 * 0.49)
        assert bell_coefficient(5, [0.7, 0.3]) == 0.0

    def test_bell_numbers(self):
        assert [bell_polynomial(j, [1.0] * j) for j in range(7)] == [1, 1, 2, 5, 15, 52, 203]

    def test_range(self):
        with pytest.raises(ValueError):
            bell_coefficient(7, [])


def cs(k1=1.0, k2=0.25, k3=None, k4=None):
    return CumulantSet(10, k1, k2, k3, k4)


class TestDensity:
    def test_order0_peak(self):
        spec = ExpansionSpec("gram-charlier", 0, cs(2.0, 0.09))
        assert gc_density(spec, 2.0) == pytest.approx(PHI0 / 0.3, rel=1e-15)

    def test_skew_only_at_mean(self):
        c = cs(1.0, 0.25, 0.05, 0.0)
        assert gc_density(c, 1.0, order=3) == pytest.approx(normal_density(c, 1.0), rel=1e-15)

    def test_normal_n10_at_one_near_reference(self):
        # the GC-4 version of this comparison lives with the density-accuracy acceptance test
        ref = gamma_reference(10, 1.0, 1.0)[0]
        assert abs(edgeworth_density(CHISQ10, 1.0, order=2) - ref) < 1e-3
        assert abs(gc_density(CHISQ10, 1.0, order=6) - ref) < 1e-3

    def test_edgeworth_normal_when_no_higher_cumulants(self):
        c = cs(0.0, 1.0, 0.0, 0.0)
        xs = np.linspace(-4, 4, 41)
        assert edgeworth_density(c, xs, order=2) == pytest.approx(normal_density(c, xs), rel=1e-15)

    def test_edgeworth2_equals_gc4_without_skew(self):
        c = cs(1.0, 0.3, 0.0, 0.02)
        xs = np.linspace(-1, 3, 33)
        assert edgeworth_density(c, xs, order=2) == pytest.approx(gc_density(c, xs, order=4), rel=1e-14)

    def test_edgeworth_coefficients(self):
        c = cs(1.0, 4.0, 3.0, 5.0)
        coefs = series_coefficients(ExpansionSpec("edgeworth", 2, c))
        assert coefs[3] == pytest.approx(3 / (6 * 8))
        assert coefs[4] == pytest.approx(5 / (24 * 16))
        assert coefs[6] == pytest.approx(9 / (72 * 64))
        assert coefs[5] == 0.0

    def test_gc6_b6_term(self):
        c = cs(0.0, 1.0, 0.4, 0.1)
        coefs = series_coefficients(ExpansionSpec("gram-charlier", 6, c))
        assert coefs[6] == pytest.approx(10 * 0.16 / 720)

    @pytest.mark.parametrize("kind,order", [("gram-charlier", 4), ("edgeworth", 2), ("gram-charlier", 6)])
    def test_normalisation_and_moments(self, kind, order):
        spec = ExpansionSpec(kind, order, CHISQ10)
        mu, sd = spec.mu, spec.sigma
        lo, hi = mu - 12 * sd, mu + 12 * sd
        f = lambda x: density(spec, x)  # noqa: E731
        mass = quad(f, lo, hi)
        mean = quad(lambda x: x * f(x), lo, hi)
        central = [quad(lambda x, r=r: (x - mean) ** r * f(x), lo, hi) for r in (2, 3, 4)]
        assert mass == pytest.approx(1.0, abs=1e-8)
        assert mean == pytest.approx(CHISQ10.k1, abs=1e-8)
        assert central[0] == pytest.approx(CHISQ10.k2, abs=1e-8)
        if order >= 3:
            assert central[1] == pytest.approx(CHISQ10.k3, abs=1e-6)

    def test_invalid_specs(self):
        with pytest.raises(ValueError):
            ExpansionSpec("gram-charlier", 5, CHISQ10)
        with pytest.raises(ValueError):
            ExpansionSpec("edgeworth", 3, CHISQ10)
        with pytest.raises(ValueError):
            ExpansionSpec("gram-charlier", 4, cs(1.0, 0.2, 0.1))
        with pytest.raises(ValueError):
            ExpansionSpec("gram-charlier", 0, CumulantSet(10, 0.0, 0.0))
        with pytest.raises(ValueError):
            gc_density(ExpansionSpec("edgeworth", 1, CHISQ10), 1.0)


class TestCdf:
    def test_order0_at_mean(self):
        assert gc_cdf(cs(), 1.0, order=0) == 0.5

    @pytest.mark.parametrize("kind,order", [("gram-charlier", 3), ("gram-charlier", 4), ("gram-charlier", 6), ("edgeworth", 2)])
    def test_tail_limits(self, kind, order):
        spec = ExpansionSpec(kind, order, CHISQ10)
        assert cdf(spec, spec.mu + 12 * spec.sigma) == pytest.approx(1.0, abs=1e-6)
        assert cdf(spec, spec.mu - 12 * spec.sigma) == pytest.approx(0.0, abs=1e-6)

    def test_skew_only_at_mean(self):
        c = cs(1.0, 0.25, 0.05, 0.0)
        s3 = 0.5**3
        assert gc_cdf(c, 1.0, order=3) == pytest.approx(0.5 + 0.05 / (6 * s3) * PHI0, rel=1e-14)

    @pytest.mark.parametrize("kind,order", [("gram-charlier", 4), ("edgeworth", 2), ("edgeworth", 1)])
    def test_derivative_is_density(self, kind, order):
        spec = ExpansionSpec(kind, order, CHISQ10)
        xs = np.linspace(spec.mu - 5 * spec.sigma, spec.mu + 5 * spec.sigma, 101)
        h = 1e-5
        fd = (cdf(spec, xs + h) - cdf(spec, xs - h)) / (2 * h)
        assert fd == pytest.approx(density(spec, xs), abs=1e-6)
        assert edgeworth_cdf(CHISQ10, 1.0, order=1) == cdf(ExpansionSpec("edgeworth", 1, CHISQ10), 1.0)


class TestNegativity:
    def test_normal_has_none(self):
        assert negativity(ExpansionSpec("gram-charlier", 0, CHISQ10)).is_nonnegative

    def test_positive_kurtosis_alone_stays_positive(self):
        # 1 + k4/24 He_4 has minimum 1 - k4/4 at z^2 = 3
        assert negativity(ExpansionSpec("gram-charlier", 4, cs(0.0, 1.0, 0.0, 3.5))).is_nonnegative

    @pytest.mark.parametrize("k3,k4", [(0.8, 0.0), (0.0, -1.2), (0.5, 5.0)])
    def test_negative_regions_are_flagged(self, k3, k4):
        spec = ExpansionSpec("gram-charlier", 4, cs(0.0, 1.0, k3, k4))
        report = negativity(spec)
        assert not report.is_nonnegative
        assert report.negative_mass < 0
        xs = np.linspace(-12, 12, 2001)
        vals = density(spec, xs)
        flagged = np.array([report.contains(x) for x in xs])
        # every grid point with a negative value lies in a reported interval and vice versa
        assert np.array_equal(flagged[np.abs(vals) > 1e-12], (vals < 0)[np.abs(vals) > 1e-12])

    def test_cdf_decreases_only_where_flagged(self):
        spec = ExpansionSpec("gram-charlier", 4, cs(0.0, 1.0, 0.0, -1.2))
        report = negativity(spec)
        xs = np.linspace(-8, 8, 4001)
        c = cdf(spec, xs)
        drops = np.nonzero(np.diff(c) < -1e-15)[0]
        assert drops.size > 0
        assert all(report.contains(xs[i]) or report.contains(xs[i + 1]) for i in drops)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 5.0) | st.floats(-5.0, -0.2), st.floats(-3, 3), st.floats(-3, 3))
def test_affine_equivariance(a, b, y):
    base = cs(1.0, 0.2, 0.04, 0.01)
    moved = affine_cumulants(base, a, b)
    for kind, order in (("gram-charlier", 4), ("edgeworth", 2), ("gram-charlier", 3)):
        fy = density(ExpansionSpec(kind, order, moved), y)
        fx = density(ExpansionSpec(kind, order, base), (y - b) / a) / abs(a)
        assert fy == pytest.approx(fx, rel=1e-9, abs=1e-300)


class TestGrid:
    def test_columns(self):
        xs = np.linspace(0.2, 2.2, 11)
        grid = density_grid(CHISQ10, xs)
        assert list(grid) == ["x", *GRID_COLUMNS]
        assert grid["gc4"] == pytest.approx(gc_density(CHISQ10, xs, order=4))

    def test_missing_cumulants_skip_columns(self):
        grid = density_grid(cs(1.0, 0.2), [1.0])
        assert list(grid) == ["x", "normal"]

    def test_parallel_evaluation_is_deterministic(self):
        from concurrent.futures import ThreadPoolExecutor

        xs = np.linspace(0, 3, 3001)
        chunks = np.array_split(xs, 8)
        with ThreadPoolExecutor(4) as pool:
            parts = list(pool.map(lambda c: gc_density(CHISQ10, c, order=4), chunks))
        assert np.array_equal(np.concatenate(parts), gc_density(CHISQ10, xs, order=4))

    def test_edgeworth_beats_normal_on_gamma(self):
        xs = np.linspace(0.2, 2.2, 4001)
        ref = gamma_reference(10, 1.0, xs)[0]
        l1 = lambda f: np.trapezoid(np.abs(f - ref), xs)  # noqa: E731
        assert l1(edgeworth_density(CHISQ10, xs, order=2)) < l1(normal_density(CHISQ10, xs))
