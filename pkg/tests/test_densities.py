import math

import numpy as np
import pytest
from scipy import stats

from wwkde import ContractViolation, make_test_density
from wwkde.simulate import replication_rng


def quadrature_mass(density, num=200_001):
    xs = np.linspace(density.support_lower[0], density.support_upper[0], num)
    return float(np.trapezoid(density.pdf(xs.reshape(-1, 1)), xs))


class TestFamilies:
    def test_standard_gaussian_values(self):
        d = make_test_density("gaussian")
        assert d.pdf(np.array([0.0])) == pytest.approx(1.0 / math.sqrt(2 * math.pi))
        assert quadrature_mass(d) == pytest.approx(1.0, abs=1e-8)

    def test_mixture_closed_form_and_mass(self):
        d = make_test_density({"family": "gaussian_mixture", "weights": [0.3, 0.7],
                               "means": [-2.0, 2.0], "sigmas": [1.0, 1.0]})
        x = np.array([0.5])
        phi = lambda z: math.exp(-z * z / 2.0) / math.sqrt(2 * math.pi)
        expected = 0.3 * phi(2.5) + 0.7 * phi(-1.5)
        assert d.pdf(x) == pytest.approx(expected, rel=1e-12)
        assert quadrature_mass(d) == pytest.approx(1.0, abs=1e-6)

    def test_mixture_weights_must_sum_to_one(self):
        with pytest.raises(ContractViolation):
            make_test_density({"family": "gaussian_mixture", "weights": [0.4, 0.7],
                               "means": [0.0, 1.0]})

    def test_triangular_peak_and_smoothness_tag(self):
        d = make_test_density("triangular")
        assert d.pdf(np.array([0.0])) == 1.0
        assert d.smoothness.beta == 1.0
        assert quadrature_mass(d) == pytest.approx(1.0, abs=1e-9)

    def test_smooth_bump_mass_and_support(self):
        d = make_test_density({"family": "smooth_bump", "dim": 1})
        assert quadrature_mass(d) == pytest.approx(1.0, abs=1e-6)
        assert d.pdf(np.array([1.0])) == 0.0
        assert d.pdf(np.array([0.999])) > 0.0

    def test_two_dimensional_bump_is_product(self):
        d2 = make_test_density({"family": "smooth_bump", "dim": 2})
        d1 = make_test_density({"family": "smooth_bump", "dim": 1})
        pt = np.array([0.3, -0.6])
        assert d2.pdf(pt) == pytest.approx(
            float(d1.pdf(np.array([0.3]))) * float(d1.pdf(np.array([-0.6]))), rel=1e-12)

    def test_unknown_family(self):
        with pytest.raises(ContractViolation):
            make_test_density("cauchy")


class TestSamplers:
    @pytest.mark.parametrize("spec", [
        "gaussian",
        "triangular",
        {"family": "gaussian_mixture", "weights": [0.3, 0.7], "means": [-2.0, 2.0],
         "sigmas": [1.0, 1.0]},
        {"family": "smooth_bump", "dim": 1},
    ])
    def test_kolmogorov_smirnov_against_exact_cdf(self, spec):
        density = make_test_density(spec)
        n = 100_000
        samples = density.sample(replication_rng(20260810, 0), n)[:, 0]
        statistic = stats.kstest(samples, density.cdf).statistic
        assert statistic <= 2.0 / math.sqrt(n), (spec, statistic)

    def test_sampler_is_deterministic_per_stream(self):
        density = make_test_density("triangular")
        a = density.sample(replication_rng(5, 3), 1000)
        b = density.sample(replication_rng(5, 3), 1000)
        assert np.array_equal(a, b)

    def test_multivariate_gaussian_shape(self):
        density = make_test_density({"family": "gaussian", "dim": 3, "sigma": 0.5})
        x = density.sample(replication_rng(1, 0), 500)
        assert x.shape == (500, 3)
        assert abs(x.std() - 0.5) < 0.05

    def test_effective_support_holds_nearly_all_mass(self):
        density = make_test_density("gaussian")
        x = density.sample(replication_rng(2, 0), 200_000)
        assert np.all(x >= density.support_lower[0])
        assert np.all(x <= density.support_upper[0])
