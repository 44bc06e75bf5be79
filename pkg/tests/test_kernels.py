import math

import numpy as np
import pytest

from wwkde import (ContractViolation, QuadratureSettings, build_orthogonal_kernel,
                   epanechnikov_kernel, eval_kernel, gaussian_kernel, make_kernel,
                   validate_kernel)
from wwkde.kernels import KernelSpec


def trapezoid_moment(kernel, power, lo=-1.0, hi=1.0, num=200_001):
    """Independent dense-trapezoid oracle for 1-d moment integrals."""
    xs = np.linspace(lo, hi, num)
    vals = eval_kernel(kernel, xs.reshape(-1, 1)) * xs ** power
    return float(np.trapezoid(vals, xs))


class TestEvaluation:
    def test_gaussian_peak_is_normal_density_maximum(self):
        k = gaussian_kernel(1)
        assert eval_kernel(k, [0.0]) == pytest.approx(1.0 / math.sqrt(2 * math.pi), abs=1e-12)

    def test_epanechnikov_zero_outside_support(self):
        k = epanechnikov_kernel(1)
        assert eval_kernel(k, [2.0]) == 0.0
        assert eval_kernel(k, [-1.0]) == 0.0

    def test_epanechnikov_closed_form_value(self):
        # 0.75 * (1 - 0.25) computed by hand
        k = epanechnikov_kernel(1)
        assert eval_kernel(k, [0.5]) == pytest.approx(0.5625, abs=1e-15)

    def test_dimension_mismatch_raises(self):
        k = gaussian_kernel(2)
        with pytest.raises(ContractViolation):
            eval_kernel(k, [1.0])

    def test_eval_is_pure(self):
        k = build_orthogonal_kernel(1, 3)
        xs = np.linspace(-1.2, 1.2, 57).reshape(-1, 1)
        first = eval_kernel(k, xs)
        second = eval_kernel(k, xs)
        assert np.array_equal(first, second)


class TestValidation:
    def test_gaussian_passes_all_conditions(self):
        report = validate_kernel(gaussian_kernel(1))
        assert report.passed
        assert abs(report.integral - 1.0) <= 1e-8
        assert abs(report.moments[(1,)]) <= 1e-10

    def test_epanechnikov_square_integral_closed_form(self):
        # integral of (0.75 (1 - x^2))^2 over [-1, 1] = 2 * (9/16) * (8/15)
        expected = 2.0 * (9.0 / 16.0) * (8.0 / 15.0)
        report = validate_kernel(epanechnikov_kernel(1))
        assert report.passed
        assert report.square_integral == pytest.approx(expected, abs=1e-12)
        assert expected == 0.6

    def test_shifted_kernel_fails_symmetry(self):
        def rule(pts):
            t = pts[:, 0] - 1.0
            return np.where(np.abs(t) <= 1.0, 0.75 * (1.0 - t * t), 0.0)

        shifted = KernelSpec(dim=1, order=0, support_radius=2.0, sup_bound=0.75,
                             eval_rule=rule, family="custom")
        report = validate_kernel(shifted)
        assert not report.checks["symmetry"]
        assert not report.passed

    def test_nonfinite_kernel_reports_location(self):
        def rule(pts):
            vals = np.ones(pts.shape[0])
            vals[pts[:, 0] > 0.5] = np.inf
            return vals

        bad = KernelSpec(dim=1, order=0, support_radius=1.0, sup_bound=1.0,
                         eval_rule=rule, family="custom")
        report = validate_kernel(bad)
        assert not report.passed
        assert any("non-finite" in msg for msg in report.messages)

    def test_moment_table_extends_to_requested_order(self):
        report = validate_kernel(epanechnikov_kernel(1), max_moment_order=4)
        assert (4,) in report.moments
        # second moment of the Epanechnikov kernel is 1/5
        assert report.moments[(2,)] == pytest.approx(0.2, abs=1e-12)


class TestOrthogonalConstruction:
    def test_order_one_reproduces_epanechnikov(self):
        k = build_orthogonal_kernel(1, 1)
        xs = np.linspace(-1, 1, 101).reshape(-1, 1)
        expected = 0.75 * (1 - xs[:, 0] ** 2)
        assert np.allclose(eval_kernel(k, xs), expected, atol=1e-12)
        assert abs(trapezoid_moment(k, 1)) <= 1e-12

    def test_order_three_closed_form_coefficients(self):
        # solving [4/3, -4/15; 4/15, 4/105] a = (1, 0) by hand gives
        # k(x) = (15/32) (3 - 10 x^2 + 7 x^4) on [-1, 1]
        k = build_orthogonal_kernel(1, 3)
        xs = np.linspace(-1, 1, 201)
        expected = (15.0 / 32.0) * (3.0 - 10.0 * xs ** 2 + 7.0 * xs ** 4)
        assert np.allclose(eval_kernel(k, xs.reshape(-1, 1)), expected, atol=1e-10)

    def test_order_three_kills_second_moment_and_goes_negative(self):
        k = build_orthogonal_kernel(1, 3)
        assert abs(trapezoid_moment(k, 2)) <= 1e-8
        assert abs(trapezoid_moment(k, 0) - 1.0) <= 1e-8
        xs = np.linspace(-1, 1, 2001).reshape(-1, 1)
        assert eval_kernel(k, xs).min() < 0.0

    def test_two_dimensional_product_normalizes(self):
        k = build_orthogonal_kernel(2, 1)
        # independent oracle: the product structure factorizes the integral,
        # so a dense 1-d trapezoid of the axis factor squared must match
        axis = build_orthogonal_kernel(1, 1)
        factor_integral = trapezoid_moment(axis, 0)
        assert factor_integral ** 2 == pytest.approx(1.0, abs=1e-8)
        report = validate_kernel(k)
        assert report.integral == pytest.approx(1.0, abs=1e-10)
        # coarse direct tensor check of the full 2-d evaluation rule
        xs = np.linspace(-1, 1, 801)
        xx, yy = np.meshgrid(xs, xs, indexing="ij")
        pts = np.stack([xx.ravel(), yy.ravel()], axis=1)
        vals = eval_kernel(k, pts).reshape(801, 801)
        integral = np.trapezoid(np.trapezoid(vals, xs, axis=1), xs)
        assert integral == pytest.approx(1.0, abs=1e-5)

    @pytest.mark.parametrize("order", [0, 1, 2, 3, 5])
    def test_constructed_kernels_validate_at_declared_order(self, order):
        for dim in (1, 2):
            k = build_orthogonal_kernel(dim, order)
            assert k.order >= order or order == 0
            report = validate_kernel(k)
            assert report.passed, report.messages

    def test_odd_moments_vanish_for_all_families(self):
        settings = QuadratureSettings()
        for k in (gaussian_kernel(1), epanechnikov_kernel(2), build_orthogonal_kernel(1, 3)):
            report = validate_kernel(k, settings, max_moment_order=5)
            for index, value in report.moments.items():
                if sum(index) % 2 == 1:
                    assert abs(value) <= 1e-10, (index, value)


class TestMakeKernel:
    def test_dispatch(self):
        assert make_kernel("gaussian", 2).family == "gaussian"
        assert make_kernel("epanechnikov", 1).family == "epanechnikov"
        assert make_kernel("orthogonal", 1, 3).order == 3

    def test_unknown_family(self):
        with pytest.raises(ContractViolation):
            make_kernel("tophat", 1)
