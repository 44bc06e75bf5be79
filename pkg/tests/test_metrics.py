import math

import numpy as np
import pytest

from wwkde import ContractViolation, bias_variance_decompose, error_report, lp_norm
from wwkde.metrics import write_error_report_csv


class TestLpNorm:
    def test_constant_under_probability_measure(self):
        values = np.full(20, 3.7)
        weights = np.full(20, 1.0 / 20)
        for p in (1.0, 2.0, 5.0, math.inf):
            assert lp_norm(values, weights, p) == pytest.approx(3.7, rel=1e-12)

    def test_hand_computed_euclidean_case(self):
        # sqrt(0.5 * 9 + 0.5 * 16) = sqrt(12.5)
        assert lp_norm([3.0, 4.0], [0.5, 0.5], 2.0) == pytest.approx(math.sqrt(12.5))

    def test_sup_sentinel(self):
        assert lp_norm([-5.0, 2.0], [0.5, 0.5], math.inf) == 5.0

    def test_rejects_negative_weights_and_small_p(self):
        with pytest.raises(ContractViolation):
            lp_norm([1.0], [-1.0], 2.0)
        with pytest.raises(ContractViolation):
            lp_norm([1.0], [1.0], 0.5)

    def test_monotone_in_p_under_probability_measure(self):
        rng = np.random.default_rng(8)
        for _ in range(25):
            values = rng.standard_normal(30)
            weights = rng.random(30)
            weights /= weights.sum()
            ps = [1.0, 1.5, 2.0, 4.0, 8.0]
            norms = [lp_norm(values, weights, p) for p in ps]
            norms.append(lp_norm(values, weights, math.inf))
            assert all(a <= b + 1e-12 for a, b in zip(norms, norms[1:]))


class TestErrorReport:
    def test_normalized_entries_are_exact_multiples(self):
        report = error_report([1.0, 2.0], [0.0, 0.0], [0.5, 0.5], ps=(1.0, 2.0), b_n=7.0)
        for p, err in report.lp_errors.items():
            assert report.normalized[p] == 7.0 * err
        assert report.normalized_sup == 7.0 * report.sup_error

    def test_jsonable(self):
        report = error_report([1.0], [0.5], [1.0], ps=(2.0,), b_n=2.0)
        payload = report.to_jsonable()
        assert payload["lp_errors"]["2.0"] == pytest.approx(0.5)

    def test_csv_export_round_trips(self, tmp_path):
        report = error_report([1.0, -2.0], [0.0, 0.0], [0.5, 0.5], ps=(1.0, 2.0), b_n=3.0)
        path = tmp_path / "errors.csv"
        write_error_report_csv(report, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "p,error,normalized_error"
        assert lines[-1].startswith("inf,")
        p, err, norm = lines[1].split(",")
        assert float(norm) == 3.0 * float(err)


class TestBiasVarianceDecomposition:
    def test_identical_replications_have_zero_bias_and_variance(self):
        truth = np.array([0.2, 0.4, 0.4])
        reps = np.tile(truth, (5, 1))
        report = bias_variance_decompose(reps, truth)
        assert np.allclose(report.pointwise_bias, 0.0)
        assert np.allclose(report.pointwise_variance, 0.0)

    def test_symmetric_two_replication_case(self):
        # replications t-1 and t+1: bias 0, unbiased variance 2
        truth = np.array([1.0, -2.0, 0.5])
        reps = np.vstack([truth - 1.0, truth + 1.0])
        report = bias_variance_decompose(reps, truth)
        assert np.allclose(report.pointwise_bias, 0.0)
        assert np.allclose(report.pointwise_variance, 2.0)

    def test_mse_identity(self):
        rng = np.random.default_rng(12)
        truth = rng.standard_normal(40)
        reps = truth + rng.standard_normal((9, 40))
        report = bias_variance_decompose(reps, truth)
        mse = np.mean((reps - truth) ** 2, axis=0)
        m = reps.shape[0]
        recomposed = report.pointwise_bias ** 2 + report.pointwise_variance * (m - 1) / m
        assert np.max(np.abs(mse - recomposed)) <= 1e-12

    def test_contract_checks(self):
        with pytest.raises(ContractViolation):
            bias_variance_decompose(np.ones((1, 3)), np.ones(3))
        with pytest.raises(ContractViolation):
            bias_variance_decompose(np.ones((3, 4)), np.ones(3))
