import math

import numpy as np
import pytest

from wwkde import (BandwidthSchedule, ContractViolation, EvaluationGrid,
                   ExperimentConfig, TailModel, bandwidths, build_tail_curve,
                   calibrate_constant, epanechnikov_kernel, fit_tail_exponent,
                   lp_norm, make_test_density, run_rate_experiment,
                   run_tail_experiment, run_variance_comparison,
                   synthetic_exponent_recovery, wilson_interval, ww_batch, ww_init,
                   ww_update)
from wwkde.simulate import replication_rng, write_rate_csv, write_tail_csv


def small_tail_config(**overrides):
    base = dict(
        density={"family": "triangular"},
        kernel={"family": "epanechnikov"},
        bandwidth={"beta": 1.0, "c2": 0.5},
        n_values=[500],
        replications=4000,
        base_seed=101,
        target="tail",
        statistic={"kind": "pointwise", "x0": [0.0]},
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestConfig:
    def test_round_trip(self):
        cfg = small_tail_config()
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg

    def test_rejects_unknown_keys_and_bad_values(self):
        with pytest.raises(ContractViolation):
            ExperimentConfig.from_dict({**small_tail_config().to_dict(), "bogus": 1})
        with pytest.raises(ContractViolation):
            small_tail_config(n_values=[100, 100])
        with pytest.raises(ContractViolation):
            small_tail_config(center="median")


class TestWilson:
    def test_known_interval(self):
        lo, hi = wilson_interval(5, 100)
        assert 0.0 < lo < 0.05 < hi < 0.12

    def test_degenerate_counts(self):
        lo, hi = wilson_interval(0, 50)
        assert lo == pytest.approx(0.0, abs=1e-12) and hi > 0.0
        lo, hi = wilson_interval(50, 50)
        assert hi == pytest.approx(1.0, abs=1e-12) and lo < 1.0


class TestTailCurve:
    def test_monotone_probabilities_and_bounds(self):
        rng = replication_rng(3, 0)
        curve = build_tail_curve(rng.exponential(size=20_000))
        assert np.all(np.diff(curve.u) > 0)
        assert np.all(np.diff(curve.p_hat) <= 0)
        assert np.all((curve.p_hat >= curve.wilson_low - 1e-12)
                      & (curve.p_hat <= curve.wilson_high + 1e-12))
        assert np.all((curve.p_hat >= 0) & (curve.p_hat <= 1))

    def test_fitter_recovers_synthetic_exponents(self):
        for exponent in (1.2, 1.5, 2.0):
            curve = synthetic_exponent_recovery(exponent=exponent, total=400_000, seed=99)
            assert curve.fitted_exponent == pytest.approx(exponent, abs=0.05)
            assert curve.reliable

    def test_too_few_points_marked_unreliable(self):
        rng = replication_rng(4, 0)
        curve = build_tail_curve(rng.exponential(size=64), levels=6)
        exponent, _, npts, reliable = fit_tail_exponent(curve)
        assert npts < 5 and not reliable


class TestCalibration:
    def test_exact_synthetic_curve_recovers_constant(self):
        tm = TailModel(beta=1.0, dim=1)
        us = np.linspace(0.5, 5.0, 60)
        p = np.minimum(1.0, 2.0 * np.exp(-3.0 * us ** tm.exponent_qstar))
        curve = build_tail_curve_from_arrays(us, p)
        result = calibrate_constant(curve, tm)
        assert result.c4 == pytest.approx(3.0, abs=1e-3)
        assert result.dominated and not result.falsified

    def test_identically_zero_curve_returns_maximum(self):
        tm = TailModel(beta=1.0, dim=1)
        curve = build_tail_curve_from_arrays(np.linspace(1, 5, 10), np.zeros(10))
        result = calibrate_constant(curve, tm, c_max=1e6)
        assert result.c4 == 1e6 and result.dominated

    def test_calibrated_bound_dominates_post_hoc(self):
        cfg = small_tail_config()
        curve = run_tail_experiment(cfg, workers=1)
        tm = TailModel(beta=1.0, dim=1)
        result = calibrate_constant(curve, tm)
        assert not result.falsified and math.isfinite(result.c4)
        bound = 2.0 * np.exp(-result.c4 * curve.u[curve.u > 0] ** tm.exponent_qstar)
        assert np.all(bound >= curve.wilson_high[curve.u > 0])


def build_tail_curve_from_arrays(us, p_hat):
    """Idealized curve with degenerate Wilson limits (infinite-sample case)."""
    from wwkde.simulate import TailCurve
    return TailCurve(u=np.asarray(us, dtype=float), p_hat=np.asarray(p_hat, dtype=float),
                     wilson_low=np.asarray(p_hat, dtype=float),
                     wilson_high=np.asarray(p_hat, dtype=float),
                     counts=np.zeros(len(us), dtype=int), total=0, sample_size=0,
                     regime_boundary=math.nan, fitted_exponent=math.nan,
                     fitted_se=math.nan, fit_points=0, reliable=False,
                     center_value=math.nan, center_offset=math.nan)


class TestReproducibility:
    def test_identical_configs_bit_identical_reports(self, tmp_path):
        cfg = small_tail_config()
        a = run_tail_experiment(cfg, workers=1)
        b = run_tail_experiment(cfg, workers=1)
        assert np.array_equal(a.u, b.u) and np.array_equal(a.p_hat, b.p_hat)
        write_tail_csv(a, tmp_path / "a.csv")
        write_tail_csv(b, tmp_path / "b.csv")
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_worker_count_does_not_change_results(self, tmp_path):
        cfg = small_tail_config(replications=2500)
        serial = run_tail_experiment(cfg, workers=1)
        parallel = run_tail_experiment(cfg, workers=3)
        write_tail_csv(serial, tmp_path / "s.csv")
        write_tail_csv(parallel, tmp_path / "p.csv")
        assert (tmp_path / "s.csv").read_bytes() == (tmp_path / "p.csv").read_bytes()

    def test_rate_reports_deterministic_across_workers(self, tmp_path):
        cfg = ExperimentConfig(
            density={"family": "triangular"},
            kernel={"family": "epanechnikov"},
            bandwidth={"beta": 1.0, "c2": 1.0},
            n_values=[128, 256, 512],
            replications=60,
            base_seed=77,
            target="rate",
            statistic={"kind": "pointwise", "x0": [0.0]},
        )
        r1 = run_rate_experiment(cfg, workers=1)
        r2 = run_rate_experiment(cfg, workers=2)
        write_rate_csv(r1, tmp_path / "r1.csv")
        write_rate_csv(r2, tmp_path / "r2.csv")
        assert (tmp_path / "r1.csv").read_bytes() == (tmp_path / "r2.csv").read_bytes()


class TestRateExperiment:
    def test_grid_statistics_run(self):
        cfg = ExperimentConfig(
            density={"family": "triangular"},
            kernel={"family": "epanechnikov"},
            bandwidth={"beta": 1.0, "c2": 1.0},
            n_values=[64, 128],
            replications=20,
            base_seed=5,
            target="rate",
            statistic={"kind": "lp", "p": 2.0},
            grid={"lower": [-2.0], "upper": [2.0], "num": [61]},
        )
        report = run_rate_experiment(cfg, workers=1)
        assert report.mean_errors[1] < report.mean_errors[0]
        assert report.theory_slope == pytest.approx(-1.0 / 3.0)

    def test_sup_statistic_runs(self):
        cfg = ExperimentConfig(
            density={"family": "gaussian", "beta": 2.0},
            kernel={"family": "epanechnikov"},
            bandwidth={"beta": 2.0, "c2": 1.0},
            n_values=[64, 256],
            replications=16,
            base_seed=6,
            target="rate",
            statistic={"kind": "sup"},
            grid={"lower": [-3.0], "upper": [3.0], "num": [41]},
        )
        report = run_rate_experiment(cfg, workers=1)
        assert np.all(report.mean_errors > 0)

    def test_smoothness_key_feeds_schedule_default(self):
        cfg = ExperimentConfig(
            density={"family": "gaussian", "beta": 2.0},
            kernel={"family": "epanechnikov"},
            bandwidth={"c2": 1.0},
            smoothness={"beta": 2.0, "L": 1.0},
            n_values=[64, 128],
            replications=8,
            base_seed=6,
            target="rate",
            statistic={"kind": "pointwise", "x0": [0.0]},
        )
        report = run_rate_experiment(cfg, workers=1)
        assert report.theory_slope == pytest.approx(-0.4)


class TestVarianceComparison:
    def test_recursive_variance_not_larger_than_baseline(self):
        cfg = ExperimentConfig(
            density={"family": "triangular"},
            kernel={"family": "epanechnikov"},
            bandwidth={"beta": 1.0, "c2": 1.0},
            n_values=[1000],
            replications=200,
            base_seed=31,
            target="tail",
            statistic={"kind": "pointwise", "x0": [0.0]},
        )
        report = run_variance_comparison(cfg, workers=1)
        assert report.var_baseline >= report.var_recursive - report.mc_se

    def test_variance_scales_like_bandwidth_harmonic_sum(self):
        # var(f_n(x0)) * n^2 / sum h_k^(-d) should hover around
        # f(x0) * int K^2 = 0.6 with finite-h and replication slack
        density = make_test_density("triangular")
        kernel = epanechnikov_kernel(1)
        schedule = BandwidthSchedule(beta=1.0, dim=1)
        grid = EvaluationGrid.dirac([0.0])
        for n in (400, 800, 1600):
            h = bandwidths(schedule, n)
            values = np.empty(200)
            for rep in range(200):
                rng = replication_rng(505, rep)
                values[rep] = ww_batch(density.sample(rng, n), grid, kernel, schedule)[0]
            ratio = values.var(ddof=1) * n ** 2 / float(np.sum(h ** -1.0))
            assert 0.25 <= ratio <= 0.75, (n, ratio)


class TestRateComparison:
    def test_detuned_schedule_converges_slower(self):
        # a schedule decaying like k^-0.9 starves late samples of bandwidth;
        # its fitted slope must be strictly worse (closer to zero)
        common = dict(
            density={"family": "triangular"},
            kernel={"family": "epanechnikov"},
            n_values=[256, 512, 1024, 2048, 4096],
            replications=80,
            base_seed=71,
            target="rate",
            statistic={"kind": "pointwise", "x0": [0.0]},
        )
        tuned = run_rate_experiment(
            ExperimentConfig(bandwidth={"beta": 1.0, "c2": 1.0}, **common), workers=1)
        # exponent 0.9 corresponds to beta = (1/0.9 - 1)/2 in one dimension
        detuned = run_rate_experiment(
            ExperimentConfig(bandwidth={"beta": (1.0 / 0.9 - 1.0) / 2.0, "c2": 1.0},
                             **common), workers=1)
        assert detuned.slope > tuned.slope + 0.1

    def test_nonfinite_replication_aborts_with_index(self):
        # subnormal bandwidth constant: h^-1 overflows to inf and the
        # kernel-weighted sum degenerates to nan in replication 0
        cfg = ExperimentConfig(
            density={"family": "triangular"},
            kernel={"family": "epanechnikov"},
            bandwidth={"beta": 1.0, "c2": 1e-310},
            n_values=[16, 32],
            replications=4,
            base_seed=1,
            target="rate",
            statistic={"kind": "pointwise", "x0": [0.0]},
        )
        with np.errstate(over="ignore", invalid="ignore"):
            with pytest.raises(ContractViolation, match="replication 0"):
                run_rate_experiment(cfg, workers=1)


class TestAlmostSureTrajectory:
    def test_l2_error_trend_along_one_stream(self):
        # a single seeded trajectory with n doubling: late L2 errors must
        # drop below the earliest ones (almost-sure convergence proxy)
        density = make_test_density("triangular")
        kernel = epanechnikov_kernel(1)
        schedule = BandwidthSchedule(beta=1.0, dim=1)
        grid = EvaluationGrid.regular([-1.5], [1.5], [121], kind="probability")
        truth = density.pdf(grid.points)
        rng = replication_rng(20260810, 0)
        state = ww_init(grid, kernel, schedule)
        errors = []
        checkpoints = [2 ** k for k in range(4, 17)]
        for target_n in checkpoints:
            draw = density.sample(rng, target_n - state.n)
            for row in draw:
                state = ww_update(state, row)
            errors.append(lp_norm(state.values - truth, grid.weights, 2.0))
        assert max(errors[-4:]) < min(errors[:2])
