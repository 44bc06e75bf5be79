"""Recursive Wolverton-Wagner kernel density estimation.

A streaming multivariate density estimator whose k-th observation is
smoothed at its own bandwidth h_k, so the estimate updates in O(grid) work
per sample with nothing retained; together with the optimal bandwidth
schedule, the matching rate normalizer, exponential tail bounds with
confidence radii, and a seeded Monte Carlo harness that verifies the
claimed convergence rates and tail exponents.
"""

from .bandwidth import (BandwidthSchedule, SmoothnessClass, bandwidth_at, bandwidths,
                        bias_bound, normalizer, target_functional)
from .densities import TestDensity, make_test_density
from .estimator import (EstimatorState, EvaluationGrid, WolvertonWagnerKDE,
                        clip_and_renormalize, pr_batch, ww_batch, ww_init, ww_update)
from .kernels import (KernelSpec, QuadratureSettings, ValidationReport,
                      build_orthogonal_kernel, epanechnikov_kernel, eval_kernel,
                      gaussian_kernel, make_kernel, validate_kernel)
from .metrics import ErrorReport, bias_variance_decompose, error_report, lp_norm
from .simulate import (CalibrationResult, ExperimentConfig, RateReport, TailCurve,
                       VarianceReport, build_tail_curve, calibrate_constant,
                       fit_exponent_in_u_window, fit_tail_exponent, run_rate_experiment,
                       run_tail_experiment, run_variance_comparison,
                       synthetic_exponent_recovery, wilson_interval)
from .tailbounds import (ConvergenceSummary, SearchSettings, TailModel,
                         as_convergence_terms, confidence_radius, fenchel_conjugate,
                         lp_tail_upper, phi, phi_conjugate, tail_lower, tail_two_regime,
                         tail_upper)
from .validation import ContractViolation

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ContractViolation",
    # kernels
    "KernelSpec", "QuadratureSettings", "ValidationReport", "eval_kernel",
    "validate_kernel", "gaussian_kernel", "epanechnikov_kernel",
    "build_orthogonal_kernel", "make_kernel",
    # bandwidth
    "BandwidthSchedule", "SmoothnessClass", "bandwidth_at", "bandwidths",
    "normalizer", "target_functional", "bias_bound",
    # estimator
    "EvaluationGrid", "EstimatorState", "WolvertonWagnerKDE", "ww_init",
    "ww_update", "ww_batch", "pr_batch", "clip_and_renormalize",
    # tail bounds
    "TailModel", "SearchSettings", "ConvergenceSummary", "phi", "phi_conjugate",
    "fenchel_conjugate", "tail_upper", "tail_lower", "tail_two_regime",
    "confidence_radius", "lp_tail_upper", "as_convergence_terms",
    # metrics
    "lp_norm", "ErrorReport", "error_report", "bias_variance_decompose",
    # densities
    "TestDensity", "make_test_density",
    # simulate
    "ExperimentConfig", "RateReport", "TailCurve", "CalibrationResult",
    "VarianceReport", "run_rate_experiment", "run_tail_experiment",
    "run_variance_comparison", "build_tail_curve", "fit_tail_exponent",
    "fit_exponent_in_u_window", "calibrate_constant",
    "synthetic_exponent_recovery", "wilson_interval",
]
