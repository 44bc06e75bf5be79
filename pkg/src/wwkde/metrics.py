"""Error summaries of density estimates: L_p norms, sup norm, bias/variance."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .validation import ContractViolation

__all__ = [
    "lp_norm",
    "ErrorReport",
    "error_report",
    "bias_variance_decompose",
    "write_error_report_csv",
]


def lp_norm(values, weights, p: float) -> float:
    """Weighted L_p norm (sum_i w_i |v_i|^p)^(1/p); p = inf gives max |v_i|.

    The weights encode the integration measure (probabilities, cell volumes,
    or a unit Dirac mass), so under a probability measure the norm is
    nondecreasing in p.
    """
    v = np.abs(np.asarray(values, dtype=float))
    w = np.asarray(weights, dtype=float)
    if v.shape != w.shape:
        raise ContractViolation("values and weights must have matching shapes")
    if np.any(w < 0):
        raise ContractViolation("weights must be nonnegative")
    if math.isinf(p):
        return float(np.max(v)) if v.size else 0.0
    if p < 1:
        raise ContractViolation(f"p must be >= 1 (or inf), got {p}")
    return float(np.dot(w, v ** p) ** (1.0 / p))


@dataclass(frozen=True)
class ErrorReport:
    """L_p / sup errors, their B_n-normalized versions, and (for replicated
    runs) pointwise bias and variance arrays."""

    lp_errors: dict
    sup_error: float
    normalized: dict
    normalized_sup: float
    pointwise_bias: np.ndarray | None = None
    pointwise_variance: np.ndarray | None = None

    def to_jsonable(self) -> dict:
        out = {
            "lp_errors": {str(p): v for p, v in self.lp_errors.items()},
            "sup_error": self.sup_error,
            "normalized": {str(p): v for p, v in self.normalized.items()},
            "normalized_sup": self.normalized_sup,
        }
        if self.pointwise_bias is not None:
            out["pointwise_bias"] = self.pointwise_bias.tolist()
            out["pointwise_variance"] = self.pointwise_variance.tolist()
        return out


def error_report(values, truth, weights, ps=(1.0, 2.0), b_n: float = 1.0) -> ErrorReport:
    """Errors of one estimate against the known truth on a common grid."""
    diff = np.asarray(values, dtype=float) - np.asarray(truth, dtype=float)
    lp = {float(p): lp_norm(diff, weights, p) for p in ps}
    sup = lp_norm(diff, weights, math.inf)
    return ErrorReport(lp_errors=lp, sup_error=sup,
                       normalized={p: b_n * e for p, e in lp.items()},
                       normalized_sup=b_n * sup)


def write_error_report_csv(report: ErrorReport, path) -> None:
    """CSV export with one row per norm order (the sup row is labeled inf)."""
    lines = ["p,error,normalized_error"]
    for p in sorted(report.lp_errors):
        lines.append(f"{repr(float(p))},{repr(float(report.lp_errors[p]))},"
                     f"{repr(float(report.normalized[p]))}")
    lines.append(f"inf,{repr(float(report.sup_error))},{repr(float(report.normalized_sup))}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def bias_variance_decompose(replicated_values, truth, weights=None,
                            ps=(1.0, 2.0), b_n: float = 1.0) -> ErrorReport:
    """Pointwise bias/variance over replications sharing one grid.

    ``pointwise_bias`` is the replication mean minus the truth and
    ``pointwise_variance`` the unbiased sample variance, so the mean squared
    error decomposes as bias^2 + variance * (M-1)/M pointwise.  The L_p
    entries summarize the replication-mean deviation (the bias curve).
    """
    reps = np.asarray(replicated_values, dtype=float)
    truth = np.asarray(truth, dtype=float)
    if reps.ndim != 2:
        raise ContractViolation("replicated_values must be a (M, G) array")
    if reps.shape[0] < 2:
        raise ContractViolation("need at least 2 replications")
    if reps.shape[1] != truth.shape[0]:
        raise ContractViolation("replication grids do not match the truth grid")
    mean = reps.mean(axis=0)
    bias = mean - truth
    variance = reps.var(axis=0, ddof=1)
    if weights is None:
        weights = np.full(truth.shape[0], 1.0 / truth.shape[0])
    lp = {float(p): lp_norm(bias, weights, p) for p in ps}
    sup = lp_norm(bias, weights, math.inf)
    return ErrorReport(lp_errors=lp, sup_error=sup,
                       normalized={p: b_n * e for p, e in lp.items()},
                       normalized_sup=b_n * sup,
                       pointwise_bias=bias, pointwise_variance=variance)
