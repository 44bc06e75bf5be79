"""Seeded Monte Carlo experiments: convergence rates, tails, calibration.

Replication r draws its own counter-based Philox stream keyed by
``base_seed XOR r``, so results are independent of how the replication range
is partitioned across workers: blocks of fixed size are computed (serially
or in a process pool) and merged in index order, making every report
bit-reproducible for a given configuration regardless of worker count.

Rate experiments fit the log-log slope of the per-n error statistic against
the theoretical rate -beta/(2*beta + d).  Tail experiments build the
empirical exceedance curve of the normalized pointwise deviation
B_n |f_n(x0) - center|, fit its exponent on the window where the curve is
statistically usable, and calibrate the smallest exponential envelope
2 exp(-C4 u^q*) dominating it.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .bandwidth import BandwidthSchedule, bandwidths, normalizer
from .densities import TestDensity, make_test_density
from .estimator import EvaluationGrid, ww_batch
from .kernels import KernelSpec, make_kernel
from .metrics import lp_norm
from .tailbounds import TailModel
from .validation import ContractViolation

__all__ = [
    "ExperimentConfig",
    "RateReport",
    "TailCurve",
    "CalibrationResult",
    "VarianceReport",
    "default_workers",
    "run_rate_experiment",
    "run_tail_experiment",
    "run_variance_comparison",
    "build_tail_curve",
    "fit_tail_exponent",
    "fit_exponent_in_u_window",
    "calibrate_constant",
    "synthetic_exponent_recovery",
    "wilson_interval",
    "write_rate_csv",
    "write_tail_csv",
    "write_variance_csv",
    "read_curve_csv",
]

_BLOCK = 1024
_WORKER_ENV = "WWKDE_WORKERS"


def default_workers() -> int:
    raw = os.environ.get(_WORKER_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def replication_rng(base_seed: int, rep: int) -> np.random.Generator:
    """Independent counter-based stream for replication ``rep``."""
    return np.random.Generator(np.random.Philox(key=int(base_seed) ^ int(rep)))


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of a seeded experiment; hashable via its dict form.

    ``statistic`` chooses what each replication reports: the estimate error
    at a point (``{"kind": "pointwise", "x0": [..]}``), the max over the
    grid (``"sup"``), or an L_p norm (``{"kind": "lp", "p": 2}``); the last
    two require ``grid`` = {"lower": [..], "upper": [..], "num": [..]}.
    """

    density: dict
    kernel: dict
    bandwidth: dict
    n_values: tuple
    replications: int
    base_seed: int
    target: str = "rate"
    statistic: dict = field(default_factory=lambda: {"kind": "pointwise", "x0": [0.0]})
    center: str = "mean"
    grid: dict | None = None
    smoothness: dict | None = None
    tail_levels: int = 48
    acceptance: dict | None = None

    def __post_init__(self):
        object.__setattr__(self, "n_values", tuple(int(n) for n in self.n_values))
        if any(b <= a for a, b in zip(self.n_values, self.n_values[1:])):
            raise ContractViolation("n_values must be strictly increasing")
        if not self.n_values:
            raise ContractViolation("n_values must be nonempty")
        if self.replications < 2:
            raise ContractViolation("replications must be >= 2")
        if self.center not in ("mean", "truth"):
            raise ContractViolation(f"center must be 'mean' or 'truth', got {self.center!r}")
        if self.target not in ("rate", "tail", "calibrate"):
            raise ContractViolation(f"unknown target {self.target!r}")

    def to_dict(self) -> dict:
        return {
            "density": dict(self.density),
            "kernel": dict(self.kernel),
            "bandwidth": dict(self.bandwidth),
            "n_values": list(self.n_values),
            "replications": self.replications,
            "base_seed": self.base_seed,
            "target": self.target,
            "statistic": dict(self.statistic),
            "center": self.center,
            "grid": dict(self.grid) if self.grid else None,
            "smoothness": dict(self.smoothness) if self.smoothness else None,
            "tail_levels": self.tail_levels,
            "acceptance": dict(self.acceptance) if self.acceptance else None,
        }

    @classmethod
    def from_dict(cls, raw: Mapping) -> "ExperimentConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(raw) - known
        if unknown:
            raise ContractViolation(f"unknown config keys: {sorted(unknown)}")
        return cls(**{k: v for k, v in raw.items()})


@dataclass(frozen=True)
class _Build:
    density: TestDensity
    kernel: KernelSpec
    schedule: BandwidthSchedule
    x0: np.ndarray | None
    grid: EvaluationGrid | None
    truth_at_x0: float | None
    truth_on_grid: np.ndarray | None


def _build(cfg: ExperimentConfig) -> _Build:
    density = make_test_density(cfg.density)
    dim = density.dim
    kernel = make_kernel(cfg.kernel.get("family", "epanechnikov"), dim,
                         cfg.kernel.get("order"))
    # schedule smoothness: explicit bandwidth.beta wins, then smoothness.beta
    default_beta = (cfg.smoothness or {}).get("beta", 1.0)
    schedule = BandwidthSchedule(c2=float(cfg.bandwidth.get("c2", 1.0)),
                                 beta=float(cfg.bandwidth.get("beta", default_beta)),
                                 dim=dim,
                                 log_gamma=float(cfg.bandwidth.get("gamma", 0.0)))
    x0 = grid = truth_x0 = truth_grid = None
    kind = cfg.statistic.get("kind", "pointwise")
    if kind == "pointwise":
        x0 = np.asarray(cfg.statistic.get("x0", [0.0] * dim), dtype=float).reshape(-1)
        if x0.size != dim:
            raise ContractViolation(f"x0 has dimension {x0.size}, expected {dim}")
        truth_x0 = float(density.pdf(x0))
    elif kind in ("sup", "lp"):
        if cfg.grid is None:
            raise ContractViolation(f"statistic kind {kind!r} requires a grid")
        grid = EvaluationGrid.regular(cfg.grid["lower"], cfg.grid["upper"],
                                      cfg.grid["num"], cfg.grid.get("kind", "lebesgue"))
        truth_grid = density.pdf(grid.points)
    else:
        raise ContractViolation(f"unknown statistic kind {kind!r}")
    return _Build(density, kernel, schedule, x0, grid, truth_x0, truth_grid)


def _ww_at_point(samples: np.ndarray, x0: np.ndarray, kernel: KernelSpec,
                 h: np.ndarray, hpow: np.ndarray) -> float:
    u = (x0[None, :] - samples) / h[:, None]
    return float(np.dot(kernel.eval(u), hpow) / samples.shape[0])


def _pointwise_block(cfg: ExperimentConfig, built: _Build, n: int,
                     lo: int, hi: int) -> np.ndarray:
    h = bandwidths(built.schedule, n)
    hpow = h ** (-built.kernel.dim)
    out = np.empty(hi - lo)
    for i, rep in enumerate(range(lo, hi)):
        rng = replication_rng(cfg.base_seed, rep)
        samples = built.density.sample(rng, n)
        out[i] = _ww_at_point(samples, built.x0, built.kernel, h, hpow)
    return out


def _error_block(cfg: ExperimentConfig, built: _Build, n: int,
                 lo: int, hi: int) -> np.ndarray:
    kind = cfg.statistic.get("kind", "pointwise")
    if kind == "pointwise":
        vals = _pointwise_block(cfg, built, n, lo, hi)
        return np.abs(vals - built.truth_at_x0)
    p = float(cfg.statistic.get("p", 2.0))
    out = np.empty(hi - lo)
    for i, rep in enumerate(range(lo, hi)):
        rng = replication_rng(cfg.base_seed, rep)
        samples = built.density.sample(rng, n)
        est = ww_batch(samples, built.grid, built.kernel, built.schedule)
        diff = est - built.truth_on_grid
        if kind == "sup":
            out[i] = float(np.max(np.abs(diff)))
        else:
            out[i] = lp_norm(diff, built.grid.weights, p)
    return out


def _pair_block(cfg: ExperimentConfig, built: _Build, n: int,
                lo: int, hi: int) -> np.ndarray:
    """WW and PR estimates at x0 from the same samples, one row per rep."""
    h = bandwidths(built.schedule, n)
    hpow = h ** (-built.kernel.dim)
    h_n = built.schedule.c2 * float(n) ** (-built.schedule.exponent)
    hn_vec = np.full(n, h_n)
    hn_pow = hn_vec ** (-built.kernel.dim)
    out = np.empty((hi - lo, 2))
    for i, rep in enumerate(range(lo, hi)):
        rng = replication_rng(cfg.base_seed, rep)
        samples = built.density.sample(rng, n)
        out[i, 0] = _ww_at_point(samples, built.x0, built.kernel, h, hpow)
        out[i, 1] = _ww_at_point(samples, built.x0, built.kernel, hn_vec, hn_pow)
    return out


_BLOCK_FNS = {"value": _pointwise_block, "error": _error_block, "pair": _pair_block}


def _block_entry(args):
    kind, raw_cfg, n, lo, hi = args
    cfg = ExperimentConfig.from_dict(raw_cfg)
    built = _build(cfg)
    return _BLOCK_FNS[kind](cfg, built, n, lo, hi)


def _run_blocks(kind: str, cfg: ExperimentConfig, built: _Build, n: int,
                workers: int) -> np.ndarray:
    total = cfg.replications
    spans = [(lo, min(lo + _BLOCK, total)) for lo in range(0, total, _BLOCK)]
    if workers <= 1 or len(spans) == 1:
        parts = [_BLOCK_FNS[kind](cfg, built, n, lo, hi) for lo, hi in spans]
    else:
        raw = cfg.to_dict()
        tasks = [(kind, raw, n, lo, hi) for lo, hi in spans]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_block_entry, tasks))
    return np.concatenate(parts)


# ---------------------------------------------------------------------------
# Rate experiments
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RateReport:
    """Per-n RMS errors with the fitted and theoretical log-log slopes."""

    n_values: tuple
    mean_errors: np.ndarray
    stderrs: np.ndarray
    slope: float
    slope_se: float
    theory_slope: float

    def to_jsonable(self) -> dict:
        return {
            "n_values": list(self.n_values),
            "mean_errors": self.mean_errors.tolist(),
            "stderrs": self.stderrs.tolist(),
            "slope": self.slope,
            "slope_se": self.slope_se,
            "theory_slope": self.theory_slope,
        }


def _ls_slope(x: np.ndarray, y: np.ndarray,
              weights: np.ndarray | None = None) -> tuple[float, float]:
    if weights is None:
        weights = np.ones_like(x)
    sw = np.sqrt(weights)
    design = np.vstack([x * sw, sw]).T
    coef, _, _, _ = np.linalg.lstsq(design, y * sw, rcond=None)
    resid = y * sw - design @ coef
    dof = max(1, x.size - 2)
    xbar = float(np.sum(weights * x) / np.sum(weights))
    sxx = float(np.sum(weights * (x - xbar) ** 2))
    se = math.sqrt(float(np.sum(resid ** 2)) / dof / sxx) if sxx > 0 else math.inf
    return float(coef[0]), se


def run_rate_experiment(cfg: ExperimentConfig, workers: int | None = None) -> RateReport:
    """RMS error of the chosen statistic per sample size, with fitted slope.

    A replication failure (non-finite estimate) aborts with the offending
    replication index in the message.
    """
    workers = default_workers() if workers is None else workers
    if len(cfg.n_values) < 2:
        raise ContractViolation("rate experiments need at least 2 sample sizes")
    built = _build(cfg)
    means = np.empty(len(cfg.n_values))
    stderrs = np.empty(len(cfg.n_values))
    for j, n in enumerate(cfg.n_values):
        errs = _run_blocks("error", cfg, built, n, workers)
        if not np.all(np.isfinite(errs)):
            rep = int(np.argmax(~np.isfinite(errs)))
            raise ContractViolation(
                f"non-finite error statistic at n={n}, replication {rep} "
                f"(seed {cfg.base_seed} ^ {rep})")
        sq = errs * errs
        rmse = math.sqrt(float(np.mean(sq)))
        # delta-method standard error of the RMS
        se = float(np.std(sq, ddof=1)) / math.sqrt(len(sq)) / (2.0 * rmse) if rmse > 0 else 0.0
        means[j] = rmse
        stderrs[j] = se
    slope, slope_se = _ls_slope(np.log(np.asarray(cfg.n_values, dtype=float)), np.log(means))
    beta = built.schedule.beta
    dim = built.kernel.dim
    return RateReport(cfg.n_values, means, stderrs, slope, slope_se,
                      theory_slope=-beta / (2.0 * beta + dim))


# ---------------------------------------------------------------------------
# Tail experiments
# ---------------------------------------------------------------------------

def wilson_interval(count: int, total: int, z: float = 1.959963984540054):
    """Wilson score interval for a binomial proportion."""
    if total < 1 or count < 0 or count > total:
        raise ContractViolation("need 0 <= count <= total with total >= 1")
    p = count / total
    denom = 1.0 + z * z / total
    center = (p + z * z / (2.0 * total)) / denom
    half = z * math.sqrt(p * (1.0 - p) / total + z * z / (4.0 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)


@dataclass(frozen=True)
class TailCurve:
    """Empirical exceedance curve of the normalized deviation.

    ``u`` is increasing, ``p_hat`` nonincreasing, Wilson 95% limits per
    point.  ``fitted_exponent`` regresses ln(-ln p_hat) on ln u over the
    window where p_hat lies in [10/M, 0.2]; ``reliable`` is False when
    fewer than 5 points support the fit.
    """

    u: np.ndarray
    p_hat: np.ndarray
    wilson_low: np.ndarray
    wilson_high: np.ndarray
    counts: np.ndarray
    total: int
    sample_size: int
    regime_boundary: float
    fitted_exponent: float
    fitted_se: float
    fit_points: int
    reliable: bool
    center_value: float
    center_offset: float

    def to_jsonable(self) -> dict:
        return {
            "u": self.u.tolist(),
            "p_hat": self.p_hat.tolist(),
            "wilson_low": self.wilson_low.tolist(),
            "wilson_high": self.wilson_high.tolist(),
            "counts": self.counts.tolist(),
            "total": self.total,
            "sample_size": self.sample_size,
            "regime_boundary": self.regime_boundary,
            "fitted_exponent": self.fitted_exponent,
            "fitted_se": self.fitted_se,
            "fit_points": self.fit_points,
            "reliable": self.reliable,
            "center_value": self.center_value,
            "center_offset": self.center_offset,
        }


def build_tail_curve(deviations: np.ndarray, levels: int = 48, p_max: float = 0.25,
                     sample_size: int = 0, regime_boundary: float = float("nan"),
                     center_value: float = float("nan"),
                     center_offset: float = float("nan")) -> TailCurve:
    """Exceedance curve at geometrically spaced levels down to 10/M.

    The u grid is taken from the empirical quantiles at each exceedance
    level (deduplicated), so the curve is deterministic given the
    deviations and its probabilities are nonincreasing by construction.
    """
    devs = np.asarray(deviations, dtype=float)
    total = devs.size
    if total < 10:
        raise ContractViolation("need at least 10 deviations for a tail curve")
    sorted_desc = np.sort(devs)[::-1]
    targets = np.geomspace(p_max, 10.0 / total, levels)
    ranks = np.maximum(1, np.round(targets * total).astype(int))
    us = np.unique(sorted_desc[ranks - 1])
    counts = np.array([int(np.sum(devs > u)) for u in us])
    p_hat = counts / total
    lo_hi = np.array([wilson_interval(c, total) for c in counts])
    curve = TailCurve(u=us, p_hat=p_hat, wilson_low=lo_hi[:, 0], wilson_high=lo_hi[:, 1],
                      counts=counts, total=total, sample_size=sample_size,
                      regime_boundary=regime_boundary, fitted_exponent=math.nan,
                      fitted_se=math.nan, fit_points=0, reliable=False,
                      center_value=center_value, center_offset=center_offset)
    exponent, se, npts, reliable = fit_tail_exponent(curve)
    return replace(curve, fitted_exponent=exponent, fitted_se=se,
                   fit_points=npts, reliable=reliable)


def _exponent_weights(curve: TailCurve, mask: np.ndarray) -> np.ndarray:
    # inverse delta-method variance of ln(-ln p_hat): count * (ln p)^2 / (1-p)
    p = curve.p_hat[mask]
    w = curve.counts[mask] * np.log(p) ** 2 / np.maximum(1e-12, 1.0 - p)
    if not np.any(w > 0):
        return np.ones_like(w)
    return w


def fit_tail_exponent(curve: TailCurve, p_min: float | None = None,
                      p_max: float = 0.2):
    """Slope of ln(-ln p_hat) against ln u over the usable probability window.

    The regression is weighted by the inverse delta-method variance of each
    transformed point, which keeps the deepest (noisiest) points from
    dominating the fit.  Returns (exponent, standard error, points used,
    reliable flag); fewer than 5 usable points marks the fit unreliable.
    """
    if p_min is None:
        if curve.total < 1:
            raise ContractViolation("curve has no replication count; pass p_min explicitly")
        p_min = 10.0 / curve.total
    mask = ((curve.p_hat >= p_min) & (curve.p_hat <= p_max)
            & (curve.p_hat < 1.0) & (curve.u > 0.0))
    npts = int(np.sum(mask))
    if npts < 2:
        return math.nan, math.nan, npts, False
    x = np.log(curve.u[mask])
    y = np.log(-np.log(curve.p_hat[mask]))
    slope, se = _ls_slope(x, y, _exponent_weights(curve, mask))
    return slope, se, npts, npts >= 5


def fit_exponent_in_u_window(curve: TailCurve, u_lo: float, u_hi: float):
    """Local exponent fit restricted to curve points with u in [u_lo, u_hi]."""
    mask = ((curve.u >= u_lo) & (curve.u <= u_hi)
            & (curve.p_hat > 0.0) & (curve.p_hat < 1.0))
    npts = int(np.sum(mask))
    if npts < 2:
        return math.nan, math.nan, npts, False
    x = np.log(curve.u[mask])
    y = np.log(-np.log(curve.p_hat[mask]))
    slope, se = _ls_slope(x, y, _exponent_weights(curve, mask))
    return slope, se, npts, npts >= 5


def run_tail_experiment(cfg: ExperimentConfig, workers: int | None = None) -> TailCurve:
    """Exceedance curve of B_n |f_n(x0) - center| over M replications.

    ``center='mean'`` uses the replication mean (a proxy for the expected
    estimate, removing the bias term); ``center='truth'`` uses the true
    density value.  The normalized offset between the two is reported as
    ``center_offset`` either way.
    """
    workers = default_workers() if workers is None else workers
    if cfg.statistic.get("kind", "pointwise") != "pointwise":
        raise ContractViolation("tail experiments use the pointwise statistic")
    built = _build(cfg)
    n = cfg.n_values[-1]
    values = _run_blocks("value", cfg, built, n, workers)
    if not np.all(np.isfinite(values)):
        rep = int(np.argmax(~np.isfinite(values)))
        raise ContractViolation(f"non-finite estimate at replication {rep}")
    b_n = normalizer(n, built.schedule.beta, built.schedule.dim)
    mean_value = float(np.mean(values))
    center = mean_value if cfg.center == "mean" else built.truth_at_x0
    deviations = b_n * np.abs(values - center)
    offset = b_n * abs(mean_value - built.truth_at_x0)
    tm = TailModel(beta=built.schedule.beta, dim=built.schedule.dim)
    return build_tail_curve(deviations, levels=cfg.tail_levels, sample_size=n,
                            regime_boundary=tm.regime_boundary(n),
                            center_value=center, center_offset=offset)


def synthetic_exponent_recovery(exponent: float = 1.5, total: int = 1_000_000,
                                seed: int = 20260810, levels: int = 48) -> TailCurve:
    """Fitter self-check: deviations drawn with P(>u) = exp(-u^exponent) exactly.

    The inverse transform of an Exp(1) draw E is E^(1/exponent).  Run this
    before trusting any real tail fit.
    """
    rng = replication_rng(seed, 0)
    devs = rng.exponential(size=total) ** (1.0 / exponent)
    return build_tail_curve(devs, levels=levels)


# ---------------------------------------------------------------------------
# Variance comparison against the single-bandwidth baseline
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class VarianceReport:
    """Empirical pointwise variances of the recursive estimator and the
    single-bandwidth baseline from the same samples."""

    sample_size: int
    replications: int
    var_recursive: float
    var_baseline: float
    mc_se: float

    def to_jsonable(self) -> dict:
        return {
            "sample_size": self.sample_size,
            "replications": self.replications,
            "var_recursive": self.var_recursive,
            "var_baseline": self.var_baseline,
            "mc_se": self.mc_se,
        }


def run_variance_comparison(cfg: ExperimentConfig, workers: int | None = None) -> VarianceReport:
    """Pointwise variance of the recursive estimate vs the baseline with
    h_n = c2 * n^(-1/(2*beta+d)), both on identical samples per replication.

    ``mc_se`` combines the Monte Carlo standard errors of both variance
    estimates (each is var * sqrt(2/(M-1))).
    """
    workers = default_workers() if workers is None else workers
    if cfg.statistic.get("kind", "pointwise") != "pointwise":
        raise ContractViolation("variance comparison uses the pointwise statistic")
    built = _build(cfg)
    n = cfg.n_values[-1]
    pairs = _run_blocks("pair", cfg, built, n, workers)
    var_ww = float(np.var(pairs[:, 0], ddof=1))
    var_pr = float(np.var(pairs[:, 1], ddof=1))
    scale = math.sqrt(2.0 / (cfg.replications - 1))
    mc_se = math.hypot(var_ww * scale, var_pr * scale)
    return VarianceReport(sample_size=n, replications=cfg.replications,
                          var_recursive=var_ww, var_baseline=var_pr, mc_se=mc_se)


def write_variance_csv(report: VarianceReport, path) -> None:
    lines = ["n,replications,var_recursive,var_baseline,mc_se",
             f"{report.sample_size},{report.replications},"
             f"{_fmt(report.var_recursive)},{_fmt(report.var_baseline)},{_fmt(report.mc_se)}"]
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# Calibration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CalibrationResult:
    """Largest constant whose envelope still dominates the empirical curve.

    ``falsified`` is set when no constant in the allowed range dominates,
    meaning the observed tail is heavier than the claimed shape; this is a
    reportable outcome, not an exception.
    """

    c4: float
    dominated: bool
    falsified: bool

    def to_jsonable(self) -> dict:
        return {"c4": self.c4, "dominated": self.dominated, "falsified": self.falsified}


def calibrate_constant(curve: TailCurve, tm: TailModel, c_min: float = 1e-9,
                       c_max: float = 1e6, rel_tol: float = 1e-4) -> CalibrationResult:
    """Binary-search the binding constant of 2 exp(-C4 u^q*) over the curve.

    Dominance is tested against the upper Wilson limit at every curve point.
    A curve whose upper limits are all zero is dominated by any constant and
    returns ``c_max``.
    """
    qs = tm.exponent_qstar
    mask = curve.u > 0
    us = curve.u[mask]
    hi_lim = curve.wilson_high[mask]
    if us.size == 0 or np.all(hi_lim <= 0.0):
        return CalibrationResult(c4=c_max, dominated=True, falsified=False)

    def dominates(c: float) -> bool:
        return bool(np.all(2.0 * np.exp(-c * us ** qs) >= hi_lim))

    if not dominates(c_min):
        return CalibrationResult(c4=math.nan, dominated=False, falsified=True)
    if dominates(c_max):
        return CalibrationResult(c4=c_max, dominated=True, falsified=False)
    lo, hi = c_min, c_max
    while hi / lo > 1.0 + rel_tol:
        mid = math.sqrt(lo * hi)
        if dominates(mid):
            lo = mid
        else:
            hi = mid
    return CalibrationResult(c4=lo, dominated=True, falsified=False)


# ---------------------------------------------------------------------------
# Report serialization (shared by the CLI and the verification suite)
# ---------------------------------------------------------------------------

def _fmt(x) -> str:
    return repr(float(x))


def write_rate_csv(report: RateReport, path) -> None:
    lines = ["n,mean_error,stderr"]
    for n, err, se in zip(report.n_values, report.mean_errors, report.stderrs):
        lines.append(f"{n},{_fmt(err)},{_fmt(se)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def write_tail_csv(curve: TailCurve, path) -> None:
    lines = ["u,p_hat,wilson_lo,wilson_hi"]
    for u, p, lo, hi in zip(curve.u, curve.p_hat, curve.wilson_low, curve.wilson_high):
        lines.append(f"{_fmt(u)},{_fmt(p)},{_fmt(lo)},{_fmt(hi)}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_curve_csv(path, total: int = 0) -> TailCurve:
    """Load a tail CSV back into a curve.

    The replication count is not stored in the CSV; pass ``total`` when a
    probability-window fit on the loaded curve is needed (calibration only
    uses u and the Wilson upper limits).
    """
    data = np.genfromtxt(path, delimiter=",", names=True)
    u = np.atleast_1d(data["u"])
    p_hat = np.atleast_1d(data["p_hat"])
    lo = np.atleast_1d(data["wilson_lo"])
    hi = np.atleast_1d(data["wilson_hi"])
    return TailCurve(u=u, p_hat=p_hat, wilson_low=lo, wilson_high=hi,
                     counts=np.round(p_hat * total).astype(int) if total else
                     np.zeros(len(u), dtype=int),
                     total=total, sample_size=0,
                     regime_boundary=math.nan, fitted_exponent=math.nan,
                     fitted_se=math.nan, fit_points=0, reliable=False,
                     center_value=math.nan, center_offset=math.nan)
