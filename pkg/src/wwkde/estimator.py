"""Recursive Wolverton-Wagner density estimation on a fixed evaluation grid.

The estimate after n samples is f_n(x) = (1/n) * sum_k h_k^(-d) K((x - xi_k)/h_k),
which obeys the one-step recursion

    f_n(x) = ((n-1)/n) f_{n-1}(x) + (1/(n h_n^d)) K((x - xi_n)/h_n),

so the whole state is the current grid values plus the sample count: samples
are never stored.  ``ww_batch`` is the direct-sum oracle used to cross-check
the recursion, and ``pr_batch`` the classical single-bandwidth
Parzen-Rosenblatt baseline.

Values are maintained only on a pre-declared finite grid; suprema over R^d
are approximated by maxima over grid points, with the grid resolution acting
as an explicit approximation parameter.  Estimates from kernels of order
>= 2 may be locally negative and are reported raw; ``clip_and_renormalize``
is the optional post-processing step.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np
from sklearn.base import BaseEstimator

from .bandwidth import BandwidthSchedule, bandwidth_at, bandwidths
from .kernels import KernelSpec, make_kernel
from .validation import ContractViolation, as_point, as_point_batch, check_positive

__all__ = [
    "EvaluationGrid",
    "EstimatorState",
    "ww_init",
    "ww_update",
    "ww_batch",
    "pr_batch",
    "clip_and_renormalize",
    "WolvertonWagnerKDE",
]

# Cap on the size of the (grid x samples) kernel evaluation buffer.
_CHUNK_BUDGET = 4_000_000


@dataclass(frozen=True)
class EvaluationGrid:
    """Fixed query points with quadrature weights.

    Weights encode the measure against which errors are integrated:
    cell volumes for Lebesgue quadrature on a box, probabilities summing to
    one, or a single unit mass for a Dirac point evaluation.
    """

    points: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if pts.shape[0] != w.shape[0]:
            raise ContractViolation(
                f"weights length {w.shape[0]} does not match point count {pts.shape[0]}")
        if np.any(w < 0):
            raise ContractViolation("grid weights must be nonnegative")
        if pts.shape[0] != np.unique(pts, axis=0).shape[0]:
            raise ContractViolation("grid points must be distinct")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "weights", w)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @classmethod
    def regular(cls, lower, upper, num, kind: str = "lebesgue") -> "EvaluationGrid":
        """Regular cell-center grid on a box.

        ``kind='lebesgue'`` gives cell-volume weights (summing to the box
        volume); ``kind='probability'`` normalizes them to sum to one.
        """
        lower = np.atleast_1d(np.asarray(lower, dtype=float))
        upper = np.atleast_1d(np.asarray(upper, dtype=float))
        num = np.atleast_1d(np.asarray(num, dtype=int))
        if not (lower.shape == upper.shape == num.shape):
            raise ContractViolation("lower, upper, num must have matching lengths")
        if np.any(upper <= lower) or np.any(num < 1):
            raise ContractViolation("require upper > lower and num >= 1 per axis")
        axes = []
        deltas = (upper - lower) / num
        for lo, delta, count in zip(lower, deltas, num):
            axes.append(lo + delta * (np.arange(count) + 0.5))
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=1)
        cell = float(np.prod(deltas))
        weights = np.full(pts.shape[0], cell)
        if kind == "probability":
            weights = weights / weights.sum()
        elif kind != "lebesgue":
            raise ContractViolation(f"unknown grid kind {kind!r}")
        return cls(pts, weights)

    @classmethod
    def from_points(cls, points, weights=None) -> "EvaluationGrid":
        pts = as_point_batch(points, name="grid points")
        if weights is None:
            weights = np.full(pts.shape[0], 1.0 / pts.shape[0])
        return cls(pts, weights)

    @classmethod
    def dirac(cls, x0) -> "EvaluationGrid":
        """Unit mass at a single evaluation point."""
        pt = np.atleast_1d(np.asarray(x0, dtype=float)).reshape(1, -1)
        return cls(pt, np.array([1.0]))


@dataclass(frozen=True)
class EstimatorState:
    """Streaming state: sample count plus current values per grid point.

    Updates are strictly sequential per state (each bandwidth depends on the
    arrival index); ``ww_update`` returns a fresh state, so distinct chains
    (one per Monte Carlo replication, say) can run fully in parallel.
    """

    n: int
    values: np.ndarray
    grid: EvaluationGrid
    kernel: KernelSpec
    schedule: BandwidthSchedule


def ww_init(grid: EvaluationGrid, kernel: KernelSpec,
            schedule: BandwidthSchedule) -> EstimatorState:
    """Fresh state: zero samples, zero values."""
    if grid.dim != kernel.dim:
        raise ContractViolation(
            f"grid dimension {grid.dim} does not match kernel dimension {kernel.dim}")
    if schedule.dim != kernel.dim:
        raise ContractViolation(
            f"schedule dimension {schedule.dim} does not match kernel dimension {kernel.dim}")
    return EstimatorState(n=0, values=np.zeros(grid.size), grid=grid,
                          kernel=kernel, schedule=schedule)


def _scaled_kernel_column(grid_points: np.ndarray, xi: np.ndarray, h: float,
                          kernel: KernelSpec) -> np.ndarray:
    u = (grid_points - xi[None, :]) / h
    return kernel.eval(u) * h ** (-kernel.dim)


def ww_update(state: EstimatorState, xi) -> EstimatorState:
    """Absorb one observation; O(grid size) work, nothing retained.

    Non-finite coordinates are rejected with the state unchanged.
    """
    xi = as_point(xi, state.grid.dim, name="xi")
    if not np.all(np.isfinite(xi)):
        raise ContractViolation(f"sample contains a non-finite coordinate: {xi.tolist()}")
    n = state.n + 1
    h = bandwidth_at(state.schedule, n)
    column = _scaled_kernel_column(state.grid.points, xi, h, state.kernel)
    values = state.values * ((n - 1) / n) + column / n
    return replace(state, n=n, values=values)


def ww_batch(samples, grid: EvaluationGrid, kernel: KernelSpec,
             schedule: BandwidthSchedule) -> np.ndarray:
    """Direct-sum estimate (1/n) sum_k h_k^(-d) K((x - xi_k)/h_k) per grid point.

    This is the oracle the recursion must reproduce.  Note the result is not
    permutation-invariant in the samples: h_k depends on arrival order.
    """
    if grid.dim != kernel.dim:
        raise ContractViolation(
            f"grid dimension {grid.dim} does not match kernel dimension {kernel.dim}")
    pts = as_point_batch(samples, grid.dim, require_finite=True)
    n = pts.shape[0]
    if n == 0:
        warnings.warn("ww_batch called with no samples; returning zeros", stacklevel=2)
        return np.zeros(grid.size)
    h = bandwidths(schedule, n)
    hpow = h ** (-kernel.dim)
    values = np.zeros(grid.size)
    chunk = max(1, _CHUNK_BUDGET // max(1, grid.size))
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        diff = grid.points[:, None, :] - pts[None, start:stop, :]
        u = diff / h[start:stop, None]
        kvals = kernel.eval(u.reshape(-1, grid.dim)).reshape(grid.size, stop - start)
        values += kvals @ hpow[start:stop]
    return values / n


def pr_batch(samples, grid: EvaluationGrid, kernel: KernelSpec, h_n: float) -> np.ndarray:
    """Parzen-Rosenblatt estimate with a single bandwidth for all samples."""
    check_positive(h_n, "h_n")
    if grid.dim != kernel.dim:
        raise ContractViolation(
            f"grid dimension {grid.dim} does not match kernel dimension {kernel.dim}")
    pts = as_point_batch(samples, grid.dim, require_finite=True)
    n = pts.shape[0]
    if n == 0:
        warnings.warn("pr_batch called with no samples; returning zeros", stacklevel=2)
        return np.zeros(grid.size)
    values = np.zeros(grid.size)
    chunk = max(1, _CHUNK_BUDGET // max(1, grid.size))
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        diff = grid.points[:, None, :] - pts[None, start:stop, :]
        kvals = kernel.eval((diff / h_n).reshape(-1, grid.dim))
        values += kvals.reshape(grid.size, stop - start).sum(axis=1)
    return values / (n * h_n ** kernel.dim)


def clip_and_renormalize(values: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Clip negative values at zero and rescale to unit weighted mass.

    Optional post-processing for higher-order kernels; estimators never apply
    this silently.
    """
    clipped = np.clip(np.asarray(values, dtype=float), 0.0, None)
    mass = float(np.dot(weights, clipped))
    if mass <= 0.0:
        raise ContractViolation("clipped estimate has zero mass; cannot renormalize")
    return clipped / mass


class WolvertonWagnerKDE(BaseEstimator):
    """Streaming kernel density estimator with per-sample bandwidths.

    Follows the scikit-learn estimator protocol: hyperparameters are stored
    verbatim by ``__init__`` (so ``get_params``/``set_params``/``clone``
    work), and all derived objects are built in ``fit``/``partial_fit``.

    Parameters
    ----------
    kernel : str or KernelSpec, default="epanechnikov"
        Kernel family name ("gaussian", "epanechnikov", "orthogonal") or a
        prebuilt spec.
    order : int, default=1
        Vanishing-moment order for the "orthogonal" family.
    beta : float, default=1.0
        Smoothness the bandwidth schedule is tuned to.
    c2 : float, default=1.0
        Multiplicative bandwidth constant.
    log_gamma : float, default=0.0
        Exponent of the experimental (ln k)^gamma correction.
    grid : EvaluationGrid or None, default=None
        Evaluation grid.  When None, ``fit`` builds a regular grid from the
        data bounding box (streaming via ``partial_fit`` then requires the
        first batch to be representative).
    grid_size : int or None, default=None
        Points per axis for the automatic grid (dimension-dependent default).

    Attributes
    ----------
    state_ : EstimatorState
        Current streaming state.
    values_ : ndarray
        Current estimate per grid point (raw, possibly negative for
        higher-order kernels).
    n_samples_seen_ : int
    """

    def __init__(self, kernel="epanechnikov", order=1, beta=1.0, c2=1.0,
                 log_gamma=0.0, grid=None, grid_size=None):
        self.kernel = kernel
        self.order = order
        self.beta = beta
        self.c2 = c2
        self.log_gamma = log_gamma
        self.grid = grid
        self.grid_size = grid_size

    def _resolve_kernel(self, dim: int) -> KernelSpec:
        if isinstance(self.kernel, KernelSpec):
            if self.kernel.dim != dim:
                raise ContractViolation(
                    f"kernel dimension {self.kernel.dim} does not match data dimension {dim}")
            return self.kernel
        return make_kernel(self.kernel, dim, self.order)

    def _auto_grid(self, X: np.ndarray, kernel: KernelSpec) -> EvaluationGrid:
        dim = X.shape[1]
        per_axis = self.grid_size or {1: 256, 2: 40, 3: 14}.get(dim, 8)
        reach = kernel.support_radius if kernel.bounded_support else 3.0
        pad = self.c2 * reach
        lower = X.min(axis=0) - pad
        upper = X.max(axis=0) + pad
        return EvaluationGrid.regular(lower, upper, [per_axis] * dim)

    def _initialize(self, X: np.ndarray) -> None:
        dim = X.shape[1]
        kernel = self._resolve_kernel(dim)
        grid = self.grid if isinstance(self.grid, EvaluationGrid) else None
        if grid is None and self.grid is not None:
            grid = EvaluationGrid.from_points(self.grid)
        if grid is None:
            grid = self._auto_grid(X, kernel)
        schedule = BandwidthSchedule(c2=self.c2, beta=self.beta, dim=dim,
                                     log_gamma=self.log_gamma)
        self.state_ = ww_init(grid, kernel, schedule)

    def fit(self, X, y=None):
        """Reset the state and absorb the rows of X in order."""
        X = as_point_batch(X, require_finite=True, name="X")
        self._initialize(X)
        return self.partial_fit(X)

    def partial_fit(self, X, y=None):
        """Absorb further observations, initializing on the first call."""
        fitted = hasattr(self, "state_")
        X = as_point_batch(X, dim=self.state_.grid.dim if fitted else None,
                           require_finite=True, name="X")
        if not fitted:
            self._initialize(X)
        state = self.state_
        for row in X:
            state = ww_update(state, row)
        self.state_ = state
        return self

    @property
    def values_(self) -> np.ndarray:
        return self.state_.values.copy()

    @property
    def n_samples_seen_(self) -> int:
        return self.state_.n

    def grid_density(self, clip: bool = False) -> np.ndarray:
        """Current estimate per grid point; optionally clipped/renormalized."""
        if clip:
            return clip_and_renormalize(self.state_.values, self.state_.grid.weights)
        return self.values_

    def __sklearn_is_fitted__(self) -> bool:
        return hasattr(self, "state_")
