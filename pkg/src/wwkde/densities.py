"""Test densities with exact evaluation and exact samplers.

Experiments need truths whose smoothness membership is known: the Gaussian
and the compactly supported C-infinity bump fit any finite smoothness class,
Gaussian mixtures likewise (one-dimensional here), and the triangular
density is the canonical Lipschitz (beta = 1) example.  Every family exposes
an exact pdf, an exact sampler driven by a supplied generator, the exact cdf
in one dimension, and an effective support box holding all but <= 1e-9 of
the mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from numpy.polynomial import legendre

from .bandwidth import SmoothnessClass
from .validation import ContractViolation, as_point_batch

__all__ = ["TestDensity", "make_test_density"]

_SQRT2PI = math.sqrt(2.0 * math.pi)
_SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class TestDensity:
    """A known density: exact pdf, exact sampler, declared smoothness."""

    family: str
    dim: int
    params: dict
    smoothness: SmoothnessClass
    support_lower: np.ndarray
    support_upper: np.ndarray
    _pdf: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    _sampler: Callable[[np.random.Generator, int], np.ndarray] = field(repr=False)
    _cdf: Callable[[np.ndarray], np.ndarray] | None = field(repr=False, default=None)

    def pdf(self, x) -> float | np.ndarray:
        arr = np.asarray(x, dtype=float)
        single = arr.ndim == 1 and arr.size == self.dim
        pts = as_point_batch(arr, self.dim, name="x")
        vals = self._pdf(pts)
        return float(vals[0]) if single else vals

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        if size < 0:
            raise ContractViolation("sample size must be >= 0")
        out = self._sampler(rng, int(size))
        return out.reshape(size, self.dim)

    def cdf(self, x) -> np.ndarray:
        if self._cdf is None:
            raise ContractViolation(f"cdf not available for family {self.family!r} in d={self.dim}")
        return self._cdf(np.asarray(x, dtype=float))


def _norm_cdf(z: np.ndarray) -> np.ndarray:
    from scipy.special import erf
    return 0.5 * (1.0 + erf(z / _SQRT2))


def _gaussian(params: Mapping) -> TestDensity:
    dim = int(params.get("dim", 1))
    mean = np.broadcast_to(np.asarray(params.get("mean", 0.0), dtype=float), (dim,)).copy()
    sigma = np.broadcast_to(np.asarray(params.get("sigma", 1.0), dtype=float), (dim,)).copy()
    if np.any(sigma <= 0):
        raise ContractViolation("gaussian sigma must be positive")
    beta = float(params.get("beta", 2.0))
    const = 1.0 / (_SQRT2PI ** dim * float(np.prod(sigma)))

    def pdf(pts: np.ndarray) -> np.ndarray:
        z = (pts - mean) / sigma
        return const * np.exp(-0.5 * np.einsum("ij,ij->i", z, z))

    def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        return mean + sigma * rng.standard_normal((size, dim))

    cdf = None
    if dim == 1:
        cdf = lambda x: _norm_cdf((x - mean[0]) / sigma[0])
    return TestDensity("gaussian", dim, dict(params), SmoothnessClass(beta=beta),
                       mean - 7.5 * sigma, mean + 7.5 * sigma, pdf, sampler, cdf)


def _gaussian_mixture(params: Mapping) -> TestDensity:
    weights = np.asarray(params["weights"], dtype=float)
    means = np.asarray(params["means"], dtype=float)
    sigmas = np.asarray(params.get("sigmas", np.ones_like(means)), dtype=float)
    if not (weights.shape == means.shape == sigmas.shape) or weights.ndim != 1:
        raise ContractViolation("mixture weights, means, sigmas must be equal-length 1-d")
    if abs(weights.sum() - 1.0) > 1e-12:
        raise ContractViolation(f"mixture weights must sum to 1, got {weights.sum()!r}")
    if np.any(weights < 0) or np.any(sigmas <= 0):
        raise ContractViolation("mixture weights must be >= 0 and sigmas > 0")
    beta = float(params.get("beta", 2.0))
    cumw = np.cumsum(weights)

    def pdf(pts: np.ndarray) -> np.ndarray:
        z = (pts[:, 0:1] - means[None, :]) / sigmas[None, :]
        comp = np.exp(-0.5 * z * z) / (_SQRT2PI * sigmas[None, :])
        return comp @ weights

    def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        idx = np.searchsorted(cumw, rng.random(size), side="right").clip(max=len(weights) - 1)
        return (means[idx] + sigmas[idx] * rng.standard_normal(size)).reshape(size, 1)

    def cdf(x: np.ndarray) -> np.ndarray:
        x = np.atleast_1d(x)
        z = (x[:, None] - means[None, :]) / sigmas[None, :]
        return _norm_cdf(z) @ weights

    lower = float(np.min(means - 7.5 * sigmas))
    upper = float(np.max(means + 7.5 * sigmas))
    return TestDensity("gaussian_mixture", 1, dict(params), SmoothnessClass(beta=beta),
                       np.array([lower]), np.array([upper]), pdf, sampler, cdf)


def _triangular(params: Mapping) -> TestDensity:
    if int(params.get("dim", 1)) != 1:
        raise ContractViolation("triangular density is one-dimensional")

    def pdf(pts: np.ndarray) -> np.ndarray:
        return np.clip(1.0 - np.abs(pts[:, 0]), 0.0, None)

    def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        u = rng.random(size)
        left = u < 0.5
        out = np.where(left, -1.0 + np.sqrt(2.0 * u), 1.0 - np.sqrt(2.0 * (1.0 - u)))
        return out.reshape(size, 1)

    def cdf(x: np.ndarray) -> np.ndarray:
        x = np.clip(np.atleast_1d(x), -1.0, 1.0)
        return np.where(x < 0.0, 0.5 * (1.0 + x) ** 2, 1.0 - 0.5 * (1.0 - x) ** 2)

    return TestDensity("triangular", 1, dict(params), SmoothnessClass(beta=1.0, holder_const=1.0),
                       np.array([-1.0]), np.array([1.0]), pdf, sampler, cdf)


def _bump_normalizer() -> float:
    # integral of exp(-1/(1-t^2)) over [-1, 1]; the integrand is analytic
    # inside and flat at the endpoints, so Gauss-Legendre converges fast.
    nodes, weights = legendre.leggauss(400)
    vals = np.exp(-1.0 / (1.0 - nodes ** 2))
    return float(np.dot(weights, vals))


_BUMP_Z = _bump_normalizer()


def _bump1(t: np.ndarray) -> np.ndarray:
    inside = np.abs(t) < 1.0
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        vals = np.where(inside, np.exp(-1.0 / np.where(inside, 1.0 - t * t, 1.0)), 0.0)
    return vals / _BUMP_Z


def _smooth_bump(params: Mapping) -> TestDensity:
    dim = int(params.get("dim", 1))
    beta = float(params.get("beta", 2.0))
    peak1 = math.exp(-1.0) / _BUMP_Z

    def pdf(pts: np.ndarray) -> np.ndarray:
        return _bump1(pts).prod(axis=1)

    def sampler(rng: np.random.Generator, size: int) -> np.ndarray:
        # exact rejection per axis from Uniform[-1, 1] x Uniform[0, peak]
        out = np.empty((size, dim))
        for axis in range(dim):
            filled = 0
            while filled < size:
                batch = max(64, int(2.5 * (size - filled)))
                cand = rng.uniform(-1.0, 1.0, batch)
                height = rng.uniform(0.0, peak1, batch)
                accepted = cand[height <= _bump1(cand)]
                take = min(size - filled, accepted.size)
                out[filled:filled + take, axis] = accepted[:take]
                filled += take
        return out

    cdf = None
    if dim == 1:
        xs = np.linspace(-1.0, 1.0, 16_001)
        dens = _bump1(xs)
        cum = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) * 0.5 * np.diff(xs))])
        cum /= cum[-1]

        def cdf(x: np.ndarray) -> np.ndarray:
            return np.interp(np.atleast_1d(x), xs, cum, left=0.0, right=1.0)

    return TestDensity("smooth_bump", dim, dict(params), SmoothnessClass(beta=beta),
                       -np.ones(dim), np.ones(dim), pdf, sampler, cdf)


_FAMILIES = {
    "gaussian": _gaussian,
    "gaussian_mixture": _gaussian_mixture,
    "triangular": _triangular,
    "smooth_bump": _smooth_bump,
}


def make_test_density(spec: Mapping | str) -> TestDensity:
    """Build a test density from a family name or a config mapping."""
    if isinstance(spec, str):
        spec = {"family": spec}
    family = spec.get("family")
    if family not in _FAMILIES:
        raise ContractViolation(
            f"unknown density family {family!r}; expected one of {sorted(_FAMILIES)}")
    params = {k: v for k, v in spec.items() if k != "family"}
    return _FAMILIES[family](params)
