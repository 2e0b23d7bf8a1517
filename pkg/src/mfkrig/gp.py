"""Ordinary Kriging: concentrated maximum likelihood fitting and prediction.

The machinery here works with a general trend basis ``F`` (n x p) estimated by
generalized least squares. Ordinary Kriging uses ``F = 1``; the multi-fidelity
levels reuse the same code with ``F = [m_lower(x), 1]``.

Log-likelihood convention: ``-(n/2) log sigma2 - (1/2) log det(R + nugget I)``,
i.e. the concentrated log-likelihood with the ``(n/2)(log(2 pi) + 1)`` constant
dropped.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np
from scipy import linalg
from scipy.optimize import Bounds, minimize
from scipy.stats import qmc

from .dataset import Dataset
from .errors import (IllConditionedError, InputShapeError, InsufficientDataError,
                     InvalidArgumentError, UnfittableDataError)
from .kernels import KernelConfig, KernelFamily, kernel_matrix

log = logging.getLogger(__name__)

_TINY = np.finfo(float).tiny
# objective value for infeasible theta; finite so simplex arithmetic stays defined
_PENALTY = 1e300


@dataclass(frozen=True)
class SearchConfig:
    """Settings for the multi-start Nelder-Mead likelihood search.

    Bounds apply to ``log(theta * span**2)`` where ``span`` is the per-column
    range of the training inputs, so the same box fits data in any units.
    """

    n_restarts: int = 10
    seed: int = 0
    log_theta_bounds: tuple = (-10.0, 7.0)
    nugget: float = 1e-10
    max_nugget: float = 1e-4
    workers: int = 1
    xatol: float = 1e-6
    fatol: float = 1e-10
    maxfev: Optional[int] = None

    def __post_init__(self):
        lo, hi = self.log_theta_bounds
        if not lo < hi:
            raise InvalidArgumentError("log_theta_bounds must satisfy lo < hi")
        if self.n_restarts < 1:
            raise InvalidArgumentError("n_restarts must be >= 1")
        if self.nugget < 0 or self.max_nugget < 0:
            raise InvalidArgumentError("nugget must be non-negative")


@dataclass(frozen=True)
class Hyperparameters:
    kernel: KernelConfig
    sigma2: float
    nugget: float
    mu: float

    def __post_init__(self):
        if self.sigma2 < 0 or self.nugget < 0:
            raise InvalidArgumentError("sigma2 and nugget must be non-negative")


@dataclass(frozen=True)
class Prediction:
    mean: np.ndarray
    variance: np.ndarray
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(self.variance)

    def with_bounds(self, z: float = 1.96) -> "Prediction":
        half = z * self.std
        return Prediction(self.mean, self.variance, self.mean - half, self.mean + half)


class GlsFactor(NamedTuple):
    """Cached products of one factorization of ``R + nugget I``."""

    L: np.ndarray  # lower Cholesky factor
    Ft: np.ndarray  # L^-1 F
    beta: np.ndarray  # GLS trend coefficients
    alpha: np.ndarray  # (R + nugget I)^-1 (y - F beta)
    sigma2: float
    loglik: float
    trend_cov: np.ndarray  # (F^T (R + nugget I)^-1 F)^+  (pseudo-inverse)


def gls_factor(R: np.ndarray, y: np.ndarray, F: np.ndarray, nugget: float) -> GlsFactor:
    n = y.size
    A = R + nugget * np.eye(n) if nugget else R
    try:
        L = linalg.cholesky(A, lower=True, check_finite=False)
    except linalg.LinAlgError:
        raise IllConditionedError(
            f"correlation matrix is not positive definite (nugget={nugget:g})",
            nugget=nugget) from None
    if not np.all(np.isfinite(L)) or np.min(np.diag(L)) <= 0:
        raise IllConditionedError(f"degenerate Cholesky factor (nugget={nugget:g})", nugget=nugget)
    Ft = linalg.solve_triangular(L, F, lower=True, check_finite=False)
    yt = linalg.solve_triangular(L, y, lower=True, check_finite=False)
    U, s, Vt = np.linalg.svd(Ft, full_matrices=False)
    keep = s > s[0] * 1e-12 if s.size and s[0] > 0 else np.zeros_like(s, dtype=bool)
    Vs = Vt[keep].T / s[keep]
    beta = Vs @ (U[:, keep].T @ yt)
    resid = yt - Ft @ beta
    sigma2 = float(resid @ resid) / n
    alpha = linalg.solve_triangular(L.T, resid, lower=False, check_finite=False)
    logdet = 2.0 * float(np.sum(np.log(np.diag(L))))
    loglik = -0.5 * n * np.log(max(sigma2, _TINY)) - 0.5 * logdet
    return GlsFactor(L, Ft, beta, alpha, sigma2, float(loglik), Vs @ Vs.T)


def gls_predict(factor: GlsFactor, kernel: KernelConfig, X: np.ndarray, nugget: float,
                Xq: np.ndarray, Fq: np.ndarray):
    """Return ``(mean, variance, residual_mean)`` at query points.

    ``residual_mean`` is the stochastic part ``r^T alpha`` of the mean; the
    trend part is ``Fq @ beta``. Variances are clamped at zero.
    """
    r = kernel_matrix(kernel, Xq, X)
    resid_mean = r @ factor.alpha
    mean = Fq @ factor.beta + resid_mean
    rt = linalg.solve_triangular(factor.L, r.T, lower=True, check_finite=False)
    u = factor.Ft.T @ rt - Fq.T
    trend_term = np.einsum("im,ij,jm->m", u, factor.trend_cov, u)
    var = factor.sigma2 * (1.0 + nugget - np.sum(rt * rt, axis=0) + trend_term)
    return mean, np.maximum(var, 0.0), resid_mean


def input_span(X: np.ndarray) -> np.ndarray:
    span = np.ptp(X, axis=0)
    return np.where(span > 0, span, 1.0)


def _start_points(k: int, search: SearchConfig) -> np.ndarray:
    lo, hi = search.log_theta_bounds
    sampler = qmc.Halton(d=k, scramble=True, seed=np.random.default_rng(search.seed))
    return lo + (hi - lo) * sampler.random(search.n_restarts)


class FitResult(NamedTuple):
    kernel: KernelConfig
    nugget: float
    factor: GlsFactor
    warnings: tuple


def _nugget_ladder(search: SearchConfig):
    nugget = search.nugget
    yield nugget
    nugget = nugget * 10 if nugget > 0 else 1e-10
    while nugget <= search.max_nugget * (1 + 1e-12):
        yield nugget
        nugget *= 10


def optimize_theta(X: np.ndarray, y: np.ndarray, F: np.ndarray, family: KernelFamily,
                   search: SearchConfig, projection=None,
                   starts: Optional[np.ndarray] = None) -> FitResult:
    """Maximize the concentrated likelihood over log-theta.

    ``starts`` overrides the low-discrepancy restart points (rows in the
    optimizer's log space). Restarts may run on a thread pool; the winner is
    the lowest-index restart with the best objective, independent of timing.
    """
    family = KernelFamily.parse(family)
    if projection is None:
        k = X.shape[1]
        scale2 = input_span(X) ** 2
    else:
        k = projection.n_components
        scale2 = np.ones(k)  # projection carries the input scaling
    lo, hi = search.log_theta_bounds
    bounds = Bounds(np.full(k, lo), np.full(k, hi))
    x0s = _start_points(k, search) if starts is None else np.atleast_2d(starts)
    warnings = []

    def to_kernel(u):
        return KernelConfig(family, np.exp(u) / scale2, projection)

    for nugget in _nugget_ladder(search):
        def objective(u):
            try:
                kern = to_kernel(np.clip(u, lo, hi))
                f = gls_factor(kernel_matrix(kern, X), y, F, nugget)
            except IllConditionedError:
                return _PENALTY
            return -f.loglik if np.isfinite(f.loglik) else _PENALTY

        def run(x0):
            res = minimize(objective, x0, method="Nelder-Mead", bounds=bounds,
                           options={"xatol": search.xatol, "fatol": search.fatol,
                                    "maxfev": search.maxfev or 400 * k})
            return np.clip(res.x, lo, hi), float(res.fun)

        if search.workers > 1 and len(x0s) > 1:
            with ThreadPoolExecutor(max_workers=search.workers) as pool:
                results = list(pool.map(run, x0s))
        else:
            results = [run(x0) for x0 in x0s]

        best_u, best_f = None, _PENALTY
        for u, fval in results:
            if fval < best_f:
                best_u, best_f = u, fval
        if best_u is not None:
            kern = to_kernel(best_u)
            factor = gls_factor(kernel_matrix(kern, X), y, F, nugget)
            return FitResult(kern, nugget, factor, tuple(warnings))
        msg = f"all restarts failed to factorize with nugget={nugget:g}"
        log.warning(msg)
        warnings.append(msg)
    raise UnfittableDataError(
        f"no restart produced a positive definite correlation matrix up to "
        f"nugget={search.max_nugget:g}")


def _check_data(data: Dataset, nugget: float):
    if nugget == 0 and data.conflicting_duplicates():
        raise InvalidArgumentError(
            "duplicate inputs with different responses need a positive nugget")


def log_marginal_likelihood(data: Dataset, kernel: KernelConfig, nugget: float):
    """Concentrated log-likelihood with the MLE constant trend and variance.

    Returns ``(loglik, mu_hat, sigma2_hat)``.
    """
    if kernel.dim != data.dim:
        raise InputShapeError(f"kernel acts on {kernel.dim} dims, data has {data.dim}")
    f = gls_factor(kernel_matrix(kernel, data.X), data.y, np.ones((data.n, 1)), nugget)
    return f.loglik, float(f.beta[0]), f.sigma2


@dataclass(frozen=True, eq=False)
class KrigingModel:
    """A fitted ordinary Kriging model. Immutable; safe to share."""

    training: Dataset
    params: Hyperparameters
    factor: GlsFactor = field(repr=False)
    warnings: tuple = ()

    @classmethod
    def from_hyperparameters(cls, training: Dataset, kernel: KernelConfig, nugget: float,
                             warnings=()) -> "KrigingModel":
        """Build the model (and its factorization) for fixed kernel parameters."""
        factor = gls_factor(kernel_matrix(kernel, training.X), training.y,
                            np.ones((training.n, 1)), nugget)
        params = Hyperparameters(kernel, factor.sigma2, nugget, float(factor.beta[0]))
        return cls(training, params, factor, tuple(warnings))

    @property
    def loglik(self) -> float:
        return self.factor.loglik

    @property
    def dim(self) -> int:
        return self.training.dim

    def predict(self, Xq) -> Prediction:
        return predict(self, Xq)


def optimize_hyperparameters(data: Dataset, family="squared_exponential",
                             search: SearchConfig = SearchConfig()) -> Hyperparameters:
    return _fit(data, family, search).params


def _fit(data: Dataset, family, search: SearchConfig) -> KrigingModel:
    if data.n < 2:
        raise InsufficientDataError("Kriging needs at least two training points")
    _check_data(data, search.nugget)
    res = optimize_theta(data.X, data.y, np.ones((data.n, 1)), family, search)
    return KrigingModel.from_hyperparameters(data, res.kernel, res.nugget, res.warnings)


def fit_kriging(data: Dataset, family="squared_exponential",
                search: SearchConfig = SearchConfig()) -> KrigingModel:
    """Fit ordinary Kriging by multi-start concentrated maximum likelihood."""
    return _fit(data, family, search)


def as_query(Xq, dim: int) -> np.ndarray:
    Xq = np.asarray(Xq, dtype=float)
    if Xq.ndim == 0:
        Xq = Xq.reshape(1, 1)
    elif Xq.ndim == 1:
        Xq = Xq.reshape(-1, 1) if dim == 1 else Xq.reshape(1, -1)
    if Xq.ndim != 2 or Xq.shape[1] != dim:
        raise InputShapeError(f"query points have shape {Xq.shape}, model expects (*, {dim})")
    return Xq


def predict(model: KrigingModel, Xq) -> Prediction:
    Xq = as_query(Xq, model.dim)
    mean, var, _ = gls_predict(model.factor, model.params.kernel, model.training.X,
                               model.params.nugget, Xq, np.ones((Xq.shape[0], 1)))
    return Prediction(mean, var)
