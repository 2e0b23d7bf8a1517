"""Stationary correlation functions.

All kernels are parameterized by per-dimension inverse squared lengthscales
``theta``: the weighted squared distance is ``sum_l theta_l * (x_l - x'_l)**2``.
A :class:`KernelConfig` may carry a PLS projection, in which case ``theta``
holds one value per PLS component and is expanded with :func:`project_theta`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import TYPE_CHECKING, Optional

import numpy as np

from .errors import DomainError, InputShapeError

if TYPE_CHECKING:
    from .pls import PlsProjection

THETA_FLOOR = 1e-10

_SQRT3 = np.sqrt(3.0)
_SQRT5 = np.sqrt(5.0)


class KernelFamily(str, enum.Enum):
    SQUARED_EXPONENTIAL = "squared_exponential"
    MATERN52 = "matern52"
    MATERN32 = "matern32"

    @classmethod
    def parse(cls, value) -> "KernelFamily":
        if isinstance(value, cls):
            return value
        aliases = {"se": cls.SQUARED_EXPONENTIAL, "gaussian": cls.SQUARED_EXPONENTIAL,
                   "squar_exp": cls.SQUARED_EXPONENTIAL, "rbf": cls.SQUARED_EXPONENTIAL}
        key = str(value).lower()
        if key in aliases:
            return aliases[key]
        try:
            return cls(key)
        except ValueError:
            raise DomainError(f"unknown kernel family {value!r}") from None


@dataclass(frozen=True)
class KernelConfig:
    family: KernelFamily
    theta: np.ndarray
    projection: Optional["PlsProjection"] = None

    def __post_init__(self):
        object.__setattr__(self, "family", KernelFamily.parse(self.family))
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float)).copy()
        if theta.ndim != 1 or theta.size == 0:
            raise InputShapeError("theta must be a non-empty vector")
        if not np.all(theta > 0) or not np.all(np.isfinite(theta)):
            raise DomainError(f"theta components must be positive and finite, got {theta}")
        if self.projection is not None and theta.size != self.projection.n_components:
            raise InputShapeError(
                f"theta has {theta.size} entries but projection has "
                f"{self.projection.n_components} components")
        theta.setflags(write=False)
        object.__setattr__(self, "theta", theta)

    @property
    def dim(self) -> int:
        """Input dimension the kernel acts on."""
        if self.projection is not None:
            return self.projection.weights.shape[0]
        return self.theta.size

    def effective_theta(self) -> np.ndarray:
        if self.projection is None:
            return self.theta
        return project_theta(self.theta, self.projection)

    def with_theta(self, theta) -> "KernelConfig":
        return KernelConfig(self.family, theta, self.projection)


def project_theta(theta_h, projection: "PlsProjection") -> np.ndarray:
    """Expand component-wise theta to one value per input dimension.

    ``theta_eff[l] = sum_k theta_h[k] * w[l, k]**2 / scale[l]**2`` floored at
    ``THETA_FLOOR``. With the default unit scale this is the plain KPLS map.
    """
    theta_h = np.atleast_1d(np.asarray(theta_h, dtype=float))
    if np.any(theta_h <= 0):
        raise DomainError("projected theta must be strictly positive")
    w = projection.weights
    if theta_h.size != w.shape[1]:
        raise InputShapeError(f"expected {w.shape[1]} components, got {theta_h.size}")
    eff = (w ** 2) @ theta_h
    eff = eff / projection.x_scale ** 2
    return np.maximum(eff, THETA_FLOOR)


def _correlation(family: KernelFamily, d2: np.ndarray) -> np.ndarray:
    if family is KernelFamily.SQUARED_EXPONENTIAL:
        return np.exp(-d2)
    r = np.sqrt(d2)
    if family is KernelFamily.MATERN52:
        s = _SQRT5 * r
        return (1.0 + s + s * s / 3.0) * np.exp(-s)
    s = _SQRT3 * r
    return (1.0 + s) * np.exp(-s)


def _as_points(X, dim: int, name: str) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 0:
        X = X.reshape(1, 1)
    elif X.ndim == 1:
        # a flat vector is a set of 1-D points when dim == 1, else one point
        X = X.reshape(-1, 1) if dim == 1 else X.reshape(1, -1)
    if X.ndim != 2 or X.shape[1] != dim:
        raise InputShapeError(f"{name} has shape {X.shape}, expected (*, {dim})")
    return X


def weighted_sqdist(theta: np.ndarray, X: np.ndarray, Xp: np.ndarray) -> np.ndarray:
    diff = X[:, None, :] - Xp[None, :, :]
    return np.einsum("ijk,k->ij", diff * diff, theta)


def kernel_eval(config: KernelConfig, x, x_prime) -> float:
    """Correlation between two single points."""
    x = _as_points(np.atleast_1d(x).reshape(1, -1), config.dim, "x")
    xp = _as_points(np.atleast_1d(x_prime).reshape(1, -1), config.dim, "x_prime")
    return float(kernel_matrix(config, x, xp)[0, 0])


def kernel_matrix(config: KernelConfig, X, X_prime=None) -> np.ndarray:
    """Correlation matrix between two point sets (``X_prime`` defaults to ``X``)."""
    X = _as_points(X, config.dim, "X")
    same = X_prime is None
    Xp = X if same else _as_points(X_prime, config.dim, "X_prime")
    d2 = weighted_sqdist(config.effective_theta(), X, Xp)
    K = _correlation(config.family, d2)
    if same:
        np.fill_diagonal(K, 1.0)
    return K
