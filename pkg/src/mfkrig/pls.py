"""Single-response partial least squares (PLS1) by NIPALS."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateResponseError, InputShapeError, InvalidArgumentError


@dataclass(frozen=True)
class PlsProjection:
    """PLS weight matrix plus the centering/scaling used to compute it.

    ``weights`` is ``d x h`` with unit-norm columns. ``x_scale`` is the
    per-column divisor applied to the inputs before fitting (ones when the
    inputs were only centered).
    """

    weights: np.ndarray
    x_mean: np.ndarray
    y_mean: float
    x_scale: np.ndarray = field(default=None)

    def __post_init__(self):
        w = np.array(self.weights, dtype=float, ndmin=2)
        if w.shape[1] > w.shape[0]:
            raise InvalidArgumentError("more PLS components than input dimensions")
        scale = np.ones(w.shape[0]) if self.x_scale is None else np.asarray(self.x_scale, float)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "x_mean", np.asarray(self.x_mean, dtype=float).reshape(-1))
        object.__setattr__(self, "x_scale", scale.reshape(-1))
        object.__setattr__(self, "y_mean", float(self.y_mean))

    @property
    def n_components(self) -> int:
        return self.weights.shape[1]

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.tolist(),
            "x_mean": self.x_mean.tolist(),
            "x_scale": self.x_scale.tolist(),
            "y_mean": self.y_mean,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "PlsProjection":
        return cls(np.array(doc["weights"], dtype=float), doc["x_mean"], doc["y_mean"],
                   doc["x_scale"])


def _fix_sign(w: np.ndarray) -> np.ndarray:
    k = np.argmax(np.abs(w))
    return -w if w[k] < 0 else w


def pls_fit(X, y, n_components: int, scale: bool = False):
    """Fit PLS1 weights by NIPALS on centered (optionally range-scaled) data.

    The sign of every weight column is fixed so that its largest-magnitude
    entry is positive. If a deflated cross-covariance vanishes, the remaining
    direction of largest input variance is used instead.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=float).reshape(-1)
    n, d = X.shape
    if y.size != n:
        raise InputShapeError(f"X has {n} rows but y has {y.size} entries")
    if n < 2:
        raise InvalidArgumentError("PLS needs at least two samples")
    h = int(n_components)
    if h < 1 or h > min(d, n - 1):
        raise InvalidArgumentError(f"n_components={h} must lie in [1, min(d, n-1)] = "
                                   f"[1, {min(d, n - 1)}]")
    x_mean = X.mean(axis=0)
    y_mean = float(y.mean())
    Xc = X - x_mean
    yc = y - y_mean
    span = np.ptp(X, axis=0)
    x_scale = np.where(span > 0, span, 1.0) if scale else np.ones(d)
    if d == 1:
        return PlsProjection(np.ones((1, 1)), x_mean, y_mean, x_scale)
    if np.all(np.abs(yc) <= 1e-14 * max(1.0, abs(y_mean))):
        raise DegenerateResponseError("response has zero variance")
    if np.all(span == 0):
        raise InvalidArgumentError("all input columns are constant")
    Xc = Xc / x_scale

    W = np.zeros((d, h))
    Xk, yk = Xc.copy(), yc.copy()
    for k in range(h):
        w = Xk.T @ yk
        norm = np.linalg.norm(w)
        if norm <= 1e-12 * np.linalg.norm(Xc) * np.linalg.norm(yc):
            # response exhausted: fall back to the leading residual input direction
            w = np.linalg.svd(Xk, full_matrices=False)[2][0]
            norm = np.linalg.norm(w)
        w = _fix_sign(w / norm)
        t = Xk @ w
        tt = t @ t
        if tt == 0.0:
            raise DegenerateResponseError(f"PLS component {k + 1} has zero score variance")
        p = Xk.T @ t / tt
        Xk = Xk - np.outer(t, p)
        yk = yk - (yk @ t / tt) * t
        W[:, k] = w
    return PlsProjection(W, x_mean, y_mean, x_scale)


def pls_scores(projection: PlsProjection, X) -> np.ndarray:
    """Score vectors ``t_k`` for the data a projection was fitted on.

    Recomputes the deflation sequence; used for orthogonality checks.
    """
    X = np.asarray(X, dtype=float).reshape(len(X), -1)
    Xk = (X - projection.x_mean) / projection.x_scale
    T = np.zeros((X.shape[0], projection.n_components))
    for k in range(projection.n_components):
        t = Xk @ projection.weights[:, k]
        T[:, k] = t
        Xk = Xk - np.outer(t, Xk.T @ t / (t @ t))
    return T
