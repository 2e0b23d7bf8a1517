"""Recursive multi-fidelity co-kriging.

Level 1 is ordinary Kriging on the cheapest data. Every higher level ``i`` is
a GP whose trend basis is ``[m_{i-1}(x), 1]``: the GLS coefficient on the
first column is the scaling factor ``rho_{i-1}`` and the remaining GP is the
discrepancy ``delta_i``. Predictions follow

    m_i(x)  = rho_{i-1} * m_{i-1}(x) + m_delta_i(x)
    s_i(x)^2 = rho_{i-1}^2 * s_{i-1}(x)^2 + s_delta_i(x)^2
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .dataset import Dataset
from .errors import InputShapeError, InsufficientDataError, InvalidArgumentError, NestingError
from .gp import (GlsFactor, Prediction, SearchConfig, as_query, gls_factor, gls_predict,
                 input_span, optimize_theta)
from .kernels import KernelConfig, KernelFamily, kernel_matrix
from .pls import PlsProjection, pls_fit

log = logging.getLogger(__name__)

DEFAULT_NESTING_TOL = 1e-9
DEFAULT_PLS_COMPONENTS = 3


class Variant(str, enum.Enum):
    MFK = "mfk"
    MFK_PLS = "mfk_pls"
    MFK_PLSK = "mfk_plsk"

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, cls):
            return value
        key = str(value).lower().replace("-", "_")
        # "MFK-KPLS" appears as a synonym of MFK-PLS in the literature
        key = {"mfk_kpls": "mfk_pls", "mfkpls": "mfk_pls", "mfkplsk": "mfk_plsk"}.get(key, key)
        try:
            return cls(key)
        except ValueError:
            raise InvalidArgumentError(f"unknown MFK variant {value!r}") from None

    @property
    def uses_pls(self) -> bool:
        return self is not Variant.MFK


@dataclass(frozen=True)
class NestingReport:
    satisfied: bool
    missing_points: tuple
    tolerance: float
    level: int = 2
    relaxed: bool = False

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "satisfied": self.satisfied,
            "missing_points": [list(p) for p in self.missing_points],
            "tolerance": self.tolerance,
            "relaxed": self.relaxed,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "NestingReport":
        return cls(doc["satisfied"], tuple(tuple(p) for p in doc["missing_points"]),
                   doc["tolerance"], doc.get("level", 2), doc.get("relaxed", False))

    def describe(self) -> str:
        if self.satisfied:
            return f"level {self.level}: design nested (tol={self.tolerance:g})"
        pts = ", ".join("(" + ", ".join(f"{v:g}" for v in p) + ")" for p in self.missing_points)
        return (f"level {self.level}: {len(self.missing_points)} point(s) missing from the "
                f"lower-fidelity design (tol={self.tolerance:g}): {pts}")


def check_nesting(lf: Dataset, hf: Dataset, tol: float = DEFAULT_NESTING_TOL,
                  level: int = 2) -> NestingReport:
    """Report high-fidelity inputs with no low-fidelity input within ``tol`` (max-norm)."""
    if lf.dim != hf.dim:
        raise InputShapeError(f"LF data has dimension {lf.dim}, HF data has {hf.dim}")
    if tol < 0:
        raise InvalidArgumentError("tolerance must be non-negative")
    dist = np.max(np.abs(hf.X[:, None, :] - lf.X[None, :, :]), axis=2)
    missing = ~np.any(dist <= tol, axis=1)
    points = tuple(tuple(float(v) for v in row) for row in hf.X[missing])
    return NestingReport(not points, points, float(tol), level)


@dataclass(frozen=True, eq=False)
class MfkLevel:
    """One fitted level. ``factor.beta`` is ``[mu]`` on level 1, ``[rho, mu]`` above."""

    training: Dataset
    kernel: KernelConfig
    nugget: float
    factor: GlsFactor = field(repr=False)

    @property
    def rho(self) -> Optional[float]:
        return float(self.factor.beta[0]) if self.factor.beta.size == 2 else None

    @property
    def mu(self) -> float:
        return float(self.factor.beta[-1])

    @property
    def sigma2(self) -> float:
        return self.factor.sigma2

    @property
    def loglik(self) -> float:
        return self.factor.loglik


def _basis(lower_mean: Optional[np.ndarray], n: int) -> np.ndarray:
    if lower_mean is None:
        return np.ones((n, 1))
    return np.column_stack([lower_mean, np.ones(n)])


@dataclass(frozen=True, eq=False)
class MfkModel:
    levels: tuple
    variant: Variant = Variant.MFK
    nesting_reports: tuple = ()
    warnings: tuple = ()

    @property
    def rho(self) -> np.ndarray:
        return np.array([lev.rho for lev in self.levels[1:]])

    @property
    def dim(self) -> int:
        return self.levels[0].training.dim

    @property
    def training(self) -> Dataset:
        return self.levels[-1].training

    @property
    def nesting_report(self) -> Optional[NestingReport]:
        """Report for the top level pair (the one the paper's nesting rule names)."""
        return self.nesting_reports[-1] if self.nesting_reports else None

    def predict_levels(self, Xq) -> list:
        """``[(mean, variance, delta_mean), ...]`` for every level, lowest first."""
        Xq = as_query(Xq, self.dim)
        out = []
        lower_mean = lower_var = None
        for lev in self.levels:
            Fq = _basis(lower_mean, Xq.shape[0])
            mean, var, resid = gls_predict(lev.factor, lev.kernel, lev.training.X, lev.nugget,
                                           Xq, Fq)
            delta_mean = resid + lev.mu
            if lower_var is not None:
                var = lev.rho ** 2 * lower_var + var
            out.append((mean, var, delta_mean))
            lower_mean, lower_var = mean, var
        return out

    def predict(self, Xq) -> Prediction:
        mean, var, _ = self.predict_levels(Xq)[-1]
        return Prediction(mean, var)


def predict_mfk(model: MfkModel, Xq) -> Prediction:
    return model.predict(Xq)


def build_levels(datasets: Sequence[Dataset], kernels: Sequence[KernelConfig],
                 nuggets: Sequence[float]) -> tuple:
    """Factorize every level for fixed kernel parameters (used on model load)."""
    levels = []
    for data, kern, nug in zip(datasets, kernels, nuggets):
        lower = _lower_mean(levels, data.X)
        F = _basis(lower, data.n)
        factor = gls_factor(kernel_matrix(kern, data.X), data.y, F, nug)
        levels.append(MfkLevel(data, kern, nug, factor))
    return tuple(levels)


def _lower_mean(levels: list, X: np.ndarray) -> Optional[np.ndarray]:
    if not levels:
        return None
    tmp = MfkModel(tuple(levels))
    return tmp.predict_levels(X)[-1][0]


def fit_mfk(datasets: Sequence[Dataset], variant="mfk", family="squared_exponential",
            search: SearchConfig = SearchConfig(), strict_nesting: bool = True,
            nesting_tol: float = DEFAULT_NESTING_TOL,
            n_components: Optional[int] = None) -> MfkModel:
    """Fit an s-level recursive co-kriging model; ``datasets`` run cheapest first.

    With ``strict_nesting`` a design that is not contained in the level below
    raises :class:`NestingError`; otherwise the lower-level posterior mean is
    used at the missing points and the relaxation is recorded.
    PLS variants project the top-level kernel onto PLS directions fitted on
    the top-level data; MFK_PLSK then re-optimizes the expanded
    full-dimensional theta starting from the projected solution.
    """
    variant = Variant.parse(variant)
    family = KernelFamily.parse(family)
    datasets = list(datasets)
    if len(datasets) < 2:
        raise InsufficientDataError("multi-fidelity Kriging needs at least two levels")
    dim = datasets[0].dim
    for i, data in enumerate(datasets):
        if data.dim != dim:
            raise InputShapeError(f"level {i + 1} has dimension {data.dim}, expected {dim}")
        if data.n < 2:
            raise InsufficientDataError(f"level {i + 1} has {data.n} point(s); need >= 2")
        if search.nugget == 0 and data.conflicting_duplicates():
            raise InvalidArgumentError(
                f"level {i + 1} has duplicate inputs with different responses")
    fids = [d.fidelity for d in datasets]
    if any(b <= a for a, b in zip(fids, fids[1:])):
        raise InvalidArgumentError(f"fidelity tags must strictly increase, got {fids}")

    reports = []
    for i in range(1, len(datasets)):
        rep = check_nesting(datasets[i - 1], datasets[i], nesting_tol, level=i + 1)
        if not rep.satisfied:
            if strict_nesting:
                raise NestingError(rep.describe(), rep)
            rep = replace(rep, relaxed=True)
            log.warning("non-nested design accepted: %s", rep.describe())
        reports.append(rep)

    levels = []
    warnings = []
    top = len(datasets) - 1
    for i, data in enumerate(datasets):
        lower = _lower_mean(levels, data.X)
        F = _basis(lower, data.n)
        projection = None
        if i == top and variant.uses_pls:
            projection = _top_projection(data, n_components)
        res = optimize_theta(data.X, data.y, F, family, search, projection=projection)
        kern, nugget, factor = res.kernel, res.nugget, res.factor
        warnings.extend(f"level {i + 1}: {w}" for w in res.warnings)
        if projection is not None and variant is Variant.MFK_PLSK:
            u0 = np.log(kern.effective_theta() * input_span(data.X) ** 2)
            u0 = np.clip(u0, *search.log_theta_bounds)
            res = optimize_theta(data.X, data.y, F, family, replace(search, nugget=nugget),
                                 starts=u0[None, :])
            kern, nugget, factor = res.kernel, res.nugget, res.factor
        levels.append(MfkLevel(data, kern, nugget, factor))
    return MfkModel(tuple(levels), variant, tuple(reports), tuple(warnings))


def _top_projection(data: Dataset, n_components: Optional[int]) -> PlsProjection:
    h = DEFAULT_PLS_COMPONENTS if n_components is None else int(n_components)
    h = max(1, min(h, data.dim, data.n - 1))
    return pls_fit(data.X, data.y, h, scale=True)
