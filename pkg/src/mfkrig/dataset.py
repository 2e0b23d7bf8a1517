"""The :class:`Dataset` container shared by every module."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .errors import InputShapeError, InvalidArgumentError

HIGH_FIDELITY = 2
LOW_FIDELITY = 1


@dataclass(frozen=True, eq=False)
class Dataset:
    """Input points ``X`` (n x d) with scalar responses ``y`` at one fidelity.

    Fidelity levels count upwards from 1 (least accurate).
    """

    X: np.ndarray
    y: np.ndarray
    fidelity: int = HIGH_FIDELITY
    label: str = ""
    x_names: Optional[tuple] = field(default=None)
    y_name: str = "y"

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        y = np.asarray(self.y, dtype=float).reshape(-1)
        if X.ndim != 2 or X.shape[0] != y.size:
            raise InputShapeError(f"X has shape {X.shape} but y has {y.size} entries")
        if y.size < 1:
            raise InvalidArgumentError("a dataset needs at least one point")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise InvalidArgumentError("dataset contains NaN or Inf")
        if int(self.fidelity) < 1:
            raise InvalidArgumentError("fidelity level must be >= 1")
        X = X.copy()
        y = y.copy()
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "fidelity", int(self.fidelity))
        names = self.x_names
        if names is None:
            names = ("x",) if X.shape[1] == 1 else tuple(f"x{i + 1}" for i in range(X.shape[1]))
        names = tuple(str(s) for s in names)
        if len(names) != X.shape[1]:
            raise InputShapeError("x_names length does not match input dimension")
        object.__setattr__(self, "x_names", names)

    @property
    def n(self) -> int:
        return self.y.size

    @property
    def dim(self) -> int:
        return self.X.shape[1]

    def subset(self, index) -> "Dataset":
        index = np.asarray(index, dtype=int)
        return replace(self, X=self.X[index], y=self.y[index])

    def with_y(self, y) -> "Dataset":
        return replace(self, y=y)

    def conflicting_duplicates(self) -> bool:
        """True when two identical input rows carry different responses."""
        order = np.lexsort(self.X.T[::-1])
        Xs, ys = self.X[order], self.y[order]
        same = np.all(Xs[1:] == Xs[:-1], axis=1)
        return bool(np.any(same & (ys[1:] != ys[:-1])))

    def to_dict(self) -> dict:
        return {
            "X": self.X.tolist(),
            "y": self.y.tolist(),
            "fidelity": self.fidelity,
            "label": self.label,
            "x_names": list(self.x_names),
            "y_name": self.y_name,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Dataset":
        X = np.array(doc["X"], dtype=float).reshape(len(doc["y"]), -1)
        return cls(X, doc["y"], doc.get("fidelity", HIGH_FIDELITY), doc.get("label", ""),
                   tuple(doc["x_names"]) if doc.get("x_names") else None,
                   doc.get("y_name", "y"))
