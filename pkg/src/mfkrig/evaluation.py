"""Prediction-quality metrics and multi-model comparison reports."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np

from .dataset import Dataset
from .errors import InputShapeError, InvalidArgumentError
from .gp import Prediction


def rmsd(predicted, observed) -> float:
    """Root-mean-square deviation between predictions and observed test responses."""
    a = np.asarray(predicted, dtype=float).reshape(-1)
    b = np.asarray(observed, dtype=float).reshape(-1)
    if a.size != b.size:
        raise InputShapeError(f"{a.size} predictions vs {b.size} observations")
    if a.size == 0:
        raise InvalidArgumentError("RMSD of an empty sample is undefined")
    return float(np.sqrt(np.mean((a - b) ** 2)))


def interval_coverage(prediction: Prediction, observed, z: float = 1.96) -> float:
    """Fraction of observations with ``|y - mean| <= z * sqrt(variance)``."""
    y = np.asarray(observed, dtype=float).reshape(-1)
    mean = np.asarray(prediction.mean, dtype=float).reshape(-1)
    if y.size != mean.size:
        raise InputShapeError(f"{mean.size} predictions vs {y.size} observations")
    if z <= 0:
        raise InvalidArgumentError("z must be positive")
    if y.size == 0:
        raise InvalidArgumentError("coverage of an empty sample is undefined")
    half = z * np.sqrt(np.asarray(prediction.variance, dtype=float).reshape(-1))
    return float(np.mean(np.abs(y - mean) <= half))


@dataclass(frozen=True)
class ModelRecord:
    model_id: str
    rmsd: float
    coverage: float
    n_test: int
    rank: int = 0


@dataclass(frozen=True)
class EvalReport:
    records: tuple
    z: float
    metadata: dict = field(default_factory=dict)

    @property
    def ranking(self) -> list:
        return [r.model_id for r in sorted(self.records, key=lambda r: r.rank)]

    def record(self, model_id: str) -> ModelRecord:
        for r in self.records:
            if r.model_id == model_id:
                return r
        raise KeyError(model_id)

    def to_dict(self) -> dict:
        return {
            "format": "eval-report/1",
            "z": self.z,
            "metadata": self.metadata,
            "ranking": self.ranking,
            "models": [asdict(r) for r in self.records],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def to_text(self) -> str:
        rows = [("rank", "model", "RMSD", f"coverage@{self.z:g}", "n_test")]
        for r in sorted(self.records, key=lambda r: r.rank):
            rows.append((str(r.rank), r.model_id, f"{r.rmsd:.6f}", f"{r.coverage:.3f}",
                         str(r.n_test)))
        widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
        lines = []
        for k, row in enumerate(rows):
            cells = [row[1].ljust(widths[1])] + [c.rjust(w) for c, w in zip(row[2:], widths[2:])]
            lines.append("  ".join([row[0].rjust(widths[0])] + cells))
            if k == 0:
                lines.append("  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def compare_models(models, test: Dataset, z: float = 1.96, metadata=None) -> EvalReport:
    """Evaluate every model on the same test set and rank by RMSD (ties by id).

    ``models`` is a mapping or a sequence of ``(model_id, model)`` pairs; each
    model needs a ``predict(X) -> Prediction`` method and a ``dim`` attribute.
    """
    pairs = list(models.items()) if isinstance(models, dict) else list(models)
    if not pairs:
        raise InvalidArgumentError("no models to compare")
    ids = [str(mid) for mid, _ in pairs]
    if len(set(ids)) != len(ids):
        raise InvalidArgumentError("model ids must be unique")
    scored = []
    for mid, model in zip(ids, (m for _, m in pairs)):
        if model.dim != test.dim:
            raise InputShapeError(f"model {mid!r} expects dimension {model.dim}, "
                                  f"test data has {test.dim}")
        pred = model.predict(test.X)
        scored.append((mid, rmsd(pred.mean, test.y), interval_coverage(pred, test.y, z)))
    order = sorted(scored, key=lambda s: (s[1], s[0]))
    rank = {mid: i + 1 for i, (mid, _, _) in enumerate(order)}
    records = tuple(ModelRecord(mid, e, c, test.n, rank[mid]) for mid, e, c in scored)
    return EvalReport(records, float(z), dict(metadata or {}))
