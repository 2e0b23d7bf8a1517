"""JSON documents for fitted models.

Only parameters and training data are stored; factorizations are rebuilt on
load. Floats are written with Python's shortest round-trip representation, so
a reloaded model predicts bit-identically.
"""

from __future__ import annotations

import json
from pathlib import Path

from .dataset import Dataset
from .errors import SchemaError
from .gp import KrigingModel
from .kernels import KernelConfig
from .mfk import MfkModel, NestingReport, Variant, build_levels
from .pls import PlsProjection

KRIGING_FORMAT = "kriging/1"
MFK_FORMAT = "mfk/1"


def _kernel_doc(kernel: KernelConfig) -> dict:
    doc = {"family": kernel.family.value, "theta": kernel.theta.tolist()}
    if kernel.projection is not None:
        doc["projection"] = kernel.projection.to_dict()
    return doc


def _kernel_from(doc: dict) -> KernelConfig:
    proj = doc.get("projection")
    return KernelConfig(doc["family"], doc["theta"],
                        PlsProjection.from_dict(proj) if proj else None)


def model_to_dict(model) -> dict:
    if isinstance(model, KrigingModel):
        p = model.params
        return {
            "format": KRIGING_FORMAT,
            "kernel": _kernel_doc(p.kernel),
            "sigma2": p.sigma2,
            "nugget": p.nugget,
            "mu": p.mu,
            "loglik": model.loglik,
            "warnings": list(model.warnings),
            "training": model.training.to_dict(),
        }
    if isinstance(model, MfkModel):
        levels = []
        for lev in model.levels:
            levels.append({
                "kernel": _kernel_doc(lev.kernel),
                "sigma2": lev.sigma2,
                "nugget": lev.nugget,
                "mu": lev.mu,
                "rho": lev.rho,
                "loglik": lev.loglik,
                "training": lev.training.to_dict(),
            })
        return {
            "format": MFK_FORMAT,
            "variant": model.variant.value,
            "rho": model.rho.tolist(),
            "levels": levels,
            "nesting": [r.to_dict() for r in model.nesting_reports],
            "warnings": list(model.warnings),
        }
    raise TypeError(f"cannot serialize {type(model).__name__}")


def model_from_dict(doc: dict):
    fmt = doc.get("format")
    try:
        if fmt == KRIGING_FORMAT:
            return KrigingModel.from_hyperparameters(
                Dataset.from_dict(doc["training"]), _kernel_from(doc["kernel"]),
                doc["nugget"], doc.get("warnings", ()))
        if fmt == MFK_FORMAT:
            lv = doc["levels"]
            levels = build_levels([Dataset.from_dict(d["training"]) for d in lv],
                                  [_kernel_from(d["kernel"]) for d in lv],
                                  [d["nugget"] for d in lv])
            return MfkModel(levels, Variant.parse(doc["variant"]),
                            tuple(NestingReport.from_dict(r) for r in doc.get("nesting", [])),
                            tuple(doc.get("warnings", ())))
    except KeyError as exc:
        raise SchemaError(f"model document is missing field {exc}") from None
    raise SchemaError(f"unknown model format {fmt!r}")


def dumps_model(model) -> str:
    return json.dumps(model_to_dict(model), indent=2) + "\n"


def save_model(model, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_model(model), encoding="utf-8")


def load_model(path):
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})") from None
    return model_from_dict(doc)
