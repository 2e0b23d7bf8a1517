"""Single- and multi-fidelity Kriging surrogate models."""

__version__ = "0.1.0"

from .data import (LfFormula, SplitSpec, forrester, forrester_datasets, generate_lf,
                   load_dataset, load_levels, split_dataset, u3si2_analogue, write_dataset)
from .dataset import Dataset
from .evaluation import EvalReport, compare_models, interval_coverage, rmsd
from .gp import (Hyperparameters, KrigingModel, Prediction, SearchConfig, fit_kriging,
                 log_marginal_likelihood, optimize_hyperparameters, predict)
from .kernels import KernelConfig, KernelFamily, kernel_eval, kernel_matrix, project_theta
from .mfk import MfkModel, NestingReport, Variant, check_nesting, fit_mfk, predict_mfk
from .pls import PlsProjection, pls_fit
from .serialize import load_model, save_model

__all__ = [
    "Dataset", "EvalReport", "Hyperparameters", "KernelConfig", "KernelFamily", "KrigingModel",
    "LfFormula", "MfkModel", "NestingReport", "PlsProjection", "Prediction", "SearchConfig",
    "SplitSpec", "Variant", "check_nesting", "compare_models", "fit_kriging", "fit_mfk",
    "forrester", "forrester_datasets", "generate_lf", "interval_coverage", "kernel_eval",
    "kernel_matrix", "load_dataset", "load_levels", "load_model", "log_marginal_likelihood",
    "optimize_hyperparameters", "pls_fit", "predict", "predict_mfk", "project_theta", "rmsd",
    "save_model", "split_dataset", "u3si2_analogue", "write_dataset",
]
