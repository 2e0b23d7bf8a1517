"""Command-line interface: ``mfkrig {gen,split,fit,eval,plot,compare}``.

Exit codes: 0 success, 1 unexpected error, 2 nesting violation,
3 shape/schema error, 4 usage error.
"""

from __future__ import annotations

import argparse
import datetime
import hashlib
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .data import (ANALOGUE_SEED, LfFormula, SplitSpec, forrester, forrester_datasets, generate_lf,
                   load_dataset, load_levels, parse_grid, split_dataset, u3si2_analogue,
                   write_dataset, write_levels)
from .dataset import Dataset
from .errors import (InputShapeError, InvalidArgumentError, MfkrigError, NestingError,
                     ParseError, RangeError, SchemaError)
from .evaluation import compare_models
from .gp import KrigingModel, SearchConfig, fit_kriging
from .mfk import MfkModel, Variant, fit_mfk
from .serialize import load_model, save_model
from .svg import bar_svg, curve_svg, split_svg

log = logging.getLogger("mfkrig")

EXIT_OK, EXIT_ERROR, EXIT_NESTING, EXIT_SHAPE, EXIT_USAGE = 0, 1, 2, 3, 4
SEED_ENV = "MFKRIG_SEED"
METHODS = ("kriging", "mfk", "mfk-pls", "mfk-plsk")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# --------------------------------------------------------------------------
# helpers
# --------------------------------------------------------------------------

def _seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV}={env!r} is not an integer") from None
    return args.seed


def _grid(spec: str) -> np.ndarray:
    try:
        return parse_grid(spec)
    except InvalidArgumentError as exc:
        raise UsageError(str(exc)) from None


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_text(path: Path, text: str, artifacts: list) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    artifacts.append(path)


def _manifest(out_dir: Path, command: str, args, seed: int, artifacts: list) -> Path:
    config = {k: v for k, v in sorted(vars(args).items()) if k != "func"}
    doc = {
        "command": command,
        "version": __version__,
        "seed": seed,
        "config": config,
        "artifacts": {str(p): _sha256(p) for p in artifacts},
        # the only field that varies between identical runs
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    path = out_dir / f"manifest-{command}.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(doc, indent=2, default=str) + "\n", encoding="utf-8")
    return path


def _lf_formula(text: str) -> LfFormula:
    key = text.lower()
    if key == "white":
        return LfFormula.white()
    if key in ("forrester", "forrester-low"):
        return LfFormula.forrester_low()
    if key.startswith("affine:"):
        try:
            a, b = (float(v) for v in key.split(":", 1)[1].split(","))
        except ValueError:
            raise UsageError(f"affine formula must be affine:A,B, got {text!r}") from None
        return LfFormula.affine(a, b)
    raise UsageError(f"unknown LF formula {text!r} (white, forrester, affine:A,B)")


def _search(args, seed: int) -> SearchConfig:
    return SearchConfig(n_restarts=args.restarts, seed=seed, nugget=args.nugget,
                        workers=args.workers)


def _describe(model) -> str:
    if isinstance(model, KrigingModel):
        p = model.params
        return (f"kriging  kernel={p.kernel.family.value} theta={p.kernel.theta.tolist()} "
                f"sigma2={p.sigma2:.6g} mu={p.mu:.6g} nugget={p.nugget:g} "
                f"loglik={model.loglik:.6f}")
    lines = [f"{model.variant.value}  levels={len(model.levels)} rho={model.rho.tolist()}"]
    for i, lev in enumerate(model.levels, 1):
        lines.append(f"  level {i}: n={lev.training.n} theta={lev.kernel.theta.tolist()} "
                     f"sigma2={lev.sigma2:.6g} mu={lev.mu:.6g} nugget={lev.nugget:g} "
                     f"loglik={lev.loglik:.6f}")
    return "\n".join(lines)


def _lf_levels(args, hf: Dataset) -> list:
    """Lower-fidelity datasets for an MFK fit, cheapest first."""
    if args.lf_formula:
        formula = _lf_formula(args.lf_formula)
        if args.lf_grid:
            grid = _grid(args.lf_grid)
        else:
            grid = np.linspace(hf.X[:, 0].min(), hf.X[:, 0].max(), 25)
        if hf.dim != 1:
            raise InputShapeError("LF formulas are one-dimensional; supply --lf for d > 1")
        # the formula is cheap, so evaluating it at the HF inputs keeps the design nested
        grid = np.unique(np.concatenate([grid, hf.X[:, 0]]))
        return [generate_lf(formula, grid, warn_only=args.lf_warn_only)]
    if args.lf:
        levels = load_levels(args.lf)
        if len(levels) == 1 and levels[0].fidelity >= hf.fidelity:
            levels = [Dataset(levels[0].X, levels[0].y, 1, levels[0].label,
                              levels[0].x_names, levels[0].y_name)]
        return levels
    raise UsageError("MFK methods need --lf or --lf-formula")


def fit_method(method: str, hf: Dataset, lower: list, args, seed: int):
    search = _search(args, seed)
    if method == "kriging":
        return fit_kriging(hf, args.kernel, search)
    variant = Variant.parse(method)
    top = hf
    if lower and lower[-1].fidelity >= hf.fidelity:
        top = Dataset(hf.X, hf.y, lower[-1].fidelity + 1, hf.label, hf.x_names, hf.y_name)
    return fit_mfk(lower + [top], variant, args.kernel, search,
                   strict_nesting=not args.allow_non_nested, nesting_tol=args.nesting_tol,
                   n_components=args.n_components)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_gen(args) -> int:
    seed = _seed(args)
    out = Path(args.out)
    artifacts = []
    if args.kind == "analogue":
        data = u3si2_analogue(seed=seed, n=args.n)
        write_dataset(data, out)
    elif args.kind == "forrester-pair":
        lf, hf = forrester_datasets()
        write_levels([lf, hf], out)
    else:
        if not args.grid:
            raise UsageError(f"gen {args.kind} needs --grid start:stop:step")
        formula = {"white": LfFormula.white(),
                   "forrester-low": LfFormula.forrester_low()}.get(args.kind)
        if args.kind == "forrester-high":
            x = _grid(args.grid)
            write_dataset(Dataset(x, forrester(x, "high"), 2, "forrester-high"), out)
        else:
            data = generate_lf(formula, _grid(args.grid), warn_only=args.warn_only)
            data = Dataset(data.X, data.y, 1, data.label, ("T",) if args.kind == "white"
                           else ("x",), "k" if args.kind == "white" else "y")
            write_dataset(data, out, include_fidelity=True)
    artifacts.append(out)
    _manifest(Path(args.out_dir) if args.out_dir else out.parent, "gen", args, seed, artifacts)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_split(args) -> int:
    seed = _seed(args)
    data = load_dataset(args.data)
    train, test = split_dataset(data, SplitSpec(args.test_fraction, seed))
    out = Path(args.out_dir)
    artifacts = []
    write_dataset(train, out / "train.csv")
    write_dataset(test, out / "test.csv")
    artifacts += [out / "train.csv", out / "test.csv"]
    _write_text(out / "split.svg",
                split_svg((train.X[:, 0], train.y), (test.X[:, 0], test.y),
                          title=f"{data.label}: {train.n} train / {test.n} test",
                          xlabel=data.x_names[0], ylabel=data.y_name), artifacts)
    _manifest(out, "split", args, seed, artifacts)
    print(f"train={train.n} test={test.n} seed={seed}")
    return EXIT_OK


def cmd_fit(args) -> int:
    seed = _seed(args)
    hf_levels = load_levels(args.hf)
    if args.method == "kriging":
        if len(hf_levels) > 1:
            raise SchemaError(f"{args.hf} mixes fidelity levels; Kriging needs one")
        model = fit_method("kriging", hf_levels[0], [], args, seed)
    else:
        hf = hf_levels[-1]
        lower = hf_levels[:-1] if len(hf_levels) > 1 and not (args.lf or args.lf_formula) \
            else _lf_levels(args, hf)
        model = fit_method(args.method, hf, lower, args, seed)
    out = Path(args.out)
    save_model(model, out)
    _manifest(Path(args.out_dir) if args.out_dir else out.parent, "fit", args, seed, [out])
    print(_describe(model))
    for w in model.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def _model_id(path: str, used: set) -> str:
    base = Path(path).stem
    mid, k = base, 2
    while mid in used:
        mid, k = f"{base}-{k}", k + 1
    used.add(mid)
    return mid


def cmd_eval(args) -> int:
    if not args.model:
        raise UsageError("eval needs at least one --model")
    test = load_dataset(args.test)
    used = set()
    models = [(_model_id(p, used), load_model(p)) for p in args.model]
    report = compare_models(models, test, args.z, {"test": str(args.test),
                                                    "models": list(args.model)})
    out = Path(args.out_dir)
    artifacts = []
    _write_text(out / "report.json", report.to_json(), artifacts)
    _write_text(out / "report.txt", report.to_text(), artifacts)
    _write_text(out / "rmsd.svg", bar_svg([r.model_id for r in report.records],
                                          [r.rmsd for r in report.records]), artifacts)
    _manifest(out, "eval", args, _seed(args), artifacts)
    sys.stdout.write(report.to_text())
    return EXIT_OK


def plot_model(model, grid: np.ndarray, z: float, out: Path, name: str, artifacts: list,
               test: Dataset = None, lf: Dataset = None, title: str = "") -> None:
    pred = model.predict(grid.reshape(-1, 1)).with_bounds(z)
    lines = ["x,mean,variance,lower,upper"]
    for row in zip(grid, pred.mean, pred.variance, pred.lower, pred.upper):
        lines.append(",".join(repr(float(v)) for v in row))
    _write_text(out / f"{name}.csv", "\n".join(lines) + "\n", artifacts)
    train = model.training
    if lf is None and isinstance(model, MfkModel):
        lf = model.levels[0].training
    svg = curve_svg(grid, pred.mean, pred.lower, pred.upper,
                    train=(train.X[:, 0], train.y),
                    test=(test.X[:, 0], test.y) if test is not None else None,
                    lf=(lf.X[:, 0], lf.y) if lf is not None else None,
                    title=title or name, xlabel=train.x_names[0], ylabel=train.y_name,
                    band_label=f"mean ± {z:g}σ")
    _write_text(out / f"{name}.svg", svg, artifacts)


def cmd_plot(args) -> int:
    grid = _grid(args.grid)
    model = load_model(args.model)
    if model.dim != 1:
        raise InputShapeError("plots are only drawn for one-dimensional inputs")
    test = load_dataset(args.test) if args.test else None
    lf = load_levels(args.lf)[0] if args.lf else None
    out = Path(args.out_dir)
    artifacts = []
    plot_model(model, grid, args.z, out, args.name, artifacts, test, lf)
    _manifest(out, "plot", args, _seed(args), artifacts)
    print(f"wrote {out / (args.name + '.csv')} ({grid.size} rows) and {args.name}.svg")
    return EXIT_OK


def cmd_compare(args) -> int:
    """Full workflow: split, fit every method, evaluate, and draw all figures."""
    seed = _seed(args)
    if args.data:
        data = load_dataset(args.data)
    else:
        data = u3si2_analogue()
    train, test = split_dataset(data, SplitSpec(args.test_fraction, seed))
    out = Path(args.out_dir)
    artifacts = []
    write_dataset(train, out / "train.csv")
    write_dataset(test, out / "test.csv")
    artifacts += [out / "train.csv", out / "test.csv"]
    _write_text(out / "split.svg",
                split_svg((train.X[:, 0], train.y), (test.X[:, 0], test.y),
                          title=f"{train.n} train / {test.n} test (seed {seed})",
                          xlabel=data.x_names[0], ylabel=data.y_name), artifacts)
    lower = _lf_levels(args, train)
    models = []
    for method in args.methods:
        model = fit_method(method, train, lower, args, seed)
        path = out / "models" / f"{method}.json"
        save_model(model, path)
        artifacts.append(path)
        models.append((method, model))
    report = compare_models(models, test, args.z, {"split_seed": seed,
                                                    "test_fraction": args.test_fraction,
                                                    "data": data.label,
                                                    "variants": list(args.methods)})
    _write_text(out / "report.json", report.to_json(), artifacts)
    _write_text(out / "report.txt", report.to_text(), artifacts)
    _write_text(out / "rmsd.svg", bar_svg([r.model_id for r in report.records],
                                          [r.rmsd for r in report.records]), artifacts)
    if data.dim == 1:
        grid = _grid(args.grid) if args.grid else np.linspace(
            data.X.min(), data.X.max(), 101)
        for method, model in models:
            plot_model(model, grid, args.z, out / "curves", method, artifacts, test)
    _manifest(out, "compare", args, seed, artifacts)
    sys.stdout.write(report.to_text())
    return EXIT_OK


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

GRID_HELP = "start:stop:step, includes stop when it lies on the lattice"


def _fit_options(p):
    p.add_argument("--kernel", default="squared_exponential",
                   choices=["squared_exponential", "matern52", "matern32"])
    p.add_argument("--restarts", type=int, default=10, help="Nelder-Mead restarts")
    p.add_argument("--nugget", type=float, default=1e-10)
    p.add_argument("--workers", type=int, default=1, help="threads for restarts")
    p.add_argument("--n-components", type=int, default=None, help="PLS components")
    p.add_argument("--lf", help="low-fidelity CSV (may hold several levels)")
    p.add_argument("--lf-formula", help="white | forrester | affine:A,B")
    p.add_argument("--lf-grid", help=f"LF evaluation grid, {GRID_HELP}")
    p.add_argument("--lf-warn-only", action="store_true",
                   help="warn instead of failing on grid points outside the formula range")
    p.add_argument("--allow-non-nested", action="store_true")
    p.add_argument("--nesting-tol", type=float, default=1e-9)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="mfkrig", description="Multi-fidelity Kriging surrogate models.")
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=func)
        p.add_argument("--seed", type=int, default=0,
                       help=f"random seed (overridden by ${SEED_ENV})")
        return p

    p = add("gen", cmd_gen, "generate LF or benchmark data")
    p.add_argument("kind", choices=["white", "forrester-low", "forrester-high",
                                    "forrester-pair", "analogue"])
    p.add_argument("--grid", help=GRID_HELP)
    p.add_argument("--n", type=int, default=12, help="analogue sample count")
    p.set_defaults(seed=ANALOGUE_SEED)
    p.add_argument("--warn-only", action="store_true")
    p.add_argument("--out", required=True)
    p.add_argument("--out-dir")

    p = add("split", cmd_split, "random train/test split")
    p.add_argument("--data", required=True)
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.add_argument("--out-dir", default=".")

    p = add("fit", cmd_fit, "fit a model and write it as JSON")
    p.add_argument("--method", choices=METHODS, default="kriging")
    p.add_argument("--hf", required=True, help="high-fidelity training CSV")
    p.add_argument("--out", required=True, help="model file")
    p.add_argument("--out-dir")
    _fit_options(p)

    p = add("eval", cmd_eval, "RMSD and coverage of models on a test set")
    p.add_argument("--model", action="append", default=[])
    p.add_argument("--test", required=True)
    p.add_argument("--z", type=float, default=1.96)
    p.add_argument("--out-dir", default=".")

    p = add("plot", cmd_plot, "mean and confidence band on a grid (CSV + SVG)")
    p.add_argument("--model", required=True)
    p.add_argument("--grid", required=True, help=GRID_HELP)
    p.add_argument("--z", type=float, default=1.96)
    p.add_argument("--test", help="test CSV drawn as crosses")
    p.add_argument("--lf", help="LF CSV drawn as markers")
    p.add_argument("--name", default="curve")
    p.add_argument("--out-dir", default=".")

    p = add("compare", cmd_compare, "split, fit all methods, evaluate, plot")
    p.add_argument("--data", help="HF CSV (default: the synthetic U3Si2 analogue)")
    p.add_argument("--methods", nargs="+", choices=METHODS, default=list(METHODS))
    p.add_argument("--test-fraction", type=float, default=0.3)
    p.add_argument("--grid", help=f"plot grid, {GRID_HELP}")
    p.add_argument("--z", type=float, default=1.96)
    p.add_argument("--out-dir", default=".")
    _fit_options(p)
    p.set_defaults(lf_formula="white", seed=ANALOGUE_SEED)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        if args.command is None:
            parser.print_help(sys.stderr)
            return EXIT_USAGE
        return args.func(args)
    except UsageError as exc:
        print(f"mfkrig: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NestingError as exc:
        print("mfkrig: nesting violation", file=sys.stderr)
        print(json.dumps(exc.report.to_dict(), indent=2), file=sys.stderr)
        return EXIT_NESTING
    except (InputShapeError, SchemaError, ParseError) as exc:
        print(f"mfkrig: {exc}", file=sys.stderr)
        return EXIT_SHAPE
    except (InvalidArgumentError, RangeError) as exc:
        print(f"mfkrig: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (MfkrigError, OSError) as exc:
        print(f"mfkrig: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
