"""Dataset I/O, train/test splitting, and closed-form data generators."""

from __future__ import annotations

import csv
import enum
import math
import warnings
from dataclasses import dataclass
from decimal import Decimal, localcontext
from pathlib import Path
from typing import Optional

import numpy as np

from .dataset import HIGH_FIDELITY, LOW_FIDELITY, Dataset
from .errors import InvalidArgumentError, ParseError, RangeError, SchemaError

SHUFFLE_ALGORITHM = "numpy-pcg64-permutation"

WHITE_SLOPE = "0.0151"  # W m^-1 K^-2
WHITE_INTERCEPT = "6.004"  # W m^-1 K^-1
WHITE_RANGE = (300.0, 1773.0)  # K


# --------------------------------------------------------------------------
# closed-form generators
# --------------------------------------------------------------------------

class LfKind(str, enum.Enum):
    WHITE_U3SI2 = "white"
    FORRESTER_LOW = "forrester_low"
    AFFINE = "affine"


@dataclass(frozen=True)
class LfFormula:
    """A cheap closed-form low-fidelity model.

    ``AFFINE`` evaluates ``a * x + b`` on the first input column.
    """

    kind: LfKind
    valid_range: tuple = WHITE_RANGE
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", LfKind(self.kind))
        lo, hi = self.valid_range
        if not lo < hi:
            raise InvalidArgumentError(f"degenerate valid range {self.valid_range}")

    @classmethod
    def white(cls) -> "LfFormula":
        return cls(LfKind.WHITE_U3SI2, WHITE_RANGE)

    @classmethod
    def forrester_low(cls) -> "LfFormula":
        return cls(LfKind.FORRESTER_LOW, (0.0, 1.0))

    @classmethod
    def affine(cls, a: float, b: float, valid_range=(-math.inf, math.inf)) -> "LfFormula":
        return cls(LfKind.AFFINE, valid_range, float(a), float(b))

    def __call__(self, x: float) -> float:
        if self.kind is LfKind.WHITE_U3SI2:
            return white_conductivity(x)
        if self.kind is LfKind.FORRESTER_LOW:
            return forrester(x, "low")
        return self.a * float(x) + self.b


def white_conductivity(T: float) -> float:
    """U3Si2 thermal conductivity line 0.0151 T + 6.004 (W/m/K), T in kelvin.

    Evaluated in exact decimal arithmetic and rounded once, so e.g. T = 300
    gives the double nearest to 10.534 rather than 10.533999999999999.
    """
    with localcontext() as ctx:
        ctx.prec = 80
        return float(Decimal(WHITE_SLOPE) * Decimal(float(T)) + Decimal(WHITE_INTERCEPT))


def generate_lf(formula: LfFormula, grid, warn_only: bool = False,
                label: str = "") -> Dataset:
    """Evaluate ``formula`` on ``grid``; the result is tagged fidelity 1."""
    X = np.asarray(grid, dtype=float)
    X = X.reshape(-1, 1) if X.ndim <= 1 else X
    lo, hi = formula.valid_range
    outside = (X[:, 0] < lo) | (X[:, 0] > hi)
    if np.any(outside):
        msg = (f"{int(outside.sum())} grid point(s) outside the valid range "
               f"[{lo:g}, {hi:g}] of {formula.kind.value}")
        if not warn_only:
            raise RangeError(msg)
        warnings.warn(msg, stacklevel=2)
    if formula.kind is LfKind.FORRESTER_LOW and warn_only:
        y = [_forrester_unchecked(x, "low") for x in X[:, 0]]
    else:
        y = [formula(x) for x in X[:, 0]]
    return Dataset(X, y, LOW_FIDELITY, label or f"lf:{formula.kind.value}")


def _forrester_unchecked(x, level):
    high = (6.0 * x - 2.0) ** 2 * np.sin(12.0 * x - 4.0)
    if str(level).lower() == "high":
        return high
    return 0.5 * high + 10.0 * (x - 0.5) - 5.0


def forrester(x, level="high"):
    """One-dimensional Forrester benchmark on [0, 1].

    ``high``: (6x - 2)^2 sin(12x - 4); ``low``: 0.5 high + 10 (x - 0.5) - 5.
    Accepts scalars or arrays.
    """
    if str(level).lower() not in ("high", "low"):
        raise InvalidArgumentError(f"level must be 'high' or 'low', got {level!r}")
    arr = np.asarray(x, dtype=float)
    if np.any((arr < 0.0) | (arr > 1.0)):
        raise RangeError("Forrester function is defined on [0, 1]")
    out = _forrester_unchecked(arr, level)
    return float(out) if np.ndim(out) == 0 else out


def forrester_datasets(n_lf: int = 11, hf_x=(0.0, 0.4, 0.6, 1.0)):
    """Nested (LF, HF) Forrester pair: ``n_lf`` uniform LF points plus the HF points."""
    xl = np.linspace(0.0, 1.0, n_lf)
    xh = np.asarray(hf_x, dtype=float)
    lf = Dataset(xl, forrester(xl, "low"), LOW_FIDELITY, "forrester-low")
    hf = Dataset(xh, forrester(xh, "high"), HIGH_FIDELITY, "forrester-high")
    return lf, hf


ANALOGUE_SEED = 42


def u3si2_analogue(seed: int = ANALOGUE_SEED, n: int = 12, noise: float = 0.15) -> Dataset:
    """Synthetic stand-in for U3Si2 conductivity measurements (clearly not real data).

    ``y = 0.0151 T + 6.004 + 1.2 sin((T - 400) / 300) + N(0, noise^2)`` on
    ``n`` equally spaced temperatures in [400, 1300] K.
    """
    T = np.linspace(400.0, 1300.0, n)
    rng = np.random.default_rng(seed)
    base = np.array([white_conductivity(t) for t in T])
    y = base + 1.2 * np.sin((T - 400.0) / 300.0) + rng.normal(0.0, noise, size=n)
    return Dataset(T.reshape(-1, 1), y, HIGH_FIDELITY, "u3si2-analogue (synthetic)",
                   ("T",), "k")


# --------------------------------------------------------------------------
# splitting
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitSpec:
    """Random train/test split.

    The test set is the first ``round(n * test_fraction)`` entries of
    ``numpy.random.default_rng(seed).permutation(n)``; both parts keep the
    original row order.
    """

    test_fraction: float = 0.3
    seed: int = 0
    algorithm: str = SHUFFLE_ALGORITHM

    def __post_init__(self):
        if not 0.0 < self.test_fraction < 1.0:
            raise InvalidArgumentError("test_fraction must lie in (0, 1)")
        if self.algorithm != SHUFFLE_ALGORITHM:
            raise InvalidArgumentError(f"unsupported shuffle algorithm {self.algorithm!r}")


def split_dataset(data: Dataset, spec: SplitSpec = SplitSpec()):
    """Return ``(train, test)``; deterministic given ``spec.seed``."""
    n = data.n
    if n < 2 or math.floor(n * spec.test_fraction) < 1:
        raise InvalidArgumentError(
            f"cannot split {n} point(s) with test_fraction={spec.test_fraction}")
    n_test = min(int(math.floor(n * spec.test_fraction + 0.5)), n - 1)
    perm = np.random.default_rng(spec.seed).permutation(n)
    test_idx = np.sort(perm[:n_test])
    train_idx = np.sort(perm[n_test:])
    return data.subset(train_idx), data.subset(test_idx)


# --------------------------------------------------------------------------
# CSV
# --------------------------------------------------------------------------

def _read_rows(path):
    """Yield ``(line_number, fields)`` for non-comment, non-blank rows."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for fields in reader:
            if not fields or all(not f.strip() for f in fields):
                continue
            if fields[0].lstrip().startswith("#"):
                continue
            yield reader.line_num, [f.strip() for f in fields]


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"line {line}: column {column!r} value {text!r} is not a number",
                         line) from None
    if not math.isfinite(value):
        raise ParseError(f"line {line}: column {column!r} is not finite ({text})", line)
    return value


def _read_table(path):
    rows = _read_rows(path)
    try:
        _, header = next(rows)
    except StopIteration:
        raise SchemaError(f"{path}: no header row") from None
    lower = [h.lower() for h in header]
    fid_col = lower.index("fidelity") if "fidelity" in lower else None
    value_cols = [i for i in range(len(header)) if i != fid_col]
    if "y" in lower:
        y_col = lower.index("y")
    elif len(value_cols) >= 2:
        y_col = value_cols[-1]
    else:
        raise SchemaError(f"{path}: need at least one input column and a response column")
    x_cols = [i for i in value_cols if i != y_col]
    if not x_cols:
        raise SchemaError(f"{path}: no input columns")

    X, y, fid = [], [], []
    for line, fields in rows:
        if len(fields) != len(header):
            raise ParseError(f"line {line}: expected {len(header)} fields, got {len(fields)}",
                             line)
        X.append([_parse_float(fields[i], line, header[i]) for i in x_cols])
        y.append(_parse_float(fields[y_col], line, header[y_col]))
        if fid_col is not None:
            try:
                level = int(fields[fid_col])
            except ValueError:
                raise ParseError(f"line {line}: fidelity {fields[fid_col]!r} is not an integer",
                                 line) from None
            if level < 1:
                raise ParseError(f"line {line}: fidelity must be >= 1", line)
            fid.append(level)
        else:
            fid.append(HIGH_FIDELITY)
    if not y:
        raise SchemaError(f"{path}: no data rows")
    names = tuple(header[i] for i in x_cols)
    return np.array(X), np.array(y), np.array(fid), names, header[y_col]


def load_dataset(path, fidelity: Optional[int] = None, label: Optional[str] = None) -> Dataset:
    """Read a CSV file into a :class:`Dataset`.

    Columns: inputs, a response (named ``y``, otherwise the last column), and
    an optional integer ``fidelity`` column (default 2, i.e. high fidelity).
    Lines starting with ``#`` are ignored. Files mixing fidelity levels need
    ``fidelity=`` to pick one, or :func:`load_levels`.
    """
    X, y, fid, names, y_name = _read_table(path)
    label = Path(path).stem if label is None else label
    if fidelity is None:
        levels = np.unique(fid)
        if levels.size > 1:
            raise SchemaError(f"{path} mixes fidelity levels {levels.tolist()}; "
                              "select one or use load_levels")
        fidelity = int(levels[0])
    mask = fid == fidelity
    if not np.any(mask):
        raise SchemaError(f"{path}: no rows with fidelity {fidelity}")
    return Dataset(X[mask], y[mask], fidelity, label, names, y_name)


def load_levels(path) -> list:
    """Read a CSV file and return one Dataset per fidelity level, lowest first."""
    X, y, fid, names, y_name = _read_table(path)
    stem = Path(path).stem
    return [Dataset(X[fid == k], y[fid == k], int(k), f"{stem}[{k}]", names, y_name)
            for k in np.unique(fid)]


def write_dataset(data: Dataset, path, include_fidelity: bool = False) -> None:
    """Write a CSV that :func:`load_dataset` reads back bit-exactly."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    header = list(data.x_names) + [data.y_name]
    if include_fidelity:
        header.append("fidelity")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for xi, yi in zip(data.X, data.y):
            row = [repr(float(v)) for v in xi] + [repr(float(yi))]
            if include_fidelity:
                row.append(str(data.fidelity))
            writer.writerow(row)


def write_levels(datasets, path) -> None:
    """Write several fidelity levels to one CSV with a ``fidelity`` column."""
    path = Path(path)
    first = datasets[0]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(first.x_names) + [first.y_name, "fidelity"])
        for data in datasets:
            for xi, yi in zip(data.X, data.y):
                writer.writerow([repr(float(v)) for v in xi] + [repr(float(yi)), data.fidelity])


def parse_grid(spec: str) -> np.ndarray:
    """Parse ``start:stop:step`` into a 1-D grid.

    ``stop`` is included when it falls on the lattice (``300:1500:25`` gives
    49 points), excluded otherwise.
    """
    parts = spec.split(":")
    if len(parts) != 3:
        raise InvalidArgumentError(f"grid spec {spec!r} is not start:stop:step")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError:
        raise InvalidArgumentError(f"grid spec {spec!r} has a non-numeric field") from None
    if not (math.isfinite(start) and math.isfinite(stop) and math.isfinite(step)):
        raise InvalidArgumentError(f"grid spec {spec!r} is not finite")
    if step <= 0 or stop < start:
        raise InvalidArgumentError(f"grid spec {spec!r} needs step > 0 and stop >= start")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return start + step * np.arange(count)
