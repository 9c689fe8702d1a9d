"""Dataset loading, min-max scaling, splitting, metrics and descriptive stats."""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Tuple, Union

import numpy as np
from scipy import stats

__all__ = [
    "Dataset",
    "NormalizationParams",
    "SummaryStats",
    "CSVFormatError",
    "TargetColumnError",
    "load_csv",
    "normalize",
    "split",
    "rmse",
    "mae",
    "summarize",
]


class CSVFormatError(ValueError):
    """A cell could not be parsed as a finite number, or the file is ragged."""


class TargetColumnError(LookupError):
    """The requested target column does not exist."""


@dataclass(frozen=True)
class Dataset:
    features: np.ndarray
    targets: np.ndarray
    feature_names: Tuple[str, ...] = ()
    name: str = "dataset"

    def __post_init__(self):
        X = np.array(self.features, dtype=float)
        y = np.array(self.targets, dtype=float).ravel()
        if X.ndim == 1:
            X = X[:, None]
        if X.ndim != 2 or X.shape[0] != y.shape[0]:
            raise ValueError(f"features {X.shape} and targets {y.shape} disagree on row count")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("dataset contains non-finite values")
        names = tuple(self.feature_names) or tuple(f"x{i}" for i in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise ValueError("feature_names length must match feature count")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "targets", y)
        object.__setattr__(self, "feature_names", names)

    @property
    def n_samples(self):
        return self.features.shape[0]

    @property
    def n_features(self):
        return self.features.shape[1]

    def subset(self, rows):
        return replace(self, features=self.features[rows], targets=self.targets[rows])

    def with_targets(self, y):
        return replace(self, targets=y)


def load_csv(path, target: Union[str, int] = -1, has_header: bool = True, name=None) -> Dataset:
    """Read a dense numeric CSV.

    ``target`` is a column name (needs a header) or an integer index; negative
    indices count from the end. Every other column becomes a feature.
    """
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such data file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [(i, r) for i, r in enumerate(csv.reader(fh), start=1) if any(c.strip() for c in r)]
    if not rows:
        raise CSVFormatError(f"{path}: file is empty")
    header = None
    if has_header:
        header = [c.strip() for c in rows[0][1]]
        rows = rows[1:]
    if not rows:
        raise CSVFormatError(f"{path}: no data rows")
    width = len(header) if header is not None else len(rows[0][1])

    if isinstance(target, str) and not target.lstrip("-").isdigit():
        if header is None:
            raise TargetColumnError(f"target column {target!r} given by name but file has no header")
        if target not in header:
            raise TargetColumnError(f"target column {target!r} not in header {header}")
        tcol = header.index(target)
    else:
        tcol = int(target)
        if not -width <= tcol < width:
            raise TargetColumnError(f"target column index {tcol} out of range for {width} columns")
        tcol %= width

    data = np.empty((len(rows), width))
    for k, (line, cells) in enumerate(rows):
        if len(cells) != width:
            raise CSVFormatError(f"{path}: row {line} has {len(cells)} cells, expected {width}")
        for j, cell in enumerate(cells):
            try:
                v = float(cell)
            except ValueError:
                raise CSVFormatError(
                    f"{path}: row {line}, column {j + 1}: non-numeric cell {cell!r}"
                ) from None
            if not np.isfinite(v):
                raise CSVFormatError(f"{path}: row {line}, column {j + 1}: non-finite value {cell!r}")
            data[k, j] = v

    names = header if header is not None else [f"x{j}" for j in range(width)]
    keep = [j for j in range(width) if j != tcol]
    return Dataset(
        data[:, keep], data[:, tcol], tuple(names[j] for j in keep), name or path.stem
    )


def _minmax_apply(v, lo, hi):
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    return np.where(span > 0, (v - lo) / safe, 0.0)


@dataclass(frozen=True)
class NormalizationParams:
    feature_min: np.ndarray
    feature_max: np.ndarray
    target_min: float
    target_max: float

    @property
    def constant_features(self):
        return self.feature_max <= self.feature_min

    @property
    def constant_target(self):
        return self.target_max <= self.target_min

    @classmethod
    def fit(cls, ds: Dataset):
        return cls(ds.features.min(axis=0), ds.features.max(axis=0),
                   float(ds.targets.min()), float(ds.targets.max()))

    def transform(self, ds: Dataset) -> Dataset:
        X = _minmax_apply(ds.features, self.feature_min, self.feature_max)
        return replace(ds, features=X, targets=self.transform_target(ds.targets))

    def transform_target(self, y):
        return _minmax_apply(np.asarray(y, dtype=float), self.target_min, self.target_max)

    def denormalize_target(self, y):
        y = np.asarray(y, dtype=float)
        if self.constant_target:
            return np.full_like(y, self.target_min)
        return y * (self.target_max - self.target_min) + self.target_min

    def denormalize_features(self, X):
        X = np.asarray(X, dtype=float)
        span = np.where(self.constant_features, 0.0, self.feature_max - self.feature_min)
        return X * span + self.feature_min


def normalize(ds: Dataset):
    """Map every column to [0, 1]; constant columns become 0.

    Returns the scaled dataset and the parameters needed to undo it.
    """
    if ds.n_samples < 2:
        raise ValueError("normalization needs at least two rows")
    params = NormalizationParams.fit(ds)
    return params.transform(ds), params


def split(ds: Dataset, train_fraction: float, seed: int = 0):
    """Seeded shuffle followed by a contiguous ``floor(f * N)`` / rest split."""
    if not 0.0 < train_fraction < 1.0:
        raise ValueError("train_fraction must lie strictly between 0 and 1")
    n_train = int(np.floor(train_fraction * ds.n_samples + 1e-9))
    if n_train < 1 or n_train >= ds.n_samples:
        raise ValueError(
            f"train fraction {train_fraction} leaves an empty part for N={ds.n_samples}"
        )
    order = np.random.default_rng(seed).permutation(ds.n_samples)
    return ds.subset(order[:n_train]), ds.subset(order[n_train:])


def _pair(y_true, y_pred):
    a = np.asarray(y_true, dtype=float).ravel()
    b = np.asarray(y_pred, dtype=float).ravel()
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.size} vs {b.size}")
    if a.size == 0:
        raise ValueError("metrics need at least one sample")
    return a, b


def rmse(y_true, y_pred):
    a, b = _pair(y_true, y_pred)
    return float(np.sqrt(np.mean((a - b) ** 2)))


def mae(y_true, y_pred):
    a, b = _pair(y_true, y_pred)
    return float(np.mean(np.abs(a - b)))


_STAT_FIELDS = ("mean", "std", "min", "q25", "q50", "q75", "max", "skewness", "kurtosis")


@dataclass(frozen=True)
class SummaryStats:
    """Per-column descriptive statistics.

    ``std`` is the sample standard deviation, quartiles use linear
    interpolation between order statistics, ``skewness`` is the adjusted
    Fisher-Pearson coefficient and ``kurtosis`` is bias-corrected and reported
    on the scale where a normal distribution scores 3.
    """

    names: Tuple[str, ...]
    mean: np.ndarray
    std: np.ndarray
    min: np.ndarray
    q25: np.ndarray
    q50: np.ndarray
    q75: np.ndarray
    max: np.ndarray
    skewness: np.ndarray
    kurtosis: np.ndarray

    def row(self, name):
        i = self.names.index(name)
        return {f: float(getattr(self, f)[i]) for f in _STAT_FIELDS}

    def to_table(self, digits=2):
        head = ["feature", *_STAT_FIELDS]
        lines = [head]
        for i, n in enumerate(self.names):
            lines.append([n, *(f"{getattr(self, f)[i]:.{digits}f}" for f in _STAT_FIELDS)])
        widths = [max(len(r[j]) for r in lines) for j in range(len(head))]
        return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in lines)


def summarize(ds: Dataset, include_target=False) -> SummaryStats:
    if ds.n_samples < 2:
        raise ValueError("summary statistics need at least two rows")
    X = ds.features
    names = ds.feature_names
    if include_target:
        X = np.column_stack([X, ds.targets])
        names = (*names, "target")
    q25, q50, q75 = np.percentile(X, [25, 50, 75], axis=0)
    with np.errstate(invalid="ignore", divide="ignore"):
        skew = stats.skew(X, axis=0, bias=False)
        kurt = stats.kurtosis(X, axis=0, fisher=False, bias=False)
    return SummaryStats(
        tuple(names), X.mean(axis=0), X.std(axis=0, ddof=1), X.min(axis=0),
        q25, q50, q75, X.max(axis=0), skew, kurt,
    )
