"""Outlier detection, feature standardization, and categorical encoding.

Conventions fixed here and relied on everywhere else:

* population (not sample) standard deviation, so z-scores and
  standardized matrices are exactly reproducible;
* outliers are flagged and reported but never removed from downstream
  fits;
* clustering consumes only the six standardized numeric indicators,
  while classification consumes the full encoded feature set (numerics,
  year, and one-hot region/category blocks).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .data import CATEGORY_FIELDS, INDICATOR_FIELDS, Dataset
from .errors import (
    EmptyDatasetError,
    TooFewValuesError,
    UnknownCategoryError,
    ZeroVarianceError,
)


@dataclass(frozen=True)
class FeatureMatrix:
    """Dense numeric matrix with per-row (country, year) identity.

    ``values`` is frozen (non-writeable) after construction.
    """

    values: np.ndarray
    columns: tuple[str, ...]
    row_keys: tuple[tuple[str, int], ...]

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError("FeatureMatrix values must be 2-dimensional")
        if values.shape[1] != len(self.columns):
            raise ValueError("column names do not match matrix width")
        if values.shape[0] != len(self.row_keys):
            raise ValueError("row keys do not match matrix height")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def column(self, name: str) -> np.ndarray:
        return self.values[:, self.columns.index(name)]

    def with_values(self, values: np.ndarray) -> "FeatureMatrix":
        return FeatureMatrix(values, self.columns, self.row_keys)


def indicator_matrix(dataset: Dataset) -> FeatureMatrix:
    """The six numeric indicators of every record, in dataset order."""
    if len(dataset) == 0:
        raise EmptyDatasetError("dataset has no records")
    values = np.array(
        [[getattr(r, name) for name in INDICATOR_FIELDS] for r in dataset]
    )
    return FeatureMatrix(values, INDICATOR_FIELDS, dataset.row_keys())


def zscore(values) -> np.ndarray:
    """Population z-scores: (x - mean) / population stddev."""
    x = np.asarray(values, dtype=float)
    if x.size < 2:
        raise TooFewValuesError("z-score needs at least 2 values")
    std = x.std()  # population convention
    if std == 0:
        raise ZeroVarianceError("z-score input")
    return (x - x.mean()) / std


@dataclass(frozen=True)
class OutlierConfig:
    threshold: float = 3.0
    variables: tuple[str, ...] = ("wri", "exposure")

    def __post_init__(self):
        if self.threshold <= 0:
            raise ValueError("threshold must be positive")
        if not self.variables:
            raise ValueError("variables must be non-empty")
        for name in self.variables:
            if name not in INDICATOR_FIELDS:
                raise ValueError(f"unknown indicator {name!r}")


@dataclass(frozen=True)
class OutlierEntry:
    country: str
    year: int
    variable: str
    zscore: float


@dataclass(frozen=True)
class OutlierReport:
    flagged: tuple[OutlierEntry, ...]
    distinct_countries: tuple[str, ...]
    threshold: float

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write("country,year,variable,zscore\n")
            for e in self.flagged:
                handle.write(f'"{e.country}",{e.year},{e.variable},{e.zscore:.6f}\n')

    def to_json(self) -> str:
        payload = {
            "threshold": self.threshold,
            "flagged": [
                {"country": e.country, "year": e.year,
                 "variable": e.variable, "zscore": round(e.zscore, 6)}
                for e in self.flagged
            ],
            "distinct_countries": list(self.distinct_countries),
        }
        return json.dumps(payload, indent=2, sort_keys=True)


def detect_outliers(dataset: Dataset, config: OutlierConfig | None = None) -> OutlierReport:
    """Flag every (record, variable) whose pooled z-score exceeds the threshold.

    Scores pool all years together; |z| must be strictly greater than
    ``config.threshold``.
    """
    config = config or OutlierConfig()
    if len(dataset) == 0:
        raise EmptyDatasetError("dataset has no records")
    flagged = []
    for variable in config.variables:
        values = np.array([getattr(r, variable) for r in dataset])
        try:
            scores = zscore(values)
        except ZeroVarianceError:
            raise ZeroVarianceError(f"indicator {variable!r}")
        for rec, z in zip(dataset, scores):
            if abs(z) > config.threshold:
                flagged.append(OutlierEntry(rec.country, rec.year, variable, float(z)))
    flagged.sort(key=lambda e: (e.country, e.year, e.variable))
    countries = tuple(sorted({e.country for e in flagged}))
    return OutlierReport(tuple(flagged), countries, config.threshold)


@dataclass(frozen=True)
class StandardizationParams:
    """Per-column mean and population stddev, reusable on unseen rows."""

    columns: tuple[str, ...]
    means: np.ndarray
    stds: np.ndarray

    def apply(self, matrix: FeatureMatrix) -> FeatureMatrix:
        if matrix.columns != self.columns:
            raise ValueError("matrix columns do not match standardization params")
        return matrix.with_values((matrix.values - self.means) / self.stds)

    def invert(self, matrix: FeatureMatrix) -> FeatureMatrix:
        if matrix.columns != self.columns:
            raise ValueError("matrix columns do not match standardization params")
        return matrix.with_values(matrix.values * self.stds + self.means)


def standardize(matrix: FeatureMatrix) -> tuple[FeatureMatrix, StandardizationParams]:
    """Center and scale every column to mean 0, population stddev 1."""
    means = matrix.values.mean(axis=0)
    stds = matrix.values.std(axis=0)
    for j, s in enumerate(stds):
        if s == 0:
            raise ZeroVarianceError(f"column {matrix.columns[j]!r}")
    params = StandardizationParams(matrix.columns, means, stds)
    return params.apply(matrix), params


@dataclass(frozen=True)
class EncodingConfig:
    """What goes into the classification feature matrix."""

    include_region: bool = True
    include_year: bool = True
    include_categories: bool = True
    strict: bool = False  # raise on unseen categories instead of all-zeros


@dataclass(frozen=True)
class FeatureEncoder:
    """One-hot vocabulary learned from a training dataset.

    Numeric indicators and year pass through; region and the four
    category fields expand into one-hot blocks with categories in sorted
    order.  Unseen categories at transform time encode as all-zeros
    unless ``config.strict``.
    """

    config: EncodingConfig
    categories: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def columns(self) -> tuple[str, ...]:
        cols = list(INDICATOR_FIELDS)
        if self.config.include_year:
            cols.append("year")
        for fname, levels in self.categories.items():
            cols.extend(f"{fname}={level}" for level in levels)
        return tuple(cols)

    def numeric_columns(self) -> tuple[str, ...]:
        """Columns that are continuous (candidates for standardization)."""
        cols = list(INDICATOR_FIELDS)
        if self.config.include_year:
            cols.append("year")
        return tuple(cols)

    def transform(self, dataset: Dataset) -> FeatureMatrix:
        if len(dataset) == 0:
            raise EmptyDatasetError("dataset has no records")
        n = len(dataset)
        blocks = [np.array([[getattr(r, f) for f in INDICATOR_FIELDS] for r in dataset])]
        if self.config.include_year:
            blocks.append(np.array([[float(r.year)] for r in dataset]))
        for fname, levels in self.categories.items():
            index = {level: j for j, level in enumerate(levels)}
            block = np.zeros((n, len(levels)))
            for i, rec in enumerate(dataset):
                value = getattr(rec, fname)
                j = index.get(value)
                if j is None:
                    if self.config.strict:
                        raise UnknownCategoryError(fname, value)
                    continue  # unseen category -> all-zero block row
                block[i, j] = 1.0
            blocks.append(block)
        return FeatureMatrix(np.hstack(blocks), self.columns(), dataset.row_keys())


def fit_encoder(dataset: Dataset, config: EncodingConfig | None = None) -> FeatureEncoder:
    config = config or EncodingConfig()
    if len(dataset) == 0:
        raise EmptyDatasetError("dataset has no records")
    categories: dict[str, tuple[str, ...]] = {}
    if config.include_region:
        categories["region"] = tuple(sorted({r.region for r in dataset}))
    if config.include_categories:
        for fname in CATEGORY_FIELDS:
            categories[fname] = tuple(sorted({getattr(r, fname) for r in dataset}))
    return FeatureEncoder(config=config, categories=categories)


def encode_features(dataset: Dataset, config: EncodingConfig | None = None) -> FeatureMatrix:
    """Fit an encoder on the dataset and transform it in one step."""
    return fit_encoder(dataset, config).transform(dataset)
