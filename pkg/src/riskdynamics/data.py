"""Panel-data schema: country-year records, CSV ingestion, temporal splits.

The input is a per-country, per-year table of disaster-risk indicators
(a composite risk index plus five subcomponents) together with the
categorical banding of four of them.  Loading validates every row and
keeps a rejection report instead of silently dropping bad rows; the
resulting :class:`Dataset` is immutable and iterates in a fixed
(country, year) order so downstream results are reproducible.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass, fields, replace

from .errors import (
    DuplicateKeyError,
    EmptyDatasetError,
    EmptySplitError,
    MissingColumnError,
    MissingFileError,
)

# Numeric indicator fields, in the fixed order used for feature vectors.
INDICATOR_FIELDS = (
    "wri",
    "exposure",
    "vulnerability",
    "susceptibility",
    "lack_coping",
    "lack_adaptive",
)

# Categorical banding fields, in encoding order.
CATEGORY_FIELDS = (
    "exposure_cat",
    "wri_cat",
    "vulnerability_cat",
    "susceptibility_cat",
)


@dataclass(frozen=True)
class CountryYearRecord:
    """One country observed in one year."""

    country: str
    region: str
    year: int
    wri: float
    exposure: float
    vulnerability: float
    susceptibility: float
    lack_coping: float
    lack_adaptive: float
    exposure_cat: str
    wri_cat: str
    vulnerability_cat: str
    susceptibility_cat: str

    def key(self) -> tuple[str, int]:
        return (self.country, self.year)


def record_features(record: CountryYearRecord) -> tuple[float, ...]:
    """The six numeric indicators of a record, in ``INDICATOR_FIELDS`` order."""
    return tuple(getattr(record, name) for name in INDICATOR_FIELDS)


def _validate_record(rec: CountryYearRecord, year_range: tuple[int, int]) -> list[str]:
    problems = []
    if not rec.country:
        problems.append("empty country")
    lo, hi = year_range
    if not lo <= rec.year <= hi:
        problems.append(f"year {rec.year} outside [{lo}, {hi}]")
    for name in INDICATOR_FIELDS:
        value = getattr(rec, name)
        if not math.isfinite(value):
            problems.append(f"{name} is not finite")
        elif value < 0:
            problems.append(f"{name} is negative")
    return problems


class Dataset:
    """Immutable, deterministically ordered collection of country-year records.

    Records are stored sorted by (country, year); ``years`` and
    ``countries`` are the sorted distinct values.  (country, year) must be
    unique, otherwise :class:`DuplicateKeyError` is raised.
    """

    __slots__ = ("records", "years", "countries", "_by_key")

    def __init__(self, records):
        ordered = tuple(sorted(records, key=lambda r: r.key()))
        by_key = {}
        for rec in ordered:
            if rec.key() in by_key:
                raise DuplicateKeyError(rec.country, rec.year)
            by_key[rec.key()] = rec
        object.__setattr__(self, "records", ordered)
        object.__setattr__(self, "years", tuple(sorted({r.year for r in ordered})))
        object.__setattr__(self, "countries", tuple(sorted({r.country for r in ordered})))
        object.__setattr__(self, "_by_key", by_key)

    def __setattr__(self, name, value):  # pragma: no cover - guard only
        raise AttributeError("Dataset is immutable")

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __eq__(self, other) -> bool:
        return isinstance(other, Dataset) and self.records == other.records

    def get(self, country: str, year: int) -> CountryYearRecord | None:
        return self._by_key.get((country, year))

    def row_keys(self) -> tuple[tuple[str, int], ...]:
        return tuple(r.key() for r in self.records)

    def filter(self, predicate) -> "Dataset":
        return Dataset([r for r in self.records if predicate(r)])


@dataclass(frozen=True)
class SchemaConfig:
    """Column-name map for the input CSV.

    Defaults match the public WRI time-series export, where the country
    identifier is published under the header "Region"; ``region_column``
    may point at a different column when a true continent label exists.
    """

    country_column: str = "Region"
    region_column: str = "Region"
    year_column: str = "Year"
    wri_column: str = "WRI"
    exposure_column: str = "Exposure"
    vulnerability_column: str = "Vulnerability"
    susceptibility_column: str = "Susceptibility"
    lack_coping_column: str = "Lack of Coping Capabilities"
    lack_adaptive_column: str = "Lack of Adaptive Capacities"
    exposure_cat_column: str = "Exposure Category"
    wri_cat_column: str = "WRI Category"
    vulnerability_cat_column: str = "Vulnerability Category"
    susceptibility_cat_column: str = "Susceptibility Category"
    year_range: tuple[int, int] = (2011, 2021)

    def numeric_columns(self) -> dict[str, str]:
        return {
            "wri": self.wri_column,
            "exposure": self.exposure_column,
            "vulnerability": self.vulnerability_column,
            "susceptibility": self.susceptibility_column,
            "lack_coping": self.lack_coping_column,
            "lack_adaptive": self.lack_adaptive_column,
        }

    def category_columns(self) -> dict[str, str]:
        return {
            "exposure_cat": self.exposure_cat_column,
            "wri_cat": self.wri_cat_column,
            "vulnerability_cat": self.vulnerability_cat_column,
            "susceptibility_cat": self.susceptibility_cat_column,
        }

    def all_columns(self) -> list[str]:
        cols = [self.country_column, self.region_column, self.year_column]
        cols += list(self.numeric_columns().values())
        cols += list(self.category_columns().values())
        # preserve first occurrence (country and region may share a column)
        seen = []
        for c in cols:
            if c not in seen:
                seen.append(c)
        return seen


@dataclass(frozen=True)
class RejectedRow:
    line: int
    reasons: tuple[str, ...]


@dataclass(frozen=True)
class LoadResult:
    dataset: Dataset
    rejected: tuple[RejectedRow, ...]


def load_dataset(path, schema: SchemaConfig | None = None) -> LoadResult:
    """Parse and validate a CSV file of country-year rows.

    Rows that fail validation (missing or non-finite indicators, bad year,
    empty country) are collected into ``LoadResult.rejected`` with line
    numbers and reasons.  A header missing a mapped column raises
    :class:`MissingColumnError`; a file with no valid rows raises
    :class:`EmptyDatasetError`.
    """
    schema = schema or SchemaConfig()
    try:
        handle = open(path, newline="", encoding="utf-8")
    except FileNotFoundError as exc:
        raise MissingFileError(f"input file not found: {path}") from exc

    with handle:
        reader = csv.DictReader(handle)
        header = reader.fieldnames or []
        for column in schema.all_columns():
            if column not in header:
                raise MissingColumnError(column)

        records: list[CountryYearRecord] = []
        rejected: list[RejectedRow] = []
        for line_no, row in enumerate(reader, start=2):
            rec, problems = _parse_row(row, schema)
            if rec is not None and not problems:
                records.append(rec)
            else:
                rejected.append(RejectedRow(line=line_no, reasons=tuple(problems)))

    if not records:
        raise EmptyDatasetError(f"no valid rows in {path}")
    return LoadResult(dataset=Dataset(records), rejected=tuple(rejected))


def _parse_row(row: dict, schema: SchemaConfig):
    problems: list[str] = []

    def text(column: str) -> str:
        return (row.get(column) or "").strip()

    country = text(schema.country_column)
    region = text(schema.region_column)

    year = 0
    raw_year = text(schema.year_column)
    try:
        year = int(float(raw_year))
    except ValueError:
        problems.append(f"year {raw_year!r} is not an integer")

    values = {}
    for field, column in schema.numeric_columns().items():
        raw = text(column)
        try:
            values[field] = float(raw)
        except ValueError:
            problems.append(f"{field} value {raw!r} is not numeric")
            values[field] = math.nan

    rec = CountryYearRecord(
        country=country,
        region=region,
        year=year,
        exposure_cat=text(schema.exposure_cat_column),
        wri_cat=text(schema.wri_cat_column),
        vulnerability_cat=text(schema.vulnerability_cat_column),
        susceptibility_cat=text(schema.susceptibility_cat_column),
        **values,
    )
    if not problems:
        problems = _validate_record(rec, schema.year_range)
    else:
        problems.extend(p for p in _validate_record(rec, schema.year_range)
                        if "not finite" not in p)
    return (rec if not problems else None), problems


def write_csv(dataset: Dataset, path, schema: SchemaConfig | None = None) -> None:
    """Serialize a dataset back to CSV in the schema's column layout.

    Floats are written with ``repr`` so a reload reproduces every record
    field-for-field.
    """
    schema = schema or SchemaConfig()
    columns = schema.all_columns()
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(columns)
        for rec in dataset:
            cell = {
                schema.country_column: rec.country,
                schema.region_column: rec.region,
                schema.year_column: str(rec.year),
            }
            # when country and region share a column the country value wins
            if schema.region_column != schema.country_column:
                cell[schema.region_column] = rec.region
            cell[schema.country_column] = rec.country
            for field, column in schema.numeric_columns().items():
                cell[column] = repr(getattr(rec, field))
            for field, column in schema.category_columns().items():
                cell[column] = getattr(rec, field)
            writer.writerow([cell[c] for c in columns])


class Horizon(enum.Enum):
    """Gap, in years, between the end of training data and evaluation."""

    ONE = 1
    THREE = 3
    FIVE = 5

    @classmethod
    def parse(cls, value) -> "Horizon":
        if isinstance(value, Horizon):
            return value
        if isinstance(value, str) and value.lower() in _HORIZON_NAMES:
            return _HORIZON_NAMES[value.lower()]
        return cls(int(value))


_HORIZON_NAMES = {"one": Horizon.ONE, "three": Horizon.THREE, "five": Horizon.FIVE}


@dataclass(frozen=True)
class SplitSpec:
    """Year predicates for one temporal train/test split.

    Train rows satisfy ``year < train_before``; test rows satisfy
    ``year == test_from`` when ``test_exact`` else ``year >= test_from``.
    """

    horizon: Horizon
    train_before: int
    test_from: int
    test_exact: bool = False

    @classmethod
    def for_horizon(cls, horizon, last_year: int = 2021,
                    paper_literal: bool = False) -> "SplitSpec":
        """Derive the split for a horizon, anchored on the final data year.

        With the default ``last_year=2021``: one year trains on <2021 and
        tests on ==2021; three years trains on <2018 and tests on >=2018.
        The five-year split trains on <2016 so train and test stay
        disjoint; ``paper_literal=True`` restores the overlapping
        train<2018 / test>=2016 variant for replication only.
        """
        horizon = Horizon.parse(horizon)
        if horizon is Horizon.ONE:
            return cls(horizon, train_before=last_year, test_from=last_year,
                       test_exact=True)
        if horizon is Horizon.THREE:
            return cls(horizon, train_before=last_year - 3, test_from=last_year - 3)
        train_before = (last_year - 3) if paper_literal else (last_year - 5)
        return cls(horizon, train_before=train_before, test_from=last_year - 5)

    def in_train(self, year: int) -> bool:
        return year < self.train_before

    def in_test(self, year: int) -> bool:
        return year == self.test_from if self.test_exact else year >= self.test_from


def temporal_split(dataset: Dataset, spec: SplitSpec) -> tuple[Dataset, Dataset]:
    """Split a dataset into (train, test) by the spec's year predicates."""
    if len(dataset) == 0:
        raise EmptyDatasetError("cannot split an empty dataset")
    train = [r for r in dataset if spec.in_train(r.year)]
    test = [r for r in dataset if spec.in_test(r.year)]
    if not train or not test:
        raise EmptySplitError(
            f"horizon {spec.horizon.value}: train has {len(train)} rows, "
            f"test has {len(test)} rows"
        )
    return Dataset(train), Dataset(test)


def replace_fields(record: CountryYearRecord, **changes) -> CountryYearRecord:
    return replace(record, **changes)


RECORD_FIELD_NAMES = tuple(f.name for f in fields(CountryYearRecord))
