import math

import pytest

from riskdynamics.data import (
    Dataset,
    Horizon,
    SchemaConfig,
    SplitSpec,
    load_dataset,
    record_features,
    temporal_split,
    write_csv,
)
from riskdynamics.errors import (
    DuplicateKeyError,
    EmptyDatasetError,
    EmptySplitError,
    MissingColumnError,
    MissingFileError,
)
from riskdynamics.synthetic import make_synthetic_panel

HEADER = ("Region,Year,WRI,Exposure,Vulnerability,Susceptibility,"
          "Lack of Coping Capabilities,Lack of Adaptive Capacities,"
          "Exposure Category,WRI Category,Vulnerability Category,"
          "Susceptibility Category")


def _write(tmp_path, rows, header=HEADER):
    path = tmp_path / "input.csv"
    path.write_text("\n".join([header] + rows) + "\n", encoding="utf-8")
    return path


def _row(country="Atlantis", year=2015, wri="7.5", exposure="12.0"):
    return (f"{country},{year},{wri},{exposure},30.0,16.0,45.0,28.0,"
            "Low,Low,Medium,Low")


class TestLoadDataset:
    def test_loads_valid_rows(self, tmp_path):
        path = _write(tmp_path, [_row(), _row(year=2016)])
        result = load_dataset(path)
        assert len(result.dataset) == 2
        assert result.dataset.years == (2015, 2016)
        assert result.rejected == ()

    def test_header_only_raises_empty(self, tmp_path):
        path = _write(tmp_path, [])
        with pytest.raises(EmptyDatasetError):
            load_dataset(path)

    def test_missing_column_raises(self, tmp_path):
        path = tmp_path / "input.csv"
        path.write_text("Region,Year\nAtlantis,2015\n", encoding="utf-8")
        with pytest.raises(MissingColumnError) as err:
            load_dataset(path)
        assert err.value.name == "WRI"

    def test_missing_file(self, tmp_path):
        with pytest.raises(MissingFileError):
            load_dataset(tmp_path / "nope.csv")

    def test_row_with_missing_wri_is_rejected_with_report(self, tmp_path):
        # 3 hand-written rows, one missing WRI -> 2 records + 1 rejection
        path = _write(tmp_path, [
            _row(country="Atlantis"),
            _row(country="Borduria", wri=""),
            _row(country="Cascadia"),
        ])
        result = load_dataset(path)
        assert len(result.dataset) == 2
        assert len(result.rejected) == 1
        assert result.rejected[0].line == 3
        assert any("wri" in reason for reason in result.rejected[0].reasons)

    def test_negative_and_nonfinite_rejected(self, tmp_path):
        path = _write(tmp_path, [
            _row(country="Atlantis", wri="-1.0"),
            _row(country="Borduria", exposure="nan"),
            _row(country="Cascadia"),
        ])
        result = load_dataset(path)
        assert result.dataset.countries == ("Cascadia",)
        assert len(result.rejected) == 2

    def test_year_outside_range_rejected(self, tmp_path):
        path = _write(tmp_path, [_row(year=1999), _row(year=2015)])
        result = load_dataset(path)
        assert result.dataset.years == (2015,)
        custom = SchemaConfig(year_range=(1990, 2021))
        assert len(load_dataset(path, custom).dataset) == 2

    def test_duplicate_key_raises(self, tmp_path):
        path = _write(tmp_path, [_row(), _row()])
        with pytest.raises(DuplicateKeyError):
            load_dataset(path)

    def test_deterministic_order(self, tmp_path):
        path = _write(tmp_path, [
            _row(country="Zembla"), _row(country="Atlantis"),
            _row(country="Zembla", year=2014),
        ])
        first = load_dataset(path).dataset
        second = load_dataset(path).dataset
        assert first.row_keys() == second.row_keys()
        assert first.row_keys() == (
            ("Atlantis", 2015), ("Zembla", 2014), ("Zembla", 2015))


def test_csv_round_trip(tmp_path):
    # distinct country/region columns keep every field: lossless round trip
    dataset = make_synthetic_panel(n_countries=6, seed=3)
    schema = SchemaConfig(country_column="Country", region_column="Continent")
    out = tmp_path / "round.csv"
    write_csv(dataset, out, schema)
    reloaded = load_dataset(out, schema).dataset
    assert reloaded.records == dataset.records


def test_csv_round_trip_default_schema(tmp_path, panel):
    # default schema folds region into the country column, like the
    # public dataset; datasets loaded that way round-trip exactly
    out = tmp_path / "round.csv"
    write_csv(panel, out)
    assert load_dataset(out).dataset.records == panel.records


class TestRecordFeatures:
    def test_declared_order(self, tmp_path):
        path = _write(tmp_path, ["Atlantis,2015,15.5,1.0,2.0,3.0,4.0,5.0,L,L,L,L"])
        rec = load_dataset(path).dataset.records[0]
        assert record_features(rec) == (15.5, 1.0, 2.0, 3.0, 4.0, 5.0)

    def test_zero_record(self, tmp_path):
        path = _write(tmp_path, ["Atlantis,2015,0,0,0,0,0,0,L,L,L,L"])
        rec = load_dataset(path).dataset.records[0]
        assert record_features(rec) == (0, 0, 0, 0, 0, 0)

    def test_arity_always_six(self, panel):
        assert all(len(record_features(r)) == 6 for r in panel)


class TestTemporalSplit:
    def test_one_year(self, panel):
        train, test = temporal_split(panel, SplitSpec.for_horizon(Horizon.ONE))
        assert test.years == (2021,)
        assert max(train.years) == 2020
        assert len(test) == len(panel.countries)

    def test_three_year(self, panel):
        train, test = temporal_split(panel, SplitSpec.for_horizon(3))
        assert test.years == (2018, 2019, 2020, 2021)
        assert max(train.years) == 2017

    def test_five_year_disjoint_by_default(self, panel):
        train, test = temporal_split(panel, SplitSpec.for_horizon(5))
        assert test.years == (2016, 2017, 2018, 2019, 2020, 2021)
        assert max(train.years) == 2015
        assert set(train.years).isdisjoint(test.years)

    def test_five_year_paper_literal_overlaps(self, panel):
        spec = SplitSpec.for_horizon(5, paper_literal=True)
        train, test = temporal_split(panel, spec)
        assert max(train.years) == 2017
        assert min(test.years) == 2016
        assert set(train.years) & set(test.years) == {2016, 2017}

    def test_partition_property(self, panel):
        for horizon in Horizon:
            spec = SplitSpec.for_horizon(horizon)
            train, test = temporal_split(panel, spec)
            train_keys = set(train.row_keys())
            test_keys = set(test.row_keys())
            assert not train_keys & test_keys
            for rec in panel:
                in_train = rec.key() in train_keys
                in_test = rec.key() in test_keys
                excluded = not spec.in_train(rec.year) and not spec.in_test(rec.year)
                assert in_train + in_test + excluded == 1

    def test_single_year_dataset_empty_split(self, panel):
        only_2021 = panel.filter(lambda r: r.year == 2021)
        with pytest.raises(EmptySplitError):
            temporal_split(only_2021, SplitSpec.for_horizon(1))

    def test_union_within_dataset_years(self, panel):
        train, test = temporal_split(panel, SplitSpec.for_horizon(3))
        assert set(train.years) | set(test.years) <= set(panel.years)


def test_dataset_invariants(panel):
    assert list(panel.years) == sorted(set(r.year for r in panel))
    assert list(panel.countries) == sorted(set(r.country for r in panel))
    keys = panel.row_keys()
    assert keys == tuple(sorted(keys))
    for rec in panel:
        assert all(math.isfinite(v) and v >= 0 for v in record_features(rec))


def test_dataset_rejects_duplicates_directly(panel):
    with pytest.raises(DuplicateKeyError):
        Dataset(list(panel.records) + [panel.records[0]])
