"""Tests for CSV/JSON loading and writing."""

import numpy as np
import pytest

from chargecast.domain import CalendarFrame
from chargecast.errors import DataError
from chargecast.io import (
    apply_holidays,
    load_adjacency_csv,
    load_charging_csv,
    load_holidays,
    write_adjacency_csv,
    write_charging_csv,
    write_epoch_log,
    write_holidays,
    write_metrics_json,
    write_predictions_csv,
)


def hourly_stamps(count, start="2024-03-01T00"):
    return np.datetime64(start) + np.arange(count).astype("timedelta64[h]")


class TestChargingCsv:
    def test_write_then_load_is_bit_exact(self, tmp_path):
        rng = np.random.default_rng(0)
        values = rng.normal(size=(30, 3)) * 1e3 + 0.123456789012345
        ids = ("alpha", "beta", "gamma")
        path = tmp_path / "series.csv"
        write_charging_csv(path, hourly_stamps(30), ids, values)
        series, calendar, loaded_ids = load_charging_csv(path)
        assert loaded_ids == ids
        assert series.values.shape == (30, 3, 1)
        assert np.array_equal(series.values[:, :, 0], values)
        assert np.array_equal(calendar.timestamps, hourly_stamps(30))

    def test_missing_value_names_row_and_station(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text(
            "timestamp,a,b\n2024-03-01T00,1.0,2.0\n2024-03-01T01,,2.0\n"
        )
        with pytest.raises(DataError, match=r"row 3.*missing value for a"):
            load_charging_csv(path)

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("timestamp,a\n2024-03-01T00,oops\n")
        with pytest.raises(DataError, match="non-numeric"):
            load_charging_csv(path)

    def test_hour_gap_points_at_the_row(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text(
            "timestamp,a\n2024-03-01T00,1.0\n2024-03-01T01,1.0\n2024-03-01T03,1.0\n"
        )
        with pytest.raises(DataError, match="row 4"):
            load_charging_csv(path)

    def test_duplicate_stamp(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text(
            "timestamp,a\n2024-03-01T00,1.0\n2024-03-01T00,1.0\n"
        )
        with pytest.raises(DataError, match="duplicates"):
            load_charging_csv(path)

    def test_ragged_row(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("timestamp,a,b\n2024-03-01T00,1.0\n")
        with pytest.raises(DataError, match="row 2 has 2 cells"):
            load_charging_csv(path)

    def test_header_only_file(self, tmp_path):
        path = tmp_path / "series.csv"
        path.write_text("timestamp,a\n")
        with pytest.raises(DataError, match="at least one data row"):
            load_charging_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(DataError, match="cannot read"):
            load_charging_csv(tmp_path / "absent.csv")

    def test_occupancy_range_warning(self, tmp_path):
        path = tmp_path / "series.csv"
        write_charging_csv(path, hourly_stamps(3), ("a",), np.array([[0.2], [0.9], [1.4]]))
        with pytest.warns(UserWarning, match="occupancy"):
            load_charging_csv(path, kind="occupancy")

    def test_volume_kind_does_not_warn_on_big_values(self, tmp_path):
        import warnings

        path = tmp_path / "series.csv"
        write_charging_csv(path, hourly_stamps(3), ("a",), np.array([[5.0], [9.0], [14.0]]))
        with warnings.catch_warnings():
            warnings.simplefilter("error")
            load_charging_csv(path, kind="volume")


class TestAdjacencyCsv:
    def test_roundtrip(self, tmp_path):
        ids = ("s0", "s1", "s2")
        adj = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 1.0], [0.0, 1.0, 1.0]])
        path = tmp_path / "adjacency.csv"
        write_adjacency_csv(path, ids, adj)
        graph = load_adjacency_csv(path, ids)
        assert graph.node_ids == ids
        assert np.array_equal(graph.adjacency, adj)

    def test_rows_realign_to_series_order(self, tmp_path):
        path = tmp_path / "adjacency.csv"
        path.write_text(
            "station,s1,s0\n"
            "s1,1,0\n"
            "s0,0,1\n"
        )
        graph = load_adjacency_csv(path, ("s0", "s1"))
        assert np.array_equal(graph.adjacency, np.eye(2))

    def test_id_mismatch_lists_the_strays(self, tmp_path):
        path = tmp_path / "adjacency.csv"
        write_adjacency_csv(path, ("x", "y"), np.eye(2))
        with pytest.raises(DataError, match="do not match the series ids"):
            load_adjacency_csv(path, ("s0", "s1"))

    def test_asymmetry_names_both_stations(self, tmp_path):
        path = tmp_path / "adjacency.csv"
        path.write_text(
            "station,s0,s1\n"
            "s0,1,1\n"
            "s1,0,1\n"
        )
        with pytest.raises(DataError, match=r"\[s0\]\[s1\]"):
            load_adjacency_csv(path, ("s0", "s1"))

    def test_non_binary_entry(self, tmp_path):
        path = tmp_path / "adjacency.csv"
        path.write_text("station,s0,s1\ns0,1,0.5\ns1,0.5,1\n")
        with pytest.raises(DataError, match="not 0 or 1"):
            load_adjacency_csv(path, ("s0", "s1"))

    def test_missing_diagonal_warns_and_fixes(self, tmp_path):
        path = tmp_path / "adjacency.csv"
        path.write_text("station,s0,s1\ns0,0,1\ns1,1,0\n")
        with pytest.warns(UserWarning, match="diagonal"):
            graph = load_adjacency_csv(path, ("s0", "s1"))
        assert np.array_equal(np.diag(graph.adjacency), np.ones(2))


class TestHolidays:
    def test_roundtrip_with_comments_and_blanks(self, tmp_path):
        path = tmp_path / "holidays.txt"
        days = np.array(["2024-01-01", "2024-05-01"], dtype="datetime64[D]")
        write_holidays(path, days)
        text = path.read_text()
        path.write_text("# national holidays\n\n" + text)
        loaded = load_holidays(path)
        assert np.array_equal(loaded, days)

    def test_bad_date_names_the_line(self, tmp_path):
        path = tmp_path / "holidays.txt"
        path.write_text("2024-01-01\nnot-a-date\n")
        with pytest.raises(DataError, match="line 2"):
            load_holidays(path)

    def test_apply_holidays_flags_whole_days(self):
        calendar = CalendarFrame(hourly_stamps(72, start="2024-01-01T00"))
        flagged = apply_holidays(calendar, np.array(["2024-01-02"], dtype="datetime64[D]"))
        assert flagged.holiday_flag[:24].sum() == 0
        assert flagged.holiday_flag[24:48].sum() == 24
        assert flagged.holiday_flag[48:].sum() == 0


class TestResultWriters:
    def test_predictions_long_format(self, tmp_path):
        path = tmp_path / "predictions.csv"
        preds = np.arange(2 * 2 * 2, dtype=float).reshape(2, 2, 2, 1)
        truths = preds + 0.5
        write_predictions_csv(path, hourly_stamps(2), ("a", "b"), preds, truths)
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "window_start,step,station,y_true,y_pred"
        assert len(lines) == 1 + 2 * 2 * 2
        assert lines[1].split(",") == ["2024-03-01T00", "1", "a", "0.5", "0.0"]

    def test_epoch_log_tab_separated(self, tmp_path):
        path = tmp_path / "epochs.tsv"
        write_epoch_log(path, [(1, 0.5, 0.25), (2, 0.25, 0.125)])
        lines = path.read_text().strip().splitlines()
        assert lines[0] == "1\t0.5\t0.25"
        assert lines[1] == "2\t0.25\t0.125"

    def test_metrics_json_bytes_are_deterministic(self, tmp_path):
        payload = {"b": 1.5, "a": {"z": [1, 2], "k": None}}
        p1 = tmp_path / "m1.json"
        p2 = tmp_path / "m2.json"
        write_metrics_json(p1, payload)
        write_metrics_json(p2, {"a": {"k": None, "z": [1, 2]}, "b": 1.5})
        assert p1.read_bytes() == p2.read_bytes()
        assert p1.read_text().endswith("\n")
