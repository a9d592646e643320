import json

import numpy as np
import pytest

from hubbid.domain import (
    hub_from_dict,
    hub_to_dict,
    load_hub,
    read_timeseries,
    save_hub,
    write_timeseries,
)
from hubbid.domain.types import TimeGrid
from hubbid.errors import InputError

from test_validation import make_hub


def test_hub_round_trip_is_field_identical(tmp_path):
    hub = make_hub()
    grid = TimeGrid(1.0, 24)
    path = tmp_path / "hub.json"
    save_hub(str(path), hub, grid)
    loaded, loaded_grid = load_hub(str(path))
    assert loaded == hub
    assert loaded_grid == grid


def test_hub_without_der_blocks_round_trips(tmp_path):
    hub = make_hub(bess=None, pv=None, orc=None)
    path = tmp_path / "hub.json"
    save_hub(str(path), hub, TimeGrid(0.5, 48))
    loaded, grid = load_hub(str(path))
    assert loaded.bess is None and loaded.pv is None and loaded.orc is None
    assert loaded == hub
    assert grid.steps_per_day == 48


def test_tou_tariff_round_trips(tmp_path):
    from hubbid.domain import EconomicsSpec

    hub = make_hub(economics=EconomicsSpec(
        carbon_price=0.265, heat_price=0.03, tou_tariff=np.linspace(0.1, 0.3, 24),
    ))
    path = tmp_path / "hub.json"
    save_hub(str(path), hub, TimeGrid(1.0, 24))
    loaded, _ = load_hub(str(path))
    np.testing.assert_array_equal(loaded.economics.tou_tariff, hub.economics.tou_tariff)


def test_missing_field_reports_path():
    doc = hub_to_dict(make_hub(), TimeGrid(1.0, 24))
    del doc["datacenter"]["clusters"][0]["rho_intercept"]
    with pytest.raises(InputError, match=r"datacenter\.clusters\[0\]\.rho_intercept"):
        hub_from_dict(doc)


def test_wrong_type_reports_path():
    doc = hub_to_dict(make_hub(), TimeGrid(1.0, 24))
    doc["ppa"]["p_gcp_rated"] = "three hundred"
    with pytest.raises(InputError, match=r"ppa\.p_gcp_rated"):
        hub_from_dict(doc)


def test_unsupported_schema_version_rejected():
    doc = hub_to_dict(make_hub(), TimeGrid(1.0, 24))
    doc["schema_version"] = 99
    with pytest.raises(InputError, match="schema_version"):
        hub_from_dict(doc)


def test_invalid_json_file_rejected(tmp_path):
    path = tmp_path / "hub.json"
    path.write_text("{not json")
    with pytest.raises(InputError, match="invalid JSON"):
        load_hub(str(path))


def test_missing_file_rejected(tmp_path):
    with pytest.raises(InputError, match="not found"):
        load_hub(str(tmp_path / "nope.json"))


def test_saved_hub_is_stable_bytes(tmp_path):
    hub = make_hub()
    grid = TimeGrid(1.0, 24)
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    save_hub(str(a), hub, grid)
    save_hub(str(b), hub, grid)
    assert a.read_bytes() == b.read_bytes()
    # and the file is valid JSON with a version marker
    assert json.loads(a.read_text())["schema_version"] == 1


def test_timeseries_round_trip(tmp_path):
    grid = TimeGrid(1.0, 24)
    path = tmp_path / "spot.csv"
    spot = np.linspace(0.05, 0.31, 24)
    write_timeseries(str(path), grid, {"spot": spot})
    table = read_timeseries(str(path))
    np.testing.assert_array_equal(table["spot"], spot)
    assert table["timestamp"][0] == "2025-01-01T00:00:00+00:00"
    assert table["timestamp"][23] == "2025-01-01T23:00:00+00:00"


def test_timeseries_multi_column(tmp_path):
    grid = TimeGrid(1.0, 24)
    path = tmp_path / "prices.csv"
    write_timeseries(str(path), grid, {"spot": np.ones(24), "ghi": np.zeros(24)})
    table = read_timeseries(str(path))
    assert set(table) == {"timestamp", "spot", "ghi"}


def test_timeseries_requires_timestamp_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,value\n2025-01-01T00:00:00+00:00,1.0\n")
    with pytest.raises(InputError, match="timestamp"):
        read_timeseries(str(path))


def test_timeseries_non_numeric_value_rejected(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("timestamp,value\n2025-01-01T00:00:00+00:00,abc\n")
    with pytest.raises(InputError, match="value"):
        read_timeseries(str(path))
