import csv
import io
import json

import numpy as np
import pytest

from polycurv.reporting import RunReport, format_value, to_csv, to_json, write_report


def sample():
    r = RunReport("demo", {"k": np.int64(3), "x": 0.1}, ("a", "b", "c"),
                  [{"a": 1 / 3, "b": np.float64(np.pi), "c": float("nan")}, {"a": 1, "b": True, "c": None}])
    r.check("fine", True)
    r.wall_time = 12.5
    return r


def test_format_value():
    assert format_value(True) == "true"
    assert format_value(float("nan")) == "nan"
    assert format_value(None) == ""
    assert float(format_value(0.1 + 0.2)) == 0.1 + 0.2


def test_csv_roundtrip_exact():
    text = to_csv(sample())
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == ["a", "b", "c"]
    assert float(rows[1][0]) == 1 / 3
    assert float(rows[1][1]) == np.pi
    assert rows[1][2] == "nan"
    assert rows[2] == ["1", "true", ""]


def test_json_matches_csv_and_has_no_nan():
    r = sample()
    doc = json.loads(to_json(r))
    assert doc["rows"][0]["a"] == 1 / 3
    assert doc["rows"][0]["c"] is None
    assert doc["params"] == {"k": 3, "x": 0.1}
    assert doc["passed"] is True
    assert "NaN" not in to_json(r)


def test_wall_time_not_serialised():
    a, b = sample(), sample()
    b.wall_time = 99.0
    assert to_csv(a) == to_csv(b)
    assert to_json(a) == to_json(b)


def test_header_only_csv():
    r = RunReport("empty", {}, ("x", "y"))
    assert to_csv(r) == "x,y\n"
    assert r.passed


def test_failed_check():
    r = sample()
    r.check("bad", False)
    assert not r.passed
    assert json.loads(to_json(r))["checks"] == {"fine": True, "bad": False}


def test_write_report(tmp_path):
    p = tmp_path / "r.json"
    write_report(sample(), "json", path=p)
    assert json.loads(p.read_text())["experiment"] == "demo"
    buf = io.StringIO()
    write_report(sample(), "csv", stream=buf)
    assert buf.getvalue().startswith("a,b,c\n")
    with pytest.raises(ValueError):
        write_report(sample(), "xml")
