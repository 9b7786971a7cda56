# tests/test_reporting.py
import json
import math

from hardyprobe import __version__
from hardyprobe.hardy_core import Which
from hardyprobe.reporting import ReportWriter, clean, render_csv, render_json, render_plot


def test_clean_handles_non_finite_values_and_enums():
    record = {"value": math.inf, "low": -math.inf, "gap": math.nan, "which": Which.B2, "pair": (1.0, 2)}
    assert clean(record) == {"value": "inf", "low": "-inf", "gap": "nan", "which": "B2", "pair": [1.0, 2]}


def test_render_json_is_sorted_and_stable():
    records = [{"name": "b", "value": 1.5}, {"value": math.inf, "name": "a"}]
    text = render_json("bconst", 4, records)
    assert text.endswith("\n")
    payload = json.loads(text)
    assert payload["version"] == __version__
    assert payload["command"] == "bconst"
    assert payload["seed"] == 4
    assert payload["records"][1] == {"name": "a", "value": "inf"}
    assert list(payload) == sorted(payload)
    assert render_json("bconst", 4, records) == text


def test_render_csv_empty():
    assert render_csv([]) == ""


def test_render_csv_appends_late_columns():
    rows = [{"name": "a", "value": 0.1}, {"name": "b", "value": None, "notes": {"k": 1}}]
    lines = render_csv(rows).splitlines()
    assert lines[0] == "name,value,notes"
    assert lines[1] == "a,0.1,"
    assert lines[2] == 'b,,"{""k"": 1}"'


def test_render_plot():
    assert render_plot([(1, 0.5), (2.0, math.inf)]) == "# x y\n1.0 0.5\n2.0 inf\n"


def test_report_writer_writes_all_formats(tmp_path):
    # 1. Collect
    writer = ReportWriter(tmp_path / "out", "check", 0)
    writer.add({"name": "one", "verdict": "pass"})
    writer.add({"name": "two"}, rows=[{"level": 1}, {"level": 2}])
    writer.add_plot("two levels/x", [(1.0, 2.0)])

    # 2. Write
    written = writer.write()

    # 3. Verify
    out = tmp_path / "out"
    assert written == [out / "report.json", out / "report.csv", out / "plotdata" / "two_levels_x.dat"]
    assert len(json.loads((out / "report.json").read_text())["records"]) == 2
    assert (out / "report.csv").read_text().splitlines() == [
        "name,verdict,level", "one,pass,", ",,1", ",,2"]
    assert not list(out.glob("*.tmp"))


def test_report_writer_respects_formats(tmp_path):
    writer = ReportWriter(tmp_path, "validate", 1, formats=["json"])
    writer.add({"name": "x"})
    writer.add_plot("curve", [(0.0, 0.0)])
    assert writer.write() == [tmp_path / "report.json"]
    assert not (tmp_path / "report.csv").exists()
    assert not (tmp_path / "plotdata").exists()
