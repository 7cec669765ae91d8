import csv
import io
import json

import numpy as np
import pytest

from transient_cpd import ChangeAt, GaussianChangeSpec, sample_stream
from transient_cpd import arl, cli
from transient_cpd.exceptions import ConfigurationError, InputParseError


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def ndjson(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


def write_csv(path, values, header=None, index=False):
    with open(path, "w") as fh:
        if header:
            fh.write(header + "\n")
        for i, v in enumerate(values):
            fh.write(f"{i},{float(v)!r}\n" if index else f"{float(v)!r}\n")
    return str(path)


def test_constant_stream_gives_no_alarms(tmp_path, capsys):
    path = write_csv(tmp_path / "c.csv", [0.0] * 500)
    code, out, _ = run(["detect", "--procedure", "cusum", "--threshold", "8", "--input", path], capsys)
    assert code == 0 and out == ""


def test_detect_reports_rows_and_labels(tmp_path, capsys):
    y = [0.0] * 20 + [5.0] * 10
    path = write_csv(tmp_path / "s.csv", y, header="t,value", index=True)
    code, out, _ = run(
        ["detect", "--procedure", "mosum", "--window", "5", "--threshold", "12", "--input", path], capsys
    )
    recs = ndjson(out)
    assert code == 0 and len(recs) == 2
    first = recs[0]
    # rows count file lines, so the header shifts them by one
    assert first["n"] == 23 and first["row"] == 24 and first["index"] == "22"
    assert first["threshold"] == 12.0 and first["statistic"] > 12
    code, out, _ = run(
        ["detect", "--procedure", "mosum", "--window", "5", "--threshold", "12", "--input", path, "--stop-on-first"],
        capsys,
    )
    assert len(ndjson(out)) == 1


def test_malformed_row_exits_3(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("0.1\n0.2\nabc\n0.3\n")
    code, _, err = run(["detect", "--threshold", "4", "--input", str(path)], capsys)
    assert code == 3 and "row 3" in err and "abc" in err


def test_read_observations_rules():
    rows = list(cli.read_observations(io.StringIO("value\n1.5\n\n2.5\n")))
    assert [(r, v) for r, _, v in rows] == [(2, 1.5), (4, 2.5)]
    with pytest.raises(InputParseError, match="row 2"):
        list(cli.read_observations(io.StringIO("1\nnan\n")))
    with pytest.raises(InputParseError):
        list(cli.read_observations(io.StringIO("1,2,3\n")))


def test_config_merge_and_errors(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"procedure": "mosum", "window": "10", "target-arl": 500}))
    code, out, _ = run(["--config", str(cfg), "calibrate", "--method", "analytic"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["procedure"] == "mosum"
    assert rec["threshold"] / np.sqrt(10) == pytest.approx(2.585, abs=0.01)
    # a flag given on the command line wins over the file
    code, out, _ = run(["--config", str(cfg), "calibrate", "--method", "analytic", "--window", "50"], capsys)
    assert json.loads(out)["window"] == 50
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = run(["--config", str(cfg), "calibrate"], capsys)
    assert code == 2 and "bogus" in err
    code, _, _ = run(["detect", "--procedure", "cusum"], capsys)
    assert code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["detect", "--procedure", "nope"])
    assert exc.value.code == 2


def test_parse_window():
    assert cli.parse_window("10") == 10
    assert cli.parse_window("5:20") == (5, 20)
    with pytest.raises(ConfigurationError):
        cli.parse_window("a:b")


def test_arl_command(capsys):
    code, out, _ = run(["arl", "--procedure", "cusum", "--threshold", "4.39", "--reps", "2000", "--seed", "1"], capsys)
    rec = json.loads(out)
    assert code == 0
    # Page's log threshold maps to exp(4.39) on the ratio scale
    assert rec["approximation"] == pytest.approx(arl.cusum_arl_fast(np.exp(4.39), 1.0), rel=1e-12)
    assert rec["integral_equation"] == pytest.approx(500, rel=0.02)
    assert rec["simulation"]["replicates"] == 2000


def test_tables_at_zero_reps(capsys):
    code, out, _ = run(["tables", "--table", "1", "--reps", "0"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[0] == "# table1"
    row = next(csv.reader([lines[2]]))
    assert row[0] == "approximation"
    assert [round(float(v)) for v in row[1:]] == [59, 110, 514, 1015, 5019]
    code, out, _ = run(["tables", "--table", "5", "--reps", "0"], capsys)
    row = next(csv.reader([out.splitlines()[2]]))
    got = [float(v) for v in row[1:]]
    assert got == pytest.approx([20, 32, 49, 71, 100, 137, 185], abs=1)
    code, _, _ = run(["tables", "--table", "4", "--reps", "0"], capsys)
    assert code == 2


def test_pressure_demo_outputs(tmp_path, capsys):
    series, alarms = tmp_path / "series.csv", tmp_path / "alarms.ndjson"
    code, _, _ = run(["pressure-demo", "--seed", "3", "--output", str(series), "--alarms", str(alarms)], capsys)
    assert code == 0
    recs = ndjson(alarms.read_text())
    summary = recs[-1]
    assert summary["summary"] and summary["clusters"] == 3
    rows = list(csv.DictReader(series.open()))
    assert len(rows) == summary["length"]
    assert sum(int(r["alarm"]) for r in rows) == summary["alarms"]
    assert all(float(r["residual"]) == pytest.approx(float(r["z"]) - float(r["cycle"]), abs=2e-6) for r in rows)
    code, _, _ = run(["pressure-demo", "--n-tests", "0", "--output", str(series), "--alarms", str(alarms)], capsys)
    assert code == 2


def test_synthetic_transient_single_alarm(tmp_path, capsys):
    nu, l = 200, 50
    hits = 0
    for seed in range(100):
        y = sample_stream(GaussianChangeSpec(0.0, 1.0, 1.0), ChangeAt(nu, l), 400, seed)
        path = write_csv(tmp_path / "t.csv", list(y))
        code, out, _ = run(
            ["detect", "--procedure", "mosum", "--window", "50", "--target-arl", "5000", "--input", path,
             "--stop-on-first"],
            capsys,
        )
        assert code == 0
        times = [r["n"] for r in ndjson(out)]
        hits += len(times) == 1 and nu <= times[0] <= nu + 2 * l
    assert hits >= 95
