import json
import math
import shutil
import subprocess
from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from rccount.cli import RECORD_FIELDS, ConfigError, dump_record, main, parse_number, parse_record, parse_region


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, [json.loads(l) for l in out.splitlines() if l.strip()], err


def test_exact_count(capsys):
    code, recs, _ = run(capsys, "count", "--torus", "2", "3", "--q", "2", "--p", "1/2", "--exact")
    assert code == 0
    assert F(recs[0]["value"]) == F(9859, 2048) and recs[0]["rational"]
    assert recs[0]["type"] == "count"
    assert recs[0]["log_Z"] == pytest.approx(math.log(9859 / 2048))


def test_high_temperature_count(capsys):
    code, recs, _ = run(capsys, "count", "--torus", "2", "3", "--q", "1e4", "--beta", "0.05", "--eps", "0.1")
    assert code == 0 and recs[0]["config"]["q"] == "1e4"
    assert recs[0]["regime"] == "HT"


def test_potts_count_on_region(capsys, tmp_path):
    f = tmp_path / "sq.txt"
    f.write_text("# 2x2 square\n0 0\n0,1\n1 0\n\n1 1\n")
    code, recs, _ = run(capsys, "count", "--region", str(f), "--model", "potts", "--q", "3",
                        "--beta", "0.5", "--exact")
    assert code == 0 and recs[0]["model"] == "potts"


@pytest.mark.parametrize("argv", [
    ["count", "--torus", "2", "3", "--q", "2"],
    ["count", "--torus", "2", "3", "--q", "2", "--p", "x"],
    ["count", "--torus", "2", "3", "--q", "2", "--p", "1/2", "--set", "nope=1"],
    ["count", "--torus", "2", "3", "--q", "2", "--p", "1/2", "--beta", "1"],
    ["verify", "unknown-suite"],
    ["frobnicate"],
])
def test_config_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2


def test_error_record_on_stderr(capsys):
    code, _, err = run(capsys, "verify", "unknown-suite")
    rec = parse_record(err.strip())
    assert rec["type"] == "error" and rec["kind"] == "config"


def test_region_not_simply_connected(capsys, tmp_path):
    f = tmp_path / "ring.txt"
    f.write_text("\n".join(f"{i} {j}" for i in range(3) for j in range(3) if (i, j) != (1, 1)))
    code, _, _ = run(capsys, "count", "--region", str(f), "--q", "2", "--p", "1/2", "--exact")
    assert code == 2


def test_regime_error(capsys, tmp_path):
    f = tmp_path / "pair.txt"
    f.write_text("0 0\n0 1\n")
    code, _, err = run(capsys, "count", "--region", str(f), "--bc", "wired", "--q", "1e6", "--beta", "5.5")
    assert code == 3
    assert parse_record(err.strip())["kind"] == "RegimeMismatch"


def test_budget_error(capsys):
    code, _, err = run(capsys, "count", "--torus", "2", "5", "--q", "2", "--p", "1/2", "--exact")
    assert code == 4


@pytest.mark.parametrize("suite", ["bijection", "weight-identity", "fk-identity"])
def test_verify_suites(capsys, suite):
    argv = ["verify", suite] + (["--samples", "300"] if suite == "bijection" else [])
    code, recs, _ = run(capsys, *argv)
    assert code == 0 and recs[0]["passed"]


def test_contour_listing(capsys):
    code, recs, _ = run(capsys, "contours", "--torus", "2", "3", "--m", "4")
    assert code == 0 and len(recs) == 81
    assert {r["size"] for r in recs} == {2, 4}


def test_output_is_byte_identical(capsys, tmp_path):
    argv = ["sample", "--torus", "2", "5", "--q", "1e4", "--beta", "0.05", "--count", "3", "--seed", "7"]
    main(argv + ["--out", str(tmp_path / "a")])
    main(argv + ["--out", str(tmp_path / "b")])
    a, b = (tmp_path / "a").read_bytes(), (tmp_path / "b").read_bytes()
    assert a == b and a.count(b"\n") == 3
    for line in a.decode().splitlines():
        assert parse_record(line)["type"] == "rc"


def test_potts_sample_records(capsys):
    code, recs, _ = run(capsys, "sample", "--torus", "2", "5", "--q", "1e4", "--beta", "0.05",
                        "--model", "potts", "--count", "2")
    assert code == 0
    assert all(len(r["encoding"]) == 25 and r["type"] == "potts" for r in recs)


def test_records_roundtrip(capsys, tmp_path):
    outs = []
    for argv in (["count", "--torus", "2", "3", "--q", "2", "--p", "1/2", "--exact"],
                 ["verify", "fk-identity"],
                 ["contours", "--torus", "2", "3", "--m", "2"],
                 ["bench", "--torus", "2", "3", "--q", "2", "--p", "1/2", "--exact", "--repeats", "1"]):
        _, recs, _ = run(capsys, *argv)
        outs += recs
    assert {r["type"] for r in outs} == {"count", "verify", "contour", "bench"}
    for r in outs:
        assert parse_record(dump_record(r)) == r
        assert parse_record(dump_record(r, pretty=True).replace("\n", "")) == r


def test_parse_record_rejects_incomplete():
    with pytest.raises(ValueError):
        parse_record(json.dumps({"type": "count", "model": "rc"}))
    with pytest.raises(ValueError):
        parse_record(json.dumps({"type": "mystery"}))
    assert set(RECORD_FIELDS) >= {"count", "rc", "potts", "verify", "contour", "bench", "error"}


@given(st.fractions(max_denominator=1000))
def test_parse_number_exact(x):
    assert parse_number(str(x)) == x


def test_parse_number_forms():
    assert parse_number("1e6") == 10 ** 6
    assert parse_number("0.5") == F(1, 2)
    with pytest.raises(ConfigError):
        parse_number("1/0")


def test_parse_region(tmp_path):
    f = tmp_path / "r.txt"
    f.write_text("0 0  # origin\n0 1\n")
    assert parse_region(str(f)) == [(0, 0), (0, 1)]


@pytest.mark.skipif(shutil.which("rccount") is None, reason="console script not installed")
def test_console_script():
    out = subprocess.run(["rccount", "count", "--torus", "2", "3", "--q", "2", "--p", "1/2", "--exact"],
                         capture_output=True, text=True, check=True)
    assert json.loads(out.stdout)["type"] == "count"
