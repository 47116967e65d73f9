import csv
import io

import pytest

from hiermod import analytic as an
from hiermod.analytic import OperatingPoint
from hiermod.cli import ConfigError, main, parse_config, parse_range


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_range():
    assert parse_range("6:7:0.5") == [6.0, 6.5, 7.0]
    assert parse_range("0:1:0.1")[-1] == 1.0
    for bad in ("1:0:1", "0:1:0", "a:b:c", "0:1"):
        with pytest.raises(Exception):
            parse_range(bad)


def test_penalty_mnr_csv(capsys):
    code, out, _ = run_cli(capsys, "penalty", "--kind", "mnr", "--lambda", "0.1", "--lambda", "0", "--cnr", "6:7:1")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "cnr_db,lambda,penalty_db"
    assert "7.0,0.1,0.254" in lines
    assert lines[1:] == ["6.0,0.1,0.211", "7.0,0.1,0.254", "6.0,0.0,0.000", "7.0,0.0,0.000"]


def test_penalty_ber_csv(capsys, tmp_path):
    c = an.cnr_db_for_basic_ber(0.1, 2e-2)
    path = tmp_path / "p.csv"
    code, _, _ = run_cli(capsys, "penalty", "--kind", "ber", "--lambda", "0.1", "--cnr", f"{c}:{c}:1", "--out", str(path))
    assert code == 0
    r, = rows(path.read_text())
    assert float(r["penalty_db"]) < 0.25


def test_ber_csv(capsys):
    code, out, _ = run_cli(capsys, "ber", "--lambda", "0", "--lambda", "0.1", "--cnr", "0:10:1")
    assert code == 0
    data = rows(out)
    assert list(data[0]) == ["cnr_db", "lambda", "ber_qpsk", "ber_basic", "ber_secondary",
                             "ber_basic_given_s1", "ber_basic_given_s0"]
    for r in data:
        if r["lambda"] == "0.0":
            assert r["ber_basic"] == r["ber_qpsk"]
            assert r["ber_secondary"] == "nan"
    row7 = next(r for r in data if r["lambda"] == "0.1" and r["cnr_db"] == "7.0")
    assert float(row7["ber_basic"]) == pytest.approx(0.0148, abs=2e-4)
    lam01 = [r for r in data if r["lambda"] == "0.1"]
    for col in ("ber_qpsk", "ber_basic", "ber_secondary", "ber_basic_given_s1", "ber_basic_given_s0"):
        vals = [float(r[col]) for r in lam01]
        assert all(b < a for a, b in zip(vals, vals[1:])), col


def test_rate_table(capsys):
    code, out, _ = run_cli(capsys, "rate", "--lambda", "0.1", "--lambda", "0.15", "--basic-rate", "100")
    assert code == 0
    lines = out.splitlines()
    assert "1.23%" in lines[1] and lines[1].split()[-1] == "1.23"
    assert "3.11%" in lines[2] and round(float(lines[2].split()[-1])) == 3


def test_rate_rejects_zero(capsys):
    code, _, err = run_cli(capsys, "rate", "--lambda", "0")
    assert code == 1 and err.count("\n") == 1


def test_usage_errors_exit_1(capsys):
    for argv in (["nope"], ["penalty", "--cnr", "5:1:1"], ["ber", "--lambda", "0.9"], []):
        code, out, err = run_cli(capsys, *argv)
        assert code == 1, argv
        assert err.count("\n") == 1 and not out


CONFIG = """\
# small determinism run
lambda = 0.0, 0.2
cnr_db = 4
frames = 4
frame_message_bits = 60
basic_code = 3:7,5
secondary_code = 3:7,5
repetition = 3
iterations = 2
"""


def test_parse_config_defaults():
    cfg = parse_config(CONFIG)
    assert cfg.spec.operating_points == ((0.0, 4.0), (0.2, 4.0))
    assert "seed" in cfg.defaults and "frames" not in cfg.defaults
    assert cfg.spec.schedule.max_iterations == 2


@pytest.mark.parametrize("text, line", [
    ("lambda = 0.1\nbogus = 3\n", 2),
    ("lambda = 0.1\ncnr_db = 7\nframes = many\n", 3),
    ("lambda 0.1\n", 1),
    ("lambda = 0.1\nlambda = 0.2\n", 2),
])
def test_config_errors_name_line(text, line):
    with pytest.raises(ConfigError, match=f"line {line}"):
        parse_config(text)


def test_simulate_no_points(capsys, tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("lambda =\ncnr_db = 7\n")
    code, _, err = run_cli(capsys, "simulate", "--config", str(path))
    assert code == 1 and "no operating points" in err


def test_simulate_bad_line(capsys, tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("lambda = 0.1\ncnr_db = 7\nwat = 1\n")
    code, _, err = run_cli(capsys, "simulate", "--config", str(path))
    assert code == 1 and "line 3" in err and err.count("\n") == 1


def test_simulate_csv_and_log(capsys, tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text(CONFIG)
    out_a, out_b, log = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "run.log"
    assert main(["simulate", "--config", str(path), "--out", str(out_a), "--log", str(log)]) == 0
    assert main(["simulate", "--config", str(path), "--out", str(out_b), "--workers", "2", "--log", str(log)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    data = rows(out_a.read_text())
    assert [(r["lambda"], r["iteration"]) for r in data] == [("0.0", "0"), ("0.0", "1"), ("0.2", "0"), ("0.2", "1")]
    text = log.read_text()
    assert "# seed = 0  (default)" in text and "# mapping = gray  (default)" in text
    assert "wall_clock_s" in text and "# basic_code = 3:7,5" in text


def test_simulate_lambda_zero_matches_qpsk(capsys, tmp_path):
    path = tmp_path / "c.cfg"
    path.write_text("lambda = 0\ncnr_db = 4\nframes = 123\ndecode = false\nseed = 11\n")
    code, out, _ = run_cli(capsys, "simulate", "--config", str(path))
    assert code == 0
    r, = rows(out)
    p = an.ber_qpsk(OperatingPoint(0.0, 4.0).cnr)
    assert abs(float(r["ber_basic_raw"]) - p) <= float(r["ci_halfwidth_basic_raw"])
    assert r["ber_basic_coded"] == "nan"
