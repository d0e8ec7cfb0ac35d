import json
import os
import subprocess
import sys

import numpy as np
import pytest

import apkit as ap
from apkit import serialize as ser
from apkit.cli import main, parse_domain, parse_range, parse_window, _UsageError


@pytest.fixture()
def two_line_csv(tmp_path):
    dom = ap.cyclic(64)
    poly = ap.trig_polynomial([(ap.character(5), 3.0), (ap.character(17), 4j)])
    f = ap.eval_trig_poly(poly, dom)
    path = tmp_path / "two.csv"
    path.write_text(ser.grid_csv(f))
    return path


@pytest.fixture()
def ramp_csv(tmp_path):
    dom = ap.real_grid(400, 0.05, origin=-10.0)
    f = ap.from_callable(dom, lambda x: x)
    path = tmp_path / "ramp.csv"
    path.write_text(ser.grid_csv(f))
    return path


def run_cli(args):
    return subprocess.run([sys.executable, "-m", "apkit.cli", *args],
                          capture_output=True, text=True)


def test_parse_domain_grammar():
    d = parse_domain("cyclic:256")
    assert d.axes[0].kind == "cyclic" and d.axes[0].n == 256
    d = parse_domain("integer:64:-3")
    assert d.axes[0].kind == "integer" and d.axes[0].origin == -3.0
    d = parse_domain("real:400:0.05")
    assert d.axes[0].origin == pytest.approx(-10.0)     # default centers the grid
    d = parse_domain("real:400:0.05:-8")
    assert d.axes[0].origin == -8.0
    d = parse_domain("torus:100:0.01:0")
    assert d.axes[0].kind == "torus"
    d = parse_domain("cyclic:8;real:10:0.5")
    assert d.ndim == 2
    for bad in ("", "real:10", "banana:4", "cyclic:0", "real:10:xx"):
        with pytest.raises(_UsageError):
            parse_domain(bad)


def test_parse_window_and_range():
    w = parse_window("0:1", 1)
    assert ap.haar_measure(w) == pytest.approx(1.0)
    w2 = parse_window("0:1,-1:1", 2)
    assert ap.haar_measure(w2) == pytest.approx(2.0)
    assert parse_range("0:24") == (0.0, 24.0)
    with pytest.raises(_UsageError):
        parse_window("1:0", 1)
    with pytest.raises(_UsageError):
        parse_window("0:1", 2)  # arity must match the domain
    with pytest.raises(_UsageError):
        parse_range("5")


def test_unknown_subcommand_and_bad_domain_exit_1(tmp_path):
    assert main(["bogus"]) == 1
    assert main(["norm", "--gallery", "levitan", "--domain", "nope:4"]) == 1
    assert main(["norm", "--input", str(tmp_path / "missing.csv"),
                 "--domain", "cyclic:8"]) == 1


def test_norm_json_output(two_line_csv, tmp_path):
    out = tmp_path / "norm.json"
    rc = main(["norm", "--input", str(two_line_csv), "--domain", "cyclic:64",
               "--K", "0:64", "--p", "2", "--out", str(out)])
    assert rc == 0
    blob = json.loads(out.read_text())
    assert blob["value"] == pytest.approx(5.0, abs=1e-9)
    assert blob["p"] == 2.0


def test_norm_gallery_default_domain(tmp_path):
    out = tmp_path / "g.json"
    rc = main(["norm", "--gallery", "periodized-inverse-sqrt", "--p", "1",
               "--K", "0:1", "--out", str(out)])
    assert rc == 0
    blob = json.loads(out.read_text())
    assert blob["value"] == pytest.approx(2 * 2 ** 0.5, rel=0.02)


def test_strict_flag_governs_convergence_exit(ramp_csv, tmp_path):
    common = ["norm", "--input", str(ramp_csv), "--domain", "real:400:0.05:-10",
              "--K", "0:1", "--mode", "weyl", "--seq", "centered", "--base", "1",
              "--nmax", "6", "--tol", "1e-12", "--out", str(tmp_path / "o.json")]
    assert main(common) == 0
    blob = json.loads((tmp_path / "o.json").read_text())
    assert blob["status"] == "not-converged"
    assert main(common + ["--strict"]) == 2


def test_support_exhausted_exits_2(ramp_csv, tmp_path):
    rc = main(["norm", "--input", str(ramp_csv), "--domain", "real:400:0.05:-10",
               "--K", "0:1", "--mode", "weyl", "--seq", "centered", "--base", "100",
               "--nmax", "5", "--out", str(tmp_path / "o.json")])
    assert rc == 2


def test_scan_periods_csv(two_line_csv, tmp_path):
    out = tmp_path / "scan.csv"
    rc = main(["scan", "--input", str(two_line_csv), "--domain", "cyclic:64",
               "--K", "0:8", "--epsilon", "0.2", "--range", "0:64", "--stride", "1",
               "--format", "csv", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "t,distance"
    ts = [float(r.split(",")[0]) for r in lines[1:]]
    assert 0.0 in ts and 64.0 in ts


def test_spectrum_csv_and_bin_inputs_agree(two_line_csv, tmp_path):
    dom = ap.cyclic(64)
    f = ser.parse_grid_csv(dom, two_line_csv.read_text())
    binpath = tmp_path / "two.bin"
    binpath.write_bytes(ser.grid_bytes(f))
    out1 = tmp_path / "s1.csv"
    out2 = tmp_path / "s2.csv"
    rc1 = main(["spectrum", "--input", str(two_line_csv), "--domain", "cyclic:64",
                "--seq", "full", "--threshold", "0.5", "--out", str(out1)])
    rc2 = main(["spectrum", "--input", str(binpath),
                "--seq", "full", "--threshold", "0.5", "--out", str(out2)])
    assert rc1 == 0 and rc2 == 0
    assert out1.read_bytes() == out2.read_bytes()
    lines = out1.read_text().strip().split("\n")
    assert lines[0] == "freq0,re,im,gap"
    assert len(lines) == 3
    assert lines[1].startswith("17,")


def test_spectrum_json_format(two_line_csv, tmp_path):
    out = tmp_path / "s.json"
    rc = main(["spectrum", "--input", str(two_line_csv), "--domain", "cyclic:64",
               "--seq", "full", "--threshold", "0.5", "--format", "json",
               "--out", str(out)])
    assert rc == 0
    blob = json.loads(out.read_text())
    assert blob["mean_square"] == pytest.approx(25.0, abs=1e-9)
    assert len(blob["lines"]) == 2


def test_eberlein_subcommand(two_line_csv, tmp_path):
    out = tmp_path / "e.json"
    rc = main(["eberlein", "--input", str(two_line_csv), "--input2", str(two_line_csv),
               "--domain", "cyclic:64", "--seq", "full", "--format", "json",
               "--out", str(out)])
    assert rc == 0
    blob = json.loads(out.read_text())
    assert "function" in blob or "probes" in blob


def test_vanhove_check_subcommand(tmp_path):
    out = tmp_path / "v.csv"
    rc = main(["vanhove-check", "--seq", "slab", "--nmax", "50",
               "--format", "csv", "--out", str(out)])
    assert rc == 0
    rows = out.read_text().strip().split("\n")
    assert rows[0] == "n,ratio"
    assert len(rows) == 51

    outj = tmp_path / "v.json"
    rc = main(["vanhove-check", "--seq", "slab", "--nmax", "50",
               "--format", "json", "--out", str(outj)])
    assert rc == 0
    assert json.loads(outj.read_text())["verdict"] is False

    rc = main(["vanhove-check", "--domain", "real:4096:0.5:-1024",
               "--seq", "centered", "--base", "2", "--nmax", "50",
               "--K=-1:1", "--format", "json", "--out", str(outj)])
    assert rc == 0
    assert json.loads(outj.read_text())["verdict"] is True


def test_classify_subcommand_and_config(tmp_path, two_line_csv):
    cfg = {"schema": 1, "epsilon": 0.25, "window": "0:16", "base": 64.0,
           "nmax": 16, "range": "0:1536", "stride": 16.0, "gap_bound": 520.0}
    cfgpath = tmp_path / "cfg.json"
    cfgpath.write_text(json.dumps(cfg))
    dom = ap.cyclic(2048)
    poly = ap.trig_polynomial([(ap.character(4), 1.0), (ap.character(8), 0.5)])
    f = ap.eval_trig_poly(poly, dom)
    fpath = tmp_path / "poly.csv"
    fpath.write_text(ser.grid_csv(f))
    out = tmp_path / "c.json"
    rc = main(["classify", "--input", str(fpath), "--domain", "cyclic:2048",
               "--config", str(cfgpath), "--format", "json", "--out", str(out)])
    assert rc == 0
    blob = json.loads(out.read_text())
    verdicts = {c["name"]: c["verdict"] for c in blob["classes"]}
    assert verdicts == {"sap": "pass", "stepanov": "pass",
                        "weyl": "pass", "mean": "pass"}


def test_config_rejects_unknown_keys(tmp_path, two_line_csv):
    cfgpath = tmp_path / "bad.json"
    cfgpath.write_text(json.dumps({"schema": 1, "volume": 11}))
    rc = main(["norm", "--input", str(two_line_csv), "--domain", "cyclic:64",
               "--config", str(cfgpath)])
    assert rc == 1


def test_config_rejects_wrong_schema(tmp_path, two_line_csv):
    cfgpath = tmp_path / "bad2.json"
    cfgpath.write_text(json.dumps({"schema": 2, "p": 2.0}))
    rc = main(["norm", "--input", str(two_line_csv), "--domain", "cyclic:64",
               "--config", str(cfgpath)])
    assert rc == 1


def test_gallery_list_and_emit(tmp_path):
    out = tmp_path / "names.txt"
    rc = main(["gallery", "list", "--out", str(out)])
    assert rc == 0
    listing = [ln.split("\t") for ln in out.read_text().strip().split("\n")]
    assert [name for name, _ in listing] == ["half-step", "levitan",
                                             "periodized-inverse-sqrt"]
    assert all(desc for _, desc in listing)
    emitted = tmp_path / "lev.csv"
    rc = main(["gallery", "emit", "levitan", "--h", "0.05", "--span", "10",
               "--out", str(emitted)])
    assert rc == 0
    rows = emitted.read_text().strip().split("\n")
    assert len(rows) == 400 + 1


def test_figures_are_rendered(tmp_path, two_line_csv):
    figdir = tmp_path / "figs"
    res = run_cli(["spectrum", "--input", str(two_line_csv), "--domain", "cyclic:64",
                   "--seq", "full", "--threshold", "0.5",
                   "--figures", str(figdir), "--out", str(tmp_path / "s.csv")])
    assert res.returncode == 0
    pngs = list(figdir.glob("*.png"))
    assert len(pngs) >= 1


def test_stdout_matches_out_file(two_line_csv, tmp_path):
    out = tmp_path / "s.csv"
    args = ["spectrum", "--input", str(two_line_csv), "--domain", "cyclic:64",
            "--seq", "full", "--threshold", "0.5"]
    rc = main(args + ["--out", str(out)])
    assert rc == 0
    res = run_cli(args)
    assert res.returncode == 0
    assert res.stdout == out.read_text()


def test_byte_determinism_across_threads(two_line_csv, tmp_path):
    args = ["spectrum", "--input", str(two_line_csv), "--domain", "cyclic:64",
            "--seq", "full"]
    envs = []
    for threads in ("1", "8"):
        env = dict(os.environ, APKIT_THREADS=threads)
        res = subprocess.run([sys.executable, "-m", "apkit.cli", *args],
                             capture_output=True, env=env)
        assert res.returncode == 0
        envs.append(res.stdout)
    assert envs[0] == envs[1]
