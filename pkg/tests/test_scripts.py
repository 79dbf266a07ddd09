import csv
import importlib.util
import json
import sys
from pathlib import Path

from codedcache.cli import run

SCRIPTS = Path(__file__).resolve().parent.parent / "scripts"


def load(name):
    spec = importlib.util.spec_from_file_location(name, SCRIPTS / f"{name}.py")
    mod = importlib.util.module_from_spec(spec)
    sys.modules[name] = mod  # dataclasses look the module up while decorating
    spec.loader.exec_module(mod)
    return mod


def test_reproduce_tables(tmp_path, capsys):
    out = tmp_path / "grid.csv"
    assert load("reproduce_tables").main(["--kmax", "6", "--out", str(out), "--segments", "3,4"]) == 0
    rows = list(csv.DictReader(out.open()))
    assert len(rows) == 15
    row = next(r for r in rows if (r["n"], r["k"]) == ("3", "4"))
    assert (row["memory"], row["new_bound"], row["gap"]) == ("3/8", "2", "1/8")
    assert "exact: R* = 11/4 - 2M on [1/4,3/8]" in capsys.readouterr().out


def test_plot_data(tmp_path):
    assert load("plot_data").main(["--networks", "3,4", "--outdir", str(tmp_path)]) == 0
    rows = list(csv.reader((tmp_path / "tradeoff_3_4.csv").open()))
    assert rows[0] == ["M", "R", "source"] and ["3/8", "2", "exact"] in rows


def test_lp_oracle(tmp_path, capsys):
    assert load("lp_oracle").main(["--n", "2", "--k", "3", "--grid", "0,1/3", "--certificates", str(tmp_path)]) == 0
    text = capsys.readouterr().out
    assert "tight" in text
    certs = sorted(tmp_path.glob("*.json"))
    assert len(certs) == 2
    for c in certs:
        assert json.loads(c.read_text())["schema"] == "codedcache.certificate"
        assert run(["lp", "--verify", str(c)]).code == 0
