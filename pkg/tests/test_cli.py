from __future__ import annotations

import json
import subprocess
import sys

import pytest

from gvlab.cli import build_parser, main
from gvlab.experiments import CSV_FIELDS, read_csv
from gvlab.numerics import AREA_II_DOUBLE, AREA_II_PRIME, GENERAL, LINEAR, classify_region


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def kv(text: str) -> dict[str, str]:
    return dict(line.split(" ", 1) for line in text.strip().splitlines())


def test_bounds_example(capsys):
    code, out, _ = run(capsys, "bounds", "--q", "2", "--delta", "0.2")
    vals = kv(out)
    assert code == 0
    assert float(vals["gv_bound"]) == pytest.approx(0.27807, abs=1e-5)
    assert float(vals["entropy"]) == pytest.approx(0.72193, abs=1e-5)
    assert float(vals["delta0"]) == 0.5
    code, out, _ = run(capsys, "bounds", "--r", "0.5")
    assert float(kv(out)["gv_distance"]) == pytest.approx(0.11003, abs=1e-5)


def test_beta(capsys):
    code, out, _ = run(capsys, "beta", "--n", "4", "--delta", "0.25", "--exact")
    vals = kv(out)
    assert code == 0 and vals["numerator"] == "5" and vals["denominator"] == "16"
    code, out, _ = run(capsys, "beta", "--n", "8192", "--delta", "0.25", "--asymptotic")
    assert float(kv(out)["ratio"]) == pytest.approx(1.0, abs=0.02)


def test_regions_point(capsys):
    code, out, _ = run(capsys, "regions", "--q", "2", "--delta", "0.3", "--r", "0.1", "--ensemble", "general")
    assert code == 0 and out.strip() == "II'"


@pytest.mark.parametrize("ensemble", [LINEAR, GENERAL])
def test_regions_grid_consistent(capsys, tmp_path, ensemble):
    path = tmp_path / "grid.csv"
    code, _, _ = run(capsys, "regions", "--grid", "--resolution", "16", "--ensemble", ensemble, "--out", str(path))
    lines = path.read_text().splitlines()
    assert code == 0 and lines[0] == "kind,delta,r,label"
    points = [ln.split(",") for ln in lines[1:] if ln.startswith("point,")]
    curves = {ln.split(",")[3] for ln in lines[1:] if ln.startswith("curve,")}
    assert len(points) == 256 and curves == {"gv", "half-gv", "plotkin"}
    labels = set()
    for _, dl, r, label in points:
        assert classify_region(float(dl), float(r), 2, ensemble) == label
        labels.add(label)
    if ensemble == LINEAR:
        assert not labels & {AREA_II_PRIME, AREA_II_DOUBLE}
    near_zero = [(float(r), label) for _, dl, r, label in points if float(dl) < 0.02]
    cap = 0.85 if ensemble == LINEAR else 0.42  # general codes leave area I at half the GV rate
    assert all(label == "I" for r, label in near_zero if r < cap)


def test_sample_enumerate_round_trip(capsys, tmp_path):
    path = tmp_path / "code.txt"
    code, out, _ = run(capsys, "sample", "--ensemble", "linear-injective", "--n", "12", "--k", "4",
                       "--seed", "7", "--dump", str(path))
    info = json.loads(out)
    assert code == 0 and info["size"] == 16 and info["dimension"] == 4
    assert path.read_text().splitlines()[0].split()[:3] == ["2", "12", "4"]
    code, out, _ = run(capsys, "enumerate", "--input", str(path), "--delta", "0.25", "--per-codeword")
    res = json.loads(out)
    assert code == 0 and res["kind"] == "weight" and sum(res["counts"]) == 16
    assert res["cumulative"] == sum(res["counts"][1:4])
    # For a linear code every codeword sees the same distance profile as the zero word.
    assert {row["cumulative"] for row in res["per_codeword"]} == {res["cumulative"]}


def test_sample_general_and_pairwise_enumerate(capsys, tmp_path):
    path = tmp_path / "g.txt"
    run(capsys, "sample", "--ensemble", "general-injective", "--q", "3", "--n", "6", "--k", "2",
        "--dump", str(path))
    code, out, _ = run(capsys, "enumerate", "--input", str(path), "--delta", "0.5", "--per-codeword")
    res = json.loads(out)
    assert code == 0 and res["kind"] == "pairwise" and sum(res["counts"]) == 36
    assert 2 * res["cumulative"] == sum(row["cumulative"] for row in res["per_codeword"])


def test_sample_is_seed_determined(capsys):
    a = run(capsys, "sample", "--ensemble", "general-full", "--n", "10", "--k", "5", "--seed", "3")[1]
    b = run(capsys, "sample", "--ensemble", "general-full", "--n", "10", "--k", "5", "--seed", "3")[1]
    assert a == b


def test_experiment_config_and_determinism(capsys, tmp_path):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({"ensemble": "linear-injective", "n": [16, 20], "delta": 0.2, "r": [0.2, 0.4],
                               "t": ["-inf", 0], "trials": 40, "seed": 1}))
    outs = []
    for workers in ("1", "2"):
        path = tmp_path / f"out{workers}.csv"
        code, _, _ = run(capsys, "experiment", "--config", str(cfg), "--seed", "42", "--workers", workers,
                         "--out", str(path))
        assert code == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    rows = read_csv(outs[0].decode())
    assert len(rows) == 8 and {row["seed"] for row in rows} == {42}  # the flag beats the file
    assert outs[0].decode().splitlines()[0] == ",".join(CSV_FIELDS)
    code, out, _ = run(capsys, "experiment", "--config", str(cfg), "--format", "jsonl", "--workers", "1")
    objs = [json.loads(x) for x in out.splitlines()]
    assert code == 0 and len(objs) == 8 and {o["seed"] for o in objs} == {1}
    assert any(o["t"] == "-inf" for o in objs)


def test_experiment_cells_key(capsys, tmp_path):
    cfg = tmp_path / "cells.json"
    cfg.write_text(json.dumps({"cells": [{"n": 12, "delta": 0.25, "r": 0.3}, {"n": 14, "delta": 0.2, "r": 0.3, "t": 0.1}],
                               "trials": 20, "statistic": "first-moment"}))
    code, out, _ = run(capsys, "experiment", "--config", str(cfg), "--workers", "1")
    assert code == 0 and len(read_csv(out)) == 2


def test_decay_refuses_supercritical_control(capsys):
    # At 2r = r_delta + 0.2 every trial has a close pair; nothing decays.
    code, _, err = run(capsys, "decay", "--ensemble", "general-injective", "--delta", "0.05",
                       "--n-grid", "16,20,24,28", "--trials", "30", "--workers", "1")
    assert code in (0, 1)
    code, _, err = run(capsys, "decay", "--ensemble", "linear-injective", "--delta", "0.3",
                       "--n-grid", "16,24,32,48", "--trials", "1", "--workers", "1")
    assert code == 1 and "need >= 4" in err


def test_decay_small_run(capsys, tmp_path):
    path = tmp_path / "decay.csv"
    code, out, _ = run(capsys, "decay", "--trials", "400", "--workers", "1", "--resamples", "100",
                       "--out", str(path))
    res = json.loads(out)
    assert code == 0 and len(res["points"]) == 5
    assert res["slope_ci"][0] <= res["slope"] <= res["slope_ci"][1]
    assert len(read_csv(path.read_text())) == 5


def test_greedy(capsys, tmp_path):
    code, out, _ = run(capsys, "greedy", "--n", "10", "--d", "2")
    res = json.loads(out)
    assert code == 0 and res["size"] >= 19 and res["covering_verified"] and res["min_distance_exceeds_d"]
    path = tmp_path / "lin.txt"
    code, out, _ = run(capsys, "greedy", "--n", "7", "--d", "2", "--linear", "--dump", str(path))
    res = json.loads(out)
    assert code == 0 and res["dimension"] >= 2
    code, out, _ = run(capsys, "enumerate", "--input", str(path), "--delta", "0.3")
    assert json.loads(out)["cumulative"] == 0  # d = 2 and every nonzero weight exceeds 2


@pytest.mark.parametrize("argv, flag", [
    (["bounds", "--delta", "0.7"], "--delta"),
    (["beta", "--n", "0"], "--n"),
    (["sample", "--q", "6", "--ensemble", "linear-injective"], "--q"),
    (["sample", "--n", "4", "--k", "4"], "--k"),
    (["enumerate"], "--input"),
    (["experiment", "--n", "16", "--delta", "0.2", "--r", "0.2", "--t", "0.5", "--workers", "1"], "t="),
    (["decay", "--n-grid", "16,24"], "--n-grid"),
    (["greedy", "--d", "11"], "--d"),
    (["regions", "--delta", "0.3"], "--delta"),
    (["regions", "--grid", "--resolution", "8"], "--resolution"),
])
def test_validation_errors_exit_2(capsys, argv, flag):
    code, _, err = run(capsys, *argv)
    assert code == 2 and flag in err


def test_unknown_config_key_exits_2(capsys, tmp_path):
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"q": 2, "bogus": 1}))
    code, _, err = run(capsys, "bounds", "--config", str(cfg))
    assert code == 2 and "bogus" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["sample", "--ensemble", "nope"])
    assert exc.value.code == 2
    assert "--ensemble" in capsys.readouterr().err


def test_runtime_refusals_exit_1(capsys, monkeypatch):
    code, _, err = run(capsys, "greedy", "--n", "30", "--d", "2")
    assert code == 1 and "2^26" in err
    code, _, err = run(capsys, "experiment", "--ensemble", "general-injective", "--n", "64", "--delta", "0.2",
                       "--r", "0.3", "--trials", "200", "--workers", "1")
    assert code == 1 and "ceiling" in err
    monkeypatch.setenv("GVLAB_COST_CEILING", "10")
    code, _, err = run(capsys, "experiment", "--n", "16", "--delta", "0.2", "--r", "0.3", "--workers", "1")
    assert code == 1 and "ceiling" in err


def test_help_lists_every_flag_with_default():
    parser = build_parser()
    subs = parser._subparsers._group_actions[0].choices
    assert set(subs) == {"bounds", "beta", "sample", "enumerate", "experiment", "decay", "greedy", "regions"}
    for name, sub in subs.items():
        text = " ".join(sub.format_help().split())
        for action in sub._actions:
            if action.dest == "help":
                continue
            assert any(opt in text for opt in action.option_strings), (name, action.dest)
            if action.default is not None and action.nargs != 0:
                assert f"(default: {action.default})" in text, (name, action.dest)


def test_console_script_entry_point():
    proc = subprocess.run([sys.executable, "-m", "gvlab.cli", "regions", "--delta", "0.3", "--r", "0.2"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.strip() == "II"
