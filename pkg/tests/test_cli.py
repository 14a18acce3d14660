"""End-to-end command-line pipeline: file outputs, exit codes, reruns."""

import json
import os
import pathlib
import subprocess
import sys

import numpy as np
import pytest

from beamrefine import ChannelRealization, ChannelScenario
from beamrefine.channel import save_dataset, save_scenario
from beamrefine.cli import substream_seed

PKG = [sys.executable, "-m", "beamrefine"]
DATA = pathlib.Path(__file__).parent / "data"


def run(*args, env=None, check=True):
    e = dict(os.environ)
    if env:
        e.update(env)
    proc = subprocess.run(
        PKG + [str(a) for a in args], capture_output=True, text=True, env=e
    )
    if check and proc.returncode != 0:
        raise AssertionError(f"{args} -> {proc.returncode}\n{proc.stderr}")
    return proc


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    out = tmp_path_factory.mktemp("pipe")
    base = ["--array", "2x2", "--bits", "6", "--seed", "3", "--out", out]
    run("synth", *base, "--train", "40", "--holdout", "20")
    run("refine", *base, "--gamma-db", "3")
    run("validate", *base, "--gamma-db", "3")
    run("hier", *base, "--gamma-db", "3", "--levels", "4")
    return out


def test_pipeline_outputs(pipeline):
    names = {p.name for p in pipeline.iterdir()}
    assert {
        "train.csv",
        "holdout.csv",
        "scenario.json",
        "zeta.json",
        "refine_manifest.json",
        "report.json",
        "report.csv",
        "cdf.csv",
        "hier_codebook.json",
        "comparison.json",
        "report_zeta.csv",
        "report_hier.csv",
        "cdf_zeta.csv",
        "cdf_hier.csv",
    } <= names
    assert len((pipeline / "train.csv").read_text().splitlines()) == 41
    assert len((pipeline / "holdout.csv").read_text().splitlines()) == 21


def test_pipeline_manifest(pipeline):
    man = json.loads((pipeline / "refine_manifest.json").read_text())
    assert set(man) == {"gamma_db", "seed", "M", "iterations", "covered_by", "prng"}
    assert man["gamma_db"] == 3.0
    assert man["seed"] == substream_seed(3, "refine")
    assert man["M"] == 40
    assert man["iterations"] >= 1
    assert man["prng"] == "numpy.random.PCG64"
    assert set(man["covered_by"]) == {str(i) for i in range(40)}


def test_zeta_schema(pipeline):
    zeta = json.loads((pipeline / "zeta.json").read_text())
    assert set(zeta) == {"L", "N", "K_amp", "entries"}
    assert zeta["L"] == 2 and zeta["N"] == 6 and zeta["K_amp"] == 0
    assert len(zeta["entries"]) >= 1
    for e in zeta["entries"]:
        assert set(e) == {"amp_idx", "phase_idx"}
        assert len(e["amp_idx"]) == len(e["phase_idx"]) == 4
        assert all(a == 1 for a in e["amp_idx"])
        assert all(1 <= p <= 64 for p in e["phase_idx"])


def test_pipeline_report_consistency(pipeline):
    rep = json.loads((pipeline / "report.json").read_text())
    assert rep["mode"] == "clipped"
    assert rep["gamma_db"] == 3.0
    assert len(rep["gaps_db"]) + len(rep["skipped"]) == 20
    assert 0.0 <= rep["satisfied_fraction"] <= 1.0
    assert min(rep["gaps_db"]) >= 0.0
    zeta = json.loads((pipeline / "zeta.json").read_text())
    assert rep["codebook_size"] == len(zeta["entries"])

    comp = json.loads((pipeline / "comparison.json").read_text())
    assert comp["levels"] == 4
    assert comp["probes"] == 8
    assert comp["hier_leaf_count"] == 16
    assert comp["hier_total_entries"] == 30
    assert comp["zeta_size"] == len(zeta["entries"])
    assert comp["shared_p_max"] is True

    hier = json.loads((pipeline / "hier_codebook.json").read_text())
    assert [len(lev) for lev in hier["levels"]] == [2, 4, 8, 16]


def test_report_subcommand_roundtrip(pipeline, tmp_path):
    run("report", "--in", pipeline / "report.json", "--format", "cdf", "--out", tmp_path)
    assert (tmp_path / "cdf.csv").read_bytes() == (pipeline / "cdf.csv").read_bytes()
    run("report", "--in", pipeline / "report.json", "--format", "json", "--out", tmp_path)
    assert (tmp_path / "report.json").read_bytes() == (pipeline / "report.json").read_bytes()
    run("report", "--in", pipeline / "report.json", "--format", "csv", "--out", tmp_path)
    assert (tmp_path / "report.csv").read_bytes() == (pipeline / "report.csv").read_bytes()


def test_synth_with_scenario_file(tmp_path):
    scen = ChannelScenario(paths=((0.0, 0.0, 1 + 0j), (0.3, -0.1, 0.2 + 0.1j)))
    save_scenario(tmp_path / "scen.json", scen)
    run(
        "synth", "--array", "2x2", "--bits", "4", "--out", tmp_path,
        "--train", "6", "--holdout", "0", "--scenario", tmp_path / "scen.json",
    )
    assert (tmp_path / "scenario.json").read_bytes() == (tmp_path / "scen.json").read_bytes()
    assert len((tmp_path / "holdout.csv").read_text().splitlines()) == 1  # header only
    run(
        "synth", "--array", "2x2", "--bits", "4", "--out", tmp_path, "--train", "6",
        "--holdout", "0", "--scenario", tmp_path / "scen.json", "--noise", "-25",
    )
    emitted = json.loads((tmp_path / "scenario.json").read_text())
    assert emitted["noise_power_dbm"] == -25.0


def test_refine_prune_flag(tmp_path):
    base = ["--array", "2x2", "--bits", "6", "--seed", "5", "--out", tmp_path]
    run("synth", *base, "--train", "30", "--holdout", "0")
    run("refine", *base, "--gamma-db", "2", "--prune")
    zeta = json.loads((tmp_path / "zeta.json").read_text())
    man = json.loads((tmp_path / "refine_manifest.json").read_text())
    assert len(zeta["entries"]) >= 1
    assert man["M"] == 30
    assert set(man["covered_by"].values()) <= set(range(len(zeta["entries"])))


def test_validate_raw_gaps_flag(pipeline, tmp_path):
    run(
        "validate", "--array", "2x2", "--bits", "6", "--out", tmp_path,
        "--zeta", pipeline / "zeta.json", "--holdout-csv", pipeline / "holdout.csv",
        "--raw-gaps",
    )
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["mode"] == "raw"


def test_oracle_reproduces_frozen_fixture(tmp_path):
    run("oracle", "--array", "2x2", "--bits", "2", "--seed", "7", "--out", tmp_path)
    assert (tmp_path / "oracle.json").read_bytes() == (
        DATA / "oracle_L2N2_seed7.json"
    ).read_bytes()


def test_oracle_backend_parity(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run("oracle", "--array", "2x2", "--bits", "3", "--seed", "11", "--out", a)
    run(
        "oracle", "--array", "2x2", "--bits", "3", "--seed", "11", "--out", b,
        env={"BEAMREFINE_BACKEND": "numpy"},
    )
    assert (a / "oracle.json").read_bytes() == (b / "oracle.json").read_bytes()


def test_oracle_threads_flag_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run("oracle", "--array", "2x2", "--bits", "3", "--seed", "2", "--out", a)
    run(
        "oracle", "--array", "2x2", "--bits", "3", "--seed", "2", "--out", b,
        "--threads", "3",
    )
    assert (a / "oracle.json").read_bytes() == (b / "oracle.json").read_bytes()


def test_exit_codes(tmp_path):
    out = tmp_path
    assert run("refine", "--out", out, "--train-csv", out / "none.csv", check=False).returncode == 3
    assert run("synth", "--out", out, "--train", "0", check=False).returncode == 2
    assert run("synth", "--out", out, "--array", "2x3", check=False).returncode == 2
    assert run("synth", "--out", out, "--bits", "0", check=False).returncode == 2
    assert run("oracle", "--array", "4x4", "--bits", "10", "--out", out, check=False).returncode == 4
    assert run("validate", "--out", out, check=False).returncode == 3  # no codebook yet
    assert run("nonsense", check=False).returncode == 2


def test_grid_mismatch_is_schema_error(pipeline, tmp_path):
    proc = run(
        "validate", "--array", "2x2", "--bits", "5", "--out", tmp_path,
        "--zeta", pipeline / "zeta.json", "--holdout-csv", pipeline / "holdout.csv",
        check=False,
    )
    assert proc.returncode == 3


def test_degenerate_training_exit(tmp_path):
    save_dataset(
        tmp_path / "train.csv",
        [ChannelRealization(0.0, np.zeros(4, dtype=complex))],
    )
    proc = run("refine", "--array", "2x2", "--bits", "4", "--out", tmp_path, check=False)
    assert proc.returncode == 4


def test_logging_env(tmp_path):
    proc = run(
        "synth", "--array", "2x2", "--bits", "4", "--out", tmp_path,
        "--train", "5", "--holdout", "2",
        env={"BEAMREFINE_LOG": "INFO"},
    )
    assert "synth: 5 train + 2 holdout channels" in proc.stderr
