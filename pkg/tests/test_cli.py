import json
import subprocess
import sys
from pathlib import Path

import pytest

from qal.cli import main, read_config_file

RUN = [sys.executable, "-m", "qal.cli"]


def test_no_arguments_is_usage_error():
    proc = subprocess.run(RUN, capture_output=True, text=True)
    assert proc.returncode == 2
    assert "usage" in proc.stderr.lower()


def test_unknown_flag_is_usage_error():
    proc = subprocess.run(
        RUN + ["identities", "--bogus-flag", "1"], capture_output=True, text=True
    )
    assert proc.returncode == 2


def test_identities_run_writes_manifest_and_report(tmp_path):
    code = main(
        [
            "identities",
            "--N", "6", "--seeds", "4",
            "--factorization-range", "8",
            "--telescope-samples", "50",
            "--pair-samples", "50",
            "--out", str(tmp_path),
        ]
    )
    assert code == 0
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "identities"
    assert manifest["status"] == "ok"
    assert manifest["artifacts"] == ["report.json"]
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["all_exact"] is True


def test_reports_bitwise_reproducible(tmp_path):
    outs = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        main(
            [
                "identities",
                "--N", "4", "--seeds", "2",
                "--factorization-range", "5",
                "--telescope-samples", "20",
                "--pair-samples", "20",
                "--seed", "7",
                "--out", str(out),
            ]
        )
        outs.append((out / "report.json").read_bytes())
        manifest = json.loads((out / "manifest.json").read_text())
        assert set(manifest["config"].keys()) >= {"N", "seed", "seeds"}
    assert outs[0] == outs[1]


def test_solve_with_oracle(tmp_path):
    code = main(
        [
            "solve", "--preset", "toy", "--N", "8", "--T", "0.002",
            "--dt", "2e-6", "--snapshot-stride", "200",
            "--oracle", "--seed", "3", "--out", str(tmp_path),
        ]
    )
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["oracle_max_deviation"] < 1e-8
    checkpoint = json.loads((tmp_path / "checkpoint.json").read_text())
    assert checkpoint["snapshots"][0]["N"] == 8
    assert len(checkpoint["gauge"]["times"]) == len(checkpoint["gauge"]["k_imag"])
    assert (tmp_path / "diagnostics.csv").exists()


def test_talbot_subcommand(tmp_path):
    code = main(["talbot", "--N", "64", "--out", str(tmp_path)])
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["exact"] is True


def test_dimension_subcommand(tmp_path):
    code = main(
        [
            "dimension", "--targets", "line", "square",
            "--samples", "8192", "--out", str(tmp_path),
        ]
    )
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert abs(report["line"]["slope"] - 1.0) < 0.05
    assert (tmp_path / "boxcounts_line.csv").exists()


def test_strichartz_subcommand(tmp_path):
    code = main(
        ["strichartz", "--n-ladder", "32", "--seeds", "1", "--out", str(tmp_path)]
    )
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["rows"][0]["converged"] is True


def test_smoothing_subcommand_small(tmp_path):
    code = main(
        [
            "smoothing", "--n-ladder", "64", "--T", "0.002",
            "--seeds", "1", "--out", str(tmp_path),
        ]
    )
    assert code == 0
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["points"][0]["stable"] is True
    assert report["points"][0]["gain"] > 0
    assert (tmp_path / "difference_norm_N64.csv").exists()


def test_config_file_merging(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# comment\nN = 5\nseeds = 3\n")
    out = tmp_path / "out"
    code = main(
        [
            "identities", "--config", str(cfg),
            "--factorization-range", "5",
            "--telescope-samples", "10", "--pair-samples", "10",
            "--out", str(out),
        ]
    )
    assert code == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["config"]["N"] == 5
    assert manifest["config"]["seeds"] == 3


def test_config_file_rejects_unknown_key(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("bogus = 1\n")
    code = main(["identities", "--config", str(cfg), "--out", str(tmp_path)])
    assert code == 2


def test_read_config_file_rejects_bad_lines(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text("just a line\n")
    with pytest.raises(ValueError):
        read_config_file(str(p))


def test_every_artifact_in_manifest(tmp_path):
    main(["symbols", "--per-symbol", "2", "--out", str(tmp_path)])
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    files = {
        p.name for p in Path(tmp_path).iterdir() if p.name != "manifest.json"
    }
    assert files == set(manifest["artifacts"])
