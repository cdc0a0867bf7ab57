"""Tests for the command line front end."""
from __future__ import annotations

import json
from pathlib import Path

import pytest

from levy_attack.cli import main
from levy_attack.const import EXIT_OK, EXIT_USAGE, SYNTHETIC_DIM
from levy_attack.export import read_pgm

SWEEP = ["sweep", "--synthetic", "--alpha", "2.0", "--alpha", "0.5", "--samples", "20"]


def test_invalid_alpha_is_a_usage_error() -> None:
    """alpha outside (0, 2] exits with 2."""
    assert main(["sweep", "--synthetic", "--alpha", "3.0"]) == EXIT_USAGE


def test_unknown_subcommand_exits_with_usage() -> None:
    """argparse rejects unknown subcommands with exit code 2."""
    with pytest.raises(SystemExit) as excinfo:
        main(["explode"])
    assert excinfo.value.code == EXIT_USAGE


def test_validate_sampler_refuses_tiny_n() -> None:
    """Fewer than 1000 draws is a usage error."""
    assert main(["validate-sampler", "--n", "10"]) == EXIT_USAGE


def test_validate_sampler_reports_ks(capsys: pytest.CaptureFixture[str]) -> None:
    """The Gaussian case passes and prints its KS distance."""
    assert main(["validate-sampler", "--alpha", "2.0", "--n", "100000"]) == EXIT_OK
    output = capsys.readouterr().out
    assert "ks_vs_gaussian" in output
    assert "FAIL" not in output


def test_sweep_on_synthetic_blobs(tmp_path: Path) -> None:
    """Every alpha row accounts for all twenty samples."""
    out = tmp_path / "report.json"
    csv = tmp_path / "report.csv"
    argv = [*SWEEP, "--max-steps", "300", "--out", str(out), "--csv", str(csv)]
    assert main(argv) == EXIT_OK

    report = json.loads(out.read_text())
    assert [row["alpha"] for row in report["per_alpha"]] == [2.0, 0.5]
    for row in report["per_alpha"]:
        assert row["n_success"] + row["n_fail"] + row["n_skipped"] == 20
        assert row["n_fail"] == 0
        assert row["n_success"] > 0
    assert report["config"]["alphas"] == [2.0, 0.5]
    assert len(csv.read_text().splitlines()) == 3


def test_sweep_is_byte_identical(tmp_path: Path) -> None:
    """Repeated invocations and thread counts give identical reports."""
    outputs = []
    for run, threads in enumerate(("1", "4", "4")):
        out = tmp_path / f"report{run}.json"
        argv = [*SWEEP, "--max-steps", "200", "--seed", "7", "--threads", threads]
        assert main([*argv, "--out", str(out)]) == EXIT_OK
        outputs.append(out.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_train_then_attack_with_dump(tmp_path: Path) -> None:
    """A trained model file drives a single attack and its dump."""
    model = tmp_path / "blobs.lvym"
    argv = ["train", "--synthetic", "--epochs", "50", "--out", str(model)]
    assert main(argv) == EXIT_OK
    assert model.read_bytes().startswith(b"LVYM")

    dump_dir = tmp_path / "dumps"
    attack_argv = [
        "attack",
        "--synthetic",
        "--model",
        str(model),
        "--alpha",
        "0.5",
        "--index",
        "1",
        "--max-steps",
        "200",
        "--dump-dir",
        str(dump_dir),
    ]
    assert main(attack_argv) == EXIT_OK
    stem = dump_dir / "alpha0.5_sample1"
    original = read_pgm(f"{stem}_original.pgm")
    adversarial = read_pgm(f"{stem}_adversarial.pgm")
    diff = read_pgm(f"{stem}_diff.pgm")
    for image in (original, adversarial, diff):
        assert image.pixels.shape == (1, SYNTHETIC_DIM)
    assert original.scale is None
    assert diff.scale is not None and diff.scale > 0
    assert diff.pixels.min() >= 1
    assert (dump_dir / "alpha0.5_sample1.f64").stat().st_size == 3 * 8 * SYNTHETIC_DIM
    assert sorted(path.name for path in dump_dir.iterdir()) == [
        "alpha0.5_sample1.f64",
        "alpha0.5_sample1_adversarial.pgm",
        "alpha0.5_sample1_diff.pgm",
        "alpha0.5_sample1_original.pgm",
    ]


def test_missing_model_is_a_usage_error(tmp_path: Path) -> None:
    """A model path that does not exist exits with 2."""
    argv = ["attack", "--synthetic", "--model", str(tmp_path / "nope.lvym")]
    assert main(argv) == EXIT_USAGE


def test_missing_dataset_is_a_usage_error() -> None:
    """A sweep needs a dataset."""
    assert main(["sweep"]) == EXIT_USAGE


def test_train_needs_output() -> None:
    """train without --out is a usage error."""
    assert main(["train", "--synthetic"]) == EXIT_USAGE
