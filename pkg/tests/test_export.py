"""Tests for PGM sample dumps."""
from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from levy_attack.const import UNIT_BOUNDS
from levy_attack.exceptions import ExportError
from levy_attack.export import dump_adversarial, read_pgm
from levy_attack.models import AttackResult, TerminationReason


def _result(original: np.ndarray, perturbation: np.ndarray) -> AttackResult:
    return AttackResult(
        adversarial=original + perturbation,
        perturbation=perturbation,
        final_label=1,
        steps_taken=1,
        queries_used=3,
        terminated_by=TerminationReason.MAX_STEPS,
    )


def test_dump_writes_valid_files(tmp_path: Path, rng: np.random.Generator) -> None:
    """Three PGMs and a sidecar per sample, with the layout in the header."""
    original = rng.random(6) * 0.5
    perturbation = rng.standard_normal(6) * 0.1
    result = _result(original, perturbation)
    record = dump_adversarial(
        tmp_path / "dumps", "s0", original, result, UNIT_BOUNDS, (2, 3)
    )

    for path in (record.original, record.adversarial, record.difference):
        assert path.read_bytes().startswith(b"P5\n")
        assert read_pgm(path).pixels.shape == (2, 3)

    sidecar = np.frombuffer(record.sidecar.read_bytes(), dtype="<f8")
    np.testing.assert_array_equal(
        sidecar, np.concatenate([original, result.adversarial, perturbation])
    )


def test_adversarial_round_trip_within_quantization(
    tmp_path: Path, rng: np.random.Generator
) -> None:
    """The reloaded adversarial image matches within one gray level."""
    original = rng.random(12) * 0.8
    result = _result(original, rng.random(12) * 0.2)
    record = dump_adversarial(tmp_path, "s1", original, result, UNIT_BOUNDS, (3, 4))
    reloaded = read_pgm(record.adversarial).pixels.reshape(-1) / 255
    assert np.max(np.abs(reloaded - result.adversarial)) <= 1 / 255


def test_difference_scale_is_recorded(tmp_path: Path) -> None:
    """The largest change maps to the end of the gray range."""
    original = np.full(4, 0.5)
    result = _result(original, np.array([0.0, 0.08, -0.2, 0.05]))
    record = dump_adversarial(tmp_path, "s2", original, result, UNIT_BOUNDS, (2, 2))
    image = read_pgm(record.difference)
    assert record.scale == pytest.approx(127 / 0.2)
    assert image.scale == pytest.approx(record.scale)
    assert image.pixels.reshape(-1).tolist() == [128, 179, 1, 160]


def test_zero_perturbation_is_mid_gray(tmp_path: Path) -> None:
    """No change gives a uniform mid-gray image with scale 0."""
    original = np.full(4, 0.25)
    result = _result(original, np.zeros(4))
    record = dump_adversarial(tmp_path, "s3", original, result, UNIT_BOUNDS, (2, 2))
    image = read_pgm(record.difference)
    assert record.scale == 0.0
    assert image.scale == 0.0
    assert np.all(image.pixels == 128)


def test_unwritable_directory(tmp_path: Path) -> None:
    """A file in place of the directory is reported as an export error."""
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    original = np.zeros(4)
    result = _result(original, np.ones(4) * 0.1)
    with pytest.raises(ExportError):
        dump_adversarial(blocker, "s4", original, result, UNIT_BOUNDS, (2, 2))
