"""Adversarial sample dumps as binary PGM images with a raw float64 sidecar."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
import logging
from pathlib import Path

import numpy as np

from .const import PGM_MAXVAL, PGM_MID_GRAY
from .exceptions import ExportError
from .models import AttackResult, Bounds, DataPoint

_LOGGER = logging.getLogger(__name__)

_DIFF_HALF_RANGE = PGM_MAXVAL - PGM_MID_GRAY


@dataclass(frozen=True)
class PgmImage:
    """A grayscale image read back from disk."""

    pixels: np.ndarray
    comments: list[str]

    @property
    def scale(self) -> float | None:
        """Difference scale recorded in the header, if any."""
        for comment in self.comments:
            key, _, value = comment.partition(" ")
            if key == "scale":
                return float(value)
        return None


@dataclass(frozen=True)
class DumpRecord:
    """Files written for one attacked sample."""

    original: Path
    adversarial: Path
    difference: Path
    sidecar: Path
    scale: float


def quantize(values: DataPoint, bounds: Bounds) -> np.ndarray:
    """Map values in bounds onto 0..255."""
    low, high = bounds
    levels = np.rint((values - low) / (high - low) * PGM_MAXVAL)
    return np.clip(levels, 0, PGM_MAXVAL).astype(np.uint8)


def difference_levels(perturbation: DataPoint) -> tuple[np.ndarray, float]:
    """Map a perturbation onto 1..255 around mid-gray and return the scale used."""
    peak = float(np.max(np.abs(perturbation), initial=0.0))
    if peak == 0:
        return np.full(perturbation.shape, PGM_MID_GRAY, dtype=np.uint8), 0.0
    scale = _DIFF_HALF_RANGE / peak
    levels = PGM_MID_GRAY + np.rint(perturbation * scale)
    return np.clip(levels, 0, PGM_MAXVAL).astype(np.uint8), scale


def write_pgm(
    path: Path,
    levels: np.ndarray,
    shape: tuple[int, int],
    comments: Sequence[str] = (),
) -> None:
    """Write a binary (P5) PGM."""
    rows, cols = shape
    header = ["P5", *(f"# {comment}" for comment in comments), f"{cols} {rows}"]
    header.append(str(PGM_MAXVAL))
    payload = levels.reshape(rows, cols).tobytes()
    path.write_bytes(("\n".join(header) + "\n").encode("ascii") + payload)


def read_pgm(path: str | Path) -> PgmImage:
    """Read a binary PGM written by `write_pgm`."""
    buffer = Path(path).read_bytes()
    tokens: list[str] = []
    comments: list[str] = []
    offset = 0
    while len(tokens) < 4:
        end = buffer.index(b"\n", offset)
        line = buffer[offset:end].decode("ascii")
        offset = end + 1
        if line.startswith("#"):
            comments.append(line[1:].strip())
        else:
            tokens.extend(line.split())

    magic, cols, rows, maxval = tokens
    if magic != "P5" or int(maxval) != PGM_MAXVAL:
        raise ExportError(f"{path} is not an 8-bit binary PGM")
    pixels = np.frombuffer(buffer, dtype=np.uint8, offset=offset)
    return PgmImage(pixels.reshape(int(rows), int(cols)).copy(), comments)


def dump_adversarial(
    out_dir: str | Path,
    stem: str,
    original: DataPoint,
    result: AttackResult,
    bounds: Bounds,
    shape: tuple[int, int],
) -> DumpRecord:
    """Write original, adversarial and difference images plus the f64 sidecar."""
    directory = Path(out_dir)
    adversarial, perturbation = result.adversarial, result.perturbation
    diff, scale = difference_levels(perturbation)
    record = DumpRecord(
        original=directory / f"{stem}_original.pgm",
        adversarial=directory / f"{stem}_adversarial.pgm",
        difference=directory / f"{stem}_diff.pgm",
        sidecar=directory / f"{stem}.f64",
        scale=scale,
    )

    try:
        directory.mkdir(parents=True, exist_ok=True)
        write_pgm(record.original, quantize(original, bounds), shape)
        write_pgm(record.adversarial, quantize(adversarial, bounds), shape)
        write_pgm(record.difference, diff, shape, [f"scale {scale!r}"])
        stacked = np.concatenate([original, adversarial, perturbation])
        record.sidecar.write_bytes(stacked.astype("<f8").tobytes())
    except OSError as err:
        raise ExportError(f"cannot write sample dump to {directory}: {err}") from err

    _LOGGER.debug("Dumped %s to %s (difference scale %s)", stem, directory, scale)
    return record
