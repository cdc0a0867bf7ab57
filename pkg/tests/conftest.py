"""Shared fixtures for Levy-Attack tests."""
from __future__ import annotations

import os
from pathlib import Path
import struct

from hypothesis import settings
import numpy as np
import pytest

from levy_attack.const import MODEL_MAGIC, MODEL_VERSION, UNIT_BOUNDS
from levy_attack.data import LabeledDataset, make_synthetic_blobs
from levy_attack.oracle import (
    FeedForwardModel,
    Layer,
    OracleHandle,
    train_toy_classifier,
)

settings.register_profile("ci", max_examples=200, deadline=None)
settings.register_profile("dev", max_examples=50, deadline=None)
settings.register_profile("fast", max_examples=5, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "dev"))

# class 0 iff x1 + x2 <= 1
LINEAR_WEIGHTS = np.array([[-1.0, -1.0], [0.0, 0.0]])
LINEAR_BIAS = np.array([1.0, 0.0])
LINEAR_ORIGINAL = np.array([0.2, 0.3])
LINEAR_OPTIMUM = 0.125


def linear_oracle() -> OracleHandle:
    """The 2-D half-plane oracle on the unit square."""
    return OracleHandle(
        FeedForwardModel([Layer(LINEAR_WEIGHTS.copy(), LINEAR_BIAS.copy())]),
        UNIT_BOUNDS,
    )


def constant_oracle(dim: int = 2, label: int = 0) -> OracleHandle:
    """An oracle that answers `label` everywhere."""
    bias = np.zeros(2)
    bias[label] = 1.0
    return OracleHandle(
        FeedForwardModel([Layer(np.zeros((2, dim)), bias)]), UNIT_BOUNDS
    )


def model_bytes(
    layers: list[tuple[int, int, int]], layer_count: int | None = None
) -> bytes:
    """Build an LVYM file with zero weights for the given (rows, cols, tag) layers."""
    chunks = [
        struct.pack(
            "<4sII",
            MODEL_MAGIC,
            MODEL_VERSION,
            len(layers) if layer_count is None else layer_count,
        )
    ]
    for rows, cols, tag in layers:
        chunks.append(struct.pack("<IIB", rows, cols, tag))
        chunks.append(struct.pack(f"<{rows * cols}d", *([0.0] * (rows * cols))))
        chunks.append(struct.pack(f"<{rows}d", *([0.0] * rows)))
    return b"".join(chunks)


def idx_images_bytes(images: list[list[list[int]]], magic: int = 0x803) -> bytes:
    """Build an IDX image file from nested pixel lists."""
    count, rows, cols = len(images), len(images[0]), len(images[0][0])
    pixels = [value for image in images for row in image for value in row]
    return struct.pack(">4I", magic, count, rows, cols) + bytes(pixels)


def idx_labels_bytes(labels: list[int], magic: int = 0x801) -> bytes:
    """Build an IDX label file."""
    return struct.pack(">2I", magic, len(labels)) + bytes(labels)


@pytest.fixture
def rng() -> np.random.Generator:
    """A fixed random stream."""
    return np.random.default_rng(1234)


@pytest.fixture
def blobs() -> LabeledDataset:
    """Two well separated 10-D classes."""
    return make_synthetic_blobs(2, 10, 100, 6.0, np.random.default_rng(0))


@pytest.fixture
def blob_oracle(blobs: LabeledDataset) -> OracleHandle:
    """Softmax regression trained on the blobs."""
    return train_toy_classifier(blobs, 200, np.random.default_rng(0))


@pytest.fixture
def idx_pair(tmp_path: Path) -> tuple[Path, Path]:
    """Two 2x3 images labelled 7 and 1."""
    images = tmp_path / "images.idx"
    labels = tmp_path / "labels.idx"
    images.write_bytes(
        idx_images_bytes([[[0, 1, 2], [3, 4, 5]], [[255, 128, 0], [10, 20, 30]]])
    )
    labels.write_bytes(idx_labels_bytes([7, 1]))
    return images, labels
