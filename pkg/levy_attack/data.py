"""Datasets for attack experiments: IDX files and synthetic blobs."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
import logging
import math
from pathlib import Path
import struct

import numpy as np

from .const import (
    DEFAULT_BLOB_SPREAD,
    IDX_IMAGES_MAGIC,
    IDX_LABELS_MAGIC,
    MNIST_NUM_CLASSES,
    PIXEL_BOUNDS,
    PGM_MAXVAL,
    UNIT_BOUNDS,
)
from .exceptions import (
    BadMagicError,
    CountMismatchError,
    DatasetError,
    DomainError,
    InvalidLabelError,
    TruncatedPayloadError,
)
from .models import Bounds, DataPoint
from .utils import make_rng, within_bounds

_LOGGER = logging.getLogger(__name__)


@dataclass(frozen=True)
class LabeledDataset:
    """Points with labels, declared bounds and an image layout."""

    points: np.ndarray
    labels: np.ndarray
    bounds: Bounds
    num_classes: int
    shape: tuple[int, int]

    def __post_init__(self) -> None:
        """Check the dataset invariants."""
        if self.points.ndim != 2:
            raise DatasetError(
                f"points must be a 2-D array, got {self.points.ndim}-D"
            )
        if len(self.points) != len(self.labels):
            raise CountMismatchError(
                f"{len(self.points)} points but {len(self.labels)} labels"
            )
        if self.shape[0] * self.shape[1] != self.points.shape[1]:
            raise DatasetError(
                f"layout {self.shape} does not hold {self.points.shape[1]} coordinates"
            )
        if len(self.labels) and (
            self.labels.min() < 0 or self.labels.max() >= self.num_classes
        ):
            raise InvalidLabelError(f"labels must lie in [0, {self.num_classes})")
        if not within_bounds(self.points, self.bounds):
            raise DatasetError(f"points exceed the declared bounds {self.bounds}")

    def __len__(self) -> int:
        """Return the number of samples."""
        return len(self.labels)

    @property
    def dim(self) -> int:
        """Dimension of every point."""
        return int(self.points.shape[1])

    def point(self, index: int) -> DataPoint:
        """Return a copy of one point."""
        return self.points[index].copy()

    def label(self, index: int) -> int:
        """Return one label."""
        return int(self.labels[index])

    def subset(self, indices: Sequence[int] | np.ndarray) -> LabeledDataset:
        """Return the samples at the given indices."""
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledDataset(
            points=self.points[indices],
            labels=self.labels[indices],
            bounds=self.bounds,
            num_classes=self.num_classes,
            shape=self.shape,
        )


@dataclass(frozen=True)
class IdxImages:
    """Images parsed from an IDX file, flattened row-major."""

    pixels: np.ndarray
    rows: int
    cols: int
    bounds: Bounds

    def __len__(self) -> int:
        """Return the number of images."""
        return len(self.pixels)


def _read_idx(
    path: str | Path, magic: int, ndims: int
) -> tuple[tuple[int, ...], bytes]:
    buffer = Path(path).read_bytes()
    if len(buffer) < 4:
        raise TruncatedPayloadError("file ends inside the magic number", len(buffer))

    (found,) = struct.unpack_from(">I", buffer, 0)
    if found != magic:
        raise BadMagicError(f"expected magic 0x{magic:08x}, found 0x{found:08x}", 0)

    header_size = 4 + 4 * ndims
    if len(buffer) < header_size:
        raise TruncatedPayloadError("file ends inside the header", len(buffer))
    dims = struct.unpack_from(f">{ndims}I", buffer, 4)

    payload_size = math.prod(dims)
    end = header_size + payload_size
    if len(buffer) < end:
        raise TruncatedPayloadError(
            f"declared {payload_size} payload bytes, found {len(buffer) - header_size}",
            len(buffer),
        )
    if len(buffer) > end:
        _LOGGER.warning(
            "Ignoring %s trailing bytes after offset %s in %s",
            len(buffer) - end,
            end,
            path,
        )
    return dims, buffer[header_size:end]


def load_idx_images(path: str | Path, scale_01: bool = False) -> IdxImages:
    """Parse an IDX image file (magic 0x00000803)."""
    (count, rows, cols), payload = _read_idx(path, IDX_IMAGES_MAGIC, 3)
    pixels = np.frombuffer(payload, dtype=np.uint8).astype(np.float64)
    pixels = pixels.reshape(count, rows * cols)

    bounds = PIXEL_BOUNDS
    if scale_01:
        pixels /= PGM_MAXVAL
        bounds = UNIT_BOUNDS

    _LOGGER.debug("Loaded %s images of %sx%s from %s", count, rows, cols, path)
    return IdxImages(pixels=pixels, rows=rows, cols=cols, bounds=bounds)


def load_idx_labels(
    path: str | Path, num_classes: int = MNIST_NUM_CLASSES
) -> np.ndarray:
    """Parse an IDX label file (magic 0x00000801)."""
    (count,), payload = _read_idx(path, IDX_LABELS_MAGIC, 1)
    labels = np.frombuffer(payload, dtype=np.uint8).astype(np.int64)

    if count and (invalid := np.flatnonzero(labels >= num_classes)).size:
        first = int(invalid[0])
        raise InvalidLabelError(
            f"label {labels[first]} at index {first} is not below {num_classes}"
        )
    return labels


def load_mnist(
    images_path: str | Path,
    labels_path: str | Path,
    scale_01: bool = False,
    num_classes: int = MNIST_NUM_CLASSES,
) -> LabeledDataset:
    """Assemble an IDX image/label pair into a dataset."""
    images = load_idx_images(images_path, scale_01=scale_01)
    labels = load_idx_labels(labels_path, num_classes=num_classes)
    if len(images) != len(labels):
        raise CountMismatchError(
            f"{images_path} holds {len(images)} images "
            f"but {labels_path} holds {len(labels)} labels"
        )

    return LabeledDataset(
        points=images.pixels,
        labels=labels,
        bounds=images.bounds,
        num_classes=num_classes,
        shape=(images.rows, images.cols),
    )


def save_idx(
    dataset: LabeledDataset, images_path: str | Path, labels_path: str | Path
) -> None:
    """Write a dataset as an IDX image/label pair."""
    low, high = dataset.bounds
    levels = np.rint((dataset.points - low) / (high - low) * PGM_MAXVAL)
    if dataset.num_classes > 256:
        raise DatasetError("IDX labels hold at most 256 classes")

    rows, cols = dataset.shape
    with open(images_path, "wb") as file:
        file.write(struct.pack(">4I", IDX_IMAGES_MAGIC, len(dataset), rows, cols))
        file.write(levels.astype(np.uint8).tobytes())
    with open(labels_path, "wb") as file:
        file.write(struct.pack(">2I", IDX_LABELS_MAGIC, len(dataset)))
        file.write(dataset.labels.astype(np.uint8).tobytes())


def make_synthetic_blobs(
    num_classes: int,
    dim: int,
    points_per_class: int,
    separation: float,
    rng: np.random.Generator,
    spread: float = DEFAULT_BLOB_SPREAD,
) -> LabeledDataset:
    """Gaussian blobs at the vertices of a scaled simplex inside [0, 1]^dim.

    Class k is centred at 0.5 + c (e_k - 1/K) on the first K coordinates, with
    c chosen so that neighbouring centres lie `separation` blob widths apart.
    """
    if dim < 2:
        raise DomainError(f"dimension must be at least 2, got {dim}")
    if not 2 <= num_classes <= dim:
        raise DomainError(f"need 2 <= num_classes <= dim, got {num_classes}")
    if points_per_class < 1:
        raise DomainError(
            f"points_per_class must be positive, got {points_per_class}"
        )
    if not separation > 0 or not spread > 0:
        raise DomainError("separation and spread must be positive")

    vertices = np.zeros((num_classes, dim))
    vertices[:, :num_classes] = np.eye(num_classes) - 1.0 / num_classes
    centers = 0.5 + separation * spread / math.sqrt(2.0) * vertices

    labels = np.repeat(np.arange(num_classes, dtype=np.int64), points_per_class)
    points = centers[labels] + spread * rng.standard_normal((len(labels), dim))
    order = rng.permutation(len(labels))

    return LabeledDataset(
        points=np.clip(points[order], *UNIT_BOUNDS),
        labels=labels[order],
        bounds=UNIT_BOUNDS,
        num_classes=num_classes,
        shape=(1, dim),
    )


def select_classes(dataset: LabeledDataset, classes: Sequence[int]) -> LabeledDataset:
    """Keep only some classes, relabelled 0..k-1 in the given order."""
    if len(set(classes)) != len(classes) or len(classes) < 2:
        raise DomainError(f"need at least two distinct classes, got {list(classes)}")
    mapping = {original: new for new, original in enumerate(classes)}
    keep = np.isin(dataset.labels, list(classes))

    return LabeledDataset(
        points=dataset.points[keep],
        labels=np.array(
            [mapping[int(label)] for label in dataset.labels[keep]], dtype=np.int64
        ),
        bounds=dataset.bounds,
        num_classes=len(classes),
        shape=dataset.shape,
    )


def sample_indices(total: int, count: int, seed: int) -> np.ndarray:
    """Draw count indices out of total without replacement, in ascending order."""
    if not 0 < count <= total:
        raise DomainError(f"cannot draw {count} samples out of {total}")
    return np.sort(make_rng(seed).choice(total, size=count, replace=False))
