"""Decision-only classifier oracle and the desk-scale models behind it."""
from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass
import logging
from pathlib import Path
import struct

import numpy as np

from .const import (
    ACTIVATION_RELU,
    ACTIVATION_TAGS,
    DEFAULT_HIDDEN_LEARNING_RATE,
    DEFAULT_LEARNING_RATE,
    MODEL_MAGIC,
    MODEL_VERSION,
    PIXEL_BOUNDS,
)
from .data import LabeledDataset
from .exceptions import (
    DatasetError,
    DegenerateLabelsError,
    DimensionChainError,
    DimensionMismatch,
    DomainError,
    ModelFileNotFound,
    ModelFormatError,
    OutOfBoundsInput,
)
from .models import Bounds, DataPoint, Label
from .utils import as_datapoint, within_bounds

_LOGGER = logging.getLogger(__name__)

_HEADER = struct.Struct("<4sII")
_LAYER_HEADER = struct.Struct("<IIB")
_TAG_TO_ACTIVATION = {tag: name for name, tag in ACTIVATION_TAGS.items()}


@dataclass(frozen=True)
class Layer:
    """A dense layer: activation(W x + b)."""

    weights: np.ndarray
    bias: np.ndarray
    activation: str = "identity"

    def __post_init__(self) -> None:
        """Check the layer shape."""
        if self.activation not in ACTIVATION_TAGS:
            raise DomainError(f"unknown activation {self.activation!r}")
        if self.weights.ndim != 2 or self.bias.shape != (self.weights.shape[0],):
            raise DimensionChainError(
                f"weights {self.weights.shape} do not match bias {self.bias.shape}"
            )

    @property
    def rows(self) -> int:
        """Output size."""
        return int(self.weights.shape[0])

    @property
    def cols(self) -> int:
        """Input size."""
        return int(self.weights.shape[1])

    def forward(self, inputs: np.ndarray) -> np.ndarray:
        """Apply the layer to one point or a batch of rows."""
        outputs = inputs @ self.weights.T + self.bias
        if ACTIVATION_TAGS[self.activation] == ACTIVATION_RELU:
            outputs = np.maximum(outputs, 0.0)
        return outputs


class FeedForwardModel:
    """A chain of dense layers; the last layer yields one score per class."""

    def __init__(self, layers: Sequence[Layer]) -> None:
        """Init the model and check that layer shapes chain."""
        if not layers:
            raise DimensionChainError("a model needs at least one layer")
        for index, (previous, layer) in enumerate(zip(layers, layers[1:]), start=1):
            if layer.cols != previous.rows:
                raise DimensionChainError(
                    f"layer {index} expects {layer.cols} inputs but layer "
                    f"{index - 1} produces {previous.rows}"
                )
        self.layers: tuple[Layer, ...] = tuple(layers)

    @property
    def input_dim(self) -> int:
        """Number of input coordinates."""
        return self.layers[0].cols

    @property
    def num_classes(self) -> int:
        """Number of output classes."""
        return self.layers[-1].rows

    def scores(self, inputs: np.ndarray) -> np.ndarray:
        """Final-layer scores for one point or a batch of rows."""
        outputs = inputs
        for layer in self.layers:
            outputs = layer.forward(outputs)
        return outputs

    def classify_batch(self, points: np.ndarray) -> np.ndarray:
        """Argmax class per row; ties go to the lowest class index."""
        return np.argmax(self.scores(np.atleast_2d(points)), axis=1)

    def accuracy(self, dataset: LabeledDataset) -> float:
        """Share of the dataset classified correctly."""
        return float(np.mean(self.classify_batch(dataset.points) == dataset.labels))


class OracleHandle:
    """Black-box access to a classifier: labels only, every query counted."""

    def __init__(
        self,
        model: FeedForwardModel,
        input_bounds: Bounds = PIXEL_BOUNDS,
        training_accuracy: float | None = None,
    ) -> None:
        """Init the oracle."""
        low, high = input_bounds
        if not low < high:
            raise DomainError(f"invalid input bounds {input_bounds}")
        self._model = model
        self.input_bounds: Bounds = (float(low), float(high))
        self.training_accuracy = training_accuracy
        self.query_count = 0

    @property
    def model(self) -> FeedForwardModel:
        """The wrapped model, for training and persistence only."""
        return self._model

    @property
    def num_classes(self) -> int:
        """Number of classes the oracle can answer."""
        return self._model.num_classes

    @property
    def input_dim(self) -> int:
        """Dimension of accepted inputs."""
        return self._model.input_dim

    def predict(self, x: DataPoint) -> Label:
        """Return the decision for x and count the query."""
        point = as_datapoint(x)
        if point.shape[0] != self.input_dim:
            raise DimensionMismatch(
                f"oracle expects {self.input_dim} coordinates, got {point.shape[0]}"
            )
        if not within_bounds(point, self.input_bounds):
            raise OutOfBoundsInput(f"input leaves the bounds {self.input_bounds}")

        self.query_count += 1
        return int(np.argmax(self._model.scores(point)))

    def clone(self) -> OracleHandle:
        """Return an oracle sharing the model with its own query counter."""
        return OracleHandle(self._model, self.input_bounds, self.training_accuracy)


def save_model(model: FeedForwardModel, path: str | Path) -> None:
    """Write a model in the LVYM format."""
    chunks = [_HEADER.pack(MODEL_MAGIC, MODEL_VERSION, len(model.layers))]
    for layer in model.layers:
        chunks.append(
            _LAYER_HEADER.pack(
                layer.rows, layer.cols, ACTIVATION_TAGS[layer.activation]
            )
        )
        chunks.append(layer.weights.astype("<f8").tobytes(order="C"))
        chunks.append(layer.bias.astype("<f8").tobytes())
    Path(path).write_bytes(b"".join(chunks))
    _LOGGER.info("Saved model with %s layers to %s", len(model.layers), path)


def _unpack(fmt: struct.Struct, buffer: bytes, offset: int, what: str) -> tuple:
    if len(buffer) < offset + fmt.size:
        raise ModelFormatError(f"file ends inside the {what} at byte {offset}")
    return fmt.unpack_from(buffer, offset)


def _read_floats(buffer: bytes, offset: int, count: int, what: str) -> np.ndarray:
    end = offset + 8 * count
    if len(buffer) < end:
        raise ModelFormatError(f"file ends inside the {what} at byte {offset}")
    return np.frombuffer(buffer, dtype="<f8", count=count, offset=offset).astype(
        np.float64
    )


def parse_model(buffer: bytes) -> FeedForwardModel:
    """Parse LVYM bytes into a model."""
    magic, version, layer_count = _unpack(_HEADER, buffer, 0, "header")
    if magic != MODEL_MAGIC:
        raise ModelFormatError(f"bad magic {magic!r}, expected {MODEL_MAGIC!r}")
    if version != MODEL_VERSION:
        raise ModelFormatError(f"unsupported format version {version}")
    if layer_count == 0:
        raise ModelFormatError("model declares no layers")

    layers: list[Layer] = []
    offset = _HEADER.size
    for index in range(layer_count):
        rows, cols, tag = _unpack(
            _LAYER_HEADER, buffer, offset, f"layer {index} header"
        )
        offset += _LAYER_HEADER.size
        if rows == 0 or cols == 0:
            raise ModelFormatError(f"layer {index} has an empty shape {rows}x{cols}")
        if tag not in _TAG_TO_ACTIVATION:
            raise ModelFormatError(f"layer {index} has unknown activation tag {tag}")

        weights = _read_floats(buffer, offset, rows * cols, f"layer {index} weights")
        offset += 8 * rows * cols
        bias = _read_floats(buffer, offset, rows, f"layer {index} biases")
        offset += 8 * rows
        layers.append(
            Layer(weights.reshape(rows, cols), bias, _TAG_TO_ACTIVATION[tag])
        )

    if offset != len(buffer):
        raise ModelFormatError(
            f"{len(buffer) - offset} unexpected bytes after the last layer"
        )
    return FeedForwardModel(layers)


def load_model(path: str | Path, input_bounds: Bounds = PIXEL_BOUNDS) -> OracleHandle:
    """Load an LVYM model file as a fresh oracle."""
    try:
        buffer = Path(path).read_bytes()
    except FileNotFoundError as err:
        raise ModelFileNotFound(f"model file not found: {path}") from err

    model = parse_model(buffer)
    _LOGGER.debug(
        "Loaded model %s: %s inputs, %s classes",
        path,
        model.input_dim,
        model.num_classes,
    )
    return OracleHandle(model, input_bounds)


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = np.exp(logits - logits.max(axis=1, keepdims=True))
    return shifted / shifted.sum(axis=1, keepdims=True)


def train_toy_classifier(
    dataset: LabeledDataset,
    epochs: int,
    rng: np.random.Generator,
    hidden_units: int = 0,
    learning_rate: float | None = None,
) -> OracleHandle:
    """Fit softmax regression or a one-hidden-layer ReLU net by gradient descent.

    Features are standardized during training and the standardization is folded
    into the first layer, so the returned model consumes raw coordinates.
    """
    if len(dataset) == 0:
        raise DatasetError("cannot train on an empty dataset")
    if not np.all(np.isfinite(dataset.points)):
        raise DatasetError("features must be finite")
    if np.unique(dataset.labels).size < 2:
        raise DegenerateLabelsError("training needs at least two distinct labels")
    if epochs < 1:
        raise DomainError(f"epochs must be positive, got {epochs}")
    if learning_rate is None:
        learning_rate = (
            DEFAULT_HIDDEN_LEARNING_RATE if hidden_units else DEFAULT_LEARNING_RATE
        )

    mean = dataset.points.mean(axis=0)
    scale = dataset.points.std(axis=0)
    scale[scale == 0] = 1.0
    inputs = (dataset.points - mean) / scale
    targets = np.eye(dataset.num_classes)[dataset.labels]
    count, dim = inputs.shape

    if hidden_units:
        weights = [
            rng.standard_normal((hidden_units, dim)) * np.sqrt(2.0 / dim),
            rng.standard_normal((dataset.num_classes, hidden_units))
            * np.sqrt(1.0 / hidden_units),
        ]
        biases = [np.zeros(hidden_units), np.zeros(dataset.num_classes)]
    else:
        weights = [rng.standard_normal((dataset.num_classes, dim)) * 0.01]
        biases = [np.zeros(dataset.num_classes)]

    for _ in range(epochs):
        activations = [inputs]
        for layer_weights, layer_bias in zip(weights[:-1], biases[:-1]):
            hidden = activations[-1] @ layer_weights.T + layer_bias
            activations.append(np.maximum(hidden, 0))
        probabilities = _softmax(activations[-1] @ weights[-1].T + biases[-1])

        grad = (probabilities - targets) / count
        for index in reversed(range(len(weights))):
            grad_weights = grad.T @ activations[index]
            grad_bias = grad.sum(axis=0)
            if index:
                grad = (grad @ weights[index]) * (activations[index] > 0)
            weights[index] -= learning_rate * grad_weights
            biases[index] -= learning_rate * grad_bias

    weights[0] = weights[0] / scale
    biases[0] = biases[0] - weights[0] @ mean

    activations_tags = ["relu"] * (len(weights) - 1) + ["identity"]
    model = FeedForwardModel(
        [
            Layer(layer_weights, layer_bias, tag)
            for layer_weights, layer_bias, tag in zip(weights, biases, activations_tags)
        ]
    )
    accuracy = model.accuracy(dataset)
    _LOGGER.info(
        "Trained %s on %s samples for %s epochs: training accuracy %.4f",
        f"a {hidden_units}-unit ReLU net" if hidden_units else "softmax regression",
        count,
        epochs,
        accuracy,
    )
    return OracleHandle(model, dataset.bounds, training_accuracy=accuracy)
