"""The Levy-Attack domain models."""
from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from enum import Enum
import logging
from typing import Any

import numpy as np
import numpy.typing as npt

from .config import ATTACK_CONFIG_SCHEMA, STABLE_PARAMS_SCHEMA, validate
from .const import (
    DEFAULT_ADAPTATION_FACTOR,
    DEFAULT_ADAPTATION_WINDOW,
    DEFAULT_DELTA,
    DEFAULT_EPSILON,
    DEFAULT_MAX_INIT_ATTEMPTS,
    DEFAULT_MAX_STEPS,
    DEFAULT_PROBE_INTERVAL,
    DEFAULT_PSI,
    DEFAULT_SEED,
)

_LOGGER = logging.getLogger(__name__)

DataPoint = npt.NDArray[np.float64]
Label = int
Bounds = tuple[float, float]


@dataclass(frozen=True)
class StableParams:
    """Parameters of a symmetric alpha-stable law SA(alpha, mu, gamma)."""

    alpha: float
    mu: float = 0.0
    gamma: float = 1.0

    def __post_init__(self) -> None:
        """Validate the parameter triple."""
        validate(STABLE_PARAMS_SCHEMA, asdict(self))


@dataclass(frozen=True)
class AttackConfig:
    """All knobs of a single attack run."""

    alpha: float
    max_steps: int = DEFAULT_MAX_STEPS
    psi: float = DEFAULT_PSI
    initial_delta: float = DEFAULT_DELTA
    initial_epsilon: float = DEFAULT_EPSILON
    adaptation_window: int = DEFAULT_ADAPTATION_WINDOW
    adaptation_factor: float = DEFAULT_ADAPTATION_FACTOR
    probe_interval: int = DEFAULT_PROBE_INTERVAL
    max_init_attempts: int = DEFAULT_MAX_INIT_ATTEMPTS
    seed: int = DEFAULT_SEED

    def __post_init__(self) -> None:
        """Validate against the attack schema."""
        validate(ATTACK_CONFIG_SCHEMA, asdict(self))

    @property
    def stable_params(self) -> StableParams:
        """Proposal distribution SA(alpha, 0, 1)."""
        return StableParams(alpha=self.alpha)

    def with_changes(self, **changes: Any) -> AttackConfig:
        """Return a validated copy with some fields replaced."""
        return replace(self, **changes)

    def as_dict(self) -> dict[str, Any]:
        """Return the config as plain data."""
        return asdict(self)


class TerminationReason(str, Enum):
    """Which exit of the attack loop fired."""

    EPSILON_BELOW_PSI = "epsilon_below_psi"
    MAX_STEPS = "max_steps"
    INIT_FAILED = "init_failed"
    ORIGINAL_MISCLASSIFIED = "original_misclassified"


@dataclass
class AttackState:
    """The evolving state of the random walk."""

    current: DataPoint
    distance: float
    delta: float
    epsilon: float
    step_index: int = 0
    orth_successes: int = 0
    orth_trials: int = 0
    shrink_successes: int = 0
    shrink_trials: int = 0

    @classmethod
    def start(
        cls, x: DataPoint, current: DataPoint, config: AttackConfig
    ) -> AttackState:
        """Create the walk state at an adversarial starting point."""
        return cls(
            current=current,
            distance=squared_distance(current, x),
            delta=config.initial_delta,
            epsilon=config.initial_epsilon,
        )

    @property
    def orth_success_rate(self) -> float:
        """Share of adversarial orthogonal probes in this window."""
        if self.orth_trials == 0:
            return 0.0
        return self.orth_successes / self.orth_trials

    @property
    def shrink_success_rate(self) -> float:
        """Share of adversarial full steps in this window."""
        if self.shrink_trials == 0:
            return 0.0
        return self.shrink_successes / self.shrink_trials

    def record_orthogonal(self, success: bool) -> None:
        """Count one orthogonal probe."""
        self.orth_trials += 1
        self.orth_successes += int(success)

    def record_shrink(self, success: bool) -> None:
        """Count one full step."""
        self.shrink_trials += 1
        self.shrink_successes += int(success)

    def accept(self, candidate: DataPoint, distance: float) -> None:
        """Move the walk to an adversarial candidate."""
        self.current = candidate
        self.distance = distance


@dataclass
class AttackResult:
    """Outcome of one attack run."""

    adversarial: DataPoint
    perturbation: DataPoint
    final_label: Label
    steps_taken: int
    queries_used: int
    terminated_by: TerminationReason
    distance_trace: list[tuple[int, float]] = field(default_factory=list)

    @property
    def success(self) -> bool:
        """Whether the attack produced an adversarial sample."""
        return self.terminated_by in (
            TerminationReason.EPSILON_BELOW_PSI,
            TerminationReason.MAX_STEPS,
        )

    @property
    def final_distance(self) -> float:
        """Squared L2 norm of the adversarial pattern."""
        return float(np.dot(self.perturbation, self.perturbation))


def squared_distance(a: DataPoint, b: DataPoint) -> float:
    """Squared L2 distance d(a, b)."""
    diff = a - b
    return float(np.dot(diff, diff))
