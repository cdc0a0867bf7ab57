"""The Levy-Attack engine: a boundary attack driven by alpha-stable steps.

Starting from a misclassified point, the walk proposes a step on the sphere
around the original sample, contracts it toward the original, and keeps the
candidate only if the oracle still misclassifies it. Distances are squared
L2 norms throughout, including the relative orthogonal step size: a proposal
has L2 norm delta * d(current, x).
"""
from __future__ import annotations

from collections.abc import Callable
from dataclasses import replace
import logging
import math

import numpy as np

from .const import (
    EPSILON_CEILING,
    MAX_RESAMPLE_ATTEMPTS,
    ORTHOGONAL_SUCCESS_TARGET,
    SHRINK_SUCCESS_TARGET,
)
from .exceptions import (
    DimensionMismatch,
    DomainError,
    InitializationFailed,
    ResampleRequired,
)
from .models import (
    AttackConfig,
    AttackResult,
    AttackState,
    Bounds,
    DataPoint,
    Label,
    StableParams,
    TerminationReason,
    squared_distance,
)
from .oracle import OracleHandle
from .stable import sample_vector
from .utils import as_datapoint, clip_to_bounds, make_rng

_LOGGER = logging.getLogger(__name__)

ProposalSampler = Callable[[np.random.Generator, int], DataPoint]


def stable_proposal(params: StableParams) -> ProposalSampler:
    """Proposal drawing i.i.d. SA(alpha, mu, gamma) coordinates."""

    def _sample(rng: np.random.Generator, dim: int) -> DataPoint:
        return sample_vector(params, dim, rng)

    return _sample


def gaussian_proposal(scale: float = math.sqrt(2.0)) -> ProposalSampler:
    """Gaussian proposal of the original boundary attack.

    The default scale matches the moments of SA(2, 0, 1).
    """

    def _sample(rng: np.random.Generator, dim: int) -> DataPoint:
        return scale * rng.standard_normal(dim)

    return _sample


def _initialize(
    oracle: OracleHandle,
    x: DataPoint,
    y: Label,
    max_attempts: int,
    rng: np.random.Generator,
) -> tuple[DataPoint, Label]:
    label = oracle.predict(x)
    if label != y:
        return x.copy(), label

    low, high = oracle.input_bounds
    for attempt in range(1, max_attempts + 1):
        noise = rng.uniform(low, high, size=x.shape)
        candidate = clip_to_bounds(x + noise, (low, high))
        if (label := oracle.predict(candidate)) != y:
            _LOGGER.debug("Found adversarial starting point after %s draws", attempt)
            return candidate, label

    raise InitializationFailed(max_attempts)


def initialize(
    oracle: OracleHandle,
    x: DataPoint,
    y: Label,
    max_attempts: int,
    rng: np.random.Generator,
) -> DataPoint:
    """Draw x + U(low, high) noise until the oracle no longer answers y.

    Returns x itself, after a single query, when x is already misclassified.
    """
    point, _ = _initialize(oracle, as_datapoint(x), y, max_attempts, rng)
    return point


def rescale_step(eta: DataPoint, delta: float, distance: float) -> DataPoint:
    """Scale eta to L2 norm delta * distance."""
    if not delta > 0 or not distance > 0:
        raise DomainError(
            f"delta and distance must be positive, got {delta}, {distance}"
        )

    peak = float(np.max(np.abs(eta)))
    if peak == 0 or not math.isfinite(peak):
        raise ResampleRequired("proposal has no usable direction")

    # normalize by the peak first so heavy-tailed draws cannot overflow the norm
    unit = eta / peak
    return unit * (delta * distance / float(np.linalg.norm(unit)))


def orthogonal_project(
    x: DataPoint, current: DataPoint, step: DataPoint
) -> DataPoint:
    """Move current tangentially by step, then project back onto its sphere."""
    source = current - x
    radius = float(np.linalg.norm(source))
    if radius == 0:
        raise DomainError("current point coincides with the original")

    direction = source / radius
    moved = source + (step - np.dot(step, direction) * direction)
    return x + moved * (radius / float(np.linalg.norm(moved)))


def shrink_toward_source(
    x: DataPoint,
    candidate: DataPoint,
    epsilon: float,
    bounds: Bounds | None = None,
) -> DataPoint:
    """Contract candidate toward x so its squared distance drops by epsilon."""
    if not 0 <= epsilon < 1:
        raise DomainError(f"epsilon must lie in [0, 1), got {epsilon}")

    shrunk = x + math.sqrt(1.0 - epsilon) * (candidate - x)
    if bounds is None:
        return shrunk
    return clip_to_bounds(shrunk, bounds)


def propose(
    x: DataPoint,
    state: AttackState,
    params: StableParams,
    rng: np.random.Generator,
    bounds: Bounds | None = None,
    *,
    shrink: bool = True,
    sampler: ProposalSampler | None = None,
) -> DataPoint:
    """Compose sample, rescale, orthogonal step and shrink into one candidate.

    With shrink=False the clipped orthogonal candidate is returned instead.
    """
    sampler = sampler or stable_proposal(params)

    for _ in range(MAX_RESAMPLE_ATTEMPTS):
        try:
            eta = sampler(rng, x.shape[0])
            step = rescale_step(eta, state.delta, state.distance)
        except ResampleRequired:
            continue
        break
    else:
        raise ResampleRequired(f"no usable proposal in {MAX_RESAMPLE_ATTEMPTS} draws")

    candidate = orthogonal_project(x, state.current, step)
    if shrink:
        candidate = shrink_toward_source(x, candidate, state.epsilon)
    if bounds is None:
        return candidate
    return clip_to_bounds(candidate, bounds)


def adapt(state: AttackState, config: AttackConfig) -> AttackState:
    """Tune delta and epsilon from the success rates of the finished window.

    A window spans `adaptation_window` iterations; the orthogonal rate covers
    the probes inside it and the shrink rate the remaining full steps.
    """
    factor = config.adaptation_factor

    if state.orth_success_rate > ORTHOGONAL_SUCCESS_TARGET:
        delta = state.delta * factor
    else:
        delta = state.delta / factor

    if state.shrink_success_rate > SHRINK_SUCCESS_TARGET:
        epsilon = min(state.epsilon * factor, EPSILON_CEILING)
    else:
        epsilon = state.epsilon / factor

    _LOGGER.debug(
        "Adapted at step %s: orthogonal %s/%s, full %s/%s -> delta=%.3g epsilon=%.3g",
        state.step_index,
        state.orth_successes,
        state.orth_trials,
        state.shrink_successes,
        state.shrink_trials,
        delta,
        epsilon,
    )
    return replace(
        state,
        delta=delta,
        epsilon=epsilon,
        orth_successes=0,
        orth_trials=0,
        shrink_successes=0,
        shrink_trials=0,
    )


def run_attack(
    oracle: OracleHandle,
    x: DataPoint,
    y: Label,
    config: AttackConfig,
    sampler: ProposalSampler | None = None,
) -> AttackResult:
    """Run the untargeted Levy-Attack against one sample.

    Expected failures (no starting point, original already misclassified) are
    reported through `terminated_by`; they never raise.
    """
    x = as_datapoint(x)
    if x.shape[0] != oracle.input_dim:
        raise DimensionMismatch(
            f"oracle expects {oracle.input_dim} coordinates, got {x.shape[0]}"
        )
    if not 0 <= y < oracle.num_classes:
        raise DomainError(f"label {y} is not a class of the oracle")

    rng = make_rng(config.seed)
    params = config.stable_params
    sampler = sampler or stable_proposal(params)
    queries_before = oracle.query_count

    try:
        start, label = _initialize(oracle, x, y, config.max_init_attempts, rng)
    except InitializationFailed as err:
        _LOGGER.warning("Attack gave up: %s", err)
        return AttackResult(
            adversarial=x.copy(),
            perturbation=np.zeros_like(x),
            final_label=y,
            steps_taken=0,
            queries_used=oracle.query_count - queries_before,
            terminated_by=TerminationReason.INIT_FAILED,
        )

    if label != y and np.array_equal(start, x):
        _LOGGER.warning("Original is already classified as %s, not %s", label, y)
        return AttackResult(
            adversarial=x.copy(),
            perturbation=np.zeros_like(x),
            final_label=label,
            steps_taken=0,
            queries_used=oracle.query_count - queries_before,
            terminated_by=TerminationReason.ORIGINAL_MISCLASSIFIED,
        )

    state = AttackState.start(x, start, config)
    trace = [(0, state.distance)]
    terminated_by = TerminationReason.MAX_STEPS

    for step in range(1, config.max_steps + 1):
        state.step_index = step
        probe = step % config.probe_interval == 0
        candidate = propose(
            x,
            state,
            params,
            rng,
            oracle.input_bounds,
            shrink=not probe,
            sampler=sampler,
        )
        is_adversarial = oracle.predict(candidate) != y

        if probe:
            state.record_orthogonal(is_adversarial)
        else:
            state.record_shrink(is_adversarial)

        if is_adversarial:
            # a sphere move can round a hair above the current distance
            distance = min(squared_distance(candidate, x), state.distance)
            state.accept(candidate, distance)
            trace.append((step, distance))

        if step % config.adaptation_window == 0:
            state = adapt(state, config)
            if state.epsilon < config.psi:
                terminated_by = TerminationReason.EPSILON_BELOW_PSI
                break

    perturbation = state.current - x
    adversarial = x + perturbation
    final_label = oracle.predict(adversarial)

    _LOGGER.debug(
        "Attack finished after %s steps (%s): squared distance %.6g, label %s",
        state.step_index,
        terminated_by.value,
        state.distance,
        final_label,
    )
    return AttackResult(
        adversarial=adversarial,
        perturbation=perturbation,
        final_label=final_label,
        steps_taken=state.step_index,
        queries_used=oracle.query_count - queries_before,
        terminated_by=terminated_by,
        distance_trace=trace,
    )
