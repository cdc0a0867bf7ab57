"""Levy-Attack: decision-based attacks driven by alpha-stable random walks."""
from __future__ import annotations

from .attack import (
    adapt,
    gaussian_proposal,
    initialize,
    orthogonal_project,
    propose,
    rescale_step,
    run_attack,
    shrink_toward_source,
    stable_proposal,
)
from .models import (
    AttackConfig,
    AttackResult,
    AttackState,
    StableParams,
    TerminationReason,
)
from .oracle import OracleHandle, load_model, save_model, train_toy_classifier
from .stable import sample_scalar, sample_vector, validate_sampler

__all__ = [
    "AttackConfig",
    "AttackResult",
    "AttackState",
    "OracleHandle",
    "StableParams",
    "TerminationReason",
    "adapt",
    "gaussian_proposal",
    "initialize",
    "load_model",
    "orthogonal_project",
    "propose",
    "rescale_step",
    "run_attack",
    "sample_scalar",
    "sample_vector",
    "save_model",
    "shrink_toward_source",
    "stable_proposal",
    "train_toy_classifier",
    "validate_sampler",
]
