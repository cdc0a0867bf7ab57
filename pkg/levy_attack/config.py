"""Configuration schemas for attacks, samplers and command line runs."""
from __future__ import annotations

from dataclasses import dataclass, field
import math
import os
from typing import Any

import voluptuous as vol

from .const import (
    CONF_ADAPTATION_FACTOR,
    CONF_ADAPTATION_WINDOW,
    CONF_ALPHA,
    CONF_ALPHAS,
    CONF_CLASSES,
    CONF_CSV,
    CONF_DELTA,
    CONF_DUMP_DIR,
    CONF_EPOCHS,
    CONF_EPSILON,
    CONF_HIDDEN,
    CONF_IMAGES,
    CONF_INDEX,
    CONF_LABELS,
    CONF_MAX_INIT_ATTEMPTS,
    CONF_MAX_STEPS,
    CONF_MODEL,
    CONF_N,
    CONF_OUT,
    CONF_PROBE_INTERVAL,
    CONF_PSI,
    CONF_SAMPLES,
    CONF_SCALE_01,
    CONF_SEED,
    CONF_SUBCOMMAND,
    CONF_SYNTHETIC,
    CONF_THREADS,
    DEFAULT_ADAPTATION_FACTOR,
    DEFAULT_ADAPTATION_WINDOW,
    DEFAULT_ALPHAS,
    DEFAULT_DELTA,
    DEFAULT_EPOCHS,
    DEFAULT_EPSILON,
    DEFAULT_HIDDEN,
    DEFAULT_MAX_INIT_ATTEMPTS,
    DEFAULT_MAX_STEPS,
    DEFAULT_PROBE_INTERVAL,
    DEFAULT_PSI,
    DEFAULT_SAMPLES,
    DEFAULT_SEED,
    DEFAULT_VALIDATION_SAMPLES,
    ENV_THREADS,
    MIN_VALIDATION_SAMPLES,
    SUBCOMMANDS,
)
from .exceptions import DomainError, UsageError

SEED_MAX = 2**64 - 1


def finite_float(value: Any) -> float:
    """Coerce to a finite float."""
    number = float(value)
    if not math.isfinite(number):
        raise vol.Invalid(f"expected a finite number, got {value}")
    return number


ALPHA = vol.All(finite_float, vol.Range(min=0, max=2, min_included=False))
SEED = vol.All(vol.Coerce(int), vol.Range(min=0, max=SEED_MAX))
POSITIVE_INT = vol.All(vol.Coerce(int), vol.Range(min=1))
POSITIVE_FLOAT = vol.All(finite_float, vol.Range(min=0, min_included=False))
OPEN_UNIT_FLOAT = vol.All(
    finite_float,
    vol.Range(min=0, max=1, min_included=False, max_included=False),
)

STABLE_PARAMS_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_ALPHA): ALPHA,
        vol.Required("mu"): finite_float,
        vol.Required("gamma"): POSITIVE_FLOAT,
    }
)

ATTACK_CONFIG_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_ALPHA): ALPHA,
        vol.Optional(CONF_MAX_STEPS, default=DEFAULT_MAX_STEPS): POSITIVE_INT,
        vol.Optional(CONF_PSI, default=DEFAULT_PSI): POSITIVE_FLOAT,
        vol.Optional(CONF_DELTA, default=DEFAULT_DELTA): POSITIVE_FLOAT,
        vol.Optional(CONF_EPSILON, default=DEFAULT_EPSILON): OPEN_UNIT_FLOAT,
        vol.Optional(
            CONF_ADAPTATION_WINDOW, default=DEFAULT_ADAPTATION_WINDOW
        ): POSITIVE_INT,
        vol.Optional(
            CONF_ADAPTATION_FACTOR, default=DEFAULT_ADAPTATION_FACTOR
        ): vol.All(finite_float, vol.Range(min=1, min_included=False)),
        vol.Optional(CONF_PROBE_INTERVAL, default=DEFAULT_PROBE_INTERVAL): POSITIVE_INT,
        vol.Optional(
            CONF_MAX_INIT_ATTEMPTS, default=DEFAULT_MAX_INIT_ATTEMPTS
        ): POSITIVE_INT,
        vol.Optional(CONF_SEED, default=DEFAULT_SEED): SEED,
    }
)

RUN_SPEC_SCHEMA = vol.Schema(
    {
        vol.Required(CONF_SUBCOMMAND): vol.In(SUBCOMMANDS),
        vol.Optional(CONF_ALPHAS, default=list(DEFAULT_ALPHAS)): vol.All(
            [ALPHA], vol.Length(min=1)
        ),
        vol.Optional(CONF_SAMPLES, default=DEFAULT_SAMPLES): POSITIVE_INT,
        vol.Optional(CONF_MAX_STEPS, default=DEFAULT_MAX_STEPS): POSITIVE_INT,
        vol.Optional(CONF_PSI, default=DEFAULT_PSI): POSITIVE_FLOAT,
        vol.Optional(CONF_DELTA, default=DEFAULT_DELTA): POSITIVE_FLOAT,
        vol.Optional(CONF_EPSILON, default=DEFAULT_EPSILON): OPEN_UNIT_FLOAT,
        vol.Optional(CONF_SEED, default=DEFAULT_SEED): SEED,
        vol.Optional(CONF_MODEL): vol.Any(None, str),
        vol.Optional(CONF_IMAGES): vol.Any(None, str),
        vol.Optional(CONF_LABELS): vol.Any(None, str),
        vol.Optional(CONF_SYNTHETIC, default=False): bool,
        vol.Optional(CONF_SCALE_01, default=False): bool,
        vol.Optional(CONF_OUT): vol.Any(None, str),
        vol.Optional(CONF_CSV): vol.Any(None, str),
        vol.Optional(CONF_DUMP_DIR): vol.Any(None, str),
        vol.Optional(CONF_THREADS): vol.Any(None, POSITIVE_INT),
        vol.Optional(CONF_INDEX, default=0): vol.All(vol.Coerce(int), vol.Range(min=0)),
        vol.Optional(CONF_HIDDEN, default=DEFAULT_HIDDEN): vol.All(
            vol.Coerce(int), vol.Range(min=0)
        ),
        vol.Optional(CONF_EPOCHS, default=DEFAULT_EPOCHS): POSITIVE_INT,
        vol.Optional(CONF_CLASSES): vol.Any(
            None,
            vol.All(
                [vol.All(vol.Coerce(int), vol.Range(min=0))], vol.Length(min=2)
            ),
        ),
        vol.Optional(CONF_N, default=DEFAULT_VALIDATION_SAMPLES): vol.All(
            vol.Coerce(int),
            vol.Range(
                min=MIN_VALIDATION_SAMPLES,
                msg=f"at least {MIN_VALIDATION_SAMPLES} samples are required",
            ),
        ),
    },
    extra=vol.REMOVE_EXTRA,
)


def validate(schema: vol.Schema, data: dict[str, Any]) -> dict[str, Any]:
    """Run a schema and raise DomainError on invalid input."""
    try:
        return schema(data)
    except vol.Invalid as err:
        raise DomainError(str(err)) from err


@dataclass(frozen=True)
class RunSpec:
    """A validated command line invocation."""

    subcommand: str
    alphas: list[float] = field(default_factory=lambda: list(DEFAULT_ALPHAS))
    samples: int = DEFAULT_SAMPLES
    max_steps: int = DEFAULT_MAX_STEPS
    psi: float = DEFAULT_PSI
    initial_delta: float = DEFAULT_DELTA
    initial_epsilon: float = DEFAULT_EPSILON
    seed: int = DEFAULT_SEED
    model: str | None = None
    dataset_images: str | None = None
    dataset_labels: str | None = None
    synthetic: bool = False
    scale_01: bool = False
    out: str | None = None
    csv: str | None = None
    dump_dir: str | None = None
    threads: int | None = None
    index: int = 0
    hidden: int = DEFAULT_HIDDEN
    epochs: int = DEFAULT_EPOCHS
    classes: list[int] | None = None
    n: int = DEFAULT_VALIDATION_SAMPLES

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> RunSpec:
        """Build a spec from raw flag values."""
        raw = {key: value for key, value in data.items() if value is not None}
        try:
            return cls(**RUN_SPEC_SCHEMA(raw))
        except vol.Invalid as err:
            raise UsageError(str(err)) from err


def worker_count(threads: int | None = None) -> int:
    """Resolve the sweep worker count: flag, then environment, then CPU count."""
    if threads is not None:
        return max(1, threads)
    if env := os.environ.get(ENV_THREADS):
        try:
            return max(1, int(env))
        except ValueError as err:
            raise UsageError(f"{ENV_THREADS} must be an integer, got {env!r}") from err
    return os.cpu_count() or 1
