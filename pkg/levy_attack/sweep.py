"""Run attacks for many samples and alpha values in parallel."""
from __future__ import annotations

import asyncio
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
import logging

from .attack import run_attack
from .data import LabeledDataset
from .exceptions import DomainError
from .models import AttackConfig, AttackResult
from .oracle import OracleHandle
from .utils import derive_seed

_LOGGER = logging.getLogger(__name__)

SweepResults = dict[float, list[AttackResult]]


def _attack_sample(
    oracle: OracleHandle,
    dataset: LabeledDataset,
    index: int,
    config: AttackConfig,
) -> AttackResult:
    result = run_attack(
        oracle.clone(), dataset.point(index), dataset.label(index), config
    )
    _LOGGER.debug(
        "Sample %s at alpha=%s: %s after %s steps",
        index,
        config.alpha,
        result.terminated_by.value,
        result.steps_taken,
    )
    return result


async def async_run_sweep(
    oracle: OracleHandle,
    dataset: LabeledDataset,
    indices: Sequence[int],
    alphas: Sequence[float],
    base_config: AttackConfig,
    master_seed: int,
    workers: int = 1,
) -> SweepResults:
    """Attack every sample at every alpha on a pool of worker threads.

    Each task owns an oracle clone and a seed derived from the master seed and
    the sample index, so the results do not depend on scheduling.
    """
    if not alphas:
        raise DomainError("at least one alpha is required")
    if workers < 1:
        raise DomainError(f"workers must be positive, got {workers}")

    loop = asyncio.get_running_loop()
    with ThreadPoolExecutor(max_workers=workers) as executor:
        results: SweepResults = {}
        for alpha in alphas:
            _LOGGER.info(
                "Attacking %s samples at alpha=%s on %s workers",
                len(indices),
                alpha,
                workers,
            )
            results[float(alpha)] = list(
                await asyncio.gather(
                    *(
                        loop.run_in_executor(
                            executor,
                            _attack_sample,
                            oracle,
                            dataset,
                            index,
                            base_config.with_changes(
                                alpha=float(alpha),
                                seed=derive_seed(master_seed, int(index)),
                            ),
                        )
                        for index in indices
                    )
                )
            )
    return results


def run_sweep(
    oracle: OracleHandle,
    dataset: LabeledDataset,
    indices: Sequence[int],
    alphas: Sequence[float],
    base_config: AttackConfig,
    master_seed: int,
    workers: int = 1,
) -> SweepResults:
    """Blocking wrapper around `async_run_sweep`."""
    return asyncio.run(
        async_run_sweep(
            oracle, dataset, indices, alphas, base_config, master_seed, workers
        )
    )
