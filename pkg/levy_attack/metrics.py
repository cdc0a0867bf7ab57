"""Perturbation quality scores and sweep reports."""
from __future__ import annotations

from collections.abc import Mapping, Sequence
import csv
from dataclasses import asdict, dataclass, field
import io
import json
import logging
import math
from typing import Any

import numpy as np

from .const import SPARSITY_RELATIVE_THRESHOLD
from .exceptions import DomainError
from .models import AttackResult, DataPoint, TerminationReason

_LOGGER = logging.getLogger(__name__)

NORMS: dict[str, float] = {"linf": math.inf, "l1": 1.0, "l2": 2.0}

CSV_FIELDS = [
    "alpha",
    "n_success",
    "n_fail",
    "n_skipped",
    *(f"{name}_{stat}" for name in NORMS for stat in ("mean", "median")),
    "mean_iterations",
    "mean_queries",
    "mean_sparsity",
]


def lp_norm(tau: DataPoint, p: float) -> float:
    """L1, L2 or L-infinity norm of a perturbation."""
    if p not in (1, 2, math.inf):
        raise DomainError(f"unsupported norm order {p}")
    values = np.asarray(tau, dtype=np.float64)
    if not np.all(np.isfinite(values)):
        raise DomainError("perturbation must be finite")
    peak = float(np.max(np.abs(values), initial=0.0))
    if peak == 0:
        return 0.0
    if p == 2:
        # scaled by the peak so tiny or huge coordinates cannot underflow or overflow
        return peak * float(np.linalg.norm(values / peak))
    return float(np.linalg.norm(values, ord=p))


def aggregate(norms: Sequence[float]) -> tuple[float, float]:
    """Mean and median; even counts take the lower-middle element."""
    if not norms:
        raise DomainError("cannot aggregate an empty list")
    ordered = sorted(float(value) for value in norms)
    return math.fsum(ordered) / len(ordered), ordered[(len(ordered) - 1) // 2]


def perturbation_sparsity(tau: DataPoint) -> float:
    """Share of coordinates above 1% of the largest magnitude; lower is sparser."""
    magnitudes = np.abs(np.asarray(tau, dtype=np.float64))
    peak = float(magnitudes.max(initial=0.0))
    if peak == 0:
        raise DomainError("sparsity of a zero perturbation is undefined")
    dense = np.count_nonzero(magnitudes > SPARSITY_RELATIVE_THRESHOLD * peak)
    return float(dense) / magnitudes.size


@dataclass(frozen=True)
class NormSummary:
    """Mean and median of one norm over the successful attacks."""

    mean: float
    median: float


@dataclass(frozen=True)
class NormTable:
    """Aggregated scores for one alpha."""

    alpha: float
    norms: dict[str, NormSummary | None]
    mean_iterations: float | None
    mean_queries: float | None
    mean_sparsity: float | None
    n_success: int
    n_fail: int
    n_skipped: int = 0

    @classmethod
    def from_results(cls, alpha: float, results: Sequence[AttackResult]) -> NormTable:
        """Aggregate attack results; only successful ones enter the scores."""
        successes = [result for result in results if result.success]
        n_fail = sum(
            result.terminated_by is TerminationReason.INIT_FAILED for result in results
        )
        n_skipped = sum(
            result.terminated_by is TerminationReason.ORIGINAL_MISCLASSIFIED
            for result in results
        )

        norms: dict[str, NormSummary | None] = {}
        for name, order in NORMS.items():
            values = [lp_norm(result.perturbation, order) for result in successes]
            norms[name] = NormSummary(*aggregate(values)) if values else None

        sparsities = [
            perturbation_sparsity(result.perturbation)
            for result in successes
            if np.any(result.perturbation)
        ]
        return cls(
            alpha=float(alpha),
            norms=norms,
            mean_iterations=_mean([result.steps_taken for result in successes]),
            mean_queries=_mean([result.queries_used for result in successes]),
            mean_sparsity=_mean(sparsities),
            n_success=len(successes),
            n_fail=n_fail,
            n_skipped=n_skipped,
        )

    def as_row(self) -> dict[str, Any]:
        """Flatten into one CSV row."""
        row: dict[str, Any] = {
            "alpha": self.alpha,
            "n_success": self.n_success,
            "n_fail": self.n_fail,
            "n_skipped": self.n_skipped,
            "mean_iterations": self.mean_iterations,
            "mean_queries": self.mean_queries,
            "mean_sparsity": self.mean_sparsity,
        }
        for name, summary in self.norms.items():
            row[f"{name}_mean"] = None if summary is None else summary.mean
            row[f"{name}_median"] = None if summary is None else summary.median
        return row


def _mean(values: Sequence[float]) -> float | None:
    if not values:
        return None
    return math.fsum(values) / len(values)


@dataclass(frozen=True)
class Report:
    """A sweep report: the run configuration and one table per alpha."""

    config: dict[str, Any]
    per_alpha: list[NormTable] = field(default_factory=list)


def build_report(
    config: Mapping[str, Any], results: Mapping[float, Sequence[AttackResult]]
) -> Report:
    """Assemble a report from results grouped by alpha, in the given alpha order."""
    tables = [NormTable.from_results(alpha, runs) for alpha, runs in results.items()]
    for table in tables:
        _LOGGER.debug(
            "alpha=%s: %s succeeded, %s failed, %s skipped",
            table.alpha,
            table.n_success,
            table.n_fail,
            table.n_skipped,
        )
    return Report(config=dict(config), per_alpha=tables)


def report_to_json(report: Report) -> str:
    """Serialize a report; equal reports give identical bytes."""
    return json.dumps(asdict(report), indent=2, sort_keys=True) + "\n"


def report_to_csv(report: Report) -> str:
    """Flatten a report into CSV, one row per alpha."""
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for table in report.per_alpha:
        writer.writerow(
            {
                key: "" if value is None else value
                for key, value in table.as_row().items()
            }
        )
    return buffer.getvalue()
