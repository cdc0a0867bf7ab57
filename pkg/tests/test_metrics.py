"""Tests for norms, aggregation, sparsity and reports."""
from __future__ import annotations

import json
import math

from hypothesis import given, strategies as st
import numpy as np
import pytest

from levy_attack.exceptions import DomainError
from levy_attack.metrics import (
    CSV_FIELDS,
    NormTable,
    aggregate,
    build_report,
    lp_norm,
    perturbation_sparsity,
    report_to_csv,
    report_to_json,
)
from levy_attack.models import AttackResult, StableParams, TerminationReason
from levy_attack.stable import sample_vector


def _result(
    perturbation: list[float],
    terminated_by: TerminationReason = TerminationReason.MAX_STEPS,
    steps: int = 100,
) -> AttackResult:
    tau = np.array(perturbation)
    return AttackResult(
        adversarial=tau.copy(),
        perturbation=tau,
        final_label=1,
        steps_taken=steps,
        queries_used=steps + 3,
        terminated_by=terminated_by,
    )


def test_lp_norm_example() -> None:
    """(3, -4) has L1 7, L2 5 and L-infinity 4."""
    tau = np.array([3.0, -4.0])
    assert lp_norm(tau, 1) == 7.0
    assert lp_norm(tau, 2) == 5.0
    assert lp_norm(tau, math.inf) == 4.0


def test_lp_norm_zero() -> None:
    """The zero vector has zero norm."""
    assert all(lp_norm(np.zeros(5), p) == 0.0 for p in (1, 2, math.inf))


def test_lp_norm_rejects_other_orders() -> None:
    """Only 1, 2 and infinity are supported."""
    with pytest.raises(DomainError):
        lp_norm(np.ones(3), 3)


@given(
    st.lists(
        st.floats(min_value=-1e6, max_value=1e6, allow_nan=False),
        min_size=1,
        max_size=64,
    )
)
def test_norm_ordering(values: list[float]) -> None:
    """L-infinity <= L2 <= L1 on every vector."""
    tau = np.array(values)
    linf, l2, l1 = (lp_norm(tau, p) for p in (math.inf, 2, 1))
    assert linf <= l2 * (1 + 1e-12)
    assert l2 <= l1 * (1 + 1e-12)


def test_aggregate_examples() -> None:
    """Even counts take the lower-middle element."""
    assert aggregate([4.0, 1.0, 3.0, 2.0]) == (2.5, 2.0)
    assert aggregate([5.0]) == (5.0, 5.0)
    with pytest.raises(DomainError):
        aggregate([])


def test_aggregate_uniform_mean() -> None:
    """The mean of uniform draws sits near 0.5."""
    mean, _ = aggregate(np.random.default_rng(0).random(10_000).tolist())
    assert abs(mean - 0.5) < 3 * math.sqrt(1 / 12 / 10_000)


def test_sparsity_examples() -> None:
    """One nonzero coordinate is maximally sparse, equal ones are dense."""
    tau = np.zeros(10)
    tau[3] = -2.0
    assert perturbation_sparsity(tau) == pytest.approx(0.1)
    assert perturbation_sparsity(np.full(10, 0.3)) == 1.0
    with pytest.raises(DomainError):
        perturbation_sparsity(np.zeros(4))


def test_heavy_tails_are_sparser() -> None:
    """alpha = 0.5 noise is sparser than Gaussian noise on average."""
    rng_a, rng_b = np.random.default_rng(1), np.random.default_rng(1)
    heavy = np.mean(
        [
            perturbation_sparsity(sample_vector(StableParams(0.5), 784, rng_a))
            for _ in range(100)
        ]
    )
    gaussian = np.mean(
        [
            perturbation_sparsity(sample_vector(StableParams(2.0), 784, rng_b))
            for _ in range(100)
        ]
    )
    assert heavy < gaussian


def test_norm_table_excludes_failures() -> None:
    """Only successful attacks enter the scores."""
    results = [
        _result([3.0, -4.0], steps=10),
        _result([1.0, 0.0], TerminationReason.EPSILON_BELOW_PSI, steps=30),
        _result([0.0, 0.0], TerminationReason.INIT_FAILED, steps=0),
        _result([0.0, 0.0], TerminationReason.ORIGINAL_MISCLASSIFIED, steps=0),
    ]
    table = NormTable.from_results(2.0, results)
    assert (table.n_success, table.n_fail, table.n_skipped) == (2, 1, 1)
    assert table.norms["l1"].mean == 4.0
    assert table.norms["l1"].median == 1.0
    assert table.norms["linf"].mean == 2.5
    assert table.mean_iterations == 20.0
    assert table.mean_queries == 23.0


def test_norm_table_without_successes() -> None:
    """Scores are empty when every attack failed."""
    table = NormTable.from_results(
        1.0, [_result([0.0], TerminationReason.INIT_FAILED, steps=0)]
    )
    assert table.norms == {"linf": None, "l1": None, "l2": None}
    assert table.mean_iterations is None


def test_report_json_schema_and_determinism() -> None:
    """The JSON report has stable fields and bytes."""
    results = {2.0: [_result([3.0, -4.0])], 0.5: [_result([0.0, 1.0])]}
    config = {"alphas": [2.0, 0.5], "seed": 7}
    text = report_to_json(build_report(config, results))
    assert text == report_to_json(build_report(config, results))

    data = json.loads(text)
    assert data["config"] == config
    assert [row["alpha"] for row in data["per_alpha"]] == [2.0, 0.5]
    row = data["per_alpha"][0]
    assert set(row["norms"]) == {"linf", "l1", "l2"}
    assert row["norms"]["l2"] == {"mean": 5.0, "median": 5.0}
    assert {"mean_iterations", "n_success", "n_fail"} <= set(row)


def test_report_csv() -> None:
    """One CSV row per alpha, missing scores left empty."""
    results = {
        2.0: [_result([3.0, -4.0])],
        0.5: [_result([0.0], TerminationReason.INIT_FAILED, steps=0)],
    }
    lines = report_to_csv(build_report({}, results)).splitlines()
    assert lines[0].split(",") == CSV_FIELDS
    assert lines[1].startswith("2.0,1,0,0,4.0,4.0,7.0,7.0,5.0,5.0")
    assert lines[2].startswith("0.5,0,1,0,,")
