"""Command line front end: train oracles, run attacks and sweeps, check the sampler."""
from __future__ import annotations

import argparse
from collections.abc import Callable, Sequence
import logging
from pathlib import Path
import sys
from typing import Any

from .attack import run_attack
from .config import RunSpec, worker_count
from .const import (
    CONF_ALPHAS,
    CONF_CLASSES,
    CONF_DELTA,
    CONF_EPOCHS,
    CONF_EPSILON,
    CONF_HIDDEN,
    CONF_MAX_STEPS,
    CONF_PSI,
    CONF_SAMPLES,
    CONF_SCALE_01,
    CONF_SEED,
    CONF_SYNTHETIC,
    DEFAULT_SEPARATION,
    EXIT_FAILURE,
    EXIT_OK,
    EXIT_USAGE,
    SUBCOMMAND_ATTACK,
    SUBCOMMAND_SWEEP,
    SUBCOMMAND_TRAIN,
    SUBCOMMAND_VALIDATE,
    SYNTHETIC_DATA_SEED,
    SYNTHETIC_DIM,
    SYNTHETIC_NUM_CLASSES,
    SYNTHETIC_POINTS_PER_CLASS,
)
from .data import (
    LabeledDataset,
    load_mnist,
    make_synthetic_blobs,
    sample_indices,
    select_classes,
)
from .exceptions import DomainError, LevyAttackError, ModelFileNotFound, UsageError
from .export import DumpRecord, dump_adversarial
from .metrics import build_report, report_to_csv, report_to_json
from .models import AttackConfig
from .oracle import OracleHandle, load_model, save_model, train_toy_classifier
from .stable import validate_sampler
from .sweep import SweepResults, run_sweep
from .utils import derive_seed, make_rng

_LOGGER = logging.getLogger(__name__)

# settings that change the numbers in a report; output paths and threads do not
REPORT_KEYS = (
    CONF_ALPHAS,
    CONF_SAMPLES,
    CONF_MAX_STEPS,
    CONF_PSI,
    CONF_DELTA,
    CONF_EPSILON,
    CONF_SEED,
    CONF_SYNTHETIC,
    CONF_SCALE_01,
    CONF_CLASSES,
    CONF_HIDDEN,
    CONF_EPOCHS,
)


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--alpha",
        dest="alphas",
        type=float,
        action="append",
        help="characteristic exponent in (0, 2]; repeat for several",
    )
    common.add_argument("--samples", type=int, help="samples attacked per alpha")
    common.add_argument("--max-steps", type=int, help="random walk step limit")
    common.add_argument("--psi", type=float, help="stop once epsilon drops below this")
    common.add_argument("--delta", dest="initial_delta", type=float)
    common.add_argument("--epsilon", dest="initial_epsilon", type=float)
    common.add_argument("--seed", type=int, help="master seed")
    common.add_argument("--model", help="LVYM model file")
    common.add_argument("--dataset-images", help="IDX image file")
    common.add_argument("--dataset-labels", help="IDX label file")
    common.add_argument(
        "--synthetic", action="store_true", default=None, help="use synthetic blobs"
    )
    common.add_argument(
        "--scale-01",
        action="store_true",
        default=None,
        help="scale IDX pixels to [0, 1]",
    )
    common.add_argument(
        "--classes",
        type=int,
        nargs="+",
        help="keep only these IDX classes, relabelled in order",
    )
    common.add_argument("--out", help="report JSON (sweep) or model file (train)")
    common.add_argument("--csv", help="also write the report as CSV")
    common.add_argument("--dump-dir", help="write PGM dumps of adversarial samples")
    common.add_argument("--threads", type=int, help="sweep worker threads")
    common.add_argument("--index", type=int, help="dataset index for attack")
    common.add_argument("--hidden", type=int, help="hidden units, 0 for softmax")
    common.add_argument("--epochs", type=int, help="training epochs")
    common.add_argument("--n", type=int, help="draws per alpha for validate-sampler")
    common.add_argument("-v", "--verbose", action="store_true", help="debug logging")

    parser = argparse.ArgumentParser(
        prog="levy-attack",
        description=(
            "Decision-based adversarial attacks with alpha-stable random walks."
        ),
    )
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name, help_text in (
        (SUBCOMMAND_TRAIN, "train a toy classifier and save it"),
        (SUBCOMMAND_ATTACK, "attack one dataset sample"),
        (SUBCOMMAND_SWEEP, "attack many samples for every alpha and report"),
        (SUBCOMMAND_VALIDATE, "check the alpha-stable sampler"),
    ):
        subparsers.add_parser(name, parents=[common], help=help_text)
    return parser


def _load_dataset(spec: RunSpec) -> LabeledDataset:
    if spec.synthetic:
        return make_synthetic_blobs(
            SYNTHETIC_NUM_CLASSES,
            SYNTHETIC_DIM,
            SYNTHETIC_POINTS_PER_CLASS,
            DEFAULT_SEPARATION,
            make_rng(SYNTHETIC_DATA_SEED),
        )
    if not spec.dataset_images or not spec.dataset_labels:
        raise UsageError(
            "pass --synthetic or both --dataset-images and --dataset-labels"
        )
    dataset = load_mnist(spec.dataset_images, spec.dataset_labels, spec.scale_01)
    if spec.classes:
        dataset = select_classes(dataset, spec.classes)
    _LOGGER.info("Loaded %s samples of dimension %s", len(dataset), dataset.dim)
    return dataset


def _resolve_oracle(spec: RunSpec, dataset: LabeledDataset) -> OracleHandle:
    if spec.model:
        oracle = load_model(spec.model, dataset.bounds)
        if oracle.input_dim != dataset.dim:
            raise UsageError(
                f"model expects {oracle.input_dim} inputs, dataset has {dataset.dim}"
            )
        return oracle

    _LOGGER.info("No --model given, training a toy classifier on the dataset")
    return train_toy_classifier(
        dataset, spec.epochs, make_rng(spec.seed), spec.hidden
    )


def _attack_config(spec: RunSpec, alpha: float, seed: int) -> AttackConfig:
    return AttackConfig(
        alpha=alpha,
        max_steps=spec.max_steps,
        psi=spec.psi,
        initial_delta=spec.initial_delta,
        initial_epsilon=spec.initial_epsilon,
        seed=seed,
    )


def cmd_train(spec: RunSpec) -> int:
    """Fit a toy classifier and save it to --out."""
    if not spec.out:
        raise UsageError("train needs --out for the model file")
    dataset = _load_dataset(spec)
    oracle = train_toy_classifier(
        dataset, spec.epochs, make_rng(spec.seed), spec.hidden
    )
    save_model(oracle.model, spec.out)
    print(
        f"training accuracy {oracle.training_accuracy:.4f}, "
        f"model saved to {spec.out}"
    )
    return EXIT_OK


def cmd_attack(spec: RunSpec) -> int:
    """Attack the sample at --index once per alpha."""
    dataset = _load_dataset(spec)
    if spec.index >= len(dataset):
        raise UsageError(f"--index {spec.index} is outside a dataset of {len(dataset)}")
    oracle = _resolve_oracle(spec, dataset)
    original = dataset.point(spec.index)

    for alpha in spec.alphas:
        result = run_attack(
            oracle.clone(),
            original,
            dataset.label(spec.index),
            _attack_config(spec, alpha, derive_seed(spec.seed, spec.index)),
        )
        print(
            f"alpha={alpha:g} {result.terminated_by.value}: label "
            f"{dataset.label(spec.index)} -> {result.final_label}, "
            f"squared distance {result.final_distance:.6g}, "
            f"{result.steps_taken} steps, {result.queries_used} queries"
        )
        if spec.dump_dir and result.success:
            dump_adversarial(
                spec.dump_dir,
                f"alpha{alpha:g}_sample{spec.index}",
                original,
                result,
                dataset.bounds,
                dataset.shape,
            )
    return EXIT_OK


def cmd_dump_adversarial(
    spec: RunSpec,
    dataset: LabeledDataset,
    indices: Sequence[int],
    results: SweepResults,
) -> list[DumpRecord]:
    """Write PGM dumps for every successful attack of a sweep."""
    records = []
    for alpha, runs in results.items():
        for index, result in zip(indices, runs):
            if result.success:
                records.append(
                    dump_adversarial(
                        spec.dump_dir,
                        f"alpha{alpha:g}_sample{index}",
                        dataset.point(index),
                        result,
                        dataset.bounds,
                        dataset.shape,
                    )
                )
    _LOGGER.info("Wrote %s sample dumps to %s", len(records), spec.dump_dir)
    return records


def cmd_sweep(spec: RunSpec) -> int:
    """Run the alpha sweep and write the report."""
    dataset = _load_dataset(spec)
    oracle = _resolve_oracle(spec, dataset)
    indices = sample_indices(len(dataset), min(spec.samples, len(dataset)), spec.seed)
    workers = worker_count(spec.threads)

    results = run_sweep(
        oracle,
        dataset,
        [int(index) for index in indices],
        spec.alphas,
        _attack_config(spec, spec.alphas[0], spec.seed),
        spec.seed,
        workers,
    )
    report = build_report(
        {key: getattr(spec, key) for key in REPORT_KEYS}, results
    )

    text = report_to_json(report)
    if spec.out:
        Path(spec.out).write_text(text, encoding="utf-8")
        _LOGGER.info("Report written to %s", spec.out)
    else:
        sys.stdout.write(text)
    if spec.csv:
        Path(spec.csv).write_text(report_to_csv(report), encoding="utf-8")
    if spec.dump_dir:
        cmd_dump_adversarial(spec, dataset, [int(index) for index in indices], results)
    return EXIT_OK


def cmd_validate_sampler(spec: RunSpec) -> int:
    """Run the sampler checks; exit 0 only if all pass."""
    checks = validate_sampler(spec.alphas, spec.n, spec.seed)
    for check in checks:
        print(check.describe())
    failed = [check for check in checks if not check.passed]
    if failed:
        _LOGGER.error("%s of %s sampler checks failed", len(failed), len(checks))
        return EXIT_FAILURE
    return EXIT_OK


COMMANDS: dict[str, Callable[[RunSpec], int]] = {
    SUBCOMMAND_TRAIN: cmd_train,
    SUBCOMMAND_ATTACK: cmd_attack,
    SUBCOMMAND_SWEEP: cmd_sweep,
    SUBCOMMAND_VALIDATE: cmd_validate_sampler,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point; returns the process exit code."""
    args = build_parser().parse_args(argv)
    options: dict[str, Any] = vars(args)
    logging.basicConfig(
        level=logging.DEBUG if options.pop("verbose") else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )

    try:
        spec = RunSpec.from_dict(options)
        return COMMANDS[spec.subcommand](spec)
    except (UsageError, DomainError, ModelFileNotFound, FileNotFoundError) as err:
        _LOGGER.error("%s", err)
        return EXIT_USAGE
    except LevyAttackError as err:
        _LOGGER.error("%s", err)
        return EXIT_FAILURE
    except OSError as err:
        _LOGGER.error("%s", err)
        return EXIT_FAILURE
