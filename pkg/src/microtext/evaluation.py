"""Total-accuracy metric and the experiment-grid runner.

A prediction is correct when it matches any gold hashtag of the tweet.
``run_grid`` sweeps (model x weighting x n-gram spec x normalizer)
cells, records one report row per cell (failures get a status instead of
aborting the sweep) and emits four CSVs: the full grid, a best-group
summary per (model, weighting, normalizer), and per-N series for the
individual ``(N,N)`` and combined ``(1,N)`` sweeps.
"""

from __future__ import annotations

import csv
import logging
import time
from collections.abc import Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import LabeledExample
from .features import (
    NGramSpec,
    SparseVector,
    apply_tfidf,
    build_vocabulary,
    fit_idf,
    vectorize_fc,
    vectorize_fc_hashed,
)
from .models import (
    TrainSettings,
    linear_predict_many,
    lr_fit,
    mnb_fit,
    mnb_predict_many,
    svm_fit,
)
from .normalize import NORMALIZER_MODES, normalize_text

__all__ = [
    "ExperimentConfig",
    "GRID_COLUMNS",
    "ReportRow",
    "accuracy",
    "run_experiment",
    "run_grid",
    "summarize",
    "write_grid_csv",
    "write_series_csvs",
    "write_summary_csv",
]

log = logging.getLogger(__name__)

MODEL_KINDS = ("mnb", "svm", "lr")
WEIGHTINGS = ("fc", "tfidf")


def accuracy(predictions: Sequence[int], gold: Sequence[frozenset[int] | set[int]]) -> float:
    """Fraction of predictions contained in their example's gold set."""
    if len(predictions) != len(gold) or not predictions:
        raise ValueError("predictions and gold must be nonempty and parallel")
    if any(not g for g in gold):
        raise ValueError("gold sets must be nonempty")
    hits = sum(1 for p, g in zip(predictions, gold) if p in g)
    return hits / len(predictions)


@dataclass(frozen=True)
class ExperimentConfig:
    """One grid cell: learner, weighting, n-gram group and normalizer."""

    model: str
    weighting: str
    spec: NGramSpec
    normalizer: str = "none"
    train_settings: TrainSettings = TrainSettings()
    min_df: int = 1
    hash_dim: int | None = None

    def __post_init__(self) -> None:
        if self.model not in MODEL_KINDS:
            raise ValueError(f"model must be one of {MODEL_KINDS}, got {self.model!r}")
        if self.weighting not in WEIGHTINGS:
            raise ValueError(
                f"weighting must be one of {WEIGHTINGS}, got {self.weighting!r}"
            )
        if self.normalizer not in NORMALIZER_MODES:
            raise ValueError(
                f"normalizer must be one of {NORMALIZER_MODES}, got {self.normalizer!r}"
            )
        if self.min_df < 1:
            raise ValueError("min_df must be >= 1")


@dataclass(frozen=True)
class ReportRow:
    """Measured outcome of one grid cell."""

    config: ExperimentConfig
    accuracy: float
    n_train: int
    n_test: int
    vocab_size: int
    wall_time: float
    status: str = "ok"

    def __post_init__(self) -> None:
        if self.status == "ok" and not 0.0 <= self.accuracy <= 1.0:
            raise ValueError("accuracy must lie in [0, 1]")


def _class_mapping(train: Sequence[LabeledExample]) -> dict[str, int]:
    # class ids are lexicographic over the train labels actually present,
    # so id assignment never depends on example order
    return {label: i for i, label in enumerate(sorted({ex.train_label for ex in train}))}


def run_experiment(
    config: ExperimentConfig,
    train: Sequence[LabeledExample],
    test: Sequence[LabeledExample],
) -> ReportRow:
    """Run one cell: normalize, build features on train only, fit, score.

    Test-only terms never enter the vocabulary, and idf is fitted on the
    training split alone.  An empty vocabulary degrades to prior-only
    predictions with ``status="empty_vocab"``.  Test examples whose gold
    set contains no trainable label count as incorrect (they map to a
    sentinel id no model can emit).
    """
    if not train or not test:
        raise ValueError("train and test must both be nonempty")
    started = time.perf_counter()
    if config.normalizer != "none" and config.spec.level == "char":
        log.warning(
            "normalizer=%s with char-level n-grams is unusual", config.normalizer
        )

    train_texts = [normalize_text(ex.text, config.normalizer) for ex in train]
    test_texts = [normalize_text(ex.text, config.normalizer) for ex in test]
    label_to_id = _class_mapping(train)
    y_train = [label_to_id[ex.train_label] for ex in train]
    gold_sets = [
        frozenset(label_to_id.get(g, -1) for g in ex.gold_labels) for ex in test
    ]

    if config.hash_dim is not None:
        n_features = config.hash_dim
        train_fc = [
            vectorize_fc_hashed(t, config.spec, config.hash_dim) for t in train_texts
        ]
        test_fc = [
            vectorize_fc_hashed(t, config.spec, config.hash_dim) for t in test_texts
        ]
    else:
        vocab = build_vocabulary(train_texts, config.spec, config.min_df)
        n_features = len(vocab)
        train_fc = [vectorize_fc(t, vocab) for t in train_texts]
        test_fc = [vectorize_fc(t, vocab) for t in test_texts]

    status = "ok"
    if n_features == 0:
        counts = np.bincount(y_train, minlength=len(label_to_id))
        prior_class = int(np.argmax(counts))
        predictions = np.full(len(test), prior_class)
        status = "empty_vocab"
    else:
        if config.weighting == "tfidf":
            idf = fit_idf(train_fc, n_features=n_features)
            X_train = [apply_tfidf(v, idf) for v in train_fc]
            X_test = [apply_tfidf(v, idf) for v in test_fc]
        else:
            X_train, X_test = train_fc, test_fc
        if config.model == "mnb":
            model = mnb_fit(
                X_train, y_train, config.train_settings.alpha, n_features=n_features
            )
            predictions = mnb_predict_many(model, X_test)
        elif config.model == "svm":
            model = svm_fit(X_train, y_train, config.train_settings, n_features)
            predictions = linear_predict_many(model, X_test)
        else:
            model = lr_fit(X_train, y_train, config.train_settings, n_features)
            predictions = linear_predict_many(model, X_test)

    score = accuracy([int(p) for p in predictions], gold_sets)
    return ReportRow(
        config=config,
        accuracy=score,
        n_train=len(train),
        n_test=len(test),
        vocab_size=n_features,
        wall_time=time.perf_counter() - started,
        status=status,
    )


_WORKER_DATA: tuple[Sequence[LabeledExample], Sequence[LabeledExample]] | None = None


def _init_worker(train: Sequence[LabeledExample], test: Sequence[LabeledExample]) -> None:
    global _WORKER_DATA
    _WORKER_DATA = (train, test)


def _run_cell(config: ExperimentConfig) -> ReportRow:
    assert _WORKER_DATA is not None
    return _safe_run(config, *_WORKER_DATA)


def _safe_run(
    config: ExperimentConfig,
    train: Sequence[LabeledExample],
    test: Sequence[LabeledExample],
) -> ReportRow:
    try:
        return run_experiment(config, train, test)
    except Exception as exc:  # noqa: BLE001 - a failed cell must not kill the sweep
        log.error("grid cell %s failed: %s", describe_config(config), exc)
        return ReportRow(
            config=config,
            accuracy=float("nan"),
            n_train=len(train),
            n_test=len(test),
            vocab_size=0,
            wall_time=0.0,
            status=f"error:{type(exc).__name__}",
        )


def run_grid(
    configs: Sequence[ExperimentConfig],
    train: Sequence[LabeledExample],
    test: Sequence[LabeledExample],
    jobs: int = 1,
) -> list[ReportRow]:
    """Run every cell, serially or with a bounded worker pool.

    Row order always matches config order; individual failures are
    recorded in the row's status and do not stop the sweep.
    """
    if not configs:
        raise ValueError("config list must be nonempty")
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    if jobs == 1:
        return [_safe_run(config, train, test) for config in configs]
    with ProcessPoolExecutor(
        max_workers=jobs, initializer=_init_worker, initargs=(train, test)
    ) as pool:
        return list(pool.map(_run_cell, configs))


def describe_config(config: ExperimentConfig) -> str:
    parts = [config.model, config.weighting, str(config.spec)]
    if config.normalizer != "none":
        parts.append(config.normalizer)
    return "-".join(parts)


def summarize(rows: Sequence[ReportRow]) -> list[dict[str, object]]:
    """Best n-gram group per (model, weighting, normalizer), ties to the
    earliest row."""
    best: dict[tuple[str, str, str], ReportRow] = {}
    for row in rows:
        if row.status not in ("ok", "empty_vocab"):
            continue
        key = (row.config.model, row.config.weighting, row.config.normalizer)
        current = best.get(key)
        if current is None or row.accuracy > current.accuracy:
            best[key] = row
    return [
        {
            "model": key[0],
            "weighting": key[1],
            "normalizer": key[2],
            "ngram": str(row.config.spec),
            "accuracy": row.accuracy,
        }
        for key, row in sorted(best.items())
    ]


GRID_COLUMNS = (
    "model",
    "weighting",
    "ngram",
    "level",
    "lo",
    "hi",
    "normalizer",
    "min_df",
    "hash_dim",
    "seed",
    "status",
    "accuracy",
    "n_train",
    "n_test",
    "vocab_size",
    "wall_time_s",
)


def _format_float(value: float) -> str:
    return "" if np.isnan(value) else repr(value)


def write_grid_csv(rows: Sequence[ReportRow], path: str | Path) -> None:
    """One row per cell with the fixed :data:`GRID_COLUMNS` layout."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(GRID_COLUMNS)
        for row in rows:
            config = row.config
            writer.writerow(
                [
                    config.model,
                    config.weighting,
                    str(config.spec),
                    config.spec.level,
                    config.spec.lo,
                    config.spec.hi,
                    config.normalizer,
                    config.min_df,
                    config.hash_dim if config.hash_dim is not None else "",
                    config.train_settings.seed,
                    row.status,
                    _format_float(row.accuracy),
                    row.n_train,
                    row.n_test,
                    row.vocab_size,
                    repr(row.wall_time),
                ]
            )


def write_summary_csv(rows: Sequence[ReportRow], path: str | Path) -> None:
    """Best-group table: model, weighting, normalizer, ngram, accuracy."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["model", "weighting", "normalizer", "ngram", "accuracy"])
        for entry in summarize(rows):
            writer.writerow(
                [
                    entry["model"],
                    entry["weighting"],
                    entry["normalizer"],
                    entry["ngram"],
                    repr(entry["accuracy"]),
                ]
            )


def write_series_csvs(
    rows: Sequence[ReportRow], individual_path: str | Path, combined_path: str | Path
) -> None:
    """Per-N accuracy series: (N,N) rows and (1,N) rows respectively."""
    header = ["model", "weighting", "normalizer", "level", "n", "accuracy"]

    def emit(path: str | Path, selector, n_of) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(header)
            for row in rows:
                spec = row.config.spec
                if row.status not in ("ok", "empty_vocab") or not selector(spec):
                    continue
                writer.writerow(
                    [
                        row.config.model,
                        row.config.weighting,
                        row.config.normalizer,
                        spec.level,
                        n_of(spec),
                        _format_float(row.accuracy),
                    ]
                )

    emit(individual_path, lambda s: s.is_individual, lambda s: s.hi)
    emit(combined_path, lambda s: s.is_combined, lambda s: s.hi)
