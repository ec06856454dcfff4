"""Tweet ingestion, label selection, gold/train labeling and splitting.

File-based ingestion stands in for live collection: JSONL records with
``id``/``text``/``hashtags`` fields, or headerless TSV with
``id<TAB>text<TAB>comma-separated-hashtags``.  All downstream choices are
deterministic: top-k label selection breaks count ties lexicographically,
the train label is the most frequent in-vocabulary hashtag, and the
train/test split is a Fisher-Yates shuffle driven by a seeded PCG64
generator.
"""

from __future__ import annotations

import csv
import json
import logging
from collections import Counter
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "LabelIndex",
    "LabeledExample",
    "SplitSpec",
    "Tweet",
    "ingest",
    "label_examples",
    "read_examples_jsonl",
    "select_labels",
    "shuffled_order",
    "split",
    "split_sizes",
    "write_examples_jsonl",
]

log = logging.getLogger(__name__)

INGEST_FORMATS = ("jsonl", "tsv")


@dataclass(frozen=True)
class Tweet:
    """One raw record: opaque id, original text, lowercase hashtag set."""

    id: str
    text: str
    hashtags: frozenset[str]

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("tweet id must be nonempty")
        for tag in self.hashtags:
            if not tag or "#" in tag or any(c.isspace() for c in tag):
                raise ValueError(f"invalid hashtag {tag!r} on tweet {self.id}")


@dataclass(frozen=True)
class LabeledExample:
    """Cleaned text with its gold hashtag set and single training label."""

    text: str
    gold_labels: frozenset[str]
    train_label: str

    def __post_init__(self) -> None:
        if not self.gold_labels:
            raise ValueError("gold_labels must be nonempty")
        if self.train_label not in self.gold_labels:
            raise ValueError("train_label must be one of the gold labels")


@dataclass(frozen=True)
class SplitSpec:
    """Train fraction plus the 64-bit seed that drives the shuffle."""

    train_fraction: float = 0.7
    seed: int = 0

    def __post_init__(self) -> None:
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must be in (0, 1)")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass(frozen=True)
class LabelIndex:
    """Selected labels ordered by descending count, ties lexicographic."""

    labels: tuple[str, ...]
    counts: tuple[int, ...]
    rank: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.labels) != len(set(self.labels)):
            raise ValueError("labels must be unique")
        if len(self.labels) != len(self.counts):
            raise ValueError("labels and counts must be parallel")
        for i in range(len(self.labels) - 1):
            ca, cb = self.counts[i], self.counts[i + 1]
            if ca < cb or (ca == cb and self.labels[i] > self.labels[i + 1]):
                raise ValueError("labels must be ordered by count desc, then name")
        object.__setattr__(self, "rank", {l: i for i, l in enumerate(self.labels)})

    def __len__(self) -> int:
        return len(self.labels)

    def __contains__(self, label: str) -> bool:
        return label in self.rank

    def count(self, label: str) -> int:
        return self.counts[self.rank[label]]

    def save_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["label", "count"])
            for label, count in zip(self.labels, self.counts):
                writer.writerow([label, count])

    @classmethod
    def load_csv(cls, path: str | Path) -> "LabelIndex":
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header != ["label", "count"]:
                raise ValueError(f"{path}: expected 'label,count' header")
            rows = [(row[0], int(row[1])) for row in reader if row]
        return cls(tuple(r[0] for r in rows), tuple(r[1] for r in rows))


def _parse_jsonl_record(line: str) -> Tweet | None:
    record = json.loads(line)
    tweet_id = record["id"]
    text = record["text"]
    tags = record["hashtags"]
    if not isinstance(tweet_id, str) or not isinstance(text, str):
        raise ValueError("id and text must be strings")
    if not isinstance(tags, list) or not all(isinstance(t, str) for t in tags):
        raise ValueError("hashtags must be a list of strings")
    hashtags = frozenset(t.lower() for t in tags)
    if not hashtags:
        return None
    return Tweet(tweet_id, text, hashtags)


def _parse_tsv_record(line: str) -> Tweet | None:
    parts = line.split("\t")
    if len(parts) != 3:
        raise ValueError("expected id<TAB>text<TAB>hashtags")
    tweet_id, text, tag_field = parts
    hashtags = frozenset(t.lower() for t in tag_field.split(",") if t)
    if not hashtags:
        return None
    return Tweet(tweet_id, text, hashtags)


def ingest(path: str | Path, format: str = "jsonl") -> Iterator[Tweet]:
    """Stream tweets from a file, dropping unlabeled and duplicate records.

    Records with zero hashtags are skipped silently; records whose
    trimmed text was already seen are skipped (first occurrence wins).
    Malformed lines are logged with their line number and skipped; an
    unreadable file raises.
    """
    if format not in INGEST_FORMATS:
        raise ValueError(f"format must be one of {INGEST_FORMATS}, got {format!r}")
    parse = _parse_jsonl_record if format == "jsonl" else _parse_tsv_record
    seen: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            try:
                tweet = parse(line)
            except (ValueError, KeyError, json.JSONDecodeError) as exc:
                log.warning("%s:%d: skipping malformed record: %s", path, lineno, exc)
                continue
            if tweet is None:
                continue
            key = tweet.text.strip()
            if key in seen:
                continue
            seen.add(key)
            yield tweet


def select_labels(tweets: Iterable[Tweet], k: int = 50) -> LabelIndex:
    """Pick the k most frequent hashtags as the label set.

    Counts are per-tweet (a tweet contributes once per distinct hashtag).
    Ties break lexicographically; fewer than k distinct hashtags yields
    them all with a warning.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    counts: Counter[str] = Counter()
    for tweet in tweets:
        counts.update(tweet.hashtags)
    if not counts:
        raise ValueError("no hashtags found in input")
    if len(counts) < k:
        log.warning("only %d distinct hashtags available, requested %d", len(counts), k)
    ordered = sorted(counts.items(), key=lambda item: (-item[1], item[0]))[:k]
    return LabelIndex(tuple(l for l, _ in ordered), tuple(c for _, c in ordered))


def label_examples(
    tweets: Iterable[Tweet], index: LabelIndex
) -> Iterator[tuple[Tweet, frozenset[str], str]]:
    """Attach gold labels and a training label to each matching tweet.

    Tweets without any in-vocabulary hashtag are dropped.  The training
    label is the gold hashtag with the highest global count (ties were
    already broken lexicographically when the index was built).
    """
    if len(index) == 0:
        raise ValueError("label index is empty")
    for tweet in tweets:
        gold = frozenset(t for t in tweet.hashtags if t in index)
        if not gold:
            continue
        train_label = min(gold, key=lambda l: index.rank[l])
        yield tweet, gold, train_label


def shuffled_order(n: int, seed: int) -> np.ndarray:
    """Fisher-Yates permutation of ``range(n)`` driven by PCG64(seed).

    The draws ``j_i ~ uniform[0, i]`` for ``i = n-1 .. 1`` are taken in a
    single vectorized call, then applied by descending swap; identical
    seeds yield identical permutations on any platform.
    """
    order = np.arange(n, dtype=np.int64)
    if n < 2:
        return order
    rng = np.random.Generator(np.random.PCG64(seed))
    draws = rng.integers(0, np.arange(n, 1, -1, dtype=np.int64))
    for i, j in zip(range(n - 1, 0, -1), draws):
        order[i], order[j] = order[j], order[i]
    return order


def split_sizes(n: int, train_fraction: float) -> tuple[int, int]:
    """Exact side sizes: ``round(train_fraction * n)`` train, rest test."""
    n_train = round(train_fraction * n)
    return n_train, n - n_train


def split(
    examples: list[LabeledExample], spec: SplitSpec
) -> tuple[list[LabeledExample], list[LabeledExample]]:
    """Deterministically shuffle and split into train/test.

    ``len(train) == round(train_fraction * n)`` exactly; the two sides
    partition the input.
    """
    n = len(examples)
    if n < 2:
        raise ValueError("need at least 2 examples to form both split sides")
    order = shuffled_order(n, spec.seed)
    n_train, _ = split_sizes(n, spec.train_fraction)
    train = [examples[i] for i in order[:n_train]]
    test = [examples[i] for i in order[n_train:]]
    return train, test


def write_examples_jsonl(path: str | Path, examples: Iterable[LabeledExample]) -> None:
    """Persist labeled examples, one JSON object per line (sorted keys)."""
    with open(path, "w", encoding="utf-8") as handle:
        for ex in examples:
            record = {
                "text": ex.text,
                "gold_labels": sorted(ex.gold_labels),
                "train_label": ex.train_label,
            }
            handle.write(json.dumps(record, sort_keys=True) + "\n")


def read_examples_jsonl(path: str | Path) -> list[LabeledExample]:
    """Load labeled examples written by :func:`write_examples_jsonl`."""
    examples = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            record = json.loads(line)
            examples.append(
                LabeledExample(
                    text=record["text"],
                    gold_labels=frozenset(record["gold_labels"]),
                    train_label=record["train_label"],
                )
            )
    return examples
