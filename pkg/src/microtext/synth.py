"""Seeded synthetic tweet corpus for end-to-end grid tests.

Each class owns a handful of topic word roots; documents sample those
roots plus shared filler words, then mangle most topic words with random
inflections and misspellings.  Word identity fragments into many rare
variants while the root substring survives, so character n-gram features
generalize where word unigrams cannot.  The generator is pure given its
seed.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

__all__ = ["CLASS_ROOTS", "FILLERS", "make_synthetic_tweets", "write_tweets_jsonl"]

CLASS_ROOTS: dict[str, tuple[str, ...]] = {
    "gadgets": ("phone", "screen", "battery", "charger", "gadget", "device"),
    "kitchen": ("recipe", "dinner", "flavor", "cooking", "kitchen", "butter"),
    "travel": ("airport", "flight", "voyage", "suitcase", "travel", "country"),
    "fitness": ("workout", "muscle", "running", "fitness", "stamina", "pushup"),
    "finance": ("market", "invest", "budget", "saving", "profit", "trading"),
}

FILLERS: tuple[str, ...] = (
    "the", "a", "my", "your", "this", "that", "really", "very", "today",
    "tomorrow", "always", "never", "just", "quite", "some", "about", "with",
    "again", "still", "another", "good", "great", "nice", "new", "old",
)

_SUFFIXES = ("", "s", "ed", "ing", "er", "y", "ful")
_ALPHABET = "abcdefghijklmnopqrstuvwxyz"


def _edit(word: str, rng: np.random.Generator) -> str:
    roll = rng.random()
    i = int(rng.integers(1, len(word) - 1))
    if roll < 0.4:
        # swap two adjacent interior characters
        return word[:i] + word[i + 1] + word[i] + word[i + 2 :]
    if roll < 0.75:
        # replace one interior character
        return word[:i] + _ALPHABET[rng.integers(0, 26)] + word[i + 1 :]
    # drop one interior character
    return word[:i] + word[i + 1 :]


def _mangle(word: str, rng: np.random.Generator) -> str:
    """Inflect and misspell a topic word while keeping its root visible.

    Most occurrences end up as rare surface variants, so word-identity
    features fragment while character n-grams keep seeing the root.
    """
    out = word
    if rng.random() < 0.7:
        out = out + _SUFFIXES[rng.integers(0, len(_SUFFIXES))]
    if rng.random() < 0.85:
        out = _edit(out, rng)
        if rng.random() < 0.35 and len(out) > 3:
            out = _edit(out, rng)
    return out


def make_synthetic_tweets(
    n_docs: int = 2000, n_classes: int = 5, seed: int = 20160901
) -> list[dict[str, object]]:
    """Generate raw tweet records ready for JSONL ingestion.

    Every record carries its class hashtag (about one in ten carries a
    second class's tag as well, exercising the multi-gold metric).  Texts
    are unique by construction via a trailing id token.
    """
    if not 1 <= n_classes <= len(CLASS_ROOTS):
        raise ValueError(f"n_classes must be in [1, {len(CLASS_ROOTS)}]")
    rng = np.random.Generator(np.random.PCG64(seed))
    class_names = list(CLASS_ROOTS)[:n_classes]
    records = []
    for i in range(n_docs):
        label = class_names[int(rng.integers(0, n_classes))]
        roots = CLASS_ROOTS[label]
        n_topic = int(rng.integers(3, 6))
        n_filler = int(rng.integers(4, 8))
        words = []
        for _ in range(n_topic):
            root = roots[int(rng.integers(0, len(roots)))]
            words.append(_mangle(root, rng))
        for _ in range(n_filler):
            words.append(FILLERS[int(rng.integers(0, len(FILLERS)))])
        order = rng.permutation(len(words))
        tokens = [words[j] for j in order]
        hashtags = [label]
        if rng.random() < 0.1:
            other = class_names[int(rng.integers(0, n_classes))]
            if other != label:
                hashtags.append(other)
        text = " ".join(tokens) + f" x{i} " + " ".join(f"#{h}" for h in hashtags)
        records.append({"id": str(i), "text": text, "hashtags": hashtags})
    return records


def write_tweets_jsonl(path: str | Path, records: list[dict[str, object]]) -> None:
    """Write raw tweet records as JSONL for the ingest command."""
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record, sort_keys=True) + "\n")
