"""N-gram feature selection and FC / TF-IDF extraction into sparse vectors.

An n-gram group ``(lo, hi)`` collects every contiguous character
substring (spaces included, no padding) or word sequence of each length
``n`` in ``[lo, hi]``.  Vocabulary indices are assigned in lexicographic
term order so identical corpora produce identical vocabularies on any
platform.  TF-IDF uses the smoothed formula

    idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1

followed by per-document L2 normalization.

An optional feature-hashing mode maps terms through a signed 32-bit
multiplicative hash onto ``2**k`` buckets (collisions sum, the top hash
bit flips the sign) to reach large character ranges within memory.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from collections.abc import Iterable
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp

__all__ = [
    "IdfTable",
    "NGramSpec",
    "SparseVector",
    "Vocabulary",
    "apply_tfidf",
    "build_vocabulary",
    "extract_ngrams",
    "fit_idf",
    "hash_term",
    "to_csr",
    "vectorize_fc",
    "vectorize_fc_hashed",
    "vectorize_tfidf",
]

NGRAM_LEVELS = ("char", "word")


@dataclass(frozen=True)
class NGramSpec:
    """Which n-gram group to extract: level plus inclusive length range."""

    level: str
    lo: int
    hi: int

    def __post_init__(self) -> None:
        if self.level not in NGRAM_LEVELS:
            raise ValueError(f"level must be one of {NGRAM_LEVELS}, got {self.level!r}")
        if not 1 <= self.lo <= self.hi:
            raise ValueError(f"need 1 <= lo <= hi, got ({self.lo}, {self.hi})")

    @property
    def is_individual(self) -> bool:
        return self.lo == self.hi

    @property
    def is_combined(self) -> bool:
        return self.lo == 1

    def __str__(self) -> str:
        return f"{self.level}({self.lo},{self.hi})"

    @classmethod
    def parse(cls, text: str) -> "NGramSpec":
        """Parse the CLI syntax ``level:lo,hi`` (e.g. ``char:1,7``)."""
        try:
            level, _, rest = text.partition(":")
            lo_text, _, hi_text = rest.partition(",")
            return cls(level, int(lo_text), int(hi_text))
        except ValueError as exc:
            raise ValueError(f"bad n-gram spec {text!r}: expected level:lo,hi") from exc


@dataclass(frozen=True)
class SparseVector:
    """Strictly increasing indices with parallel nonzero values."""

    indices: tuple[int, ...]
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values must be parallel")
        if any(b <= a for a, b in zip(self.indices, self.indices[1:])):
            raise ValueError("indices must be strictly increasing")
        if any(v == 0.0 for v in self.values):
            raise ValueError("zero-valued entries are not allowed")

    def __len__(self) -> int:
        return len(self.indices)

    def to_dense(self, n_features: int) -> np.ndarray:
        dense = np.zeros(n_features)
        dense[list(self.indices)] = self.values
        return dense

    @classmethod
    def from_dict(cls, entries: dict[int, float]) -> "SparseVector":
        items = sorted((i, float(v)) for i, v in entries.items() if v != 0.0)
        return cls(tuple(i for i, _ in items), tuple(v for _, v in items))


@dataclass(frozen=True)
class Vocabulary:
    """Term-to-index map with document frequencies for one n-gram spec."""

    terms: tuple[str, ...]
    doc_freq: tuple[int, ...]
    n_docs: int
    spec: NGramSpec
    min_df: int
    term_to_index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if len(self.terms) != len(self.doc_freq):
            raise ValueError("terms and doc_freq must be parallel")
        if any(df < self.min_df or df > self.n_docs for df in self.doc_freq):
            raise ValueError("doc frequencies must lie in [min_df, n_docs]")
        object.__setattr__(self, "term_to_index", {t: i for i, t in enumerate(self.terms)})

    def __len__(self) -> int:
        return len(self.terms)

    def __contains__(self, term: str) -> bool:
        return term in self.term_to_index

    def save_csv(self, path: str | Path) -> None:
        """Write ``term,index,df`` rows, quoting terms with commas/spaces."""
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write("term,index,df\n")
            for i, (term, df) in enumerate(zip(self.terms, self.doc_freq)):
                handle.write(f"{_quote_term(term)},{i},{df}\n")

    @classmethod
    def load_csv(
        cls, path: str | Path, spec: NGramSpec, n_docs: int, min_df: int = 1
    ) -> "Vocabulary":
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header != ["term", "index", "df"]:
                raise ValueError(f"{path}: expected 'term,index,df' header")
            rows = [(row[0], int(row[1]), int(row[2])) for row in reader if row]
        rows.sort(key=lambda r: r[1])
        if [r[1] for r in rows] != list(range(len(rows))):
            raise ValueError(f"{path}: indices must be exactly 0..V-1")
        return cls(
            tuple(r[0] for r in rows), tuple(r[2] for r in rows), n_docs, spec, min_df
        )


def _quote_term(term: str) -> str:
    if any(ch in term for ch in (",", " ", '"', "\n", "\r")):
        return '"' + term.replace('"', '""') + '"'
    return term


@dataclass(frozen=True)
class IdfTable:
    """Smoothed inverse document frequencies over one vocabulary."""

    idf: np.ndarray
    n_docs: int

    def __post_init__(self) -> None:
        if np.any(self.idf <= 0.0):
            raise ValueError("idf values must be positive")

    def save_csv(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write("index,idf\n")
            for i, value in enumerate(self.idf):
                handle.write(f"{i},{value!r}\n")

    @classmethod
    def load_csv(cls, path: str | Path) -> "IdfTable":
        with open(path, encoding="utf-8", newline="") as handle:
            reader = csv.reader(handle)
            header = next(reader, None)
            if header != ["index", "idf"]:
                raise ValueError(f"{path}: expected 'index,idf' header")
            rows = [(int(row[0]), float(row[1])) for row in reader if row]
        rows.sort()
        return cls(np.array([v for _, v in rows]), n_docs=0)


def extract_ngrams(text: str, spec: NGramSpec) -> Counter[str]:
    """Multiset of n-grams for every length in the spec's range.

    Character grams are contiguous substrings (spaces included); word
    grams are runs of whitespace-separated tokens joined by single
    spaces.  Units shorter than ``n`` contribute nothing for that ``n``.
    """
    grams: Counter[str] = Counter()
    if spec.level == "char":
        for n in range(spec.lo, spec.hi + 1):
            for i in range(len(text) - n + 1):
                grams[text[i : i + n]] += 1
    else:
        tokens = text.split()
        for n in range(spec.lo, spec.hi + 1):
            for i in range(len(tokens) - n + 1):
                grams[" ".join(tokens[i : i + n])] += 1
    return grams


def build_vocabulary(
    corpus: Iterable[str], spec: NGramSpec, min_df: int = 1
) -> Vocabulary:
    """Collect terms with document frequency >= min_df, indexed in
    lexicographic order."""
    if min_df < 1:
        raise ValueError("min_df must be >= 1")
    doc_freq: Counter[str] = Counter()
    n_docs = 0
    for text in corpus:
        n_docs += 1
        doc_freq.update(set(extract_ngrams(text, spec)))
    if n_docs == 0:
        raise ValueError("cannot build a vocabulary from an empty corpus")
    terms = sorted(t for t, df in doc_freq.items() if df >= min_df)
    return Vocabulary(
        terms=tuple(terms),
        doc_freq=tuple(doc_freq[t] for t in terms),
        n_docs=n_docs,
        spec=spec,
        min_df=min_df,
    )


def vectorize_fc(text: str, vocab: Vocabulary) -> SparseVector:
    """Raw in-vocabulary occurrence counts; OOV terms are ignored."""
    grams = extract_ngrams(text, vocab.spec)
    entries = {}
    for term, count in grams.items():
        index = vocab.term_to_index.get(term)
        if index is not None:
            entries[index] = float(count)
    return SparseVector.from_dict(entries)


def fit_idf(
    corpus_vectors: Iterable[SparseVector], n_features: int | None = None
) -> IdfTable:
    """Fit smoothed idf from training vectors (df recomputed here).

    ``idf = ln((1 + n) / (1 + df)) + 1`` is finite and positive even for
    df = 0, so unseen-but-retained terms stay usable.
    """
    vectors = list(corpus_vectors)
    if n_features is None:
        n_features = 1 + max((v.indices[-1] for v in vectors if len(v)), default=-1)
    df = np.zeros(n_features, dtype=np.int64)
    for vector in vectors:
        df[list(vector.indices)] += 1
    n = len(vectors)
    idf = np.log((1.0 + n) / (1.0 + df)) + 1.0
    return IdfTable(idf=idf, n_docs=n)


def apply_tfidf(vector: SparseVector, idf: IdfTable) -> SparseVector:
    """Scale counts by idf and L2-normalize; empty vectors stay empty."""
    if not len(vector):
        return vector
    values = np.array(vector.values) * idf.idf[list(vector.indices)]
    norm = math.sqrt(float(np.dot(values, values)))
    if norm > 0.0:
        values = values / norm
    return SparseVector(vector.indices, tuple(float(v) for v in values))


def vectorize_tfidf(text: str, vocab: Vocabulary, idf: IdfTable) -> SparseVector:
    """count * idf per term, L2-normalized over the document."""
    return apply_tfidf(vectorize_fc(text, vocab), idf)


def hash_term(term: str) -> int:
    """Signed-range 32-bit multiplicative hash over the term's UTF-8 bytes."""
    h = 0
    for byte in term.encode("utf-8"):
        h = (h * 31 + byte) & 0xFFFFFFFF
    return h


def vectorize_fc_hashed(text: str, spec: NGramSpec, hash_dim: int) -> SparseVector:
    """Frequency counts hashed onto ``hash_dim`` buckets.

    ``hash_dim`` must be a power of two.  The top hash bit decides the
    sign, colliding terms sum, and exact cancellations drop out of the
    vector.  Values may be negative, so this mode is incompatible with
    multinomial naive Bayes.
    """
    if hash_dim < 1 or hash_dim & (hash_dim - 1):
        raise ValueError(f"hash_dim must be a power of two, got {hash_dim}")
    entries: dict[int, float] = {}
    for term, count in extract_ngrams(text, spec).items():
        h = hash_term(term)
        sign = -1.0 if h & 0x80000000 else 1.0
        bucket = h % hash_dim
        entries[bucket] = entries.get(bucket, 0.0) + sign * count
    return SparseVector.from_dict(entries)


def to_csr(vectors: list[SparseVector], n_features: int) -> sp.csr_matrix:
    """Stack sparse vectors into one CSR matrix of shape (N, n_features)."""
    indptr = np.zeros(len(vectors) + 1, dtype=np.int64)
    for i, vector in enumerate(vectors):
        if len(vector) and vector.indices[-1] >= n_features:
            raise ValueError(
                f"vector index {vector.indices[-1]} out of range for {n_features} features"
            )
        indptr[i + 1] = indptr[i] + len(vector)
    indices = np.concatenate([v.indices for v in vectors]) if vectors else np.zeros(0)
    data = np.concatenate([v.values for v in vectors]) if vectors else np.zeros(0)
    return sp.csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64), indptr),
        shape=(len(vectors), n_features),
    )
