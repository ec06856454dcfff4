"""Deterministic tweet-cleaning pipeline.

The pipeline reduces arbitrary unicode micro-text to lowercase
``[a-z0-9 ]`` with single spaces, no leading/trailing space and no runs
of repeated characters.  The step order is fixed; reordering changes
results (e.g. lowercasing before retweet-marker removal would stop
``RT`` from matching).  ``clean`` is pure and idempotent, so it is safe
to apply both at training time and at prediction time.
"""

from __future__ import annotations

import re
import unicodedata
from collections.abc import Callable, Iterable
from dataclasses import dataclass

__all__ = [
    "DEFAULT_STEPS",
    "CleaningPipeline",
    "clean",
    "strip_hashtags",
    "to_ascii",
]

# Whitespace other than the plain space character (post-ASCII, so this is
# \t\n\r\f\v plus the C0 separator controls Python treats as whitespace).
_OTHER_WHITESPACE = re.compile(r"[^\S ]")
# Word-delimited uppercase retweet marker; lowercase "rt" survives.
_RT_TOKEN = re.compile(r"\bRT\b")
# Hyperlinks must carry an explicit scheme so the pipeline stays
# idempotent; bare domains ("t.co/x") are degraded to letter runs by the
# alphanumeric filter instead.  Runs after lowercasing, so HTTP:// matches.
URL_PATTERN = r"https?://\S*"
_URL = re.compile(URL_PATTERN)
_NON_ALNUM_SPACE = re.compile(r"[^a-z0-9 ]")
_MULTI_SPACE = re.compile(r" {2,}")
# Runs of 2+ identical characters collapse to one, uniformly for letters,
# digits and spaces (space runs are already gone by the time this fires).
_CHAR_RUN = re.compile(r"(.)\1+")
_HASHTAG = re.compile(r"#(\w+)")


def to_ascii(text: str) -> str:
    """Transliterate unicode to ASCII: NFKD, then drop what will not map.

    Accents decompose and their combining marks are dropped; symbols with
    no ASCII equivalent disappear entirely.
    """
    return unicodedata.normalize("NFKD", text).encode("ascii", "ignore").decode("ascii")


def _collapse_other_whitespace(text: str) -> str:
    return _OTHER_WHITESPACE.sub(" ", text)


def _drop_retweet_marker(text: str) -> str:
    return _RT_TOKEN.sub("", text)


def _lowercase(text: str) -> str:
    return text.lower()


def _drop_urls(text: str) -> str:
    return _URL.sub("", text)


def _keep_alnum_space(text: str) -> str:
    return _NON_ALNUM_SPACE.sub("", text)


def _collapse_spaces(text: str) -> str:
    return _MULTI_SPACE.sub(" ", text)


def _collapse_char_runs(text: str) -> str:
    return _CHAR_RUN.sub(r"\1", text)


def _trim(text: str) -> str:
    return text.strip(" ")


_STEP_FUNCTIONS: dict[str, Callable[[str], str]] = {
    "ascii": to_ascii,
    "whitespace": _collapse_other_whitespace,
    "retweet": _drop_retweet_marker,
    "lowercase": _lowercase,
    "urls": _drop_urls,
    "alphanumeric": _keep_alnum_space,
    "spaces": _collapse_spaces,
    "char_runs": _collapse_char_runs,
    "trim": _trim,
}

DEFAULT_STEPS: tuple[str, ...] = (
    "ascii",
    "whitespace",
    "retweet",
    "lowercase",
    "urls",
    "alphanumeric",
    "spaces",
    "char_runs",
    "trim",
)


@dataclass(frozen=True)
class CleaningPipeline:
    """Ordered sequence of named text transforms.

    The default order is normative; a custom order is only useful for
    ablation experiments.
    """

    steps: tuple[str, ...] = DEFAULT_STEPS
    url_pattern: str = URL_PATTERN

    def __post_init__(self) -> None:
        unknown = [s for s in self.steps if s not in _STEP_FUNCTIONS]
        if unknown:
            raise ValueError(f"unknown cleaning steps: {unknown}")

    def apply(self, text: str) -> str:
        for step in self.steps:
            text = _STEP_FUNCTIONS[step](text)
        return text


_DEFAULT_PIPELINE = CleaningPipeline()


def clean(text: str) -> str:
    """Run the default cleaning pipeline over one document.

    Total and pure: any unicode string in, reduced ``[a-z0-9 ]`` string
    out.  ``clean(clean(x)) == clean(x)`` for all ``x``.
    """
    return _DEFAULT_PIPELINE.apply(text)


def strip_hashtags(text: str, labels: Iterable[str]) -> str:
    """Delete ``#word`` tokens whose lowercased word is a known label.

    Runs on raw text before ``clean``.  Hashtags outside the label set
    keep their word; the ``#`` itself is removed later by the
    alphanumeric filter.  Surrounding whitespace is left in place for the
    space-collapsing step.
    """
    label_set = frozenset(labels)

    def replace(match: re.Match[str]) -> str:
        return "" if match.group(1).lower() in label_set else match.group(0)

    return _HASHTAG.sub(replace, text)
