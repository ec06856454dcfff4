"""Word-level normalizers: Porter stemming and POS-guided lemmatization.

``porter_stem`` implements the suffix-stripping algorithm as originally
published (steps 1a-5b with the measure ``m`` and the ``*v*``, ``*d``,
``*o`` conditions), without the later revisions found in many ports
(``bli``/``logi`` rules).  Words of length <= 2 and tokens containing
anything outside ``[a-z]`` pass through unchanged.

The lemmatizer is a deterministic lexicon + ordered-suffix-rule affair
driven by a heuristic POS tagger.  It targets the method class, not any
specific off-the-shelf tool.
"""

from __future__ import annotations

import csv
import re
from dataclasses import dataclass
from importlib import resources

__all__ = [
    "NORMALIZER_MODES",
    "POS_CLASSES",
    "LemmaLexicon",
    "default_lexicon",
    "lemmatize",
    "normalize_text",
    "porter_stem",
    "pos_tag",
]

NORMALIZER_MODES = ("none", "stem", "lemmatize")
POS_CLASSES = ("noun", "verb", "adj", "unknown")

_LOWER_ALPHA = re.compile(r"[a-z]+")


# ---------------------------------------------------------------------------
# Porter stemmer
# ---------------------------------------------------------------------------


class _Stem:
    """Mutable word buffer for one stemming run.

    ``b[0..k]`` is the current word; ``j`` marks the end of the stem once
    a suffix has matched.  A fresh instance is used per call, so the
    public function stays safe under concurrent use.
    """

    def __init__(self, word: str) -> None:
        self.b = word
        self.k = len(word) - 1
        self.j = 0

    def cons(self, i: int) -> bool:
        ch = self.b[i]
        if ch in "aeiou":
            return False
        if ch == "y":
            return i == 0 or not self.cons(i - 1)
        return True

    def m(self) -> int:
        # number of vowel-consonant sequences in b[0..j]
        i = 0
        while i <= self.j and self.cons(i):
            i += 1
        n = 0
        while True:
            while i <= self.j and not self.cons(i):
                i += 1
            if i > self.j:
                return n
            n += 1
            while i <= self.j and self.cons(i):
                i += 1

    def vowel_in_stem(self) -> bool:
        return any(not self.cons(i) for i in range(self.j + 1))

    def double_cons(self, i: int) -> bool:
        return i > 0 and self.b[i] == self.b[i - 1] and self.cons(i)

    def cvc(self, i: int) -> bool:
        # consonant-vowel-consonant ending where the final consonant is
        # not w, x or y; used to restore a trailing e (hop-ing -> hope)
        if i < 2 or not self.cons(i) or self.cons(i - 1) or not self.cons(i - 2):
            return False
        return self.b[i] not in "wxy"

    def ends(self, suffix: str) -> bool:
        length = len(suffix)
        if length > self.k + 1 or not self.b.endswith(suffix, 0, self.k + 1):
            return False
        self.j = self.k - length
        return True

    def set_to(self, suffix: str) -> None:
        self.b = self.b[: self.j + 1] + suffix
        self.k = len(self.b) - 1

    def replace_m0(self, suffix: str) -> None:
        if self.m() > 0:
            self.set_to(suffix)

    def step1ab(self) -> None:
        # SSES -> SS, IES -> I, S -> (unless preceded by s)
        if self.b[self.k] == "s":
            if self.ends("sses"):
                self.k -= 2
            elif self.ends("ies"):
                self.set_to("i")
            elif self.b[self.k - 1] != "s":
                self.k -= 1
        if self.ends("eed"):
            if self.m() > 0:
                self.k -= 1
        elif (self.ends("ed") or self.ends("ing")) and self.vowel_in_stem():
            self.k = self.j
            if self.ends("at"):
                self.set_to("ate")
            elif self.ends("bl"):
                self.set_to("ble")
            elif self.ends("iz"):
                self.set_to("ize")
            elif self.double_cons(self.k):
                # *d and not (*L or *S or *Z) -> single letter
                if self.b[self.k - 1] not in "lsz":
                    self.k -= 1
            elif self.m() == 1 and self.cvc(self.k):
                # *o -> restore final e
                self.set_to("e")

    def step1c(self) -> None:
        # (*v*) Y -> I
        if self.ends("y") and self.vowel_in_stem():
            self.b = self.b[: self.k] + "i"

    _STEP2 = {
        "a": (("ational", "ate"), ("tional", "tion")),
        "c": (("enci", "ence"), ("anci", "ance")),
        "e": (("izer", "ize"),),
        "l": (
            ("abli", "able"),
            ("alli", "al"),
            ("entli", "ent"),
            ("eli", "e"),
            ("ousli", "ous"),
        ),
        "o": (("ization", "ize"), ("ation", "ate"), ("ator", "ate")),
        "s": (
            ("alism", "al"),
            ("iveness", "ive"),
            ("fulness", "ful"),
            ("ousness", "ous"),
        ),
        "t": (("aliti", "al"), ("iviti", "ive"), ("biliti", "ble")),
    }

    _STEP3 = {
        "e": (("icate", "ic"), ("ative", ""), ("alize", "al")),
        "i": (("iciti", "ic"),),
        "l": (("ical", "ic"), ("ful", "")),
        "s": (("ness", ""),),
    }

    def step2(self) -> None:
        for suffix, repl in self._STEP2.get(self.b[self.k - 1], ()):
            if self.ends(suffix):
                self.replace_m0(repl)
                return

    def step3(self) -> None:
        for suffix, repl in self._STEP3.get(self.b[self.k], ()):
            if self.ends(suffix):
                self.replace_m0(repl)
                return

    _STEP4 = {
        "a": ("al",),
        "c": ("ance", "ence"),
        "e": ("er",),
        "i": ("ic",),
        "l": ("able", "ible"),
        "n": ("ant", "ement", "ment", "ent"),
        "o": ("ion", "ou"),
        "s": ("ism",),
        "t": ("ate", "iti"),
        "u": ("ous",),
        "v": ("ive",),
        "z": ("ize",),
    }

    def step4(self) -> None:
        for suffix in self._STEP4.get(self.b[self.k - 1], ()):
            if self.ends(suffix):
                # (m > 1) drop; ION additionally needs a stem ending s/t
                if suffix == "ion" and self.b[self.j] not in "st":
                    continue
                if self.m() > 1:
                    self.k = self.j
                return

    def step5ab(self) -> None:
        # (m > 1) E -> ; (m = 1 and not *o) E ->
        self.j = self.k
        if self.b[self.k] == "e":
            a = self.m()
            if a > 1 or (a == 1 and not self.cvc(self.k - 1)):
                self.k -= 1
        # (m > 1 and *d and *L) -> single letter
        if self.b[self.k] == "l" and self.double_cons(self.k) and self.m() > 1:
            self.k -= 1

    def run(self) -> str:
        self.step1ab()
        self.step1c()
        self.step2()
        self.step3()
        self.step4()
        self.step5ab()
        return self.b[: self.k + 1]


def porter_stem(word: str) -> str:
    """Return the Porter stem of a lowercase ASCII word.

    Tokens that are not purely ``[a-z]`` (numbers, empty strings) and
    words of length <= 2 are returned unchanged.
    """
    if len(word) <= 2 or not _LOWER_ALPHA.fullmatch(word):
        return word
    return _Stem(word).run()


# ---------------------------------------------------------------------------
# POS tagging and lemmatization
# ---------------------------------------------------------------------------

_CLOSED_CLASS = frozenset(
    """
    a an the and or but if then than that this these those here there
    of at by for with to from in on up down out off over under again
    once about into through during before after above below between
    each few more most other some such no nor not only own same so too
    very can will just now is are was were be been being am do does did
    have has had having he she it they them him his her its our their
    ours yours theirs we you i me my your who whom what which when
    where why how all any both us
    """.split()
)


@dataclass(frozen=True)
class LemmaLexicon:
    """Exception table plus ordered, POS-keyed suffix rules.

    Exceptions win over rules; within a POS class the first matching
    rule fires.  A rule mapping a suffix to itself acts as a guard that
    stops later, more destructive rules (``feed`` must not lose ``ed``).
    """

    exceptions: dict[str, str]
    suffix_rules: tuple[tuple[str, str, str], ...]

    def rules_for(self, pos: str) -> tuple[tuple[str, str], ...]:
        return tuple((s, r) for p, s, r in self.suffix_rules if p == pos)


def _read_tsv(name: str) -> list[list[str]]:
    path = resources.files("microtext.data").joinpath(name)
    with path.open("r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle, delimiter="\t")
        return [row for row in reader if row and not row[0].startswith("#")]


_DEFAULT_LEXICON: LemmaLexicon | None = None


def default_lexicon() -> LemmaLexicon:
    """Load the bundled exception and suffix-rule tables (cached)."""
    global _DEFAULT_LEXICON
    if _DEFAULT_LEXICON is None:
        exceptions = {row[0]: row[1] for row in _read_tsv("lemma_exceptions.tsv")}
        rules = []
        for row in _read_tsv("lemma_rules.tsv"):
            pos, suffix = row[0], row[1]
            repl = row[2] if len(row) > 2 else ""
            if pos not in POS_CLASSES:
                raise ValueError(f"unknown POS class in rules table: {pos!r}")
            rules.append((pos, suffix, repl))
        _DEFAULT_LEXICON = LemmaLexicon(exceptions, tuple(rules))
    return _DEFAULT_LEXICON


def load_lexicon(exceptions_path: str, rules_path: str) -> LemmaLexicon:
    """Load a lexicon from two TSV files: ``word<TAB>lemma`` and
    ``pos<TAB>suffix<TAB>replacement``."""
    with open(exceptions_path, encoding="utf-8", newline="") as handle:
        exceptions = {
            row[0]: row[1]
            for row in csv.reader(handle, delimiter="\t")
            if row and not row[0].startswith("#")
        }
    rules = []
    with open(rules_path, encoding="utf-8", newline="") as handle:
        for row in csv.reader(handle, delimiter="\t"):
            if not row or row[0].startswith("#"):
                continue
            pos, suffix = row[0], row[1]
            repl = row[2] if len(row) > 2 else ""
            if pos not in POS_CLASSES:
                raise ValueError(f"unknown POS class in rules table: {pos!r}")
            rules.append((pos, suffix, repl))
    return LemmaLexicon(exceptions, tuple(rules))


def pos_tag(tokens: list[str]) -> list[str]:
    """Tag cleaned tokens with a coarse POS class.

    Closed-class lookup first, then suffix heuristics: ``-ing``/``-ed``
    verb, ``-ly`` unknown (adverbs are not lemmatized), ``-s`` noun;
    everything else defaults to noun.
    """
    tags = []
    for token in tokens:
        if token in _CLOSED_CLASS:
            tags.append("unknown")
        elif token.endswith("ing") or token.endswith("ed"):
            tags.append("verb")
        elif token.endswith("ly"):
            tags.append("unknown")
        elif token.endswith("s"):
            tags.append("noun")
        else:
            tags.append("noun")
    return tags


def _apply_rules(word: str, rules: tuple[tuple[str, str], ...]) -> str | None:
    for suffix, repl in rules:
        if not word.endswith(suffix):
            continue
        stem_len = len(word) - len(suffix)
        # keep at least one stem character and a two-character result
        if stem_len < 1 or stem_len + len(repl) < 2:
            continue
        return word[:stem_len] + repl
    return None


def lemmatize(word: str, pos_hint: str = "unknown", lexicon: LemmaLexicon | None = None) -> str:
    """Map a word to its lemma using the exception table, then suffix rules.

    ``pos_hint=unknown`` tries verb rules before noun rules.  Tokens that
    are not purely ``[a-z]`` pass through unchanged.
    """
    if pos_hint not in POS_CLASSES:
        raise ValueError(f"pos_hint must be one of {POS_CLASSES}, got {pos_hint!r}")
    if not _LOWER_ALPHA.fullmatch(word):
        return word
    lexicon = lexicon if lexicon is not None else default_lexicon()
    exception = lexicon.exceptions.get(word)
    if exception is not None:
        return exception
    pos_order = ("verb", "noun") if pos_hint == "unknown" else (pos_hint,)
    for pos in pos_order:
        result = _apply_rules(word, lexicon.rules_for(pos))
        if result is not None:
            return result
    return word


def normalize_text(text: str, mode: str, lexicon: LemmaLexicon | None = None) -> str:
    """Apply the selected normalizer token-wise to cleaned text.

    Token count is preserved; ``mode="none"`` is the identity.
    """
    if mode not in NORMALIZER_MODES:
        raise ValueError(f"mode must be one of {NORMALIZER_MODES}, got {mode!r}")
    if mode == "none":
        return text
    tokens = text.split()
    if mode == "stem":
        return " ".join(porter_stem(t) for t in tokens)
    tags = pos_tag(tokens)
    return " ".join(lemmatize(t, tag, lexicon) for t, tag in zip(tokens, tags))
