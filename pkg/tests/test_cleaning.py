"""Cleaning pipeline: golden examples, step semantics and invariants."""

import re

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microtext.cleaning import CleaningPipeline, clean, strip_hashtags, to_ascii


class TestGoldenExamples:
    def test_repeated_characters_collapse(self):
        assert clean("i'm so happyyyyyyyy...") == "im so hapy"

    def test_job_posting_sentence(self):
        assert (
            clean("want to work at robert half technology? we're in nc click for details.")
            == "want to work at robert half technology were in nc click for details"
        )

    def test_retweet_url_shout_trace(self):
        # Hand trace of "RT @user CHECK https://t.co/xyz NOW!!":
        #   ascii        -> unchanged (pure ASCII input)
        #   whitespace   -> unchanged (only plain spaces)
        #   retweet      -> " @user CHECK https://t.co/xyz NOW!!"
        #   lowercase    -> " @user check https://t.co/xyz now!!"
        #   urls         -> " @user check  now!!"  (url ate up to the space)
        #   alphanumeric -> " user check  now"     (@ and !! dropped)
        #   spaces       -> " user check now"
        #   char_runs    -> " user check now"      ("check" = c-h-e-c-k has no
        #                                           adjacent duplicate pair, so
        #                                           it does NOT become "chek")
        #   trim         -> "user check now"
        assert clean("RT @user CHECK https://t.co/xyz NOW!!") == "user check now"

    def test_trace_intermediate_steps(self):
        pipeline = CleaningPipeline()
        text = "RT @user CHECK https://t.co/xyz NOW!!"
        expected = [
            "RT @user CHECK https://t.co/xyz NOW!!",
            "RT @user CHECK https://t.co/xyz NOW!!",
            " @user CHECK https://t.co/xyz NOW!!",
            " @user check https://t.co/xyz now!!",
            " @user check  now!!",
            " user check  now",
            " user check now",
            " user check now",
            "user check now",
        ]
        for steps_taken, want in zip(range(1, 10), expected):
            partial = CleaningPipeline(steps=pipeline.steps[:steps_taken])
            assert partial.apply(text) == want, pipeline.steps[steps_taken - 1]


class TestSteps:
    def test_unicode_accents_transliterate(self):
        assert clean("Café au lait") == "cafe au lait"

    def test_unmappable_symbols_drop(self):
        assert to_ascii("a☃b") == "ab"  # snowman has no ascii form
        assert clean("ok \U0001f600 fine") == "ok fine"

    def test_ellipsis_decomposes_then_drops(self):
        assert clean("wait…what") == "waitwhat"

    def test_newlines_and_tabs_become_spaces(self):
        assert clean("a\tb\nc\rd") == "a b c d"

    def test_rt_only_uppercase_word_delimited(self):
        assert clean("RT hola") == "hola"
        # "tweet" itself loses its double e to the run collapse
        assert clean("mid RT tweet") == "mid twet"
        assert clean("rt stays") == "rt stays"
        assert clean("start ARTist") == "start artist"
        assert clean("RTx") == "rtx"

    def test_urls_need_scheme(self):
        assert clean("go https://example.com/x?a=1 now") == "go now"
        assert clean("go HTTP://EXAMPLE.COM now") == "go now"
        assert clean("bare t.co/xyz stays") == "bare tcoxyz stays"
        assert clean("http:/notaurl") == "htpnotaurl"

    def test_url_at_end_of_text(self):
        assert clean("go https://t.co/abc") == "go"

    def test_digit_runs_collapse_too(self):
        assert clean("room 1000 aa11bb") == "rom 10 a1b"

    def test_trim_and_space_collapse(self):
        assert clean("   lots    of   space   ") == "lots of space"

    def test_empty_and_degenerate(self):
        assert clean("") == ""
        assert clean("!!!") == ""
        assert clean("   ") == ""


class TestStripHashtags:
    def test_known_label_removed(self):
        text = "want to work at robert half technology? we're in nc click for details. #hiring"
        assert strip_hashtags(text, ["hiring"]).rstrip() == (
            "want to work at robert half technology? we're in nc click for details."
        )

    def test_unknown_tag_untouched(self):
        assert strip_hashtags("#unknowntag hello", ["hiring"]) == "#unknowntag hello"

    def test_multiple_tags_leave_spaces(self):
        assert strip_hashtags("a #job b #hiring", ["job", "hiring"]) == "a  b "

    def test_lookup_is_case_insensitive(self):
        assert strip_hashtags("big news #HIRING", ["hiring"]) == "big news "

    def test_unknown_tag_loses_hash_in_clean(self):
        assert clean(strip_hashtags("#unknowntag hola", ["hiring"])) == "unknowntag hola"


class TestInvariants:
    alphabet = re.compile(r"[a-z0-9 ]*")

    @given(st.text(max_size=200))
    @settings(max_examples=300, deadline=None)
    def test_idempotent(self, text):
        once = clean(text)
        assert clean(once) == once

    @given(st.text(max_size=200))
    @settings(max_examples=300, deadline=None)
    def test_output_shape(self, text):
        out = clean(text)
        assert self.alphabet.fullmatch(out)
        assert not out.startswith(" ") and not out.endswith(" ")
        assert "  " not in out
        assert all(a != b for a, b in zip(out, out[1:]))

    @given(st.text(max_size=200))
    @settings(max_examples=300, deadline=None)
    def test_length_never_grows_past_transliteration(self, text):
        assert len(clean(text)) <= len(to_ascii(text))

    def test_deterministic(self):
        text = "RT mixed Éléphant https://x.co/q #tag 99!!"
        assert clean(text) == clean(text)


class TestPipelineConfig:
    def test_unknown_step_rejected(self):
        with pytest.raises(ValueError, match="unknown cleaning steps"):
            CleaningPipeline(steps=("ascii", "bogus"))

    def test_default_order_is_fixed(self):
        assert CleaningPipeline().steps == (
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
