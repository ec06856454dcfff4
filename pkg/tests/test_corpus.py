"""Ingestion, label selection, labeling and the seeded split."""

import json
import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from microtext.corpus import (
    LabelIndex,
    LabeledExample,
    SplitSpec,
    Tweet,
    ingest,
    label_examples,
    read_examples_jsonl,
    select_labels,
    shuffled_order,
    split,
    split_sizes,
    write_examples_jsonl,
)


def _write(path, lines):
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


class TestIngestJsonl:
    def test_basic_mapping(self, tmp_path):
        path = _write(
            tmp_path / "in.jsonl",
            ['{"id":"1","text":"want to work #hiring","hashtags":["hiring"]}'],
        )
        tweets = list(ingest(path))
        assert tweets == [Tweet("1", "want to work #hiring", frozenset({"hiring"}))]

    def test_duplicate_texts_keep_first(self, tmp_path):
        path = _write(
            tmp_path / "in.jsonl",
            [
                '{"id":"1","text":"same text","hashtags":["a"]}',
                '{"id":"2","text":"same text","hashtags":["b"]}',
                '{"id":"3","text":"  same text  ","hashtags":["c"]}',
            ],
        )
        tweets = list(ingest(path))
        assert [t.id for t in tweets] == ["1"]

    def test_zero_hashtags_dropped(self, tmp_path):
        path = _write(
            tmp_path / "in.jsonl",
            [
                '{"id":"1","text":"no tags","hashtags":[]}',
                '{"id":"2","text":"tagged","hashtags":["x"]}',
            ],
        )
        assert [t.id for t in list(ingest(path))] == ["2"]

    def test_hashtags_lowercased(self, tmp_path):
        path = _write(
            tmp_path / "in.jsonl", ['{"id":"1","text":"t","hashtags":["HirinG"]}']
        )
        assert list(ingest(path))[0].hashtags == frozenset({"hiring"})

    def test_malformed_lines_skipped_with_warning(self, tmp_path, caplog):
        path = _write(
            tmp_path / "in.jsonl",
            [
                "not json at all",
                '{"id":"1","text":"ok","hashtags":["a"]}',
                '{"id":"2","text":"bad tag","hashtags":["has space"]}',
                '{"id":"3","text":"missing fields"}',
            ],
        )
        with caplog.at_level(logging.WARNING):
            tweets = list(ingest(path))
        assert [t.id for t in tweets] == ["1"]
        assert sum("skipping malformed record" in r.message for r in caplog.records) == 3
        assert any(":1:" in r.message for r in caplog.records)

    def test_unreadable_file_raises(self, tmp_path):
        with pytest.raises(OSError):
            list(ingest(tmp_path / "missing.jsonl"))

    def test_unknown_format_rejected(self, tmp_path):
        with pytest.raises(ValueError, match="format"):
            list(ingest(tmp_path / "x", format="xml"))


class TestIngestTsv:
    def test_basic(self, tmp_path):
        path = _write(
            tmp_path / "in.tsv",
            ["1\thello world\tjob,hiring", "2\tother\tnews"],
        )
        tweets = list(ingest(path, format="tsv"))
        assert tweets[0].hashtags == frozenset({"job", "hiring"})
        assert tweets[1].text == "other"

    def test_wrong_column_count_is_malformed(self, tmp_path, caplog):
        path = _write(tmp_path / "in.tsv", ["1\tonly two columns", "2\tok\ttag"])
        with caplog.at_level(logging.WARNING):
            tweets = list(ingest(path, format="tsv"))
        assert [t.id for t in tweets] == ["2"]

    def test_empty_hashtag_field_drops_record(self, tmp_path):
        path = _write(tmp_path / "in.tsv", ["1\ttext\t", "2\ttext2\ta"])
        assert [t.id for t in list(ingest(path, format="tsv"))] == ["2"]


class TestTweetValidation:
    def test_empty_id_rejected(self):
        with pytest.raises(ValueError, match="id"):
            Tweet("", "x", frozenset({"a"}))

    def test_bad_hashtag_rejected(self):
        with pytest.raises(ValueError, match="hashtag"):
            Tweet("1", "x", frozenset({"#a"}))
        with pytest.raises(ValueError, match="hashtag"):
            Tweet("1", "x", frozenset({"a b"}))
        with pytest.raises(ValueError, match="hashtag"):
            Tweet("1", "x", frozenset({""}))


def _tweet(i, tags):
    return Tweet(str(i), f"text {i}", frozenset(tags))


class TestSelectLabels:
    def test_top_k(self):
        tweets = [_tweet(i, ["a"]) for i in range(3)]
        tweets += [_tweet(10 + i, ["b"]) for i in range(2)]
        tweets += [_tweet(20, ["c"])]
        index = select_labels(tweets, k=2)
        assert index.labels == ("a", "b")
        assert index.counts == (3, 2)

    def test_lexicographic_tie_break(self):
        tweets = [_tweet(1, ["b"]), _tweet(2, ["a"]), _tweet(3, ["a"]), _tweet(4, ["b"])]
        index = select_labels(tweets, k=1)
        assert index.labels == ("a",)

    def test_fewer_than_k_warns(self, caplog):
        with caplog.at_level(logging.WARNING):
            index = select_labels([_tweet(1, ["a"])], k=50)
        assert index.labels == ("a",)
        assert any("only 1 distinct hashtags" in r.message for r in caplog.records)

    def test_counts_are_per_tweet(self):
        # one tweet with both tags counts once per tag
        index = select_labels([_tweet(1, ["a", "b"]), _tweet(2, ["a"])], k=2)
        assert index.labels == ("a", "b")
        assert index.counts == (2, 1)

    def test_k_must_be_positive(self):
        with pytest.raises(ValueError, match="k"):
            select_labels([_tweet(1, ["a"])], k=0)

    def test_empty_input_raises(self):
        with pytest.raises(ValueError, match="no hashtags"):
            select_labels([], k=5)


class TestLabelExamples:
    index = LabelIndex(("job", "hiring"), (5, 3))

    def test_single_gold(self):
        rows = list(label_examples([_tweet(1, ["hiring"])], self.index))
        assert rows[0][1] == frozenset({"hiring"})
        assert rows[0][2] == "hiring"

    def test_train_label_is_most_frequent(self):
        rows = list(label_examples([_tweet(1, ["hiring", "job"])], self.index))
        assert rows[0][1] == frozenset({"job", "hiring"})
        assert rows[0][2] == "job"

    def test_out_of_vocabulary_tweet_dropped(self):
        assert list(label_examples([_tweet(1, ["zzz"])], self.index)) == []

    def test_gold_is_intersection(self):
        rows = list(label_examples([_tweet(1, ["job", "zzz"])], self.index))
        assert rows[0][1] == frozenset({"job"})

    def test_empty_index_rejected(self):
        with pytest.raises(ValueError, match="empty"):
            list(label_examples([_tweet(1, ["a"])], LabelIndex((), ())))


class TestLabelIndex:
    def test_order_validation(self):
        with pytest.raises(ValueError, match="ordered"):
            LabelIndex(("a", "b"), (1, 2))
        with pytest.raises(ValueError, match="ordered"):
            LabelIndex(("b", "a"), (2, 2))

    def test_uniqueness(self):
        with pytest.raises(ValueError, match="unique"):
            LabelIndex(("a", "a"), (2, 1))

    def test_csv_round_trip(self, tmp_path):
        index = LabelIndex(("nowplaying", "job"), (76618, 52683))
        path = tmp_path / "labels.csv"
        index.save_csv(path)
        assert LabelIndex.load_csv(path) == index
        assert path.read_text().splitlines()[0] == "label,count"

    def test_lookup_helpers(self):
        index = LabelIndex(("a", "b"), (2, 1))
        assert "a" in index and "z" not in index
        assert index.count("b") == 1
        assert len(index) == 2


def _examples(n):
    return [
        LabeledExample(f"text {i}", frozenset({f"l{i % 3}"}), f"l{i % 3}")
        for i in range(n)
    ]


class TestSplit:
    def test_sizes_ten(self):
        train, test = split(_examples(10), SplitSpec(0.7, seed=1))
        assert (len(train), len(test)) == (7, 3)

    def test_paper_corpus_arithmetic(self):
        assert split_sizes(964889, 0.7) == (675422, 289467)

    def test_deterministic(self):
        a = split(_examples(50), SplitSpec(0.7, seed=9))
        b = split(_examples(50), SplitSpec(0.7, seed=9))
        assert a == b

    def test_different_seeds_differ(self):
        a = split(_examples(200), SplitSpec(0.7, seed=1))
        b = split(_examples(200), SplitSpec(0.7, seed=2))
        assert a != b

    def test_partition(self):
        examples = _examples(37)
        train, test = split(examples, SplitSpec(0.7, seed=3))
        assert sorted((e.text for e in train + test)) == sorted(e.text for e in examples)
        assert len(train) + len(test) == 37

    def test_too_small_rejected(self):
        with pytest.raises(ValueError, match="at least 2"):
            split(_examples(1), SplitSpec(0.7, seed=0))

    @given(st.integers(2, 300), st.integers(0, 2**64 - 1))
    @settings(max_examples=60, deadline=None)
    def test_shuffle_is_a_permutation(self, n, seed):
        order = shuffled_order(n, seed)
        assert sorted(order.tolist()) == list(range(n))

    def test_spec_validation(self):
        with pytest.raises(ValueError, match="train_fraction"):
            SplitSpec(train_fraction=1.0)
        with pytest.raises(ValueError, match="seed"):
            SplitSpec(seed=-1)


class TestLabeledExampleIO:
    def test_validation(self):
        with pytest.raises(ValueError, match="gold_labels"):
            LabeledExample("t", frozenset(), "a")
        with pytest.raises(ValueError, match="train_label"):
            LabeledExample("t", frozenset({"a"}), "b")

    def test_jsonl_round_trip(self, tmp_path):
        examples = [
            LabeledExample("want to work", frozenset({"job", "hiring"}), "job"),
            LabeledExample("other text", frozenset({"news"}), "news"),
        ]
        path = tmp_path / "examples.jsonl"
        write_examples_jsonl(path, examples)
        assert read_examples_jsonl(path) == examples
        first = json.loads(path.read_text().splitlines()[0])
        assert first["gold_labels"] == ["hiring", "job"]
