"""Batch command-line surface: clean, ingest, train, predict, experiment.

Every subcommand is deterministic given its flags and seeds.  A TOML
config file may supply defaults per subcommand section; explicit flags
always win.  ``MICROTEXT_LOG`` sets the log level.  Exit codes: 0
success (possibly with warnings), 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from importlib import resources
from pathlib import Path

import numpy as np
import tomli

from . import cleaning, corpus, evaluation, features, models, normalize

log = logging.getLogger("microtext")

_NORMALIZER_ALIASES = {"lemma": "lemmatize"}


def _ngram_flag(text: str) -> features.NGramSpec:
    try:
        return features.NGramSpec.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _normalizer_flag(text: str) -> str:
    mode = _NORMALIZER_ALIASES.get(text, text)
    if mode not in normalize.NORMALIZER_MODES:
        raise argparse.ArgumentTypeError(
            f"normalizer must be one of none|stem|lemma, got {text!r}"
        )
    return mode


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="microtext",
        description="Hashtag prediction toolkit: n-gram features over cleaned tweets.",
    )
    parser.add_argument(
        "--config",
        help="TOML file with per-subcommand default values (flags take precedence)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("clean", help="clean stdin to stdout, one document per line")

    p_ingest = sub.add_parser("ingest", help="read raw tweets, emit labeled examples")
    p_ingest.add_argument("--input", help="raw tweet file")
    p_ingest.add_argument("--format", choices=corpus.INGEST_FORMATS, default=None)
    p_ingest.add_argument("--top-k", type=int, default=None, help="label count (default 50)")
    p_ingest.add_argument("--out", help="output directory")

    p_train = sub.add_parser("train", help="train one model on the 70% split")
    p_train.add_argument("--data", help="directory produced by ingest")
    p_train.add_argument("--model", choices=evaluation.MODEL_KINDS, default=None)
    p_train.add_argument("--weighting", choices=evaluation.WEIGHTINGS, default=None)
    p_train.add_argument("--ngram", type=_ngram_flag, default=None, help="level:lo,hi")
    p_train.add_argument("--normalizer", type=_normalizer_flag, default=None)
    p_train.add_argument("--seed", type=int, default=None)
    p_train.add_argument("--train-fraction", type=float, default=None)
    p_train.add_argument("--min-df", type=int, default=None)
    p_train.add_argument("--hash-dim", type=int, default=None)
    p_train.add_argument("--alpha", type=float, default=None)
    p_train.add_argument("--c-reg", type=float, default=None)
    p_train.add_argument("--max-iters", type=int, default=None)
    p_train.add_argument("--tol", type=float, default=None)
    p_train.add_argument("--out", help="model file to write")

    p_predict = sub.add_parser("predict", help="emit top labels per input line")
    p_predict.add_argument("--model", help="model file from train")
    p_predict.add_argument("--input", help="text file, one document per line, or '-'")
    p_predict.add_argument("--top", type=int, default=None, help="labels per line")

    p_exp = sub.add_parser("experiment", help="run a grid of configurations")
    p_exp.add_argument("--data", help="directory produced by ingest")
    p_exp.add_argument("--grid", help="grid TOML file or the name 'paper_grid'")
    p_exp.add_argument("--jobs", type=int, default=None)
    p_exp.add_argument("--out", help="output directory for the four CSVs")

    return parser


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    with open(path, "rb") as handle:
        return tomli.load(handle)


def _merged(args: argparse.Namespace, config: dict, key: str, default=None):
    value = getattr(args, key.replace("-", "_"), None)
    if value is not None:
        return value
    section = config.get(args.command, {})
    return section.get(key, default)


def _require(parser: argparse.ArgumentParser, value, flag: str):
    if value is None:
        parser.error(f"the following argument is required: {flag}")
    return value


def _setup_logging() -> None:
    level_name = os.environ.get("MICROTEXT_LOG", "WARNING").upper()
    level = getattr(logging, level_name, None)
    if not isinstance(level, int):
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def cmd_clean(stdin=None, stdout=None) -> int:
    stdin = stdin if stdin is not None else sys.stdin
    stdout = stdout if stdout is not None else sys.stdout
    for line in stdin:
        stdout.write(cleaning.clean(line.rstrip("\n")) + "\n")
    return 0


def cmd_ingest(input_path: str, fmt: str, top_k: int, out_dir: str) -> int:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    tweets = list(corpus.ingest(input_path, fmt))
    if not tweets:
        raise RuntimeError(f"no usable tweets in {input_path}")
    index = corpus.select_labels(tweets, top_k)
    examples = []
    for tweet, gold, train_label in corpus.label_examples(tweets, index):
        text = cleaning.clean(cleaning.strip_hashtags(tweet.text, index.labels))
        examples.append(corpus.LabeledExample(text, gold, train_label))
    index.save_csv(out / "labels.csv")
    corpus.write_examples_jsonl(out / "examples.jsonl", examples)
    log.info("wrote %d examples across %d labels", len(examples), len(index))
    return 0


def _load_data_dir(data_dir: str) -> tuple[list[corpus.LabeledExample], corpus.LabelIndex]:
    data = Path(data_dir)
    examples = corpus.read_examples_jsonl(data / "examples.jsonl")
    index = corpus.LabelIndex.load_csv(data / "labels.csv")
    return examples, index


def _vectorize_split(
    texts: list[str],
    weighting: str,
    spec: features.NGramSpec,
    min_df: int,
    hash_dim: int | None,
):
    """Build train-side features; returns (vectors, vocab_or_None, idf_or_None, V)."""
    if hash_dim is not None:
        fc = [features.vectorize_fc_hashed(t, spec, hash_dim) for t in texts]
        vocab, n_features = None, hash_dim
    else:
        vocab = features.build_vocabulary(texts, spec, min_df)
        n_features = len(vocab)
        fc = [features.vectorize_fc(t, vocab) for t in texts]
    idf = None
    if weighting == "tfidf":
        idf = features.fit_idf(fc, n_features=n_features)
        fc = [features.apply_tfidf(v, idf) for v in fc]
    return fc, vocab, idf, n_features


def cmd_train(
    data_dir: str,
    model_kind: str,
    weighting: str,
    spec: features.NGramSpec,
    normalizer: str,
    settings: models.TrainSettings,
    train_fraction: float,
    min_df: int,
    hash_dim: int | None,
    out_path: str,
) -> int:
    examples, _ = _load_data_dir(data_dir)
    train, _ = corpus.split(
        examples, corpus.SplitSpec(train_fraction=train_fraction, seed=settings.seed)
    )
    texts = [normalize.normalize_text(ex.text, normalizer) for ex in train]
    labels = sorted({ex.train_label for ex in train})
    label_to_id = {label: i for i, label in enumerate(labels)}
    y = [label_to_id[ex.train_label] for ex in train]

    X, vocab, idf, n_features = _vectorize_split(texts, weighting, spec, min_df, hash_dim)
    if model_kind == "mnb":
        model = models.mnb_fit(X, y, settings.alpha, n_features=n_features)
    elif model_kind == "svm":
        model = models.svm_fit(X, y, settings, n_features=n_features)
    else:
        model = models.lr_fit(X, y, settings, n_features=n_features)

    out = Path(out_path)
    out.parent.mkdir(parents=True, exist_ok=True)
    models.save_model(model, out)
    if vocab is not None:
        vocab.save_csv(out.with_suffix(out.suffix + ".vocab.csv"))
    if idf is not None:
        idf.save_csv(out.with_suffix(out.suffix + ".idf.csv"))
    meta = {
        "ngram": {"level": spec.level, "lo": spec.lo, "hi": spec.hi},
        "weighting": weighting,
        "normalizer": normalizer,
        "labels": labels,
        "min_df": min_df,
        "hash_dim": hash_dim,
        "seed": settings.seed,
        "train_fraction": train_fraction,
        "vocab_docs": vocab.n_docs if vocab is not None else len(train),
    }
    with open(out.with_suffix(out.suffix + ".meta.json"), "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    log.info("trained %s on %d examples, %d features", model_kind, len(train), n_features)
    return 0


def cmd_predict(model_path: str, input_path: str, top: int, stdout=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    model = models.load_model(model_path)
    base = Path(model_path)
    with open(base.with_suffix(base.suffix + ".meta.json"), encoding="utf-8") as fh:
        meta = json.load(fh)
    spec = features.NGramSpec(**meta["ngram"])
    labels = meta["labels"]
    hash_dim = meta["hash_dim"]
    vocab = None
    if hash_dim is None:
        vocab = features.Vocabulary.load_csv(
            base.with_suffix(base.suffix + ".vocab.csv"),
            spec,
            n_docs=meta["vocab_docs"],
            min_df=meta["min_df"],
        )
        if len(vocab) != model.n_features:
            raise RuntimeError(
                f"vocabulary size {len(vocab)} does not match model "
                f"feature count {model.n_features}"
            )
    idf = None
    if meta["weighting"] == "tfidf":
        idf = features.IdfTable.load_csv(base.with_suffix(base.suffix + ".idf.csv"))
        if len(idf.idf) != model.n_features:
            raise RuntimeError("idf table does not match model feature count")
    if len(labels) != model.n_classes:
        raise RuntimeError("label list does not match model class count")

    if input_path == "-":
        lines = [line.rstrip("\n") for line in sys.stdin]
    else:
        with open(input_path, encoding="utf-8") as fh:
            lines = [line.rstrip("\n") for line in fh]

    for line in lines:
        text = normalize.normalize_text(cleaning.clean(line), meta["normalizer"])
        if hash_dim is not None:
            vector = features.vectorize_fc_hashed(text, spec, hash_dim)
        else:
            vector = features.vectorize_fc(text, vocab)
        if idf is not None:
            vector = features.apply_tfidf(vector, idf)
        if isinstance(model, models.MNBModel):
            _, scores = models.mnb_predict(model, vector)
        else:
            _, scores = models.linear_predict(model, vector)
        order = np.argsort(-scores, kind="stable")[:top]
        stdout.write("\t".join(labels[i] for i in order) + "\n")
    return 0


def _expand_grid(grid_config: dict) -> tuple[list[evaluation.ExperimentConfig], float, int]:
    grid = grid_config.get("grid", {})
    seed = int(grid.get("seed", 0))
    train_fraction = float(grid.get("train_fraction", 0.7))
    settings = models.TrainSettings(
        c_reg=float(grid.get("c_reg", 1.0)),
        alpha=float(grid.get("alpha", 1.0)),
        max_iters=int(grid.get("max_iters", 1000)),
        tol=float(grid.get("tol", 1e-6)),
        seed=seed,
    )
    default_min_df = int(grid.get("min_df", 1))
    configs: list[evaluation.ExperimentConfig] = []
    seen = set()
    for sweep in grid.get("sweeps", []):
        specs: list[features.NGramSpec] = []
        for level in sweep.get("levels", ["char", "word"]):
            for n in sweep.get("individual", []):
                specs.append(features.NGramSpec(level, int(n), int(n)))
            for n in sweep.get("combined", []):
                specs.append(features.NGramSpec(level, 1, int(n)))
        for text in sweep.get("ngrams", []):
            specs.append(features.NGramSpec.parse(text))
        hash_dim = sweep.get("hash_dim")
        min_df = int(sweep.get("min_df", default_min_df))
        for model_kind in sweep.get("models", ["mnb", "svm"]):
            for weighting in sweep.get("weightings", ["fc", "tfidf"]):
                for normalizer in sweep.get("normalizers", ["none"]):
                    mode = _NORMALIZER_ALIASES.get(normalizer, normalizer)
                    for spec in specs:
                        config = evaluation.ExperimentConfig(
                            model=model_kind,
                            weighting=weighting,
                            spec=spec,
                            normalizer=mode,
                            train_settings=settings,
                            min_df=min_df,
                            hash_dim=int(hash_dim) if hash_dim is not None else None,
                        )
                        if config not in seen:
                            seen.add(config)
                            configs.append(config)
    if not configs:
        raise RuntimeError("grid file defines no cells")
    return configs, train_fraction, seed


def _load_grid_file(value: str) -> dict:
    if value == "paper_grid":
        text = resources.files("microtext.data").joinpath("paper_grid.toml").read_bytes()
        return tomli.loads(text.decode("utf-8"))
    with open(value, "rb") as handle:
        return tomli.load(handle)


def cmd_experiment(data_dir: str, grid_value: str, jobs: int, out_dir: str) -> int:
    grid_config = _load_grid_file(grid_value)
    configs, train_fraction, seed = _expand_grid(grid_config)
    examples, _ = _load_data_dir(data_dir)
    train, test = corpus.split(
        examples, corpus.SplitSpec(train_fraction=train_fraction, seed=seed)
    )
    rows = evaluation.run_grid(configs, train, test, jobs=jobs)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    evaluation.write_grid_csv(rows, out / "grid.csv")
    evaluation.write_summary_csv(rows, out / "summary.csv")
    evaluation.write_series_csvs(
        rows, out / "series_individual.csv", out / "series_combined.csv"
    )
    n_ok = sum(1 for r in rows if not r.status.startswith("error"))
    log.info("%d/%d grid cells succeeded", n_ok, len(rows))
    if n_ok == 0:
        raise RuntimeError("every grid cell failed")
    return 0


def main(argv: list[str] | None = None) -> int:
    _setup_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    config = _load_config(args.config)

    try:
        if args.command == "clean":
            return cmd_clean()
        if args.command == "ingest":
            return cmd_ingest(
                input_path=_require(parser, _merged(args, config, "input"), "--input"),
                fmt=_merged(args, config, "format", "jsonl"),
                top_k=int(_merged(args, config, "top-k", 50)),
                out_dir=_require(parser, _merged(args, config, "out"), "--out"),
            )
        if args.command == "train":
            settings = models.TrainSettings(
                c_reg=float(_merged(args, config, "c-reg", 1.0)),
                alpha=float(_merged(args, config, "alpha", 1.0)),
                max_iters=int(_merged(args, config, "max-iters", 1000)),
                tol=float(_merged(args, config, "tol", 1e-6)),
                seed=int(_merged(args, config, "seed", 0)),
            )
            ngram = _merged(args, config, "ngram")
            if isinstance(ngram, str):
                ngram = features.NGramSpec.parse(ngram)
            hash_dim = _merged(args, config, "hash-dim")
            return cmd_train(
                data_dir=_require(parser, _merged(args, config, "data"), "--data"),
                model_kind=_require(parser, _merged(args, config, "model"), "--model"),
                weighting=_merged(args, config, "weighting", "fc"),
                spec=_require(parser, ngram, "--ngram"),
                normalizer=_merged(args, config, "normalizer", "none"),
                settings=settings,
                train_fraction=float(_merged(args, config, "train-fraction", 0.7)),
                min_df=int(_merged(args, config, "min-df", 1)),
                hash_dim=int(hash_dim) if hash_dim is not None else None,
                out_path=_require(parser, _merged(args, config, "out"), "--out"),
            )
        if args.command == "predict":
            return cmd_predict(
                model_path=_require(parser, _merged(args, config, "model"), "--model"),
                input_path=_require(parser, _merged(args, config, "input"), "--input"),
                top=int(_merged(args, config, "top", 1)),
            )
        if args.command == "experiment":
            grid_value = _require(parser, _merged(args, config, "grid"), "--grid")
            if grid_value != "paper_grid" and not Path(grid_value).exists():
                parser.error(f"grid file not found: {grid_value}")
            return cmd_experiment(
                data_dir=_require(parser, _merged(args, config, "data"), "--data"),
                grid_value=grid_value,
                jobs=int(_merged(args, config, "jobs", 1)),
                out_dir=_require(parser, _merged(args, config, "out"), "--out"),
            )
        raise AssertionError(f"unhandled command {args.command}")
    except (OSError, RuntimeError, ValueError, models.ModelFormatError) as exc:
        log.error("%s", exc)
        print(f"microtext: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
