"""Micro-text multi-class classification toolkit.

Pipeline pieces: tweet ingestion and splitting (:mod:`microtext.corpus`),
deterministic cleaning (:mod:`microtext.cleaning`), stemming and
lemmatization (:mod:`microtext.normalize`), char/word n-gram FC and
TF-IDF features (:mod:`microtext.features`), naive Bayes and linear
learners (:mod:`microtext.models`), and the accuracy metric plus
experiment-grid runner (:mod:`microtext.evaluation`).
"""

from .cleaning import CleaningPipeline, clean, strip_hashtags
from .corpus import (
    LabelIndex,
    LabeledExample,
    SplitSpec,
    Tweet,
    ingest,
    label_examples,
    select_labels,
    split,
)
from .evaluation import ExperimentConfig, ReportRow, accuracy, run_experiment, run_grid
from .features import (
    IdfTable,
    NGramSpec,
    SparseVector,
    Vocabulary,
    build_vocabulary,
    extract_ngrams,
    fit_idf,
    vectorize_fc,
    vectorize_fc_hashed,
    vectorize_tfidf,
)
from .models import (
    LinearModel,
    MNBModel,
    TrainSettings,
    linear_predict,
    load_model,
    lr_fit,
    mnb_fit,
    mnb_predict,
    save_model,
    svm_fit,
)
from .normalize import lemmatize, normalize_text, porter_stem, pos_tag

__version__ = "0.1.0"

__all__ = [
    "CleaningPipeline",
    "ExperimentConfig",
    "IdfTable",
    "LabelIndex",
    "LabeledExample",
    "LinearModel",
    "MNBModel",
    "NGramSpec",
    "ReportRow",
    "SparseVector",
    "SplitSpec",
    "TrainSettings",
    "Tweet",
    "Vocabulary",
    "accuracy",
    "build_vocabulary",
    "clean",
    "extract_ngrams",
    "fit_idf",
    "ingest",
    "label_examples",
    "lemmatize",
    "linear_predict",
    "load_model",
    "lr_fit",
    "mnb_fit",
    "mnb_predict",
    "normalize_text",
    "porter_stem",
    "pos_tag",
    "run_experiment",
    "run_grid",
    "save_model",
    "select_labels",
    "split",
    "strip_hashtags",
    "svm_fit",
    "vectorize_fc",
    "vectorize_fc_hashed",
    "vectorize_tfidf",
]
