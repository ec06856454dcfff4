"""Baseline learners: multinomial naive Bayes, one-vs-rest linear SVM with
squared hinge loss, and L2-regularized multinomial logistic regression.

The linear models share a deterministic full-batch gradient descent with
Armijo backtracking, so the objective decreases monotonically and runs
are reproducible without randomness.  Training stops when the relative
objective change drops below ``tol`` or after ``max_iters`` accepted
steps.  Biases are trained but excluded from the regularization term.

Models serialize to a small binary format: magic ``MTXT``, a u16
version, a kind tag, dimension header, little-endian float64 parameter
blocks and a trailing CRC32.
"""

from __future__ import annotations

import math
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.special import logsumexp

from .features import SparseVector, to_csr

__all__ = [
    "LinearModel",
    "MNBModel",
    "ModelChecksumError",
    "ModelFormatError",
    "ModelTruncationError",
    "ModelVersionError",
    "TrainSettings",
    "TrainingMeta",
    "linear_predict",
    "linear_predict_many",
    "load_model",
    "lr_fit",
    "lr_objective",
    "mnb_fit",
    "mnb_predict",
    "mnb_predict_many",
    "save_model",
    "squared_hinge_objective",
    "svm_fit",
]

MAGIC = b"MTXT"
FORMAT_VERSION = 1
_KIND_TAGS = {"mnb": 1, "svm": 2, "lr": 3}
_TAG_KINDS = {v: k for k, v in _KIND_TAGS.items()}


class ModelFormatError(Exception):
    """Base class for model (de)serialization failures."""


class ModelVersionError(ModelFormatError):
    """Magic bytes or format version do not match."""


class ModelTruncationError(ModelFormatError):
    """File ends before the declared payload does."""


class ModelChecksumError(ModelFormatError):
    """CRC32 mismatch or trailing garbage."""


@dataclass(frozen=True)
class TrainSettings:
    """Fixed hyperparameters plus the convergence contract."""

    c_reg: float = 1.0
    alpha: float = 1.0
    max_iters: int = 1000
    tol: float = 1e-6
    seed: int = 0

    def __post_init__(self) -> None:
        if self.tol <= 0.0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.c_reg <= 0.0:
            raise ValueError("c_reg must be positive")
        if self.alpha <= 0.0:
            raise ValueError("alpha must be positive")


@dataclass(frozen=True)
class TrainingMeta:
    """Accepted-step counts and final objectives, one entry per solved
    problem (per class for OVR SVM, a single entry for multinomial LR)."""

    iterations: tuple[int, ...]
    final_objective: tuple[float, ...]


@dataclass(frozen=True)
class MNBModel:
    """Log priors and per-class log likelihoods of a multinomial NB."""

    log_prior: np.ndarray
    log_likelihood: np.ndarray
    alpha: float
    n_classes: int
    n_features: int

    def validate(self) -> None:
        if abs(float(np.exp(self.log_prior).sum()) - 1.0) > 1e-9:
            raise ValueError("class priors must sum to 1")
        if self.n_features > 0:
            sums = np.exp(self.log_likelihood).sum(axis=1)
            if np.max(np.abs(sums - 1.0)) > 1e-9:
                raise ValueError("per-class likelihoods must sum to 1")


@dataclass(frozen=True)
class LinearModel:
    """Weight matrix and bias of an OVR SVM or multinomial LR."""

    kind: str
    weights: np.ndarray
    bias: np.ndarray
    c_reg: float
    training_meta: TrainingMeta = field(
        default_factory=lambda: TrainingMeta((), ())
    )

    def __post_init__(self) -> None:
        if self.kind not in ("svm", "lr"):
            raise ValueError(f"kind must be 'svm' or 'lr', got {self.kind!r}")
        if self.c_reg <= 0.0:
            raise ValueError("c_reg must be positive")
        if not (np.all(np.isfinite(self.weights)) and np.all(np.isfinite(self.bias))):
            raise ValueError("model parameters must be finite")

    @property
    def n_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def n_features(self) -> int:
        return self.weights.shape[1]


def _check_training_inputs(
    X: list[SparseVector], y: list[int], n_features: int | None
) -> tuple[sp.csr_matrix, np.ndarray, int]:
    if len(X) != len(y) or not X:
        raise ValueError("X and y must be nonempty and parallel")
    labels = np.asarray(y, dtype=np.int64)
    if labels.min() < 0:
        raise ValueError("class ids must be nonnegative")
    n_classes = int(labels.max()) + 1
    counts = np.bincount(labels, minlength=n_classes)
    missing = np.flatnonzero(counts == 0)
    if missing.size:
        raise ValueError(f"classes absent from training data: {missing.tolist()}")
    if n_features is None:
        n_features = 1 + max((v.indices[-1] for v in X if len(v)), default=-1)
    return to_csr(X, n_features), labels, n_classes


def mnb_fit(
    X: list[SparseVector],
    y: list[int],
    alpha: float = 1.0,
    n_features: int | None = None,
) -> MNBModel:
    """Fit a multinomial NB with additive smoothing ``alpha``.

    Feature values must be nonnegative but may be fractional, so TF-IDF
    vectors train the same way raw counts do.
    """
    if alpha <= 0.0:
        raise ValueError("alpha must be positive")
    matrix, labels, n_classes = _check_training_inputs(X, y, n_features)
    if matrix.nnz and matrix.data.min() < 0.0:
        raise ValueError("multinomial NB requires nonnegative feature values")
    n_docs, V = matrix.shape
    class_counts = np.bincount(labels, minlength=n_classes).astype(np.float64)
    log_prior = np.log(class_counts / n_docs)
    feature_counts = np.zeros((n_classes, V))
    for c in range(n_classes):
        rows = np.flatnonzero(labels == c)
        feature_counts[c] = np.asarray(matrix[rows].sum(axis=0)).ravel()
    smoothed = feature_counts + alpha
    totals = alpha * V + feature_counts.sum(axis=1, keepdims=True)
    if V > 0:
        log_likelihood = np.log(smoothed) - np.log(totals)
    else:
        log_likelihood = np.zeros((n_classes, 0))
    return MNBModel(
        log_prior=log_prior,
        log_likelihood=log_likelihood,
        alpha=alpha,
        n_classes=n_classes,
        n_features=V,
    )


def _check_vector_dims(x: SparseVector, n_features: int) -> None:
    if len(x) and x.indices[-1] >= n_features:
        raise ValueError(
            f"vector index {x.indices[-1]} out of range for {n_features} features"
        )


def mnb_predict(model: MNBModel, x: SparseVector) -> tuple[int, np.ndarray]:
    """Return (argmax class, normalized log-posteriors).

    Ties resolve to the smallest class id; an empty vector falls back to
    the priors alone.
    """
    _check_vector_dims(x, model.n_features)
    scores = model.log_prior.copy()
    for index, value in zip(x.indices, x.values):
        scores += value * model.log_likelihood[:, index]
    log_posterior = scores - logsumexp(scores)
    return int(np.argmax(scores)), log_posterior


def mnb_predict_many(model: MNBModel, X: list[SparseVector]) -> np.ndarray:
    """Vectorized argmax predictions for a batch."""
    matrix = to_csr(X, model.n_features)
    scores = matrix @ model.log_likelihood.T + model.log_prior
    return np.argmax(scores, axis=1)


def _minimize(fun_grad, x0: np.ndarray, tol: float, max_iters: int):
    """Monotone gradient descent: Barzilai-Borwein trial steps safeguarded
    by Armijo backtracking.

    Returns (x, history) where history[k] is the objective after k
    accepted steps; history is strictly decreasing while the gradient is
    nonzero.  Deterministic: no randomness anywhere.
    """
    x = x0
    f, g = fun_grad(x)
    history = [f]
    g_norm2 = float(np.dot(g, g))
    if g_norm2 <= 1e-24:
        return x, history
    # probe the curvature along -g so the first trial step is well scaled;
    # a fixed step of 1.0 can be so small that the relative-change stop
    # fires before any progress is made
    probe = 1e-6 / math.sqrt(g_norm2)
    _, g_probe = fun_grad(x - probe * g)
    curvature_norm = float(np.linalg.norm(g_probe - g)) / (probe * math.sqrt(g_norm2))
    step = 1.0 / curvature_norm if curvature_norm > 0.0 else 1.0
    step = min(max(step, 1e-12), 1e12)
    prev_x: np.ndarray | None = None
    prev_g: np.ndarray | None = None
    for _ in range(max_iters):
        g_norm2 = float(np.dot(g, g))
        if g_norm2 <= 1e-24:
            break
        if prev_x is not None:
            dx = x - prev_x
            dg = g - prev_g
            curvature = float(np.dot(dx, dg))
            if curvature > 0.0:
                # BB1 step adapts to local curvature far better than any
                # fixed growth schedule
                step = float(np.dot(dx, dx)) / curvature
            else:
                step *= 2.0
            step = min(max(step, 1e-12), 1e12)
        accepted = False
        while step >= 1e-20:
            candidate = x - step * g
            f_new, g_new = fun_grad(candidate)
            if np.isfinite(f_new) and f_new <= f - 1e-4 * step * g_norm2:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        rel_drop = (f - f_new) / max(abs(f), 1e-12)
        prev_x, prev_g = x, g
        x, f, g = candidate, f_new, g_new
        history.append(f)
        if rel_drop < tol:
            break
    return x, history


def squared_hinge_objective(
    w: np.ndarray, b: float, X: sp.csr_matrix, s: np.ndarray, c_reg: float
) -> float:
    """0.5 ||w||^2 + C * sum_i max(0, 1 - s_i (w.x_i + b))^2."""
    margins = 1.0 - s * (X @ w + b)
    active = np.maximum(margins, 0.0)
    return 0.5 * float(np.dot(w, w)) + c_reg * float(np.dot(active, active))


def _squared_hinge_fun_grad(X: sp.csr_matrix, s: np.ndarray, c_reg: float):
    n_features = X.shape[1]

    def fun_grad(theta: np.ndarray):
        w, b = theta[:n_features], theta[n_features]
        margins = 1.0 - s * (X @ w + b)
        active = np.maximum(margins, 0.0)
        f = 0.5 * float(np.dot(w, w)) + c_reg * float(np.dot(active, active))
        pull = active * s
        grad_w = w - 2.0 * c_reg * (X.T @ pull)
        grad_b = -2.0 * c_reg * float(pull.sum())
        return f, np.concatenate([grad_w, [grad_b]])

    return fun_grad


def fit_binary_squared_hinge(
    X: sp.csr_matrix, s: np.ndarray, c_reg: float, tol: float, max_iters: int
) -> tuple[np.ndarray, float, list[float]]:
    """Solve one binary squared-hinge problem from the zero vector.

    Returns (w, b, objective history); the history starts at the
    zero-vector objective C*N and never increases.
    """
    theta0 = np.zeros(X.shape[1] + 1)
    theta, history = _minimize(
        _squared_hinge_fun_grad(X, s, c_reg), theta0, tol, max_iters
    )
    return theta[:-1], float(theta[-1]), history


def svm_fit(
    X: list[SparseVector],
    y: list[int],
    settings: TrainSettings = TrainSettings(),
    n_features: int | None = None,
) -> LinearModel:
    """Train one-vs-rest linear SVMs with squared hinge loss and L2 penalty."""
    matrix, labels, n_classes = _check_training_inputs(X, y, n_features)
    if n_classes < 2:
        raise ValueError("SVM training needs at least 2 classes")
    V = matrix.shape[1]
    weights = np.zeros((n_classes, V))
    bias = np.zeros(n_classes)
    iterations = []
    objectives = []
    for c in range(n_classes):
        signs = np.where(labels == c, 1.0, -1.0)
        w, b, history = fit_binary_squared_hinge(
            matrix, signs, settings.c_reg, settings.tol, settings.max_iters
        )
        if not np.isfinite(history[-1]):
            raise ValueError(f"non-finite SVM objective for class {c}")
        weights[c], bias[c] = w, b
        iterations.append(len(history) - 1)
        objectives.append(history[-1])
    return LinearModel(
        kind="svm",
        weights=weights,
        bias=bias,
        c_reg=settings.c_reg,
        training_meta=TrainingMeta(tuple(iterations), tuple(objectives)),
    )


def lr_objective(
    W: np.ndarray, b: np.ndarray, X: sp.csr_matrix, y: np.ndarray, c_reg: float
) -> float:
    """Mean negative log-likelihood plus (1 / 2CN) ||W||_F^2.

    Scaling the penalty by 1/N makes this the standard sum-loss
    formulation divided by N, so ``c_reg`` carries the same meaning as
    the SVM's C; the gradient at W=0 is the mean of
    (softmax - onehot) x x over the data.
    """
    scores = X @ W.T + b
    log_probs = scores - logsumexp(scores, axis=1, keepdims=True)
    nll = -float(log_probs[np.arange(len(y)), y].mean())
    return nll + 0.5 / (c_reg * X.shape[0]) * float(np.sum(W * W))


def _lr_fun_grad(X: sp.csr_matrix, y: np.ndarray, n_classes: int, c_reg: float):
    n_docs, n_features = X.shape
    onehot_rows = np.arange(n_docs)

    reg = 1.0 / (c_reg * n_docs)

    def fun_grad(theta: np.ndarray):
        W = theta[: n_classes * n_features].reshape(n_classes, n_features)
        b = theta[n_classes * n_features :]
        scores = X @ W.T + b
        log_probs = scores - logsumexp(scores, axis=1, keepdims=True)
        nll = -float(log_probs[onehot_rows, y].mean())
        f = nll + 0.5 * reg * float(np.sum(W * W))
        probs = np.exp(log_probs)
        probs[onehot_rows, y] -= 1.0
        probs /= n_docs
        grad_W = probs.T @ X + reg * W
        grad_W = np.asarray(grad_W)
        grad_b = probs.sum(axis=0)
        return f, np.concatenate([grad_W.ravel(), grad_b])

    return fun_grad


def lr_fit(
    X: list[SparseVector],
    y: list[int],
    settings: TrainSettings = TrainSettings(),
    n_features: int | None = None,
) -> LinearModel:
    """Train multinomial logistic regression (softmax, unregularized bias)."""
    matrix, labels, n_classes = _check_training_inputs(X, y, n_features)
    if n_classes < 2:
        raise ValueError("LR training needs at least 2 classes")
    V = matrix.shape[1]
    theta0 = np.zeros(n_classes * V + n_classes)
    theta, history = _minimize(
        _lr_fun_grad(matrix, labels, n_classes, settings.c_reg),
        theta0,
        settings.tol,
        settings.max_iters,
    )
    if not np.isfinite(history[-1]):
        raise ValueError("non-finite LR objective")
    return LinearModel(
        kind="lr",
        weights=theta[: n_classes * V].reshape(n_classes, V),
        bias=theta[n_classes * V :],
        c_reg=settings.c_reg,
        training_meta=TrainingMeta((len(history) - 1,), (history[-1],)),
    )


def linear_predict(model: LinearModel, x: SparseVector) -> tuple[int, np.ndarray]:
    """Return (argmax class, per-class scores); ties pick the smallest id."""
    _check_vector_dims(x, model.n_features)
    scores = model.bias.copy()
    for index, value in zip(x.indices, x.values):
        scores += value * model.weights[:, index]
    return int(np.argmax(scores)), scores


def linear_predict_many(model: LinearModel, X: list[SparseVector]) -> np.ndarray:
    """Vectorized argmax predictions for a batch."""
    matrix = to_csr(X, model.n_features)
    scores = matrix @ model.weights.T + model.bias
    return np.argmax(scores, axis=1)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def _pack_f64(array: np.ndarray) -> bytes:
    return np.ascontiguousarray(array, dtype="<f8").tobytes()


def save_model(model: MNBModel | LinearModel, path: str | Path) -> None:
    """Write the binary model file (header, payload, trailing CRC32)."""
    parts = [MAGIC, struct.pack("<H", FORMAT_VERSION)]
    if isinstance(model, MNBModel):
        parts.append(struct.pack("<B", _KIND_TAGS["mnb"]))
        parts.append(struct.pack("<dII", model.alpha, model.n_classes, model.n_features))
        parts.append(_pack_f64(model.log_prior))
        parts.append(_pack_f64(model.log_likelihood))
    else:
        parts.append(struct.pack("<B", _KIND_TAGS[model.kind]))
        meta = model.training_meta
        parts.append(
            struct.pack(
                "<dIII",
                model.c_reg,
                model.n_classes,
                model.n_features,
                len(meta.iterations),
            )
        )
        parts.append(_pack_f64(model.weights))
        parts.append(_pack_f64(model.bias))
        parts.append(struct.pack(f"<{len(meta.iterations)}I", *meta.iterations))
        parts.append(_pack_f64(np.asarray(meta.final_objective)))
    blob = b"".join(parts)
    with open(path, "wb") as handle:
        handle.write(blob)
        handle.write(struct.pack("<I", zlib.crc32(blob)))


class _Reader:
    def __init__(self, blob: bytes) -> None:
        self.blob = blob
        self.offset = 0

    def take(self, n: int) -> bytes:
        if self.offset + n > len(self.blob):
            raise ModelTruncationError(
                f"need {self.offset + n} bytes, file has {len(self.blob)}"
            )
        chunk = self.blob[self.offset : self.offset + n]
        self.offset += n
        return chunk

    def f64_block(self, count: int) -> np.ndarray:
        return np.frombuffer(self.take(8 * count), dtype="<f8").copy()


def load_model(path: str | Path) -> MNBModel | LinearModel:
    """Read a model file, verifying magic, version, size and checksum."""
    with open(path, "rb") as handle:
        raw = handle.read()
    if len(raw) < len(MAGIC) + 2 + 1 + 4:
        raise ModelTruncationError(f"file too short ({len(raw)} bytes)")
    body, crc_bytes = raw[:-4], raw[-4:]
    reader = _Reader(body)
    if reader.take(4) != MAGIC:
        raise ModelVersionError("bad magic bytes")
    version = struct.unpack("<H", reader.take(2))[0]
    if version != FORMAT_VERSION:
        raise ModelVersionError(f"unsupported format version {version}")
    tag = struct.unpack("<B", reader.take(1))[0]
    kind = _TAG_KINDS.get(tag)
    if kind is None:
        raise ModelVersionError(f"unknown model kind tag {tag}")
    if kind == "mnb":
        alpha, n_classes, n_features = struct.unpack("<dII", reader.take(16))
        payload = 8 * (n_classes + n_classes * n_features)
    else:
        c_reg, n_classes, n_features, n_meta = struct.unpack("<dIII", reader.take(20))
        payload = 8 * (n_classes * n_features + n_classes + n_meta) + 4 * n_meta
    declared = reader.offset + payload
    if len(body) < declared:
        raise ModelTruncationError(f"need {declared + 4} bytes, file has {len(raw)}")
    if len(body) > declared:
        raise ModelChecksumError(f"{len(body) - declared} unexpected trailing bytes")
    if struct.unpack("<I", crc_bytes)[0] != zlib.crc32(body):
        raise ModelChecksumError("CRC32 mismatch")
    if kind == "mnb":
        log_prior = reader.f64_block(n_classes)
        log_likelihood = reader.f64_block(n_classes * n_features).reshape(
            n_classes, n_features
        )
        return MNBModel(
            log_prior=log_prior,
            log_likelihood=log_likelihood,
            alpha=alpha,
            n_classes=n_classes,
            n_features=n_features,
        )
    weights = reader.f64_block(n_classes * n_features).reshape(n_classes, n_features)
    bias = reader.f64_block(n_classes)
    iterations = struct.unpack(f"<{n_meta}I", reader.take(4 * n_meta))
    objectives = reader.f64_block(n_meta)
    return LinearModel(
        kind=kind,
        weights=weights,
        bias=bias,
        c_reg=c_reg,
        training_meta=TrainingMeta(iterations, tuple(objectives)),
    )
