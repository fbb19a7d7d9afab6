"""Supervised reaction classification: count vectors + softmax regression.

The feature side is a deterministic bag-of-words vocabulary (document
frequency cutoff, ordered by descending df with lexicographic
tie-breaks) and the model is multinomial logistic regression trained by
full-batch gradient descent. Full-batch keeps training bit-reproducible
for a given seed, which matters more than speed at the few-hundred- to
few-thousand-document scale this targets.

Two surfaces are provided: plain functions mirroring the pipeline
operations (build_vocabulary / vectorize / train / predict / ...) and
scikit-learn style estimators (TokenCountVectorizer, ReactionClassifier)
so the pieces compose with Pipeline, model selection, and the rest of
that ecosystem.
"""

from __future__ import annotations

import datetime as dt
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable, Mapping, Optional, Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin, TransformerMixin
from sklearn.exceptions import NotFittedError

from .corpus import TweetRecord
from .errors import (
    ComputationError,
    EmptyWindowError,
    ModelFileError,
    TrainingDivergedError,
    ValidationError,
)
from .eventstat import Event

__all__ = [
    "Vocabulary",
    "TrainConfig",
    "ReactionModel",
    "build_vocabulary",
    "vectorize",
    "softmax",
    "loss_and_grad",
    "train",
    "predict",
    "save_model",
    "load_model",
    "stratified_split",
    "predicted_event_counts",
    "EventClassCounts",
    "TokenCountVectorizer",
    "ReactionClassifier",
]

TokenSeq = Sequence[str]
DocVector = dict[int, int]

MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class Vocabulary:
    """Deterministically ordered token list with its index map."""

    tokens: tuple[str, ...]
    min_df: int
    index: Mapping[str, int] = field(repr=False, default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        if self.index is None:
            object.__setattr__(self, "index", {t: i for i, t in enumerate(self.tokens)})

    def __len__(self) -> int:
        return len(self.tokens)

    def __contains__(self, token: str) -> bool:
        return token in self.index


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float = 0.1
    epochs: int = 500
    l2: float = 1e-3
    tol: float = 1e-7
    seed: int = 42
    balanced_class_weights: bool = False

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValidationError("learning_rate must be > 0")
        if self.epochs < 1:
            raise ValidationError("epochs must be >= 1")
        if self.l2 < 0:
            raise ValidationError("l2 must be >= 0")


@dataclass(frozen=True)
class ReactionModel:
    """Trained classifier: class x vocabulary weights, biases, vocabulary."""

    classes: tuple[str, ...]
    weights: np.ndarray  # (C, V)
    bias: np.ndarray  # (C,)
    vocabulary: Vocabulary
    config: TrainConfig
    final_loss: float
    epochs_run: int

    def predict(self, doc: TokenSeq) -> tuple[str, np.ndarray]:
        return predict(self, doc)


def build_vocabulary(docs: Sequence[TokenSeq], min_df: int = 1) -> Vocabulary:
    """Tokens appearing in at least ``min_df`` distinct documents.

    Ordering is descending document frequency with lexicographic
    tie-breaks, so the result is invariant under document reordering.
    """
    if not docs:
        raise ValidationError("cannot build a vocabulary from zero documents")
    if min_df < 1:
        raise ValidationError(f"min_df must be >= 1, got {min_df}")
    df: dict[str, int] = {}
    for doc in docs:
        for token in set(doc):
            df[token] = df.get(token, 0) + 1
    kept = sorted(
        (t for t, n in df.items() if n >= min_df),
        key=lambda t: (-df[t], t),
    )
    if not kept:
        raise ValidationError(f"no token appears in >= {min_df} documents; vocabulary is empty")
    return Vocabulary(tokens=tuple(kept), min_df=min_df)


def vectorize(doc: TokenSeq, vocab: Vocabulary) -> DocVector:
    """Sparse counts of in-vocabulary tokens; everything else is ignored."""
    counts: DocVector = {}
    for token in doc:
        idx = vocab.index.get(token)
        if idx is not None:
            counts[idx] = counts.get(idx, 0) + 1
    return counts


def _to_matrix(X: Sequence[DocVector], n_features: int) -> np.ndarray:
    mat = np.zeros((len(X), n_features), dtype=np.float64)
    for row, vec in enumerate(X):
        for idx, count in vec.items():
            if not (0 <= idx < n_features):
                raise ValidationError(f"document {row} holds index {idx} outside vocabulary of size {n_features}")
            mat[row, idx] = count
    return mat


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise stable softmax (max-subtracted)."""
    z = np.asarray(logits, dtype=np.float64)
    z = z - np.max(z, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


def _ce_loss_grad(
    weights: np.ndarray,
    bias: np.ndarray,
    X: np.ndarray,
    y_idx: np.ndarray,
    l2: float,
    sample_weight: Optional[np.ndarray] = None,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Mean (weighted) cross-entropy + (l2/2)*||W||^2 and its gradient."""
    n = X.shape[0]
    probs = softmax(X @ weights.T + bias)  # (n, C)
    picked = np.clip(probs[np.arange(n), y_idx], 1e-300, None)
    if sample_weight is None:
        loss = -float(np.mean(np.log(picked)))
        resid = probs
        resid[np.arange(n), y_idx] -= 1.0
        resid /= n
    else:
        wsum = float(np.sum(sample_weight))
        loss = -float(np.sum(sample_weight * np.log(picked)) / wsum)
        resid = probs * (sample_weight / wsum)[:, None]
        resid[np.arange(n), y_idx] -= sample_weight / wsum
    grad_w = resid.T @ X + l2 * weights
    grad_b = resid.sum(axis=0)
    loss += 0.5 * l2 * float(np.sum(weights * weights))
    return loss, grad_w, grad_b


def loss_and_grad(
    model: ReactionModel, X: Sequence[DocVector], y: Sequence[str]
) -> tuple[float, np.ndarray, np.ndarray]:
    """Regularized loss and analytic gradient at the model's parameters."""
    if len(X) != len(y):
        raise ValidationError(f"got {len(X)} documents but {len(y)} labels")
    class_index = {c: i for i, c in enumerate(model.classes)}
    try:
        y_idx = np.array([class_index[label] for label in y], dtype=np.int64)
    except KeyError as exc:
        raise ValidationError(f"label {exc.args[0]!r} not among model classes {model.classes}") from exc
    mat = _to_matrix(X, len(model.vocabulary))
    sw = _sample_weights(y_idx, len(model.classes)) if model.config.balanced_class_weights else None
    return _ce_loss_grad(model.weights, model.bias, mat, y_idx, model.config.l2, sw)


def _sample_weights(y_idx: np.ndarray, n_classes: int) -> np.ndarray:
    counts = np.bincount(y_idx, minlength=n_classes).astype(np.float64)
    class_w = len(y_idx) / (n_classes * np.clip(counts, 1.0, None))
    return class_w[y_idx]


def _gd_fit(
    X: np.ndarray,
    y_idx: np.ndarray,
    n_classes: int,
    config: TrainConfig,
) -> tuple[np.ndarray, np.ndarray, float, int]:
    """Full-batch gradient descent; returns (W, b, final_loss, epochs_run)."""
    rng = np.random.default_rng(config.seed)
    weights = rng.normal(0.0, 0.01, size=(n_classes, X.shape[1]))
    bias = np.zeros(n_classes, dtype=np.float64)
    sw = _sample_weights(y_idx, n_classes) if config.balanced_class_weights else None

    prev_loss = math.inf
    loss = math.inf
    epochs_run = 0
    for epoch in range(1, config.epochs + 1):
        loss, grad_w, grad_b = _ce_loss_grad(weights, bias, X, y_idx, config.l2, sw)
        if not math.isfinite(loss):
            raise TrainingDivergedError(
                f"loss became non-finite at epoch {epoch}; lower the learning rate"
            )
        weights -= config.learning_rate * grad_w
        bias -= config.learning_rate * grad_b
        epochs_run = epoch
        if abs(prev_loss - loss) < config.tol:
            break
        prev_loss = loss
    return weights, bias, float(loss), epochs_run


def train(
    X: Sequence[DocVector],
    y: Sequence[str],
    classes: Sequence[str],
    config: TrainConfig,
    vocabulary: Vocabulary,
) -> ReactionModel:
    """Fit the softmax regression on pre-vectorized documents.

    ``classes`` fixes both the weight-row order and the prediction
    tie-break order. Training is a pure function of its arguments:
    repeated calls produce bit-identical models.
    """
    classes = tuple(classes)
    if len(classes) < 2:
        raise ValidationError(f"need at least 2 classes, got {classes}")
    if len(set(classes)) != len(classes):
        raise ValidationError("classes must be distinct")
    if len(X) != len(y):
        raise ValidationError(f"got {len(X)} documents but {len(y)} labels")
    if len(X) < len(classes):
        raise ValidationError("need at least as many documents as classes")
    class_index = {c: i for i, c in enumerate(classes)}
    unknown = sorted(set(y) - set(classes))
    if unknown:
        raise ValidationError(f"labels {unknown} not in classes {classes}")
    if len(set(y)) < 2:
        raise ValidationError("training labels collapse to a single class; nothing to separate")

    y_idx = np.array([class_index[label] for label in y], dtype=np.int64)
    mat = _to_matrix(X, len(vocabulary))
    weights, bias, final_loss, epochs_run = _gd_fit(mat, y_idx, len(classes), config)
    return ReactionModel(
        classes=classes,
        weights=weights,
        bias=bias,
        vocabulary=vocabulary,
        config=config,
        final_loss=final_loss,
        epochs_run=epochs_run,
    )


def predict(model: ReactionModel, doc: TokenSeq) -> tuple[str, np.ndarray]:
    """Predicted label and class probabilities for one token sequence.

    Out-of-vocabulary tokens are ignored; a fully OOV document falls
    back to the bias-only logits. Ties go to the earliest class in the
    model's class order.
    """
    vec = vectorize(doc, model.vocabulary)
    logits = model.bias.copy()
    for idx, count in vec.items():
        logits += model.weights[:, idx] * count
    probs = softmax(logits)
    return model.classes[int(np.argmax(probs))], probs


def save_model(model: ReactionModel, path: str | Path) -> None:
    """Write the model as versioned JSON (vocabulary, weights, biases, config)."""
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "classes": list(model.classes),
        "vocabulary": {"tokens": list(model.vocabulary.tokens), "min_df": model.vocabulary.min_df},
        "weights": [[float(w) for w in row] for row in model.weights],
        "bias": [float(b) for b in model.bias],
        "config": {
            "learning_rate": model.config.learning_rate,
            "epochs": model.config.epochs,
            "l2": model.config.l2,
            "tol": model.config.tol,
            "seed": model.config.seed,
            "balanced_class_weights": model.config.balanced_class_weights,
        },
        "final_loss": model.final_loss,
        "epochs_run": model.epochs_run,
    }
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")


def load_model(path: str | Path) -> ReactionModel:
    """Read a model written by :func:`save_model`, validating shapes."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ModelFileError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelFileError(f"model file {path} is corrupt: {exc.msg}") from exc
    if not isinstance(payload, dict):
        raise ModelFileError(f"model file {path} is corrupt: not a JSON object")
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelFileError(f"model file {path} has unsupported format_version {version!r}")
    try:
        classes = tuple(str(c) for c in payload["classes"])
        vocab = Vocabulary(
            tokens=tuple(str(t) for t in payload["vocabulary"]["tokens"]),
            min_df=int(payload["vocabulary"]["min_df"]),
        )
        weights = np.array(payload["weights"], dtype=np.float64)
        bias = np.array(payload["bias"], dtype=np.float64)
        config = TrainConfig(**payload["config"])
        final_loss = float(payload["final_loss"])
        epochs_run = int(payload["epochs_run"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ModelFileError(f"model file {path} is corrupt: {exc}") from exc
    if weights.ndim != 2 or weights.shape != (len(classes), len(vocab)):
        raise ModelFileError(
            f"model file {path} is corrupt: weight shape {weights.shape} does not match "
            f"{len(classes)} classes x {len(vocab)} tokens"
        )
    if bias.shape != (len(classes),):
        raise ModelFileError(f"model file {path} is corrupt: bias shape {bias.shape}")
    return ReactionModel(
        classes=classes,
        weights=weights,
        bias=bias,
        vocabulary=vocab,
        config=config,
        final_loss=final_loss,
        epochs_run=epochs_run,
    )


def stratified_split(
    labels: Sequence[str], test_fraction: float = 0.2, seed: int = 42
) -> tuple[list[int], list[int]]:
    """Seeded per-class index split; returns (train_idx, test_idx).

    Every class contributes round(count * test_fraction) test items
    (at least one when it has two or more). Order within each part is
    ascending, so the split is deterministic per seed.
    """
    if not (0.0 < test_fraction < 1.0):
        raise ValidationError(f"test_fraction must be in (0, 1), got {test_fraction}")
    rng = np.random.default_rng(seed)
    by_class: dict[str, list[int]] = {}
    for i, label in enumerate(labels):
        by_class.setdefault(label, []).append(i)
    test: list[int] = []
    for label in sorted(by_class):
        idxs = np.array(by_class[label])
        n_test = int(round(len(idxs) * test_fraction))
        if len(idxs) >= 2:
            n_test = min(max(n_test, 1), len(idxs) - 1)
        else:
            n_test = 0
        chosen = rng.permutation(len(idxs))[:n_test]
        test.extend(int(idxs[j]) for j in chosen)
    test_set = set(test)
    train = [i for i in range(len(labels)) if i not in test_set]
    return train, sorted(test)


@dataclass(frozen=True)
class EventClassCounts:
    """Predicted class tallies and proportions in one event window pair."""

    event: Event
    k: int
    before_counts: dict[str, int]
    after_counts: dict[str, int]
    before_proportions: dict[str, float]
    after_proportions: dict[str, float]
    n_before: int
    n_after: int


def window_proportions(counts: Mapping[str, int]) -> dict[str, float]:
    total = sum(counts.values())
    if total == 0:
        raise EmptyWindowError("no predictions in window")
    return {label: n / total for label, n in counts.items()}


def predicted_event_counts(
    records: Sequence[TweetRecord],
    model: ReactionModel,
    event: Event,
    k: int,
    prep: Callable[[str], TokenSeq],
) -> EventClassCounts:
    """Classify records in the k days before/after an event and tally.

    ``prep`` turns raw record text into the token sequence the model's
    vocabulary was built over. Records on the event day are excluded,
    matching the window convention of the statistics module.
    """
    one_day = dt.timedelta(days=1)
    windows = {
        "before": (event.date - dt.timedelta(days=k), event.date - one_day),
        "after": (event.date + one_day, event.date + dt.timedelta(days=k)),
    }
    counts = {side: {c: 0 for c in model.classes} for side in windows}
    for record in records:
        for side, (lo, hi) in windows.items():
            if lo <= record.date <= hi:
                label, _ = predict(model, prep(record.text))
                counts[side][label] += 1
    n_before = sum(counts["before"].values())
    n_after = sum(counts["after"].values())
    if n_before == 0:
        raise EmptyWindowError(f"no records in the {k} days before {event.name} ({event.date})")
    if n_after == 0:
        raise EmptyWindowError(f"no records in the {k} days after {event.name} ({event.date})")
    return EventClassCounts(
        event=event,
        k=k,
        before_counts=counts["before"],
        after_counts=counts["after"],
        before_proportions=window_proportions(counts["before"]),
        after_proportions=window_proportions(counts["after"]),
        n_before=n_before,
        n_after=n_after,
    )


class TokenCountVectorizer(TransformerMixin, BaseEstimator):
    """scikit-learn style wrapper over the deterministic count vocabulary.

    fit expects an iterable of token sequences (not raw strings; pair it
    with textprep.prep_for_features upstream) and transform returns a
    dense (n_docs, n_tokens) count matrix.
    """

    def __init__(self, min_df: int = 2):
        self.min_df = min_df

    def fit(self, X: Sequence[TokenSeq], y=None):
        self.vocabulary_ = build_vocabulary(list(X), min_df=self.min_df)
        return self

    def transform(self, X: Sequence[TokenSeq]) -> np.ndarray:
        if not hasattr(self, "vocabulary_"):
            raise NotFittedError("TokenCountVectorizer is not fitted yet; call fit first")
        vecs = [vectorize(doc, self.vocabulary_) for doc in X]
        return _to_matrix(vecs, len(self.vocabulary_))

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        if not hasattr(self, "vocabulary_"):
            raise NotFittedError("TokenCountVectorizer is not fitted yet; call fit first")
        return np.asarray(self.vocabulary_.tokens, dtype=object)


class ReactionClassifier(ClassifierMixin, BaseEstimator):
    """scikit-learn style multinomial logistic regression (full-batch GD).

    ``classes`` may fix an explicit class order (and with it the
    prediction tie-break); by default classes are taken sorted from y.
    """

    def __init__(
        self,
        learning_rate: float = 0.1,
        epochs: int = 500,
        l2: float = 1e-3,
        tol: float = 1e-7,
        seed: int = 42,
        balanced_class_weights: bool = False,
        classes: Optional[Sequence[str]] = None,
    ):
        self.learning_rate = learning_rate
        self.epochs = epochs
        self.l2 = l2
        self.tol = tol
        self.seed = seed
        self.balanced_class_weights = balanced_class_weights
        self.classes = classes

    def _config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            epochs=self.epochs,
            l2=self.l2,
            tol=self.tol,
            seed=self.seed,
            balanced_class_weights=self.balanced_class_weights,
        )

    def fit(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2:
            raise ValidationError(f"X must be a 2-d count matrix, got shape {X.shape}")
        y = [str(label) for label in y]
        if X.shape[0] != len(y):
            raise ValidationError(f"X has {X.shape[0]} rows but y has {len(y)} labels")
        classes = tuple(self.classes) if self.classes is not None else tuple(sorted(set(y)))
        if len(classes) < 2:
            raise ValidationError(f"need at least 2 classes, got {classes}")
        class_index = {c: i for i, c in enumerate(classes)}
        unknown = sorted(set(y) - set(classes))
        if unknown:
            raise ValidationError(f"labels {unknown} not in classes {classes}")
        if len(set(y)) < 2:
            raise ValidationError("training labels collapse to a single class; nothing to separate")
        y_idx = np.array([class_index[label] for label in y], dtype=np.int64)
        weights, bias, final_loss, epochs_run = _gd_fit(X, y_idx, len(classes), self._config())
        self.classes_ = np.asarray(classes, dtype=object)
        self.coef_ = weights
        self.intercept_ = bias
        self.final_loss_ = final_loss
        self.n_iter_ = epochs_run
        self.n_features_in_ = X.shape[1]
        return self

    def _check_fitted(self) -> None:
        if not hasattr(self, "coef_"):
            raise NotFittedError("ReactionClassifier is not fitted yet; call fit first")

    def decision_function(self, X) -> np.ndarray:
        self._check_fitted()
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValidationError(
                f"X must have shape (n, {self.n_features_in_}), got {X.shape}"
            )
        return X @ self.coef_.T + self.intercept_

    def predict_proba(self, X) -> np.ndarray:
        return softmax(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        probs = self.predict_proba(X)
        return self.classes_[np.argmax(probs, axis=1)]
