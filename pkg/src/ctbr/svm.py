"""Linear soft-margin SVM, one-vs-rest over the three block classes.

Trained from scratch by deterministic full-batch subgradient descent on the
regularized hinge objective

    J(w, b) = (lambda / 2) ||w||^2 + (1/n) sum_i max(0, 1 - y_i (w.x_i + b))

with lambda = 1 / (C * n) and the step schedule eta_t = 1 / (lambda * t).
There is no shuffling and no random initialization, so two runs with the
same inputs produce bit-identical models; the seed is recorded for
provenance but consumed by nothing.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .encoder import FEATURE_ORDER, FeatureVector
from .errors import CorruptModelError, InsufficientClassesError, VersionError
from .model import CLASS_ORDER, BlockLabel

MODEL_FORMAT_VERSION = 1

DEFAULT_C = 1.0
DEFAULT_EPOCHS = 2000
DEFAULT_SEED = 42


@dataclass(frozen=True)
class Standardization:
    """Per-feature centering/scaling parameters, reused at prediction time."""

    mean: tuple[float, ...]
    std: tuple[float, ...]

    def apply(self, X: np.ndarray) -> np.ndarray:
        mean = np.asarray(self.mean)
        std = np.asarray(self.std)
        divisor = np.where(std == 0.0, 1.0, std)
        return (X - mean) / divisor

    @classmethod
    def identity(cls, n_features: int = len(FEATURE_ORDER)) -> "Standardization":
        return cls(mean=(0.0,) * n_features, std=(1.0,) * n_features)


def standardize(rows: list[FeatureVector]) -> tuple[np.ndarray, Standardization]:
    """Center to mean 0 and scale to stddev 1 per feature.

    Constant columns are centered only; their stddev is recorded as 0 and
    treated as 1 when dividing.
    """
    if not rows:
        raise ValueError("standardize requires at least one row")
    X = np.array([fv.as_array() for fv in rows], dtype=float)
    mean = X.mean(axis=0)
    std = X.std(axis=0)  # population stddev
    params = Standardization(mean=tuple(mean.tolist()), std=tuple(std.tolist()))
    return params.apply(X), params


@dataclass(frozen=True, eq=False)
class TrainingSet:
    """Standardized feature rows paired with labels."""

    rows: tuple[tuple[FeatureVector, BlockLabel], ...]
    standardization: Standardization
    X: np.ndarray = field(repr=False)
    y: tuple[BlockLabel, ...] = field(repr=False)

    @classmethod
    def from_rows(cls, rows: list[tuple[FeatureVector, BlockLabel]]) -> "TrainingSet":
        if len({label for _, label in rows}) < 2:
            raise InsufficientClassesError(
                "training data must contain at least two distinct labels"
            )
        X, params = standardize([fv for fv, _ in rows])
        return cls(
            rows=tuple(rows),
            standardization=params,
            X=X,
            y=tuple(label for _, label in rows),
        )


@dataclass(frozen=True, eq=False)
class SvmModel:
    """Three one-vs-rest linear classifiers over standardized features.

    objective_history holds the per-epoch hinge objective of each binary
    classifier (diagnostics only; never serialized).
    """

    classes: tuple[BlockLabel, ...]
    weights: np.ndarray  # (3, 9)
    biases: np.ndarray  # (3,)
    standardization: Standardization
    hyperparams: dict
    objective_history: tuple[tuple[float, ...], ...] = ()

    def decision_values(self, X_raw: np.ndarray) -> np.ndarray:
        """Raw one-vs-rest scores, shape (n, len(classes))."""
        X = self.standardization.apply(np.atleast_2d(X_raw))
        return X @ self.weights.T + self.biases


def _objective(w, b, X, y, lam) -> float:
    margins = 1.0 - y * (X @ w + b)
    hinge = np.maximum(0.0, margins).mean()
    return 0.5 * lam * float(w @ w) + float(hinge)


def _train_binary(X: np.ndarray, y: np.ndarray, C: float, epochs: int):
    """Deterministic full-batch subgradient descent on one hinge objective.

    Step size decays as 1/sqrt(epoch), the standard rate for non-smooth
    subgradient descent; with the batch gradient this converges far faster
    per epoch than the 1/(lambda*t) schedule tuned for per-sample updates.
    """
    n, d = X.shape
    lam = 1.0 / (C * n)
    w = np.zeros(d)
    b = 0.0
    history = []
    for t in range(1, epochs + 1):
        eta = 1.0 / np.sqrt(t)
        active = (y * (X @ w + b)) < 1.0
        grad_w = lam * w - (y[active] @ X[active]) / n
        grad_b = -float(y[active].sum()) / n
        w = w - eta * grad_w
        b = b - eta * grad_b
        history.append(_objective(w, b, X, y, lam))
    return w, b, tuple(history)


def train(
    data: TrainingSet,
    C: float = DEFAULT_C,
    epochs: int = DEFAULT_EPOCHS,
    seed: int = DEFAULT_SEED,
) -> SvmModel:
    """Fit the three one-vs-rest classifiers.

    Deterministic: identical data and hyperparameters give bit-identical
    weights regardless of the seed, which is stored for provenance only.
    """
    if C <= 0:
        raise ValueError(f"C must be positive, got {C}")
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    present = {label for label in data.y}
    if len(present) < 2:
        raise InsufficientClassesError(
            "training data must contain at least two distinct labels"
        )

    weights = np.zeros((len(CLASS_ORDER), data.X.shape[1]))
    biases = np.zeros(len(CLASS_ORDER))
    histories = []
    for ci, cls in enumerate(CLASS_ORDER):
        y = np.array([1.0 if label is cls else -1.0 for label in data.y])
        w, b, history = _train_binary(data.X, y, C, epochs)
        weights[ci] = w
        biases[ci] = b
        histories.append(history)

    return SvmModel(
        classes=CLASS_ORDER,
        weights=weights,
        biases=biases,
        standardization=data.standardization,
        hyperparams={"C": float(C), "epochs": int(epochs), "seed": int(seed)},
        objective_history=tuple(histories),
    )


def predict(model: SvmModel, fv: FeatureVector) -> tuple[BlockLabel, dict[BlockLabel, float]]:
    """Argmax over the one-vs-rest decision values.

    Ties resolve to the earliest class in the fixed order (BodyText, then
    Supplementary, then Accessory).
    """
    scores = model.decision_values(fv.as_array())[0]
    best = int(np.argmax(scores))  # argmax takes the first maximum
    return model.classes[best], dict(zip(model.classes, scores.tolist()))


def predict_many(model: SvmModel, features: dict[str, FeatureVector]) -> dict[str, BlockLabel]:
    """Vectorized prediction for a whole document's feature map."""
    if not features:
        return {}
    ids = list(features)
    X = np.array([features[i].as_array() for i in ids])
    scores = model.decision_values(X)
    picks = np.argmax(scores, axis=1)
    return {bid: model.classes[int(k)] for bid, k in zip(ids, picks)}


def training_accuracy(model: SvmModel, data: TrainingSet) -> float:
    X_raw = np.array([fv.as_array() for fv, _ in data.rows])
    # rows in a TrainingSet are raw; decision_values re-applies standardization
    scores = model.decision_values(X_raw)
    picks = np.argmax(scores, axis=1)
    hits = sum(
        1 for k, (_, label) in zip(picks, data.rows) if model.classes[int(k)] is label
    )
    return hits / len(data.rows)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------


def save_model(model: SvmModel) -> bytes:
    """Versioned canonical JSON; floats keep full precision."""
    payload = {
        "version": MODEL_FORMAT_VERSION,
        "classes": [c.value for c in model.classes],
        "weights": [[float(v) for v in row] for row in model.weights],
        "biases": [float(v) for v in model.biases],
        "standardization": {
            "mean": list(model.standardization.mean),
            "std": list(model.standardization.std),
        },
        "hyperparams": model.hyperparams,
    }
    return (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8")


def load_model(data: bytes) -> SvmModel:
    try:
        raw = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CorruptModelError(f"model file is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise CorruptModelError("model file must hold a JSON object")
    version = raw.get("version")
    if version != MODEL_FORMAT_VERSION:
        raise VersionError(
            f"model format version {version!r} is not supported (expected {MODEL_FORMAT_VERSION})"
        )
    try:
        classes = tuple(BlockLabel(v) for v in raw["classes"])
        weights = np.array(raw["weights"], dtype=float)
        biases = np.array(raw["biases"], dtype=float)
        std = raw["standardization"]
        standardization = Standardization(
            mean=tuple(float(v) for v in std["mean"]),
            std=tuple(float(v) for v in std["std"]),
        )
        hyperparams = dict(raw["hyperparams"])
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptModelError(f"model file is structurally broken: {exc}") from exc
    if weights.shape != (len(classes), len(FEATURE_ORDER)) or biases.shape != (len(classes),):
        raise CorruptModelError(
            f"weight/bias shapes {weights.shape}/{biases.shape} do not match {len(classes)} classes"
        )
    if not (np.isfinite(weights).all() and np.isfinite(biases).all()):
        raise CorruptModelError("model weights must be finite")
    return SvmModel(
        classes=classes,
        weights=weights,
        biases=biases,
        standardization=standardization,
        hyperparams=hyperparams,
    )
