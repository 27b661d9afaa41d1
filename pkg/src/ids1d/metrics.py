"""Confusion matrix and the derived metric suite (accuracy, macro
precision/recall/F1, per-class values) plus inference timing."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .errors import DataError
from .layers import softmax
from .network import ConvNet


@dataclass
class ConfusionMatrix:
    counts: np.ndarray  # [K, K], rows = true class, columns = predicted
    label_names: list[str]

    @property
    def total(self) -> int:
        return int(self.counts.sum())


@dataclass
class ClassMetrics:
    name: str
    precision: float  # percent
    recall: float
    f1: float
    zero_denominator: bool = False


@dataclass
class MetricsReport:
    accuracy: float  # percent, 2 decimals
    macro_precision: float
    macro_recall: float
    macro_f1: float
    per_class: list[ClassMetrics] = field(default_factory=list)
    test_seconds: float = 0.0


def predict(net: ConvNet, features: np.ndarray, batch_size: int = 1024) -> np.ndarray:
    """Argmax class per row; ties resolve to the lowest class index."""
    logits = net.predict_logits(features, batch_size=batch_size)
    return np.argmax(np.atleast_2d(logits), axis=1).astype(np.int64)


def predict_proba(net: ConvNet, features: np.ndarray, batch_size: int = 1024) -> np.ndarray:
    return softmax(np.atleast_2d(net.predict_logits(features, batch_size=batch_size)))


def confusion(true_labels: np.ndarray, predicted_labels: np.ndarray,
              num_classes: int, label_names: list[str] | None = None) -> ConfusionMatrix:
    t = np.asarray(true_labels, dtype=np.int64)
    p = np.asarray(predicted_labels, dtype=np.int64)
    if t.shape != p.shape:
        raise DataError(f"label arrays differ in length: {t.shape} vs {p.shape}")
    for name, arr in (("true", t), ("predicted", p)):
        if arr.size and (arr.min() < 0 or arr.max() >= num_classes):
            raise DataError(f"{name} label out of range [0, {num_classes})")
    counts = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(counts, (t, p), 1)
    names = label_names or [str(i) for i in range(num_classes)]
    return ConfusionMatrix(counts, list(names))


def compute_metrics(cm: ConfusionMatrix) -> MetricsReport:
    """Table-style metrics as percentages rounded to 2 decimals.

    Macro averages are unweighted means over classes. A class whose row or
    column sum is zero gets 0 for the undefined metric and is flagged.
    """
    counts = cm.counts
    total = counts.sum()
    if total == 0:
        raise DataError("confusion matrix has no samples")
    diag = np.diag(counts).astype(float)
    col = counts.sum(axis=0).astype(float)
    row = counts.sum(axis=1).astype(float)

    per_class = []
    for k, name in enumerate(cm.label_names):
        zero = col[k] == 0 or row[k] == 0
        prec = diag[k] / col[k] if col[k] > 0 else 0.0
        rec = diag[k] / row[k] if row[k] > 0 else 0.0
        f1 = 2 * prec * rec / (prec + rec) if (prec + rec) > 0 else 0.0
        per_class.append(ClassMetrics(
            name,
            round(100 * prec, 2), round(100 * rec, 2), round(100 * f1, 2),
            zero_denominator=bool(zero),
        ))

    precisions = np.array([diag[k] / col[k] if col[k] > 0 else 0.0
                           for k in range(len(cm.label_names))])
    recalls = np.array([diag[k] / row[k] if row[k] > 0 else 0.0
                        for k in range(len(cm.label_names))])
    f1s = np.array([2 * p * r / (p + r) if (p + r) > 0 else 0.0
                    for p, r in zip(precisions, recalls)])
    return MetricsReport(
        accuracy=round(100 * diag.sum() / total, 2),
        macro_precision=round(100 * precisions.mean(), 2),
        macro_recall=round(100 * recalls.mean(), 2),
        macro_f1=round(100 * f1s.mean(), 2),
        per_class=per_class,
    )


def timed_inference(net: ConvNet, features: np.ndarray,
                    repeat: int = 1) -> tuple[np.ndarray, float, float]:
    """Predict `repeat` times; returns (predictions, median seconds per pass,
    rows per second)."""
    if repeat < 1:
        raise DataError(f"repeat must be >= 1, got {repeat}")
    times = []
    preds = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        current = predict(net, features)
        times.append(time.perf_counter() - t0)
        if preds is not None and not np.array_equal(preds, current):
            raise DataError("predictions changed between timing repeats")
        preds = current
    seconds = float(np.median(times))
    rows_per_sec = len(features) / seconds if seconds > 0 else float("inf")
    return preds, seconds, rows_per_sec
