"""Classification and detection metrics for pipeline evaluation."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import IdMismatchError
from .model import CLASS_ORDER, BlockLabel, bbox_iou
from .segmenter import DetectedObject
from .synthetic import TruthObject


@dataclass(frozen=True)
class ClassMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class ClassificationReport:
    per_class: dict[BlockLabel, ClassMetrics]
    macro_f1: float
    accuracy: float
    total: int

    def to_dict(self) -> dict:
        return {
            "per_class": {
                label.value: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "support": m.support,
                }
                for label, m in self.per_class.items()
            },
            "macro_f1": self.macro_f1,
            "accuracy": self.accuracy,
            "total": self.total,
        }


def evaluate_classification(
    predicted: dict[str, BlockLabel], truth: dict[str, BlockLabel]
) -> ClassificationReport:
    """Per-class precision/recall/F1 and macro-F1 over matching id sets.

    Classes with a zero denominator score 0 for that metric.
    """
    if set(predicted) != set(truth):
        only_pred = sorted(set(predicted) - set(truth))[:3]
        only_truth = sorted(set(truth) - set(predicted))[:3]
        raise IdMismatchError(
            f"predicted and truth ids differ (pred-only {only_pred}, truth-only {only_truth})"
        )
    per_class = {}
    f1s = []
    for label in CLASS_ORDER:
        tp = sum(1 for bid, p in predicted.items() if p is label and truth[bid] is label)
        fp = sum(1 for bid, p in predicted.items() if p is label and truth[bid] is not label)
        fn = sum(1 for bid, t in truth.items() if t is label and predicted[bid] is not label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[label] = ClassMetrics(precision, recall, f1, tp + fn)
        f1s.append(f1)
    total = len(truth)
    hits = sum(1 for bid in truth if predicted[bid] is truth[bid])
    return ClassificationReport(
        per_class=per_class,
        macro_f1=sum(f1s) / len(f1s),
        accuracy=hits / total if total else 0.0,
        total=total,
    )


@dataclass(frozen=True)
class DetectionReport:
    precision: float
    recall: float
    mean_iou: float
    matched: int
    predicted_count: int
    truth_count: int
    iou_threshold: float
    no_predictions: bool = False
    no_truth: bool = False

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "mean_iou": self.mean_iou,
            "matched": self.matched,
            "predicted_count": self.predicted_count,
            "truth_count": self.truth_count,
            "iou_threshold": self.iou_threshold,
            "no_predictions": self.no_predictions,
            "no_truth": self.no_truth,
        }


def evaluate_detection(
    objects: list[DetectedObject],
    truth: list[TruthObject],
    iou_threshold: float,
) -> DetectionReport:
    """Greedy one-to-one matching by descending IoU; kind and page must agree.

    With zero predictions, precision is vacuous and reported as 1.0 with the
    no_predictions flag set (symmetrically for recall with zero truth).
    """
    if not 0.0 < iou_threshold <= 1.0:
        raise ValueError(f"iou_threshold must be in (0, 1], got {iou_threshold}")

    pairs = []
    for pi, pred in enumerate(objects):
        for ti, tru in enumerate(truth):
            if pred.kind is not tru.kind or pred.page_index != tru.page_index:
                continue
            iou = bbox_iou(pred.region, tru.region)
            if iou >= iou_threshold:
                pairs.append((iou, pi, ti))
    pairs.sort(key=lambda p: (-p[0], p[1], p[2]))

    used_pred: set[int] = set()
    used_truth: set[int] = set()
    ious = []
    for iou, pi, ti in pairs:
        if pi in used_pred or ti in used_truth:
            continue
        used_pred.add(pi)
        used_truth.add(ti)
        ious.append(iou)

    matched = len(ious)
    no_predictions = not objects
    no_truth = not truth
    return DetectionReport(
        precision=1.0 if no_predictions else matched / len(objects),
        recall=1.0 if no_truth else matched / len(truth),
        mean_iou=sum(ious) / matched if matched else 0.0,
        matched=matched,
        predicted_count=len(objects),
        truth_count=len(truth),
        iou_threshold=iou_threshold,
        no_predictions=no_predictions,
        no_truth=no_truth,
    )
