"""Classification metrics and the accuracy/latency trade-off score.

Precision, recall, and F1 are macro-averaged: per-class values averaged
uniformly over classes that have support (at least one true instance).
A supported class that is never predicted gets precision 0 rather than
dividing by zero.

The trade-off score combines accuracy A and per-inference time IT as

    A / (IT**gamma + alpha * (1 - A))

with defaults alpha=1, gamma=2. It grows with accuracy, shrinks with
latency, and is undefined (domain error) when the denominator is zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pipeline import ApproachId
from .vision_core import LABEL_INDEX, LABEL_ORDER, NUM_CLASSES, SkillLabel


class ConfusionMatrix:
    """Counts indexed [true label, predicted label] in SkillLabel order."""

    __slots__ = ("counts",)

    def __init__(self, counts: np.ndarray | None = None):
        if counts is None:
            counts = np.zeros((NUM_CLASSES, NUM_CLASSES), dtype=np.int64)
        else:
            counts = np.array(counts, dtype=np.int64)
            if counts.shape != (NUM_CLASSES, NUM_CLASSES):
                raise ValueError(f"confusion matrix must be {NUM_CLASSES}x{NUM_CLASSES}")
            if np.any(counts < 0):
                raise ValueError("confusion matrix counts must be non-negative")
        self.counts = counts

    def add(self, truth: SkillLabel, pred: SkillLabel) -> "ConfusionMatrix":
        self.counts[LABEL_INDEX[truth], LABEL_INDEX[pred]] += 1
        return self

    def merge(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        # Element-wise addition: associative and commutative, so per-worker
        # matrices can merge in any order.
        return ConfusionMatrix(self.counts + other.counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())


def accumulate(cm: ConfusionMatrix, truth: SkillLabel, pred: SkillLabel) -> ConfusionMatrix:
    return cm.add(truth, pred)


@dataclass(frozen=True)
class MetricSummary:
    precision: float
    recall: float
    f1: float
    accuracy: float


def summarize(cm: ConfusionMatrix) -> MetricSummary:
    """Macro precision/recall/F1 plus overall accuracy."""
    counts = cm.counts.astype(np.float64)
    total = counts.sum()
    if total < 1:
        raise ValueError("cannot summarize an empty confusion matrix")
    tp = np.diag(counts)
    support = counts.sum(axis=1)  # true instances per class
    predicted = counts.sum(axis=0)  # predicted instances per class
    active = support > 0

    precision = np.zeros(NUM_CLASSES)
    np.divide(tp, predicted, out=precision, where=predicted > 0)
    recall = np.zeros(NUM_CLASSES)
    np.divide(tp, support, out=recall, where=active)
    pr_sum = precision + recall
    f1 = np.zeros(NUM_CLASSES)
    np.divide(2.0 * precision * recall, pr_sum, out=f1, where=pr_sum > 0)

    return MetricSummary(
        precision=float(precision[active].mean()),
        recall=float(recall[active].mean()),
        f1=float(f1[active].mean()),
        accuracy=float(tp.sum() / total),
    )


@dataclass(frozen=True)
class WaittParams:
    alpha: float = 1.0
    gamma: float = 2.0

    def __post_init__(self):
        if self.alpha < 0:
            raise ValueError("alpha must be >= 0")
        if self.gamma <= 0:
            raise ValueError("gamma must be > 0")


def compute_waitt(accuracy: float, inference_time_s: float, params: WaittParams = WaittParams()) -> float:
    """Accuracy/latency trade-off score; higher is better."""
    if not 0.0 <= accuracy <= 1.0:
        raise ValueError(f"accuracy {accuracy} outside [0, 1]")
    if inference_time_s < 0:
        raise ValueError(f"inference time {inference_time_s} must be >= 0")
    denominator = inference_time_s**params.gamma + params.alpha * (1.0 - accuracy)
    if denominator == 0.0:
        raise ValueError("trade-off score undefined: zero denominator (accuracy 1 at zero latency)")
    return accuracy / denominator


@dataclass(frozen=True)
class BenchRecord:
    """One benchmark table row: accuracy, the three timings, and the score."""

    approach: ApproachId
    accuracy: float
    cs1_s: float
    cs10_s: float
    avg_iit_s: float
    waitt: float
    accuracy_source: str = "measured"  # "measured" | "supplied"
    avg_iit_source: str = "measured"

    @classmethod
    def build(
        cls,
        approach: ApproachId,
        accuracy: float,
        cs1_s: float,
        cs10_s: float,
        avg_iit_s: float,
        params: WaittParams = WaittParams(),
        accuracy_source: str = "measured",
        avg_iit_source: str = "measured",
    ) -> "BenchRecord":
        return cls(
            approach=approach,
            accuracy=accuracy,
            cs1_s=cs1_s,
            cs10_s=cs10_s,
            avg_iit_s=avg_iit_s,
            waitt=compute_waitt(accuracy, avg_iit_s, params),
            accuracy_source=accuracy_source,
            avg_iit_source=avg_iit_source,
        )


LABEL_TOKENS = tuple(lab.value for lab in LABEL_ORDER)
