"""One-vs-rest confusion counts and per-class / macro metrics.

Four metrics per class: precision (PREC), sensitivity (SN),
specificity (SP), and accuracy (ACC), all from the one-vs-rest
confusion counts. A zero denominator makes a metric undefined; it is
reported as None and excluded from the macro average with a warning,
never silently coerced to 0.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import ValidationError

__all__ = [
    "ClassCounts",
    "ConfusionCounts",
    "ClassMetrics",
    "MetricsReport",
    "confusion",
    "class_metrics",
    "macro_average",
    "micro_average",
    "metrics_report",
]

log = logging.getLogger(__name__)

METRIC_NAMES = ("PREC", "SN", "SP", "ACC")


@dataclass(frozen=True)
class ClassCounts:
    """One-vs-rest counts for one class."""

    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn


@dataclass(frozen=True)
class ConfusionCounts:
    """Per-class one-vs-rest counts over one evaluation run."""

    classes: tuple[str, ...]
    per_class: Mapping[str, ClassCounts]
    n: int


@dataclass(frozen=True)
class ClassMetrics:
    """PREC/SN/SP/ACC for one class; None marks an undefined metric."""

    prec: Optional[float]
    sn: Optional[float]
    sp: Optional[float]
    acc: Optional[float]

    def as_tuple(self) -> tuple[Optional[float], ...]:
        return (self.prec, self.sn, self.sp, self.acc)


def confusion(
    predictions: Sequence[str], truth: Sequence[str], classes: Sequence[str]
) -> ConfusionCounts:
    """One-vs-rest TP/FP/FN/TN per class."""
    if len(predictions) != len(truth):
        raise ValidationError(f"{len(predictions)} predictions vs {len(truth)} truth labels")
    class_set = set(classes)
    for kind, labels in (("prediction", predictions), ("truth", truth)):
        unknown = sorted(set(labels) - class_set)
        if unknown:
            raise ValidationError(f"unknown {kind} label(s) {unknown}; expected one of {sorted(class_set)}")
    per_class = {}
    for cls in classes:
        tp = fp = fn = tn = 0
        for pred, true in zip(predictions, truth):
            if pred == cls and true == cls:
                tp += 1
            elif pred == cls:
                fp += 1
            elif true == cls:
                fn += 1
            else:
                tn += 1
        per_class[cls] = ClassCounts(tp=tp, fp=fp, fn=fn, tn=tn)
    return ConfusionCounts(classes=tuple(classes), per_class=per_class, n=len(truth))


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den > 0 else None


def class_metrics(counts: ClassCounts) -> ClassMetrics:
    """PREC = TP/(TP+FP), SN = TP/(TP+FN), SP = TN/(TN+FP),
    ACC = (TP+TN)/(TP+TN+FP+FN)."""
    return ClassMetrics(
        prec=_ratio(counts.tp, counts.tp + counts.fp),
        sn=_ratio(counts.tp, counts.tp + counts.fn),
        sp=_ratio(counts.tn, counts.tn + counts.fp),
        acc=_ratio(counts.tp + counts.tn, counts.total),
    )


def macro_average(per_class: Sequence[ClassMetrics]) -> ClassMetrics:
    """Unweighted mean of each metric, skipping undefined entries."""
    if not per_class:
        raise ValidationError("macro average needs at least one class")
    means = []
    for i, name in enumerate(METRIC_NAMES):
        defined = [m.as_tuple()[i] for m in per_class if m.as_tuple()[i] is not None]
        if not defined:
            log.warning("macro %s undefined: no class has a defined value", name)
            means.append(None)
            continue
        if len(defined) < len(per_class):
            log.warning(
                "macro %s averages %d of %d classes (undefined entries excluded)",
                name, len(defined), len(per_class),
            )
        means.append(sum(defined) / len(defined))
    return ClassMetrics(*means)


def micro_average(counts: ConfusionCounts) -> ClassMetrics:
    """Metrics over summed counts (not the headline number; see macro)."""
    tp = sum(c.tp for c in counts.per_class.values())
    fp = sum(c.fp for c in counts.per_class.values())
    fn = sum(c.fn for c in counts.per_class.values())
    tn = sum(c.tn for c in counts.per_class.values())
    return class_metrics(ClassCounts(tp=tp, fp=fp, fn=fn, tn=tn))


@dataclass(frozen=True)
class MetricsReport:
    counts: ConfusionCounts
    per_class: Mapping[str, ClassMetrics]
    macro: ClassMetrics
    micro: ClassMetrics

    def to_json(self) -> str:
        def row(m: ClassMetrics) -> dict:
            return {"PREC": m.prec, "SN": m.sn, "SP": m.sp, "ACC": m.acc}

        payload = {
            "n": self.counts.n,
            "classes": list(self.counts.classes),
            "counts": {
                c: {"TP": cc.tp, "FP": cc.fp, "FN": cc.fn, "TN": cc.tn}
                for c, cc in self.counts.per_class.items()
            },
            "per_class": {c: row(m) for c, m in self.per_class.items()},
            "macro": row(self.macro),
            "micro": row(self.micro),
        }
        return json.dumps(payload, indent=2, sort_keys=True)

    def to_text(self) -> str:
        def fmt(v: Optional[float]) -> str:
            return "undef" if v is None else f"{v:.4f}"

        rows = [("", *METRIC_NAMES)]
        for cls in self.counts.classes:
            m = self.per_class[cls]
            rows.append((cls, fmt(m.prec), fmt(m.sn), fmt(m.sp), fmt(m.acc)))
        m = self.macro
        rows.append(("macro average", fmt(m.prec), fmt(m.sn), fmt(m.sp), fmt(m.acc)))
        widths = [max(len(r[i]) for r in rows) for i in range(5)]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
        return "\n".join(lines) + "\n"


def metrics_report(
    predictions: Sequence[str], truth: Sequence[str], classes: Sequence[str]
) -> MetricsReport:
    """Full evaluation: counts, per-class metrics, macro and micro averages."""
    counts = confusion(predictions, truth, classes)
    per_class = {c: class_metrics(counts.per_class[c]) for c in counts.classes}
    return MetricsReport(
        counts=counts,
        per_class=per_class,
        macro=macro_average([per_class[c] for c in counts.classes]),
        micro=micro_average(counts),
    )
