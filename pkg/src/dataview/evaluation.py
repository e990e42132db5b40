"""Fidelity, accuracy, and data-view coverage diagnostics."""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .hillsynth import Continuous


def _check_pair(a, b):
    a = np.asarray(a, dtype=int)
    b = np.asarray(b, dtype=int)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"label vectors must match: {a.shape} vs {b.shape}")
    if len(a) == 0:
        raise ValueError("empty label vectors")
    return a, b


def fidelity(shadow_preds, target_preds):
    """Fraction of records on which shadow and target agree."""
    a, b = _check_pair(shadow_preds, target_preds)
    return float(np.mean(a == b))


def accuracy(preds, truth):
    """Fraction of exact matches against ground-truth labels."""
    a, b = _check_pair(preds, truth)
    return float(np.mean(a == b))


def confusion(shadow_preds, target_preds, class_count):
    """counts[t, s] = records the target labels t and the shadow labels s."""
    a, b = _check_pair(shadow_preds, target_preds)
    counts = np.zeros((class_count, class_count), dtype=int)
    for s, t in zip(a, b):
        counts[t, s] += 1
    return counts


@dataclass
class EvalReport:
    fidelity: float
    accuracy: float
    n: int
    confusion: np.ndarray  # target x shadow


def evaluate(shadow_preds, target_preds, truth, class_count):
    return EvalReport(
        fidelity=fidelity(shadow_preds, target_preds),
        accuracy=accuracy(shadow_preds, truth),
        n=len(np.asarray(shadow_preds)),
        confusion=confusion(shadow_preds, target_preds, class_count),
    )


@dataclass
class FeatureCoverage:
    min: float
    max: float
    mean: float
    variance: float
    span_coverage: float  # observed span / domain span, continuous features


def coverage_report(synth, domains, reference=None):
    """Per-feature statistics of a synthesized view, with the fraction of
    each continuous domain's span actually covered."""
    X = np.asarray(synth, dtype=np.float64)
    if X.ndim != 2 or len(X) == 0:
        raise ValueError("empty synthesized dataset")
    out = []
    for j, dom in enumerate(domains):
        col = X[:, j]
        lo, hi = float(col.min()), float(col.max())
        if isinstance(dom, Continuous) and dom.span > 0:
            span = (hi - lo) / dom.span
        else:
            span = 1.0 if hi > lo else 0.0
        out.append(
            FeatureCoverage(
                min=lo,
                max=hi,
                mean=float(col.mean()),
                variance=float(col.var()),
                span_coverage=float(span),
            )
        )
    return out


def report_text(rows, header):
    """Aligned plain-text table; rows are lists of strings."""
    widths = [max(len(str(r[i])) for r in [header] + rows) for i in range(len(header))]
    buf = io.StringIO()

    def emit(row):
        buf.write(
            "  ".join(str(v).ljust(w) for v, w in zip(row, widths)).rstrip() + "\n"
        )

    emit(header)
    emit(["-" * w for w in widths])
    for r in rows:
        emit(r)
    return buf.getvalue()


def report_csv(rows, header):
    buf = io.StringIO()
    buf.write(",".join(header) + "\n")
    for r in rows:
        buf.write(",".join(str(v) for v in r) + "\n")
    return buf.getvalue()
