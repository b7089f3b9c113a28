"""Evaluation harness: graded relevance, ranking metrics, sweeps, latency.

Result quality uses graded relevance: an exact gloss match scores 1, a
rendition sharing a linguistic attribute with the truth scores 0.5,
anything else 0. DCG discounts those gains logarithmically by rank and
nDCG normalizes against the best achievable ordering of the same
grades; a list with no relevant entries at all normalizes to 1, since
no ordering could have done better.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .catalog import GlossEntry, VocabularyCatalog, shares_attribute
from .pose import quantize_coords
from .recognizer import TrainedModel, predict_batch
from .synth import SynthDataset

REL_EXACT = 1.0
REL_PARTIAL = 0.5
REL_NONE = 0.0

ORACLE_MAX_LEN = 8


def rel_grade(predicted: GlossEntry, truth: GlossEntry) -> float:
    if predicted.gloss == truth.gloss:
        return REL_EXACT
    if shares_attribute(predicted.metadata, truth.metadata):
        return REL_PARTIAL
    return REL_NONE


def dcg(grades: list[float]) -> float:
    """Discounted cumulative gain: sum of (2^g - 1) / log2(i + 1)."""
    total = 0.0
    for i, g in enumerate(grades, start=1):
        if g < 0:
            raise ValueError(f"negative grade {g}")
        total += (2.0 ** g - 1.0) / math.log2(i + 1)
    return total


def ndcg(grades: list[float], p: int) -> float:
    """DCG at p over the ideal DCG at p; 1.0 when nothing is relevant."""
    if not (1 <= p <= len(grades)):
        raise ValueError(f"p must be in [1, {len(grades)}], got {p}")
    ideal = dcg(sorted(grades, reverse=True)[:p])
    if ideal == 0.0:
        return 1.0
    return dcg(list(grades)[:p]) / ideal


def _arrangements(counts: list[tuple[float, int]], p: int, prefix: list[float]):
    if p == 0:
        yield tuple(prefix)
        return
    for i, (value, count) in enumerate(counts):
        if count == 0:
            continue
        counts[i] = (value, count - 1)
        prefix.append(value)
        yield from _arrangements(counts, p - 1, prefix)
        prefix.pop()
        counts[i] = (value, count)


def dcg_oracle(grades: list[float], p: int) -> tuple[float, float, float]:
    """(dcg, ideal dcg, ndcg) with the ideal found by exhaustive search.

    Permuting equal grades cannot change DCG, so the search enumerates
    every distinct length-p arrangement of the grade multiset: still an
    exhaustive maximization, independent of the sort-based shortcut it
    exists to validate. Capped at 8 grades.
    """
    if len(grades) > ORACLE_MAX_LEN:
        raise ValueError(f"oracle supports at most {ORACLE_MAX_LEN} grades")
    if not (1 <= p <= len(grades)):
        raise ValueError(f"p must be in [1, {len(grades)}], got {p}")
    values: dict[float, int] = {}
    for g in grades:
        values[g] = values.get(g, 0) + 1
    counts = list(values.items())
    ideal = max(dcg(list(arr)) for arr in _arrangements(counts, p, []))
    achieved = dcg(list(grades)[:p])
    return achieved, ideal, (1.0 if ideal == 0.0 else achieved / ideal)


# ---------------------------------------------------------------------------
# accuracy over a labeled set
# ---------------------------------------------------------------------------


def ranked_classes(probs: np.ndarray) -> np.ndarray:
    """Class indices by descending probability, ties toward lower index."""
    if probs.ndim != 2:
        raise ValueError("probs must be (N, classes)")
    idx = np.arange(probs.shape[1])
    return np.stack([np.lexsort((idx, -row)) for row in probs])


def _gloss_hits(order: np.ndarray, truth: np.ndarray, catalog: VocabularyCatalog, k: int):
    glosses = [e.gloss for e in catalog.entries]
    hits = np.zeros(len(truth), dtype=bool)
    for i in range(len(truth)):
        want = glosses[truth[i]]
        hits[i] = any(glosses[c] == want for c in order[i, :k])
    return hits


def topk_accuracy(
    probs: np.ndarray, truth: np.ndarray, catalog: VocabularyCatalog, k: int
) -> float:
    """Fraction of samples whose true gloss appears in the first k results."""
    if k < 1:
        raise ValueError("k must be positive")
    truth = np.asarray(truth, dtype=np.int64)
    order = ranked_classes(probs)
    return float(np.mean(_gloss_hits(order, truth, catalog, k)))


@dataclass
class PerClassAccuracy:
    per_class: dict[int, float]
    mean: float
    std: float  # population standard deviation across classes

    def to_dict(self) -> dict:
        return {
            "per_class": {str(k): v for k, v in self.per_class.items()},
            "mean": self.mean,
            "std": self.std,
        }


def per_class_accuracy(
    probs: np.ndarray, truth: np.ndarray, catalog: VocabularyCatalog
) -> PerClassAccuracy:
    truth = np.asarray(truth, dtype=np.int64)
    order = ranked_classes(probs)
    hits = _gloss_hits(order, truth, catalog, 1)
    per_class = {}
    for c in sorted(set(truth.tolist())):
        mask = truth == c
        per_class[c] = float(np.mean(hits[mask]))
    accs = np.array(list(per_class.values()))
    return PerClassAccuracy(per_class, float(accs.mean()), float(accs.std()))


@dataclass
class GroupAccuracy:
    top1: float
    top7: float
    count: int

    def to_dict(self) -> dict:
        return {"top1": self.top1, "top7": self.top7, "count": self.count}


GROUP_DIMENSIONS = ("movement", "hands", "location")


def feature_group_accuracy(
    probs: np.ndarray, truth: np.ndarray, catalog: VocabularyCatalog, dimension: str
) -> dict[str, GroupAccuracy]:
    """Top-1/top-7 accuracy grouped by a metadata dimension of the truth."""
    if dimension not in GROUP_DIMENSIONS:
        raise ValueError(f"unknown dimension {dimension!r}")
    truth = np.asarray(truth, dtype=np.int64)
    order = ranked_classes(probs)
    hits1 = _gloss_hits(order, truth, catalog, 1)
    hits7 = _gloss_hits(order, truth, catalog, min(7, probs.shape[1]))
    keys = []
    for t in truth:
        value = getattr(catalog.entry(int(t)).metadata, dimension)
        keys.append("unannotated" if value is None else value)
    groups: dict[str, GroupAccuracy] = {}
    for key in sorted(set(keys)):
        mask = np.array([k == key for k in keys])
        groups[key] = GroupAccuracy(
            float(np.mean(hits1[mask])), float(np.mean(hits7[mask])), int(mask.sum())
        )
    return groups


# ---------------------------------------------------------------------------
# resolution sweep
# ---------------------------------------------------------------------------


@dataclass
class SweepPoint:
    ratio: float
    top1: float
    top7: float

    def to_dict(self) -> dict:
        return {"ratio": self.ratio, "top1": self.top1, "top7": self.top7}


def resolution_sweep(
    model: TrainedModel,
    dataset: SynthDataset,
    catalog: VocabularyCatalog,
    ratios: list[float],
) -> list[SweepPoint]:
    """Accuracy after snapping inputs to each downscaled pixel grid.

    Ratios must be ascending and include 1.0 so every point has the
    full-resolution baseline next to it.
    """
    if not ratios or sorted(ratios) != list(ratios):
        raise ValueError("ratios must be a non-empty ascending list")
    if ratios[-1] != 1.0:
        raise ValueError("ratios must include 1.0 as the baseline")
    points = []
    for ratio in ratios:
        coords = quantize_coords(dataset.coords, dataset.resolution, ratio)
        probs = predict_batch(model, coords.astype(np.float32))
        points.append(
            SweepPoint(
                ratio=ratio,
                top1=topk_accuracy(probs, dataset.labels, catalog, 1),
                top7=topk_accuracy(probs, dataset.labels, catalog, 7),
            )
        )
    return points


# ---------------------------------------------------------------------------
# latency model
# ---------------------------------------------------------------------------


@dataclass
class LatencyModel:
    slope: float
    intercept: float
    r_squared: float
    n_points: int

    def predict(self, input_duration_s: float) -> float:
        return max(0.0, self.slope * input_duration_s + self.intercept)

    def to_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "n_points": self.n_points,
        }


# ---------------------------------------------------------------------------
# evaluation-run report
# ---------------------------------------------------------------------------


def ndcg_mean(
    probs: np.ndarray, truth: np.ndarray, catalog: VocabularyCatalog, p: int = 7
) -> float:
    """Mean nDCG of the graded full ranking across test samples."""
    truth = np.asarray(truth, dtype=np.int64)
    order = ranked_classes(probs)
    depth = min(p, probs.shape[1])
    total = 0.0
    for i in range(len(truth)):
        truth_entry = catalog.entry(int(truth[i]))
        grades = [rel_grade(catalog.entry(int(c)), truth_entry) for c in order[i]]
        total += ndcg(grades, depth)
    return total / len(truth)


def evaluation_report(
    probs: np.ndarray,
    truth: np.ndarray,
    catalog: VocabularyCatalog,
    sweep: list[SweepPoint] | None = None,
    latency: LatencyModel | None = None,
) -> dict:
    """Structured document for one evaluation run."""
    pca = per_class_accuracy(probs, truth, catalog)
    report = {
        "top1": topk_accuracy(probs, truth, catalog, 1),
        "top7": topk_accuracy(probs, truth, catalog, min(7, probs.shape[1])),
        "per_class": {str(k): v for k, v in pca.per_class.items()},
        "per_class_mean": pca.mean,
        "per_class_sigma": pca.std,
        "ndcg_mean": ndcg_mean(probs, truth, catalog),
        "groups": {
            dim: {k: g.to_dict() for k, g in feature_group_accuracy(probs, truth, catalog, dim).items()}
            for dim in GROUP_DIMENSIONS
        },
    }
    if sweep is not None:
        report["sweep"] = [pt.to_dict() for pt in sweep]
    if latency is not None:
        report["latency"] = {
            "slope": latency.slope,
            "intercept": latency.intercept,
            "r2": latency.r_squared,
        }
    return report


def render_report_table(report: dict) -> str:
    """Plain-text rendering of an evaluation report for terminals."""
    lines = [
        f"top-1 accuracy     {report['top1']:.4f}",
        f"top-7 accuracy     {report['top7']:.4f}",
        f"per-class mean     {report['per_class_mean']:.4f} (sigma {report['per_class_sigma']:.4f})",
        f"mean nDCG          {report['ndcg_mean']:.4f}",
    ]
    for dim, groups in report.get("groups", {}).items():
        lines.append(f"{dim}:")
        for key, g in groups.items():
            lines.append(
                f"  {key:<16} top1 {g['top1']:.4f}  top7 {g['top7']:.4f}  n={g['count']}"
            )
    for pt in report.get("sweep", []):
        lines.append(
            f"ratio {pt['ratio']:<4} top1 {pt['top1']:.4f}  top7 {pt['top7']:.4f}"
        )
    if "latency" in report:
        lat = report["latency"]
        lines.append(
            f"latency fit        slope {lat['slope']:.4f}  intercept {lat['intercept']:.4f}  r2 {lat['r2']:.4f}"
        )
    return "\n".join(lines)


def latency_fit(points: list[tuple[float, float]]) -> LatencyModel:
    """Least-squares line through (input duration, processing time) pairs."""
    if len(points) < 2:
        raise ValueError("need at least two observations")
    x = np.array([p[0] for p in points], dtype=np.float64)
    y = np.array([p[1] for p in points], dtype=np.float64)
    if np.all(x == x[0]):
        raise ValueError("need at least two distinct input durations")
    xm, ym = x.mean(), y.mean()
    slope = float(np.sum((x - xm) * (y - ym)) / np.sum((x - xm) ** 2))
    intercept = float(ym - slope * xm)
    residuals = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - ym) ** 2))
    ss_res = float(np.sum(residuals**2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return LatencyModel(slope, intercept, r2, len(points))
