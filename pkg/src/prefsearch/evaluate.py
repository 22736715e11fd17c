"""Offline evaluation: graded relevance judging and session-level metrics.

A relevance spec is a small JSON document of predicates.  A product failing
any mandatory predicate (or matching any must-not predicate) grades 0;
otherwise it grades 1 plus the points of every satisfied bonus predicate.
Session metrics are seen-relevant recall over a decreasing threshold ladder,
NDCG@15 per logged query, and LOESS-smoothed NDCG-vs-time curves.
"""

from __future__ import annotations

import csv
import json
import math
import statistics
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path

import numpy as np

from .errors import PrefSearchError, UndefinedRatioError, UnknownFacetError, ValidationError

SPEC_FORMAT = "prefsearch-relevance/1"

# threshold ladder used by recall reports, most selective first
THRESHOLD_LADDER = (8, 7, 5, 4, 3, 1)

DEFAULT_NDCG_CUTOFF = 15


# ---------------------------------------------------------------------------
# Relevance spec and judging


@dataclass(frozen=True)
class RelevanceSpec:
    name: str
    mandatory: tuple
    must_not: tuple
    bonuses: tuple  # of (points, predicate)

    @property
    def max_grade(self) -> int:
        return 1 + sum(points for points, _ in self.bonuses)

    def reachable_grades(self) -> set[int]:
        """Every grade the bonus structure can produce, by enumeration."""
        grades = {0}
        points = [p for p, _ in self.bonuses]
        for r in range(len(points) + 1):
            for subset in combinations(points, r):
                grades.add(1 + sum(subset))
        return grades


def spec_from_json(doc: dict) -> RelevanceSpec:
    if doc.get("format") != SPEC_FORMAT:
        raise ValidationError(f"unsupported relevance spec format {doc.get('format')!r}")
    bonuses = []
    for b in doc.get("bonuses", ()):
        if b["points"] <= 0:
            raise ValidationError("bonus points must be > 0")
        bonuses.append((int(b["points"]), b["predicate"]))
    return RelevanceSpec(
        name=doc.get("name", "unnamed"),
        mandatory=tuple(doc.get("mandatory", ())),
        must_not=tuple(doc.get("must_not", ())),
        bonuses=tuple(bonuses),
    )


def load_relevance_spec(path) -> RelevanceSpec:
    with open(path, encoding="utf-8") as fh:
        return spec_from_json(json.load(fh))


def eval_predicate(pred: dict, product) -> bool:
    kind = pred.get("type")
    if kind == "nominal":
        return pred["value"] in product.nominal_features.get(pred["facet"], ())
    if kind == "range":
        field = pred["field"]
        if field not in ("price", "stars", "rating"):
            raise UnknownFacetError(f"predicate references unknown field {field!r}")
        value = product.numeric_value(field)
        return pred["lo"] <= value <= pred["hi"]
    if kind == "any_of":
        return any(eval_predicate(p, product) for p in pred["predicates"])
    if kind == "all_of":
        return all(eval_predicate(p, product) for p in pred["predicates"])
    raise ValidationError(f"unknown predicate type {kind!r}")


def validate_spec_facets(spec: RelevanceSpec, catalog) -> None:
    """Raise if any predicate references a facet missing from the schema."""

    def walk(pred: dict):
        if pred.get("type") == "nominal" and not catalog.has_facet(pred["facet"]):
            raise UnknownFacetError(f"predicate references unknown facet {pred['facet']!r}")
        for child in pred.get("predicates", ()):
            walk(child)

    for pred in spec.mandatory + spec.must_not:
        walk(pred)
    for _, pred in spec.bonuses:
        walk(pred)


def judge(product, spec: RelevanceSpec) -> int:
    """Graded relevance score: 0 if not relevant, else 1 + satisfied bonuses."""
    for pred in spec.mandatory:
        if not eval_predicate(pred, product):
            return 0
    for pred in spec.must_not:
        if eval_predicate(pred, product):
            return 0
    grade = 1
    for points, pred in spec.bonuses:
        if eval_predicate(pred, product):
            grade += points
    return grade


def judge_catalog(catalog, spec: RelevanceSpec) -> dict[str, int]:
    validate_spec_facets(spec, catalog)
    return {p.product_id: judge(p, spec) for p in catalog.products}


# ---------------------------------------------------------------------------
# Session metrics


def seen_recall(log, judgments: dict[str, int], threshold: int) -> float:
    """Fraction of products graded >= threshold that were ever visible."""
    relevant = {pid for pid, g in judgments.items() if g >= threshold}
    if not relevant:
        raise UndefinedRatioError(f"no product reaches grade {threshold}; recall undefined")
    visible: set[str] = set()
    for event in log.events:
        visible.update(event.visible_ids)
    return len(visible & relevant) / len(relevant)


def ndcg(ranked_ids, judgments: dict[str, int], k: int = DEFAULT_NDCG_CUTOFF) -> float:
    """NDCG@k with gain = grade and discount 1/log2(rank+1); the ideal list
    is the whole judged catalog sorted by grade."""
    if k < 1:
        raise ValidationError("ndcg cutoff must be >= 1")
    dcg = 0.0
    for i, pid in enumerate(ranked_ids[:k], start=1):
        dcg += judgments.get(pid, 0) / math.log2(i + 1)
    ideal = sorted(judgments.values(), reverse=True)
    idcg = sum(g / math.log2(i + 1) for i, g in enumerate(ideal[:k], start=1))
    if idcg == 0:
        return 0.0
    return dcg / idcg


# ---------------------------------------------------------------------------
# LOESS


def loess(x, y, grid=None, degree: int = 2, span: float = 0.75):
    """Locally weighted polynomial regression with tricube weights.

    For each grid point, fits a degree-``degree`` polynomial by weighted least
    squares over the nearest ceil(span*n) input points.  Returns
    ``(fitted, degraded)`` where ``degraded[i]`` flags grid points where a
    singular local fit forced a lower polynomial degree.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValidationError("loess needs matching 1-d x and y")
    n = x.shape[0]
    if len(np.unique(x)) < degree + 1:
        raise ValidationError(f"loess needs at least {degree + 1} distinct x values")
    q = math.ceil(span * n)
    if q < degree + 1:
        raise ValidationError(f"span {span} leaves fewer than {degree + 1} neighborhood points")
    q = min(q, n)
    grid = x if grid is None else np.asarray(grid, dtype=np.float64)

    fitted = np.empty(grid.shape[0], dtype=np.float64)
    degraded = np.zeros(grid.shape[0], dtype=bool)
    for j, x0 in enumerate(grid):
        d = np.abs(x - x0)
        dmax = np.partition(d, q - 1)[q - 1]
        if dmax == 0:
            w = (d == 0).astype(np.float64)
        else:
            u = d / dmax
            w = np.where(u < 1.0, (1.0 - u**3) ** 3, 0.0)
        # keep the q-th neighbor in play even when tricube zeroes the boundary
        if w.sum() == 0 or np.count_nonzero(w) < 1:
            w = (d <= dmax).astype(np.float64)
        value, used_degree = _weighted_polyfit_at(x - x0, y, w, degree)
        fitted[j] = value
        degraded[j] = used_degree < degree
    return fitted, degraded


def _weighted_polyfit_at(xc, y, w, degree):
    """Weighted LS fit of a polynomial in ``xc`` (centered at 0); returns the
    value at 0 (the intercept) and the degree actually used."""
    sw = np.sqrt(w)
    for deg in range(degree, -1, -1):
        design = np.vander(xc, deg + 1, increasing=True) * sw[:, None]
        coeffs, _, rank, _ = np.linalg.lstsq(design, y * sw, rcond=None)
        if rank == deg + 1:
            return float(coeffs[0]), deg
    return float(np.average(y, weights=w)), 0


# ---------------------------------------------------------------------------
# CSV report bundle


def _session_points(log, judgments, k=DEFAULT_NDCG_CUTOFF):
    """(time seconds, ndcg) per query event of a session."""
    points = []
    for event in log.events:
        if event.ranked_ids is None:
            continue
        points.append((event.timestamp_ms / 1000.0, ndcg(event.ranked_ids, judgments, k)))
    return points


def report(logs, judgments: dict[str, int], out_dir, catalog=None,
           groupings: dict[str, str] | None = None, loess_degree: int = 2,
           loess_span: float = 0.75) -> dict:
    """Emit the CSV bundle behind the session analyses.

    Files: ``recall.csv`` (per-threshold seen recall by engine),
    ``ndcg_series.csv`` (per-session NDCG vs time), ``loess_curves.csv``
    (smoothed curves per grouping label plus overall) and
    ``completion_times.csv`` (median task time per group).  Logs that fail
    replay against ``catalog`` are excluded and reported under ``errors``.
    """
    from . import session as session_mod

    groupings = groupings or {}
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    logs = sorted(logs, key=lambda lg: lg.session_id)

    errors = []
    clean_logs = []
    for log in logs:
        if catalog is not None:
            try:
                session_mod.replay(log, catalog)
            except PrefSearchError as exc:
                errors.append(f"session {log.session_id}: {exc}")
                continue
        clean_logs.append(log)

    recall_path = out_dir / "recall.csv"
    with open(recall_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["engine", "threshold", "session_id", "seen_relevant",
                         "total_relevant", "recall"])
        for threshold in THRESHOLD_LADDER:
            relevant = {pid for pid, g in judgments.items() if g >= threshold}
            for log in clean_logs:
                visible = set()
                for event in log.events:
                    visible.update(event.visible_ids)
                seen = len(visible & relevant)
                ratio = seen / len(relevant) if relevant else ""
                writer.writerow([log.engine, threshold, log.session_id, seen,
                                 len(relevant), ratio])

    series_path = out_dir / "ndcg_series.csv"
    session_points = {}
    with open(series_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["session_id", "engine", "time_s", "ndcg"])
        for log in clean_logs:
            points = _session_points(log, judgments)
            session_points[log.session_id] = points
            for t, v in points:
                writer.writerow([log.session_id, log.engine, t, v])

    def group_labels(log):
        labels = ["all"]
        if log.session_id in groupings:
            labels.append(groupings[log.session_id])
        return labels

    loess_path = out_dir / "loess_curves.csv"
    with open(loess_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["engine", "group", "time_s", "ndcg_fit", "degraded"])
        engines = sorted({log.engine for log in clean_logs})
        for engine in engines:
            labels = sorted({lbl for log in clean_logs if log.engine == engine
                             for lbl in group_labels(log)})
            for label in labels:
                pts = [pt for log in clean_logs
                       if log.engine == engine and label in group_labels(log)
                       for pt in session_points[log.session_id]]
                xs = np.array([p[0] for p in pts])
                ys = np.array([p[1] for p in pts])
                if len(np.unique(xs)) < loess_degree + 1:
                    errors.append(
                        f"loess skipped for engine={engine} group={label}: too few points")
                    continue
                grid = np.unique(xs)
                fit, flags = loess(xs, ys, grid=grid, degree=loess_degree, span=loess_span)
                for t, v, flag in zip(grid, fit, flags):
                    writer.writerow([engine, label, t, v, int(flag)])

    times_path = out_dir / "completion_times.csv"
    with open(times_path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["engine", "group", "median_time_s", "n_sessions"])
        engines = sorted({log.engine for log in clean_logs})
        for engine in engines:
            labels = sorted({lbl for log in clean_logs if log.engine == engine
                             for lbl in group_labels(log)})
            for label in labels:
                durations = [log.events[-1].timestamp_ms / 1000.0
                             for log in clean_logs
                             if log.engine == engine and label in group_labels(log)
                             and log.events]
                if durations:
                    writer.writerow([engine, label, statistics.median(durations),
                                     len(durations)])

    return {
        "files": [str(recall_path), str(series_path), str(loess_path), str(times_path)],
        "errors": errors,
        "sessions": [log.session_id for log in clean_logs],
    }
