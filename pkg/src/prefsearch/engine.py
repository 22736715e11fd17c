"""Weighted search engine: term suggestion, must-have/must-not filtering,
summed relevance scoring and pagination.

Weights live on an 11-step scale in [0, 1].  Weight 1 keeps only products
that crisply satisfy the criterion, weight 0 eliminates products that do,
and interior weights only influence the ranking.  New criteria start at 0.9
so they never filter.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels, catalog as cat, scoring
from .errors import UnknownFacetError, ValidationError

PAGE_SIZE = 15
DEFAULT_WEIGHT = 0.9
WEIGHT_STEP = 0.1

NOMINAL = "nominal"
NUMERIC_POINT = "numeric_point"
NUMERIC_DIRECTED = "numeric_directed"
NUMERIC_RANGE = "numeric_range"
GEO = "geo"
FREE_TEXT = "free_text"

_KINDS = {NOMINAL, NUMERIC_POINT, NUMERIC_DIRECTED, NUMERIC_RANGE, GEO, FREE_TEXT}


@dataclass(frozen=True)
class Criterion:
    criterion_id: str
    kind: str
    weight: float = DEFAULT_WEIGHT
    facet_id: str | None = None
    value: str | float | None = None  # nominal/geo term or numeric point value
    lo: float | None = None
    hi: float | None = None
    term: str | None = None  # free text

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"criterion {self.criterion_id!r}: unknown kind {self.kind!r}")
        if not 0.0 <= self.weight <= 1.0:
            raise ValidationError(
                f"criterion {self.criterion_id!r}: weight {self.weight} outside [0,1]"
            )
        if self.kind == FREE_TEXT:
            if not self.term:
                raise ValidationError(f"criterion {self.criterion_id!r}: free text needs a term")
        elif self.facet_id is None:
            raise ValidationError(f"criterion {self.criterion_id!r}: facet_id required")
        if self.kind == NUMERIC_RANGE and (self.lo is None or self.hi is None or self.lo >= self.hi):
            raise ValidationError(f"criterion {self.criterion_id!r}: needs lo < hi")

    def signature(self):
        """Identity of the criterion ignoring its weight (score-cache key)."""
        return (self.kind, self.facet_id, self.value, self.lo, self.hi, self.term)

    def to_json(self) -> dict:
        d = {"criterion_id": self.criterion_id, "kind": self.kind, "weight": self.weight}
        if self.facet_id is not None:
            d["facet_id"] = self.facet_id
        if self.value is not None:
            d["value"] = self.value
        if self.lo is not None:
            d["lo"] = self.lo
        if self.hi is not None:
            d["hi"] = self.hi
        if self.term is not None:
            d["term"] = self.term
        return d

    @staticmethod
    def from_json(d: dict) -> "Criterion":
        return Criterion(
            criterion_id=d["criterion_id"],
            kind=d["kind"],
            weight=float(d.get("weight", DEFAULT_WEIGHT)),
            facet_id=d.get("facet_id"),
            value=d.get("value"),
            lo=d.get("lo"),
            hi=d.get("hi"),
            term=d.get("term"),
        )


@dataclass(frozen=True)
class WeightedQuery:
    criteria: tuple[Criterion, ...] = ()

    def __post_init__(self):
        ids = [c.criterion_id for c in self.criteria]
        if len(ids) != len(set(ids)):
            raise ValidationError("criterion_ids must be unique within a query")

    def to_json(self) -> dict:
        return {"criteria": [c.to_json() for c in self.criteria]}

    @staticmethod
    def from_json(d: dict) -> "WeightedQuery":
        return WeightedQuery(tuple(Criterion.from_json(c) for c in d.get("criteria", ())))


@dataclass(frozen=True)
class ScoredResult:
    product_id: str
    srs: float
    per_criterion: tuple  # of (criterion_id, rs, matched)

    def to_json(self) -> dict:
        return {
            "product_id": self.product_id,
            "srs": self.srs,
            "per_criterion": [
                {"criterion_id": cid, "rs": rs, "matched": matched}
                for cid, rs, matched in self.per_criterion
            ],
        }


@dataclass(frozen=True)
class ResultPage:
    page_index: int
    page_size: int
    items: tuple[ScoredResult, ...]
    total_count: int

    def to_json(self) -> dict:
        return {
            "page_index": self.page_index,
            "page_size": self.page_size,
            "total_count": self.total_count,
            "items": [item.to_json() for item in self.items],
        }


@dataclass(frozen=True)
class Suggestion:
    kind: str  # "term" | "category" | "free_text"
    text: str
    facet_id: str | None = None
    category: str | None = None

    def to_json(self) -> dict:
        return {"kind": self.kind, "text": self.text, "facet_id": self.facet_id,
                "category": self.category}


class Engine:
    """Scores and ranks one immutable catalog; safe to share across sessions."""

    def __init__(self, catalog: cat.Catalog):
        self.catalog = catalog
        self.product_ids = [p.product_id for p in catalog.products]
        self._prices = np.asarray([p.price for p in catalog.products], dtype=np.float64)
        self._stars = np.asarray([p.stars for p in catalog.products], dtype=np.float64)
        self._ratings = np.asarray([p.rating for p in catalog.products], dtype=np.float64)
        self._text_index = scoring.TextIndex(catalog)
        self._score_cache: dict[tuple, np.ndarray] = {}

    # -- scoring -----------------------------------------------------------

    def _field_values(self, facet: cat.FacetDefinition) -> np.ndarray:
        return {"price": self._prices, "stars": self._stars, "rating": self._ratings}[
            facet.bound_field
        ]

    def _facet(self, facet_id: str) -> cat.FacetDefinition:
        if not self.catalog.has_facet(facet_id):
            raise UnknownFacetError(f"unknown facet {facet_id!r}")
        return self.catalog.facet(facet_id)

    def _geo_distances(self, neighborhood: str) -> np.ndarray:
        if neighborhood not in self.catalog.neighborhoods:
            raise UnknownFacetError(f"unknown neighborhood {neighborhood!r}")
        key = ("__distances__", neighborhood)
        if key not in self._score_cache:
            point = self.catalog.neighborhoods[neighborhood]
            self._score_cache[key] = scoring.distances_to(self.catalog, point)
        return self._score_cache[key]

    def criterion_scores(self, criterion: Criterion) -> np.ndarray:
        """Per-product rs in [0,1] for one criterion, catalog order."""
        key = criterion.signature()
        if key in self._score_cache:
            return self._score_cache[key]
        kind = criterion.kind
        if kind == NOMINAL:
            facet = self._facet(criterion.facet_id)
            if facet.criterion_class != cat.NOMINAL:
                raise ValidationError(f"facet {facet.facet_id!r} is not nominal")
            rs = np.asarray(
                [
                    1.0 if criterion.value in p.nominal_features.get(criterion.facet_id, ()) else 0.0
                    for p in self.catalog.products
                ],
                dtype=np.float64,
            )
        elif kind == GEO:
            facet = self._facet(criterion.facet_id)
            cfg = scoring.gaussian_config(facet)
            rs = scoring.gaussian_scores(self._geo_distances(criterion.value), cfg)
        elif kind == NUMERIC_POINT:
            facet = self._facet(criterion.facet_id)
            cfg = scoring.gaussian_config(facet)
            distances = np.abs(self._field_values(facet) - float(criterion.value))
            rs = scoring.gaussian_scores(distances, cfg)
        elif kind == NUMERIC_DIRECTED:
            facet = self._facet(criterion.facet_id)
            cfg = scoring.linear_config(facet)
            rs = scoring.linear_scores(self._field_values(facet), cfg)
        elif kind == NUMERIC_RANGE:
            facet = self._facet(criterion.facet_id)
            cfg = scoring.trilinear_config(facet)
            rs = scoring.trilinear_scores(self._field_values(facet), criterion.lo, criterion.hi, cfg)
        else:  # FREE_TEXT
            rs = self._text_index.scores(criterion.term)
        self._score_cache[key] = rs
        return rs

    def crisp_mask(self, criterion: Criterion) -> np.ndarray:
        """Boolean crisp satisfaction per product, used by weight-1/0 filters."""
        kind = criterion.kind
        if kind == NOMINAL:
            return self.criterion_scores(criterion) > 0
        if kind == GEO:
            facet = self._facet(criterion.facet_id)
            cfg = scoring.gaussian_config(facet)
            return self._geo_distances(criterion.value) <= cfg.offset
        if kind == NUMERIC_POINT:
            facet = self._facet(criterion.facet_id)
            cfg = scoring.gaussian_config(facet)
            return np.abs(self._field_values(facet) - float(criterion.value)) <= cfg.offset
        if kind == NUMERIC_RANGE:
            facet = self._facet(criterion.facet_id)
            values = self._field_values(facet)
            return (values >= criterion.lo) & (values <= criterion.hi)
        # directed prefs and free text: satisfied whenever the fuzzy score is positive
        return self.criterion_scores(criterion) > 0

    # -- search ------------------------------------------------------------

    def filter(self, query: WeightedQuery) -> set[str]:
        """Product ids passing every must-have and no must-not criterion."""
        mask = self._filter_mask(query)
        return {pid for pid, keep in zip(self.product_ids, mask) if keep}

    def _filter_mask(self, query: WeightedQuery) -> np.ndarray:
        mask = np.ones(len(self.product_ids), dtype=bool)
        for criterion in query.criteria:
            if criterion.weight == 1.0:
                mask &= self.crisp_mask(criterion)
            elif criterion.weight == 0.0:
                mask &= ~self.crisp_mask(criterion)
        return mask

    def rank(self, query: WeightedQuery) -> list[ScoredResult]:
        """Full ordered result list: srs descending, ties by product_id."""
        mask = self._filter_mask(query)
        n = len(self.product_ids)
        if query.criteria:
            matrix = np.stack([self.criterion_scores(c) for c in query.criteria])
            weights = np.asarray([c.weight for c in query.criteria], dtype=np.float64)
            srs = _kernels.weighted_sum(matrix, weights)
        else:
            matrix = np.zeros((0, n))
            srs = np.zeros(n, dtype=np.float64)
        results = []
        for i in np.flatnonzero(mask):
            detail = tuple(
                (c.criterion_id, float(matrix[j, i]), bool(matrix[j, i] > 0))
                for j, c in enumerate(query.criteria)
            )
            results.append(ScoredResult(self.product_ids[i], float(srs[i]), detail))
        results.sort(key=lambda r: (-r.srs, r.product_id))
        return results

    def suggest(self, prefix: str, limit: int = 10) -> list[Suggestion]:
        return suggest(prefix, self.catalog, limit)


def suggest(prefix: str, catalog: cat.Catalog, limit: int = 10) -> list[Suggestion]:
    """Facet terms, then facet categories, matching the prefix as a
    case-insensitive substring; falls back to a single free-text marker."""
    needle = prefix.lower()
    terms = []
    for facet in catalog.schema:
        if facet.criterion_class not in (cat.NOMINAL, cat.GEO):
            continue
        for value in cat.facet_values(catalog, facet.facet_id):
            if needle in value.lower():
                terms.append(Suggestion("term", value, facet_id=facet.facet_id,
                                        category=facet.category))
    categories = [
        Suggestion("category", facet.category, facet_id=facet.facet_id,
                   category=facet.category)
        for facet in catalog.schema
        if needle in facet.category.lower()
    ]
    terms.sort(key=lambda s: (s.text, s.facet_id))
    categories.sort(key=lambda s: (s.text, s.facet_id))
    matches = terms + categories
    if not terms and not categories:
        return [Suggestion("free_text", prefix)]
    return matches[:limit]


def paginate(results: list[ScoredResult], page_index: int, page_size: int = PAGE_SIZE) -> ResultPage:
    if page_index < 0:
        raise ValidationError("page_index must be >= 0")
    start = page_index * page_size
    return ResultPage(
        page_index=page_index,
        page_size=page_size,
        items=tuple(results[start:start + page_size]),
        total_count=len(results),
    )
