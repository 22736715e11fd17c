"""Conjunctive faceted baseline: filter by selected facet terms, show
remaining-result counts per term, sort by relevance/price/stars/rating."""

from __future__ import annotations

from dataclasses import dataclass

from . import catalog as cat
from .errors import UnknownFacetError, ValidationError

SORT_RELEVANCE = "relevance"
SORT_PRICE_ASC = "price_asc"
SORT_STARS_DESC = "stars_desc"
SORT_RATING_DESC = "rating_desc"

SORTS = (SORT_RELEVANCE, SORT_PRICE_ASC, SORT_STARS_DESC, SORT_RATING_DESC)


@dataclass(frozen=True)
class FacetSelection:
    selected: frozenset[tuple[str, str]] = frozenset()  # (facet_id, value)
    sort: str = SORT_RELEVANCE

    def __post_init__(self):
        if self.sort not in SORTS:
            raise ValidationError(f"unknown sort {self.sort!r}")

    def with_value(self, facet_id: str, value: str) -> "FacetSelection":
        return FacetSelection(self.selected | {(facet_id, value)}, self.sort)

    def to_json(self) -> dict:
        return {
            "selected": [{"facet_id": f, "value": v} for f, v in sorted(self.selected)],
            "sort": self.sort,
        }

    @staticmethod
    def from_json(d: dict) -> "FacetSelection":
        return FacetSelection(
            frozenset((s["facet_id"], s["value"]) for s in d.get("selected", ())),
            d.get("sort", SORT_RELEVANCE),
        )


def _matches(product: cat.Product, facet_id: str, value: str) -> bool:
    return value in product.nominal_features.get(facet_id, ())


def _validate_selection(selection: FacetSelection, catalog: cat.Catalog) -> None:
    for facet_id, value in selection.selected:
        if not catalog.has_facet(facet_id):
            raise UnknownFacetError(f"unknown facet {facet_id!r}")
        if value not in cat.facet_values(catalog, facet_id):
            raise UnknownFacetError(f"unknown value {value!r} for facet {facet_id!r}")


def _sort_key(selection: FacetSelection, product: cat.Product):
    if selection.sort == SORT_PRICE_ASC:
        return (product.price, product.product_id)
    if selection.sort == SORT_STARS_DESC:
        return (-product.stars, product.product_id)
    if selection.sort == SORT_RATING_DESC:
        return (-product.rating, product.product_id)
    # relevance: matched-term count is constant under pure conjunction,
    # so this falls back to product_id order
    return (product.product_id,)


def facet_filter(selection: FacetSelection, catalog: cat.Catalog) -> list[str]:
    """Ids of products matching every selected term, in the selected sort."""
    _validate_selection(selection, catalog)
    survivors = [
        p for p in catalog.products
        if all(_matches(p, f, v) for f, v in selection.selected)
    ]
    survivors.sort(key=lambda p: _sort_key(selection, p))
    return [p.product_id for p in survivors]


def facet_counts(selection: FacetSelection, catalog: cat.Catalog) -> dict[tuple[str, str], int]:
    """Remaining-result count after additionally choosing each facet value."""
    _validate_selection(selection, catalog)
    current = [
        p for p in catalog.products
        if all(_matches(p, f, v) for f, v in selection.selected)
    ]
    counts: dict[tuple[str, str], int] = {}
    for facet in catalog.schema:
        if facet.criterion_class not in (cat.NOMINAL, cat.GEO):
            continue
        for value in cat.facet_values(catalog, facet.facet_id):
            key = (facet.facet_id, value)
            if key in selection.selected:
                counts[key] = len(current)
            else:
                counts[key] = sum(1 for p in current if _matches(p, facet.facet_id, value))
    return counts
