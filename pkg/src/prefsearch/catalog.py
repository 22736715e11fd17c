"""Product/facet data model, catalog I/O and the synthetic dataset generator.

The catalog file format is a single JSON document (format string
``prefsearch-catalog/1``) with top-level keys ``schema``, ``products`` and
``neighborhoods``.  See README for the field-by-field description.
"""

from __future__ import annotations

import hashlib
import json
import random
from dataclasses import dataclass, field
from importlib import resources
from typing import Optional

from .errors import CatalogParseError, ConstraintViolationError, ValidationError

FORMAT_STRING = "prefsearch-catalog/1"

NOMINAL = "nominal"
NUMERIC_POINT = "numeric_point"
NUMERIC_DIRECTED = "numeric_directed"
NUMERIC_RANGE = "numeric_range"
GEO = "geo"
TEXT = "text"

CRITERION_CLASSES = {NOMINAL, NUMERIC_POINT, NUMERIC_DIRECTED, NUMERIC_RANGE, GEO, TEXT}

# Numeric product fields a numeric facet may bind to.
NUMERIC_FIELDS = {"price", "stars", "rating"}


@dataclass(frozen=True)
class FacetDefinition:
    facet_id: str
    display_name: str
    category: str
    criterion_class: str
    scoring_config: dict = field(default_factory=dict)
    # product field for numeric classes (price/stars/rating)
    bound_field: Optional[str] = None

    def validate(self) -> None:
        if self.criterion_class not in CRITERION_CLASSES:
            raise ValidationError(
                f"facet {self.facet_id!r}: unknown criterion class {self.criterion_class!r}"
            )
        cfg = self.scoring_config
        if self.criterion_class in (GEO, NUMERIC_POINT):
            sigma = cfg.get("sigma")
            if sigma is None or sigma <= 0:
                raise ValidationError(f"facet {self.facet_id!r}: sigma must be > 0")
            if cfg.get("offset", 0.0) < 0:
                raise ValidationError(f"facet {self.facet_id!r}: offset must be >= 0")
        elif self.criterion_class == NUMERIC_DIRECTED:
            if not {"scale_min", "scale_max", "direction"} <= cfg.keys():
                raise ValidationError(
                    f"facet {self.facet_id!r}: directed facet needs scale_min/scale_max/direction"
                )
            if cfg["scale_min"] >= cfg["scale_max"]:
                raise ValidationError(f"facet {self.facet_id!r}: scale_min must be < scale_max")
            if cfg["direction"] not in ("higher_better", "lower_better"):
                raise ValidationError(f"facet {self.facet_id!r}: bad direction {cfg['direction']!r}")
        elif self.criterion_class == NUMERIC_RANGE:
            ext = cfg.get("extension_fraction", 0.2)
            if not 0 < ext < 1:
                raise ValidationError(
                    f"facet {self.facet_id!r}: extension_fraction must be in (0,1)"
                )
        if self.criterion_class in (NUMERIC_POINT, NUMERIC_DIRECTED, NUMERIC_RANGE):
            if self.bound_field not in NUMERIC_FIELDS:
                raise ValidationError(
                    f"facet {self.facet_id!r}: numeric facet must bind a field in {sorted(NUMERIC_FIELDS)}"
                )


@dataclass(frozen=True)
class Product:
    product_id: str
    name: str
    price: float
    stars: int
    rating: float
    location: tuple[float, float]  # (lat, lon)
    nominal_features: dict[str, frozenset[str]]
    text_blobs: tuple[str, ...]

    def numeric_value(self, field_name: str) -> float:
        return float(getattr(self, field_name))


@dataclass(frozen=True)
class Catalog:
    schema: tuple[FacetDefinition, ...]
    products: tuple[Product, ...]
    neighborhoods: dict[str, tuple[float, float]]

    def __post_init__(self):
        object.__setattr__(self, "_facets_by_id", {f.facet_id: f for f in self.schema})
        object.__setattr__(self, "_products_by_id", {p.product_id: p for p in self.products})

    def facet(self, facet_id: str) -> FacetDefinition:
        return self._facets_by_id[facet_id]

    def has_facet(self, facet_id: str) -> bool:
        return facet_id in self._facets_by_id

    def product(self, product_id: str) -> Product:
        return self._products_by_id[product_id]

    def validate(self) -> None:
        seen = set()
        for f in self.schema:
            if f.facet_id in seen:
                raise ValidationError(f"duplicate facet_id {f.facet_id!r}")
            seen.add(f.facet_id)
            f.validate()
        seen_pid = set()
        for p in self.products:
            if p.product_id in seen_pid:
                raise ValidationError(f"duplicate product_id {p.product_id!r}")
            seen_pid.add(p.product_id)
            if p.price <= 0:
                raise ValidationError(f"product {p.product_id!r}: price must be > 0")
            if not 1 <= p.stars <= 5:
                raise ValidationError(f"product {p.product_id!r}: stars out of scale 1..5")
            if not 1 <= p.rating <= 10:
                raise ValidationError(f"product {p.product_id!r}: rating out of scale 1..10")
            for facet_id, values in p.nominal_features.items():
                if facet_id not in self._facets_by_id:
                    raise ValidationError(
                        f"product {p.product_id!r}: unknown facet_id {facet_id!r}"
                    )
                facet = self._facets_by_id[facet_id]
                if facet.criterion_class == GEO:
                    for v in values:
                        if v not in self.neighborhoods:
                            raise ValidationError(
                                f"product {p.product_id!r}: unknown neighborhood {v!r}"
                            )
                elif facet.criterion_class != NOMINAL:
                    raise ValidationError(
                        f"product {p.product_id!r}: facet {facet_id!r} cannot hold nominal values"
                    )


# ---------------------------------------------------------------------------
# Serialization


def _facet_to_json(f: FacetDefinition) -> dict:
    d = {
        "facet_id": f.facet_id,
        "display_name": f.display_name,
        "category": f.category,
        "criterion_class": f.criterion_class,
        "scoring_config": f.scoring_config,
    }
    if f.bound_field is not None:
        d["field"] = f.bound_field
    return d


def _product_to_json(p: Product) -> dict:
    return {
        "product_id": p.product_id,
        "name": p.name,
        "price": p.price,
        "stars": p.stars,
        "rating": p.rating,
        "location": {"lat": p.location[0], "lon": p.location[1]},
        "nominal_features": {k: sorted(v) for k, v in sorted(p.nominal_features.items())},
        "text_blobs": list(p.text_blobs),
    }


def catalog_to_json(catalog: Catalog) -> dict:
    return {
        "format": FORMAT_STRING,
        "schema": [_facet_to_json(f) for f in catalog.schema],
        "neighborhoods": {
            name: {"lat": lat, "lon": lon}
            for name, (lat, lon) in sorted(catalog.neighborhoods.items())
        },
        "products": [_product_to_json(p) for p in catalog.products],
    }


def catalog_from_json(doc: dict) -> Catalog:
    if doc.get("format") != FORMAT_STRING:
        raise CatalogParseError(f"unsupported catalog format {doc.get('format')!r}")
    try:
        schema = tuple(
            FacetDefinition(
                facet_id=f["facet_id"],
                display_name=f["display_name"],
                category=f["category"],
                criterion_class=f["criterion_class"],
                scoring_config=f.get("scoring_config", {}),
                bound_field=f.get("field"),
            )
            for f in doc["schema"]
        )
        neighborhoods = {
            name: (c["lat"], c["lon"]) for name, c in doc.get("neighborhoods", {}).items()
        }
        products = tuple(
            Product(
                product_id=p["product_id"],
                name=p["name"],
                price=float(p["price"]),
                stars=int(p["stars"]),
                rating=float(p["rating"]),
                location=(p["location"]["lat"], p["location"]["lon"]),
                nominal_features={
                    k: frozenset(v) for k, v in p.get("nominal_features", {}).items()
                },
                text_blobs=tuple(p.get("text_blobs", ())),
            )
            for p in doc["products"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CatalogParseError(f"malformed catalog document: {exc}") from exc
    catalog = Catalog(schema=schema, products=products, neighborhoods=neighborhoods)
    catalog.validate()
    return catalog


def load_catalog(path) -> Catalog:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CatalogParseError(f"cannot read catalog {path}: {exc}") from exc
    return catalog_from_json(doc)


def save_catalog(catalog: Catalog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(catalog_to_json(catalog), fh, indent=1, sort_keys=False)
        fh.write("\n")


def catalog_hash(catalog: Catalog) -> str:
    canonical = json.dumps(catalog_to_json(catalog), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def bundled_catalog_path():
    return resources.files("prefsearch.data").joinpath("berlin_hotels.json")


def bundled_spec_path():
    return resources.files("prefsearch.data").joinpath("paul_scenario.json")


def load_bundled_catalog() -> Catalog:
    with resources.as_file(bundled_catalog_path()) as p:
        return load_catalog(p)


# ---------------------------------------------------------------------------
# Bundled schema (18 categories) and neighborhoods

BERLIN_NEIGHBORHOODS: dict[str, tuple[float, float]] = {
    "Mitte": (52.5200, 13.4050),
    "Tiergarten": (52.5145, 13.3500),
    "Kreuzberg": (52.4990, 13.4030),
    "Prenzlauer Berg": (52.5390, 13.4240),
    "Charlottenburg": (52.5160, 13.3040),
    "Friedrichshain": (52.5120, 13.4540),
    "Neukoelln": (52.4810, 13.4350),
    "Schoeneberg": (52.4830, 13.3570),
    "Wedding": (52.5500, 13.3410),
    "Spandau": (52.5370, 13.2000),
}

_NOMINAL_VALUES: dict[str, list[str]] = {
    "transport": ["public transport", "airport shuttle", "bike rental"],
    "room_type": ["single room", "double room", "suite", "apartment"],
    "meal": ["breakfast", "restaurant", "half board", "vegetarian options"],
    "entertainment": ["bar", "casino", "live music", "nightclub"],
    "sport": ["fitness center", "pool", "tennis court"],
    "payment_type": ["invoice", "credit card", "cash", "paypal"],
    "wellness": ["spa", "sauna", "massage"],
    "business": ["conference room", "business center"],
    "family": ["playground", "babysitting", "family room"],
    "accessibility": ["wheelchair access", "elevator"],
    "internet": ["free wifi", "wired internet"],
    "parking": ["garage", "free parking"],
    "services": ["room service", "laundry", "concierge"],
    "view": ["city view", "river view", "garden view"],
}

# Feature values referenced by the bundled scenario; the generator hands
# these out only where the planned graded relevance allows it, never as
# random extras.
_SCENARIO_VALUES = {
    ("meal", "restaurant"),
    ("entertainment", "bar"),
    ("sport", "fitness center"),
    ("payment_type", "invoice"),
    ("meal", "breakfast"),
    ("transport", "public transport"),
}


def bundled_schema() -> tuple[FacetDefinition, ...]:
    facets = [
        FacetDefinition("price", "Price", "price", NUMERIC_RANGE,
                        {"extension_fraction": 0.2}, "price"),
        FacetDefinition("neighborhood", "Neighborhood", "neighborhood", GEO,
                        {"sigma": 1.2, "offset": 0.4, "cutoff_sigmas": 3}),
        FacetDefinition("rating", "Customer rating", "rating", NUMERIC_DIRECTED,
                        {"scale_min": 1, "scale_max": 10, "direction": "higher_better"},
                        "rating"),
        FacetDefinition("stars", "Hotel stars", "stars", NUMERIC_DIRECTED,
                        {"scale_min": 1, "scale_max": 5, "direction": "higher_better"},
                        "stars"),
    ]
    for facet_id, _values in _NOMINAL_VALUES.items():
        category = facet_id.replace("_", " ")
        facets.append(FacetDefinition(facet_id, category.capitalize(), category, NOMINAL))
    return tuple(facets)


def facet_values(catalog: Catalog, facet_id: str) -> list[str]:
    """All concrete terms of a facet: nominal values seen in products, or
    neighborhood names for geo facets."""
    facet = catalog.facet(facet_id)
    if facet.criterion_class == GEO:
        return sorted(catalog.neighborhoods)
    values: set[str] = set()
    for p in catalog.products:
        values.update(p.nominal_features.get(facet_id, ()))
    return sorted(values)


# ---------------------------------------------------------------------------
# Synthetic dataset generator


@dataclass(frozen=True)
class DatasetConstraints:
    n_products: int = 150
    n_relevant: int = 15
    top_grade: int = 8
    n_top: int = 5


_NAME_ADJECTIVES = [
    "Golden", "Silver", "Royal", "Grand", "Quiet", "Sunny", "Old", "Modern",
    "Green", "Blue", "Central", "Cozy", "Bright", "Classic", "Urban", "Noble",
    "Little", "Happy", "Amber", "Velvet",
]
_NAME_NOUNS = [
    "Lion", "Bear", "Crown", "Garden", "River", "Linden", "Palace", "Court",
    "Anchor", "Star", "Gate", "Tower", "Bridge", "Meadow", "Harbor", "Lantern",
    "Falcon", "Oak", "Swan", "Compass",
]
_NAME_SUFFIXES = ["Hotel", "Inn", "Residenz", "Pension", "Lodge", "Hof"]


def _draw_names(rng: random.Random, count: int) -> list[str]:
    names: list[str] = []
    used: set[str] = set()
    while len(names) < count:
        name = (
            f"{rng.choice(_NAME_ADJECTIVES)} {rng.choice(_NAME_NOUNS)} "
            f"{rng.choice(_NAME_SUFFIXES)}"
        )
        if name in used:
            name = f"{name} {len(used)}"
        used.add(name)
        names.append(name)
    return names


def _jittered_location(rng: random.Random, district: str) -> tuple[float, float]:
    lat, lon = BERLIN_NEIGHBORHOODS[district]
    # jitter stays inside the geo scoring plateau (0.4 km)
    return (
        round(lat + rng.uniform(-0.0022, 0.0022), 6),
        round(lon + rng.uniform(-0.0036, 0.0036), 6),
    )


_REVIEW_SNIPPETS = [
    "friendly staff and clean rooms",
    "great location for sightseeing",
    "quiet at night despite the city",
    "rooms were small but comfortable",
    "excellent value for the money",
    "the lobby feels a bit dated",
    "wonderful view from the upper floors",
    "check-in was quick and easy",
]


def _make_text_blobs(rng: random.Random, features: dict[str, set[str]], district: str) -> tuple[str, ...]:
    listed = sorted(v for vals in features.values() for v in vals)
    description = f"Hotel in {district} offering " + ", ".join(listed) + "."
    review = "Guests said: " + rng.choice(_REVIEW_SNIPPETS) + "."
    return (description, review)


def _random_extras(rng: random.Random, features: dict[str, set[str]]) -> None:
    """Sprinkle non-scenario amenity values over a product."""
    for facet_id, values in _NOMINAL_VALUES.items():
        for v in values:
            if (facet_id, v) in _SCENARIO_VALUES:
                continue
            if rng.random() < 0.25:
                features.setdefault(facet_id, set()).add(v)


def _apply_bonuses(rng: random.Random, features: dict[str, set[str]], bonuses: set[str]) -> None:
    if "fitness" in bonuses:
        features.setdefault("sport", set()).add("fitness center")
    if "invoice" in bonuses:
        features.setdefault("payment_type", set()).add("invoice")
    if "restbar" in bonuses:
        pick = rng.choice(["restaurant", "bar", "both"])
        if pick in ("restaurant", "both"):
            features.setdefault("meal", set()).add("restaurant")
        if pick in ("bar", "both"):
            features.setdefault("entertainment", set()).add("bar")


def generate_dataset(seed: int, constraints: DatasetConstraints | None = None) -> Catalog:
    """Deterministically build a catalog satisfying the bundled scenario's
    relevance statistics: ``n_relevant`` products pass the mandatory criteria,
    exactly ``n_top`` of them grade at ``top_grade`` and none higher."""
    from . import evaluate  # deferred: evaluate is the self-check oracle

    c = constraints or DatasetConstraints()
    rng = random.Random(seed)
    non_mitte = [
        d for d in BERLIN_NEIGHBORHOODS if d not in ("Mitte", "Tiergarten")
    ]

    plans = []
    # Top-graded products: invoice + restaurant/bar, never fitness. The first
    # one is the strongest match of the whole catalog (cheapest in-range price,
    # every optional feature) so weighted queries have a deterministic leader.
    top_districts = ["Mitte", "Mitte", "Mitte", "Prenzlauer Berg", "Charlottenburg"]
    for i in range(c.n_top):
        plans.append({
            "district": top_districts[i % len(top_districts)],
            "price": 60.0 if i == 0 else round(rng.uniform(65, 118), 2),
            "breakfast": True,
            "transport": True,
            "bonuses": {"invoice", "restbar"},
            "hero": i == 0,
        })
    lower_bonus_sets = [
        set(), {"fitness"}, {"invoice"}, {"restbar"}, {"fitness", "invoice"},
        {"fitness", "restbar"}, set(), {"invoice"}, {"restbar"}, {"fitness", "invoice"},
    ]
    for i in range(c.n_relevant - c.n_top):
        in_mitte = rng.random() < 0.5
        plans.append({
            "district": "Mitte" if in_mitte else rng.choice(non_mitte),
            "price": round(rng.uniform(65, 118), 2),
            "breakfast": True,
            "transport": not in_mitte or rng.random() < 0.5,
            "bonuses": lower_bonus_sets[i % len(lower_bonus_sets)],
            "hero": False,
        })
    violations = ["price_low", "price_high", "no_breakfast", "tiergarten", "no_mitte_no_transport"]
    for i in range(c.n_products - c.n_relevant):
        kind = violations[i % len(violations)]
        plan = {
            "district": rng.choice(non_mitte + ["Mitte"]),
            "price": round(rng.uniform(62, 118), 2),
            "breakfast": rng.random() < 0.7,
            "transport": rng.random() < 0.5,
            "bonuses": {b for b in ("fitness", "invoice", "restbar") if rng.random() < 0.3},
            "hero": False,
        }
        if kind == "price_low":
            plan["price"] = round(rng.uniform(25, 58), 2)
        elif kind == "price_high":
            plan["price"] = round(rng.uniform(122, 320), 2)
        elif kind == "no_breakfast":
            plan["breakfast"] = False
        elif kind == "tiergarten":
            plan["district"] = "Tiergarten"
        else:  # no_mitte_no_transport
            plan["district"] = rng.choice(non_mitte)
            plan["transport"] = False
            plan["breakfast"] = True
        plans.append(plan)

    rng.shuffle(plans)
    names = _draw_names(rng, len(plans))

    products = []
    for idx, plan in enumerate(plans):
        features: dict[str, set[str]] = {"neighborhood": {plan["district"]}}
        if plan["breakfast"]:
            features.setdefault("meal", set()).add("breakfast")
        if plan["transport"]:
            features.setdefault("transport", set()).add("public transport")
        _apply_bonuses(rng, features, plan["bonuses"])
        if plan["hero"]:
            features.setdefault("meal", set()).add("restaurant")
            features.setdefault("entertainment", set()).add("bar")
        _random_extras(rng, features)
        district = plan["district"]
        product = Product(
            product_id=f"h{idx + 1:03d}",
            name=names[idx],
            price=plan["price"],
            stars=rng.randint(2, 5),
            rating=round(rng.uniform(4.0, 9.8), 1),
            location=_jittered_location(rng, district),
            nominal_features={k: frozenset(v) for k, v in features.items()},
            text_blobs=_make_text_blobs(rng, features, district),
        )
        products.append(product)

    catalog = Catalog(
        schema=bundled_schema(),
        products=tuple(products),
        neighborhoods=dict(BERLIN_NEIGHBORHOODS),
    )
    catalog.validate()

    spec = evaluate.load_relevance_spec(bundled_spec_path())
    grades = [evaluate.judge(p, spec) for p in catalog.products]
    n_relevant = sum(1 for g in grades if g >= 1)
    n_top = sum(1 for g in grades if g == c.top_grade)
    n_over = sum(1 for g in grades if g > c.top_grade)
    if (n_relevant, n_top, n_over) != (c.n_relevant, c.n_top, 0):
        raise ConstraintViolationError(
            f"generator self-check failed: relevant={n_relevant} (want {c.n_relevant}), "
            f"grade {c.top_grade}={n_top} (want {c.n_top}), above={n_over} (want 0)"
        )
    return catalog


def clone_with_renames(catalog: Catalog, seed: int) -> Catalog:
    """Copy a catalog, re-drawing only product names (ids preserved)."""
    rng = random.Random(seed)
    names = _draw_names(rng, len(catalog.products))
    products = tuple(
        Product(
            product_id=p.product_id,
            name=names[i],
            price=p.price,
            stars=p.stars,
            rating=p.rating,
            location=p.location,
            nominal_features=p.nominal_features,
            text_blobs=p.text_blobs,
        )
        for i, p in enumerate(catalog.products)
    )
    return Catalog(schema=catalog.schema, products=products,
                   neighborhoods=dict(catalog.neighborhoods))
