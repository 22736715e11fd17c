import json

import pytest

from prefsearch import catalog as cat, engine as eng, evaluate


@pytest.fixture(scope="session")
def bundled_catalog():
    return cat.load_bundled_catalog()


@pytest.fixture(scope="session")
def paul_spec():
    return evaluate.load_relevance_spec(cat.bundled_spec_path())


@pytest.fixture(scope="session")
def judgments(bundled_catalog, paul_spec):
    return evaluate.judge_catalog(bundled_catalog, paul_spec)


@pytest.fixture(scope="session")
def search_engine(bundled_catalog):
    return eng.Engine(bundled_catalog)


def small_catalog_doc():
    """Three-hotel fixture with hand-checkable features."""
    schema = [
        {"facet_id": "price", "display_name": "Price", "category": "price",
         "criterion_class": "numeric_range", "field": "price",
         "scoring_config": {"extension_fraction": 0.2}},
        {"facet_id": "neighborhood", "display_name": "Neighborhood",
         "category": "neighborhood", "criterion_class": "geo",
         "scoring_config": {"sigma": 1.2, "offset": 0.4, "cutoff_sigmas": 3}},
        {"facet_id": "rating", "display_name": "Rating", "category": "rating",
         "criterion_class": "numeric_directed", "field": "rating",
         "scoring_config": {"scale_min": 1, "scale_max": 10, "direction": "higher_better"}},
        {"facet_id": "meal", "display_name": "Meal", "category": "meal",
         "criterion_class": "nominal", "scoring_config": {}},
        {"facet_id": "entertainment", "display_name": "Entertainment",
         "category": "entertainment", "criterion_class": "nominal", "scoring_config": {}},
    ]
    neighborhoods = {
        "Mitte": {"lat": 52.52, "lon": 13.405},
        "Tiergarten": {"lat": 52.5145, "lon": 13.35},
    }
    products = [
        {"product_id": "p1", "name": "Alpha House", "price": 80.0, "stars": 3,
         "rating": 7.5, "location": {"lat": 52.52, "lon": 13.405},
         "nominal_features": {"meal": ["breakfast"], "neighborhood": ["Mitte"]},
         "text_blobs": ["quiet rooms near the river", "friendly staff"]},
        {"product_id": "p2", "name": "Beta Lodge", "price": 100.0, "stars": 4,
         "rating": 8.0, "location": {"lat": 52.5145, "lon": 13.35},
         "nominal_features": {"meal": ["breakfast", "restaurant"],
                              "entertainment": ["bar"],
                              "neighborhood": ["Tiergarten"]},
         "text_blobs": ["lively bar and restaurant", "river view river terrace"]},
        {"product_id": "p3", "name": "Gamma Inn", "price": 150.0, "stars": 5,
         "rating": 9.0, "location": {"lat": 52.52, "lon": 13.406},
         "nominal_features": {"meal": ["restaurant"], "neighborhood": ["Mitte"]},
         "text_blobs": ["grand suites", "city lights"]},
    ]
    return {"format": "prefsearch-catalog/1", "schema": schema,
            "neighborhoods": neighborhoods, "products": products}


@pytest.fixture()
def small_catalog(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(small_catalog_doc()))
    return cat.load_catalog(path)


@pytest.fixture()
def small_catalog_path(tmp_path):
    path = tmp_path / "small.json"
    path.write_text(json.dumps(small_catalog_doc()))
    return path
