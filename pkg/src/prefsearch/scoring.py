"""Per-criterion relevance score (rs) functions.

Every function returns a value in [0, 1].  Numeric families (Gaussian,
linear-directed, tri-linear) run through the kernels in ``_kernels``; free
text uses a normalized tf-idf over each product's concatenated text blobs.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from math import log

import numpy as np

from . import _kernels, catalog as cat
from .errors import UnknownFacetError, ValidationError

DEFAULT_TRILINEAR_ANCHORS = (1.0, 0.75, 0.7, 0.5, 0.45, 0.25)


@dataclass(frozen=True)
class GaussianConfig:
    sigma: float
    offset: float = 0.0
    cutoff_sigmas: float = 3.0

    def __post_init__(self):
        if self.sigma <= 0:
            raise ValidationError("gaussian sigma must be > 0")
        if self.offset < 0:
            raise ValidationError("gaussian offset must be >= 0")


@dataclass(frozen=True)
class LinearDirectedConfig:
    scale_min: float
    scale_max: float
    higher_better: bool = True

    def __post_init__(self):
        if self.scale_min >= self.scale_max:
            raise ValidationError("linear scale_min must be < scale_max")


@dataclass(frozen=True)
class TriLinearConfig:
    extension_fraction: float = 0.2
    # score anchors: inner start/end, left-border start/end, right-border start/end
    anchors: tuple = field(default=DEFAULT_TRILINEAR_ANCHORS)

    def __post_init__(self):
        if not 0 < self.extension_fraction < 1:
            raise ValidationError("extension_fraction must be in (0,1)")
        a = self.anchors
        if len(a) != 6:
            raise ValidationError("tri-linear needs six anchors")
        descending_within = a[0] > a[1] and a[2] > a[3] and a[4] > a[5]
        ordered_between = a[1] > a[2] and a[3] > a[4] and a[5] > 0
        if not (descending_within and ordered_between and a[0] <= 1.0):
            raise ValidationError("tri-linear anchors must order inner > left > right > 0")


def gaussian_config(facet: cat.FacetDefinition) -> GaussianConfig:
    cfg = facet.scoring_config
    return GaussianConfig(
        sigma=float(cfg["sigma"]),
        offset=float(cfg.get("offset", 0.0)),
        cutoff_sigmas=float(cfg.get("cutoff_sigmas", 3.0)),
    )


def linear_config(facet: cat.FacetDefinition) -> LinearDirectedConfig:
    cfg = facet.scoring_config
    return LinearDirectedConfig(
        scale_min=float(cfg["scale_min"]),
        scale_max=float(cfg["scale_max"]),
        higher_better=cfg["direction"] == "higher_better",
    )


def trilinear_config(facet: cat.FacetDefinition) -> TriLinearConfig:
    cfg = facet.scoring_config
    return TriLinearConfig(
        extension_fraction=float(cfg.get("extension_fraction", 0.2)),
        anchors=tuple(cfg.get("anchors", DEFAULT_TRILINEAR_ANCHORS)),
    )


# ---------------------------------------------------------------------------
# Scalar scoring operations


def score_nominal(catalog: cat.Catalog, product: cat.Product, facet_id: str, value: str) -> float:
    if not catalog.has_facet(facet_id):
        raise UnknownFacetError(f"unknown facet {facet_id!r}")
    return 1.0 if value in product.nominal_features.get(facet_id, ()) else 0.0


def score_gaussian(distance: float, cfg: GaussianConfig) -> float:
    arr = _kernels.gaussian_rs(
        np.asarray([distance], dtype=np.float64), cfg.sigma, cfg.offset, cfg.cutoff_sigmas
    )
    return float(arr[0])


def score_linear_directed(value: float, cfg: LinearDirectedConfig) -> float:
    arr = _kernels.linear_directed_rs(
        np.asarray([value], dtype=np.float64), cfg.scale_min, cfg.scale_max, cfg.higher_better
    )
    return float(arr[0])


def score_trilinear(value: float, lo: float, hi: float, cfg: TriLinearConfig) -> float:
    if lo >= hi:
        raise ValidationError(f"invalid range: lo={lo} must be < hi={hi}")
    if lo <= 0:
        raise ValidationError("range lower bound must be > 0")
    arr = _kernels.trilinear_rs(
        np.asarray([value], dtype=np.float64), lo, hi, cfg.extension_fraction,
        np.asarray(cfg.anchors, dtype=np.float64),
    )
    return float(arr[0])


# ---------------------------------------------------------------------------
# Vectorized scoring over a whole catalog (catalog product order)


def gaussian_scores(distances: np.ndarray, cfg: GaussianConfig) -> np.ndarray:
    return _kernels.gaussian_rs(
        np.asarray(distances, dtype=np.float64), cfg.sigma, cfg.offset, cfg.cutoff_sigmas
    )


def linear_scores(values: np.ndarray, cfg: LinearDirectedConfig) -> np.ndarray:
    return _kernels.linear_directed_rs(
        np.asarray(values, dtype=np.float64), cfg.scale_min, cfg.scale_max, cfg.higher_better
    )


def trilinear_scores(values: np.ndarray, lo: float, hi: float, cfg: TriLinearConfig) -> np.ndarray:
    if lo >= hi:
        raise ValidationError(f"invalid range: lo={lo} must be < hi={hi}")
    if lo <= 0:
        raise ValidationError("range lower bound must be > 0")
    return _kernels.trilinear_rs(
        np.asarray(values, dtype=np.float64), lo, hi, cfg.extension_fraction,
        np.asarray(cfg.anchors, dtype=np.float64),
    )


def distances_to(catalog: cat.Catalog, point: tuple[float, float]) -> np.ndarray:
    lats = np.asarray([p.location[0] for p in catalog.products], dtype=np.float64)
    lons = np.asarray([p.location[1] for p in catalog.products], dtype=np.float64)
    return _kernels.haversine_km(point[0], point[1], lats, lons)


# ---------------------------------------------------------------------------
# Free-text tf-idf

_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


class TextIndex:
    """tf-idf index over each product's concatenated text blobs.

    Scores are tf * ln(1 + N/df), normalized per term by the corpus maximum so
    the best-matching product always scores 1.0.
    """

    def __init__(self, catalog: cat.Catalog):
        self.product_ids = [p.product_id for p in catalog.products]
        self.n_docs = len(catalog.products)
        self._tf: list[Counter] = []
        df: Counter = Counter()
        for p in catalog.products:
            counts = Counter(tokenize(" ".join(p.text_blobs)))
            self._tf.append(counts)
            df.update(counts.keys())
        self._df = df

    def df(self, term: str) -> int:
        return self._df.get(term.lower(), 0)

    def scores(self, term: str) -> np.ndarray:
        """Normalized tf-idf of one term over all products, catalog order."""
        term = term.lower()
        out = np.zeros(self.n_docs, dtype=np.float64)
        df = self._df.get(term, 0)
        if df == 0:
            return out
        idf = log(1.0 + self.n_docs / df)
        for i, counts in enumerate(self._tf):
            out[i] = counts.get(term, 0) * idf
        peak = out.max()
        if peak > 0:
            out /= peak
        return out

    def score(self, product_index: int, term: str) -> float:
        return float(self.scores(term)[product_index])


def score_text(catalog: cat.Catalog, product: cat.Product, term: str, index: TextIndex) -> float:
    return index.score(catalog.products.index(product), term)
