"""Independent brute-force implementations used as test oracles.

Everything here is deliberately naive and shares no code path with the
package's engine or kernels.
"""

import math

EARTH_RADIUS_KM = 6371.0088


def haversine_km(lat1, lon1, lat2, lon2):
    p1, p2 = math.radians(lat1), math.radians(lat2)
    dlat = p2 - p1
    dlon = math.radians(lon2 - lon1)
    a = math.sin(dlat / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dlon / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(math.sqrt(a))


def gaussian_rs(distance, sigma, offset, cutoff_sigmas=3.0):
    if distance <= offset:
        return 1.0
    if distance > offset + cutoff_sigmas * sigma:
        return 0.0
    return math.exp(-((distance - offset) ** 2) / (2 * sigma * sigma))


def linear_rs(value, lo, hi, higher_better=True):
    value = min(max(value, lo), hi)
    frac = (value - lo) / (hi - lo)
    return frac if higher_better else 1 - frac


def trilinear_rs(value, lo, hi, ext=0.2, anchors=(1.0, 0.75, 0.7, 0.5, 0.45, 0.25)):
    left, right = lo * (1 - ext), hi * (1 + ext)
    if lo <= value <= hi:
        t = (value - lo) / (hi - lo)
        return anchors[0] + t * (anchors[1] - anchors[0])
    if left <= value < lo:
        t = (value - left) / (lo - left)
        return anchors[2] + t * (anchors[3] - anchors[2])
    if hi < value <= right:
        t = (value - hi) / (right - hi)
        return anchors[4] + t * (anchors[5] - anchors[4])
    return 0.0


def tokenize(text):
    out, word = [], []
    for ch in text.lower():
        if ch.isalnum():
            word.append(ch)
        elif word:
            out.append("".join(word))
            word = []
    if word:
        out.append("".join(word))
    return out


_TEXT_MEMO = {}


def text_scores(catalog, term):
    """Normalized tf-idf per product id, recomputed from scratch."""
    term = term.lower()
    memo_key = (id(catalog), term)
    if memo_key in _TEXT_MEMO:
        return _TEXT_MEMO[memo_key]
    tf = {}
    for p in catalog.products:
        tf[p.product_id] = tokenize(" ".join(p.text_blobs)).count(term)
    df = sum(1 for v in tf.values() if v > 0)
    if df == 0:
        result = {pid: 0.0 for pid in tf}
    else:
        n = len(catalog.products)
        raw = {pid: v * math.log(1 + n / df) for pid, v in tf.items()}
        peak = max(raw.values())
        result = {pid: (v / peak if peak else 0.0) for pid, v in raw.items()}
    _TEXT_MEMO[memo_key] = result
    return result


def criterion_rs(catalog, product, criterion):
    """Naive per-criterion relevance score for one product."""
    kind = criterion.kind
    if kind == "nominal":
        return 1.0 if criterion.value in product.nominal_features.get(criterion.facet_id, ()) else 0.0
    facet = catalog.facet(criterion.facet_id) if criterion.facet_id else None
    if kind == "geo":
        lat, lon = catalog.neighborhoods[criterion.value]
        d = haversine_km(lat, lon, product.location[0], product.location[1])
        cfg = facet.scoring_config
        return gaussian_rs(d, cfg["sigma"], cfg.get("offset", 0.0), cfg.get("cutoff_sigmas", 3.0))
    if kind == "numeric_point":
        cfg = facet.scoring_config
        d = abs(product.numeric_value(facet.bound_field) - criterion.value)
        return gaussian_rs(d, cfg["sigma"], cfg.get("offset", 0.0), cfg.get("cutoff_sigmas", 3.0))
    if kind == "numeric_directed":
        cfg = facet.scoring_config
        return linear_rs(product.numeric_value(facet.bound_field), cfg["scale_min"],
                         cfg["scale_max"], cfg["direction"] == "higher_better")
    if kind == "numeric_range":
        cfg = facet.scoring_config
        return trilinear_rs(product.numeric_value(facet.bound_field), criterion.lo,
                            criterion.hi, cfg.get("extension_fraction", 0.2),
                            tuple(cfg.get("anchors", (1.0, 0.75, 0.7, 0.5, 0.45, 0.25))))
    if kind == "free_text":
        return text_scores(catalog, criterion.term)[product.product_id]
    raise AssertionError(kind)


def crisp_satisfies(catalog, product, criterion):
    kind = criterion.kind
    if kind == "nominal":
        return criterion.value in product.nominal_features.get(criterion.facet_id, ())
    facet = catalog.facet(criterion.facet_id) if criterion.facet_id else None
    if kind == "geo":
        lat, lon = catalog.neighborhoods[criterion.value]
        d = haversine_km(lat, lon, product.location[0], product.location[1])
        return d <= facet.scoring_config.get("offset", 0.0)
    if kind == "numeric_point":
        d = abs(product.numeric_value(facet.bound_field) - criterion.value)
        return d <= facet.scoring_config.get("offset", 0.0)
    if kind == "numeric_range":
        return criterion.lo <= product.numeric_value(facet.bound_field) <= criterion.hi
    return criterion_rs(catalog, product, criterion) > 0


def brute_force_srs(catalog, product, query):
    return sum(c.weight * criterion_rs(catalog, product, c) for c in query.criteria)


def brute_force_filter(catalog, query):
    ids = set()
    for p in catalog.products:
        ok = True
        for c in query.criteria:
            sat = crisp_satisfies(catalog, p, c)
            if c.weight == 1.0 and not sat:
                ok = False
            if c.weight == 0.0 and sat:
                ok = False
        if ok:
            ids.add(p.product_id)
    return ids


def ndcg_reference(ranked_ids, judgments, k):
    """Direct DCG/IDCG computation with explicit log2 discounts."""
    dcg = 0.0
    for i, pid in enumerate(ranked_ids[:k]):
        dcg += judgments.get(pid, 0) / math.log2(i + 2)
    gains = sorted(judgments.values(), reverse=True)[:k]
    idcg = sum(g / math.log2(i + 2) for i, g in enumerate(gains))
    return dcg / idcg if idcg > 0 else 0.0


def loess_reference(x, y, grid, degree=2, span=0.75):
    """Second LOESS implementation: polyfit-based, loop-heavy."""
    import numpy as np

    x = np.asarray(x, float)
    y = np.asarray(y, float)
    n = len(x)
    q = math.ceil(span * n)
    fitted = []
    for x0 in grid:
        d = np.abs(x - x0)
        dmax = np.sort(d)[q - 1]
        if dmax == 0:
            w = (d == 0).astype(float)
        else:
            u = np.clip(d / dmax, 0, 1)
            w = (1 - u**3) ** 3
        if w.sum() == 0:
            w = (d <= dmax).astype(float)
        coeffs = np.polyfit(x - x0, y, degree, w=np.sqrt(w))
        fitted.append(np.polyval(coeffs, 0.0))
    return np.asarray(fitted)


def random_query(rng, catalog, n_criteria=None, allow_extremes=True):
    """Random weighted query over a catalog, for property tests."""
    from prefsearch import engine as eng

    nominal_facets = [f for f in catalog.schema if f.criterion_class == "nominal"]
    vocab = sorted({t for p in catalog.products for t in tokenize(" ".join(p.text_blobs))})
    n = n_criteria if n_criteria is not None else rng.randint(1, 5)
    criteria = []
    steps = list(range(11)) if allow_extremes else list(range(1, 10))
    for i in range(n):
        weight = rng.choice(steps) / 10.0
        kind = rng.choice(["nominal", "geo", "numeric_range", "numeric_directed", "free_text"])
        if kind == "nominal":
            facet = rng.choice(nominal_facets)
            from prefsearch import catalog as cat_mod
            values = cat_mod.facet_values(catalog, facet.facet_id) or ["missing-value"]
            criteria.append(eng.Criterion(f"c{i}", "nominal", weight, facet.facet_id,
                                          rng.choice(values)))
        elif kind == "geo":
            criteria.append(eng.Criterion(f"c{i}", "geo", weight, "neighborhood",
                                          rng.choice(sorted(catalog.neighborhoods))))
        elif kind == "numeric_range":
            lo = rng.uniform(30, 150)
            hi = lo + rng.uniform(5, 150)
            criteria.append(eng.Criterion(f"c{i}", "numeric_range", weight, "price",
                                          lo=round(lo, 2), hi=round(hi, 2)))
        elif kind == "numeric_directed":
            criteria.append(eng.Criterion(f"c{i}", "numeric_directed", weight,
                                          rng.choice(["rating", "stars"])))
        else:
            criteria.append(eng.Criterion(f"c{i}", "free_text", weight, term=rng.choice(vocab)))
    return eng.WeightedQuery(tuple(criteria))
