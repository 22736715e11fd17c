"""Numeric scoring kernels.

Pure-numpy implementations of the hot inner loops (per-criterion relevance
scores over whole catalogs, haversine distances).  When numba is importable
they are compiled with ``@njit`` unless ``PREFSEARCH_BACKEND=numpy`` is set,
which forces the interpreted fallback.  ``benchmarks/bench_kernels.py``
compares both paths.
"""

import math
import os

import numpy as np

EARTH_RADIUS_KM = 6371.0088


def _want_numba() -> bool:
    return os.environ.get("PREFSEARCH_BACKEND", "numba").lower() != "numpy"


def _gaussian_rs(distances, sigma, offset, cutoff_sigmas):
    out = np.empty(distances.shape[0], dtype=np.float64)
    cutoff = offset + cutoff_sigmas * sigma
    inv = 1.0 / (2.0 * sigma * sigma)
    for i in range(distances.shape[0]):
        d = distances[i]
        if d <= offset:
            out[i] = 1.0
        elif d <= cutoff:
            excess = d - offset
            out[i] = math.exp(-excess * excess * inv)
        else:
            out[i] = 0.0
    return out


def _linear_directed_rs(values, scale_min, scale_max, higher_better):
    out = np.empty(values.shape[0], dtype=np.float64)
    span = scale_max - scale_min
    for i in range(values.shape[0]):
        v = values[i]
        if v < scale_min:
            v = scale_min
        elif v > scale_max:
            v = scale_max
        frac = (v - scale_min) / span
        out[i] = frac if higher_better else 1.0 - frac
    return out


def _trilinear_rs(values, lo, hi, ext, anchors):
    # anchors: (inner_hi, inner_lo, left_hi, left_lo, right_hi, right_lo)
    out = np.zeros(values.shape[0], dtype=np.float64)
    left = lo * (1.0 - ext)
    right = hi * (1.0 + ext)
    for i in range(values.shape[0]):
        v = values[i]
        if lo <= v <= hi:
            t = (v - lo) / (hi - lo)
            out[i] = anchors[0] + t * (anchors[1] - anchors[0])
        elif left <= v < lo:
            t = (v - left) / (lo - left)
            out[i] = anchors[2] + t * (anchors[3] - anchors[2])
        elif hi < v <= right:
            t = (v - hi) / (right - hi)
            out[i] = anchors[4] + t * (anchors[5] - anchors[4])
    return out


def _haversine_km(lat1, lon1, lats, lons):
    out = np.empty(lats.shape[0], dtype=np.float64)
    rlat1 = math.radians(lat1)
    rlon1 = math.radians(lon1)
    for i in range(lats.shape[0]):
        rlat2 = math.radians(lats[i])
        rlon2 = math.radians(lons[i])
        dlat = rlat2 - rlat1
        dlon = rlon2 - rlon1
        a = math.sin(dlat / 2.0) ** 2 + math.cos(rlat1) * math.cos(rlat2) * math.sin(dlon / 2.0) ** 2
        out[i] = 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))
    return out


def _weighted_sum(score_matrix, weights):
    n_products = score_matrix.shape[1]
    out = np.zeros(n_products, dtype=np.float64)
    for c in range(score_matrix.shape[0]):
        w = weights[c]
        for p in range(n_products):
            out[p] += w * score_matrix[c, p]
    return out


USING_NUMBA = False

if _want_numba():
    try:
        from numba import njit

        gaussian_rs = njit(cache=True)(_gaussian_rs)
        linear_directed_rs = njit(cache=True)(_linear_directed_rs)
        trilinear_rs = njit(cache=True)(_trilinear_rs)
        haversine_km = njit(cache=True)(_haversine_km)
        weighted_sum = njit(cache=True)(_weighted_sum)
        USING_NUMBA = True
    except ImportError:
        pass

if not USING_NUMBA:
    gaussian_rs = _gaussian_rs
    linear_directed_rs = _linear_directed_rs
    trilinear_rs = _trilinear_rs
    haversine_km = _haversine_km
    weighted_sum = _weighted_sum
