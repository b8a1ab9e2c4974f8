"""Hot numeric kernels, numba-compiled with a pure-numpy fallback.

Both implementations of every kernel are importable for benchmarking and
cross-checking; the module-level names dispatch to the numba versions unless
``SHARPMIN_FORCE_NUMPY=1`` is set (or numba is unavailable).

Conventions: point arrays are float64 of shape (n, d), value arrays are
float64 of shape (n,) and may contain +inf (never NaN). Infinite values are
skipped wherever the mathematical definitions skip them.
"""

import os

import numpy as np

_FORCE_NUMPY = os.environ.get("SHARPMIN_FORCE_NUMPY", "") == "1"

try:
    if _FORCE_NUMPY:
        raise ImportError("numpy path forced via SHARPMIN_FORCE_NUMPY")
    from numba import njit

    NUMBA_ENABLED = True
except ImportError:  # pragma: no cover - exercised via env flag
    NUMBA_ENABLED = False


# ---------------------------------------------------------------------------
# numpy implementations


def min_growth_ratio_numpy(points, values, base):
    """Minimum of (f(x) - f(base)) / ||x - base|| over finite non-base points.

    Returns (ratio, witness_index); witness is the first index attaining the
    minimum. Returns (nan, -1) if no finite non-base point exists.
    """
    diffs = points - points[base]
    dist = np.sqrt(np.sum(diffs * diffs, axis=1))
    ratios = np.full(len(values), np.inf)
    mask = np.isfinite(values) & (dist > 0.0)
    mask[base] = False
    if not mask.any():
        return np.nan, -1
    ratios[mask] = (values[mask] - values[base]) / dist[mask]
    ratios[~mask] = np.inf
    w = int(np.argmin(ratios))
    return float(ratios[w]), w


def slope_table_numpy(points, values):
    """Global slope at every finite-valued point; NaN where f is infinite."""
    n = len(values)
    diffs = points[:, None, :] - points[None, :, :]
    dist = np.sqrt(np.sum(diffs * diffs, axis=2))
    with np.errstate(invalid="ignore"):
        num = values[:, None] - values[None, :]
    # f(y) = +inf gives -inf numerator, clipped to zero below.
    num = np.where(np.isneginf(num), -1.0, num)
    np.fill_diagonal(dist, np.inf)
    ratios = np.maximum(num, 0.0) / dist
    slopes = np.max(ratios, axis=1)
    slopes[~np.isfinite(values)] = np.nan
    return slopes


def conjugate_brute_numpy(primal, values, dual):
    """sup_x <xi, x> - f(x) for each dual node xi; brute-force double loop."""
    finite = np.isfinite(values)
    if not finite.any():
        return np.full(len(dual), -np.inf)
    prods = dual @ primal[finite].T - values[finite][None, :]
    return np.max(prods, axis=1)


def fy_violation_numpy(primal, values, dual, conjugate):
    """Largest <xi, x> - f(x) - f*(xi) over all (finite x, xi) pairs."""
    finite = np.isfinite(values)
    if not finite.any():
        return -np.inf
    prods = dual @ primal[finite].T - values[finite][None, :] - conjugate[:, None]
    return float(np.max(prods))


# ---------------------------------------------------------------------------
# numba implementations

if NUMBA_ENABLED:

    @njit(cache=True)
    def _min_growth_ratio_nb(points, values, base):
        n, d = points.shape
        best = np.inf
        witness = -1
        for i in range(n):
            if i == base or not np.isfinite(values[i]):
                continue
            sq = 0.0
            for k in range(d):
                diff = points[i, k] - points[base, k]
                sq += diff * diff
            dist = np.sqrt(sq)
            if dist <= 0.0:
                continue
            ratio = (values[i] - values[base]) / dist
            if ratio < best:
                best = ratio
                witness = i
        if witness < 0:
            return np.nan, -1
        return best, witness

    @njit(cache=True)
    def _slope_table_nb(points, values):
        n, d = points.shape
        slopes = np.empty(n)
        for i in range(n):
            if not np.isfinite(values[i]):
                slopes[i] = np.nan
                continue
            best = 0.0
            for j in range(n):
                if j == i or not np.isfinite(values[j]):
                    continue
                num = values[i] - values[j]
                if num <= 0.0:
                    continue
                sq = 0.0
                for k in range(d):
                    diff = points[i, k] - points[j, k]
                    sq += diff * diff
                ratio = num / np.sqrt(sq)
                if ratio > best:
                    best = ratio
            slopes[i] = best
        return slopes

    @njit(cache=True)
    def _conjugate_brute_nb(primal, values, dual):
        m, d = dual.shape
        n = primal.shape[0]
        out = np.empty(m)
        for q in range(m):
            best = -np.inf
            for i in range(n):
                if not np.isfinite(values[i]):
                    continue
                dot = 0.0
                for k in range(d):
                    dot += dual[q, k] * primal[i, k]
                cand = dot - values[i]
                if cand > best:
                    best = cand
            out[q] = best
        return out

    @njit(cache=True)
    def _fy_violation_nb(primal, values, dual, conjugate):
        m, d = dual.shape
        n = primal.shape[0]
        worst = -np.inf
        for q in range(m):
            for i in range(n):
                if not np.isfinite(values[i]):
                    continue
                dot = 0.0
                for k in range(d):
                    dot += dual[q, k] * primal[i, k]
                v = dot - values[i] - conjugate[q]
                if v > worst:
                    worst = v
        return worst

    def min_growth_ratio_numba(points, values, base):
        ratio, witness = _min_growth_ratio_nb(points, values, base)
        return float(ratio), int(witness)

    slope_table_numba = _slope_table_nb
    conjugate_brute_numba = _conjugate_brute_nb

    def fy_violation_numba(primal, values, dual, conjugate):
        return float(_fy_violation_nb(primal, values, dual, conjugate))

    min_growth_ratio = min_growth_ratio_numba
    slope_table = slope_table_numba
    conjugate_brute = conjugate_brute_numba
    fy_violation = fy_violation_numba
else:
    min_growth_ratio = min_growth_ratio_numpy
    slope_table = slope_table_numpy
    conjugate_brute = conjugate_brute_numpy
    fy_violation = fy_violation_numpy
