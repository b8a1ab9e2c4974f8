"""Independent brute-force oracles used to freeze expected values.

Plain-Python loops on purpose: these must not share code with the library
paths they check.
"""

import math


def norm(p, q):
    return math.sqrt(sum((a - b) ** 2 for a, b in zip(p, q)))


def brute_modulus(points, values, base):
    """Min growth ratio over finite non-base points, with witness."""
    best, witness = math.inf, -1
    for i, (p, v) in enumerate(zip(points, values)):
        if i == base or not math.isfinite(v):
            continue
        ratio = (v - values[base]) / norm(p, points[base])
        if ratio < best:
            best, witness = ratio, i
    return best, witness


def brute_global_slope(points, values, i):
    best = 0.0
    for j, (p, v) in enumerate(zip(points, values)):
        if j == i:
            continue
        gain = values[i] - v
        if math.isfinite(v) and gain > 0:
            best = max(best, gain / norm(points[i], p))
    return best


def brute_argmin(scores):
    finite = [s for s in scores if math.isfinite(s)]
    best = min(finite)
    return [i for i, s in enumerate(scores) if s == best]


def brute_conjugate_1d(xs, vals, sigma):
    return max(
        sigma * x - v for x, v in zip(xs, vals) if math.isfinite(v)
    )
