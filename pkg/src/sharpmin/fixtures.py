"""Reusable fixtures: the cycle counterexample and seeded random generators."""

import numpy as np

from .funcspace import PointCloudFunction
from .metricspaces import FiniteMetricSpace, MetricTree


def unit_cycle_space(points_per_edge=2):
    """The unit 4-cycle's metric graph sampled at evenly spaced points.

    Arc-length metric on a circle of circumference 4; includes edge midpoints
    so approximate geodesic queries land on actual sample points. Not CAT(0):
    antipodal configurations violate the comparison inequality.
    """
    n = 4 * points_per_edge
    positions = np.arange(n) * (4.0 / n)
    gaps = np.abs(positions[:, None] - positions[None, :])
    matrix = np.minimum(gaps, 4.0 - gaps)
    labels = tuple(f"p{t:g}" for t in positions)
    return FiniteMetricSpace(labels, matrix), positions


def random_tree(rng, n_nodes, min_len=0.2, max_len=2.0):
    """Uniform random tree shape with uniform random edge lengths."""
    edges = []
    for i in range(1, n_nodes):
        parent = int(rng.integers(i))
        edges.append((parent, i, float(rng.uniform(min_len, max_len))))
    return MetricTree(tuple(f"n{i}" for i in range(n_nodes)), edges)


def random_metric_space(rng, n):
    """Random finite metric via the shortest-path closure of random weights."""
    w = rng.uniform(0.5, 2.0, size=(n, n))
    w = (w + w.T) / 2.0
    np.fill_diagonal(w, 0.0)
    # Floyd-Warshall closure restores the triangle inequality.
    for k in range(n):
        w = np.minimum(w, w[:, k][:, None] + w[k, :][None, :])
    return FiniteMetricSpace(tuple(f"x{i}" for i in range(n)), w)


def random_cloud(rng, d, n, value_range=(0.0, 10.0)):
    """Random point cloud with the base placed at the argmin of the values."""
    points = rng.uniform(0.0, 1.0, size=(n, d))
    values = rng.uniform(*value_range, size=n)
    base = int(np.argmin(values))
    return PointCloudFunction(points, values, base)
