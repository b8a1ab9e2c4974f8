"""Finite metric spaces and continuum metric trees with exact geodesics."""

import heapq
from dataclasses import dataclass

import numpy as np

from .errors import InputError


@dataclass(frozen=True)
class MetricViolation:
    axiom: str  # "diagonal" | "symmetry" | "positivity" | "triangle"
    witness: tuple
    magnitude: float


def validate_metric_matrix(matrix, tol=0.0):
    """List every violated metric axiom in a square matrix, with witnesses.

    Total on any square matrix; an empty list means all axioms hold.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InputError(f"expected a square matrix, got shape {m.shape}")
    n = m.shape[0]
    violations = []
    for i in range(n):
        if abs(m[i, i]) > tol:
            violations.append(MetricViolation("diagonal", (i,), float(abs(m[i, i]))))
    for i in range(n):
        for j in range(i + 1, n):
            if abs(m[i, j] - m[j, i]) > tol:
                violations.append(
                    MetricViolation("symmetry", (i, j), float(abs(m[i, j] - m[j, i])))
                )
            if m[i, j] <= tol or m[j, i] <= tol:
                violations.append(
                    MetricViolation("positivity", (i, j), float(min(m[i, j], m[j, i])))
                )
    for i in range(n):
        for j in range(n):
            if j == i:
                continue
            for k in range(n):
                if k in (i, j):
                    continue
                excess = m[i, k] - (m[i, j] + m[j, k])
                if excess > tol:
                    violations.append(
                        MetricViolation("triangle", (i, j, k), float(excess))
                    )
    return violations


@dataclass(frozen=True)
class FiniteMetricSpace:
    """Opaque labels with an explicit distance matrix (validated on build)."""

    labels: tuple
    matrix: np.ndarray

    def __post_init__(self):
        labels = tuple(self.labels)
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape != (len(labels), len(labels)):
            raise InputError("matrix shape must match the label count")
        # Relative slack absorbs round-off in matrices assembled from float
        # coordinate arithmetic; genuine violations are far larger.
        slack = 1e-12 * float(np.max(m, initial=0.0))
        bad = validate_metric_matrix(m, tol=slack)
        if bad:
            v = bad[0]
            raise InputError(
                f"not a metric: {v.axiom} violated at {v.witness} "
                f"(magnitude {v.magnitude}); {len(bad)} violation(s) total"
            )
        m.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "matrix", m)

    def __len__(self):
        return len(self.labels)

    def distance(self, i, j):
        return float(self.matrix[i, j])


def validate_metric(space_or_matrix):
    """Validation report for a FiniteMetricSpace or a raw square matrix."""
    if isinstance(space_or_matrix, FiniteMetricSpace):
        return validate_metric_matrix(space_or_matrix.matrix)
    return validate_metric_matrix(space_or_matrix)


# ---------------------------------------------------------------------------
# Metric trees


@dataclass(frozen=True)
class TreeLocation:
    """A point of the continuum tree: a node, or an offset along an edge.

    Edge offsets are measured from the edge's first endpoint. Offsets 0 and
    full length are canonicalized to node locations by MetricTree, so equality
    of canonical locations is decidable.
    """

    node: int = -1
    edge: int = -1
    offset: float = 0.0

    def __post_init__(self):
        if (self.node < 0) == (self.edge < 0):
            raise InputError("location must be exactly one of node or edge+offset")

    @property
    def is_node(self):
        return self.node >= 0


def node_loc(i):
    return TreeLocation(node=int(i))


def edge_loc(e, offset):
    return TreeLocation(edge=int(e), offset=float(offset))


class MetricTree:
    """Edge-weighted tree viewed as a geodesic space (every edge a segment)."""

    def __init__(self, nodes, edges):
        self.nodes = tuple(nodes)
        n = len(self.nodes)
        self.edges = tuple((int(a), int(b), float(length)) for a, b, length in edges)
        if len(self.edges) != n - 1:
            raise InputError("a tree on n nodes needs exactly n-1 edges")
        self._adjacency = [[] for _ in range(n)]
        for e, (a, b, length) in enumerate(self.edges):
            if not (0 <= a < n and 0 <= b < n) or a == b:
                raise InputError(f"edge {e} has invalid endpoints ({a}, {b})")
            if length <= 0:
                raise InputError(f"edge {e} must have positive length")
            self._adjacency[a].append((b, e))
            self._adjacency[b].append((a, e))
        self._node_dist, self._parent = self._all_distances()
        if np.isinf(self._node_dist).any():
            raise InputError("tree is not connected")

    def _all_distances(self):
        n = len(self.nodes)
        dist = np.full((n, n), np.inf)
        parent = np.full((n, n), -1, dtype=np.int64)
        for src in range(n):
            # Dijkstra; on a tree every popped distance is final and exact.
            dist[src, src] = 0.0
            heap = [(0.0, src)]
            seen = [False] * n
            while heap:
                d, u = heapq.heappop(heap)
                if seen[u]:
                    continue
                seen[u] = True
                for v, _e in self._adjacency[u]:
                    nd = d + self.edge_length_between(u, v)
                    if nd < dist[src, v]:
                        dist[src, v] = nd
                        parent[src, v] = u
                        heapq.heappush(heap, (nd, v))
        return dist, parent

    def edge_length_between(self, u, v):
        for w, e in self._adjacency[u]:
            if w == v:
                return self.edges[e][2]
        raise InputError(f"no edge between nodes {u} and {v}")

    def edge_index_between(self, u, v):
        for w, e in self._adjacency[u]:
            if w == v:
                return e
        raise InputError(f"no edge between nodes {u} and {v}")

    def node_distance(self, a, b):
        return float(self._node_dist[a, b])

    def node_path(self, a, b):
        """Node sequence of the unique a-b path."""
        path = [b]
        while path[-1] != a:
            path.append(int(self._parent[a, path[-1]]))
        path.reverse()
        return path

    def canonicalize(self, loc):
        """Snap zero/full offsets to nodes; validate ranges."""
        if loc.is_node:
            if not 0 <= loc.node < len(self.nodes):
                raise InputError(f"node index {loc.node} out of range")
            return TreeLocation(node=loc.node)
        if not 0 <= loc.edge < len(self.edges):
            raise InputError(f"edge index {loc.edge} out of range")
        a, b, length = self.edges[loc.edge]
        if not 0.0 <= loc.offset <= length:
            raise InputError(f"offset {loc.offset} outside edge of length {length}")
        if loc.offset == 0.0:
            return TreeLocation(node=a)
        if loc.offset == length:
            return TreeLocation(node=b)
        return TreeLocation(edge=loc.edge, offset=float(loc.offset))

    def _attachments(self, loc):
        """(node, distance) pairs anchoring a location to the node skeleton."""
        if loc.is_node:
            return ((loc.node, 0.0),)
        a, b, length = self.edges[loc.edge]
        return ((a, loc.offset), (b, length - loc.offset))

    def distance(self, u, v):
        """Length of the unique path between two locations."""
        u = self.canonicalize(u)
        v = self.canonicalize(v)
        if u == v:
            return 0.0
        if not u.is_node and not v.is_node and u.edge == v.edge:
            return abs(u.offset - v.offset)
        return min(
            du + self.node_distance(a, b) + dv
            for a, du in self._attachments(u)
            for b, dv in self._attachments(v)
        )

    def geodesic(self, u, v, s):
        """The point at parameter s in [0, 1] along the unique u-v geodesic."""
        if not 0.0 <= s <= 1.0:
            raise InputError("geodesic parameter must lie in [0, 1]")
        u = self.canonicalize(u)
        v = self.canonicalize(v)
        if s == 0.0 or u == v:
            return u
        if s == 1.0:
            return v
        total = self.distance(u, v)
        target = s * total
        if not u.is_node and not v.is_node and u.edge == v.edge:
            return self.canonicalize(
                edge_loc(u.edge, u.offset + s * (v.offset - u.offset))
            )
        # Choose the skeleton entry/exit nodes realizing the path length.
        best = None
        for a, du in self._attachments(u):
            for b, dv in self._attachments(v):
                length = du + self.node_distance(a, b) + dv
                if best is None or length < best[0]:
                    best = (length, a, b, du, dv)
        _, a, b, du, dv = best
        # Segment list: (edge, start offset, end offset) walked in order.
        segments = []
        if not u.is_node and du > 0.0:
            ea, eb, elen = self.edges[u.edge]
            segments.append((u.edge, u.offset, 0.0 if a == ea else elen))
        path = self.node_path(a, b)
        for p, q in zip(path, path[1:]):
            e = self.edge_index_between(p, q)
            ea, _eb, elen = self.edges[e]
            if p == ea:
                segments.append((e, 0.0, elen))
            else:
                segments.append((e, elen, 0.0))
        if not v.is_node and dv > 0.0:
            ea, eb, elen = self.edges[v.edge]
            segments.append((v.edge, 0.0 if b == ea else elen, v.offset))
        walked = 0.0
        for e, start, end in segments:
            seg_len = abs(end - start)
            if walked + seg_len >= target:
                t = (target - walked) / seg_len
                return self.canonicalize(edge_loc(e, start + t * (end - start)))
            walked += seg_len
        return v


def tree_distance(tree, u, v):
    """Path-length distance between two tree locations."""
    return tree.distance(u, v)


def tree_geodesic(tree, u, v, s):
    """Constant-speed geodesic between two tree locations, evaluated at s."""
    return tree.geodesic(u, v, s)


@dataclass(frozen=True)
class DistanceCombination:
    """Nonnegative combination v -> sum_i c_i * d(v, a_i) of tree distances.

    Geodesically convex on any metric tree; its local slope at any point is
    at most the coefficient sum.
    """

    terms: tuple  # of (coefficient, TreeLocation)

    def __post_init__(self):
        terms = tuple((float(c), a) for c, a in self.terms)
        if not terms:
            raise InputError("need at least one term")
        for c, a in terms:
            if c < 0:
                raise InputError("coefficients must be nonnegative")
            if not isinstance(a, TreeLocation):
                raise InputError("anchors must be TreeLocations")
        object.__setattr__(self, "terms", terms)

    def __call__(self, tree, loc):
        return sum(c * tree.distance(loc, a) for c, a in self.terms)

    def coefficient_sum(self):
        return sum(c for c, _ in self.terms)
