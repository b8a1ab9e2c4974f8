"""Finite function representations: point clouds, box grids, cones, fixtures.

Extended-real values use float +inf as the "not in the domain" sentinel.
All containers are immutable after construction and validated on build.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError

INF = float("inf")


def _as_points(points, d):
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != d:
        raise InputError(f"expected points of dimension {d}, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class PointCloudFunction:
    """A function known on finitely many points of R^d, with a base point."""

    points: np.ndarray
    values: np.ndarray
    base_index: int
    dimension: int = field(init=False)

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim == 1:
            pts = pts[:, None]
        vals = np.asarray(self.values, dtype=np.float64)
        if pts.ndim != 2:
            raise InputError("points must be a 2-d array")
        n, d = pts.shape
        if d not in (1, 2, 3):
            raise InputError(f"dimension must be 1, 2 or 3, got {d}")
        if n < 2:
            raise InputError("need at least 2 points")
        if vals.shape != (n,):
            raise InputError("points and values must have equal length")
        if np.isnan(vals).any() or np.isneginf(vals).any():
            raise InputError("values must be real or +inf")
        if not 0 <= self.base_index < n:
            raise InputError("base_index out of range")
        if not np.isfinite(vals[self.base_index]):
            raise InputError("value at base_index must be finite")
        diffs = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt(np.sum(diffs * diffs, axis=2))
        np.fill_diagonal(dist, np.inf)
        if np.min(dist) <= 0.0:
            i, j = np.unravel_index(np.argmin(dist), dist.shape)
            raise InputError(f"points {i} and {j} coincide")
        pts.setflags(write=False)
        vals.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "dimension", d)

    def __len__(self):
        return len(self.values)

    @property
    def base_point(self):
        return self.points[self.base_index]

    def distances_to_base(self):
        diffs = self.points - self.base_point
        return np.sqrt(np.sum(diffs * diffs, axis=1))


@dataclass(frozen=True)
class GridFunction:
    """Values on a box-aligned regular grid, row-major over the axes."""

    bounds: tuple
    resolution: tuple
    values: np.ndarray

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        resolution = tuple(int(n) for n in self.resolution)
        d = len(bounds)
        if d not in (1, 2, 3):
            raise InputError(f"dimension must be 1, 2 or 3, got {d}")
        if len(resolution) != d:
            raise InputError("bounds and resolution disagree on dimension")
        for (lo, hi), n in zip(bounds, resolution):
            if not lo < hi:
                raise InputError(f"bounds must satisfy lower < upper, got [{lo}, {hi}]")
            if n < 2:
                raise InputError("resolution must be at least 2 per axis")
        vals = np.asarray(self.values, dtype=np.float64).ravel()
        if len(vals) != int(np.prod(resolution)):
            raise InputError("value table length must equal product of resolutions")
        if np.isnan(vals).any() or np.isneginf(vals).any():
            raise InputError("values must be real or +inf")
        if not np.isfinite(vals).any():
            raise InputError("grid must contain at least one finite value")
        vals.setflags(write=False)
        object.__setattr__(self, "bounds", bounds)
        object.__setattr__(self, "resolution", resolution)
        object.__setattr__(self, "values", vals)

    @property
    def dimension(self):
        return len(self.bounds)

    def axis_coords(self, axis):
        lo, hi = self.bounds[axis]
        return np.linspace(lo, hi, self.resolution[axis])

    def spacings(self):
        return tuple(
            (hi - lo) / (n - 1) for (lo, hi), n in zip(self.bounds, self.resolution)
        )

    def node_points(self):
        """All grid nodes as an (N, d) array in row-major order."""
        axes = [self.axis_coords(k) for k in range(self.dimension)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def as_array(self):
        return self.values.reshape(self.resolution)

    def argmin_node(self):
        """Flat index of the smallest value (first occurrence)."""
        return int(np.argmin(self.values))

    def to_cloud(self, base_index=None):
        """View the grid as a point cloud, defaulting the base to the argmin."""
        if base_index is None:
            base_index = self.argmin_node()
        return PointCloudFunction(self.node_points(), self.values, base_index)


@dataclass(frozen=True)
class ConeParams:
    """Parameters of a leaned cone over R^2: opening, lean angle, vertex, lean
    direction."""

    alpha: float
    beta: float
    vertex: tuple
    direction: tuple

    def __post_init__(self):
        if not 0.0 < self.alpha < math.pi:
            raise InputError("alpha must lie in (0, pi)")
        if not 0.0 < self.beta < math.pi / 2:
            raise InputError("beta must lie in (0, pi/2)")
        vertex = (float(self.vertex[0]), float(self.vertex[1]))
        direction = (float(self.direction[0]), float(self.direction[1]))
        if abs(math.hypot(*direction) - 1.0) > 1e-12:
            raise InputError("direction must be a unit vector")
        object.__setattr__(self, "vertex", vertex)
        object.__setattr__(self, "direction", direction)


def eval_cone(cone, x):
    """Height of the leaned cone at a point of R^2."""
    dx = float(x[0]) - cone.vertex[0]
    dy = float(x[1]) - cone.vertex[1]
    cot_half = 1.0 / math.tan(cone.alpha / 2.0)
    radial = cot_half * math.hypot(dx, dy)
    lean = (math.tan(cone.beta) - cot_half) * (
        cone.direction[0] * dx + cone.direction[1] * dy
    )
    return radial + lean


def make_norm_cone(center, gamma):
    """The cone x -> gamma * ||x - center||."""
    if gamma <= 0:
        raise InputError("gamma must be positive")
    center = np.asarray(center, dtype=np.float64).ravel()

    def cone(x):
        diff = np.asarray(x, dtype=np.float64).ravel() - center
        return gamma * float(np.sqrt(np.sum(diff * diff)))

    return cone


def make_tent(center, d):
    """The non-lsc tent x -> 1 - |1 - ||x - center|||, +inf at radius >= 2.

    Its minimum at the center is sharp on every finite sample, but the modulus
    degenerates to 0 as the sampling refines toward the open boundary.
    """
    if d not in (1, 2, 3):
        raise InputError("dimension must be 1, 2 or 3")
    center = np.asarray(center, dtype=np.float64).ravel()
    if len(center) != d:
        raise InputError("center has wrong dimension")

    def tent(x):
        diff = np.asarray(x, dtype=np.float64).ravel() - center
        r = float(np.sqrt(np.sum(diff * diff)))
        if r >= 2.0:
            return INF
        return 1.0 - abs(1.0 - r)

    return tent


def sample_to_cloud(handle, bounds, resolution, base_point):
    """Sample a closed-form function on a box grid into a PointCloudFunction.

    The grid node nearest to the base point is snapped onto it exactly, so the
    cloud's base index is well defined regardless of floating containment.
    """
    grid_nodes = GridFunction(bounds, resolution, np.zeros(int(np.prod(resolution))))
    points = grid_nodes.node_points()
    base = np.asarray(base_point, dtype=np.float64).ravel()
    if len(base) != points.shape[1]:
        raise InputError("base point has wrong dimension")
    diffs = points - base
    nearest = int(np.argmin(np.sum(diffs * diffs, axis=1)))
    points = points.copy()
    points[nearest] = base
    # Snapping may create a duplicate of an adjacent node; drop it.
    keep = np.ones(len(points), dtype=bool)
    for i in range(len(points)):
        if i != nearest and np.array_equal(points[i], base):
            keep[i] = False
    points = points[keep]
    nearest -= int(np.sum(~keep[:nearest]))
    values = np.array([handle(p) for p in points], dtype=np.float64)
    if not np.isfinite(values).any():
        raise InputError("sampled function has no finite values")
    return PointCloudFunction(points, values, nearest)


def sample_to_grid(handle, bounds, resolution):
    """Sample a closed-form function into a GridFunction."""
    template = GridFunction(bounds, resolution, np.zeros(int(np.prod(resolution))))
    values = np.array([handle(p) for p in template.node_points()], dtype=np.float64)
    return GridFunction(bounds, resolution, values)
