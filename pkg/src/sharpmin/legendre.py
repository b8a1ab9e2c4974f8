"""Discrete Legendre-Fenchel transforms on box grids.

The conjugate is computed by a per-axis factorization of the sup (the dot
product separates over box grids), each axis pass using the linear-time
lower-convex-hull merge. A brute-force double loop is retained as an
independent oracle for small grids, and a direct 1D convex-envelope routine
serves as the oracle for the biconjugate.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels, sharpness
from .errors import DualRangeError, InputError, PreconditionError
from .funcspace import GridFunction


@dataclass(frozen=True)
class DualGrid:
    """Symmetric box [-L_i, L_i] per axis for the dual variable."""

    ranges: tuple
    resolution: tuple

    def __post_init__(self):
        ranges = tuple(float(L) for L in self.ranges)
        resolution = tuple(int(n) for n in self.resolution)
        if len(ranges) != len(resolution):
            raise InputError("ranges and resolution disagree on dimension")
        for L in ranges:
            if L <= 0:
                raise InputError("dual half-ranges must be positive")
        for n in resolution:
            if n < 2:
                raise InputError("dual resolution must be at least 2 per axis")
        object.__setattr__(self, "ranges", ranges)
        object.__setattr__(self, "resolution", resolution)

    @property
    def dimension(self):
        return len(self.ranges)

    def bounds(self):
        return tuple((-L, L) for L in self.ranges)

    def axis_coords(self, axis):
        return np.linspace(-self.ranges[axis], self.ranges[axis], self.resolution[axis])

    def to_grid_template(self):
        return GridFunction(
            self.bounds(), self.resolution, np.zeros(int(np.prod(self.resolution)))
        )


def slope_bounds(f):
    """Largest finite adjacent difference quotient of f along each axis."""
    arr = f.as_array()
    out = []
    for axis in range(f.dimension):
        h = f.spacings()[axis]
        a = np.moveaxis(arr, axis, 0)
        with np.errstate(invalid="ignore"):
            quot = np.abs(a[1:] - a[:-1]) / h
        finite = quot[np.isfinite(quot)]
        out.append(float(np.max(finite)) if len(finite) else 0.0)
    return tuple(out)


def _check_dual_range(f, dual):
    if dual.dimension != f.dimension:
        raise InputError("dual grid dimension must match the primal grid")
    for axis, (L, bound) in enumerate(zip(dual.ranges, slope_bounds(f))):
        if L < bound:
            raise DualRangeError(axis, L, bound)


def _lower_hull(xs, vals):
    """Indices of the lower convex hull vertices of (xs, vals), xs ascending."""
    hull = []
    for i in range(len(xs)):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            # Pop i1 when it lies on or above the chord i0 -> i.
            lhs = (vals[i1] - vals[i0]) * (xs[i] - xs[i0])
            rhs = (vals[i] - vals[i0]) * (xs[i1] - xs[i0])
            if lhs >= rhs:
                hull.pop()
            else:
                break
        hull.append(i)
    return hull


def _conjugate_1d(xs, vals, sigmas):
    """max_x sigma*x - vals(x) for each sigma, via the hull-merge algorithm.

    Entries of vals may be +inf (excluded) or -inf (empty inner sup from an
    earlier axis pass; excluded). Returns -inf everywhere when nothing is
    finite.
    """
    finite = np.isfinite(vals)
    if not finite.any():
        return np.full(len(sigmas), -np.inf)
    fx = xs[finite]
    fv = vals[finite]
    hull = _lower_hull(fx, fv)
    hx = fx[hull]
    hv = fv[hull]
    out = np.empty(len(sigmas))
    j = 0
    k = len(hull)
    for q, sigma in enumerate(sigmas):
        while j + 1 < k and hv[j + 1] - hv[j] <= sigma * (hx[j + 1] - hx[j]):
            j += 1
        out[q] = sigma * hx[j] - hv[j]
    return out


def _axis_pass(arr, xs, sigmas, axis):
    """Apply the 1D conjugate along one axis of a d-dimensional array."""
    moved = np.moveaxis(arr, axis, 0)
    flat = moved.reshape(len(xs), -1)
    out = np.empty((len(sigmas), flat.shape[1]))
    for col in range(flat.shape[1]):
        out[:, col] = _conjugate_1d(xs, flat[:, col], sigmas)
    new_shape = (len(sigmas),) + moved.shape[1:]
    return np.moveaxis(out.reshape(new_shape), 0, axis)


def _conjugate_values(axes_in, values_nd, axes_out):
    """Factorized sup over a box grid: successive 1D conjugations per axis."""
    arr = values_nd
    for axis in range(len(axes_in)):
        if axis > 0:
            arr = -arr
        arr = _axis_pass(arr, axes_in[axis], axes_out[axis], axis)
    return arr


def conjugate(f, dual):
    """Legendre-Fenchel conjugate of a grid function on a dual grid."""
    _check_dual_range(f, dual)
    axes_in = [f.axis_coords(k) for k in range(f.dimension)]
    axes_out = [dual.axis_coords(k) for k in range(dual.dimension)]
    values = _conjugate_values(axes_in, f.as_array(), axes_out)
    if not np.isfinite(values).all():
        raise InputError("conjugate has non-finite values; dual grid misconfigured")
    return GridFunction(dual.bounds(), dual.resolution, values.ravel())


def conjugate_brute(f, dual):
    """Brute-force conjugate oracle (double loop over all node pairs)."""
    _check_dual_range(f, dual)
    primal = f.node_points()
    dual_nodes = dual.to_grid_template().node_points()
    values = kernels.conjugate_brute(primal, f.values, dual_nodes)
    return GridFunction(dual.bounds(), dual.resolution, values)


def biconjugate(f, dual):
    """Double conjugate, mapped back onto the primal grid."""
    fstar = conjugate(f, dual)
    axes_in = [fstar.axis_coords(k) for k in range(fstar.dimension)]
    axes_out = [f.axis_coords(k) for k in range(f.dimension)]
    values = _conjugate_values(axes_in, fstar.as_array(), axes_out)
    if not np.isfinite(values).all():
        raise InputError("biconjugate has non-finite values; dual grid misconfigured")
    return GridFunction(f.bounds, f.resolution, values.ravel())


def fenchel_young_violation(f, fstar):
    """Largest violation of f(x) + f*(xi) >= <xi, x> over all node pairs."""
    primal = f.node_points()
    dual_nodes = fstar.node_points()
    return kernels.fy_violation(primal, f.values, dual_nodes, fstar.values)


@dataclass(frozen=True)
class TransformResult:
    conjugate: GridFunction
    biconjugate: GridFunction
    fy_violation: float


def transform(f, dual, tol=1e-9):
    """Conjugate + biconjugate with the standard sanity checks applied."""
    fstar = conjugate(f, dual)
    fstst = biconjugate(f, dual)
    viol = fenchel_young_violation(f, fstar)
    if viol > tol:
        raise InputError(f"Fenchel-Young violated by {viol}")
    finite = np.isfinite(f.values)
    if np.max(fstst.values[finite] - f.values[finite]) > tol:
        raise InputError("biconjugate exceeds the original function")
    return TransformResult(fstar, fstst, viol)


def convex_envelope_1d(f):
    """Lower convex hull of the finite graph points, sampled on the grid.

    Independent oracle for the 1D biconjugate. Nodes outside the convex hull
    of the finite domain stay +inf.
    """
    if f.dimension != 1:
        raise InputError("convex_envelope_1d requires a 1D grid")
    xs = f.axis_coords(0)
    finite = np.isfinite(f.values)
    if np.sum(finite) < 2:
        raise InputError("need at least 2 finite values")
    fx = xs[finite]
    fv = f.values[finite]
    hull = _lower_hull(fx, fv)
    hx = fx[hull]
    hv = fv[hull]
    out = np.full(len(xs), np.inf)
    inside = (xs >= hx[0]) & (xs <= hx[-1])
    out[inside] = np.interp(xs[inside], hx, hv)
    return GridFunction(f.bounds, f.resolution, out)


def verify_biconjugate_sharpness(f, base_node, dual, tol=None):
    """Check that biconjugation preserves sharp minimality at the argmin.

    Computes the growth modulus of f and of f** at the base node via the
    sharpness module and compares them within a grid-spacing tolerance; also
    checks value preservation and minimality of the base for f**.
    """
    if f.values[base_node] > np.min(f.values):
        raise PreconditionError("base node must be an argmin of f on the grid")
    if tol is None:
        tol = 5.0 * max(f.spacings())
    fstst = biconjugate(f, dual)
    m_f, _ = sharpness.sharpness_modulus(f.to_cloud(base_node))
    m_fstst, _ = sharpness.sharpness_modulus(fstst.to_cloud(base_node))
    value_gap = abs(fstst.values[base_node] - f.values[base_node])
    base_min_fstst = fstst.values[base_node] <= np.min(fstst.values) + 1e-9
    return {
        "modulus_f": float(m_f),
        "modulus_biconjugate": float(m_fstst),
        "modulus_gap": float(abs(m_f - m_fstst)),
        "tolerance": float(tol),
        "moduli_agree": bool(abs(m_f - m_fstst) <= tol),
        "value_preserved": bool(value_gap <= 1e-9),
        "base_minimizes_biconjugate": bool(base_min_fstst),
    }
