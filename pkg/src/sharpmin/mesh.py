"""Surface-geometry export for 2D grid functions.

Emits a plain-text polygon format: one vertex per line as `v x y z`, one
triangular face per line as `f i j k` with 1-based vertex indices. Cells
touching an infinite value are skipped.
"""

import numpy as np

from .errors import InputError, PreconditionError


def triangulate_grid(grid, values=None):
    """(vertices, faces) of the surface of a 2D grid function.

    `values` overrides the grid's own values (used for tilted surfaces).
    Vertices carry their original grid flat index for cross-surface checks.
    """
    if grid.dimension != 2:
        raise InputError("mesh export requires a 2D grid")
    vals = grid.values if values is None else np.asarray(values, dtype=np.float64)
    nx, ny = grid.resolution
    xs = grid.axis_coords(0)
    ys = grid.axis_coords(1)
    vertex_id = np.full(nx * ny, -1, dtype=np.int64)
    vertices = []
    flat_indices = []
    for i in range(nx):
        for j in range(ny):
            flat = i * ny + j
            if np.isfinite(vals[flat]):
                vertex_id[flat] = len(vertices)
                vertices.append((float(xs[i]), float(ys[j]), float(vals[flat])))
                flat_indices.append(flat)
    faces = []
    for i in range(nx - 1):
        for j in range(ny - 1):
            corners = [i * ny + j, i * ny + j + 1, (i + 1) * ny + j, (i + 1) * ny + j + 1]
            ids = [vertex_id[c] for c in corners]
            if any(v < 0 for v in ids):
                continue
            a, b, c, d = ids
            faces.append((a, b, d))
            faces.append((a, d, c))
    return vertices, faces, flat_indices


def write_mesh(vertices, faces, path):
    with open(path, "w") as fh:
        fh.write("# sharpmin mesh: v x y z / f i j k (1-based)\n")
        for x, y, z in vertices:
            fh.write(f"v {x!r} {y!r} {z!r}\n")
        for a, b, c in faces:
            fh.write(f"f {a + 1} {b + 1} {c + 1}\n")


def cone_surface_values(grid, base_flat, modulus):
    """Values of the fitted cone f(base) + m * ||x - base|| on the grid nodes."""
    points = grid.node_points()
    diffs = points - points[base_flat]
    dist = np.sqrt(np.sum(diffs * diffs, axis=1))
    return grid.values[base_flat] + modulus * dist


def check_cone_below(grid, cone_values, tol=1e-9):
    """The fitted cone must not exceed the function where both are finite."""
    finite = np.isfinite(grid.values)
    excess = float(np.max(cone_values[finite] - grid.values[finite]))
    if excess > tol:
        raise PreconditionError(f"cone exceeds the surface by {excess}")
    return excess
