"""JSON readers/writers for the documented file formats.

Formats (all JSON):
  point cloud: {"dimension", "points": [[..]], "values": [num|"inf"], "base_index"}
  grid:        {"dimension", "bounds": [[lo, hi]..], "resolution": [..],
                "values": flat row-major [num|"inf"]}
  metric:      {"labels": [..], "matrix": [[..]]}
  tree:        {"nodes": [..], "edges": [[i, j, length]..]}
  functional:  {"values": [..], "base": i}  or
               {"combination": [{"coefficient": c, "anchor": loc}..], "base": loc}
               with loc = {"node": i} or {"edge": e, "offset": t}
Reports are dumped with sorted keys and fixed formatting so identical runs
produce byte-identical files.
"""

import json
import math

import numpy as np

from .errors import InputError
from .funcspace import INF, GridFunction, PointCloudFunction
from .metricspaces import (
    DistanceCombination,
    FiniteMetricSpace,
    MetricTree,
    TreeLocation,
)

SCHEMA_VERSION = 1


def _parse_value(v, context):
    if isinstance(v, str):
        if v in ("inf", "+inf", "Infinity"):
            return INF
        raise InputError(f"{context}: unrecognized value {v!r}")
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InputError(f"{context}: expected a number or \"inf\", got {v!r}")
    return float(v)


def _dump_value(x):
    return "inf" if math.isinf(x) else float(x)


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc


def _require(data, key, path):
    if key not in data:
        raise InputError(f"{path}: missing required field {key!r}")
    return data[key]


def load_cloud(path):
    data = _load_json(path)
    points = _require(data, "points", path)
    values = [_parse_value(v, path) for v in _require(data, "values", path)]
    base = _require(data, "base_index", path)
    d = int(_require(data, "dimension", path))
    arr = np.asarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[1] != d:
        raise InputError(f"{path}: points do not match dimension {d}")
    return PointCloudFunction(arr, np.asarray(values), int(base))


def dump_cloud(cloud, path):
    data = {
        "dimension": cloud.dimension,
        "points": [[float(c) for c in p] for p in cloud.points],
        "values": [_dump_value(v) for v in cloud.values],
        "base_index": cloud.base_index,
    }
    write_report(data, path)


def load_grid(path):
    data = _load_json(path)
    d = int(_require(data, "dimension", path))
    bounds = _require(data, "bounds", path)
    resolution = _require(data, "resolution", path)
    values = [_parse_value(v, path) for v in _require(data, "values", path)]
    if len(bounds) != d or len(resolution) != d:
        raise InputError(f"{path}: bounds/resolution do not match dimension {d}")
    return GridFunction(
        tuple((float(lo), float(hi)) for lo, hi in bounds),
        tuple(int(n) for n in resolution),
        np.asarray(values),
    )


def dump_grid(grid, path):
    data = {
        "dimension": grid.dimension,
        "bounds": [[lo, hi] for lo, hi in grid.bounds],
        "resolution": list(grid.resolution),
        "values": [_dump_value(v) for v in grid.values],
    }
    write_report(data, path)


def load_metric(path):
    data = _load_json(path)
    labels = _require(data, "labels", path)
    matrix = np.asarray(_require(data, "matrix", path), dtype=np.float64)
    return FiniteMetricSpace(tuple(labels), matrix)


def load_tree(path):
    data = _load_json(path)
    nodes = _require(data, "nodes", path)
    edges = _require(data, "edges", path)
    parsed = []
    for e in edges:
        if len(e) != 3:
            raise InputError(f"{path}: edges must be [i, j, length] triples")
        parsed.append((int(e[0]), int(e[1]), float(e[2])))
    return MetricTree(tuple(nodes), parsed)


def parse_location(data, context):
    if "node" in data:
        return TreeLocation(node=int(data["node"]))
    if "edge" in data:
        return TreeLocation(edge=int(data["edge"]), offset=float(data.get("offset", 0.0)))
    raise InputError(f"{context}: location needs a 'node' or 'edge' field")


def location_to_dict(loc):
    if loc.is_node:
        return {"node": loc.node}
    return {"edge": loc.edge, "offset": loc.offset}


def load_functional(path):
    """Returns ("values", values, base_index) or ("combination", comb, base_loc)."""
    data = _load_json(path)
    if "values" in data:
        values = np.asarray([_parse_value(v, path) for v in data["values"]])
        return "values", values, int(_require(data, "base", path))
    if "combination" in data:
        terms = tuple(
            (
                float(_require(t, "coefficient", path)),
                parse_location(_require(t, "anchor", path), path),
            )
            for t in data["combination"]
        )
        base = parse_location(_require(data, "base", path), path)
        return "combination", DistanceCombination(terms), base
    raise InputError(f"{path}: functional needs a 'values' or 'combination' field")


def _sanitize(obj):
    """Make reports JSON-safe and deterministic (inf -> 'inf', numpy -> native)."""
    if isinstance(obj, dict):
        return {str(k): _sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_sanitize(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return None
        return x
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_sanitize(v) for v in obj.tolist()]
    return obj


def write_report(data, path):
    """Byte-deterministic JSON dump (sorted keys, fixed indentation)."""
    payload = _sanitize(data)
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")
