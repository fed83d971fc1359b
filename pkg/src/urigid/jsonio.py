"""JSON schemas, parsing, and canonical serialization.

File formats use 1-based node labels; everything in memory is 0-based.
Serialization is canonical (sorted keys, shortest-round-trip floats) so that
identical inputs produce byte-identical outputs and digests are stable.
"""
from __future__ import annotations

import hashlib
import json
import os
import tempfile

import numpy as np

from .errors import SchemaError
from .framework import Configuration, Framework, Graph


def canonical_dumps(doc) -> str:
    """Human-readable canonical JSON: sorted keys, two-space indent."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _compact_dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _require(doc: dict, field: str, kind, path: str = ""):
    where = f"{path}.{field}" if path else field
    if field not in doc:
        raise SchemaError(f"missing required field: {where}")
    value = doc[field]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"{where}: expected a number, got {type(value).__name__}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError(f"{where}: expected an integer, got {type(value).__name__}")
        return value
    if not isinstance(value, kind):
        raise SchemaError(f"{where}: expected {kind.__name__}, got {type(value).__name__}")
    return value


def framework_to_dict(fw: Framework) -> dict:
    return {
        "dimension": fw.r,
        "points": [[float(x) for x in p] for p in fw.config.points],
        "edges": [[i + 1, j + 1] for i, j in fw.graph.edges],
    }


def serialize_framework(fw: Framework) -> str:
    return canonical_dumps(framework_to_dict(fw))


def framework_digest(fw: Framework) -> str:
    """Stable content hash of the framework, used to bind certificates to inputs."""
    payload = _compact_dumps(framework_to_dict(fw)).encode()
    return "sha256:" + hashlib.sha256(payload).hexdigest()


def framework_from_dict(doc) -> Framework:
    if not isinstance(doc, dict):
        raise SchemaError(f"framework document must be an object, got {type(doc).__name__}")
    r = _require(doc, "dimension", int)
    if r < 1:
        raise SchemaError(f"dimension: must be a positive integer, got {r}")
    raw_points = _require(doc, "points", list)
    if not raw_points:
        raise SchemaError("points: must be a non-empty array")
    points = []
    for idx, p in enumerate(raw_points):
        if not isinstance(p, list) or len(p) != r:
            got = len(p) if isinstance(p, list) else type(p).__name__
            raise SchemaError(f"points[{idx}]: expected {r} coordinates, got {got}")
        row = []
        for cidx, x in enumerate(p):
            if isinstance(x, bool) or not isinstance(x, (int, float)):
                raise SchemaError(f"points[{idx}][{cidx}]: expected a number")
            row.append(float(x))
        points.append(row)
    n = len(points)
    raw_edges = _require(doc, "edges", list)
    edges = []
    for idx, e in enumerate(raw_edges):
        if not isinstance(e, list) or len(e) != 2:
            raise SchemaError(f"edges[{idx}]: expected a pair [i, j]")
        i, j = e
        for label in (i, j):
            if isinstance(label, bool) or not isinstance(label, int):
                raise SchemaError(f"edges[{idx}]: node labels must be integers")
            if not 1 <= label <= n:
                raise SchemaError(f"edges[{idx}]: label {label} outside 1..{n}")
        if i == j:
            raise SchemaError(f"edges[{idx}]: loop ({i},{j}) not allowed")
        pair = (min(i, j) - 1, max(i, j) - 1)
        if pair in edges:
            raise SchemaError(f"edges[{idx}]: duplicate edge ({i},{j})")
        edges.append(pair)
    config = Configuration(np.asarray(points, dtype=float))
    graph = Graph(n, tuple(edges))
    return Framework(graph, config)


def parse_framework(text: str) -> Framework:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    return framework_from_dict(doc)


def load_framework(path: str) -> Framework:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_framework(handle.read())


def omega_to_list(fw: Framework, omega) -> list:
    """Edge weights as the wire format: [{"edge": [i, j], "value": w}, ...] with 1-based labels."""
    omega = np.asarray(omega, dtype=float)
    return [
        {"edge": [i + 1, j + 1], "value": float(omega[k])}
        for k, (i, j) in enumerate(fw.graph.edges)
    ]


def omega_from_list(fw: Framework, entries) -> np.ndarray:
    """Parse edge weights; the entries must cover exactly the framework's edge set."""
    if not isinstance(entries, list):
        raise SchemaError(f"omega: expected an array, got {type(entries).__name__}")
    values = {}
    for idx, item in enumerate(entries):
        if not isinstance(item, dict):
            raise SchemaError(f"omega[{idx}]: expected an object")
        edge = _require(item, "edge", list, path=f"omega[{idx}]")
        value = _require(item, "value", float, path=f"omega[{idx}]")
        if len(edge) != 2 or any(isinstance(v, bool) or not isinstance(v, int) for v in edge):
            raise SchemaError(f"omega[{idx}].edge: expected a pair of integer labels")
        i, j = min(edge) - 1, max(edge) - 1
        if (i, j) in values:
            raise SchemaError(f"omega[{idx}].edge: duplicate edge ({edge[0]},{edge[1]})")
        values[(i, j)] = value
    expected = set(fw.graph.edges)
    got = set(values)
    if got != expected:
        missing = sorted(expected - got)
        extra = sorted(got - expected)
        parts = []
        if missing:
            parts.append(f"missing edges {[(i + 1, j + 1) for i, j in missing][:5]}")
        if extra:
            parts.append(f"unknown edges {[(i + 1, j + 1) for i, j in extra][:5]}")
        raise SchemaError("omega: " + "; ".join(parts))
    return np.asarray([values[e] for e in fw.graph.edges], dtype=float)


def parse_stress(text: str, fw: Framework) -> np.ndarray:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("stress document must be an object")
    return omega_from_list(fw, _require(doc, "omega", list))


def write_atomic(path: str, text: str):
    """Write a file in one shot: temp file in the target directory, then rename."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
