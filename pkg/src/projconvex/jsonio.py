"""JSON encodings for domains, transforms, sequences, meshes, and reports.

All numbers are 64-bit floats in row-major nested arrays; dimensions are
inferred from shapes.  Loaders reject NaN and infinities.
"""

import csv
import json

import numpy as np

from .domain import ConvexDomain
from .errors import InputFormatError, InvalidInputError
from .normalize import RepSequence
from .plconvex import SimplicialHypersurface
from .projgeom import AffineChart, ProjTransform


def _reject_constant(name):
    raise InputFormatError(f"non-finite constant {name!r} in input")


def loads(text: str):
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputFormatError(f"invalid JSON: {exc}") from exc
    _check_finite(data)
    return data


def load_file(path):
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


def _check_finite(obj):
    if isinstance(obj, dict):
        for v in obj.values():
            _check_finite(v)
    elif isinstance(obj, list):
        for v in obj:
            _check_finite(v)
    elif isinstance(obj, float) and not np.isfinite(obj):
        raise InputFormatError("non-finite number in input")


def sanitize(obj):
    """Make an object JSON-serializable with deterministic ordering."""
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [sanitize(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return sanitize(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if not np.isfinite(f):
            return repr(f)
        return f
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(sanitize(obj), sort_keys=True, indent=2,
                      allow_nan=False) + "\n"


def dump_file(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))


def write_csv(rows, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        for row in rows:
            writer.writerow(row)


# ---------------------------------------------------------------------------
# specific codecs


def domain_from_dict(data) -> ConvexDomain:
    try:
        chart = AffineChart(np.asarray(data["chart"], dtype=float))
        backend = data["backend"]
        kind = backend["type"]
    except (KeyError, TypeError) as exc:
        raise InputFormatError(f"malformed domain object: {exc}") from exc
    if kind == "hpoly":
        return ConvexDomain.from_halfspaces(backend["normals"],
                                            backend["offsets"], chart=chart)
    if kind == "vpoly":
        return ConvexDomain.from_vertices(backend["vertices"], chart=chart)
    if kind == "ellipsoid":
        return ConvexDomain.ellipsoid(backend["center"], backend["shape"],
                                      chart=chart)
    if kind == "radialgraph":
        return ConvexDomain.radial_graph(backend["center"],
                                         backend["directions"],
                                         backend["radii"],
                                         backend.get("simplices"),
                                         chart=chart)
    raise InvalidInputError(f"unknown backend type {kind!r}")


def load_domain(path) -> ConvexDomain:
    return domain_from_dict(load_file(path))


def matrix_from_dict(data) -> ProjTransform:
    if isinstance(data, dict):
        data = data.get("matrix", data)
    return ProjTransform(np.asarray(data, dtype=float))


def load_matrix(path) -> ProjTransform:
    return matrix_from_dict(load_file(path))


def sequence_from_dict(data) -> RepSequence:
    try:
        gens = list(data["generators"])
        terms = [[np.asarray(m, dtype=float) for m in tup]
                 for tup in data["terms"]]
    except (KeyError, TypeError) as exc:
        raise InputFormatError(f"malformed sequence object: {exc}") from exc
    domains = None
    if data.get("domains") is not None:
        domains = [domain_from_dict(d) for d in data["domains"]]
    return RepSequence(generators=gens, terms=terms, domains=domains)


def load_sequence(path) -> RepSequence:
    return sequence_from_dict(load_file(path))


def sequence_to_dict(seq: RepSequence):
    out = {"generators": list(seq.generators),
           "terms": [[m.tolist() for m in tup] for tup in seq.terms]}
    if seq.domains is not None:
        out["domains"] = [d.to_json() for d in seq.domains]
    return out


def mesh_from_dict(data) -> SimplicialHypersurface:
    try:
        return SimplicialHypersurface(data["vertices"], data["simplices"])
    except (KeyError, TypeError) as exc:
        raise InputFormatError(f"malformed mesh object: {exc}") from exc


def load_mesh(path) -> SimplicialHypersurface:
    return mesh_from_dict(load_file(path))
