"""JSON formats for matrices, groups and representations.

Matrix: ``{"dim": n, "entries": [[[re, im], ...], ...]}`` (row-major).
Group: ``{"dim": n, "generators": [matrix, ...]}``.
Representation: ``{"dim": n, "order": N, "table": [[...]], "images": [matrix, ...]}``.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import MatrixFileError


def matrix_to_json(M) -> dict:
    A = np.asarray(M, dtype=complex)
    return {
        "dim": int(A.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in A],
    }


def matrix_from_json(obj, source="<json>") -> np.ndarray:
    try:
        n = int(obj["dim"])
        rows = obj["entries"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFileError(source, f"missing or invalid field ({exc})") from exc
    if not isinstance(rows, list) or len(rows) != n:
        raise MatrixFileError(source, f"expected {n} rows")
    out = np.empty((n, n), dtype=complex)
    for i, row in enumerate(rows):
        if not isinstance(row, list) or len(row) != n:
            raise MatrixFileError(source, f"ragged row {i}")
        for j, z in enumerate(row):
            if isinstance(z, (int, float)):
                out[i, j] = z
            elif isinstance(z, list) and len(z) == 2:
                out[i, j] = complex(z[0], z[1])
            else:
                raise MatrixFileError(source, f"bad entry at ({i}, {j}): {z!r}")
    return out


def _load(path):
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise MatrixFileError(path, f"cannot read ({exc.strerror or exc})") from exc
    except json.JSONDecodeError as exc:
        raise MatrixFileError(path, f"invalid JSON ({exc})") from exc


def read_matrix(path) -> np.ndarray:
    return matrix_from_json(_load(path), source=str(path))


def write_matrix(path, M) -> None:
    Path(path).write_text(json.dumps(matrix_to_json(M)))


def group_to_json(generators) -> dict:
    gens = [np.asarray(g) for g in generators]
    return {"dim": int(gens[0].shape[0]), "generators": [matrix_to_json(g) for g in gens]}


def group_from_json(obj, source="<json>") -> list[np.ndarray]:
    try:
        n = int(obj["dim"])
        raw = obj["generators"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFileError(source, f"missing or invalid field ({exc})") from exc
    gens = [matrix_from_json(g, source) for g in raw]
    if not gens:
        raise MatrixFileError(source, "no generators")
    if any(g.shape[0] != n for g in gens):
        raise MatrixFileError(source, "generator dimension disagrees with 'dim'")
    return gens


def read_group(path) -> list[np.ndarray]:
    return group_from_json(_load(path), source=str(path))


def write_group(path, generators) -> None:
    Path(path).write_text(json.dumps(group_to_json(generators)))


def read_json(path):
    return _load(path)


def rep_to_json(rep) -> dict:
    return {
        "dim": int(rep.dim),
        "order": int(rep.order),
        "table": np.asarray(rep.table).tolist(),
        "generators": [int(i) for i in rep.gen_ids],
        "images": [matrix_to_json(x) for x in rep.images],
    }


def rep_from_json(obj, source="<json>"):
    from .matgroups import Representation

    try:
        table = np.asarray(obj["table"], dtype=int)
        images = tuple(matrix_from_json(x, source) for x in obj["images"])
        gen_ids = tuple(int(i) for i in obj.get("generators", range(len(images))))
    except (KeyError, TypeError, ValueError) as exc:
        raise MatrixFileError(source, f"missing or invalid field ({exc})") from exc
    if table.shape != (len(images), len(images)):
        raise MatrixFileError(source, "table shape does not match the number of images")
    return Representation(table, images, gen_ids)


def read_rep(path):
    return rep_from_json(_load(path), source=str(path))


def write_rep(path, rep) -> None:
    Path(path).write_text(json.dumps(rep_to_json(rep)))
