"""Atomic file output: JSON, CSV and Wavefront OBJ meshes.

Every writer goes through :func:`atomic_write`, which writes a temporary
file in the destination directory and renames it into place, so readers
never observe a half-written artifact.
"""

from __future__ import annotations

import contextlib
import csv
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np


@contextlib.contextmanager
def atomic_write(path, mode: str = "w"):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, mode, newline="" if "b" not in mode else None) as fh:
            yield fh
        # mkstemp creates 0600 files; published outputs should be world-readable
        os.chmod(tmp, 0o644)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        # JSON has no NaN/inf; encode them as strings so files stay standard
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps_json(obj) -> str:
    return json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n"


def write_json(path, obj) -> None:
    with atomic_write(path) as fh:
        fh.write(dumps_json(obj))


def write_csv(path, header, rows) -> None:
    with atomic_write(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([format_cell(x) for x in row])


def format_cell(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_obj(path, vertices: np.ndarray, wrap_theta: bool = True, comment: str = "") -> None:
    """Triangulated mesh of an ``(n_s, n_theta, >=3)`` vertex array.

    Only the first three ambient coordinates are written.  With
    ``wrap_theta`` the last theta column is joined to the first.
    """
    v = np.asarray(vertices, dtype=float)
    n_s, n_t = v.shape[:2]
    xyz = np.zeros((n_s, n_t, 3))
    k = min(3, v.shape[2])
    xyz[..., :k] = v[..., :k]
    cols = n_t if wrap_theta else n_t - 1
    with atomic_write(path) as fh:
        if comment:
            fh.write(f"# {comment}\n")
        for p in xyz.reshape(-1, 3):
            fh.write(f"v {p[0]:.17g} {p[1]:.17g} {p[2]:.17g}\n")
        for i in range(n_s - 1):
            for j in range(cols):
                jn = (j + 1) % n_t
                a = i * n_t + j + 1
                b = i * n_t + jn + 1
                c = (i + 1) * n_t + jn + 1
                d = (i + 1) * n_t + j + 1
                fh.write(f"f {a} {b} {c}\nf {a} {c} {d}\n")
