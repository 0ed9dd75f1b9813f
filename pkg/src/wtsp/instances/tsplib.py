"""TSPLIB-style files extended with a node weight section.

Instance files::

    NAME : rue-C2-d5-n100-p1-w2
    TYPE : WTSP
    DIMENSION : 100
    EDGE_WEIGHT_TYPE : EUC_2D_REAL
    NODE_COORD_SECTION
    1 512 77
    ...
    NODE_WEIGHT_SECTION
    1 1
    2 4
    ...
    EOF

Explicit instances use ``EDGE_WEIGHT_TYPE : EXPLICIT`` with a
``FULL_MATRIX`` ``EDGE_WEIGHT_SECTION``.  Indices in files are 1-based.
"""

from __future__ import annotations

import warnings
from pathlib import Path
from typing import Sequence

import numpy as np

from ..core import Instance, Tour, ValidationError

WEIGHTS_MISSING = "weights_missing"
START_WEIGHT_NOT_ONE = "start_weight_not_one"


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None, path=None):
        self.line = line
        where = f"{path}:{line}: " if line is not None else ""
        super().__init__(where + message)


class InstanceWarning(UserWarning):
    pass


def format_number(x: float) -> str:
    """Shortest text that reads back to the same double."""
    x = float(x)
    if x.is_integer() and abs(x) < 2**53:
        return str(int(x))
    return repr(x)


def dumps_instance(instance: Instance, comment: str = "") -> str:
    lines = [f"NAME : {instance.name or 'unnamed'}"]
    if comment:
        lines.append(f"COMMENT : {comment}")
    lines += ["TYPE : WTSP", f"DIMENSION : {instance.n}"]
    if instance.start != 0:
        lines.append(f"START : {instance.start + 1}")
    if instance.coords is not None:
        kind = "EUC_2D_REAL" if instance.rounding == "none" else "EUC_2D"
        lines.append(f"EDGE_WEIGHT_TYPE : {kind}")
        lines.append("NODE_COORD_SECTION")
        for i, (x, y) in enumerate(instance.coords, 1):
            lines.append(f"{i} {format_number(x)} {format_number(y)}")
    else:
        lines += ["EDGE_WEIGHT_TYPE : EXPLICIT", "EDGE_WEIGHT_FORMAT : FULL_MATRIX"]
        if not instance.metric:
            lines.append("METRIC : NO")
        lines.append("EDGE_WEIGHT_SECTION")
        for row in instance.matrix:
            lines.append(" ".join(format_number(v) for v in row))
    lines.append("NODE_WEIGHT_SECTION")
    for i, w in enumerate(instance.weights, 1):
        lines.append(f"{i} {format_number(w)}")
    lines.append("EOF")
    return "\n".join(lines) + "\n"


def write_instance(instance: Instance, path, comment: str = "") -> None:
    Path(path).write_text(dumps_instance(instance, comment))


def _numbers(tokens: list[str], lineno: int, path) -> list[float]:
    try:
        return [float(t) for t in tokens]
    except ValueError:
        raise ParseError(f"expected numbers, got {' '.join(tokens)!r}", lineno, path) from None


def loads_instance(text: str, path=None, euc2d_rounding: str = "none") -> Instance:
    """Parse an instance; classical TSPLIB ``EUC_2D`` files read as unit-weight instances.

    ``euc2d_rounding="nint"`` applies the TSPLIB nearest-integer distance
    convention to ``EUC_2D`` files (off by default).
    """
    header: dict[str, str] = {}
    coords: dict[int, tuple[float, float]] = {}
    weights: dict[int, float] = {}
    matrix_vals: list[float] = []
    section = None
    lines = text.splitlines()
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        if line.endswith("_SECTION"):
            section = line
            if section not in ("NODE_COORD_SECTION", "NODE_WEIGHT_SECTION", "EDGE_WEIGHT_SECTION"):
                raise ParseError(f"unsupported section {section}", lineno, path)
            continue
        if section is None or (":" in line and line.split(":")[0].strip().isupper()):
            if ":" not in line:
                raise ParseError(f"expected 'KEY : value', got {line!r}", lineno, path)
            key, value = line.split(":", 1)
            header[key.strip()] = value.strip()
            section = None
            continue
        tokens = line.split()
        if section == "EDGE_WEIGHT_SECTION":
            matrix_vals.extend(_numbers(tokens, lineno, path))
            continue
        if section == "NODE_COORD_SECTION" and len(tokens) != 3:
            raise ParseError("coordinate lines need 'index x y'", lineno, path)
        if section == "NODE_WEIGHT_SECTION" and len(tokens) != 2:
            raise ParseError("weight lines need 'index weight'", lineno, path)
        vals = _numbers(tokens, lineno, path)
        idx = int(vals[0])
        if idx != vals[0] or idx < 1:
            raise ParseError(f"bad node index {tokens[0]!r}", lineno, path)
        target = coords if section == "NODE_COORD_SECTION" else weights
        if idx in target:
            raise ParseError(f"duplicate node index {idx}", lineno, path)
        target[idx] = (vals[1], vals[2]) if section == "NODE_COORD_SECTION" else vals[1]

    if "DIMENSION" not in header:
        raise ParseError("missing DIMENSION", None, path)
    try:
        n = int(header["DIMENSION"])
    except ValueError:
        raise ParseError(f"bad DIMENSION {header['DIMENSION']!r}", None, path) from None
    kind = header.get("EDGE_WEIGHT_TYPE", "EUC_2D_REAL")
    notes = []
    if weights:
        if sorted(weights) != list(range(1, n + 1)):
            raise ParseError(f"NODE_WEIGHT_SECTION must list nodes 1..{n}", None, path)
        w = np.array([weights[i] for i in range(1, n + 1)])
    else:
        notes.append(WEIGHTS_MISSING)
        warnings.warn(f"{path or 'instance'}: no NODE_WEIGHT_SECTION, using unit weights",
                      InstanceWarning, stacklevel=2)
        w = np.ones(n)
    start = int(header.get("START", 1)) - 1
    if 0 <= start < n and w[start] != 1.0:
        notes.append(START_WEIGHT_NOT_ONE)
    common = dict(start=start, name=header.get("NAME", ""), notes=tuple(notes))
    if kind in ("EUC_2D", "EUC_2D_REAL"):
        if sorted(coords) != list(range(1, n + 1)):
            raise ParseError(f"NODE_COORD_SECTION must list nodes 1..{n}", None, path)
        xy = np.array([coords[i] for i in range(1, n + 1)])
        rounding = euc2d_rounding if kind == "EUC_2D" else "none"
        return Instance(w, coords=xy, rounding=rounding, **common)
    if kind == "EXPLICIT":
        fmt = header.get("EDGE_WEIGHT_FORMAT", "FULL_MATRIX")
        if fmt != "FULL_MATRIX":
            raise ParseError(f"unsupported EDGE_WEIGHT_FORMAT {fmt}", None, path)
        if len(matrix_vals) != n * n:
            raise ParseError(f"EDGE_WEIGHT_SECTION has {len(matrix_vals)} values, expected {n * n}",
                             None, path)
        metric = header.get("METRIC", "YES").upper() != "NO"
        return Instance(w, matrix=np.array(matrix_vals).reshape(n, n), metric=metric, **common)
    raise ParseError(f"unsupported EDGE_WEIGHT_TYPE {kind}", None, path)


def read_instance(path, euc2d_rounding: str = "none") -> Instance:
    return loads_instance(Path(path).read_text(), path=path, euc2d_rounding=euc2d_rounding)


def dumps_tour(tour: Sequence[int], name: str = "", comment: str = "") -> str:
    lines = [f"NAME : {name or 'tour'}"]
    if comment:
        lines.append(f"COMMENT : {comment}")
    lines += ["TYPE : TOUR", f"DIMENSION : {len(tour)}", "TOUR_SECTION"]
    lines += [str(int(c) + 1) for c in tour]
    lines += ["-1", "EOF"]
    return "\n".join(lines) + "\n"


def write_tour(tour: Sequence[int], path, name: str = "", comment: str = "") -> None:
    Path(path).write_text(dumps_tour(tour, name, comment))


def read_tour(path) -> Tour:
    """Read a TSPLIB tour file; returns 0-based city indices."""
    text = Path(path).read_text()
    body = False
    tour: list[int] = []
    dim = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line == "TOUR_SECTION":
            body = True
            continue
        if not body:
            if line.startswith("DIMENSION"):
                dim = int(line.split(":", 1)[1])
            continue
        for tok in line.split():
            if tok in ("-1", "EOF"):
                body = False
                break
            try:
                tour.append(int(tok) - 1)
            except ValueError:
                raise ParseError(f"bad tour entry {tok!r}", lineno, path) from None
        if not body:
            break
    if dim is not None and dim != len(tour):
        raise ParseError(f"DIMENSION {dim} but {len(tour)} tour entries", None, path)
    return tuple(tour)
