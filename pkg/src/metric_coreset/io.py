"""Dataset text formats and JSON artifacts.

Coordinates: one point per line, values separated by commas and/or
whitespace. Distance matrix: a ``matrix n`` header followed by ``n`` rows of
the lower triangle including the zero diagonal. In both formats blank lines
and lines starting with ``#`` are skipped.
"""
from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import DatasetError, InvalidArgument
from .metric import MetricSpace

_SPLIT = re.compile(r"[,\s]+")


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            yield lineno, line


def _floats(line, lineno, path):
    try:
        return [float(tok) for tok in _SPLIT.split(line.strip(", \t")) if tok]
    except ValueError as exc:
        raise DatasetError(f"not a number ({exc})", path, lineno) from None


def parse_coords(text: str, path=None) -> np.ndarray:
    rows = []
    width = None
    for lineno, line in _content_lines(text):
        values = _floats(line, lineno, path)
        if width is None:
            width = len(values)
        elif len(values) != width:
            raise DatasetError(f"expected {width} values, found {len(values)}", path, lineno)
        rows.append(values)
    if not rows:
        raise DatasetError("no points found", path)
    return np.array(rows, dtype=np.float64)


def parse_matrix(text: str, path=None) -> np.ndarray:
    lines = _content_lines(text)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise DatasetError("empty matrix file", path) from None
    parts = header.split()
    if len(parts) != 2 or parts[0].lower() != "matrix" or not parts[1].isdigit() or int(parts[1]) < 1:
        raise DatasetError("header must read 'matrix <n>'", path, lineno)
    n = int(parts[1])
    D = np.zeros((n, n))
    for i in range(n):
        try:
            lineno, line = next(lines)
        except StopIteration:
            raise DatasetError(f"expected {n} rows, found {i}", path) from None
        values = _floats(line, lineno, path)
        if len(values) != i + 1:
            raise DatasetError(f"row {i} needs {i + 1} values, found {len(values)}", path, lineno)
        if values[-1] != 0.0:
            raise DatasetError("diagonal entry must be 0", path, lineno)
        D[i, :i + 1] = values
        D[:i + 1, i] = values
    extra = next(lines, None)
    if extra is not None:
        raise DatasetError(f"unexpected data after {n} rows", path, extra[0])
    return D


def detect_format(text: str) -> str:
    first = next(_content_lines(text), (0, ""))[1]
    return "matrix" if first.lower().startswith("matrix") else "coords"


def load_dataset(path, fmt: str = "auto") -> MetricSpace:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise DatasetError(f"cannot read ({exc.strerror})", path) from None
    if fmt == "auto":
        fmt = detect_format(text)
    try:
        if fmt == "coords":
            return MetricSpace.euclidean(parse_coords(text, path))
        if fmt == "matrix":
            return MetricSpace.explicit(parse_matrix(text, path))
    except DatasetError:
        raise
    except InvalidArgument as exc:
        raise DatasetError(str(exc), path) from None
    raise InvalidArgument(f"unknown dataset format {fmt!r}")


def format_coords(X) -> str:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    return "".join(",".join(repr(float(v)) for v in row) + "\n" for row in X)


def format_matrix(D) -> str:
    D = np.asarray(D, dtype=np.float64)
    lines = [f"matrix {D.shape[0]}"]
    for i in range(D.shape[0]):
        lines.append(" ".join(repr(float(v)) for v in D[i, :i + 1]))
    return "\n".join(lines) + "\n"


def dumps(obj) -> str:
    """Canonical JSON text: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def read_json(path) -> dict:
    path = Path(path)
    try:
        return json.loads(path.read_text())
    except OSError as exc:
        raise DatasetError(f"cannot read ({exc.strerror})", path) from None
    except json.JSONDecodeError as exc:
        raise DatasetError(f"invalid JSON: {exc.msg}", path, exc.lineno) from None
