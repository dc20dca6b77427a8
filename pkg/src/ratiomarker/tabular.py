"""Delimited-text readers and writers for matrices, outcomes, and configs.

Matrix files carry feature ids in the first row and sample ids in the first
column; the corner cell is ignored on read. Tab and comma delimiters are
auto-detected from the header line. Parsers reject NaN, infinities,
negatives, and ragged rows with 1-based row/column positions in the error
message.
"""

import json
import math
import os
from pathlib import Path

import numpy as np

from .composition import CompositionMatrix, Outcome
from .errors import ParseError, ValidationError


def _detect_delimiter(header_line: str) -> str:
    return "\t" if "\t" in header_line else ","


def _read_lines(path) -> list[str]:
    try:
        text = Path(path).read_text()
    except FileNotFoundError:
        raise ValidationError(f"input file does not exist: {path}") from None
    lines = text.splitlines()
    while lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise ParseError("file is empty", path=path)
    return lines


def _parse_cell(text: str, path, row: int, column: int) -> float:
    try:
        value = float(text)
    except ValueError:
        raise ParseError(
            f"cell {text!r} is not a number", path=path, row=row, column=column
        ) from None
    if math.isnan(value):
        raise ParseError("cell is NaN", path=path, row=row, column=column)
    if math.isinf(value):
        raise ParseError("cell is infinite", path=path, row=row, column=column)
    if value < 0.0:
        raise ParseError(
            f"cell {text!r} is negative", path=path, row=row, column=column
        )
    return value


def read_matrix(path) -> CompositionMatrix:
    """Read an abundance matrix from delimited text."""
    lines = _read_lines(path)
    delim = _detect_delimiter(lines[0])
    header = lines[0].split(delim)
    n_cols = len(header)
    if n_cols < 3:
        raise ParseError(
            "matrix needs a sample-id column and at least two features",
            path=path,
            row=1,
        )
    feature_ids = [h.strip() for h in header[1:]]
    if len(lines) < 2:
        raise ParseError("matrix has no sample rows", path=path)
    sample_ids = []
    rows = []
    for i, line in enumerate(lines[1:], start=2):
        fields = line.split(delim)
        if len(fields) != n_cols:
            raise ParseError(
                f"ragged row: expected {n_cols} cells, got {len(fields)}",
                path=path,
                row=i,
            )
        sample_ids.append(fields[0].strip())
        rows.append(
            [
                _parse_cell(cell, path, i, j)
                for j, cell in enumerate(fields[1:], start=2)
            ]
        )
    return CompositionMatrix(np.array(rows, dtype=float), sample_ids, feature_ids)


def write_table(path, row_ids, col_ids, values, corner="sample_id", delimiter="\t"):
    """Write a labelled table; floats are written with full repr precision."""
    values = np.asarray(values, dtype=float)
    out = [delimiter.join([corner, *[str(c) for c in col_ids]])]
    for rid, row in zip(row_ids, values):
        out.append(delimiter.join([str(rid), *[repr(float(v)) for v in row]]))
    atomic_write_text(path, "\n".join(out) + "\n")


def write_matrix(path, matrix: CompositionMatrix, delimiter="\t"):
    write_table(
        path,
        matrix.sample_ids,
        matrix.feature_ids,
        matrix.values,
        delimiter=delimiter,
    )


def read_outcome_pairs(path) -> tuple[list[str], np.ndarray]:
    """Read (sample id, value) pairs; values must be nonnegative finite."""
    lines = _read_lines(path)
    delim = _detect_delimiter(lines[0])
    ids = []
    values = []
    start = 1
    first = lines[0].split(delim)
    # A header row is optional; detect it by a non-numeric second cell.
    try:
        float(first[1])
        start = 0
    except (ValueError, IndexError):
        start = 1
    for i, line in enumerate(lines[start:], start=start + 1):
        fields = line.split(delim)
        if len(fields) != 2:
            raise ParseError(
                f"ragged row: expected 2 cells, got {len(fields)}",
                path=path,
                row=i,
            )
        ids.append(fields[0].strip())
        values.append(_parse_cell(fields[1], path, i, 2))
    if not ids:
        raise ParseError("outcome file has no rows", path=path)
    return ids, np.array(values, dtype=float)


def infer_outcome_kind(values: np.ndarray) -> str:
    return (
        "binary"
        if np.all((values == 0.0) | (values == 1.0))
        else "continuous"
    )


def outcome_for_matrix(matrix, ids, values, kind=None) -> Outcome:
    """Align outcome pairs to the matrix sample order."""
    lookup = dict(zip(ids, values))
    if len(lookup) != len(ids):
        raise ValidationError("duplicate sample ids in outcome")
    missing = [s for s in matrix.sample_ids if s not in lookup]
    if missing:
        raise ValidationError(
            f"outcome is missing samples: {', '.join(missing[:5])}"
        )
    ordered = np.array([lookup[s] for s in matrix.sample_ids], dtype=float)
    if kind is None:
        kind = infer_outcome_kind(ordered)
    return Outcome(kind, ordered)


def write_outcome(path, sample_ids, values, delimiter="\t"):
    lines = [
        delimiter.join([str(s), repr(float(v))])
        for s, v in zip(sample_ids, values)
    ]
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_config(path) -> dict[str, str]:
    """Read key=value configuration, one pair per line.

    A JSON file (for instance a previously written run manifest) is also
    accepted; its "config" object, or the top-level object itself, is used.
    """
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        if isinstance(data, dict) and isinstance(data.get("config"), dict):
            data = data["config"]
        if not isinstance(data, dict):
            raise ParseError("JSON config must be an object", path=path)
        return {str(k): str(v) for k, v in data.items() if v is not None}
    config = {}
    for i, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ParseError("expected key=value", path=path, row=i)
        key, _, value = line.partition("=")
        config[key.strip()] = value.strip()
    return config


def write_config(path, config: dict):
    lines = [f"{k} = {v}" for k, v in config.items()]
    atomic_write_text(path, "\n".join(lines) + "\n")


def atomic_write_text(path, text: str):
    """Write via a temp file and rename, so files appear exactly once."""
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)
