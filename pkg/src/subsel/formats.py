"""Matrix files and report serialization."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .bounds import BASELINES, BoundReport


class InputError(ValueError):
    """Malformed matrix or report file."""


def parse_csv_matrix(text: str) -> np.ndarray:
    rows = []
    for lineno, row in enumerate(csv.reader(io.StringIO(text)), 1):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            rows.append([float(c) for c in row])
        except ValueError as exc:
            raise InputError(f"line {lineno}: {exc}") from exc
        if len(rows[-1]) != len(rows[0]):
            raise InputError(f"line {lineno}: expected {len(rows[0])} values, got {len(rows[-1])}")
    if not rows:
        raise InputError("empty matrix")
    return np.array(rows, dtype=float)


def parse_json_matrix(text: str) -> np.ndarray:
    try:
        obj = json.loads(text)
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (ValueError, KeyError, TypeError) as exc:
        raise InputError(f"bad JSON matrix: {exc}") from exc
    if len(data) != rows * cols:
        raise InputError(f"JSON matrix has {len(data)} entries, expected {rows}x{cols}")
    try:
        return np.array(data, dtype=float).reshape(rows, cols)
    except (ValueError, TypeError) as exc:
        raise InputError(f"bad JSON matrix: {exc}") from exc


def read_matrix(path) -> np.ndarray:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(str(exc)) from exc
    if path.suffix.lower() == ".json" or text.lstrip().startswith("{"):
        A = parse_json_matrix(text)
    else:
        A = parse_csv_matrix(text)
    if not np.all(np.isfinite(A)):
        raise InputError("matrix has non-finite entries")
    return A


def format_csv_matrix(A) -> str:
    return "".join(",".join(f"{v:.17g}" for v in row) + "\n" for row in np.asarray(A, dtype=float))


def format_json_matrix(A) -> str:
    A = np.asarray(A, dtype=float)
    return json.dumps({"rows": A.shape[0], "cols": A.shape[1], "data": A.ravel().tolist()})


def g17(x) -> str:
    return "" if x is None else f"{x:.17g}"


SWEEP_COLUMNS = (
    ["m", "n", "k", "alpha", "alpha_branch", "main_bound", "explicit_bound"]
    + list(BASELINES)
    + [f"main_gt_{b}" for b in BASELINES]
)


def bound_row(rep: BoundReport) -> list:
    row = [str(rep.m), str(rep.n), str(rep.k), g17(rep.alpha), rep.alpha_branch,
           g17(rep.main_bound), g17(rep.explicit_bound)]
    row += [g17(rep.baselines.get(b)) for b in BASELINES]
    row += ["" if b not in rep.dominates else str(rep.dominates[b]).lower() for b in BASELINES]
    return row


def bounds_csv(reports) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SWEEP_COLUMNS)
    for rep in reports:
        w.writerow(bound_row(rep))
    return buf.getvalue()


def dump_json(obj) -> str:
    # repr-based float output is the shortest string that round-trips exactly
    return json.dumps(obj, indent=2, sort_keys=True)


def load_json(text: str) -> dict:
    try:
        obj = json.loads(text)
    except ValueError as exc:
        raise InputError(f"bad JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise InputError("expected a JSON object")
    return obj
