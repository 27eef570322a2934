"""CSV ingestion, scenario files and JSON serialisation."""
from __future__ import annotations

import csv
import json
import math
import os
import tempfile
from pathlib import Path

import numpy as np

from .errors import ConfigError, InputError
from .series import TimeSeries
from .simulate import ScenarioSpec, make_dgp

MIN_ROWS = 4


def _is_number(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


def _resolve_column(header: list[str] | None, width: int, column) -> int:
    if column is None:
        if width == 1:
            return 0
        raise InputError(f"file has {width} columns; choose one with --column")
    if header is not None and str(column) in header:
        return header.index(str(column))
    try:
        idx = int(column)
    except (TypeError, ValueError):
        raise InputError(f"column {column!r} not found") from None
    if not 0 <= idx < width:
        raise InputError(f"column index {idx} out of range for {width} columns")
    return idx


def read_series_csv(path, column=None, label_column=None) -> TimeSeries:
    """Read one column of a CSV file as a series.

    ``column`` is a header name or a 0-based index; it may be omitted for
    single-column files. The first row is a header when its cell in the
    chosen column is not numeric. Any later non-numeric or non-finite cell is
    an error naming its 1-based file row.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"input file not found: {path}")
    with path.open(newline="") as fh:
        rows = [(lineno, row) for lineno, row in enumerate(csv.reader(fh), start=1)
                if row and any(c.strip() for c in row)]
    if not rows:
        raise InputError(f"{path} is empty")

    first = [c.strip() for c in rows[0][1]]
    width = len(first)
    header = None
    if column is not None and not _is_number(str(column)) and str(column) in first:
        header = first
    idx = _resolve_column(header, width, column)
    if header is None and not _is_number(first[idx]):
        header = first
        idx = _resolve_column(header, width, column)
    body = rows[1:] if header is not None else rows
    label_idx = None if label_column is None else _resolve_column(header, width, label_column)

    values, labels = [], []
    for lineno, row in body:
        cell = row[idx].strip() if idx < len(row) else ""
        try:
            v = float(cell)
        except ValueError:
            raise InputError(f"row {lineno}: {cell!r} is not a number") from None
        if not math.isfinite(v):
            raise InputError(f"row {lineno}: non-finite value {cell!r}")
        values.append(v)
        if label_idx is not None:
            labels.append(row[label_idx].strip() if label_idx < len(row) else "")
    if len(values) < MIN_ROWS:
        raise InputError(f"need at least {MIN_ROWS} observations, found {len(values)}")
    return TimeSeries(np.asarray(values), tuple(labels) if label_idx is not None else None)


def load_scenarios(path) -> dict:
    """Parse a JSON scenario file.

    Layout::

        {"kind": "rejection" | "lrv",
         "replications": 4000,
         "scenarios": [{"dgp": "ar1", "dgp_params": [0.7], "mean": "A3",
                        "variance": "s1", "n": 500, "theta_mu": null,
                        "theta_sigma": null, "replications": 1000}, ...]}

    Only ``dgp`` and ``n`` are required per scenario.
    """
    path = Path(path)
    if not path.is_file():
        raise InputError(f"scenario file not found: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("scenarios"), list) or not doc["scenarios"]:
        raise InputError(f"{path}: expected an object with a non-empty 'scenarios' list")
    kind = doc.get("kind", "rejection")
    if kind not in ("rejection", "lrv"):
        raise ConfigError(f"{path}: kind must be 'rejection' or 'lrv', got {kind!r}")
    scenarios = []
    for pos, item in enumerate(doc["scenarios"]):
        try:
            dgp = make_dgp(item["dgp"], item.get("dgp_params"), int(item.get("burn_in", 1000)))
            scenarios.append(ScenarioSpec(
                dgp=dgp,
                mean_kind=item.get("mean", "H"),
                var_kind=item.get("variance", "const"),
                n=int(item["n"]),
                theta_mu=item.get("theta_mu"),
                theta_sigma=item.get("theta_sigma"),
                replications=item.get("replications"),
            ))
        except KeyError as exc:
            raise InputError(f"{path}: scenario {pos} lacks field {exc}") from None
    return {"kind": kind, "replications": int(doc.get("replications", 4000)), "scenarios": scenarios}


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


def dumps(doc: dict) -> str:
    """Deterministic JSON; floats use the shortest repr that round-trips exactly."""
    return json.dumps(_plain(doc), indent=2, allow_nan=False) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temporary file and rename, so a failure leaves no partial file."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
