"""CSV/JSON writers shared by the command-line workflows.

CSV convention: header row, comma separator, '.' decimal, 17 significant
digits so doubles round-trip exactly. Every data file is accompanied by a
``<stem>.meta.json`` side-car embedding the fully resolved run
configuration, which makes each output self-describing.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Sequence

import numpy as np


def format_float(x: float) -> str:
    return f"{x:.17g}"


def _write_meta(data_path: Path, meta: dict | None) -> None:
    if meta is None:
        return
    meta_path = data_path.with_name(data_path.stem + ".meta.json")
    meta_path.write_text(json.dumps(meta, sort_keys=True, indent=2) + "\n")


def write_csv(
    path: Path,
    header: Sequence[str],
    columns: Sequence[np.ndarray],
    meta: dict | None = None,
) -> Path:
    """Write columns of floats as CSV plus its metadata side-car."""
    columns = [np.asarray(c, dtype=float) for c in columns]
    if len(header) != len(columns):
        raise ValueError("one header entry is required per column")
    lengths = {c.size for c in columns}
    if len(lengths) != 1:
        raise ValueError("all columns must have equal length")
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(format_float(x) for x in row))
    path.write_text("\n".join(lines) + "\n")
    _write_meta(path, meta)
    return path


def write_json(path: Path, payload, meta: dict | None = None) -> Path:
    """Write a JSON document plus its metadata side-car."""
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    _write_meta(path, meta)
    return path


def read_csv(path: Path) -> dict[str, np.ndarray]:
    """Read one of our CSV files back into named columns."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    return {name: data[:, i] for i, name in enumerate(header)}
