"""File outputs: atomic writes, JSON documents, and plot-ready CSVs.

Every writer is deterministic (sorted keys, full-precision floats, no
timestamps) so that re-running a manifest reproduces byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path
from typing import Any, Union

import numpy as np

from .reach import ContourSeries, RegimesGrid, classify_regime


def atomic_write_text(path: Union[str, Path], text: str) -> None:
    """Write via a temp file in the same directory, then rename into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    temp = path.with_name(path.name + ".tmp")
    temp.write_text(text)
    os.replace(temp, path)


def write_json(path: Union[str, Path], payload: Any) -> None:
    atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(cell) if isinstance(cell, float) else cell for cell in row])
    return buffer.getvalue()


def write_contour_csv(path: Union[str, Path], series: ContourSeries) -> None:
    rows = [
        [point.q_logical, point.q_phys_required, point.feasible]
        for point in series.points
    ]
    atomic_write_text(path, _csv_text(["q_logical", "q_phys_required", "feasible"], rows))


def write_regimes_csv(path: Union[str, Path], grid: RegimesGrid) -> None:
    rows = []
    for i, s in enumerate(grid.s_values):
        for j, ratio in enumerate(grid.ratio_values):
            q_max = grid.q_max[i][j]
            rows.append([s, ratio, q_max, classify_regime(q_max)])
    atomic_write_text(path, _csv_text(["s", "ratio", "q_max", "regime"], rows))


def write_spectrum_csv(path: Union[str, Path], spectrum: np.ndarray) -> None:
    rows = [
        [j, float(value.real), float(value.imag), float(abs(value))]
        for j, value in enumerate(spectrum)
    ]
    atomic_write_text(path, _csv_text(["j", "re", "im", "abs"], rows))
