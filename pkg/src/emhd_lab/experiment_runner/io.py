"""On-disk formats.

series.csv
    header ``t,E_s,D_s,energy,helicity,mean_a,mean_b``; floats in ``repr``
    form so values round-trip exactly.

snapshot files (``*.emhd``)
    8 bytes   ASCII magic ``EMHD25F1``
    4 bytes   grid size n, unsigned 32-bit little-endian
    then the coefficient array of ``a`` followed by that of ``b``: n*n
    complex values each, row-major with ky as the slow index and kx as the
    fast one, both in FFT order (0, 1, ..., n/2-1, -n/2, ..., -1); each value
    is two little-endian float64 (re, im).
"""

from __future__ import annotations

import csv
import json
import math
import struct
from pathlib import Path

import numpy as np

from ..diagnostics import SERIES_COLUMNS, DiagnosticsSeries, EnergyRecord
from ..emhd_rhs import EmhdState
from ..errors import EmhdError
from ..spectral_core import GridSpec, SpectralField

SNAPSHOT_MAGIC = b"EMHD25F1"


class SnapshotFormatError(EmhdError, ValueError):
    pass


def write_series_csv(series: DiagnosticsSeries, path: Path):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(SERIES_COLUMNS)
        for row in series.rows():
            w.writerow([repr(float(x)) for x in row])


def read_series_csv(path: Path) -> DiagnosticsSeries:
    series = DiagnosticsSeries()
    with open(path, newline="", encoding="utf-8") as fh:
        r = csv.reader(fh)
        header = next(r)
        if tuple(header) != SERIES_COLUMNS:
            raise SnapshotFormatError(f"{path}: unexpected header {header}")
        for row in r:
            series.append(EnergyRecord(*(float(x) for x in row)))
    return series


def write_snapshot(state: EmhdState, path: Path):
    n = state.grid.n
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<I", n))
        for f in (state.a, state.b):
            fh.write(np.ascontiguousarray(f.coeffs, dtype="<c16").tobytes())


def read_snapshot(path: Path, time: float = 0.0) -> EmhdState:
    raw = Path(path).read_bytes()
    if raw[:8] != SNAPSHOT_MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {raw[:8]!r}")
    (n,) = struct.unpack("<I", raw[8:12])
    size = n * n * 16
    if len(raw) != 12 + 2 * size:
        raise SnapshotFormatError(f"{path}: expected {12 + 2 * size} bytes, found {len(raw)}")
    grid = GridSpec(n)
    a = np.frombuffer(raw, dtype="<c16", count=n * n, offset=12).reshape(n, n)
    b = np.frombuffer(raw, dtype="<c16", count=n * n, offset=12 + size).reshape(n, n)
    return EmhdState(SpectralField(grid, a.astype(complex)), SpectralField(grid, b.astype(complex)), time)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(data: dict, path: Path):
    Path(path).write_text(json.dumps(_jsonable(data), indent=2, sort_keys=True) + "\n", encoding="utf-8")


def read_json(path: Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_energy_svg(series: DiagnosticsSeries, path: Path, bound: float | None = None, T0: float | None = None):
    """Minimal line chart of E_s(t), with the Gronwall bound as a dashed line."""
    t = series.column("t")
    e = series.column("E_s")
    w, h, pad = 640, 400, 50
    ymax = max(float(np.max(e)), bound or 0.0) or 1.0
    tmax = float(t[-1]) if t[-1] > 0 else 1.0

    def xy(ti, yi):
        return pad + (w - 2 * pad) * ti / tmax, h - pad - (h - 2 * pad) * yi / ymax

    pts = " ".join("%.2f,%.2f" % xy(ti, yi) for ti, yi in zip(t, e))
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}">',
        f'<rect x="{pad}" y="{pad}" width="{w - 2 * pad}" height="{h - 2 * pad}" fill="none" stroke="black"/>',
        f'<polyline points="{pts}" fill="none" stroke="steelblue" stroke-width="1.5"/>',
        f'<text x="{pad}" y="{pad - 10}" font-size="12">E_s(t), max {ymax:.4g}, t_end {tmax:.4g}</text>',
    ]
    if bound is not None:
        x0, y0 = xy(0.0, bound)
        x1 = xy(min(T0, tmax) if T0 and math.isfinite(T0) else tmax, bound)[0]
        parts.append(f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1:.2f}" y2="{y0:.2f}" stroke="firebrick" stroke-dasharray="6,4"/>')
    parts.append("</svg>")
    Path(path).write_text("\n".join(parts) + "\n", encoding="utf-8")
