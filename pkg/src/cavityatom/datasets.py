"""Flat datasets of levels: building rows from spectra, CSV/JSON writing and reading."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Iterable, List, Optional

from .eigensolve import Spectrum, SweepPoint, sweep
from .oracle import DEFAULT_CONFIG, IntegratorConfig
from .presets import PRESET_GRID_POINTS, Panel

__all__ = ["Row", "rows_from_spectrum", "run_panel", "write_csv", "read_csv", "to_json", "FIELDS"]

FIELDS = ("panel", "sweep_value", "channel", "node_count", "principal_label", "energy", "residual", "error")


@dataclass(frozen=True)
class Row:
    panel: str
    sweep_value: float
    channel: str
    node_count: Optional[int]
    principal_label: Optional[int]
    energy: float
    residual: float
    error: str = ""


def rows_from_spectrum(panel: str, value: float, spectrum: Optional[Spectrum], channel_key: str,
                       error: Optional[str] = None) -> List[Row]:
    rows = []
    if spectrum is not None:
        for lv in spectrum.levels:
            rows.append(Row(panel, value, channel_key, lv.node_count, lv.principal_label,
                            lv.energy, lv.residual, error or ""))
    if error and not rows:
        rows.append(Row(panel, value, channel_key, None, None, math.nan, math.nan, error))
    return rows


def run_panel(panel: Panel, cfg: IntegratorConfig = DEFAULT_CONFIG, threads: int = 1,
              grid_points: int = PRESET_GRID_POINTS) -> List[Row]:
    """Sweep every channel of ``panel``; rows ordered by sweep value, then channel order, then node."""
    per_channel = []
    for spec in panel.channels:
        points: List[SweepPoint] = sweep(panel.template(spec.channel), panel.parameter, panel.grid,
                                         window=panel.window, max_levels=spec.levels, cfg=cfg,
                                         grid_points=grid_points, auto_extend=True, threads=threads)
        per_channel.append((spec.channel.key, points))
    rows = []
    for i in range(len(panel.grid)):
        for key, points in per_channel:
            pt = points[i]
            rows.extend(rows_from_spectrum(panel.name, pt.value, pt.spectrum, key, pt.error))
    return rows


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def write_csv(rows: Iterable[Row], stream) -> None:
    """RFC 4180 CSV, 17 significant digits so floats survive the round trip bit for bit."""
    w = csv.writer(stream, lineterminator="\r\n")
    w.writerow(FIELDS)
    for r in rows:
        w.writerow([_fmt(getattr(r, f)) for f in FIELDS])


def _opt_int(s: str) -> Optional[int]:
    return int(s) if s != "" else None


def read_csv(stream) -> List[Row]:
    if isinstance(stream, str):
        stream = io.StringIO(stream)
    reader = csv.DictReader(stream)
    if tuple(reader.fieldnames or ()) != FIELDS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    return [Row(d["panel"], float(d["sweep_value"]), d["channel"], _opt_int(d["node_count"]),
                _opt_int(d["principal_label"]), float(d["energy"]), float(d["residual"]), d["error"])
            for d in reader]


def _json_safe(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def to_json(rows: Iterable[Row], meta: Optional[dict] = None) -> str:
    levels = [{k: _json_safe(v) for k, v in asdict(r).items()} for r in rows]
    return json.dumps({"meta": meta or {}, "levels": levels}, indent=2, allow_nan=False)
