"""Aggregated plot data (mean and std per x value) and the frontier table.

Plot-data CSV columns: ``schema_version, figure, backend_model, series, x_name,
x, y_name, mean, std, count``. ``std`` is the population standard deviation
across the rows in a group (0 for a single row); undefined cells are skipped.
Frontier CSV columns: ``schema_version, backend_model, family, frontier_n``.
"""
from __future__ import annotations

import csv
import io
from collections import defaultdict
from dataclasses import asdict
from pathlib import Path

import numpy as np

from ..metrics import frontier
from .rows import SCHEMA_VERSION, ResultRow

FIGURES = {
    # figure: (x column, y columns, series columns)
    "transfer_vs_n": ("n", ["p_all", "p_bit"], ["family", "variant"]),
    "erasure_pilot": ("variant", ["p_erase", "p_erase_r1", "p_all"], ["family", "n"]),
    "mi_vs_n": ("n", ["mi_mean"], ["family", "variant"]),
    "seed_spread": ("n", ["p_all", "twoq_depth"], ["family", "variant"]),
    "cousins_delta": ("d", ["delta", "p_all", "twoq_depth"], ["family", "variant"]),
    "amplitude": ("p0", ["p_r0", "p_msg_branch"], ["variant"]),
}


def _records(rows) -> list[dict]:
    return [asdict(r) if isinstance(r, ResultRow) else dict(r) for r in rows]


def _num(value):
    if value is None or value == "":
        return None
    try:
        return float(value)
    except (TypeError, ValueError):
        return value


def _sort_key(x):
    return (0, x, "") if isinstance(x, float) else (1, 0.0, str(x))


def report(rows, figure: str) -> list[dict]:
    """Group rows per (backend model, series, x) and summarize each y column."""
    if figure == "frontier":
        return frontier_table(rows)
    if figure not in FIGURES:
        raise ValueError(f"unknown figure {figure!r}; choose from {sorted(FIGURES) + ['frontier']}")
    x_col, y_cols, series_cols = FIGURES[figure]
    recs = _records(rows)
    needed = ["backend_model", x_col, *y_cols, *series_cols]
    if recs:
        missing = [c for c in needed if c not in recs[0]]
        if missing:
            raise ValueError(f"rows lack columns needed for {figure}: {missing}")
    groups = defaultdict(list)
    for rec in recs:
        series = "/".join(str(rec[c]) for c in series_cols)
        groups[(str(rec["backend_model"]), series, _num(rec[x_col]))].append(rec)
    out = []
    for (backend, series, x) in sorted(groups, key=lambda g: (g[0], g[1], _sort_key(g[2]))):
        members = groups[(backend, series, x)]
        for y in y_cols:
            vals = [v for v in (_num(m[y]) for m in members) if isinstance(v, float)]
            out.append({
                "schema_version": SCHEMA_VERSION, "figure": figure, "backend_model": backend,
                "series": series, "x_name": x_col, "x": x, "y_name": y,
                "mean": float(np.mean(vals)) if vals else None,
                "std": float(np.std(vals)) if vals else None,
                "count": len(vals),
            })
    return out


def frontier_table(rows) -> list[dict]:
    """Largest n with mean p_all >= 0.1, per (backend model, family), protocol rows only."""
    means = defaultdict(lambda: defaultdict(list))
    for rec in _records(rows):
        if rec.get("variant", "protocol") != "protocol":
            continue
        p = _num(rec.get("p_all"))
        bucket = means[(str(rec["backend_model"]), str(rec["family"]))][int(_num(rec["n"]))]
        if isinstance(p, float):
            bucket.append(p)
    out = []
    for (backend, family) in sorted(means):
        series = {n: (float(np.mean(v)) if v else None) for n, v in means[(backend, family)].items()}
        out.append({"schema_version": SCHEMA_VERSION, "backend_model": backend, "family": family,
                    "frontier_n": frontier(series)})
    return out


def write_table(records: list[dict], path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    if records:
        writer = csv.DictWriter(buf, fieldnames=list(records[0]), lineterminator="\n")
        writer.writeheader()
        for rec in records:
            writer.writerow({k: (f"{v:.6g}" if isinstance(v, float) else ("" if v is None else v))
                             for k, v in rec.items()})
    path.write_text(buf.getvalue())
    return path
