"""Result rows and their CSV encoding.

Results CSV columns, in order (schema version 1)::

    schema_version, experiment_id, kind, variant, family, n, instance, k, d, p0,
    mu_hex, backend_model, coupling_map, layout_strategy, routing_seed,
    noise_seed, p1, p2, readout, shots, mode, compiler, twoq_count,
    twoq_depth, swap_count, p_all, p_bit, p_erase, p_erase_r1, delta,
    mi_mean, p_r0, p_msg_branch, n_r0, n_r1, undefined, error

Floats are written with 6 significant digits; undefined metrics are empty
cells and listed by name (``;``-separated) in ``undefined``. Wall-clock time
is kept out of this file so identical runs give identical bytes; it goes to a
``<stem>.timing.csv`` sidecar instead.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field, fields
from pathlib import Path

SCHEMA_VERSION = 1


def sig6(x):
    return None if x is None else float(f"{x:.6g}")


@dataclass
class ResultRow:
    experiment_id: str
    kind: str
    variant: str
    family: str
    n: int
    instance: int
    k: int
    d: int
    p0: float | None
    mu_hex: str
    backend_model: str
    coupling_map: str
    layout_strategy: str
    routing_seed: int
    noise_seed: int
    p1: float
    p2: float
    readout: float
    shots: int
    mode: str
    compiler: str
    twoq_count: int | None = None
    twoq_depth: int | None = None
    swap_count: int | None = None
    p_all: float | None = None
    p_bit: float | None = None
    p_erase: float | None = None
    p_erase_r1: float | None = None
    delta: float | None = None
    mi_mean: float | None = None
    p_r0: float | None = None
    p_msg_branch: float | None = None
    n_r0: float | None = None
    n_r1: float | None = None
    undefined: str = ""
    error: str = ""
    schema_version: int = SCHEMA_VERSION
    wall_ms: float | None = field(default=None, compare=False)

    def __post_init__(self):
        for f in fields(self):
            if f.type in ("float | None", "float") and f.name != "wall_ms":
                setattr(self, f.name, sig6(getattr(self, f.name)))

    def key(self):
        return (self.experiment_id, self.backend_model, self.variant, self.family, self.n, self.instance,
                self.k, self.d, -1.0 if self.p0 is None else self.p0, self.routing_seed)


COLUMNS = ["schema_version"] + [f.name for f in fields(ResultRow)
                                if f.name not in ("schema_version", "wall_ms")]
_TYPES = {f.name: f.type for f in fields(ResultRow)}


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def _parse(name, text):
    kind = _TYPES[name]
    if text == "":
        return "" if kind == "str" else None
    if kind.startswith("int"):
        return int(text)
    if kind.startswith("float"):
        return float(text)
    return text


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COLUMNS)
    for row in sorted(rows, key=ResultRow.key):
        writer.writerow([_fmt(getattr(row, c)) for c in COLUMNS])
    return buf.getvalue()


def emit_csv(rows, path) -> Path:
    rows = list(rows)
    versions = {r.schema_version for r in rows}
    if len(versions) > 1:
        raise ValueError(f"rows mix schema versions {sorted(versions)}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(rows_to_csv(rows))
    return path


def emit_timing(rows, path) -> Path:
    path = Path(path)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    key_cols = ["experiment_id", "backend_model", "variant", "family", "n", "instance", "k", "d", "p0",
                "routing_seed"]
    writer.writerow(key_cols + ["wall_ms"])
    for row in sorted(rows, key=ResultRow.key):
        writer.writerow([_fmt(getattr(row, c)) for c in key_cols] + [_fmt(row.wall_ms)])
    path.write_text(buf.getvalue())
    return path


def read_rows(path) -> list[dict]:
    """Raw CSV records (string values), for reports over arbitrary columns."""
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def parse_csv(path) -> list[ResultRow]:
    out = []
    for rec in read_rows(path):
        missing = [c for c in COLUMNS if c not in rec]
        if missing:
            raise ValueError(f"{path}: missing columns {missing}")
        out.append(ResultRow(**{c: _parse(c, rec[c]) for c in COLUMNS}))
    return out
