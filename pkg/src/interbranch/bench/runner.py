"""Config-driven sweeps: one ResultRow per grid point, in canonical order."""
from __future__ import annotations

import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from ..backends import CapacityError, NoiseModel, run_exact, sample_stabilizer, sample_statevector
from ..circuit import two_qubit_count, two_qubit_depth
from ..metrics import compute_all
from ..protocol import MessageSpec, VariantSpec, build, generate_message
from ..routing import COMPILER_TAG, compile_circuit
from .config import BackendModel, CouplingSpec, ExperimentConfig, NoiseSpec
from .rows import ResultRow, emit_csv, emit_timing

log = logging.getLogger(__name__)


def derive_seed(master_seed: int, *fields) -> int:
    """Stable 63-bit seed from the master seed and a point's identifying fields."""
    blob = json.dumps([master_seed, *fields], sort_keys=True, default=str).encode()
    return int.from_bytes(hashlib.sha256(blob).digest()[:8], "big") >> 1


@dataclass(frozen=True)
class GridPoint:
    experiment_id: str
    kind: str
    backend: BackendModel
    variant: str
    family: str
    n: int
    instance: int
    mu: str
    k: int
    d: int
    p0: float | None
    layout: str
    routing_seed: int
    shots: int
    mode: str
    master_seed: int
    statevector_limit: int

    @property
    def noise_seed(self) -> int:
        return derive_seed(self.master_seed, "noise", self.experiment_id, self.backend.name, self.variant,
                           self.family, self.n, self.instance, self.k, self.d, self.p0, self.routing_seed)


def grid_points(config: ExperimentConfig) -> list[GridPoint]:
    points = []
    d_values = config.d_grid if config.kind == "cousins" else [0]
    k = config.k if config.kind == "cousins" else 0
    p0_values = config.p0_grid if config.kind == "amplitude" else [None]
    for backend in config.backend_models():
        for variant in config.variants:
            for family in config.families:
                for n in config.n_grid:
                    instances = config.half_instances if family == "half" else 1
                    for inst in range(instances):
                        # same message for every backend/variant/seed at this (family, n, instance)
                        msg = generate_message(family, n, derive_seed(config.master_seed, "mu", family, n, inst))
                        for d in d_values:
                            for p0 in p0_values:
                                for seed in config.routing_seeds:
                                    points.append(GridPoint(
                                        config.name, config.kind, backend, variant, family, n, inst, msg.mu,
                                        k, d, p0, config.layout, seed, config.shots, config.mode,
                                        config.master_seed, config.statevector_limit))
    return points


def run_point(pt: GridPoint) -> ResultRow:
    start = time.perf_counter()
    noise = pt.backend.noise.model()
    message = MessageSpec(pt.family, pt.mu)
    variant = VariantSpec(pt.variant, pt.p0, (pt.k, pt.d) if pt.kind == "cousins" else None)
    circuit = build(message, variant)
    cmap = pt.backend.coupling_map.build(circuit.width)
    row = ResultRow(
        experiment_id=pt.experiment_id, kind=pt.kind, variant=pt.variant, family=pt.family, n=pt.n,
        instance=pt.instance, k=pt.k, d=pt.d, p0=pt.p0, mu_hex=message.hex, backend_model=pt.backend.name,
        coupling_map=cmap.name if cmap else "none", layout_strategy=pt.layout if cmap else "none",
        routing_seed=pt.routing_seed, noise_seed=pt.noise_seed, p1=noise.p1, p2=noise.p2,
        readout=noise.readout, shots=pt.shots, mode=pt.mode, compiler=COMPILER_TAG if cmap else "none",
    )
    try:
        if cmap is not None:
            compiled = compile_circuit(circuit, cmap, pt.layout, pt.routing_seed)
            physical, row.swap_count = compiled.circuit, compiled.swap_count
        else:
            physical, row.swap_count = circuit, 0
        row.twoq_count = two_qubit_count(physical)
        row.twoq_depth = two_qubit_depth(physical)
        if pt.mode == "exact":
            table = run_exact(physical, pt.statevector_limit)
        elif physical.clifford_only:
            table = sample_stabilizer(physical, noise, pt.shots, pt.noise_seed)
        else:
            table = sample_statevector(physical, noise, pt.shots, pt.noise_seed, pt.statevector_limit)
        rec = compute_all(table, message.mu, variant)
        for name in ("p_all", "p_bit", "p_erase", "p_erase_r1", "delta", "mi_mean", "p_r0",
                     "p_msg_branch", "n_r0", "n_r1"):
            setattr(row, name, getattr(rec, name))
        row.undefined = ";".join(rec.undefined)
    except CapacityError as exc:
        row.error = f"capacity: {exc}"
    row.__post_init__()
    row.wall_ms = (time.perf_counter() - start) * 1000.0
    return row


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> list[ResultRow]:
    points = grid_points(config)
    workers = workers or config.workers
    log.info("%s: %d grid points on %d worker(s)", config.name, len(points), workers)
    if workers <= 1:
        rows = [run_point(p) for p in points]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run_point, points, chunksize=max(1, len(points) // (4 * workers))))
    return sorted(rows, key=ResultRow.key)


def rerun_row(row: ResultRow, master_seed: int, statevector_limit: int = 24,
              backend: BackendModel | None = None) -> ResultRow:
    """Re-execute a single grid point from the fields recorded in its row."""
    if backend is None:
        kind, _, rest = row.coupling_map.partition("(")
        args = tuple(int(a) for a in rest.rstrip(")").split(",") if a) if rest else ()
        if kind == "all_to_all":
            args = ()
        backend = BackendModel(name=row.backend_model,
                               coupling_map=CouplingSpec(kind=kind, args=args),
                               noise=NoiseSpec(p1=row.p1, p2=row.p2, readout=row.readout))
    mu = MessageSpec.from_hex(row.family, row.n, row.mu_hex).mu
    pt = GridPoint(row.experiment_id, row.kind, backend, row.variant, row.family, row.n, row.instance, mu,
                   row.k, row.d, row.p0, row.layout_strategy, row.routing_seed, row.shots, row.mode,
                   master_seed, statevector_limit)
    return run_point(pt)


def run_and_write(config: ExperimentConfig, output=None, workers: int | None = None) -> tuple[list[ResultRow], Path]:
    rows = run_experiment(config, workers)
    path = Path(output or config.output or f"{config.name}.csv")
    emit_csv(rows, path)
    emit_timing(rows, path.with_suffix(".timing.csv"))
    return rows, path
