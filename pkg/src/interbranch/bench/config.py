"""Experiment configuration (YAML or JSON) and synthetic backend models.

Schema, version 1::

    schema_version: 1
    name: scaling-demo            # experiment id, copied into every row
    kind: scaling                 # pilot | scaling | seed_sweep | cousins | amplitude
    families: [sparse, half, dense]
    n_grid: [1, 2, 4, 8, 16, 24, 32]
    variants: [protocol]          # protocol | no_swap | no_uncompute
    backends: [hh_quiet, hh_noisy]  # preset names, or inline {name, coupling_map, noise}
    layout: interleave_pairs      # trivial | seeded_random | interleave_pairs
    routing_seeds: [0, 1, 2, 3, 4]
    shots: 4096
    half_instances: 3
    mode: sample                  # sample | exact
    k: 16                         # cousins only
    d_grid: [0, 1, 2, 4, 6, 8, 10, 12, 14, 16]
    p0_grid: [0.0, 0.1, ..., 1.0] # amplitude only
    master_seed: 0
    workers: 1
    statevector_limit: 24
    output: results.csv

Any field left out takes the default for its ``kind``.
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..backends.noise import PRESETS, NoiseModel
from ..routing import CouplingMap, all_to_all, make_coupling_map

SCHEMA_VERSION = 1
N_GRID = [1, 2, 4, 8, 16, 24, 32]
D_GRID = [0, 1, 2, 4, 6, 8, 10, 12, 14, 16]
P0_GRID = [round(i / 10, 10) for i in range(11)]


class CouplingSpec(BaseModel):
    """``kind: none`` skips routing; ``all_to_all`` with no args is sized to the circuit."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    kind: Literal["none", "line", "ring", "grid", "heavy_hex", "all_to_all", "from_edge_list"] = "none"
    args: tuple[Union[int, str], ...] = ()

    def build(self, width: int) -> CouplingMap | None:
        if self.kind == "none":
            return None
        if self.kind == "all_to_all" and not self.args:
            return all_to_all(width)
        return make_coupling_map(self.kind, *self.args)

    @property
    def label(self) -> str:
        if self.kind == "none":
            return "none"
        return f"{self.kind}({','.join(str(a) for a in self.args)})"


class NoiseSpec(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)
    p1: float = Field(0.0, ge=0, le=1)
    p2: float = Field(0.0, ge=0, le=1)
    readout: float = Field(0.0, ge=0, le=1)

    def model(self) -> NoiseModel:
        return NoiseModel(self.p1, self.p2, self.readout)


class BackendModel(BaseModel):
    """A synthetic device: a coupling map paired with a noise tier."""

    model_config = ConfigDict(extra="forbid", frozen=True)
    name: str
    coupling_map: CouplingSpec = CouplingSpec()
    noise: NoiseSpec = NoiseSpec()


def _noise(tier):
    m = PRESETS[tier]
    return NoiseSpec(p1=m.p1, p2=m.p2, readout=m.readout)


HEAVY_HEX = CouplingSpec(kind="heavy_hex", args=(4, 4))
SQUARE_GRID = CouplingSpec(kind="grid", args=(9, 9))
BACKEND_MODELS = {
    "ideal": BackendModel(name="ideal"),
    "hh_quiet": BackendModel(name="hh_quiet", coupling_map=HEAVY_HEX, noise=_noise("quiet")),
    "hh_noisy": BackendModel(name="hh_noisy", coupling_map=HEAVY_HEX, noise=_noise("noisy")),
    "grid_quiet": BackendModel(name="grid_quiet", coupling_map=SQUARE_GRID, noise=_noise("quiet")),
    "grid_noisy": BackendModel(name="grid_noisy", coupling_map=SQUARE_GRID, noise=_noise("noisy")),
}

Kind = Literal["pilot", "scaling", "seed_sweep", "cousins", "amplitude"]
Family = Literal["sparse", "half", "dense"]
Variant = Literal["protocol", "no_swap", "no_uncompute"]

_KIND_DEFAULTS = {
    "pilot": dict(families=["sparse"], n_grid=[1], variants=["protocol", "no_swap", "no_uncompute"],
                  backends=["ideal"], layout="trivial", routing_seeds=[0]),
    "scaling": dict(families=["sparse", "half", "dense"], n_grid=N_GRID, variants=["protocol"],
                    backends=["hh_quiet", "hh_noisy"], layout="interleave_pairs", routing_seeds=list(range(5))),
    "seed_sweep": dict(families=["half", "dense"], n_grid=[8, 16, 24], variants=["protocol"],
                       backends=["hh_quiet"], layout="seeded_random", routing_seeds=list(range(10))),
    "cousins": dict(families=["sparse"], n_grid=[16], variants=["protocol"], backends=["hh_noisy"],
                    layout="interleave_pairs", routing_seeds=list(range(5))),
    "amplitude": dict(families=["sparse"], n_grid=[1], variants=["protocol", "no_swap"],
                      backends=["ideal"], layout="trivial", routing_seeds=[0], mode="exact"),
}


class ExperimentConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    schema_version: Literal[1] = SCHEMA_VERSION
    name: str = "experiment"
    kind: Kind
    families: Optional[list[Family]] = None
    n_grid: Optional[list[int]] = None
    variants: Optional[list[Variant]] = None
    backends: Optional[list[Union[str, BackendModel]]] = None
    layout: Optional[Literal["trivial", "seeded_random", "interleave_pairs"]] = None
    routing_seeds: Optional[list[int]] = None
    shots: int = Field(4096, ge=1)
    half_instances: int = Field(3, ge=1)
    mode: Optional[Literal["sample", "exact"]] = None
    k: int = Field(16, ge=0)
    d_grid: list[int] = Field(default_factory=lambda: list(D_GRID))
    p0_grid: list[float] = Field(default_factory=lambda: list(P0_GRID))
    master_seed: int = 0
    workers: int = Field(1, ge=1)
    statevector_limit: int = Field(24, ge=1)
    output: Optional[str] = None

    @model_validator(mode="after")
    def _fill_and_check(self):
        for key, value in _KIND_DEFAULTS[self.kind].items():
            if getattr(self, key) is None:
                setattr(self, key, value)
        if self.mode is None:
            self.mode = "sample"
        for key in ("families", "n_grid", "variants", "backends", "routing_seeds"):
            if not getattr(self, key):
                raise ValueError(f"{key} must be non-empty")
        if any(n < 1 for n in self.n_grid):
            raise ValueError("n_grid entries must be >= 1")
        if self.kind == "cousins":
            if not self.d_grid or any(not 0 <= d <= self.k for d in self.d_grid):
                raise ValueError(f"d_grid must be non-empty with 0 <= d <= k={self.k}")
        if self.kind == "amplitude":
            if not self.p0_grid or any(not 0 <= p <= 1 for p in self.p0_grid):
                raise ValueError("p0_grid must be non-empty with entries in [0, 1]")
        for b in self.backends:
            if isinstance(b, str) and b not in BACKEND_MODELS:
                raise ValueError(f"unknown backend model {b!r}; presets: {sorted(BACKEND_MODELS)}")
        # statevector capacity is known up front for these, so reject now rather than mid-run
        if self.kind == "amplitude" or self.mode == "exact":
            k = self.k if self.kind == "cousins" else 0
            widest = 3 + 2 * max(self.n_grid) + k
            if widest > self.statevector_limit:
                raise ValueError(f"{self.kind}/{self.mode} run needs {widest} qubits at n={max(self.n_grid)}; "
                                 f"statevector limit is {self.statevector_limit}")
        return self

    def backend_models(self) -> list[BackendModel]:
        return [BACKEND_MODELS[b] if isinstance(b, str) else b for b in self.backends]


def load_config(path, **overrides) -> ExperimentConfig:
    text = Path(path).read_text()
    data = json.loads(text) if str(path).endswith(".json") else yaml.safe_load(text)
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.model_validate(data)
