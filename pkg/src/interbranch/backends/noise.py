"""Pauli noise model and the per-gate error draw shared by both backends."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..circuit import CX, Gate

# Shots are simulated in fixed-size blocks, each with its own counter-derived RNG
# stream, so results never depend on how blocks are scheduled.
BLOCK_SHOTS = 1024


@dataclass(frozen=True)
class NoiseModel:
    p1: float = 0.0
    p2: float = 0.0
    readout: float = 0.0

    def __post_init__(self):
        for name in ("p1", "p2", "readout"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")

    @property
    def is_ideal(self) -> bool:
        return self.p1 == 0 and self.p2 == 0 and self.readout == 0


IDEAL = NoiseModel()
PRESETS = {
    "ideal": IDEAL,
    "quiet": NoiseModel(0.0005, 0.005, 0.01),
    "noisy": NoiseModel(0.002, 0.02, 0.03),
}


def native_gates(gates) -> list[Gate]:
    """SWAP expanded to three CX so each one is charged two-qubit noise."""
    out = []
    for g in gates:
        if g.kind == "SWAP":
            a, b = g.qubits
            out += [CX(a, b), CX(b, a), CX(a, b)]
        else:
            out.append(g)
    return out


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(block,)))


def blocks(shots: int):
    """Yield (block index, block size) covering ``shots``."""
    for b, start in enumerate(range(0, shots, BLOCK_SHOTS)):
        yield b, min(BLOCK_SHOTS, shots - start)


def draw_error(rng: np.random.Generator, gate: Gate, noise: NoiseModel, shots: int):
    """Sample the depolarizing error following ``gate`` for every shot.

    Returns ``(hit_index, codes)``. A code packs one 2-bit Pauli per gate qubit
    (bit 0 = X part, bit 1 = Z part; I=0, X=1, Z=2, Y=3), first qubit in the
    high bits. Codes are uniform over the non-identity Paulis.
    """
    p = noise.p2 if gate.is_two_qubit else noise.p1
    if p == 0.0:
        return None
    hit = np.flatnonzero(rng.random(shots) < p)
    top = 16 if gate.is_two_qubit else 4
    return hit, rng.integers(1, top, size=hit.size)


def split_code(code, arity: int):
    """Per-qubit (x, z) bit arrays from packed Pauli codes."""
    code = np.asarray(code)
    parts = []
    for j in range(arity):
        c = (code >> (2 * (arity - 1 - j))) & 3
        parts.append(((c & 1).astype(bool), (c >> 1).astype(bool)))
    return parts


def readout_flips(rng: np.random.Generator, noise: NoiseModel, shots: int, m: int):
    if noise.readout == 0.0:
        return None
    return rng.random((shots, m)) < noise.readout
