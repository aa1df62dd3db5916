from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..circuit import RegisterMap


class CapacityError(RuntimeError):
    """Circuit too wide for the dense statevector backend."""

    def __init__(self, width, limit):
        super().__init__(f"circuit needs {width} active qubits; statevector limit is {limit}")
        self.width = width
        self.limit = limit


class BackendMismatchError(TypeError):
    pass


@dataclass
class ShotTable:
    counts: dict[str, int]
    shots: int
    registers: RegisterMap | None = None

    def __post_init__(self):
        total = sum(self.counts.values())
        if total != self.shots:
            raise ValueError(f"counts sum to {total}, expected {self.shots}")
        if any(c < 0 for c in self.counts.values()):
            raise ValueError("negative count")
        lengths = {len(k) for k in self.counts}
        if len(lengths) > 1:
            raise ValueError("outcome strings of mixed length")

    @property
    def total(self) -> float:
        return float(self.shots)

    def weights(self) -> dict[str, float]:
        return {k: float(v) for k, v in self.counts.items()}

    def probabilities(self) -> dict[str, float]:
        if not self.shots:
            return {}
        return {k: v / self.shots for k, v in self.counts.items()}

    def restrict(self, keep: dict[str, float]) -> "ShotTable":
        counts = {k: int(v) for k, v in keep.items()}
        return ShotTable(counts, sum(counts.values()), self.registers)


@dataclass
class OutcomeDistribution:
    probs: dict[str, float]
    registers: RegisterMap | None = None
    total: float = field(default=1.0)

    def __post_init__(self):
        if any(p < 0 for p in self.probs.values()):
            raise ValueError("negative probability")

    @property
    def shots(self) -> float:
        return self.total

    def weights(self) -> dict[str, float]:
        return {k: p * self.total for k, p in self.probs.items()}

    def probabilities(self) -> dict[str, float]:
        return dict(self.probs)

    def restrict(self, keep: dict[str, float]) -> "OutcomeDistribution":
        # keep holds absolute weights; renormalize but remember the mass
        mass = sum(keep.values())
        probs = {k: v / mass for k, v in keep.items()} if mass > 0 else {}
        return OutcomeDistribution(probs, self.registers, mass)

    def __getitem__(self, key):
        return self.probs.get(key, 0.0)


def as_arrays(table) -> tuple[np.ndarray, np.ndarray]:
    """Outcome bits as a (rows, bits) uint8 matrix plus per-row weights."""
    items = sorted(table.weights().items())
    if not items:
        return np.zeros((0, 0), dtype=np.uint8), np.zeros(0)
    keys = [k for k, _ in items]
    bits = np.frombuffer("".join(keys).encode(), dtype=np.uint8).reshape(len(keys), -1) - ord("0")
    return bits, np.array([w for _, w in items], dtype=float)


def counts_from_bits(bits: np.ndarray) -> dict[str, int]:
    """Histogram of outcome rows; ``bits`` has shape (shots, m)."""
    if bits.shape[0] == 0:
        return {}
    if bits.shape[1] == 0:
        return {"": int(bits.shape[0])}
    rows, counts = np.unique(bits.astype(np.uint8), axis=0, return_counts=True)
    chars = (rows + ord("0")).astype(np.uint8)
    return {row.tobytes().decode(): int(c) for row, c in zip(chars, counts)}


def tvd(a, b) -> float:
    """Total variation distance between two tables' normalized distributions."""
    pa, pb = a.probabilities(), b.probabilities()
    return 0.5 * sum(abs(pa.get(k, 0.0) - pb.get(k, 0.0)) for k in set(pa) | set(pb))
