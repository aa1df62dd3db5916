from .noise import IDEAL, PRESETS, NoiseModel
from .results import (
    BackendMismatchError,
    CapacityError,
    OutcomeDistribution,
    ShotTable,
    tvd,
)
from .stabilizer import Tableau, sample_stabilizer
from .statevector import DEFAULT_LIMIT, run_exact, sample_statevector


def sample(circuit, noise=IDEAL, shots=4096, rng_seed=0, limit=DEFAULT_LIMIT):
    """Stabilizer backend for Clifford circuits, statevector otherwise."""
    if circuit.clifford_only:
        return sample_stabilizer(circuit, noise, shots, rng_seed)
    return sample_statevector(circuit, noise, shots, rng_seed, limit)


__all__ = [
    "BackendMismatchError", "CapacityError", "DEFAULT_LIMIT", "IDEAL", "NoiseModel",
    "OutcomeDistribution", "PRESETS", "ShotTable", "Tableau", "run_exact", "sample",
    "sample_stabilizer", "sample_statevector", "tvd",
]
