"""Independent reference computations used by the tests.

Nothing here imports simulator internals: states are built from full
Kronecker-product matrices, and noise is handled by enumerating every error
pattern with its probability.
"""
import itertools
import math

import numpy as np

from interbranch.circuit import CX, RY, SWAP, Circuit, H, X

I2 = np.eye(2)
PX = np.array([[0.0, 1.0], [1.0, 0.0]])
PZ = np.diag([1.0, -1.0])
PY = np.array([[0.0, -1j], [1j, 0.0]])
PAULI = {0: I2, 1: PX, 2: PZ, 3: PY}  # bit0 = X part, bit1 = Z part
HAD = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2)


def embed(ops: dict, width: int) -> np.ndarray:
    """Kronecker product with ``ops[q]`` on qubit q (qubit 0 most significant)."""
    out = np.array([[1.0 + 0j]])
    for q in range(width):
        out = np.kron(out, ops.get(q, I2))
    return out


def gate_matrix(g, width):
    if g.kind == "X":
        return embed({g.qubits[0]: PX}, width)
    if g.kind == "H":
        return embed({g.qubits[0]: HAD}, width)
    if g.kind == "RY":
        c, s = math.cos(g.angle / 2), math.sin(g.angle / 2)
        return embed({g.qubits[0]: np.array([[c, -s], [s, c]])}, width)
    dim = 2 ** width
    out = np.zeros((dim, dim))
    for i in range(dim):
        bits = [(i >> (width - 1 - q)) & 1 for q in range(width)]
        a, b = g.qubits
        if g.kind == "CX":
            bits[b] ^= bits[a]
        else:
            bits[a], bits[b] = bits[b], bits[a]
        j = int("".join(map(str, bits)), 2)
        out[j, i] = 1.0
    return out


def final_state(circuit: Circuit, errors=()) -> np.ndarray:
    """State after the circuit; ``errors`` maps op index -> packed Pauli code (native ops)."""
    errors = dict(errors)
    psi = np.zeros(2 ** circuit.width, dtype=complex)
    psi[0] = 1.0
    for idx, g in enumerate(native(circuit.gates)):
        psi = gate_matrix(g, circuit.width) @ psi
        code = errors.get(idx, 0)
        if code:
            n = len(g.qubits)
            ops = {q: PAULI[(code >> (2 * (n - 1 - j))) & 3] for j, q in enumerate(g.qubits)}
            psi = embed(ops, circuit.width) @ psi
    return psi


def native(gates):
    out = []
    for g in gates:
        if g.kind == "SWAP":
            a, b = g.qubits
            out += [CX(a, b), CX(b, a), CX(a, b)]
        else:
            out.append(g)
    return out


def outcome_dist(psi, width, measure) -> dict:
    probs = np.abs(psi) ** 2
    out = {}
    for i, p in enumerate(probs):
        if p < 1e-15:
            continue
        bits = format(i, f"0{width}b")
        key = "".join(bits[q] for q in measure)
        out[key] = out.get(key, 0.0) + p
    return out


def exact(circuit: Circuit) -> dict:
    return outcome_dist(final_state(circuit), circuit.width, circuit.measure)


def exact_noisy(circuit: Circuit, p1: float, p2: float, readout: float) -> dict:
    """Noisy outcome distribution by enumerating all error patterns (tiny circuits only)."""
    ops = native(circuit.gates)
    choices = []
    for g in ops:
        if g.is_two_qubit:
            choices.append([(0, 1 - p2)] + [(c, p2 / 15) for c in range(1, 16)])
        else:
            choices.append([(0, 1 - p1)] + [(c, p1 / 3) for c in range(1, 4)])
    total: dict = {}
    for combo in itertools.product(*choices):
        weight = math.prod(w for _, w in combo)
        if weight == 0:
            continue
        errs = {i: c for i, (c, _) in enumerate(combo) if c}
        for key, p in outcome_dist(final_state(circuit, errs), circuit.width, circuit.measure).items():
            total[key] = total.get(key, 0.0) + weight * p
    m = len(circuit.measure)
    noisy: dict = {}
    for key, p in total.items():
        for flips in itertools.product((0, 1), repeat=m):
            k = sum(flips)
            w = (readout ** k) * ((1 - readout) ** (m - k))
            if w == 0:
                continue
            out = "".join(str(int(b) ^ f) for b, f in zip(key, flips))
            noisy[out] = noisy.get(out, 0.0) + p * w
    return noisy


def random_clifford(seed: int, max_width: int = 12, max_h: int | None = 1, gate_factor: int = 2,
                   with_ry: bool = False) -> Circuit:
    """Seeded random circuit over {X, H, CX, SWAP} (plus RY if requested).

    Width is uniform in [2, max_width] and the gate count uniform in
    [w, gate_factor * w]. Capping the number of H gates keeps the ideal support
    small, so the shot-noise floor of a 100k-shot empirical comparison stays
    well under 0.02 even at 12 qubits.
    """
    rng = np.random.default_rng(seed)
    w = int(rng.integers(2, max_width + 1))
    gates, n_h = [], 0
    for _ in range(int(rng.integers(w, gate_factor * w + 1))):
        u = rng.random()
        if u < 0.15 and (max_h is None or n_h < max_h):
            gates.append(H(int(rng.integers(w))))
            n_h += 1
        elif u < 0.3:
            gates.append(X(int(rng.integers(w))))
        elif u < 0.35 and with_ry:
            gates.append(RY(int(rng.integers(w)), float(rng.uniform(-math.pi, math.pi))))
        elif u < 0.9:
            a, b = rng.choice(w, 2, replace=False)
            gates.append(CX(int(a), int(b)))
        else:
            a, b = rng.choice(w, 2, replace=False)
            gates.append(SWAP(int(a), int(b)))
    return Circuit.from_gates(w, gates)


def binomial_sigma(p, n):
    return math.sqrt(max(p * (1 - p), 1e-12) / n)
