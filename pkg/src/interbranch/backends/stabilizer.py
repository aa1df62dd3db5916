"""Stabilizer backend.

:class:`Tableau` is an Aaronson-Gottesman (CHP) tableau: rows ``0..n-1`` are
destabilizers, rows ``n..2n-1`` stabilizers, with an X block, a Z block and a
phase column.

Noisy sampling does not re-run the tableau per shot. The tableau produces one
noiseless reference sample; every shot then carries a Pauli frame that is
pushed through the same gates, picking up the sampled depolarizing errors.
The frame starts with random Z on every qubit, which leaves ``|0...0>`` alone
but, once propagated, randomizes exactly the measurement outcomes that the
stabilizer state leaves undetermined. Measured bit = reference bit XOR the
frame's X part. This is the same distribution a fresh per-shot tableau run
would give.
"""
from __future__ import annotations

import numpy as np

from ..circuit import Circuit
from .noise import IDEAL, NoiseModel, block_rng, blocks, draw_error, native_gates, readout_flips, split_code
from .results import BackendMismatchError, ShotTable, counts_from_bits


class Tableau:
    def __init__(self, n: int):
        self.n = n
        self.x = np.zeros((2 * n, n), dtype=bool)
        self.z = np.zeros((2 * n, n), dtype=bool)
        self.r = np.zeros(2 * n, dtype=bool)
        idx = np.arange(n)
        self.x[idx, idx] = True
        self.z[n + idx, idx] = True

    def h(self, q):
        self.r ^= self.x[:, q] & self.z[:, q]
        self.x[:, q], self.z[:, q] = self.z[:, q].copy(), self.x[:, q].copy()

    def x_gate(self, q):
        self.r ^= self.z[:, q]

    def z_gate(self, q):
        self.r ^= self.x[:, q]

    def cx(self, c, t):
        x, z = self.x, self.z
        self.r ^= x[:, c] & z[:, t] & ~(x[:, t] ^ z[:, c])
        x[:, t] ^= x[:, c]
        z[:, c] ^= z[:, t]

    def swap(self, a, b):
        for m in (self.x, self.z):
            m[:, [a, b]] = m[:, [b, a]]

    def apply(self, gate):
        kind, qs = gate.kind, gate.qubits
        if kind == "H":
            self.h(qs[0])
        elif kind == "X":
            self.x_gate(qs[0])
        elif kind == "CX":
            self.cx(*qs)
        elif kind == "SWAP":
            self.swap(*qs)
        else:
            raise BackendMismatchError(f"stabilizer backend cannot apply {kind}")

    def _rowsum_into(self, targets, src_x, src_z, src_r):
        """Multiply Pauli row ``src`` into each target row, tracking the sign."""
        tx, tz = self.x[targets], self.z[targets]
        sx, sz = src_x[None, :], src_z[None, :]
        # exponent of i contributed per qubit by src * target (CHP g-function)
        g = np.where(sx & sz, tz.astype(int) - tx.astype(int),
                     np.where(sx, tz * (2 * tx.astype(int) - 1),
                              np.where(sz, tx * (1 - 2 * tz.astype(int)), 0)))
        total = 2 * self.r[targets].astype(int) + 2 * int(src_r) + g.sum(axis=1)
        self.r[targets] = (total % 4) == 2
        self.x[targets] = tx ^ sx
        self.z[targets] = tz ^ sz

    def is_deterministic(self, q) -> bool:
        return not self.x[self.n:, q].any()

    def measure(self, q, rng: np.random.Generator | None = None, forced: int | None = None) -> int:
        n = self.n
        hits = np.flatnonzero(self.x[n:, q])
        if hits.size:
            p = n + hits[0]
            others = np.flatnonzero(self.x[:, q])
            others = others[others != p]
            if others.size:
                self._rowsum_into(others, self.x[p].copy(), self.z[p].copy(), self.r[p])
            self.x[p - n], self.z[p - n], self.r[p - n] = self.x[p], self.z[p], self.r[p]
            self.x[p] = False
            self.z[p] = False
            self.z[p, q] = True
            if forced is not None:
                outcome = int(forced)
            else:
                outcome = int((rng or np.random.default_rng()).integers(2))
            self.r[p] = bool(outcome)
            return outcome
        # deterministic: accumulate the stabilizers flagged by destabilizer X bits
        acc_x = np.zeros(n, dtype=bool)
        acc_z = np.zeros(n, dtype=bool)
        acc_r = 0
        for i in np.flatnonzero(self.x[:n, q]):
            sx, sz = self.x[n + i], self.z[n + i]
            g = np.where(sx & sz, acc_z.astype(int) - acc_x.astype(int),
                         np.where(sx, acc_z * (2 * acc_x.astype(int) - 1),
                                  np.where(sz, acc_x * (1 - 2 * acc_z.astype(int)), 0)))
            acc_r = ((2 * acc_r + 2 * int(self.r[n + i]) + int(g.sum())) % 4) // 2
            acc_x ^= sx
            acc_z ^= sz
        return int(acc_r)


def reference_sample(circuit: Circuit, rng: np.random.Generator | None = None) -> np.ndarray:
    """One noiseless outcome for every qubit of ``circuit``.

    Undetermined outcomes are drawn from ``rng``, or fixed to 0 if it is None.
    """
    if not circuit.clifford_only:
        raise BackendMismatchError("circuit contains non-Clifford gates; use the statevector backend")
    tab = Tableau(circuit.width)
    for g in circuit.gates:
        tab.apply(g)
    return np.array([tab.measure(q, rng, forced=None if rng else 0) for q in range(circuit.width)],
                    dtype=bool)


def _propagate(gate, fx, fz):
    kind, qs = gate.kind, gate.qubits
    if kind == "H":
        q = qs[0]
        fx[q], fz[q] = fz[q].copy(), fx[q].copy()
    elif kind == "CX":
        c, t = qs
        fx[t] ^= fx[c]
        fz[c] ^= fz[t]
    elif kind == "SWAP":
        a, b = qs
        fx[[a, b]] = fx[[b, a]]
        fz[[a, b]] = fz[[b, a]]
    # X only flips a sign, which a Pauli frame ignores


def _frame_block(gates, width, measure, ref, noise, shots, rng):
    fx = np.zeros((width, shots), dtype=bool)
    fz = rng.random((width, shots)) < 0.5
    for g in gates:
        _propagate(g, fx, fz)
        err = draw_error(rng, g, noise, shots)
        if err is None:
            continue
        hit, codes = err
        for q, (ex, ez) in zip(g.qubits, split_code(codes, len(g.qubits))):
            fx[q, hit] ^= ex
            fz[q, hit] ^= ez
    bits = (fx[measure] ^ ref[measure, None]).T
    flips = readout_flips(rng, noise, shots, len(measure))
    if flips is not None:
        bits ^= flips
    return bits


def sample_stabilizer(circuit: Circuit, noise: NoiseModel = IDEAL, shots: int = 4096,
                      rng_seed: int = 0) -> ShotTable:
    if not circuit.clifford_only:
        raise BackendMismatchError("circuit contains non-Clifford gates; use the statevector backend")
    if shots < 0:
        raise ValueError("shots must be >= 0")
    measure = np.array(circuit.measure, dtype=int)
    ref = reference_sample(circuit)
    gates = native_gates(circuit.gates)
    counts: dict[str, int] = {}
    for b, size in blocks(shots):
        bits = _frame_block(gates, circuit.width, measure, ref, noise, size, block_rng(rng_seed, b))
        for key, c in counts_from_bits(bits).items():
            counts[key] = counts.get(key, 0) + c
    return ShotTable(dict(sorted(counts.items())), shots, circuit.registers)
