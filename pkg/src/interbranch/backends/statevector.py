"""Dense statevector backend.

Only the qubits a circuit actually touches are simulated, so a small logical
circuit routed onto a large coupling map stays cheap. All supported gates and
Pauli errors are real up to a global phase, so states are kept in float64.
States carry a leading batch axis; qubit ``q`` lives on axis ``q + 1``.

Noisy sampling first draws, block by block, each shot's Pauli error pattern,
a uniform for its outcome and its readout flips. Distinct error patterns are
then simulated in batches that share the noiseless prefix up to their first
error, and each shot's outcome is read off its trajectory's cumulative Born
distribution.
"""
from __future__ import annotations

import math

import numpy as np

from ..circuit import Circuit
from .noise import IDEAL, NoiseModel, block_rng, blocks, draw_error, native_gates, readout_flips
from .results import CapacityError, OutcomeDistribution, ShotTable, counts_from_bits

DEFAULT_LIMIT = 24
_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0)


def _ry(angle):
    c, s = math.cos(angle / 2), math.sin(angle / 2)
    return np.array([[c, -s], [s, c]])


def _apply_1q(psi, u, q):
    return np.moveaxis(np.tensordot(u, psi, axes=([1], [q + 1])), 0, q + 1)


def _apply_x(psi, q):
    return np.flip(psi, axis=q + 1)


def _apply_z(psi, q):
    psi = psi.copy()
    idx = [slice(None)] * psi.ndim
    idx[q + 1] = 1
    psi[tuple(idx)] *= -1.0
    return psi


def _apply_cx(psi, c, t):
    psi = psi.copy()
    idx = [slice(None)] * psi.ndim
    idx[c + 1] = 1
    sub = psi[tuple(idx)]
    psi[tuple(idx)] = np.flip(sub, axis=t + 1 if t < c else t)
    return psi


def _apply_gate(psi, kind, qs, angle=None):
    if kind == "H":
        return _apply_1q(psi, _H, qs[0])
    if kind == "RY":
        return _apply_1q(psi, _ry(angle), qs[0])
    if kind == "X":
        return _apply_x(psi, qs[0])
    if kind == "CX":
        return _apply_cx(psi, *qs)
    if kind == "SWAP":
        return np.swapaxes(psi, qs[0] + 1, qs[1] + 1)
    raise ValueError(f"unsupported gate {kind}")


def _apply_pauli(psi, q, code):
    # code: bit0 = X, bit1 = Z; Y = XZ up to a global phase
    if code & 2:
        psi = _apply_z(psi, q)
    if code & 1:
        psi = _apply_x(psi, q)
    return psi


class _Compiled:
    """A circuit relabelled onto its active qubits."""

    def __init__(self, circuit: Circuit, limit: int):
        active = circuit.active_qubits()
        if len(active) > limit:
            raise CapacityError(len(active), limit)
        index = {q: i for i, q in enumerate(active)}
        self.width = len(active)
        self.source = native_gates(circuit.gates)
        self.ops = [(g.kind, tuple(index[q] for q in g.qubits), g.angle) for g in self.source]
        # measured qubits no gate touches always read 0 before readout error
        self.slots = [j for j, q in enumerate(circuit.measure) if q in index]
        self.measure = [index[circuit.measure[j]] for j in self.slots]
        self.m = len(circuit.measure)
        measured = set(self.measure)
        self.unmeasured = tuple(i + 1 for i in range(self.width) if i not in measured)

    def bits(self, outcome: np.ndarray) -> np.ndarray:
        """Full measured-bit rows from outcome indices over the simulated measured qubits."""
        k = len(self.measure)
        out = np.zeros((outcome.size, self.m), dtype=bool)
        out[:, self.slots] = (outcome[:, None] >> np.arange(k - 1, -1, -1)) & 1
        return out

    def initial(self):
        psi = np.zeros((1,) + (2,) * self.width)
        psi[(0,) * (self.width + 1)] = 1.0
        return psi

    def marginal(self, psi) -> np.ndarray:
        """Born probabilities over measured qubits, shape (batch, 2**m), outcome-bit order."""
        probs = psi * psi
        if self.unmeasured:
            probs = probs.sum(axis=self.unmeasured)
        order = sorted(self.measure)
        perm = [0] + [order.index(q) + 1 for q in self.measure]
        return np.transpose(probs, perm).reshape(probs.shape[0], -1)


def run_exact(circuit: Circuit, limit: int = DEFAULT_LIMIT) -> OutcomeDistribution:
    comp = _Compiled(circuit, limit)
    psi = comp.initial()
    for kind, qs, angle in comp.ops:
        psi = _apply_gate(psi, kind, qs, angle)
    probs = comp.marginal(psi)[0]
    keep = np.flatnonzero(probs > 1e-15)
    mass = probs[keep].sum()
    rows = comp.bits(keep)
    out = {"".join("1" if b else "0" for b in row): float(probs[i] / mass) for i, row in zip(keep, rows)}
    return OutcomeDistribution(out, circuit.registers)


def _simulate_group(comp, prefix, start, patterns):
    """Final states for patterns whose first error is at op ``start``."""
    psi = np.repeat(prefix[start + 1], len(patterns), axis=0)
    for g in range(start, len(comp.ops)):
        kind, qs, angle = comp.ops[g]
        if g > start:
            psi = _apply_gate(psi, kind, qs, angle)
        codes = patterns[:, g]
        for code in np.unique(codes[codes != 0]):
            rows = np.flatnonzero(codes == code)
            sub = psi[rows]
            for j, q in enumerate(qs):
                sub = _apply_pauli(sub, q, (int(code) >> (2 * (len(qs) - 1 - j))) & 3)
            psi[rows] = sub
    return psi


def sample_statevector(circuit: Circuit, noise: NoiseModel = IDEAL, shots: int = 4096,
                       rng_seed: int = 0, limit: int = DEFAULT_LIMIT,
                       batch: int = 256) -> ShotTable:
    if shots < 0:
        raise ValueError("shots must be >= 0")
    comp = _Compiled(circuit, limit)
    m = comp.m
    n_ops = len(comp.ops)
    if shots == 0:
        return ShotTable({}, 0, circuit.registers)

    patterns, uniforms, flips = [], [], []
    for b, size in blocks(shots):
        rng = block_rng(rng_seed, b)
        pat = np.zeros((size, n_ops), dtype=np.int8)
        for g, src in enumerate(comp.source):
            err = draw_error(rng, src, noise, size)
            if err is not None:
                hit, codes = err
                pat[hit, g] = codes
        patterns.append(pat)
        uniforms.append(rng.random(size))
        f = readout_flips(rng, noise, size, m)
        flips.append(f if f is not None else np.zeros((size, m), dtype=bool))
    patterns = np.concatenate(patterns)
    uniforms = np.concatenate(uniforms)
    flips = np.concatenate(flips)

    prefix = [comp.initial()]
    for kind, qs, angle in comp.ops:
        prefix.append(_apply_gate(prefix[-1], kind, qs, angle))

    uniq, inverse = np.unique(patterns, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    members = np.argsort(inverse, kind="stable")
    bounds = np.searchsorted(inverse[members], np.arange(uniq.shape[0] + 1))
    has_err = uniq.any(axis=1)
    first = np.where(has_err, np.argmax(uniq != 0, axis=1), n_ops) if n_ops else np.zeros(len(uniq), int)

    outcome = np.empty(shots, dtype=np.int64)

    def assign(pattern_ids, probs):
        cdf = np.cumsum(probs, axis=1)
        for pid, row in zip(pattern_ids, cdf):
            shots_here = members[bounds[pid]:bounds[pid + 1]]
            idx = np.searchsorted(row, uniforms[shots_here] * row[-1], side="right")
            outcome[shots_here] = np.minimum(idx, row.size - 1)

    clean = np.flatnonzero(~has_err)
    if clean.size:
        assign(clean, comp.marginal(prefix[n_ops]))
    for start in np.unique(first[has_err]):
        ids = np.flatnonzero(has_err & (first == start))
        for chunk in range(0, ids.size, batch):
            part = ids[chunk:chunk + batch]
            assign(part, comp.marginal(_simulate_group(comp, prefix, int(start), uniq[part])))

    bits = comp.bits(outcome) ^ flips
    return ShotTable(dict(sorted(counts_from_bits(bits).items())), shots, circuit.registers)
