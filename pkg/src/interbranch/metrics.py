"""Transfer, erasure, branch-contrast and mutual-information statistics.

Every function accepts either a :class:`ShotTable` (counts) or an
:class:`OutcomeDistribution` (exact probabilities). Statistics that condition
on an empty branch come back as ``None`` rather than 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .backends.results import as_arrays
from .protocol import VariantSpec

FRONTIER_THRESHOLD = 0.1


class EmptyConditioning(ValueError):
    """No outcomes satisfy the requested condition."""


def _register_bits(table, register):
    regs = table.registers
    if regs is None or register not in regs:
        raise KeyError(f"table has no register {register!r}")
    return regs.bit_slice(register)


def condition(table, register: str, value):
    """Sub-table of outcomes where ``register`` reads ``value`` (int or bitstring)."""
    sl = _register_bits(table, register)
    width = sl.stop - sl.start
    want = value if isinstance(value, str) else format(int(value), f"0{width}b")
    if len(want) != width:
        raise ValueError(f"value {value!r} does not fit register {register} of size {width}")
    keep = {k: w for k, w in table.weights().items() if k[sl] == want and w > 0}
    if not keep:
        raise EmptyConditioning(f"no outcomes with {register}={want}")
    return table.restrict(keep)


def _branch(table, r: int):
    """(bits, normalized weights, raw weights) of the R=r branch, or None if empty."""
    try:
        sub = condition(table, "R", r)
    except EmptyConditioning:
        return None
    bits, w = as_arrays(sub)
    return bits, w / w.sum(), w


def transfer_metrics(table, mu: str) -> tuple[float | None, float | None]:
    """(p_all, p_bit) conditioned on R=0."""
    branch = _branch(table, 0)
    if branch is None:
        return None, None
    bits, _, raw = branch
    sl = _register_bits(table, "P")
    target = np.frombuffer(mu.encode(), dtype=np.uint8) - ord("0")
    match = bits[:, sl] == target
    # one division each on raw weights keeps p_all <= p_bit exact for counts
    total = raw.sum()
    p_all = float(raw @ match.all(axis=1)) / total
    p_bit = float(raw @ match.sum(axis=1)) / (len(mu) * total)
    return min(p_all, 1.0), min(p_bit, 1.0)


def erasure_metric(table, variant: VariantSpec | str = "protocol", literal: bool = False) -> float | None:
    """Pr(M = 0...0) in the message-bearing branch.

    With ``literal=True`` the conditioning branch is always R=1, whatever the
    variant.
    """
    if isinstance(variant, str):
        variant = VariantSpec(variant)
    r = 1 if literal else variant.message_branch
    branch = _branch(table, r)
    if branch is None:
        return None
    bits, w, _ = branch
    sl = _register_bits(table, "M")
    return min(float(w @ (bits[:, sl] == 0).all(axis=1)), 1.0)


def branch_contrast(table, mu: str) -> float | None:
    """Mean over active bits of Pr(P_i=1 | R=0) - Pr(P_i=1 | R=1)."""
    active = [i for i, b in enumerate(mu) if b == "1"]
    if not active:
        return None
    b0, b1 = _branch(table, 0), _branch(table, 1)
    if b0 is None or b1 is None:
        return None
    sl = _register_bits(table, "P")
    cols = [sl.start + i for i in active]
    ones0 = b0[1] @ b0[0][:, cols]
    ones1 = b1[1] @ b1[0][:, cols]
    return float(np.mean(ones0 - ones1))


def _plugin_mi(joint: np.ndarray) -> float:
    """Plug-in mutual information (bits) of a 2x2 joint, 0 log 0 = 0."""
    joint = joint / joint.sum()
    pr, pb = joint.sum(axis=1), joint.sum(axis=0)
    mi = 0.0
    for r in range(2):
        for b in range(2):
            p = joint[r, b]
            if p > 0:
                mi += p * math.log2(p / (pr[r] * pb[b]))
    return min(max(mi, 0.0), 1.0)


def mutual_information(table, mu: str) -> tuple[list[float] | None, float | None]:
    """Per-active-bit I(R; P_i) and its mean."""
    active = [i for i, b in enumerate(mu) if b == "1"]
    bits, w = as_arrays(table)
    if not active or w.sum() <= 0:
        return None, None
    r_col = _register_bits(table, "R").start
    p_start = _register_bits(table, "P").start
    r = bits[:, r_col]
    values = []
    for i in active:
        b = bits[:, p_start + i]
        joint = np.array([[w[(r == rv) & (b == bv)].sum() for bv in (0, 1)] for rv in (0, 1)])
        values.append(_plugin_mi(joint))
    return values, float(np.mean(values))


def branch_mass(table, r: int) -> float:
    """Total weight (shots, or probability) of outcomes with R = r."""
    bits, w = as_arrays(table)
    if not w.size:
        return 0.0
    return float(w[bits[:, _register_bits(table, "R").start] == r].sum())


def branch_weight(table, r: int) -> float:
    """Pr(R = r) over the whole table."""
    total = sum(table.weights().values())
    return branch_mass(table, r) / total if total > 0 else float("nan")


def frontier(series: dict[int, float | None], threshold: float = FRONTIER_THRESHOLD) -> int | None:
    """Largest n whose mean p_all reaches ``threshold``; None if none does."""
    if not series:
        raise ValueError("empty series")
    passing = [n for n, v in series.items() if v is not None and v >= threshold]
    return max(passing) if passing else None


@dataclass
class MetricsRecord:
    p_all: float | None
    p_bit: float | None
    p_erase: float | None
    p_erase_r1: float | None
    delta: float | None
    mi_per_bit: list[float] | None
    mi_mean: float | None
    p_r0: float
    p_msg_branch: float
    n_r0: float
    n_r1: float
    undefined: list[str] = field(default_factory=list)


def compute_all(table, mu: str, variant: VariantSpec) -> MetricsRecord:
    p_all, p_bit = transfer_metrics(table, mu)
    mi_bits, mi_mean = mutual_information(table, mu)
    p_r0 = branch_weight(table, 0)
    rec = MetricsRecord(
        p_all=p_all,
        p_bit=p_bit,
        p_erase=erasure_metric(table, variant),
        p_erase_r1=erasure_metric(table, variant, literal=True),
        delta=branch_contrast(table, mu),
        mi_per_bit=mi_bits,
        mi_mean=mi_mean,
        p_r0=p_r0,
        p_msg_branch=p_r0 if variant.message_branch == 0 else 1.0 - p_r0,
        n_r0=branch_mass(table, 0),
        n_r1=branch_mass(table, 1),
    )
    rec.undefined = [name for name in ("p_all", "p_bit", "p_erase", "p_erase_r1", "delta", "mi_mean")
                     if getattr(rec, name) is None]
    return rec
