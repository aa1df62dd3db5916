"""Message-transfer circuit family: protocol, controls, cousins and amplitude variants."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import CX, RY, Circuit, H, RegisterMap, X

FAMILIES = ("sparse", "half", "dense", "explicit")
VARIANTS = ("protocol", "no_swap", "no_uncompute")


@dataclass(frozen=True)
class MessageSpec:
    family: str
    mu: str

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown message family {self.family!r}")
        if not self.mu or set(self.mu) - {"0", "1"}:
            raise ValueError(f"mu must be a non-empty bitstring, got {self.mu!r}")
        n = len(self.mu)
        if self.family == "sparse" and self.mu != "1" + "0" * (n - 1):
            raise ValueError("sparse message must be 10...0")
        if self.family == "dense" and self.mu != "1" * n:
            raise ValueError("dense message must be 11...1")
        if self.family == "half" and self.weight != n // 2:
            raise ValueError(f"half message must have weight {n // 2}")

    @property
    def n(self) -> int:
        return len(self.mu)

    @property
    def weight(self) -> int:
        return self.mu.count("1")

    @property
    def active(self) -> list[int]:
        return [i for i, b in enumerate(self.mu) if b == "1"]

    @property
    def hex(self) -> str:
        return format(int(self.mu, 2), "x").zfill((self.n + 3) // 4)

    @classmethod
    def from_hex(cls, family: str, n: int, digits: str) -> "MessageSpec":
        return cls(family, format(int(digits, 16), "b").zfill(n))


@dataclass(frozen=True)
class VariantSpec:
    kind: str = "protocol"
    amplitude_p0: float | None = None
    cousins: tuple[int, int] | None = None  # (k, d)

    def __post_init__(self):
        if self.kind not in VARIANTS:
            raise ValueError(f"unknown variant {self.kind!r}")
        if self.amplitude_p0 is not None and not 0.0 <= self.amplitude_p0 <= 1.0:
            raise ValueError("amplitude_p0 must lie in [0, 1]")
        if self.cousins is not None:
            k, d = self.cousins
            if k < 0 or not 0 <= d <= k:
                raise ValueError(f"cousins needs 0 <= d <= k, got k={k}, d={d}")

    @property
    def k(self) -> int:
        return self.cousins[0] if self.cousins else 0

    @property
    def d(self) -> int:
        return self.cousins[1] if self.cousins else 0

    @property
    def message_branch(self) -> int:
        """Branch label (R value) carrying the written message at the end of the circuit."""
        return 1 if self.kind == "no_swap" else 0


def generate_message(family: str, n: int, rng_seed: int | None = None) -> MessageSpec:
    """Draw a message of the given family. Only ``half`` consumes randomness."""
    if n < 1:
        raise ValueError("message size n must be >= 1")
    if family == "sparse":
        return MessageSpec("sparse", "1" + "0" * (n - 1))
    if family == "dense":
        return MessageSpec("dense", "1" * n)
    if family == "half":
        rng = np.random.default_rng(rng_seed)
        picked = set(rng.choice(n, size=n // 2, replace=False).tolist())
        return MessageSpec("half", "".join("1" if i in picked else "0" for i in range(n)))
    raise ValueError(f"cannot generate family {family!r}")


def prep_angle(p0: float) -> float:
    """RY angle giving Pr(Q=0) = p0."""
    return 2.0 * math.acos(math.sqrt(p0))


def build(message: MessageSpec, variant: VariantSpec = VariantSpec()) -> Circuit:
    n = message.n
    regs = RegisterMap.protocol(n, variant.k)
    q, r, f = regs.qubit("Q"), regs.qubit("R"), regs.qubit("F")
    m, p = regs.qubits("M"), regs.qubits("P")
    s = regs.qubits("S") if variant.k else []
    divergent = s[: variant.d]

    gates = [H(q) if variant.amplitude_p0 is None else RY(q, prep_angle(variant.amplitude_p0))]
    gates += [CX(q, f), CX(f, r)]
    gates += [CX(r, sj) for sj in divergent]
    gates += [CX(r, m[i]) for i in message.active]
    gates += [CX(m[i], p[i]) for i in range(n)]
    if variant.kind != "no_uncompute":
        gates += [CX(p[i], m[i]) for i in range(n)]
    if variant.kind != "no_swap":
        gates += [X(q), X(r), X(f)]
        gates += [X(sj) for sj in divergent]
    return Circuit.from_gates(regs.width, gates, regs)
