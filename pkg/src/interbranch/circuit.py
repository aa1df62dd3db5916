"""Gate-level circuit representation with named registers.

Circuits are immutable: builders accumulate a gate list and freeze it into a
:class:`Circuit`. Gate order is the only structure stored; depth is recomputed
on demand by as-soon-as-possible layering.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

ONE_QUBIT_KINDS = ("X", "H", "RY")
TWO_QUBIT_KINDS = ("CX", "SWAP")
CLIFFORD_KINDS = ("X", "H", "CX", "SWAP")

# Register roles, in canonical qubit order. S is the unmeasured friend-internal register.
ROLES = ("Q", "R", "F", "M", "P", "S")
MEASURED_ROLES = ("Q", "R", "F", "M", "P")

SERIAL_HEADER = "# interbranch-circuit v1"


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind in ONE_QUBIT_KINDS:
            arity = 1
        elif self.kind in TWO_QUBIT_KINDS:
            arity = 2
        else:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} takes {arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != arity:
            raise ValueError(f"repeated qubit in {self.kind}{self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise ValueError(f"negative qubit index in {self.kind}{self.qubits}")
        if self.kind == "RY":
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError("RY needs a finite angle")
        elif self.angle is not None:
            raise ValueError(f"{self.kind} takes no angle")

    @property
    def is_two_qubit(self) -> bool:
        return self.kind in TWO_QUBIT_KINDS

    def relabel(self, mapping: Sequence[int]) -> "Gate":
        return Gate(self.kind, tuple(mapping[q] for q in self.qubits), self.angle)

    def __str__(self):
        args = " ".join(str(q) for q in self.qubits)
        if self.kind == "RY":
            return f"RY {args} {self.angle!r}"
        return f"{self.kind} {args}"


def X(q):
    return Gate("X", (q,))


def H(q):
    return Gate("H", (q,))


def RY(q, angle):
    return Gate("RY", (q,), float(angle))


def CX(control, target):
    return Gate("CX", (control, target))


def SWAP(a, b):
    return Gate("SWAP", (a, b))


@dataclass(frozen=True)
class RegisterMap:
    """Named contiguous qubit ranges: ``{role: (start, size)}``.

    Ranges are disjoint and tile ``[0, width)``. Bits of a measurement outcome
    string are laid out in the order of :meth:`measured_qubits`, so
    :meth:`bit_slice` gives a register's position inside an outcome string.
    """

    ranges: tuple[tuple[str, int, int], ...]

    @classmethod
    def protocol(cls, n: int, k: int = 0) -> "RegisterMap":
        if n < 1:
            raise ValueError("message size n must be >= 1")
        if k < 0:
            raise ValueError("internal register size k must be >= 0")
        sizes = {"Q": 1, "R": 1, "F": 1, "M": n, "P": n, "S": k}
        out, start = [], 0
        for role in ROLES:
            if sizes[role] == 0:
                continue
            out.append((role, start, sizes[role]))
            start += sizes[role]
        return cls(tuple(out))

    def __post_init__(self):
        seen = set()
        pos = 0
        for name, start, size in self.ranges:
            if name in seen:
                raise ValueError(f"duplicate register {name!r}")
            seen.add(name)
            if start != pos or size < 1:
                raise ValueError("register ranges must be contiguous and non-empty")
            pos += size

    @property
    def width(self) -> int:
        return sum(size for _, _, size in self.ranges)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _, _ in self.ranges)

    def __contains__(self, name):
        return name in self.names

    def size(self, name: str) -> int:
        return self._lookup(name)[1]

    def qubits(self, name: str) -> list[int]:
        start, size = self._lookup(name)
        return list(range(start, start + size))

    def qubit(self, name: str, index: int = 0) -> int:
        start, size = self._lookup(name)
        if not 0 <= index < size:
            raise IndexError(f"{name}[{index}] out of range (size {size})")
        return start + index

    def measured_qubits(self) -> list[int]:
        out = []
        for name, start, size in self.ranges:
            if name in MEASURED_ROLES:
                out.extend(range(start, start + size))
        return out

    def bit_slice(self, name: str) -> slice:
        if name not in MEASURED_ROLES:
            raise KeyError(f"register {name!r} is not measured")
        offset = 0
        for reg, _, size in self.ranges:
            if reg == name:
                return slice(offset, offset + size)
            if reg in MEASURED_ROLES:
                offset += size
        raise KeyError(f"no register named {name!r}")

    def _lookup(self, name):
        for reg, start, size in self.ranges:
            if reg == name:
                return start, size
        raise KeyError(f"no register named {name!r}")


@dataclass(frozen=True)
class Circuit:
    """An ordered gate list on ``width`` qubits.

    ``measure`` lists the qubits read out at the end, in outcome-bit order.
    For a logical circuit that is ``registers.measured_qubits()``; a routed
    circuit keeps the logical ``registers`` but measures the physical qubits
    holding each logical qubit at the end.
    """

    width: int
    gates: tuple[Gate, ...]
    registers: RegisterMap | None = None
    measure: tuple[int, ...] = ()
    clifford_only: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "measure", tuple(self.measure))
        for g in self.gates:
            if max(g.qubits) >= self.width:
                raise ValueError(f"gate {g} out of range for width {self.width}")
        if len(set(self.measure)) != len(self.measure):
            raise ValueError("measured qubits must be distinct")
        if any(not 0 <= q < self.width for q in self.measure):
            raise ValueError("measured qubit out of range")
        if self.registers is not None and len(self.measure) != len(self.registers.measured_qubits()):
            raise ValueError("measure list does not match the measured registers")
        object.__setattr__(self, "clifford_only", all(g.kind in CLIFFORD_KINDS for g in self.gates))

    @classmethod
    def from_gates(cls, width: int, gates: Iterable[Gate], registers: RegisterMap | None = None,
                   measure: Sequence[int] | None = None) -> "Circuit":
        if measure is None:
            measure = registers.measured_qubits() if registers is not None else range(width)
        return cls(width, tuple(gates), registers, tuple(measure))

    def __len__(self):
        return len(self.gates)

    def replace_gates(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.width, tuple(gates), self.registers, self.measure)

    def count(self, kind: str) -> int:
        return sum(1 for g in self.gates if g.kind == kind)

    def active_qubits(self) -> list[int]:
        """Qubits touched by any gate, ascending."""
        used = set()
        for g in self.gates:
            used.update(g.qubits)
        return sorted(used)


def two_qubit_count(circuit: Circuit, mode: str = "native") -> int:
    """Number of two-qubit gates; ``native`` mode counts a SWAP as three CX."""
    if mode not in ("native", "gate"):
        raise ValueError(f"mode must be 'native' or 'gate', got {mode!r}")
    swap_cost = 3 if mode == "native" else 1
    return sum(swap_cost if g.kind == "SWAP" else 1 for g in circuit.gates if g.is_two_qubit)


def two_qubit_depth(circuit: Circuit, mode: str = "native") -> int:
    """Longest chain of two-qubit gates under ASAP layering.

    One-qubit gates occupy no layer. In ``native`` mode a SWAP takes three
    consecutive layers on its pair (its CX decomposition).
    """
    if mode not in ("native", "gate"):
        raise ValueError(f"mode must be 'native' or 'gate', got {mode!r}")
    level = [0] * circuit.width
    depth = 0
    for g in circuit.gates:
        if not g.is_two_qubit:
            continue
        a, b = g.qubits
        layer = max(level[a], level[b]) + (3 if g.kind == "SWAP" and mode == "native" else 1)
        level[a] = level[b] = layer
        depth = max(depth, layer)
    return depth


def dumps(circuit: Circuit) -> str:
    lines = [SERIAL_HEADER, f"width {circuit.width}"]
    if circuit.registers is not None:
        for name, start, size in circuit.registers.ranges:
            lines.append(f"register {name} {start} {size}")
    lines.append("measure " + " ".join(str(q) for q in circuit.measure))
    lines.append("gates")
    lines.extend(str(g) for g in circuit.gates)
    return "\n".join(lines) + "\n"


def loads(text: str) -> Circuit:
    width = None
    ranges = []
    measure: list[int] = []
    gates = []
    in_gates = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if in_gates:
            kind = parts[0]
            if kind == "RY":
                gates.append(RY(int(parts[1]), float(parts[2])))
            else:
                gates.append(Gate(kind, tuple(int(p) for p in parts[1:])))
        elif parts[0] == "width":
            width = int(parts[1])
        elif parts[0] == "register":
            ranges.append((parts[1], int(parts[2]), int(parts[3])))
        elif parts[0] == "measure":
            measure = [int(p) for p in parts[1:]]
        elif parts[0] == "gates":
            in_gates = True
        else:
            raise ValueError(f"unrecognized line: {raw!r}")
    if width is None:
        raise ValueError("missing width line")
    registers = RegisterMap(tuple(ranges)) if ranges else None
    return Circuit(width, tuple(gates), registers, tuple(measure))
