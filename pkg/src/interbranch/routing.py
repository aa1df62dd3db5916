"""Coupling maps, initial layouts and seeded shortest-path SWAP routing."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from .backends.statevector import DEFAULT_LIMIT, run_exact
from .circuit import SWAP, Circuit, Gate

COMPILER_TAG = "seeded-shortest-path+cx-cancel"


@dataclass(frozen=True)
class CouplingMap:
    size: int
    edges: frozenset[tuple[int, int]]
    name: str = "custom"

    def __post_init__(self):
        if self.size < 1:
            raise ValueError("coupling map needs at least one vertex")
        norm = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < self.size and 0 <= v < self.size):
                raise ValueError(f"edge ({u}, {v}) references a missing vertex")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))
        adj = [[] for _ in range(self.size)]
        for u, v in sorted(norm):
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))
        if any(d < 0 for d in self._bfs(0)):
            raise ValueError(f"coupling map {self.name!r} is disconnected")
        object.__setattr__(self, "_dist", {})

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def adjacent(self, u: int, v: int) -> bool:
        return (min(u, v), max(u, v)) in self.edges

    def distances_to(self, target: int) -> list[int]:
        if target not in self._dist:
            self._dist[target] = self._bfs(target)
        return self._dist[target]

    def _bfs(self, src):
        dist = [-1] * self.size
        dist[src] = 0
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in self._adj[u]:
                if dist[v] < 0:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def line(m: int) -> CouplingMap:
    return CouplingMap(m, frozenset((i, i + 1) for i in range(m - 1)), f"line({m})")


def ring(m: int) -> CouplingMap:
    edges = {(i, (i + 1) % m) for i in range(m)} if m > 2 else {(i, i + 1) for i in range(m - 1)}
    return CouplingMap(m, frozenset(edges), f"ring({m})")


def grid(w: int, h: int) -> CouplingMap:
    edges = set()
    for r in range(h):
        for c in range(w):
            v = r * w + c
            if c + 1 < w:
                edges.add((v, v + 1))
            if r + 1 < h:
                edges.add((v, v + w))
    return CouplingMap(w * h, frozenset(edges), f"grid({w},{h})")


def all_to_all(m: int) -> CouplingMap:
    return CouplingMap(m, frozenset((i, j) for i in range(m) for j in range(i + 1, m)), f"all_to_all({m})")


def heavy_hex(rows: int, cols: int) -> CouplingMap:
    """Heavy-hexagon lattice of ``rows`` x ``cols`` hexagonal cells.

    A brick-wall honeycomb (cell vertices have degree <= 3) with one extra
    qubit inserted on every edge. Vertices are numbered row-major by position.
    """
    if rows < 1 or cols < 1:
        raise ValueError("heavy_hex needs rows, cols >= 1")
    hex_edges = set()
    for r in range(rows):
        for j in range(cols):
            c0 = r % 2 + 2 * j
            a, b = (r, c0), (r + 1, c0)
            for c in (c0, c0 + 1):
                hex_edges.add(((r, c), (r, c + 1)))
                hex_edges.add(((r + 1, c), (r + 1, c + 1)))
            hex_edges.add((a, b))
            hex_edges.add(((r, c0 + 2), (r + 1, c0 + 2)))
    # doubled coordinates so edge midpoints are integral
    points = set()
    links = []
    for (r1, c1), (r2, c2) in hex_edges:
        p, q = (2 * r1, 2 * c1), (2 * r2, 2 * c2)
        mid = (r1 + r2, c1 + c2)
        points.update((p, q, mid))
        links += [(p, mid), (mid, q)]
    index = {pt: i for i, pt in enumerate(sorted(points))}
    edges = frozenset((index[a], index[b]) for a, b in links)
    return CouplingMap(len(index), edges, f"heavy_hex({rows},{cols})")


def from_edge_list(path) -> CouplingMap:
    """Read ``u v`` pairs, one per line; ``#`` starts a comment."""
    text = Path(path).read_text()
    edges = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line_ = raw.split("#", 1)[0].strip()
        if not line_:
            continue
        parts = line_.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'u v', got {raw!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if not edges:
        raise ValueError(f"{path}: no edges")
    size = max(max(e) for e in edges) + 1
    return CouplingMap(size, frozenset(edges), f"file({Path(path).name})")


def make_coupling_map(kind: str, *args) -> CouplingMap:
    makers = {"line": line, "ring": ring, "grid": grid, "heavy_hex": heavy_hex,
              "all_to_all": all_to_all, "from_edge_list": from_edge_list}
    if kind not in makers:
        raise ValueError(f"unknown coupling map kind {kind!r}")
    return makers[kind](*args)


@dataclass(frozen=True)
class Layout:
    """``physical[l]`` is the physical qubit holding logical qubit ``l``."""

    physical: tuple[int, ...]
    size: int

    def __post_init__(self):
        if len(set(self.physical)) != len(self.physical):
            raise ValueError("layout is not injective")
        if any(not 0 <= p < self.size for p in self.physical):
            raise ValueError("layout image outside the coupling map")

    def logical_at(self) -> dict[int, int]:
        return {p: l for l, p in enumerate(self.physical)}


def _reachable(cmap: CouplingMap, start: int, blocked: set[int]) -> int:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in cmap.neighbors(u):
            if v not in seen and v not in blocked:
                seen.add(v)
                stack.append(v)
    return len(seen)


def _greedy_path(cmap: CouplingMap, start: int) -> tuple[int, ...]:
    """Greedy simple path from ``start``.

    Each step prefers the neighbour that keeps the most unvisited vertices
    reachable, then the one with fewest onward options (Warnsdorff).
    """
    path, seen = [start], {start}
    while True:
        options = [v for v in cmap.neighbors(path[-1]) if v not in seen]
        if not options:
            return tuple(path)
        nxt = min(options, key=lambda v: (-_reachable(cmap, v, seen),
                                          sum(w not in seen for w in cmap.neighbors(v)), v))
        path.append(nxt)
        seen.add(nxt)


@lru_cache(maxsize=32)
def _long_paths(cmap: CouplingMap) -> tuple[tuple[int, ...], ...]:
    """Greedy paths from every vertex, longest first."""
    return tuple(sorted((_greedy_path(cmap, v) for v in range(cmap.size)), key=lambda q: (-len(q), q)))


def _long_path(cmap: CouplingMap, need: int = 0, seed: int | None = None) -> list[int]:
    """A long simple path; with a seed, a seeded pick among those covering ``need`` vertices."""
    paths = _long_paths(cmap)
    if seed is None:
        return list(paths[0])
    fits = [q for q in paths if len(q) >= need] or [q for q in paths if len(q) == len(paths[0])]
    return list(fits[int(np.random.default_rng(seed).integers(len(fits)))])


def _distances_avoiding(cmap: CouplingMap, src: int, blocked: set[int]) -> dict[int, int]:
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in cmap.neighbors(u):
            if v not in dist and v not in blocked:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def _interleave(circuit: Circuit, cmap: CouplingMap, seed: int | None = None) -> list[int]:
    regs = circuit.registers
    width = circuit.width
    if regs is None or "M" not in regs:
        return list(range(width))
    n = regs.size("M")
    m, p = regs.qubits("M"), regs.qubits("P")
    chain = [regs.qubit("Q"), regs.qubit("F"), regs.qubit("R")]
    for i in range(n):
        chain += [m[i], p[i]]

    placed: dict[int, int] = {}
    used: set[int] = set()
    path = _long_path(cmap, len(chain), seed)
    for logical, phys in zip(chain, path):
        placed[logical] = phys
        used.add(phys)
    # pairs that did not fit on the path: any free edge, nearest to R first
    r_phys = placed.get(regs.qubit("R"), path[0])
    dist_r = cmap.distances_to(r_phys)
    for i in range(n):
        if m[i] in placed and p[i] in placed:
            continue
        if m[i] in placed or p[i] in placed:
            anchor_l, other_l = (m[i], p[i]) if m[i] in placed else (p[i], m[i])
            free = [v for v in cmap.neighbors(placed[anchor_l]) if v not in used]
            if free:
                placed[other_l] = free[0]
                used.add(free[0])
            continue
        free_edges = [(u, v) for u, v in cmap.edge_list() if u not in used and v not in used]
        if free_edges:
            u, v = min(free_edges, key=lambda e: (dist_r[e[0]] + dist_r[e[1]], e))
            placed[m[i]], placed[p[i]] = u, v
            used.update((u, v))
    # everything else (S register, stragglers) on free vertices close to R, preferring ones
    # R can reach without walking through the memory/pointer chain
    memory = {placed[q] for q in m + p if q in placed}
    around = _distances_avoiding(cmap, r_phys, memory)
    free = sorted((v for v in range(cmap.size) if v not in used),
                  key=lambda v: (around.get(v, cmap.size), dist_r[v], v))
    rest = [l for l in range(width) if l not in placed]
    for l, v in zip(rest, free):
        placed[l] = v
    return [placed[l] for l in range(width)]


def initial_layout(circuit: Circuit, cmap: CouplingMap, strategy: str = "trivial",
                   seed: int | None = None) -> Layout:
    if circuit.width > cmap.size:
        raise ValueError(f"circuit width {circuit.width} exceeds coupling map size {cmap.size}")
    if strategy == "trivial":
        phys = list(range(circuit.width))
    elif strategy == "seeded_random":
        phys = np.random.default_rng(seed).permutation(cmap.size)[: circuit.width].tolist()
    elif strategy == "interleave_pairs":
        phys = _interleave(circuit, cmap, seed)
    else:
        raise ValueError(f"unknown layout strategy {strategy!r}")
    return Layout(tuple(int(p) for p in phys), cmap.size)


@dataclass(frozen=True)
class RoutedCircuit:
    circuit: Circuit
    initial: Layout
    final: Layout
    seed: int | None
    cmap: CouplingMap

    @property
    def swap_count(self) -> int:
        return self.circuit.count("SWAP")


def route(circuit: Circuit, cmap: CouplingMap, layout: Layout, seed: int | None = None) -> RoutedCircuit:
    """Insert SWAPs so every two-qubit gate acts on a coupling-map edge.

    Gates are handled in program order. A CX on non-adjacent qubits walks its
    control along a shortest path toward the target, one SWAP per step, until
    the two are neighbours; where several next steps are equally short, the
    seeded generator picks one.
    """
    if circuit.width > cmap.size or len(layout.physical) != circuit.width:
        raise ValueError("layout does not match circuit and coupling map")
    rng = np.random.default_rng(seed)
    l2p = list(layout.physical)
    p2l = {p: l for l, p in enumerate(l2p)}
    out: list[Gate] = []

    def do_swap(a, b):
        out.append(SWAP(a, b))
        la, lb = p2l.pop(a, None), p2l.pop(b, None)
        if la is not None:
            l2p[la] = b
            p2l[b] = la
        if lb is not None:
            l2p[lb] = a
            p2l[a] = lb

    for g in circuit.gates:
        if g.is_two_qubit:
            a, b = g.qubits
            dist = cmap.distances_to(l2p[b])
            while dist[l2p[a]] > 1:
                here = l2p[a]
                steps = [v for v in cmap.neighbors(here) if dist[v] == dist[here] - 1]
                nxt = steps[0] if len(steps) == 1 else steps[int(rng.integers(len(steps)))]
                do_swap(here, nxt)
        out.append(g.relabel(l2p))

    physical = Circuit(cmap.size, tuple(out), circuit.registers, tuple(l2p[q] for q in circuit.measure))
    return RoutedCircuit(physical, layout, Layout(tuple(l2p), cmap.size), seed, cmap)


def cancel_adjacent(circuit: Circuit) -> Circuit:
    """Drop pairs of identical CX (or SWAP) gates with nothing between them on their qubits."""
    out: list[Gate | None] = []
    touched: dict[int, list[int]] = {}  # qubit -> indices into out, most recent last
    for g in circuit.gates:
        if g.is_two_qubit:
            a, b = g.qubits
            sa, sb = touched.get(a), touched.get(b)
            if sa and sb and sa[-1] == sb[-1]:
                prev = out[sa[-1]]
                same = prev.qubits == g.qubits or (g.kind == "SWAP" and set(prev.qubits) == set(g.qubits))
                if prev.kind == g.kind and same:
                    out[sa[-1]] = None
                    sa.pop()
                    sb.pop()
                    continue
        out.append(g)
        for q in g.qubits:
            touched.setdefault(q, []).append(len(out) - 1)
    return circuit.replace_gates(x for x in out if x is not None)


def compile_circuit(circuit: Circuit, cmap: CouplingMap, strategy: str = "trivial",
                    seed: int | None = None) -> RoutedCircuit:
    """Layout, route and peephole-cancel; the stand-in for a vendor transpiler."""
    layout = initial_layout(circuit, cmap, strategy, seed)
    routed = route(circuit, cmap, layout, seed)
    return RoutedCircuit(cancel_adjacent(routed.circuit), routed.initial, routed.final, seed, cmap)


def on_edges(routed: RoutedCircuit) -> bool:
    return all(routed.cmap.adjacent(*g.qubits) for g in routed.circuit.gates if g.is_two_qubit)


def verify_equivalence(original: Circuit, routed: RoutedCircuit | Circuit, limit: int = DEFAULT_LIMIT,
                       atol: float = 1e-10) -> bool:
    """Exact outcome distributions agree once the final layout is undone.

    The routed circuit measures ``final[l]`` for each logical ``l``, so its
    outcome strings are already in logical order.
    """
    phys = routed.circuit if isinstance(routed, RoutedCircuit) else routed
    a, b = run_exact(original, limit), run_exact(phys, limit)
    return all(abs(a[k] - b[k]) <= atol for k in set(a.probs) | set(b.probs))
