"""Decision-diagram state simulator.

A state is a rooted edge ``(weight, node)``. Nodes sit at a qubit level
(root = highest qubit), have a low edge (bit 0) and a high edge (bit 1), and
are hash-consed in a unique table so structurally equal sub-vectors are shared.
Levels are never skipped: every path from the root visits every qubit once,
ending at a single terminal node.

Normalization divides both outgoing weights by the one of larger magnitude
(ties go to the low edge); the factor moves to the incoming edge. Weights are
bucketed at ``1e-10`` per real/imaginary component for hash-consing.

Gates are applied directly to the state DD: descend to the target level,
filter on controls above the target on the way down, handle controls below
the target by splitting each child into its control-satisfied and
-unsatisfied parts, and rebuild bottom-up through the unique table.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .circuit import DIAGONAL, Circuit, GateApp, GateKind
from .sv import sample_distribution, target_matrix

EPS = 1e-13
_TIE = 1e-12
_SCALE = 1e10
DEFAULT_NODE_BUDGET = 2_000_000


class Node:
    __slots__ = ("v", "w0", "n0", "w1", "n1", "__weakref__")

    def __init__(self, v: int, w0: complex, n0: Node | None, w1: complex, n1: Node | None):
        self.v = v
        self.w0 = w0
        self.n0 = n0
        self.w1 = w1
        self.n1 = n1

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Node(v={self.v}, w0={self.w0:.4g}, w1={self.w1:.4g})"


TERMINAL = Node(-1, 0j, None, 0j, None)
ZERO = (0j, TERMINAL)
ONE = (1 + 0j, TERMINAL)


@dataclass
class DDStats:
    peak_nodes: int = 0
    cache_hits: int = 0
    cache_lookups: int = 0
    gates: int = 0
    gc_runs: int = 0
    wall_seconds: float = 0.0

    @property
    def cache_hit_rate(self) -> float:
        return self.cache_hits / self.cache_lookups if self.cache_lookups else 0.0

    def to_dict(self) -> dict:
        return {
            "peak_nodes": self.peak_nodes,
            "cache_hit_rate": round(self.cache_hit_rate, 6),
            "cache_lookups": self.cache_lookups,
            "gates": self.gates,
            "gc_runs": self.gc_runs,
            "wall_seconds": self.wall_seconds,
        }


class DDPackage:
    """Unique table, caches and gate kernels shared by states of one run.

    A package is confined to one thread; concurrent simulations should each
    create their own.
    """

    def __init__(self, node_budget: int = DEFAULT_NODE_BUDGET):
        self.unique: dict[tuple, Node] = {}
        self.add_cache: dict[tuple, tuple[complex, Node]] = {}
        self.node_budget = node_budget
        self.stats = DDStats()

    # -- construction ---------------------------------------------------------

    def make(self, v: int, w0: complex, n0: Node, w1: complex, n1: Node) -> tuple[complex, Node]:
        """Normalized, hash-consed edge to a node with the given children."""
        a0 = abs(w0)
        a1 = abs(w1)
        if a0 < EPS:
            w0, n0, a0 = 0j, TERMINAL, 0.0
        if a1 < EPS:
            w1, n1, a1 = 0j, TERMINAL, 0.0
        if a0 == 0.0 and a1 == 0.0:
            return ZERO
        if a1 > a0 + _TIE:
            norm = w1
            w0 = w0 / norm
            w1 = 1 + 0j
        else:
            norm = w0
            w1 = w1 / norm
            w0 = 1 + 0j
        key = (v, round(w0.real * _SCALE), round(w0.imag * _SCALE), id(n0),
               round(w1.real * _SCALE), round(w1.imag * _SCALE), id(n1))
        node = self.unique.get(key)
        if node is None:
            node = Node(v, w0, n0, w1, n1)
            self.unique[key] = node
            if len(self.unique) > self.stats.peak_nodes:
                self.stats.peak_nodes = len(self.unique)
        return (norm, node)

    def basis(self, n: int, index: int = 0) -> tuple[complex, Node]:
        e = ONE
        for v in range(n):
            if (index >> v) & 1:
                e = self.make(v, 0j, TERMINAL, e[0], e[1])
            else:
                e = self.make(v, e[0], e[1], 0j, TERMINAL)
        return e

    def from_vector(self, vec: np.ndarray) -> tuple[complex, Node]:
        vec = np.asarray(vec, dtype=complex)
        n = int(round(math.log2(len(vec))))
        if 1 << n != len(vec):
            raise ValueError("vector length must be a power of two")

        def build(lo: int, v: int) -> tuple[complex, Node]:
            if v < 0:
                w = complex(vec[lo])
                return (w, TERMINAL) if abs(w) >= EPS else ZERO
            half = 1 << v
            e0 = build(lo, v - 1)
            e1 = build(lo + half, v - 1)
            return self.make(v, e0[0], e0[1], e1[0], e1[1])

        return build(0, n - 1)

    # -- arithmetic -----------------------------------------------------------

    def add(self, e1: tuple[complex, Node], e2: tuple[complex, Node]) -> tuple[complex, Node]:
        w1, n1 = e1
        w2, n2 = e2
        if w1 == 0:
            return e2
        if w2 == 0:
            return e1
        if n1 is n2:
            w = w1 + w2
            return ZERO if abs(w) < EPS else (w, n1)
        if id(n1) > id(n2):
            w1, n1, w2, n2 = w2, n2, w1, n1
        ratio = w2 / w1
        key = (n1, n2, ratio)
        st = self.stats
        st.cache_lookups += 1
        r = self.add_cache.get(key)
        if r is None:
            c0 = self.add((n1.w0, n1.n0), (ratio * n2.w0, n2.n0))
            c1 = self.add((n1.w1, n1.n1), (ratio * n2.w1, n2.n1))
            r = self.make(n1.v, c0[0], c0[1], c1[0], c1[1])
            self.add_cache[key] = r
        else:
            st.cache_hits += 1
        if r[0] == 0:
            return ZERO
        return (r[0] * w1, r[1])

    # -- gate application -----------------------------------------------------

    def apply(self, root: tuple[complex, Node], g: GateApp) -> tuple[complex, Node]:
        if root[0] == 0:
            return root
        if g.kind in (GateKind.SWAP, GateKind.CSWAP):
            return self._apply_swap(root, g)
        if g.kind in DIAGONAL:
            return self._apply_diagonal(root, g)
        mat = target_matrix(g)
        is_x = g.kind in (GateKind.X, GateKind.CX, GateKind.CCX, GateKind.MCX)
        t = g.targets[0]
        above = {}
        below = {}
        for c in g.controls:
            (above if c > t else below)[c] = 0 if c in g.negated else 1
        return self._descend(root, t, above, lambda node: self._combine(node, mat, is_x, below))

    def _descend(self, root, t, above, at_target):
        """Walk down to level ``t`` keeping only branches that satisfy ``above``."""
        cache: dict[Node, tuple[complex, Node]] = {}
        make = self.make
        st = self.stats

        def rec(node: Node) -> tuple[complex, Node]:
            st.cache_lookups += 1
            r = cache.get(node)
            if r is not None:
                st.cache_hits += 1
                return r
            v = node.v
            if v == t:
                r = at_target(node)
            else:
                pol = above.get(v)
                w0, n0, w1, n1 = node.w0, node.n0, node.w1, node.n1
                if pol != 1 and w0 != 0:
                    e = rec(n0)
                    w0, n0 = w0 * e[0], e[1]
                if pol != 0 and w1 != 0:
                    e = rec(n1)
                    w1, n1 = w1 * e[0], e[1]
                r = make(v, w0, n0, w1, n1)
            cache[node] = r
            return r

        e = rec(root[1])
        return ZERO if e[0] == 0 else (root[0] * e[0], e[1])

    def _split(self, below: dict[int, int]):
        """Return ``f(edge) -> (satisfied, unsatisfied)`` for the controls in ``below``."""
        lowest = min(below)
        cache: dict[Node, tuple] = {}
        make = self.make

        def rec(node: Node):
            r = cache.get(node)
            if r is not None:
                return r
            v = node.v
            if v < lowest:
                r = ((1 + 0j, node), ZERO)
            else:
                pol = below.get(v)
                if node.w0 != 0:
                    s0, u0 = rec(node.n0)
                else:
                    s0 = u0 = ZERO
                if node.w1 != 0:
                    s1, u1 = rec(node.n1)
                else:
                    s1 = u1 = ZERO
                w0, w1 = node.w0, node.w1
                if pol is None:
                    sat = make(v, w0 * s0[0], s0[1], w1 * s1[0], s1[1])
                    uns = make(v, w0 * u0[0], u0[1], w1 * u1[0], u1[1])
                elif pol == 1:
                    sat = make(v, 0j, TERMINAL, w1 * s1[0], s1[1])
                    uns = make(v, w0, node.n0, w1 * u1[0], u1[1])
                else:
                    sat = make(v, w0 * s0[0], s0[1], 0j, TERMINAL)
                    uns = make(v, w0 * u0[0], u0[1], w1, node.n1)
                r = (sat, uns)
            cache[node] = r
            return r

        def split(e):
            if e[0] == 0:
                return ZERO, ZERO
            s, u = rec(e[1])
            return (e[0] * s[0], s[1]), (e[0] * u[0], u[1])

        return split

    def _combine(self, node: Node, mat: np.ndarray, is_x: bool, below: dict[int, int]):
        lo = (node.w0, node.n0)
        hi = (node.w1, node.n1)
        if below:
            split = self._split_cache_get(below)
            lp, ln = split(lo)
            hp, hn = split(hi)
        else:
            lp, hp, ln, hn = lo, hi, ZERO, ZERO
        add = self.add
        if is_x:
            new0 = add(ln, hp)
            new1 = add(hn, lp)
        else:
            (a00, a01), (a10, a11) = mat
            new0 = add(ln, add(_scale(lp, a00), _scale(hp, a01)))
            new1 = add(hn, add(_scale(lp, a10), _scale(hp, a11)))
        return self.make(node.v, new0[0], new0[1], new1[0], new1[1])

    def _split_cache_get(self, below):
        key = tuple(sorted(below.items()))
        cur = getattr(self, "_current_split", None)
        if cur is None or cur[0] != key:
            cur = (key, self._split(below))
            self._current_split = cur
        return cur[1]

    def _apply_diagonal(self, root, g: GateApp):
        phase = -1 + 0j if g.kind is GateKind.MCZ else complex(np.exp(1j * g.params[0]))
        lits = {c: (0 if c in g.negated else 1) for c in g.controls}
        lits[g.targets[0]] = 1
        pivot = min(lits)
        pol = lits.pop(pivot)

        def at_pivot(node: Node):
            w0, w1 = node.w0, node.w1
            if pol == 1:
                w1 = w1 * phase
            else:
                w0 = w0 * phase
            return self.make(node.v, w0, node.n0, w1, node.n1)

        return self._descend(root, pivot, lits, at_pivot)

    def _apply_swap(self, root, g: GateApp):
        qa, qb = sorted(g.targets, reverse=True)
        above = {}
        low_ctrl = []
        for c in g.controls:
            if c > qa:
                above[c] = 0 if c in g.negated else 1
            else:
                low_ctrl.append(c)
        if low_ctrl:
            # Controls interleaved with the targets: fall back to three CX-type gates.
            a, b = g.targets
            e = self.apply(root, GateApp(GateKind.CX, (b,), (a,)))
            mid = GateApp(GateKind.MCX, g.controls + (a,), (b,), g.negated)
            e = self.apply(e, mid)
            return self.apply(e, GateApp(GateKind.CX, (b,), (a,)))
        relocate_cache: dict[tuple, tuple[complex, Node]] = {}
        make = self.make

        def relocate(e, bit, dst):
            """Keep only the ``qb == bit`` part of ``e`` and move it to ``qb == dst``."""
            if e[0] == 0:
                return ZERO
            node = e[1]
            key = (node, bit, dst)
            r = relocate_cache.get(key)
            if r is None:
                if node.v == qb:
                    w, ch = (node.w0, node.n0) if bit == 0 else (node.w1, node.n1)
                    r = make(qb, w, ch, 0j, TERMINAL) if dst == 0 else make(qb, 0j, TERMINAL, w, ch)
                else:
                    c0 = relocate((node.w0, node.n0), bit, dst)
                    c1 = relocate((node.w1, node.n1), bit, dst)
                    r = make(node.v, c0[0], c0[1], c1[0], c1[1])
                relocate_cache[key] = r
            return ZERO if r[0] == 0 else (e[0] * r[0], r[1])

        def at_target(node: Node):
            lo = (node.w0, node.n0)
            hi = (node.w1, node.n1)
            new0 = self.add(relocate(lo, 0, 0), relocate(hi, 0, 1))
            new1 = self.add(relocate(lo, 1, 0), relocate(hi, 1, 1))
            return make(qa, new0[0], new0[1], new1[0], new1[1])

        return self._descend(root, qa, above, at_target)

    # -- housekeeping ---------------------------------------------------------

    def clear_caches(self) -> None:
        self.add_cache.clear()
        self._current_split = None

    def collect(self, roots: Sequence[tuple[complex, Node]]) -> None:
        """Mark-sweep: keep only unique-table entries reachable from ``roots``."""
        live: set[int] = set()
        stack = [r[1] for r in roots]
        while stack:
            node = stack.pop()
            if node is TERMINAL or id(node) in live:
                continue
            live.add(id(node))
            stack.append(node.n0)
            stack.append(node.n1)
        self.unique = {k: nd for k, nd in self.unique.items() if id(nd) in live}
        self.clear_caches()
        self.stats.gc_runs += 1

    def maybe_collect(self, roots) -> None:
        if len(self.unique) > self.node_budget or len(self.add_cache) > self.node_budget:
            self.collect(roots)


def _scale(e, w):
    if w == 0 or e[0] == 0:
        return ZERO
    return (e[0] * w, e[1])


# -- state wrapper ---------------------------------------------------------------

@dataclass
class DDState:
    n: int
    root: tuple[complex, Node]
    package: DDPackage = field(repr=False)

    def apply(self, g: GateApp) -> DDState:
        for q in g.qubits:
            if q >= self.n:
                raise ValueError(f"gate {g} touches qubit {q} >= {self.n}")
        pkg = self.package
        self.root = pkg.apply(self.root, g)
        pkg.stats.gates += 1
        pkg.maybe_collect([self.root])
        return self

    def run(self, circuit: Circuit) -> DDState:
        if circuit.width != self.n:
            raise ValueError(f"circuit width {circuit.width} != state width {self.n}")
        start = time.perf_counter()
        self.package.clear_caches()
        for g in circuit.gates:
            self.apply(g)
        self.package.clear_caches()
        self.package.stats.wall_seconds += time.perf_counter() - start
        return self

    # -- queries --------------------------------------------------------------

    def amplitude(self, index: int) -> complex:
        w, node = self.root
        while node is not TERMINAL and w != 0:
            if (index >> node.v) & 1:
                w *= node.w1
                node = node.n1
            else:
                w *= node.w0
                node = node.n0
        return complex(w)

    def to_vector(self) -> np.ndarray:
        if self.n > 24:
            raise ValueError("dense export is limited to 24 qubits")
        memo: dict[int, np.ndarray] = {}

        def vec(node: Node, level: int) -> np.ndarray:
            if node is TERMINAL:
                if level == -1:
                    return np.ones(1, dtype=complex)
                return np.zeros(1 << (level + 1), dtype=complex)
            r = memo.get(id(node))
            if r is None:
                half = 1 << node.v
                lo = node.w0 * vec(node.n0, node.v - 1) if node.w0 != 0 else np.zeros(half, complex)
                hi = node.w1 * vec(node.n1, node.v - 1) if node.w1 != 0 else np.zeros(half, complex)
                r = np.concatenate([lo, hi])
                memo[id(node)] = r
            return r

        w, node = self.root
        if w == 0:
            return np.zeros(1 << self.n, dtype=complex)
        return w * vec(node, self.n - 1)

    def node_count(self) -> int:
        seen: set[int] = set()
        stack = [self.root[1]]
        while stack:
            node = stack.pop()
            if node is TERMINAL or id(node) in seen:
                continue
            seen.add(id(node))
            stack.append(node.n0)
            stack.append(node.n1)
        return len(seen)

    def _norms(self) -> dict[int, float]:
        norms: dict[int, float] = {id(TERMINAL): 1.0}
        order: list[Node] = []
        seen: set[int] = set()
        stack = [(self.root[1], False)]
        while stack:
            node, done = stack.pop()
            if done:
                order.append(node)
                continue
            if node is TERMINAL or id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            stack.append((node.n0, False))
            stack.append((node.n1, False))
        for node in order:
            norms[id(node)] = (abs(node.w0) ** 2 * norms[id(node.n0)]
                               + abs(node.w1) ** 2 * norms[id(node.n1)])
        return norms

    def norm(self) -> float:
        return abs(self.root[0]) ** 2 * self._norms()[id(self.root[1])]

    def probabilities(self, qubits: Sequence[int]) -> np.ndarray:
        """Marginal distribution over ``qubits`` (entry ``v``: ``qubits[i]`` reads bit ``i`` of ``v``).

        Probability mass flows top-down; paths that reach the same node with
        the same measured prefix are merged, and below the lowest measured
        qubit the mass is closed off with the cached subtree norms.
        """
        qubits = list(qubits)
        pos = {q: i for i, q in enumerate(qubits)}
        if len(pos) != len(qubits) or any(q >= self.n or q < 0 for q in qubits):
            raise ValueError("invalid qubit list")
        out = np.zeros(1 << len(qubits))
        if self.root[0] == 0:
            return out
        norms = self._norms()
        lowest = min(qubits) if qubits else self.n
        # (id(node), prefix) -> [node, prefix, mass]
        frontier = {(id(self.root[1]), 0): [self.root[1], 0, abs(self.root[0]) ** 2]}
        for level in range(self.n - 1, lowest - 1, -1):
            p = pos.get(level)
            nxt: dict[tuple[int, int], list] = {}
            for node, prefix, mass in frontier.values():
                for bit, w, child in ((0, node.w0, node.n0), (1, node.w1, node.n1)):
                    if w == 0:
                        continue
                    pre = prefix | (bit << p) if (p is not None and bit) else prefix
                    key = (id(child), pre)
                    slot = nxt.get(key)
                    m = mass * (w.real * w.real + w.imag * w.imag)
                    if slot is None:
                        nxt[key] = [child, pre, m]
                    else:
                        slot[2] += m
            frontier = nxt
        for node, prefix, mass in frontier.values():
            out[prefix] += mass * norms[id(node)]
        return out

    def sample(self, qubits: Sequence[int], shots: int, seed: int | None = None) -> dict[str, int]:
        """Seeded sampling from the exact marginal (same draw rule as the SV backend)."""
        return sample_distribution(self.probabilities(qubits), len(qubits), shots, seed)

    def stats(self) -> dict:
        d = self.package.stats.to_dict()
        d["final_nodes"] = self.node_count()
        return d


def dd_init(n: int, package: DDPackage | None = None) -> DDState:
    """|0...0> as a chain of ``n`` nodes."""
    if n < 1:
        raise ValueError("need at least one qubit")
    pkg = package or DDPackage()
    return DDState(n, pkg.basis(n, 0), pkg)


def dd_apply(state: DDState, gate: GateApp) -> DDState:
    return state.apply(gate)


def dd_amplitude(state: DDState, index: int) -> complex:
    return state.amplitude(index)


def dd_sample(state: DDState, qubits: Sequence[int], shots: int, seed: int | None = None) -> dict[str, int]:
    return state.sample(qubits, shots, seed)


def simulate(circuit: Circuit, initial_index: int = 0, package: DDPackage | None = None) -> DDState:
    pkg = package or DDPackage()
    state = DDState(circuit.width, pkg.basis(circuit.width, initial_index), pkg)
    return state.run(circuit)


def audit(state: DDState) -> None:
    """Check the ordered/reduced/normalized invariants of every reachable node."""
    seen: set[int] = set()
    stack = [state.root[1]]
    while stack:
        node = stack.pop()
        if node is TERMINAL or id(node) in seen:
            continue
        seen.add(id(node))
        for w, ch in ((node.w0, node.n0), (node.w1, node.n1)):
            if w != 0 and ch.v != node.v - 1:
                raise AssertionError(f"level skip or disorder below {node}")
            if abs(w) > 1 + 1e-12:
                raise AssertionError(f"unnormalized weight {w} in {node}")
        if node.w0 == 0 and node.w1 == 0:
            raise AssertionError("node with two zero edges")
        stack.append(node.n0)
        stack.append(node.n1)
