"""Small test utilities shared across modules."""

from __future__ import annotations

import random

import numpy as np

from qshiftsa import dd
from qshiftsa.circuit import Circuit, CircuitBuilder, GateApp, GateKind, RegisterLayout


def set_register(index: int, layout: RegisterLayout, name: str, value: int) -> int:
    for bit, q in enumerate(layout[name]):
        if (value >> bit) & 1:
            index |= 1 << q
    return index


def read_register(index: int, layout: RegisterLayout, name: str) -> int:
    return sum(((index >> q) & 1) << bit for bit, q in enumerate(layout[name]))


def run_basis_dd(circuit: Circuit, index: int) -> dict[int, complex]:
    """Nonzero amplitudes after running ``circuit`` on basis state ``index`` (DD)."""
    state = dd.simulate(circuit, initial_index=index)
    return _support(state)


def _support(state) -> dict[int, complex]:
    out = {}
    stack = [(state.root, 0, state.n - 1)]
    # Depth-first walk over nonzero paths only; cheap for near-basis states.
    while stack:
        (w, node), prefix, level = stack.pop()
        if abs(w) < 1e-12:
            continue
        if level < 0:
            out[prefix] = out.get(prefix, 0) + w
            continue
        assert node.v == level, "diagram skipped a level"
        stack.append(((w * node.w0, node.n0), prefix, level - 1))
        stack.append(((w * node.w1, node.n1), prefix | (1 << level), level - 1))
    return out


def single_basis_output(circuit: Circuit, index: int, tol: float = 1e-9) -> int:
    amps = run_basis_dd(circuit, index)
    big = {k: v for k, v in amps.items() if abs(v) > tol}
    assert len(big) == 1, f"expected a basis state, got {len(big)} terms"
    (out, amp), = big.items()
    assert abs(abs(amp) - 1) < 1e-9
    return out


SINGLE_KINDS = [GateKind.X, GateKind.H, GateKind.U, GateKind.P]


def random_circuit(n: int, n_gates: int, rng: random.Random, kinds=None) -> Circuit:
    """Random circuit over every gate kind (where the width allows), with negated controls."""
    if kinds is None:
        kinds = list(GateKind)
    b = CircuitBuilder(n)
    qubits = list(range(n))
    for _ in range(n_gates):
        kind = rng.choice(kinds)
        if kind in (GateKind.X, GateKind.H):
            b.append(GateApp(kind, (), (rng.randrange(n),)))
        elif kind is GateKind.U:
            b.u(rng.randrange(n), *(rng.uniform(-np.pi, np.pi) for _ in range(3)))
        elif kind is GateKind.P:
            b.p(rng.randrange(n), rng.uniform(-np.pi, np.pi))
        elif kind is GateKind.SWAP and n >= 2:
            a, c = rng.sample(qubits, 2)
            b.swap(a, c)
        elif kind in (GateKind.CX, GateKind.CP) and n >= 2:
            c, t = rng.sample(qubits, 2)
            neg = (c,) if kind is GateKind.CX and rng.random() < 0.3 else ()
            params = (rng.uniform(-np.pi, np.pi),) if kind is GateKind.CP else ()
            b.append(GateApp(kind, (c,), (t,), neg, params))
        elif kind is GateKind.CCX and n >= 3:
            c0, c1, t = rng.sample(qubits, 3)
            b.append(GateApp(kind, (c0, c1), (t,), tuple(q for q in (c0, c1) if rng.random() < 0.3)))
        elif kind in (GateKind.MCX, GateKind.MCZ) and n >= 2:
            k = rng.randint(1, n - 1)
            sel = rng.sample(qubits, k + 1)
            ctrls, t = tuple(sel[:-1]), sel[-1]
            neg = tuple(sorted(q for q in ctrls if rng.random() < 0.3))
            b.append(GateApp(kind, ctrls, (t,), neg))
        elif kind is GateKind.CSWAP and n >= 3:
            k = rng.randint(1, n - 2)
            sel = rng.sample(qubits, k + 2)
            ctrls = tuple(sel[:-2])
            neg = tuple(sorted(q for q in ctrls if rng.random() < 0.3))
            b.append(GateApp(kind, ctrls, tuple(sel[-2:]), neg))
        else:
            b.h(rng.randrange(n))
    return b.build()


def random_state(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)
