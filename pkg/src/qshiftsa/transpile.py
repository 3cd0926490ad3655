"""Decomposition of circuits into the ``{u, cx}`` and ``{u, cx, mcx}`` bases.

Every decomposition here is exact, including global phase, so transpiled and
original circuits agree amplitude-for-amplitude.

Multi-controlled gates are synthesised from a small menu of constructions and
the cheapest (by gate count) is picked per control count:

* gray-code phase polynomial -- ``2**(k+1) - 2`` CX, no ancillas, best for few controls;
* Toffoli ladder on ``k - 2`` dirty (borrowed) qubits;
* one-dirty-qubit split into two half-size MCX gates;
* controlled-phase recursion, which needs no spare qubit at all.

``no_ancilla`` adds no qubits but lets a gate with three or more controls
borrow one idle circuit qubit as a dirty ancilla (left exactly as found),
which enables the split construction. ``with_ancilla`` appends one clean
qubit that multi-controlled gates may use to pre-compute the AND of two
controls.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Sequence

from .circuit import Circuit, CircuitError, GateApp, GateKind, RegisterLayout

BASES = ("u_cx", "u_cx_mcx")
MCX_MODES = ("no_ancilla", "with_ancilla")
ANCILLA_REGISTER = "mcx_ancilla"

# In the u_cx_mcx basis multi-controlled X/Z gates with at least this many
# controls are left intact; smaller ones are ordinary Toffoli/CX circuits.
KEEP_MCX_MIN_CONTROLS = 3
# Gray-code synthesis grows as 2**k; don't consider it past this size.
_GRAY_MAX_CONTROLS = 8

_PI = math.pi


# -- primitive emitters (on concrete indices) --------------------------------

def _u(q: int, theta: float, phi: float, lam: float) -> GateApp:
    return GateApp(GateKind.U, (), (q,), (), (theta, phi, lam))


def _x(q: int) -> GateApp:
    return _u(q, _PI, 0.0, _PI)


def _h(q: int) -> GateApp:
    return _u(q, _PI / 2, 0.0, _PI)


def _p(q: int, angle: float) -> GateApp:
    return _u(q, 0.0, 0.0, angle)


def _cx(c: int, t: int) -> GateApp:
    return GateApp(GateKind.CX, (c,), (t,))


def _cp(c: int, t: int, angle: float) -> list[GateApp]:
    return [_p(c, angle / 2), _cx(c, t), _p(t, -angle / 2), _cx(c, t), _p(t, angle / 2)]


def _toffoli(a: int, b: int, t: int) -> list[GateApp]:
    q = _PI / 4
    return [
        _h(t), _cx(b, t), _p(t, -q), _cx(a, t), _p(t, q), _cx(b, t), _p(t, -q),
        _cx(a, t), _p(b, q), _p(t, q), _h(t), _cx(a, b), _p(a, q), _p(b, -q), _cx(a, b),
    ]


def _remap(gates: Iterable[GateApp], mapping: Sequence[int]) -> list[GateApp]:
    return [g.remap(mapping) for g in gates]


# -- multi-controlled templates ----------------------------------------------
#
# Templates act on abstract indices: controls 0..k-1, target k, then the pool
# of dirty qubits k+1..k+npool. Callers remap them onto real qubits.

def _gray_phase(angle: float, n: int) -> list[GateApp]:
    """Phase ``angle`` on |1...1> of ``n`` qubits via a parity phase polynomial."""
    theta = angle / 2 ** (n - 1)
    out: list[GateApp] = []
    for m in range(n):
        size = 0
        out.append(_p(m, theta))
        for g in range(1, 1 << m):
            bit = (g & -g).bit_length() - 1
            now_in = (g ^ (g >> 1)) >> bit & 1
            size += 1 if now_in else -1
            out.append(_cx(bit, m))
            out.append(_p(m, theta if size % 2 == 0 else -theta))
        if m:
            out.append(_cx(m - 1, m))
    return out


def _ladder(k: int) -> list[GateApp]:
    """Toffoli ladder for ``k >= 3`` controls using ``k - 2`` dirty qubits."""
    c = list(range(k))
    t = k
    a = list(range(k + 1, k + 1 + k - 2))
    top = _toffoli(c[k - 1], a[k - 3], t)
    down: list[GateApp] = []
    for i in range(k - 2, 1, -1):
        down += _toffoli(c[i], a[i - 2], a[i - 1])
    up: list[GateApp] = []
    for i in range(2, k - 1):
        up += _toffoli(c[i], a[i - 2], a[i - 1])
    bottom = _toffoli(c[0], c[1], a[0])
    half = top + down + bottom + up
    return half + half


@lru_cache(maxsize=None)
def _mcx_template(k: int, npool: int) -> tuple[GateApp, ...]:
    if k == 1:
        return (_cx(0, 1),)
    if k == 2:
        return tuple(_toffoli(0, 1, 2))
    t = k
    cands: list[list[GateApp]] = []
    if k <= _GRAY_MAX_CONTROLS:
        cands.append([_h(t)] + _gray_phase(_PI, k + 1) + [_h(t)])
    if npool >= k - 2:
        cands.append(_ladder(k))
    if npool >= 1:
        anc = k + 1
        m1 = (k + 1) // 2
        # A: controls 0..m1-1 -> anc, borrowing the remaining controls, t and pool.
        map_a = list(range(m1)) + [anc] + list(range(m1, k)) + [t] + list(range(k + 2, k + 1 + npool))
        part_a = _remap(_mcx_template(m1, len(map_a) - m1 - 1), map_a)
        # B: controls m1..k-1 plus anc -> t, borrowing the first group and pool.
        map_b = list(range(m1, k)) + [anc] + [t] + list(range(m1)) + list(range(k + 2, k + 1 + npool))
        kb = k - m1 + 1
        part_b = _remap(_mcx_template(kb, len(map_b) - kb - 1), map_b)
        cands.append(part_a + part_b + part_a + part_b)
    cands.append([_h(t)] + list(_mcp_recursive(_PI, k, npool)) + [_h(t)])
    return tuple(min(cands, key=len))


def _mcp_recursive(angle: float, k: int, npool: int) -> list[GateApp]:
    t = k
    cm = k - 1
    inner = list(_mcx_template(k - 1, npool + 1))
    out = _cp(cm, t, angle / 2) + inner + _cp(cm, t, -angle / 2) + inner
    # Remaining controls 0..k-2 -> t, with cm joining the borrowed pool.
    mapping = list(range(k - 1)) + [t, cm] + list(range(k + 1, k + 1 + npool))
    out += _remap(_mcp_template(angle / 2, k - 1, npool + 1), mapping)
    return out


@lru_cache(maxsize=None)
def _mcp_template(angle: float, k: int, npool: int) -> tuple[GateApp, ...]:
    if k == 0:
        return (_p(0, angle),)
    if k == 1:
        return tuple(_cp(0, 1, angle))
    cands: list[list[GateApp]] = [_mcp_recursive(angle, k, npool)]
    if k <= _GRAY_MAX_CONTROLS:
        cands.insert(0, _gray_phase(angle, k + 1))
    if angle == _PI:
        # Controlled-Z: conjugate an MCX by Hadamards on the target.
        cands.append([_h(k)] + list(_mcx_template(k, npool)) + [_h(k)])
    return tuple(min(cands, key=len))


@lru_cache(maxsize=None)
def _mcx_clean_template(k: int) -> tuple[GateApp, ...]:
    """MCX with one clean ancilla at index ``k + 1`` (returned to |0>)."""
    plain = _mcx_template(k, 0)
    if k < 3:
        return plain
    anc = k + 1
    mapping = [anc] + list(range(2, k)) + [k, 0, 1]
    body = _remap(_mcx_template(k - 1, 2), mapping)
    clean = _toffoli(0, 1, anc) + body + _toffoli(0, 1, anc)
    return tuple(min([list(plain), clean], key=len))


@lru_cache(maxsize=None)
def _mcp_clean_template(angle: float, k: int) -> tuple[GateApp, ...]:
    plain = _mcp_template(angle, k, 0)
    if k < 3:
        return plain
    anc = k + 1
    mapping = [anc] + list(range(2, k)) + [k, 0, 1]
    body = _remap(_mcp_template(angle, k - 1, 2), mapping)
    clean = _toffoli(0, 1, anc) + body + _toffoli(0, 1, anc)
    return tuple(min([list(plain), clean], key=len))


# -- public API ----------------------------------------------------------------

def decompose_mcx(
    controls: Sequence[int],
    target: int,
    ancilla: int | None = None,
    borrow: Sequence[int] = (),
) -> list[GateApp]:
    """``{u, cx}`` circuit for an MCX with positive controls.

    ``borrow`` lists idle qubits that may be used as dirty ancillas (their
    state is restored exactly); ``ancilla`` is a clean qubit left at |0>.
    """
    k = len(controls)
    mapping = list(controls) + [target]
    if ancilla is not None and k >= 3:
        return _remap(_mcx_clean_template(k), mapping + [ancilla])
    borrow = list(borrow)[:1] if k >= 3 else []
    return _remap(_mcx_template(k, len(borrow)), mapping + borrow)


def decompose_mcp(
    angle: float,
    controls: Sequence[int],
    target: int,
    ancilla: int | None = None,
    borrow: Sequence[int] = (),
) -> list[GateApp]:
    """``{u, cx}`` circuit for a multi-controlled phase with positive controls."""
    k = len(controls)
    mapping = list(controls) + [target]
    if ancilla is not None and k >= 3:
        return _remap(_mcp_clean_template(angle, k), mapping + [ancilla])
    borrow = list(borrow)[:1] if k >= 3 else []
    return _remap(_mcp_template(angle, k, len(borrow)), mapping + borrow)


def _idle_qubit(g: GateApp, width: int) -> list[int]:
    used = set(g.qubits)
    for q in range(width):
        if q not in used:
            return [q]
    return []


def _decompose(g: GateApp, keep_mcx: bool, ancilla: int | None, width: int) -> list[GateApp]:
    kind = g.kind
    if g.negated:
        flips = [_x(q) for q in g.negated]
        inner = GateApp(kind, g.controls, g.targets, (), g.params)
        return flips + _decompose(inner, keep_mcx, ancilla, width) + flips
    if kind is GateKind.U or (kind is GateKind.CX):
        return [g]
    if kind is GateKind.X:
        return [_x(g.targets[0])]
    if kind is GateKind.H:
        return [_h(g.targets[0])]
    if kind is GateKind.P:
        return [_p(g.targets[0], g.params[0])]
    if kind is GateKind.CP:
        return _cp(g.controls[0], g.targets[0], g.params[0])
    if kind is GateKind.SWAP:
        a, b = g.targets
        return [_cx(a, b), _cx(b, a), _cx(a, b)]
    if kind is GateKind.CSWAP:
        a, b = g.targets
        mid = GateApp(GateKind.MCX, g.controls + (a,), (b,))
        return [_cx(b, a)] + _decompose(mid, keep_mcx, ancilla, width) + [_cx(b, a)]
    t = g.targets[0]
    k = len(g.controls)
    if kind in (GateKind.CCX, GateKind.MCX):
        if k == 1:
            return [_cx(g.controls[0], t)]
        if keep_mcx and k >= KEEP_MCX_MIN_CONTROLS:
            return [GateApp(GateKind.MCX, g.controls, g.targets)]
        return decompose_mcx(g.controls, t, ancilla, _idle_qubit(g, width))
    if kind is GateKind.MCZ:
        if keep_mcx and k >= KEEP_MCX_MIN_CONTROLS:
            return [GateApp(GateKind.MCZ, g.controls, g.targets)]
        if k <= 2:
            inner = GateApp(GateKind.MCX, g.controls, g.targets)
            return [_h(t)] + _decompose(inner, keep_mcx, ancilla, width) + [_h(t)]
        return decompose_mcp(_PI, g.controls, t, ancilla, _idle_qubit(g, width))
    raise CircuitError(f"cannot decompose {kind.value}")  # pragma: no cover


def transpile(c: Circuit, basis: str = "u_cx", mcx_mode: str = "no_ancilla") -> Circuit:
    """Rewrite ``c`` into ``basis``.

    Parameters
    ----------
    c : Circuit
        Input circuit (any gate kinds).
    basis : {"u_cx", "u_cx_mcx"}
        ``u_cx`` emits only ``U`` and ``CX``; ``u_cx_mcx`` additionally keeps
        multi-controlled X/Z gates with three or more controls (negations are
        still stripped into X sandwiches).
    mcx_mode : {"no_ancilla", "with_ancilla"}
        ``with_ancilla`` appends one clean qubit, register ``mcx_ancilla``,
        which is returned to |0>.

    Returns
    -------
    Circuit
    """
    if basis not in BASES:
        raise CircuitError(f"unknown basis {basis!r}; expected one of {BASES}")
    if mcx_mode not in MCX_MODES:
        raise CircuitError(f"unknown mcx mode {mcx_mode!r}; expected one of {MCX_MODES}")
    keep = basis == "u_cx_mcx"
    width = c.width
    layout = c.layout
    ancilla = None
    if mcx_mode == "with_ancilla":
        ancilla = width
        width += 1
        layout = (layout or RegisterLayout((("q", 0, c.width),))).appended(ANCILLA_REGISTER, 1)
    out: list[GateApp] = []
    for g in c.gates:
        out.extend(_decompose(g, keep, ancilla, c.width))
    return Circuit(width, tuple(out), layout)


def in_basis(c: Circuit, basis: str) -> bool:
    allowed = {GateKind.U, GateKind.CX}
    if basis == "u_cx_mcx":
        allowed |= {GateKind.MCX, GateKind.MCZ}
    return all(g.kind in allowed and not g.negated for g in c.gates)
