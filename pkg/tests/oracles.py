"""Independent reference implementations used as test oracles.

Nothing here imports the simulators under test: gate actions are written out
with plain index arithmetic on dense matrices, and sequence quantities are
computed by brute force on Python strings.
"""

from __future__ import annotations

import cmath
import math
from functools import lru_cache

import numpy as np

from qshiftsa.circuit import Circuit, GateApp, GateKind

_X = np.array([[0, 1], [1, 0]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _single(g: GateApp) -> np.ndarray:
    k = g.kind
    if k in (GateKind.X, GateKind.CX, GateKind.CCX, GateKind.MCX):
        return _X
    if k is GateKind.H:
        return _H
    if k is GateKind.U:
        th, ph, la = g.params
        c, s = math.cos(th / 2), math.sin(th / 2)
        return np.array([[c, -cmath.exp(1j * la) * s],
                         [cmath.exp(1j * ph) * s, cmath.exp(1j * (ph + la)) * c]])
    if k in (GateKind.P, GateKind.CP):
        return np.diag([1, cmath.exp(1j * g.params[0])])
    if k is GateKind.MCZ:
        return np.diag([1, -1]).astype(complex)
    raise AssertionError(k)


def apply_dense(g: GateApp, mat: np.ndarray) -> np.ndarray:
    """Left-multiply ``mat`` (rows = basis indices) by the gate's unitary."""
    dim = mat.shape[0]
    idx = np.arange(dim)
    cond = np.ones(dim, dtype=bool)
    for c in g.controls:
        bit = (idx >> c) & 1
        cond &= bit == (0 if c in g.negated else 1)
    out = mat.copy()
    if g.kind in (GateKind.SWAP, GateKind.CSWAP):
        a, b = g.targets
        ba, bb = (idx >> a) & 1, (idx >> b) & 1
        partner = idx ^ ((ba ^ bb) << a) ^ ((ba ^ bb) << b)
        out[cond] = mat[partner[cond]]
        return out
    t = g.targets[0]
    m = _single(g)
    bit = (idx >> t) & 1
    i0 = idx & ~(1 << t)
    i1 = idx | (1 << t)
    new = m[bit, 0][:, None] * mat[i0] + m[bit, 1][:, None] * mat[i1]
    out[cond] = new[cond]
    return out


def dense_unitary(c: Circuit) -> np.ndarray:
    u = np.eye(1 << c.width, dtype=complex)
    for g in c.gates:
        u = apply_dense(g, u)
    return u


def dense_state(c: Circuit, initial: np.ndarray | None = None) -> np.ndarray:
    if initial is None:
        initial = np.zeros(1 << c.width, dtype=complex)
        initial[0] = 1
    v = np.array(initial, dtype=complex)[:, None]
    for g in c.gates:
        v = apply_dense(g, v)
    return v[:, 0]


def basis_map(c: Circuit, index: int) -> int:
    """Image of a basis state under a permutation circuit, by bit fiddling."""
    for g in c.gates:
        ok = all(((index >> q) & 1) == (0 if q in g.negated else 1) for q in g.controls)
        if not ok:
            continue
        if g.kind in (GateKind.SWAP, GateKind.CSWAP):
            a, b = g.targets
            if ((index >> a) ^ (index >> b)) & 1:
                index ^= (1 << a) | (1 << b)
        elif g.kind in (GateKind.X, GateKind.CX, GateKind.CCX, GateKind.MCX):
            index ^= 1 << g.targets[0]
        elif g.kind in (GateKind.P, GateKind.CP, GateKind.MCZ):
            continue
        else:
            raise ValueError(f"{g.kind} is not a permutation gate")
    return index


def basis_map_array(c: Circuit, index: np.ndarray) -> np.ndarray:
    """Vectorised :func:`basis_map` over an int64 array of basis indices (< 63 qubits)."""
    index = np.array(index, dtype=np.int64)
    one = np.int64(1)
    for g in c.gates:
        ok = np.ones(index.shape, dtype=bool)
        for q in g.controls:
            bit = (index >> q) & one
            ok &= bit == (0 if q in g.negated else 1)
        if g.kind in (GateKind.SWAP, GateKind.CSWAP):
            a, b = g.targets
            diff = ((index >> a) ^ (index >> b)) & one
            index = np.where(ok & (diff == 1), index ^ ((one << a) | (one << b)), index)
        elif g.kind in (GateKind.X, GateKind.CX, GateKind.CCX, GateKind.MCX):
            index = np.where(ok, index ^ (one << g.targets[0]), index)
        elif g.kind not in (GateKind.P, GateKind.CP, GateKind.MCZ):
            raise ValueError(f"{g.kind} is not a permutation gate")
    return index


# -- sequence oracles -----------------------------------------------------------

def rotate(seq: str, k: int) -> str:
    """Symbol at position p moves to (p + k) mod N."""
    n = len(seq)
    k %= n
    return seq[n - k:] + seq[:n - k]


def hamming_ref(x: str, y: str) -> int:
    return sum(a != b for a, b in zip(x, y, strict=True))


def levenshtein_ref(x: str, y: str) -> int:
    # Memoised recursion, deliberately different from an iterative DP table.
    @lru_cache(maxsize=None)
    def d(i: int, j: int) -> int:
        if i == 0:
            return j
        if j == 0:
            return i
        return min(d(i - 1, j) + 1, d(i, j - 1) + 1, d(i - 1, j - 1) + (x[i - 1] != y[j - 1]))

    return d(len(x), len(y))


def shifted_distance(x: str, y: str, k: int, sign: int) -> int:
    """Distance the core should produce for shift ``k`` and sign bit ``sign``."""
    if sign == 0:
        return hamming_ref(x, rotate(y, k))
    return hamming_ref(rotate(x, k), y)


CODE = {"A": 0, "T": 1, "C": 2, "G": 3}


def encode_int(seq: str) -> int:
    """Register value holding ``seq`` (slot j at bits 2j, 2j+1)."""
    return sum(CODE[s] << (2 * j) for j, s in enumerate(seq))


def decode_int(value: int, n: int) -> str:
    inv = {v: k for k, v in CODE.items()}
    return "".join(inv[(value >> (2 * j)) & 3] for j in range(n))
