"""Dense state-vector simulator.

Amplitudes are stored as a flat ``complex128`` array of length ``2**n`` with
qubit 0 as the least-significant index bit. Gates are applied in place on
strided views; large states are processed in chunks over the untouched
high-order qubits so that temporaries stay small.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .circuit import Circuit, GateApp, GateKind

DEFAULT_CAP = 27
# Chunk the state above this many amplitudes per block.
_CHUNK_QUBITS = 20

_SQRT1_2 = 1 / math.sqrt(2)


class CapacityError(MemoryError):
    """Requested state exceeds the configured qubit cap."""


def u_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [[c, -np.exp(1j * lam) * s], [np.exp(1j * phi) * s, np.exp(1j * (phi + lam)) * c]],
        dtype=complex,
    )


def target_matrix(g: GateApp) -> np.ndarray:
    """2x2 matrix applied to the (single) target when all controls fire."""
    k = g.kind
    if k in (GateKind.X, GateKind.CX, GateKind.CCX, GateKind.MCX):
        return np.array([[0, 1], [1, 0]], dtype=complex)
    if k is GateKind.H:
        return np.array([[1, 1], [1, -1]], dtype=complex) * _SQRT1_2
    if k is GateKind.U:
        return u_matrix(*g.params)
    if k in (GateKind.P, GateKind.CP):
        return np.array([[1, 0], [0, np.exp(1j * g.params[0])]], dtype=complex)
    if k is GateKind.MCZ:
        return np.array([[1, 0], [0, -1]], dtype=complex)
    raise ValueError(f"{k.value} has no single-target matrix")


def sv_bytes(n: int) -> int:
    return 16 * (1 << n)


class StateVector:
    """``n``-qubit pure state backed by a dense amplitude array."""

    def __init__(self, n: int, amplitudes: np.ndarray | None = None, cap: int = DEFAULT_CAP):
        if n > cap:
            raise CapacityError(
                f"{n} qubits exceeds the state-vector cap of {cap} "
                f"({sv_bytes(n) / 2**30:.0f} GiB of amplitudes)"
            )
        self.n = n
        if amplitudes is None:
            amplitudes = np.zeros(1 << n, dtype=complex)
            amplitudes[0] = 1.0
        elif amplitudes.shape != (1 << n,):
            raise ValueError("amplitude array has the wrong length")
        self.amplitudes = amplitudes

    def copy(self) -> StateVector:
        return StateVector(self.n, self.amplitudes.copy(), cap=self.n)

    @property
    def nbytes(self) -> int:
        return self.amplitudes.nbytes

    def norm(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    def amplitude(self, index: int) -> complex:
        return complex(self.amplitudes[index])

    # -- gate application ---------------------------------------------------

    def apply(self, g: GateApp) -> StateVector:
        n = self.n
        for q in g.qubits:
            if q >= n:
                raise ValueError(f"gate {g} touches qubit {q} >= {n}")
        involved = set(g.qubits)
        h = 0
        while h < n - _CHUNK_QUBITS and (n - 1 - h) not in involved:
            h += 1
        low = n - h
        blocks = self.amplitudes.reshape((1 << h,) + (2,) * low)
        for b in range(1 << h):
            _apply_block(blocks[b], g, low)
        return self

    def run(self, circuit: Circuit) -> StateVector:
        if circuit.width != self.n:
            raise ValueError(f"circuit width {circuit.width} != state width {self.n}")
        for g in circuit.gates:
            self.apply(g)
        return self

    # -- measurement --------------------------------------------------------

    def probabilities(self, qubits: Sequence[int]) -> np.ndarray:
        """Marginal distribution over ``qubits``.

        Entry ``v`` is the probability that ``qubits[i]`` reads bit ``i`` of ``v``.
        """
        n = self.n
        qubits = list(qubits)
        pos = {q: i for i, q in enumerate(qubits)}
        if len(pos) != len(qubits) or any(q >= n or q < 0 for q in qubits):
            raise ValueError("invalid qubit list")
        h = max(0, n - _CHUNK_QUBITS)
        low = n - h
        kept_low = sorted((q for q in qubits if q < low), reverse=True)
        drop_axes = tuple(low - 1 - q for q in range(low) if q not in pos)
        flat = np.arange(1 << len(kept_low))
        idx_low = np.zeros_like(flat)
        for i, q in enumerate(kept_low):
            idx_low |= ((flat >> (len(kept_low) - 1 - i)) & 1) << pos[q]
        out = np.zeros(1 << len(qubits))
        for b in range(1 << h):
            block = self.amplitudes[b << low:(b + 1) << low]
            p = block.real ** 2 + block.imag ** 2
            r = p.reshape((2,) * low).sum(axis=drop_axes) if drop_axes else p.reshape((2,) * low)
            top = 0
            for q in qubits:
                if q >= low and (b >> (q - low)) & 1:
                    top |= 1 << pos[q]
            out[idx_low + top] += np.ravel(r)
        return out

    def sample(self, qubits: Sequence[int], shots: int, seed: int | None = None) -> dict[str, int]:
        """Seeded sampling of the marginal over ``qubits``.

        Keys are bitstrings printed most-significant first, i.e. ``qubits[-1]``
        is the leftmost character.
        """
        return sample_distribution(self.probabilities(qubits), len(qubits), shots, seed)

    def dump(self) -> str:
        """Amplitude listing ``index real imag`` for states up to 20 qubits."""
        if self.n > 20:
            raise ValueError("amplitude dumps are limited to 20 qubits")
        nz = np.flatnonzero(np.abs(self.amplitudes) > 0)
        return "".join(
            f"{i} {float(self.amplitudes[i].real)!r} {float(self.amplitudes[i].imag)!r}\n" for i in nz
        )


def sample_distribution(probs: np.ndarray, k: int, shots: int, seed: int | None) -> dict[str, int]:
    rng = np.random.default_rng(seed)
    p = np.clip(probs, 0.0, None)
    p = p / p.sum()
    counts = rng.multinomial(shots, p)
    return {format(int(v), f"0{k}b"): int(c) for v, c in enumerate(counts) if c}


def _apply_block(arr: np.ndarray, g: GateApp, m: int) -> None:
    idx: list = [slice(None)] * m
    neg = g.negated
    for c in g.controls:
        idx[m - 1 - c] = 0 if c in neg else 1
    kind = g.kind
    if kind in (GateKind.SWAP, GateKind.CSWAP):
        a, b = g.targets
        i01 = list(idx)
        i10 = list(idx)
        i01[m - 1 - a], i01[m - 1 - b] = 0, 1
        i10[m - 1 - a], i10[m - 1 - b] = 1, 0
        i01, i10 = tuple(i01), tuple(i10)
        tmp = arr[i01].copy()
        arr[i01] = arr[i10]
        arr[i10] = tmp
        return
    t = g.targets[0]
    i0 = list(idx)
    i1 = list(idx)
    i0[m - 1 - t] = 0
    i1[m - 1 - t] = 1
    i0, i1 = tuple(i0), tuple(i1)
    if kind in (GateKind.X, GateKind.CX, GateKind.CCX, GateKind.MCX):
        tmp = arr[i0].copy()
        arr[i0] = arr[i1]
        arr[i1] = tmp
    elif kind in (GateKind.P, GateKind.CP):
        arr[i1] *= np.exp(1j * g.params[0])
    elif kind is GateKind.MCZ:
        arr[i1] *= -1
    else:
        (a00, a01), (a10, a11) = target_matrix(g)
        v0 = arr[i0]
        v1 = arr[i1]
        new0 = a00 * v0 + a01 * v1
        arr[i1] = a10 * v0 + a11 * v1
        arr[i0] = new0


def sv_init(n: int, cap: int = DEFAULT_CAP) -> StateVector:
    return StateVector(n, cap=cap)


def sv_apply(state: StateVector, gate: GateApp) -> StateVector:
    return state.apply(gate)


def sv_sample(state: StateVector, qubits: Sequence[int], shots: int, seed: int | None = None) -> dict[str, int]:
    return state.sample(qubits, shots, seed)


def simulate(circuit: Circuit, cap: int = DEFAULT_CAP, initial: np.ndarray | None = None) -> StateVector:
    state = StateVector(circuit.width, None if initial is None else np.array(initial, dtype=complex), cap=cap)
    return state.run(circuit)
