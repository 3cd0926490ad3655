"""Symbol comparison, QFT popcount adder, and the assembled distance core."""

from __future__ import annotations

import math

from .circuit import Circuit, CircuitBuilder, RegisterLayout
from .shifter import build_controlled_shift


def build_compare(layout: RegisterLayout) -> Circuit:
    """Set ``mismatch[j]`` iff symbol ``j`` of ``dataX`` differs from that of ``dataY``.

    Per slot the XOR of both code bits is formed in place on ``dataY``, the
    OR of the two XOR bits is written to the mismatch qubit (a Toffoli on the
    negated bits followed by X), and ``dataY`` is restored.
    """
    x = list(layout["dataX"])
    y = list(layout["dataY"])
    mism = list(layout["mismatch"])
    b = CircuitBuilder.for_layout(layout)
    for j, m in enumerate(mism):
        x0, x1, y0, y1 = x[2 * j], x[2 * j + 1], y[2 * j], y[2 * j + 1]
        b.cx(x0, y0).cx(x1, y1)
        b.ccx(y0, y1, m, negated=(y0, y1))
        b.x(m)
        b.cx(x1, y1).cx(x0, y0)
    return b.build()


def _qft(b: CircuitBuilder, reg: list[int]) -> None:
    # Without the final swaps: afterwards reg[l] carries phase 2*pi*x / 2**(l+1).
    for l in range(len(reg) - 1, -1, -1):
        b.h(reg[l])
        for m in range(l - 1, -1, -1):
            b.cp(reg[m], reg[l], math.pi / 2 ** (l - m))


def build_qft_adder(layout: RegisterLayout) -> Circuit:
    """Add the number of set mismatch bits into the ``distance`` register.

    QFT on the distance register, then for every mismatch bit a fan of
    controlled phases ``pi / 2**l`` onto distance qubit ``l`` (adding 1 in the
    Fourier basis), then the inverse QFT. Arithmetic is modulo ``2**d``.
    """
    dist = list(layout["distance"])
    mism = list(layout["mismatch"])
    qft = CircuitBuilder.for_layout(layout)
    _qft(qft, dist)
    qft_c = qft.build()
    b = CircuitBuilder.for_layout(layout)
    b.extend(qft_c)
    for m in mism:
        for l, q in enumerate(dist):
            b.cp(m, q, math.pi / 2 ** l)
    b.extend(qft_c.inverse())
    return b.build()


def build_qshift_core(layout: RegisterLayout) -> Circuit:
    """Shift, compare and add: leaves ``distance = d_H`` of the aligned operands."""
    return build_controlled_shift(layout) + build_compare(layout) + build_qft_adder(layout)


def core_parts(layout: RegisterLayout) -> dict[str, Circuit]:
    return {
        "shift": build_controlled_shift(layout),
        "compare": build_compare(layout),
        "adder": build_qft_adder(layout),
    }
