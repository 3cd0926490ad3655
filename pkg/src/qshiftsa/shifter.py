"""Controlled cyclic shift (barrel shifter).

Rotation convention: shifting by ``k`` moves the symbol at position ``p`` to
``(p + k) mod N``. Stage ``t`` rotates by ``2**t mod N`` symbols when bit ``t``
of the shift register is set; the sign qubit picks the operand (0 rotates
``dataY``, 1 rotates ``dataX``). Shift values ``k >= N`` act as ``k mod N``.
"""

from __future__ import annotations

import math
from typing import Sequence

from .circuit import Circuit, CircuitBuilder, RegisterLayout


def rotation_transpositions(n: int, r: int) -> list[tuple[int, int]]:
    """Symbol transpositions whose ordered product rotates ``n`` slots by ``r``.

    Each cycle ``c, c - r, c - 2r, ...`` of the rotation is walked with
    adjacent swaps, giving ``n - gcd(n, r)`` transpositions in total.
    """
    r %= n
    if r == 0:
        return []
    g = math.gcd(n, r)
    out = []
    for c in range(g):
        cycle = [(c - i * r) % n for i in range(n // g)]
        out.extend(zip(cycle, cycle[1:]))
    return out


def stage_swap_network(
    t: int,
    target: Sequence[int],
    width: int | None = None,
    controls: Sequence[int] = (),
) -> Circuit:
    """SWAP network rotating the 2N-qubit register ``target`` by ``2**t`` symbols.

    With ``controls`` every SWAP becomes a controlled SWAP on those qubits.
    """
    target = list(target)
    if len(target) % 2:
        raise ValueError("data register must have an even number of qubits")
    if t < 0:
        raise ValueError("stage index must be non-negative")
    n = len(target) // 2
    b = CircuitBuilder(width if width is not None else max(list(target) + list(controls)) + 1)
    for p, q in rotation_transpositions(n, 1 << t):
        for bit in (0, 1):
            a_q, b_q = target[2 * p + bit], target[2 * q + bit]
            if controls:
                b.cswap(controls, a_q, b_q)
            else:
                b.swap(a_q, b_q)
    return b.build()


def build_controlled_shift(layout: RegisterLayout) -> Circuit:
    """Barrel shifter driven by the ``shift`` register and ``sign`` qubit.

    Per stage the two ancillas are set to ``shift[t] AND NOT sign`` and
    ``shift[t] AND sign``, drive singly-controlled SWAP chains on ``dataY`` and
    ``dataX`` respectively, and are reset afterwards. Layouts without a sign
    qubit only ever rotate ``dataY``, controlled by the shift bits directly.
    """
    data_x = list(layout["dataX"])
    data_y = list(layout["dataY"])
    shift = list(layout["shift"])
    n = len(data_x) // 2
    b = CircuitBuilder.for_layout(layout)
    if "sign" not in layout:
        # Unsigned layout: each shift bit drives the dataY stage directly.
        for t, sh in enumerate(shift):
            b.extend(stage_swap_network(t, data_y, layout.width, controls=(sh,)))
        return b.build()
    (sign,) = layout["sign"]
    anc_y, anc_x = layout["ancilla"]
    for t, sh in enumerate(shift):
        if (1 << t) % n == 0:
            continue
        b.ccx(sh, sign, anc_y, negated=(sign,))
        b.ccx(sh, sign, anc_x)
        b.extend(stage_swap_network(t, data_y, layout.width, controls=(anc_y,)))
        b.extend(stage_swap_network(t, data_x, layout.width, controls=(anc_x,)))
        b.ccx(sh, sign, anc_x)
        b.ccx(sh, sign, anc_y, negated=(sign,))
    return b.build()
