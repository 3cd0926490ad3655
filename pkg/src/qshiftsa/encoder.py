"""DNA sequences and their basis-state encodings.

Symbols map to two bits, ``A=00, T=01, C=10, G=11``. The rightmost code bit
is the low bit: symbol slot ``j`` of a data register occupies qubits
``[2j, 2j+1]`` with the low code bit on ``2j``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .circuit import Circuit, CircuitBuilder, RegisterLayout, address_width

ALPHABET = "ATCG"
CODES = {"A": 0b00, "T": 0b01, "C": 0b10, "G": 0b11}


class SequenceError(ValueError):
    """Invalid DNA sequence or sequence set."""


def encode_symbol(symbol: str) -> str:
    """Two-character code of a DNA symbol, e.g. ``encode_symbol("T") == "01"``."""
    try:
        return format(CODES[symbol], "02b")
    except KeyError:
        raise SequenceError(f"invalid DNA symbol {symbol!r}") from None


@dataclass(frozen=True)
class DnaSequence:
    symbols: str

    def __post_init__(self) -> None:
        if not self.symbols:
            raise SequenceError("empty sequence")
        bad = set(self.symbols) - set(ALPHABET)
        if bad:
            raise SequenceError(f"invalid symbol(s) {''.join(sorted(bad))!r} in {self.symbols!r}")

    def __len__(self) -> int:
        return len(self.symbols)

    def __str__(self) -> str:
        return self.symbols

    def rotated(self, k: int) -> DnaSequence:
        """Cyclic rotation moving the symbol at position p to (p + k) mod N."""
        n = len(self.symbols)
        k %= n
        return DnaSequence(self.symbols[n - k:] + self.symbols[:n - k])

    def to_int(self) -> int:
        """Register value encoding this sequence."""
        return sum(CODES[s] << (2 * j) for j, s in enumerate(self.symbols))


@dataclass(frozen=True)
class SequenceSet:
    sequences: tuple[DnaSequence, ...]

    def __post_init__(self) -> None:
        if not self.sequences:
            raise SequenceError("sequence set is empty")
        n = len(self.sequences[0])
        for i, s in enumerate(self.sequences):
            if len(s) != n:
                raise SequenceError(f"sequence {i} has length {len(s)}, expected {n}")

    @classmethod
    def from_strings(cls, seqs: Iterable[str]) -> SequenceSet:
        return cls(tuple(DnaSequence(s) for s in seqs))

    @property
    def n(self) -> int:
        return len(self.sequences[0])

    @property
    def m(self) -> int:
        return len(self.sequences)

    def __len__(self) -> int:
        return len(self.sequences)

    def __getitem__(self, i: int) -> DnaSequence:
        return self.sequences[i]

    def __iter__(self) -> Iterator[DnaSequence]:
        return iter(self.sequences)

    def strings(self) -> list[str]:
        return [s.symbols for s in self.sequences]


def _as_seq(seq: DnaSequence | str) -> DnaSequence:
    return seq if isinstance(seq, DnaSequence) else DnaSequence(seq)


def _builder(width: int | None, layout: RegisterLayout | None, qubits: Sequence[int]) -> CircuitBuilder:
    if layout is not None:
        return CircuitBuilder.for_layout(layout)
    return CircuitBuilder(width if width is not None else max(qubits) + 1)


def load_sequence(
    seq: DnaSequence | str,
    target: Sequence[int],
    width: int | None = None,
    layout: RegisterLayout | None = None,
) -> Circuit:
    """X-gate loader writing ``seq`` into the 2N-qubit register ``target``."""
    seq = _as_seq(seq)
    target = list(target)
    if len(target) != 2 * len(seq):
        raise SequenceError(f"target register has {len(target)} qubits, need {2 * len(seq)}")
    b = _builder(width, layout, target)
    for j, s in enumerate(seq.symbols):
        code = CODES[s]
        if code & 1:
            b.x(target[2 * j])
        if code & 2:
            b.x(target[2 * j + 1])
    return b.build()


def build_qrom(
    seqs: SequenceSet,
    addr: Sequence[int],
    data: Sequence[int],
    width: int | None = None,
    layout: RegisterLayout | None = None,
) -> Circuit:
    """Address-controlled loader mapping ``|a>|0>`` to ``|a>|D[a]>``.

    One multi-controlled X per set data bit; controls on the address bits
    that are 0 in ``a`` are negated. Addresses ``>= M`` load nothing. A single
    sequence is loaded unconditionally.
    """
    addr = list(addr)
    data = list(data)
    if len(data) != 2 * seqs.n:
        raise SequenceError(f"data register has {len(data)} qubits, need {2 * seqs.n}")
    if seqs.m > 1 and len(addr) != address_width(seqs.m):
        raise SequenceError(f"address register has {len(addr)} qubits, need {address_width(seqs.m)}")
    b = _builder(width, layout, addr + data)
    for a, seq in enumerate(seqs):
        neg = [q for bit, q in enumerate(addr) if not (a >> bit) & 1]
        value = seq.to_int()
        for pos, q in enumerate(data):
            if not (value >> pos) & 1:
                continue
            if seqs.m == 1:
                b.x(q)
            else:
                b.mcx(addr, q, negated=neg)
    return b.build()
