"""Gate counting and ASAP depth."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from .circuit import Circuit


@dataclass(frozen=True)
class ResourceReport:
    qubits: int
    depth: int
    total_gates: int
    per_kind: dict[str, int] = field(default_factory=dict)
    basis: str = "native"
    mcx_mode: str = "no_ancilla"

    def to_dict(self) -> dict:
        return {
            "qubits": self.qubits,
            "depth": self.depth,
            "total_gates": self.total_gates,
            "per_kind": dict(sorted(self.per_kind.items())),
            "basis": self.basis,
            "mcx_mode": self.mcx_mode,
        }


def depth(c: Circuit) -> int:
    """Number of ASAP layers; two gates conflict iff they share a qubit."""
    level = [0] * c.width
    best = 0
    for g in c.gates:
        qs = g.qubits
        d = max(level[q] for q in qs) + 1
        for q in qs:
            level[q] = d
        if d > best:
            best = d
    return best


def count_resources(c: Circuit, basis: str = "native", mcx_mode: str = "no_ancilla") -> ResourceReport:
    per_kind = Counter(g.kind.value for g in c.gates)
    return ResourceReport(
        qubits=c.width,
        depth=depth(c),
        total_gates=len(c.gates),
        per_kind=dict(per_kind),
        basis=basis,
        mcx_mode=mcx_mode,
    )
