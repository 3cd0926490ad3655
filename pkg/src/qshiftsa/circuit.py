"""Gate-level circuit representation.

A :class:`Circuit` is an immutable, ordered list of :class:`GateApp` over a
fixed number of qubits, optionally annotated with a :class:`RegisterLayout`
that names qubit ranges. Qubit 0 is the least-significant bit of a basis
index everywhere in this package.

The text format written by :func:`dumps` is line oriented::

    QSHIFT-CIRCUIT 1
    width 5
    register shift 3 2
    H ctrls=[] negs=[] tgts=[3] params=[]
    MCX ctrls=[3,4] negs=[4] tgts=[0] params=[]
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence


class CircuitError(ValueError):
    """Raised for malformed gates, circuits or layouts."""


class GateKind(enum.Enum):
    X = "X"
    H = "H"
    U = "U"
    CX = "CX"
    CCX = "CCX"
    MCX = "MCX"
    SWAP = "SWAP"
    CSWAP = "CSWAP"
    P = "P"
    CP = "CP"
    MCZ = "MCZ"


# kind -> (min controls, max controls, targets, params)
_ARITY = {
    GateKind.X: (0, 0, 1, 0),
    GateKind.H: (0, 0, 1, 0),
    GateKind.U: (0, 0, 1, 3),
    GateKind.P: (0, 0, 1, 1),
    GateKind.CX: (1, 1, 1, 0),
    GateKind.CCX: (2, 2, 1, 0),
    GateKind.MCX: (1, None, 1, 0),
    GateKind.SWAP: (0, 0, 2, 0),
    GateKind.CSWAP: (1, None, 2, 0),
    GateKind.CP: (1, 1, 1, 1),
    GateKind.MCZ: (1, None, 1, 0),
}

SELF_INVERSE = frozenset(
    {GateKind.X, GateKind.H, GateKind.CX, GateKind.CCX, GateKind.MCX,
     GateKind.SWAP, GateKind.CSWAP, GateKind.MCZ}
)
# Gates whose unitary is diagonal in the computational basis.
DIAGONAL = frozenset({GateKind.P, GateKind.CP, GateKind.MCZ})


@dataclass(frozen=True, slots=True)
class GateApp:
    """One gate application.

    ``negated`` lists the controls that fire on ``|0>`` instead of ``|1>``.
    """

    kind: GateKind
    controls: tuple[int, ...] = ()
    targets: tuple[int, ...] = ()
    negated: tuple[int, ...] = ()
    params: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        lo, hi, ntgt, npar = _ARITY[self.kind]
        nc = len(self.controls)
        if nc < lo or (hi is not None and nc > hi):
            raise CircuitError(f"{self.kind.value} takes {lo}..{hi} controls, got {nc}")
        if len(self.targets) != ntgt:
            raise CircuitError(f"{self.kind.value} takes {ntgt} targets, got {len(self.targets)}")
        if len(self.params) != npar:
            raise CircuitError(f"{self.kind.value} takes {npar} params, got {len(self.params)}")
        qubits = self.controls + self.targets
        if len(set(qubits)) != len(qubits):
            raise CircuitError(f"repeated qubit in {self}")
        if any(q < 0 for q in qubits):
            raise CircuitError(f"negative qubit index in {self}")
        if not set(self.negated) <= set(self.controls):
            raise CircuitError("negated controls must be a subset of controls")
        if not all(math.isfinite(p) for p in self.params):
            raise CircuitError("gate angles must be finite")

    @property
    def qubits(self) -> tuple[int, ...]:
        return self.controls + self.targets

    def adjoint(self) -> GateApp:
        if self.kind in SELF_INVERSE:
            return self
        if self.kind is GateKind.U:
            theta, phi, lam = self.params
            return GateApp(self.kind, self.controls, self.targets, self.negated, (-theta, -lam, -phi))
        return GateApp(self.kind, self.controls, self.targets, self.negated, (-self.params[0],))

    def remap(self, mapping: Sequence[int]) -> GateApp:
        return GateApp(
            self.kind,
            tuple(mapping[q] for q in self.controls),
            tuple(mapping[q] for q in self.targets),
            tuple(sorted(mapping[q] for q in self.negated)),
            self.params,
        )


@dataclass(frozen=True)
class RegisterLayout:
    """Named, disjoint qubit ranges tiling ``[0, width)``.

    Registers are stored as ``(name, start, size)`` in index order. Use
    :meth:`pairwise` or :meth:`multi` for the QShift-SA layouts.
    """

    registers: tuple[tuple[str, int, int], ...]

    def __post_init__(self) -> None:
        pos = 0
        seen = set()
        for name, start, size in self.registers:
            if name in seen:
                raise CircuitError(f"duplicate register {name!r}")
            if start != pos or size < 0:
                raise CircuitError(f"register {name!r} does not tile the qubit range")
            seen.add(name)
            pos += size

    @property
    def width(self) -> int:
        return sum(size for _, _, size in self.registers)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _, _ in self.registers)

    def __contains__(self, name: str) -> bool:
        return any(n == name for n, _, _ in self.registers)

    def __getitem__(self, name: str) -> range:
        for n, start, size in self.registers:
            if n == name:
                return range(start, start + size)
        raise KeyError(name)

    def get(self, name: str) -> range:
        """Like ``layout[name]`` but returns an empty range for absent roles."""
        return self[name] if name in self else range(0)

    def appended(self, name: str, size: int) -> RegisterLayout:
        return RegisterLayout(self.registers + ((name, self.width, size),))

    @classmethod
    def from_sizes(cls, sizes: Iterable[tuple[str, int]]) -> RegisterLayout:
        regs = []
        pos = 0
        for name, size in sizes:
            regs.append((name, pos, size))
            pos += size
        return cls(tuple(regs))

    @classmethod
    def pairwise(cls, n: int, signed: bool = True) -> RegisterLayout:
        """Two-sequence layout; ``signed=False`` drops the sign and shift ancillas."""
        return cls.from_sizes(_role_sizes(n, None, signed))

    @classmethod
    def multi(cls, n: int, m: int) -> RegisterLayout:
        return cls.from_sizes(_role_sizes(n, m))

    @property
    def search_qubits(self) -> list[int]:
        """Search-register qubits, low to high: sign, shift, addrJ, addrI."""
        out: list[int] = []
        for name in ("sign", "shift", "addrJ", "addrI"):
            out.extend(self.get(name))
        return out


def shift_width(n: int) -> int:
    return max(1, math.ceil(math.log2(n))) if n > 1 else 1


def distance_width(n: int) -> int:
    return math.ceil(math.log2(n + 1))


def address_width(m: int) -> int:
    return max(1, math.ceil(math.log2(m)))


def _role_sizes(n: int, m: int | None, signed: bool = True) -> list[tuple[str, int]]:
    if n < 1:
        raise CircuitError("sequence length must be >= 1")
    # Index order is chosen so that controls sit above their targets in the
    # decision-diagram variable order (root = highest qubit).
    sizes = [
        ("phase", 1),
        ("distance", distance_width(n)),
        ("mismatch", n),
        ("dataY", 2 * n),
        ("dataX", 2 * n),
        ("ancilla", 2),
        ("sign", 1),
        ("shift", shift_width(n)),
    ]
    if not signed:
        sizes = [(name, size) for name, size in sizes if name not in ("ancilla", "sign")]
    if m is not None:
        if m < 1:
            raise CircuitError("M must be >= 1")
        a = address_width(m)
        sizes += [("addrJ", a), ("addrI", a)]
    return sizes


@dataclass(frozen=True)
class Circuit:
    width: int
    gates: tuple[GateApp, ...] = ()
    layout: RegisterLayout | None = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.layout is not None and self.layout.width != self.width:
            raise CircuitError("layout width differs from circuit width")
        for g in self.gates:
            for q in g.qubits:
                if q >= self.width:
                    raise CircuitError(f"qubit {q} out of range for width {self.width}: {g}")

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[GateApp]:
        return iter(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        return compose(self, other)

    def inverse(self) -> Circuit:
        return inverse(self)

    def repeat(self, times: int) -> Circuit:
        return Circuit(self.width, self.gates * times, self.layout)

    def empty_like(self) -> Circuit:
        return Circuit(self.width, (), self.layout)


def compose(a: Circuit, b: Circuit) -> Circuit:
    """Append the gates of ``b`` after those of ``a``."""
    if a.width != b.width:
        raise CircuitError(f"width mismatch: {a.width} vs {b.width}")
    if a.layout is not None and b.layout is not None and a.layout != b.layout:
        raise CircuitError("layout mismatch")
    return Circuit(a.width, a.gates + b.gates, a.layout if a.layout is not None else b.layout)


def inverse(c: Circuit) -> Circuit:
    """Adjoint circuit: reversed order, each gate replaced by its adjoint."""
    return Circuit(c.width, tuple(g.adjoint() for g in reversed(c.gates)), c.layout)


class CircuitBuilder:
    """Mutable helper that accumulates gates and freezes into a :class:`Circuit`."""

    def __init__(self, width: int, layout: RegisterLayout | None = None):
        if layout is not None and layout.width != width:
            raise CircuitError("layout width differs from circuit width")
        self.width = width
        self.layout = layout
        self.gates: list[GateApp] = []

    @classmethod
    def for_layout(cls, layout: RegisterLayout) -> CircuitBuilder:
        return cls(layout.width, layout)

    def append(self, gate: GateApp) -> CircuitBuilder:
        self.gates.append(gate)
        return self

    def extend(self, gates: Iterable[GateApp] | Circuit) -> CircuitBuilder:
        if isinstance(gates, Circuit):
            if gates.width != self.width:
                raise CircuitError(f"width mismatch: {gates.width} vs {self.width}")
            gates = gates.gates
        self.gates.extend(gates)
        return self

    def x(self, q: int) -> CircuitBuilder:
        return self.append(GateApp(GateKind.X, (), (q,)))

    def h(self, q: int) -> CircuitBuilder:
        return self.append(GateApp(GateKind.H, (), (q,)))

    def u(self, q: int, theta: float, phi: float, lam: float) -> CircuitBuilder:
        return self.append(GateApp(GateKind.U, (), (q,), (), (theta, phi, lam)))

    def p(self, q: int, angle: float) -> CircuitBuilder:
        return self.append(GateApp(GateKind.P, (), (q,), (), (angle,)))

    def cx(self, c: int, t: int, negated: bool = False) -> CircuitBuilder:
        return self.append(GateApp(GateKind.CX, (c,), (t,), (c,) if negated else ()))

    def ccx(self, c0: int, c1: int, t: int, negated: Sequence[int] = ()) -> CircuitBuilder:
        return self.append(GateApp(GateKind.CCX, (c0, c1), (t,), tuple(sorted(negated))))

    def mcx(self, controls: Sequence[int], t: int, negated: Sequence[int] = ()) -> CircuitBuilder:
        return self.append(GateApp(GateKind.MCX, tuple(controls), (t,), tuple(sorted(negated))))

    def swap(self, a: int, b: int) -> CircuitBuilder:
        return self.append(GateApp(GateKind.SWAP, (), (a, b)))

    def cswap(self, controls: Sequence[int], a: int, b: int, negated: Sequence[int] = ()) -> CircuitBuilder:
        return self.append(GateApp(GateKind.CSWAP, tuple(controls), (a, b), tuple(sorted(negated))))

    def cp(self, c: int, t: int, angle: float) -> CircuitBuilder:
        return self.append(GateApp(GateKind.CP, (c,), (t,), (), (angle,)))

    def mcz(self, controls: Sequence[int], t: int, negated: Sequence[int] = ()) -> CircuitBuilder:
        return self.append(GateApp(GateKind.MCZ, tuple(controls), (t,), tuple(sorted(negated))))

    def build(self) -> Circuit:
        return Circuit(self.width, tuple(self.gates), self.layout)


# -- text serialization -----------------------------------------------------

FORMAT_HEADER = "QSHIFT-CIRCUIT 1"


def _fmt_list(values: Iterable) -> str:
    return "[" + ",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in values) + "]"


def dumps(c: Circuit) -> str:
    lines = [FORMAT_HEADER, f"width {c.width}"]
    if c.layout is not None:
        for name, start, size in c.layout.registers:
            lines.append(f"register {name} {start} {size}")
    for g in c.gates:
        lines.append(
            f"{g.kind.value} ctrls={_fmt_list(g.controls)} negs={_fmt_list(g.negated)} "
            f"tgts={_fmt_list(g.targets)} params={_fmt_list(float(p) for p in g.params)}"
        )
    return "\n".join(lines) + "\n"


def _parse_list(token: str, key: str, cast, lineno: int) -> tuple:
    prefix = key + "=["
    if not (token.startswith(prefix) and token.endswith("]")):
        raise CircuitError(f"line {lineno}: expected {key}=[...], got {token!r}")
    body = token[len(prefix):-1]
    return tuple(cast(v) for v in body.split(",")) if body else ()


def loads(text: str) -> Circuit:
    lines = text.splitlines()
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise CircuitError(f"line 1: missing header {FORMAT_HEADER!r}")
    width = None
    registers = []
    gates = []
    for lineno, raw in enumerate(lines[1:], start=2):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "width":
            width = int(parts[1])
        elif parts[0] == "register":
            registers.append((parts[1], int(parts[2]), int(parts[3])))
        else:
            try:
                kind = GateKind(parts[0])
            except ValueError:
                raise CircuitError(f"line {lineno}: unknown gate kind {parts[0]!r}") from None
            if len(parts) != 5:
                raise CircuitError(f"line {lineno}: malformed gate line")
            try:
                gate = GateApp(
                    kind,
                    _parse_list(parts[1], "ctrls", int, lineno),
                    _parse_list(parts[3], "tgts", int, lineno),
                    _parse_list(parts[2], "negs", int, lineno),
                    _parse_list(parts[4], "params", float, lineno),
                )
            except CircuitError as exc:
                raise CircuitError(f"line {lineno}: {exc}") from None
            gates.append(gate)
    if width is None:
        raise CircuitError("missing width line")
    layout = RegisterLayout(tuple(registers)) if registers else None
    return Circuit(width, tuple(gates), layout)


def save(c: Circuit, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(c))


def load(path) -> Circuit:
    with open(path) as fh:
        return loads(fh.read())
