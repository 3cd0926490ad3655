"""Grover search over (pair, shift, sign) candidates.

One iteration is: load the candidate sequences (multi mode), run the
distance core, flip the phase of states with ``1 <= distance <= tau``,
uncompute the core and the loads, then reflect the search register about its
uniform superposition. The search register, low to high, is
``sign, shift, addrJ, addrI``; outcome bitstrings print it most-significant
first.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .backends import DDBackend, SVBackend, get_backend
from .circuit import Circuit, CircuitBuilder, RegisterLayout, distance_width
from .classical import candidate_distance, scan_candidates
from .distance import build_qshift_core, core_parts
from .encoder import SequenceSet, build_qrom, load_sequence
from .transpile import transpile

RESULT_SCHEMA = "qshiftsa.search-result/1"
BBHT_LAMBDA = 6 / 5


class SearchExhausted(RuntimeError):
    """BBHT ran out of rounds without a verified solution (possibly none exists)."""

    def __init__(self, rounds: int, iterations: int):
        super().__init__(f"no verified solution after {rounds} rounds ({iterations} Grover iterations)")
        self.rounds = rounds
        self.iterations = iterations


class SimulationTimeout(RuntimeError):
    pass


@dataclass(frozen=True)
class SearchSpec:
    """What to search for and how.

    ``mode`` is ``"pairwise"`` (fixed ``pair`` loaded once) or ``"multi"``
    (both sequence indices in superposition; ``m`` must be a power of two).
    """

    mode: str
    n: int
    m: int = 2
    tau: int = 1
    iterations: int = 0
    policy: str = "fixed"
    pair: tuple[int, int] = (0, 1)
    signed: bool = True

    def __post_init__(self) -> None:
        if self.mode not in ("pairwise", "multi"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.policy not in ("fixed", "bbht"):
            raise ValueError(f"unknown iteration policy {self.policy!r}")
        if not 1 <= self.tau <= self.n:
            raise ValueError(f"threshold must satisfy 1 <= tau <= N={self.n}, got {self.tau}")
        if self.iterations < 0:
            raise ValueError("iteration count must be non-negative")
        if self.mode == "multi":
            if self.m < 2 or self.m & (self.m - 1):
                raise ValueError(f"multi mode needs M >= 2 and a power of two, got {self.m}")
            if not self.signed:
                raise ValueError("multi mode always uses the sign qubit")

    @classmethod
    def for_sequences(cls, seqs: SequenceSet, mode: str = "multi", **kw) -> SearchSpec:
        return cls(mode=mode, n=seqs.n, m=seqs.m, **kw)

    @property
    def layout(self) -> RegisterLayout:
        if self.mode == "multi":
            return RegisterLayout.multi(self.n, self.m)
        return RegisterLayout.pairwise(self.n, signed=self.signed)

    @property
    def search_bits(self) -> int:
        return len(self.layout.search_qubits)

    @property
    def space(self) -> int:
        return 1 << self.search_bits


# -- circuit pieces --------------------------------------------------------------

def build_oracle(layout: RegisterLayout, tau: int) -> Circuit:
    """Phase flip (via the |-> phase qubit) for every distance value in ``[1, tau]``."""
    dist = list(layout["distance"])
    (phase,) = layout["phase"]
    if tau < 0 or tau >= 1 << len(dist):
        raise ValueError(f"threshold {tau} not representable in {len(dist)} distance qubits")
    b = CircuitBuilder.for_layout(layout)
    for v in range(1, tau + 1):
        b.mcx(dist, phase, negated=[q for bit, q in enumerate(dist) if not (v >> bit) & 1])
    return b.build()


def build_diffuser(search: Sequence[int], width: int, layout: RegisterLayout | None = None) -> Circuit:
    """Reflection about the uniform superposition of the ``search`` qubits."""
    search = list(search)
    if not search:
        raise ValueError("empty search register")
    b = CircuitBuilder(width, layout)
    for q in search:
        b.h(q)
    for q in search:
        b.x(q)
    if len(search) == 1:
        b.p(search[0], math.pi)
    else:
        b.mcz(search[1:], search[0])
    for q in search:
        b.x(q)
    for q in search:
        b.h(q)
    return b.build()


def _loads(spec: SearchSpec, seqs: SequenceSet) -> tuple[Circuit, Circuit]:
    lay = spec.layout
    if spec.mode == "multi":
        if seqs.m != spec.m or seqs.n != spec.n:
            raise ValueError("sequence set does not match the search spec")
        return (build_qrom(seqs, lay["addrI"], lay["dataX"], layout=lay),
                build_qrom(seqs, lay["addrJ"], lay["dataY"], layout=lay))
    i, j = spec.pair
    if not (0 <= i < seqs.m and 0 <= j < seqs.m):
        raise ValueError(f"pair {spec.pair} out of range for {seqs.m} sequences")
    if seqs.n != spec.n:
        raise ValueError("sequence length does not match the search spec")
    return (load_sequence(seqs[i], lay["dataX"], layout=lay),
            load_sequence(seqs[j], lay["dataY"], layout=lay))


def iteration_parts(spec: SearchSpec, seqs: SequenceSet) -> dict[str, Circuit]:
    """Named sub-circuits of one iteration (loads only in multi mode)."""
    lay = spec.layout
    parts: dict[str, Circuit] = {}
    if spec.mode == "multi":
        parts["load_i"], parts["load_j"] = _loads(spec, seqs)
    parts.update(core_parts(lay))
    parts["oracle"] = build_oracle(lay, spec.tau)
    parts["diffuser"] = build_diffuser(lay.search_qubits, lay.width, lay)
    return parts


def build_iteration(spec: SearchSpec, seqs: SequenceSet) -> Circuit:
    lay = spec.layout
    b = CircuitBuilder.for_layout(lay)
    loads = None
    if spec.mode == "multi":
        loads = _loads(spec, seqs)
        b.extend(loads[0]).extend(loads[1])
    core = build_qshift_core(lay)
    b.extend(core)
    b.extend(build_oracle(lay, spec.tau))
    b.extend(core.inverse())
    if loads is not None:
        b.extend(loads[1].inverse()).extend(loads[0].inverse())
    b.extend(build_diffuser(lay.search_qubits, lay.width, lay))
    return b.build()


def build_preparation(spec: SearchSpec, seqs: SequenceSet) -> Circuit:
    """Pairwise data load, phase qubit to |->, Hadamards on the search register."""
    lay = spec.layout
    b = CircuitBuilder.for_layout(lay)
    if spec.mode == "pairwise":
        for c in _loads(spec, seqs):
            b.extend(c)
    (phase,) = lay["phase"]
    b.x(phase).h(phase)
    for q in lay.search_qubits:
        b.h(q)
    return b.build()


def build_finalization(spec: SearchSpec, seqs: SequenceSet) -> Circuit:
    """Undo the phase-qubit preparation and the pairwise data load."""
    lay = spec.layout
    b = CircuitBuilder.for_layout(lay)
    (phase,) = lay["phase"]
    b.h(phase).x(phase)
    if spec.mode == "pairwise":
        for c in reversed(_loads(spec, seqs)):
            b.extend(c.inverse())
    return b.build()


def grover_circuit(spec: SearchSpec, seqs: SequenceSet, iterations: int | None = None) -> Circuit:
    r = spec.iterations if iterations is None else iterations
    it = build_iteration(spec, seqs)
    return build_preparation(spec, seqs) + it.repeat(r) + build_finalization(spec, seqs)


# -- decoding and verification ------------------------------------------------------

def decode(value: int, spec: SearchSpec) -> tuple[int, int, int, int]:
    """Search-register integer -> ``(i, j, k, sign)``."""
    lay = spec.layout
    pos = 0
    fields = {}
    for name in ("sign", "shift", "addrJ", "addrI"):
        w = len(lay.get(name))
        fields[name] = (value >> pos) & ((1 << w) - 1)
        pos += w
    if spec.mode == "pairwise":
        i, j = spec.pair
    else:
        i, j = fields["addrI"], fields["addrJ"]
    return i, j, fields["shift"], fields["sign"]


def is_solution(spec: SearchSpec, seqs: SequenceSet, value: int) -> tuple[bool, int]:
    i, j, k, sign = decode(value, spec)
    d = candidate_distance(seqs, i, j, k, sign)
    return 1 <= d <= spec.tau, d


def solution_values(spec: SearchSpec, seqs: SequenceSet) -> list[int]:
    return [v for v in range(spec.space) if is_solution(spec, seqs, v)[0]]


def analytic_success(n_solutions: int, space: int, iterations: int) -> float:
    """``sin^2((2r+1) theta)`` with ``sin^2 theta = n_solutions / space``."""
    theta = math.asin(math.sqrt(n_solutions / space))
    return math.sin((2 * iterations + 1) * theta) ** 2


def optimal_iterations(n_solutions: int, space: int) -> int:
    theta = math.asin(math.sqrt(n_solutions / space))
    return max(0, math.floor(math.pi / (4 * theta)))


# -- results ------------------------------------------------------------------------

@dataclass
class Outcome:
    bits: str
    i: int
    j: int
    k: int
    sign: int
    count: int
    distance: int
    verified: bool


@dataclass
class SearchResult:
    shots: int
    iterations: int
    outcomes: list[Outcome]
    policy: str = "fixed"
    rounds: int = 0
    backend: str = ""
    stats: dict = field(default_factory=dict)

    def counts(self) -> dict[str, int]:
        return {o.bits: o.count for o in self.outcomes}

    def verified_outcomes(self) -> list[Outcome]:
        return [o for o in self.outcomes if o.verified]

    def to_dict(self) -> dict:
        return {
            "schema": RESULT_SCHEMA,
            "shots": self.shots,
            "iterations": self.iterations,
            "policy": self.policy,
            "rounds": self.rounds,
            "backend": self.backend,
            "outcomes": [asdict(o) for o in self.outcomes],
            "stats": self.stats,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)


def _outcomes(spec: SearchSpec, seqs: SequenceSet, counts: dict[str, int]) -> list[Outcome]:
    out = []
    for bits, count in counts.items():
        value = int(bits, 2)
        ok, d = is_solution(spec, seqs, value)
        i, j, k, sign = decode(value, spec)
        out.append(Outcome(bits, i, j, k, sign, count, d, ok))
    out.sort(key=lambda o: (-o.count, o.bits))
    return out


# -- drivers ------------------------------------------------------------------------

def _backend(backend) -> SVBackend | DDBackend:
    return get_backend(backend) if isinstance(backend, str) else backend


def _maybe_transpile(c: Circuit, basis: str | None, mcx_mode: str) -> Circuit:
    if basis is None or basis == "native":
        return c
    t = transpile(c, basis, mcx_mode)
    return t


class _Runner:
    """Incrementally advances a Grover state so that iteration counts can be revisited."""

    def __init__(self, spec, seqs, backend, basis=None, mcx_mode="no_ancilla", deadline=None):
        self.spec = spec
        self.seqs = seqs
        self.backend = _backend(backend)
        self.prep = _maybe_transpile(build_preparation(spec, seqs), basis, mcx_mode)
        self.iter = _maybe_transpile(build_iteration(spec, seqs), basis, mcx_mode)
        self.fin = _maybe_transpile(build_finalization(spec, seqs), basis, mcx_mode)
        self.deadline = deadline
        self.search = spec.layout.search_qubits
        self.state = None
        self.done = 0
        self.seconds = 0.0
        self._dist: dict[int, np.ndarray] = {}

    def _run(self, circuit: Circuit, state):
        if self.deadline is None:
            start = time.perf_counter()
            state = self.backend.run(circuit, state)
            self.seconds += time.perf_counter() - start
            return state
        if state is None:
            state = self.backend.init(circuit.width)
        start = time.perf_counter()
        for g in circuit.gates:
            state.apply(g)
            if time.perf_counter() > self.deadline:
                raise SimulationTimeout("simulation exceeded its time limit")
        self.seconds += time.perf_counter() - start
        return state

    def state_after(self, r: int, keep: bool = True):
        """Final state after ``r`` iterations.

        With ``keep`` the pre-finalization state is retained (copied) so a
        later call with a larger ``r`` continues from it.
        """
        if self.state is None or r < self.done:
            self.state = self._run(self.prep, None)
            self.done = 0
        while self.done < r:
            self.state = self._run(self.iter, self.state)
            self.done += 1
        if keep:
            return self._run(self.fin, self.backend.copy(self.state))
        final = self._run(self.fin, self.state)
        self.state = None
        return final

    def distribution(self, r: int) -> np.ndarray:
        p = self._dist.get(r)
        if p is None:
            p = self.state_after(r).probabilities(self.search)
            self._dist[r] = p
        return p


def run_grover(
    spec: SearchSpec,
    seqs: SequenceSet,
    backend="dd",
    shots: int = 1024,
    seed: int | None = None,
    basis: str | None = None,
    mcx_mode: str = "no_ancilla",
    timeout: float | None = None,
) -> SearchResult:
    """Fixed-iteration Grover search, sampled ``shots`` times and classically verified."""
    deadline = None if timeout is None else time.perf_counter() + timeout
    runner = _Runner(spec, seqs, backend, basis, mcx_mode, deadline)
    state = runner.state_after(spec.iterations, keep=False)
    counts = state.sample(runner.search, shots, seed)
    stats = {"wall_seconds": runner.seconds}
    if isinstance(runner.backend, DDBackend):
        stats.update(state.stats())
        stats["wall_seconds"] = runner.seconds
    return SearchResult(
        shots=shots,
        iterations=spec.iterations,
        outcomes=_outcomes(spec, seqs, counts),
        policy="fixed",
        backend=runner.backend.name,
        stats=stats,
    )


def bbht_search(
    spec: SearchSpec,
    seqs: SequenceSet,
    backend="dd",
    max_rounds: int = 40,
    seed: int | None = None,
    runner: _Runner | None = None,
) -> SearchResult:
    """Randomized iteration schedule for an unknown number of solutions.

    Round ``t`` draws ``j`` uniformly from ``[0, ceil(m))``, runs ``j``
    iterations, measures once and verifies the outcome classically. On
    failure ``m <- min(6/5 * m, sqrt(space))``. Pass a shared ``runner`` to
    reuse simulated states across many seeded searches of the same instance.
    """
    runner = runner or _Runner(spec, seqs, backend)
    rng = np.random.default_rng(seed)
    cap = math.sqrt(spec.space)
    m = 1.0
    total = 0
    width = spec.search_bits
    for rnd in range(1, max_rounds + 1):
        j = int(rng.integers(0, math.ceil(m)))
        total += j
        p = runner.distribution(j)
        value = int(rng.choice(len(p), p=p / p.sum()))
        ok, _ = is_solution(spec, seqs, value)
        if ok:
            bits = format(value, f"0{width}b")
            return SearchResult(
                shots=1,
                iterations=total,
                outcomes=_outcomes(spec, seqs, {bits: 1}),
                policy="bbht",
                rounds=rnd,
                backend=runner.backend.name,
            )
        m = min(BBHT_LAMBDA * m, cap)
    raise SearchExhausted(max_rounds, total)


def make_runner(spec: SearchSpec, seqs: SequenceSet, backend="dd", **kw) -> _Runner:
    return _Runner(spec, seqs, backend, **kw)


def reference_solutions(spec: SearchSpec, seqs: SequenceSet):
    """Classical solution list in the same encoding as the search register."""
    if spec.mode == "pairwise":
        return scan_candidates(seqs, spec.tau, pair=spec.pair, signed=spec.signed)
    return scan_candidates(seqs, spec.tau)


def distance_register_width(spec: SearchSpec) -> int:
    return distance_width(spec.n)
