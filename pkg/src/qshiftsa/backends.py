"""Uniform front for the simulation backends."""

from __future__ import annotations

import time
from typing import Protocol, Sequence

import numpy as np

from . import dd, sv
from .circuit import Circuit

BACKENDS = ("sv", "dd")


class UnsupportedBackend(ValueError):
    pass


class State(Protocol):
    n: int

    def apply(self, g) -> State: ...
    def run(self, circuit: Circuit) -> State: ...
    def amplitude(self, index: int) -> complex: ...
    def probabilities(self, qubits: Sequence[int]) -> np.ndarray: ...
    def sample(self, qubits: Sequence[int], shots: int, seed: int | None = None) -> dict[str, int]: ...


class SVBackend:
    name = "sv"

    def __init__(self, cap: int = sv.DEFAULT_CAP):
        self.cap = cap
        self.last_seconds = 0.0

    def init(self, n: int) -> sv.StateVector:
        return sv.StateVector(n, cap=self.cap)

    def run(self, circuit: Circuit, state: sv.StateVector | None = None) -> sv.StateVector:
        state = state if state is not None else self.init(circuit.width)
        start = time.perf_counter()
        state.run(circuit)
        self.last_seconds = time.perf_counter() - start
        return state

    def copy(self, state: sv.StateVector) -> sv.StateVector:
        return state.copy()

    def stats(self, state) -> dict:
        return {"wall_seconds": self.last_seconds, "bytes": state.nbytes}


class DDBackend:
    name = "dd"

    def __init__(self, node_budget: int = dd.DEFAULT_NODE_BUDGET):
        self.node_budget = node_budget
        self.last_seconds = 0.0

    def init(self, n: int) -> dd.DDState:
        return dd.dd_init(n, dd.DDPackage(self.node_budget))

    def run(self, circuit: Circuit, state: dd.DDState | None = None) -> dd.DDState:
        state = state if state is not None else self.init(circuit.width)
        start = time.perf_counter()
        state.run(circuit)
        self.last_seconds = time.perf_counter() - start
        return state

    def copy(self, state: dd.DDState) -> dd.DDState:
        # Roots are immutable edges, so a copy shares the whole diagram.
        return dd.DDState(state.n, state.root, state.package)

    def stats(self, state) -> dict:
        d = state.stats()
        d["wall_seconds"] = self.last_seconds
        return d


def get_backend(name: str, **options) -> SVBackend | DDBackend:
    if name == "sv":
        return SVBackend(**options)
    if name == "dd":
        return DDBackend(**options)
    raise UnsupportedBackend(f"unsupported backend {name!r}; expected one of {BACKENDS}")
