"""Resource reports for one Grover iteration and its sub-circuits."""

from __future__ import annotations

import random

from .circuit import Circuit
from .encoder import ALPHABET, SequenceSet
from .grover import SearchSpec, build_iteration, iteration_parts
from .resources import ResourceReport, count_resources
from .transpile import transpile

REPORT_SCHEMA = "qshiftsa.resource-report/1"


def synthetic_sequences(n: int, m: int, seed: int = 0) -> SequenceSet:
    """Deterministic pseudo-random sequence set for sizing runs without data."""
    rng = random.Random(seed)
    return SequenceSet.from_strings("".join(rng.choice(ALPHABET) for _ in range(n)) for _ in range(m))


def _report(c: Circuit, basis: str, mcx_mode: str) -> ResourceReport:
    if basis == "native":
        return count_resources(c, basis, mcx_mode)
    return count_resources(transpile(c, basis, mcx_mode), basis, mcx_mode)


def iteration_report(
    spec: SearchSpec,
    seqs: SequenceSet,
    basis: str = "u_cx",
    mcx_mode: str = "no_ancilla",
) -> dict:
    """Whole-iteration resources plus a per-sub-circuit breakdown.

    The breakdown has ``encoding_multiple`` (one address-controlled load;
    multi mode only), ``qshift-sa`` (shift + compare + adder) with its three
    parts, ``oracle`` and ``diffuser``.
    """
    parts = iteration_parts(spec, seqs)
    core = parts["shift"] + parts["compare"] + parts["adder"]
    breakdown: dict = {}
    if "load_i" in parts:
        breakdown["encoding_multiple"] = _report(parts["load_i"], basis, mcx_mode).to_dict()
    qs = _report(core, basis, mcx_mode).to_dict()
    for name in ("shift", "compare", "adder"):
        qs[name] = _report(parts[name], basis, mcx_mode).to_dict()
    breakdown["qshift-sa"] = qs
    breakdown["oracle"] = _report(parts["oracle"], basis, mcx_mode).to_dict()
    breakdown["diffuser"] = _report(parts["diffuser"], basis, mcx_mode).to_dict()
    total = _report(build_iteration(spec, seqs), basis, mcx_mode)
    return {
        "schema": REPORT_SCHEMA,
        "mode": spec.mode,
        "N": spec.n,
        "M": spec.m if spec.mode == "multi" else None,
        "iteration": total.to_dict(),
        "breakdown": breakdown,
    }


def empty_report(basis: str = "u_cx", mcx_mode: str = "no_ancilla") -> dict:
    return {
        "schema": REPORT_SCHEMA,
        "mode": None,
        "N": None,
        "M": None,
        "iteration": count_resources(Circuit(0), basis, mcx_mode).to_dict(),
        "breakdown": {},
    }
