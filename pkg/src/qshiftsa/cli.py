"""Command-line front end.

Subcommands::

    qshiftsa correlate --seqs FILE --pair I,J [--out FILE]
    qshiftsa build     (--seqs FILE | --n N [--m M]) (--pair I,J | --multi) [--circuit KIND] ...
    qshiftsa simulate  --circuit FILE --backend sv|dd --shots S --seed SEED [--measure REGS]
    qshiftsa grover    --seqs FILE (--pair I,J | --multi) --tau T (--iters R | --bbht) ...
    qshiftsa bench     --config FILE [--parallel] [--out FILE]

CSV outputs start with a ``# schema=<name>/<version>`` line; JSON outputs
carry a ``schema`` field.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import bench
from .backends import BACKENDS, get_backend
from .circuit import CircuitBuilder, CircuitError, dumps, load
from .classical import hamming, match_count_fft, match_count_naive, rotate
from .distance import build_qshift_core
from .encoder import SequenceError, SequenceSet
from .grover import (
    SearchExhausted,
    SearchSpec,
    SimulationTimeout,
    _loads,
    bbht_search,
    build_iteration,
    grover_circuit,
    run_grover,
)
from .report import REPORT_SCHEMA, empty_report, iteration_report, synthetic_sequences
from .seqio import read_sequences
from .sv import CapacityError
from .transpile import MCX_MODES, transpile

CORRELATE_SCHEMA = "qshiftsa.correlate/1"
SIMULATE_SCHEMA = "qshiftsa.simulate/1"
EXHAUSTED_SCHEMA = "qshiftsa.search-exhausted/1"


class CliError(Exception):
    """User-facing error; printed without a traceback."""


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _pair(text: str) -> tuple[int, int]:
    try:
        i, j = (int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected I,J got {text!r}") from None
    return i, j


def _load_seqs(path: str) -> SequenceSet:
    try:
        return read_sequences(path)
    except SequenceError as exc:
        raise CliError(f"{path}: {exc}") from None
    except OSError as exc:
        raise CliError(str(exc)) from None


def _check_pair(seqs: SequenceSet, pair: tuple[int, int]) -> None:
    for idx in pair:
        if not 0 <= idx < seqs.m:
            raise CliError(f"sequence index {idx} out of range (file has {seqs.m} sequences)")


def _spec(args, seqs: SequenceSet, **kw) -> SearchSpec:
    try:
        if args.multi:
            return SearchSpec.for_sequences(seqs, "multi", tau=args.tau, **kw)
        _check_pair(seqs, args.pair)
        return SearchSpec(mode="pairwise", n=seqs.n, tau=args.tau, pair=args.pair,
                          signed=not args.unsigned, **kw)
    except ValueError as exc:
        raise CliError(str(exc)) from None


# -- correlate ----------------------------------------------------------------------

def correlate_rows(x: str, y: str) -> list[dict]:
    fft = match_count_fft(x, y)
    naive = match_count_naive(x, y)
    return [
        {"k": k, "C_fft": int(fft[k]), "C_naive": int(naive[k]), "d_H": hamming(x, rotate(y, k))}
        for k in range(len(x))
    ]


def correlate_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={CORRELATE_SCHEMA}\n")
    w = csv.DictWriter(buf, fieldnames=["k", "C_fft", "C_naive", "d_H"], lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def cmd_correlate(args) -> int:
    seqs = _load_seqs(args.seqs)
    _check_pair(seqs, args.pair)
    i, j = args.pair
    _emit(correlate_csv(correlate_rows(seqs.strings()[i], seqs.strings()[j])), args.out)
    return 0


# -- build --------------------------------------------------------------------------

def core_circuit(spec: SearchSpec, seqs: SequenceSet):
    """Pairwise data load, Hadamards on shift (and sign) qubits, one core application."""
    if spec.mode != "pairwise":
        raise CliError("--circuit core needs pairwise mode")
    lay = spec.layout
    b = CircuitBuilder.for_layout(lay)
    for c in _loads(spec, seqs):
        b.extend(c)
    for q in list(lay.get("sign")) + list(lay["shift"]):
        b.h(q)
    b.extend(build_qshift_core(lay))
    return b.build()


def cmd_build(args) -> int:
    if args.seqs:
        seqs = _load_seqs(args.seqs)
    else:
        if args.n is None:
            raise CliError("give --seqs FILE or --n N")
        m = args.m if args.multi else max(args.m, max(args.pair) + 1)
        seqs = synthetic_sequences(args.n, m, args.seed or 0)
    spec = _spec(args, seqs)
    basis, mcx = args.basis, args.mcx
    if args.iters == 0:
        circuit = build_iteration(spec, seqs).empty_like()
        report = empty_report(basis, mcx)
    else:
        if args.circuit == "core":
            circuit = core_circuit(spec, seqs)
        elif args.circuit == "grover":
            circuit = grover_circuit(spec, seqs, args.iters)
        else:
            circuit = build_iteration(spec, seqs).repeat(args.iters)
        report = iteration_report(spec, seqs, basis, mcx)
    if basis != "native":
        circuit = transpile(circuit, basis, mcx)
    report["iterations"] = args.iters
    report["circuit"] = {"kind": args.circuit, "qubits": circuit.width, "gates": len(circuit)}
    if args.out:
        Path(args.out).write_text(dumps(circuit))
    text = json.dumps(report, indent=2) + "\n"
    if args.report:
        Path(args.report).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# -- simulate -----------------------------------------------------------------------

def _measured_qubits(circuit, names: list[str] | None) -> tuple[list[str], list[int]]:
    lay = circuit.layout
    if names is None:
        if lay is None:
            return ["all"], list(range(circuit.width))
        names = [r for r in ("sign", "shift", "addrJ", "addrI", "distance") if r in lay]
    if lay is None:
        raise CliError("circuit has no register layout; cannot measure by name")
    qubits: list[int] = []
    for name in names:
        if name not in lay:
            raise CliError(f"unknown register {name!r}; have {', '.join(lay.names)}")
        qubits.extend(lay[name])
    return names, qubits


def _register_fields(lay, names, qubits, bits: str) -> dict:
    """Split an MSB-first bitstring over ``qubits`` into per-register integers."""
    value = int(bits, 2)
    out, pos = {}, 0
    for name in names:
        w = len(lay[name]) if lay is not None else len(qubits)
        out[name] = (value >> pos) & ((1 << w) - 1)
        pos += w
    return out


def cmd_simulate(args) -> int:
    try:
        circuit = load(args.circuit)
    except (OSError, CircuitError) as exc:
        raise CliError(str(exc)) from None
    names, qubits = _measured_qubits(circuit, args.measure.split(",") if args.measure else None)
    backend = get_backend(args.backend)
    try:
        state = backend.run(circuit)
    except CapacityError as exc:
        raise CliError(f"capacity error: {exc}") from None
    counts = state.sample(qubits, args.shots, args.seed)
    result = {
        "schema": SIMULATE_SCHEMA,
        "backend": args.backend,
        "qubits": circuit.width,
        "shots": args.shots,
        "seed": args.seed,
        "measured": names,
        "counts": dict(sorted(counts.items())),
        "fields": {b: _register_fields(circuit.layout, names, qubits, b) for b in sorted(counts)},
        "stats": backend.stats(state),
    }
    _emit(json.dumps(result, indent=2) + "\n", args.out)
    return 0


# -- grover -------------------------------------------------------------------------

def cmd_grover(args) -> int:
    seqs = _load_seqs(args.seqs)
    if args.bbht:
        spec = _spec(args, seqs, policy="bbht")
        try:
            result = bbht_search(spec, seqs, args.backend, max_rounds=args.max_rounds, seed=args.seed)
        except SearchExhausted as exc:
            doc = {
                "schema": EXHAUSTED_SCHEMA,
                "status": "exhausted",
                "rounds": exc.rounds,
                "iterations": exc.iterations,
                "message": str(exc),
            }
            _emit(json.dumps(doc, indent=2) + "\n", args.out)
            return 0
    else:
        spec = _spec(args, seqs, iterations=args.iters)
        try:
            result = run_grover(spec, seqs, args.backend, args.shots, args.seed,
                                basis=args.basis, mcx_mode=args.mcx, timeout=args.timeout)
        except CapacityError as exc:
            raise CliError(f"capacity error: {exc}") from None
        except SimulationTimeout as exc:
            raise CliError(str(exc)) from None
    doc = result.to_dict()
    doc["status"] = "ok"
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


# -- bench --------------------------------------------------------------------------

def cmd_bench(args) -> int:
    try:
        cells = bench.load_config(Path(args.config).read_text())
    except (OSError, ValueError) as exc:
        raise CliError(f"{args.config}: {exc}") from None
    if args.timeout is not None:
        for c in cells:
            c.timeout = args.timeout
    rows = bench.run_bench(cells, parallel=args.parallel)
    _emit(bench.rows_to_csv(rows), args.out)
    return 0


# -- parser -------------------------------------------------------------------------

def _add_mode(p: argparse.ArgumentParser) -> None:
    g = p.add_mutually_exclusive_group()
    g.add_argument("--pair", type=_pair, default=(0, 1), metavar="I,J", help="fixed sequence pair (default 0,1)")
    g.add_argument("--multi", action="store_true", help="search over all sequence pairs")
    p.add_argument("--unsigned", action="store_true", help="pairwise only: drop the sign qubit")
    p.add_argument("--tau", type=int, default=1, help="distance threshold (default 1)")


def _add_basis(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("--basis", choices=["native", "u_cx", "u_cx_mcx"], default=default)
    p.add_argument("--mcx", choices=MCX_MODES, default="no_ancilla")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qshiftsa", description="Shift-aware sequence distance search.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correlate", help="shift-wise match counts C(k) for one pair (CSV)")
    p.add_argument("--seqs", required=True)
    p.add_argument("--pair", type=_pair, default=(0, 1), metavar="I,J")
    p.add_argument("--out")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("build", help="build a circuit and its resource report")
    p.add_argument("--seqs")
    p.add_argument("--n", type=int, help="sequence length for synthetic data")
    p.add_argument("--m", type=int, default=2, help="number of synthetic sequences")
    p.add_argument("--seed", type=int, default=0)
    _add_mode(p)
    _add_basis(p, "u_cx")
    p.add_argument("--circuit", choices=["iteration", "grover", "core"], default="iteration")
    p.add_argument("--iters", type=int, default=1)
    p.add_argument("--out", help="serialized circuit file")
    p.add_argument("--report", help="JSON report file (default stdout)")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("simulate", help="run a serialized circuit and sample it")
    p.add_argument("--circuit", required=True)
    p.add_argument("--backend", choices=BACKENDS, default="dd")
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--measure", help="comma-separated register names")
    p.add_argument("--out")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("grover", help="Grover search for shifted near-matches")
    p.add_argument("--seqs", required=True)
    _add_mode(p)
    it = p.add_mutually_exclusive_group()
    it.add_argument("--iters", type=int, default=1)
    it.add_argument("--bbht", action="store_true", help="randomized schedule for unknown solution counts")
    p.add_argument("--max-rounds", type=int, default=40)
    p.add_argument("--backend", choices=BACKENDS, default="dd")
    p.add_argument("--shots", type=int, default=1024)
    p.add_argument("--seed", type=int, default=0)
    _add_basis(p, "native")
    p.add_argument("--timeout", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_grover)

    p = sub.add_parser("bench", help="timing sweep over (N, M, backend) cells (CSV)")
    p.add_argument("--config", required=True)
    p.add_argument("--timeout", type=float, help="override every cell's time limit")
    p.add_argument("--parallel", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"qshiftsa {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
