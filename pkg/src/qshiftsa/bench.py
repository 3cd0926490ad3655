"""Timing sweeps over (N, M, backend) cells.

Each cell runs in a forked child process so that a per-cell time limit can be
enforced by terminating it. The child builds its circuits first and only then
starts the clock: reported times cover backend execution only.
"""

from __future__ import annotations

import csv
import io
import json
import multiprocessing as mp
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .backends import get_backend
from .circuit import RegisterLayout
from .grover import SearchSpec, build_finalization, build_iteration, build_preparation
from .report import synthetic_sequences
from .sv import DEFAULT_CAP
from .transpile import transpile

BENCH_SCHEMA = "qshiftsa.bench/1"
FIELDS = ["N", "M", "qubits", "backend", "wall_seconds", "status", "peak_nodes"]


@dataclass
class Cell:
    n: int
    m: int
    backend: str
    iterations: int = 1
    mode: str = "multi"
    timeout: float = 3600.0
    basis: str = "native"
    seed: int = 0

    @property
    def layout(self) -> RegisterLayout:
        if self.mode == "multi":
            return RegisterLayout.multi(self.n, self.m)
        return RegisterLayout.pairwise(self.n)


def load_config(text: str) -> list[Cell]:
    """Parse a JSON bench config.

    ``{"timeout": 60, "iterations": 1, "cells": [{"N": 3, "M": 4, "backend": "dd"}, ...]}``;
    per-cell keys override the top-level defaults.
    """
    cfg = json.loads(text)
    defaults = {k: cfg[k] for k in ("timeout", "iterations", "mode", "basis", "seed") if k in cfg}
    cells = []
    for i, raw in enumerate(cfg.get("cells", [])):
        d = dict(defaults)
        d.update({k.lower() if k in ("N", "M") else k: v for k, v in raw.items()})
        try:
            cells.append(Cell(**d))
        except TypeError as exc:
            raise ValueError(f"cell {i}: {exc}") from None
    return cells


def _child(cell: Cell, conn) -> None:
    try:
        seqs = synthetic_sequences(cell.n, cell.m, cell.seed)
        if cell.mode == "multi":
            spec = SearchSpec.for_sequences(seqs, "multi", tau=1, iterations=cell.iterations)
        else:
            spec = SearchSpec(mode="pairwise", n=cell.n, tau=1, iterations=cell.iterations)
        circuits = [build_preparation(spec, seqs)]
        circuits += [build_iteration(spec, seqs)] * cell.iterations
        circuits.append(build_finalization(spec, seqs))
        if cell.basis != "native":
            circuits = [transpile(c, cell.basis) for c in circuits]
        backend = get_backend(cell.backend)
        conn.send(("start", None))
        start = time.perf_counter()
        state = None
        for c in circuits:
            state = backend.run(c, state)
        elapsed = time.perf_counter() - start
        peak = state.package.stats.peak_nodes if cell.backend == "dd" else ""
        conn.send(("done", (elapsed, peak)))
    except MemoryError as exc:
        conn.send(("capacity", str(exc)))
    except Exception as exc:  # pragma: no cover - reported as data
        conn.send(("error", f"{type(exc).__name__}: {exc}"))
    finally:
        conn.close()


def run_cell(cell: Cell) -> dict:
    qubits = cell.layout.width
    row = {"N": cell.n, "M": cell.m, "qubits": qubits, "backend": cell.backend, "peak_nodes": ""}
    if cell.backend not in ("sv", "dd"):
        return {**row, "wall_seconds": "UNSUPPORTED", "status": "UNSUPPORTED"}
    if cell.backend == "sv" and qubits > DEFAULT_CAP:
        return {**row, "wall_seconds": "CAPACITY", "status": "CAPACITY"}
    ctx = mp.get_context("fork")
    parent, child = ctx.Pipe(duplex=False)
    proc = ctx.Process(target=_child, args=(cell, child), daemon=True)
    proc.start()
    child.close()
    try:
        # Circuit construction is not timed; wait for the child's start signal.
        while not parent.poll(1.0):
            if not proc.is_alive():
                break
        if not parent.poll(0):
            return {**row, "wall_seconds": "ERROR", "status": "ERROR"}
        kind, payload = parent.recv()
        if kind != "start":
            status = "CAPACITY" if kind == "capacity" else "ERROR"
            return {**row, "wall_seconds": status, "status": status}
        if not parent.poll(cell.timeout):
            return {**row, "wall_seconds": f">{cell.timeout:g}", "status": "TIMEOUT"}
        kind, payload = parent.recv()
        if kind == "done":
            elapsed, peak = payload
            return {**row, "wall_seconds": f"{elapsed:.6f}", "status": "OK", "peak_nodes": peak}
        status = "CAPACITY" if kind == "capacity" else "ERROR"
        return {**row, "wall_seconds": status, "status": status}
    except EOFError:
        return {**row, "wall_seconds": "ERROR", "status": "ERROR"}
    finally:
        if proc.is_alive():
            proc.terminate()
        proc.join(5)
        if proc.is_alive():  # pragma: no cover
            proc.kill()
            proc.join()
        parent.close()


def run_bench(cells: list[Cell], parallel: bool = False) -> list[dict]:
    if parallel:
        with ThreadPoolExecutor(max_workers=max(1, len(cells))) as pool:
            return list(pool.map(run_cell, cells))
    return [run_cell(c) for c in cells]


def rows_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    buf.write(f"# schema={BENCH_SCHEMA}\n")
    w = csv.DictWriter(buf, fieldnames=FIELDS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k, "") for k in FIELDS})
    return buf.getvalue()


def read_csv(text: str) -> tuple[str, list[dict]]:
    """Split a versioned CSV into ``(schema, rows)``."""
    lines = text.splitlines()
    if not lines or not lines[0].startswith("# schema="):
        raise ValueError("missing schema header line")
    schema = lines[0][len("# schema="):]
    return schema, list(csv.DictReader(lines[1:]))
