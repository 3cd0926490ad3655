"""Shift-aware sequence distance screening with Grover search.

Circuit construction (data loading, controlled cyclic shifts, Hamming
distance accumulation, threshold oracle, diffuser), a state-vector and a
decision-diagram simulator, classical reference routines and a CLI.
"""

from .circuit import Circuit, CircuitBuilder, GateApp, GateKind, RegisterLayout
from .classical import edit_distance, hamming, match_count_fft, match_count_naive, scan_candidates
from .encoder import DnaSequence, SequenceSet
from .grover import SearchResult, SearchSpec, bbht_search, grover_circuit, run_grover

__version__ = "0.1.0"

__all__ = [
    "Circuit",
    "CircuitBuilder",
    "DnaSequence",
    "GateApp",
    "GateKind",
    "RegisterLayout",
    "SearchResult",
    "SearchSpec",
    "SequenceSet",
    "bbht_search",
    "edit_distance",
    "grover_circuit",
    "hamming",
    "match_count_fft",
    "match_count_naive",
    "run_grover",
    "scan_candidates",
]
