"""Classical reference computations.

Shift convention (shared with the circuits): rotating by ``k`` moves the
symbol at position ``p`` to ``(p + k) mod N``, so the match score is

    C[k] = #{ i : x[i] == y[(i - k) mod N] }

and ``hamming(x, rotate(y, k)) == N - C[k]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .circuit import address_width, shift_width
from .encoder import ALPHABET, DnaSequence, SequenceSet


def _s(x: DnaSequence | str) -> str:
    return x.symbols if isinstance(x, DnaSequence) else str(x)


def rotate(seq: DnaSequence | str, k: int) -> str:
    s = _s(seq)
    n = len(s)
    k %= n
    return s[n - k:] + s[:n - k]


def hamming(x: DnaSequence | str, y: DnaSequence | str) -> int:
    x, y = _s(x), _s(y)
    if len(x) != len(y):
        raise ValueError(f"length mismatch: {len(x)} vs {len(y)}")
    return sum(a != b for a, b in zip(x, y))


def edit_distance(x: DnaSequence | str, y: DnaSequence | str) -> int:
    """Levenshtein distance (unit insert/delete/substitute), O(len(x)*len(y)) DP."""
    x, y = _s(x), _s(y)
    prev = list(range(len(y) + 1))
    for i, a in enumerate(x, start=1):
        cur = [i]
        for j, b in enumerate(y, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a != b)))
        prev = cur
    return prev[-1]


def match_count_naive(x: DnaSequence | str, y: DnaSequence | str) -> np.ndarray:
    x, y = _s(x), _s(y)
    n = len(x)
    if len(y) != n:
        raise ValueError(f"length mismatch: {n} vs {len(y)}")
    return np.array(
        [sum(x[i] == y[(i - k) % n] for i in range(n)) for k in range(n)], dtype=np.int64
    )


def one_hot(seq: DnaSequence | str) -> np.ndarray:
    """``(4, N)`` indicator matrix, one row per symbol of :data:`ALPHABET`."""
    s = _s(seq)
    arr = np.frombuffer(s.encode(), dtype=np.uint8)
    return np.stack([arr == ord(a) for a in ALPHABET]).astype(float)


def match_count_fft(x: DnaSequence | str, y: DnaSequence | str) -> np.ndarray:
    """Match score for every shift via per-symbol FFT correlation.

    Power-of-two ``N`` uses the period-N transform directly; otherwise the
    channels are zero-padded to a power of two ``>= 2N - 1`` and the linear
    correlation is folded back modulo ``N``.
    """
    u, v = one_hot(x), one_hot(y)
    n = u.shape[1]
    if v.shape[1] != n:
        raise ValueError(f"length mismatch: {n} vs {v.shape[1]}")
    if n & (n - 1) == 0:
        c = np.fft.ifft(np.fft.fft(u, axis=1) * np.conj(np.fft.fft(v, axis=1)), axis=1).real.sum(axis=0)
    else:
        size = 1 << math.ceil(math.log2(2 * n - 1))
        lin = np.fft.ifft(
            np.fft.fft(u, size, axis=1) * np.conj(np.fft.fft(v, size, axis=1)), axis=1
        ).real.sum(axis=0)
        # lin[k mod size] holds the lag-k term for k in (-(N-1), N-1).
        c = np.array([lin[k] + (lin[(k - n) % size] if k else 0.0) for k in range(n)])
    return np.rint(c).astype(np.int64)


def candidate_distance(seqs: SequenceSet | Sequence[str], i: int, j: int, k: int, sign: int) -> int:
    """Distance the core computes for candidate ``(i, j, k, sign)``.

    ``sign == 0`` rotates the second operand ``S_j``; ``sign == 1`` rotates ``S_i``.
    """
    strs = seqs.strings() if isinstance(seqs, SequenceSet) else list(seqs)
    x, y = strs[i], strs[j]
    if sign:
        return hamming(rotate(x, k), y)
    return hamming(x, rotate(y, k))


@dataclass(frozen=True)
class Candidate:
    i: int
    j: int
    k: int
    sign: int
    d: int


def scan_candidates(
    seqs: SequenceSet | Sequence[str],
    tau: int,
    pair: tuple[int, int] | None = None,
    signed: bool = True,
) -> list[Candidate]:
    """Every search-register value whose distance lies in ``[1, tau]``.

    Enumerates exactly the values the quantum search register can hold:
    ordered pairs over the address range (or the fixed ``pair``), every shift
    register value ``k < 2**s`` and both signs.
    """
    if not isinstance(seqs, SequenceSet):
        seqs = SequenceSet.from_strings(seqs)
    n = seqs.n
    ks = range(1 << shift_width(n))
    signs = (0, 1) if signed else (0,)
    if pair is None:
        idx = range(min(seqs.m, 1 << address_width(seqs.m)))
        pairs = [(i, j) for i in idx for j in idx]
    else:
        pairs = [pair]
    out = []
    for i, j in pairs:
        for k in ks:
            for sign in signs:
                d = candidate_distance(seqs, i, j, k, sign)
                if 1 <= d <= tau:
                    out.append(Candidate(i, j, k, sign, d))
    return out
