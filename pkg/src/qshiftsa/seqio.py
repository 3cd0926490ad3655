"""Reading sequence files: one sequence per line, or minimal FASTA."""

from __future__ import annotations

import os

from .encoder import ALPHABET, SequenceError, SequenceSet


def parse_sequences(text: str) -> SequenceSet:
    """Parse plain-text or FASTA content into a :class:`SequenceSet`.

    Plain text holds one sequence per non-blank line. If any line starts with
    ``>``, the input is read as FASTA and sequence lines are concatenated per
    record. Lowercase is accepted; ``#`` lines are comments. Errors cite the
    1-based line number.
    """
    lines = text.splitlines()
    fasta = any(line.startswith(">") for line in lines)
    records: list[list[str]] = []
    first_line: list[int] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if fasta and line.startswith(">"):
            records.append([])
            first_line.append(lineno)
            continue
        seq = line.upper()
        bad = sorted(set(seq) - set(ALPHABET))
        if bad:
            raise SequenceError(f"line {lineno}: invalid symbol(s) {''.join(bad)!r}")
        if fasta:
            if not records:
                raise SequenceError(f"line {lineno}: sequence data before first '>' header")
            records[-1].append(seq)
        else:
            records.append([seq])
            first_line.append(lineno)
    seqs = ["".join(r) for r in records]
    for s, lineno in zip(seqs, first_line):
        if not s:
            raise SequenceError(f"line {lineno}: empty record")
        if len(s) != len(seqs[0]):
            raise SequenceError(
                f"line {lineno}: sequence length {len(s)} differs from first sequence ({len(seqs[0])})"
            )
    if not seqs:
        raise SequenceError("no sequences found")
    return SequenceSet.from_strings(seqs)


def read_sequences(path: str | os.PathLike) -> SequenceSet:
    with open(path) as fh:
        return parse_sequences(fh.read())
