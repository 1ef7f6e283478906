"""Lexicographic comparison of binary strings with charged reads.

Strings are reached through accessors: :class:`MemoryString` reads are free,
:class:`BufferString` reads each cost one buffer query.  Outcomes are -1, 0,
+1 for ``s < t``, ``s == t``, ``s > t``; a proper prefix sorts first.
"""

from __future__ import annotations

from functools import partial
from typing import Optional

import numpy as np

from .mfk import BitString
from .qsim import BackendConfig, PredicateOracle, first_one_search


class MemoryString:
    """String held in the player's private memory."""

    def __init__(self, s):
        self.string = s if isinstance(s, BitString) else BitString(s)
        self._bits = self.string.bits

    def __len__(self) -> int:
        return len(self._bits)

    def symbol(self, pos: int) -> int:
        return int(self._bits[pos - 1])

    def read_prefix(self, count: int) -> np.ndarray:
        return self._bits[:count]

    def peek(self) -> np.ndarray:
        return self._bits


class BufferString:
    """String resident in the buffer; valid only until the next load."""

    def __init__(self, buffer, length: Optional[int] = None):
        self.buffer = buffer
        self.block_index = buffer.block_index
        self.length = buffer.size if length is None else length
        if self.length > buffer.size:
            raise ValueError("string longer than the resident block")

    def __len__(self) -> int:
        return self.length

    def _resident(self) -> None:
        if self.buffer.block_index != self.block_index:
            raise RuntimeError("string is no longer resident in the buffer")

    def symbol(self, pos: int) -> int:
        self._resident()
        if not 1 <= pos <= self.length:
            raise IndexError(f"position {pos} outside 1..{self.length}")
        return self.buffer.read(pos)

    def read_prefix(self, count: int) -> np.ndarray:
        self._resident()
        return self.buffer.read_range(1, count)

    def peek(self) -> np.ndarray:
        self._resident()
        return self.buffer.peek()[: self.length]


class MismatchOracle(PredicateOracle):
    """f(j) = (s_j != t_j) on 1..min(|s|, |t|).

    Superposition queries charge ``ledger``; classical evaluations read both
    symbols through the accessors, which charge per their own policy.
    """

    def __init__(self, s, t, ledger=None):
        n = min(len(s), len(t))
        super().__init__(s.peek()[:n] != t.peek()[:n], ledger)
        self.s, self.t = s, t
        self.symbols: dict[int, tuple[int, int]] = {}

    def evaluate(self, pos: int) -> bool:
        if not 1 <= pos <= self.size:
            raise IndexError(f"position {pos} outside 1..{self.size}")
        a, b = self.s.symbol(pos), self.t.symbol(pos)
        self.symbols[pos] = (a, b)
        return a != b


def boosting_repetitions(m: int) -> int:
    """Total first-one-search calls: one initial call plus 3 * ceil(log2 m), at least 3."""
    return 3 * max(1, (m - 1).bit_length()) + 1


def _by_length(s, t) -> int:
    return (len(s) > len(t)) - (len(s) < len(t))


def quantum_compare(
    s,
    t,
    m: int,
    backend: BackendConfig,
    rng: np.random.Generator,
    ledger=None,
    repetitions: Optional[int] = None,
) -> int:
    """Boosted comparison: keep the smallest validated first-mismatch candidate."""
    reps = boosting_repetitions(m) if repetitions is None else repetitions
    if reps < 1:
        raise ValueError("repetitions must be at least 1")
    n = min(len(s), len(t))
    if n == 0:
        return _by_length(s, t)
    oracle = MismatchOracle(s, t, ledger)
    best = n + 1
    for _ in range(reps):
        j = first_one_search(oracle, backend, rng)
        if j <= n and oracle.evaluate(j):
            best = min(best, j)
    if best == n + 1:
        return _by_length(s, t)
    a, b = oracle.symbols[best]
    return -1 if a < b else 1


def classical_compare(s, t, ledger=None) -> int:
    """Exact left-to-right scan stopping at the first discrepancy.

    ``ledger`` is unused: reads are charged by the accessors.
    """
    n = min(len(s), len(t))
    # The simulator locates the stopping point up front so the scan can be
    # read in one block; exactly positions 1..stop are read and charged.
    diff = np.flatnonzero(s.peek()[:n] != t.peek()[:n])
    stop = int(diff[0]) + 1 if len(diff) else n
    a = s.read_prefix(stop)
    b = t.read_prefix(stop)
    if len(diff):
        return -1 if a[stop - 1] < b[stop - 1] else 1
    return _by_length(s, t)


def quantum_comparator(m: int, backend: BackendConfig, rng, ledger=None, repetitions=None):
    """Two-argument comparator for tree searches."""
    return partial(quantum_compare, m=m, backend=backend, rng=rng, ledger=ledger, repetitions=repetitions)
