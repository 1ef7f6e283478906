"""Simulated quantum query primitives with exact query charging.

Two backends implement the first-one-search contract (find the minimal
``j`` with ``f(j) = 1`` in about ``sqrt(N)`` queries, error at most 1/2,
``N + 1`` when nothing is found):

* ``exact`` runs Grover iterations on a real amplitude vector over the
  search indices and samples measurements from it.
* ``modeled`` skips the amplitude simulation: it looks up the true answer
  without charging, charges exactly ``ceil(sqrt(N))`` queries, and errs
  with a configurable probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

# Query budget of one exact first-one-search call is QUERY_CONSTANT * sqrt(N).
QUERY_CONSTANT = 10.0
# Budget of one BBHT search over a range of size M is SEARCH_CONSTANT * sqrt(M).
SEARCH_CONSTANT = 2.0
# Growth factor of the BBHT iteration-count ceiling.
BBHT_LAMBDA = 6 / 5


def ceil_sqrt(n: int) -> int:
    r = math.isqrt(n)
    return r if r * r == n else r + 1


@dataclass
class QueryLedger:
    """Counters of round-consuming actions, with a per-phase breakdown."""

    buffer_queries: int = 0
    loads: int = 0
    passes: int = 0
    phase: str = ""
    by_phase: dict = field(default_factory=dict)

    def _tally(self, kind: str, count: int) -> None:
        counts = self.by_phase.setdefault(self.phase, {})
        counts[kind] = counts.get(kind, 0) + count

    def charge(self, count: int = 1) -> None:
        if count < 0:
            raise ValueError("charge must be non-negative")
        self.buffer_queries += count
        self._tally("buffer_queries", count)

    def record_load(self) -> None:
        self.loads += 1
        self._tally("loads", 1)

    def record_passes(self, count: int) -> None:
        self.passes += count
        self._tally("passes", count)

    @property
    def rounds(self) -> int:
        return self.buffer_queries + self.loads + self.passes

    def snapshot(self) -> "QueryLedger":
        by_phase = {p: dict(c) for p, c in self.by_phase.items()}
        return QueryLedger(self.buffer_queries, self.loads, self.passes, self.phase, by_phase)


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "modeled"
    error: float = 0.5
    query_constant: float = QUERY_CONSTANT
    allow_nonconforming: bool = False

    def __post_init__(self):
        if self.kind not in ("exact", "modeled"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if not 0.0 <= self.error <= 1.0:
            raise ValueError("error must be in [0, 1]")
        if self.error > 0.5 and not self.allow_nonconforming:
            raise ValueError("error above 1/2 breaks the first-one-search contract")
        if self.query_constant <= 0:
            raise ValueError("query_constant must be positive")

    def budget(self, n: int) -> int:
        return math.floor(self.query_constant * math.sqrt(n))


class PredicateOracle:
    """Boolean function on positions 1..N.

    ``evaluate`` is a classical query and ``query`` a superposition query;
    both charge the ledger.  ``marked`` exposes the whole truth table for
    free: it is the simulator's view, never the algorithm's.
    """

    def __init__(self, values, ledger=None):
        self._values = np.asarray(values, dtype=bool)
        self._values.setflags(write=False)
        self.ledger = ledger if ledger is not None else QueryLedger()
        self._positions = None

    @classmethod
    def from_function(cls, f: Callable[[int], int], n: int, ledger=None) -> "PredicateOracle":
        return cls([bool(f(j)) for j in range(1, n + 1)], ledger)

    @property
    def size(self) -> int:
        return len(self._values)

    def evaluate(self, pos: int) -> bool:
        if not 1 <= pos <= self.size:
            raise IndexError(f"position {pos} outside 1..{self.size}")
        self.ledger.charge(1)
        return bool(self._values[pos - 1])

    def query(self, count: int = 1) -> None:
        self.ledger.charge(count)

    def marked(self) -> np.ndarray:
        return self._values

    def marked_positions(self) -> np.ndarray:
        """Sorted 1-based marked positions (free)."""
        if self._positions is None:
            self._positions = np.flatnonzero(self.marked()) + 1
        return self._positions


class AmplitudeState:
    """Real amplitude vector over search indices 0..N-1."""

    def __init__(self, amplitudes):
        self.amplitudes = np.array(amplitudes, dtype=float)

    @classmethod
    def uniform(cls, n: int) -> "AmplitudeState":
        return cls(np.full(n, 1.0 / math.sqrt(n)))

    def __len__(self) -> int:
        return len(self.amplitudes)

    def grover_iteration(self, signs: np.ndarray) -> None:
        """Phase oracle (``signs`` is -1 on marked, +1 elsewhere) then inversion about the mean."""
        a = self.amplitudes
        a *= signs
        np.subtract(2.0 * a.mean(), a, out=a)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return self.amplitudes**2

    def measure(self, rng: np.random.Generator) -> int:
        cdf = np.cumsum(self.probabilities())
        idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
        return min(idx, len(self) - 1)


def _bbht(oracle: PredicateOracle, rng, size: int, budget: int) -> tuple[Optional[int], int]:
    """Search positions 1..size with unknown marked count; returns (position, queries spent)."""
    marked = oracle.marked()[:size]
    signs = np.where(marked, -1.0, 1.0)
    root = math.sqrt(size)
    ceiling = 1.0
    spent = 0
    while True:
        iterations = int(rng.integers(0, math.ceil(ceiling)))
        if spent + iterations + 1 > budget:
            return None, spent
        state = AmplitudeState.uniform(size)
        if iterations:
            oracle.query(iterations)
            for _ in range(iterations):
                state.grover_iteration(signs)
        pos = state.measure(rng) + 1
        spent += iterations + 1
        if oracle.evaluate(pos):
            return pos, spent
        ceiling = min(BBHT_LAMBDA * ceiling, root)


def grover_search(
    oracle: PredicateOracle,
    rng: np.random.Generator,
    size: Optional[int] = None,
    budget: Optional[int] = None,
) -> Optional[int]:
    """Find some marked position in 1..size, or None; every returned position is verified."""
    size = oracle.size if size is None else size
    if size < 1:
        raise ValueError("search range must be non-empty")
    if budget is None:
        budget = math.ceil(SEARCH_CONSTANT * math.sqrt(size))
    return _bbht(oracle, rng, size, budget)[0]


def _exact_first_one(oracle: PredicateOracle, backend: BackendConfig, rng) -> int:
    n = oracle.size
    remaining = backend.budget(n)

    def search(size):
        nonlocal remaining
        pos, spent = _bbht(oracle, rng, size, min(math.ceil(SEARCH_CONSTANT * math.sqrt(size)), remaining))
        remaining -= spent
        return pos

    # grow the prefix until it contains a marked position
    best = None
    prefix = 1
    while best is None and remaining > 0:
        size = min(prefix, n)
        best = search(size)
        if size == n:
            break
        prefix *= 2
    if best is None:
        return n + 1
    # then shrink towards the minimum
    while best > 1 and remaining > 0:
        pos = search(best - 1)
        if pos is None:
            break
        best = pos
    return best


def _modeled_first_one(oracle: PredicateOracle, backend: BackendConfig, rng) -> int:
    n = oracle.size
    positions = oracle.marked_positions()
    oracle.query(ceil_sqrt(n))
    miss = rng.random() < backend.error
    if not len(positions):
        return n + 1
    if not miss:
        return int(positions[0])
    later = positions[1:]
    if not len(later):
        return n + 1
    return int(later[rng.integers(len(later))])


def first_one_search(oracle: PredicateOracle, backend: BackendConfig, rng: np.random.Generator) -> int:
    """Minimal marked position with probability >= 1/2; ``N + 1`` when none is found.

    A returned position ``p <= N`` is always marked.
    """
    if oracle.size < 1:
        raise ValueError("search range must be non-empty")
    if backend.kind == "exact":
        return _exact_first_one(oracle, backend, rng)
    return _modeled_first_one(oracle, backend, rng)
