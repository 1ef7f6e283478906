"""Online players for the buffered game.

A player is a generator of engine actions (``play``) plus an answer function
(``current_answer``).  The engine reads answers between actions only, so a
player must ``yield SETTLE`` after charged reads and before changing the
state its answers depend on.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional

from .comparator import BufferString, MemoryString, classical_compare, quantum_comparator
from .engine import LOAD, PASS_FOREVER, SETTLE, ProtocolError
from .index import FAITHFUL, KeywordTree, MaxTracker, bump_count
from .mfk import BitString
from .qsim import BackendConfig


class OnlinePlayer:
    name = "player"
    phase = ""
    # answers do not depend on the output index, so the engine asks once per batch
    uniform_answers = True

    def play(self, buffer, rng) -> Iterator:
        raise NotImplementedError

    def current_answer(self, output_index: int) -> int:
        raise NotImplementedError


@dataclass(frozen=True)
class PlayerConfig:
    backend: BackendConfig = field(default_factory=BackendConfig)
    tracker_mode: str = FAITHFUL
    repetitions: Optional[int] = None

    def __post_init__(self):
        if self.repetitions is not None and self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")


class _TreePlayer(OnlinePlayer):
    """Shared two-phase structure: read the keywords into a tree, then count the words."""

    def __init__(self, d: int, m: int, k: int, tracker_mode: str = FAITHFUL):
        self.d, self.m, self.k = d, m, k
        self.tree = KeywordTree()
        self.tracker = MaxTracker(mode=tracker_mode)
        self.words_done = 0

    def current_answer(self, output_index: int) -> int:
        return self.tracker.i_max

    def _load_word(self, buffer):
        yield LOAD
        if buffer.size != self.k:
            raise ProtocolError(f"player needs one {self.k}-bit word per block, got {buffer.size}")

    def play(self, buffer, rng):
        self.phase = "keywords"
        for j in range(1, self.d + 1):
            yield from self._load_word(buffer)
            bits = buffer.read_range(1, self.k)
            yield SETTLE
            self.tree.add(j, BitString(bits))

        self.phase = "words"
        find = self._finder(buffer, rng)
        for _ in range(self.m):
            yield from self._load_word(buffer)
            node = find()
            yield SETTLE
            if node is not None:
                bump_count(self.tree, node, self.tracker)
            self.words_done += 1

        self.phase = "done"
        yield PASS_FOREVER

    def _finder(self, buffer, rng):
        raise NotImplementedError


class QuantumPlayer(_TreePlayer):
    """Tree search where each comparison against the resident word is the boosted quantum comparator."""

    name = "quantum"

    def __init__(self, d: int, m: int, k: int, config: Optional[PlayerConfig] = None):
        self.config = config or PlayerConfig()
        super().__init__(d, m, k, self.config.tracker_mode)

    def _finder(self, buffer, rng):
        cmp = quantum_comparator(
            self.m, self.config.backend, rng, ledger=buffer, repetitions=self.config.repetitions
        )
        return lambda: self.tree.find(BufferString(buffer), cmp)


class ClassicalPlayer(_TreePlayer):
    """Reads every word in full, then searches the tree in memory exactly."""

    name = "classical"

    def _finder(self, buffer, rng):
        def find():
            word = MemoryString(BitString(buffer.read_range(1, self.k)))
            return self.tree.find(word, classical_compare)

        return find


def quantum_player(d: int, m: int, k: int, config: Optional[PlayerConfig] = None) -> QuantumPlayer:
    return QuantumPlayer(d, m, k, config)


def classical_player(d: int, m: int, k: int, tracker_mode: str = FAITHFUL) -> ClassicalPlayer:
    return ClassicalPlayer(d, m, k, tracker_mode)


class ConstantPlayer(OnlinePlayer):
    """Never reads anything and always answers the same index."""

    name = "constant"
    phase = "done"

    def __init__(self, answer: int):
        self.answer = answer

    def play(self, buffer, rng):
        yield PASS_FOREVER

    def current_answer(self, output_index: int) -> int:
        return self.answer


class OraclePlayer(ConstantPlayer):
    """Told the offline optimum up front."""

    name = "oracle"


def reference_players(optimum: int) -> dict[str, OnlinePlayer]:
    return {"oracle": OraclePlayer(optimum), "constant": ConstantPlayer(optimum)}
