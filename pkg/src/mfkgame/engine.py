"""Request-answer game with a buffer.

The algorithm (a player) loads the input block by block into a buffer of
``K`` variables and queries buffer positions; every action takes one round.
After every ``R`` rounds the adversary demands the next ``R`` output
variables and records the player's current answers.  The game ends once all
``n`` outputs have been demanded.

Players are generators yielding :class:`Load`, :class:`Settle` and
:class:`Pass` actions.  Buffer reads charge ``Buffer.pending``; a
``Settle`` turns the pending charges into rounds.  Work between actions is
free, and the player's answer state is frozen while the engine consumes
rounds on its behalf.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Optional, Union

import numpy as np

from .mfk import Instance, offline_optimum
from .qsim import QueryLedger


class ProtocolError(RuntimeError):
    """The player broke the game protocol (bad buffer position, load past the end, ...)."""


@dataclass(frozen=True)
class GameConfig:
    buffer_size: int
    answer_period: int
    allow_period_above_buffer: bool = False

    def __post_init__(self):
        if self.buffer_size < 1 or self.answer_period < 1:
            raise ValueError("buffer_size and answer_period must be positive")
        if self.answer_period > self.buffer_size and not self.allow_period_above_buffer:
            raise ValueError("answer_period must not exceed buffer_size")

    @classmethod
    def for_instance(cls, instance: Instance) -> "GameConfig":
        """One word per block, one batch of demands per block."""
        return cls(instance.k, instance.k)


# --- player actions -------------------------------------------------------


@dataclass(frozen=True)
class Load:
    pass


@dataclass(frozen=True)
class Settle:
    """Spend one round per buffer read charged since the last settle."""


@dataclass(frozen=True)
class Pass:
    count: Optional[int] = None  # None: until the game ends


LOAD = Load()
SETTLE = Settle()
PASS_FOREVER = Pass()

Action = Union[Load, Settle, Pass]


# --- transcript events (run-length encoded) --------------------------------


@dataclass(frozen=True)
class LoadBlock:
    block_index: int
    rounds: int = 1


@dataclass(frozen=True)
class BufferQuery:
    """A run of ``rounds`` consecutive buffer queries."""

    rounds: int = 1
    phase: str = ""


@dataclass(frozen=True)
class PassRun:
    rounds: int = 1


RoundEvent = Union[LoadBlock, BufferQuery, PassRun]


@dataclass(frozen=True)
class DemandBatch:
    """Outputs ``first..last`` demanded after round ``after_round``, all answered ``answer``."""

    after_round: int
    first: int
    last: int
    answer: int


@dataclass
class Transcript:
    n: int
    answer_period: int
    events: list = field(default_factory=list)
    demands: list = field(default_factory=list)

    @property
    def total_rounds(self) -> int:
        return sum(e.rounds for e in self.events)

    def iter_events(self) -> Iterator[RoundEvent]:
        """One event per round."""
        for e in self.events:
            if isinstance(e, LoadBlock):
                yield e
            elif isinstance(e, BufferQuery):
                single = BufferQuery(1, e.phase)
                for _ in range(e.rounds):
                    yield single
            else:
                for _ in range(e.rounds):
                    yield PassRun(1)

    def iter_demands(self) -> Iterator[tuple[int, int]]:
        """(output_index, answer) pairs in demand order."""
        for batch in self.demands:
            for idx in range(batch.first, batch.last + 1):
                yield idx, batch.answer

    def demanded_by(self, rounds: int) -> int:
        """Number of outputs demanded within the first ``rounds`` rounds."""
        pos = bisect.bisect_right(self.demands, rounds, key=lambda b: b.after_round)
        return self.demands[pos - 1].last if pos else 0

    def answers_at(self, output_indices) -> list[int]:
        lasts = [b.last for b in self.demands]
        answers = []
        for idx in output_indices:
            pos = bisect.bisect_left(lasts, idx)
            if pos == len(self.demands) or self.demands[pos].first > idx:
                raise KeyError(idx)
            answers.append(self.demands[pos].answer)
        return answers

    def first_pass_round(self) -> int:
        """Rounds spent before the first pass (the player's active prefix)."""
        total = 0
        for e in self.events:
            if isinstance(e, PassRun):
                break
            total += e.rounds
        return total


@dataclass(frozen=True)
class CostReport:
    cost: int
    opt_cost: int
    competitive_ratio: Fraction
    wrong_significant: int
    total_rounds: int
    ledger: QueryLedger
    final_answer: int
    optimum: int


def demanded_count(rounds: int, period: int, n: int) -> int:
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    return min(n, period * (rounds // period))


def competitive_ratio(cost: int, opt: int) -> Fraction:
    if opt < 1:
        raise ValueError("optimal cost must be positive")
    return Fraction(cost, opt)


class Buffer:
    """Holds one block of input variables; reads are 1-based and charged."""

    def __init__(self, contents=None, block_index: int = -1):
        self.contents = None if contents is None else np.asarray(contents, dtype=np.uint8)
        self.block_index = block_index
        self.pending = 0
        self.charged = 0

    @property
    def size(self) -> int:
        return 0 if self.contents is None else len(self.contents)

    def charge(self, count: int = 1) -> None:
        self.pending += count
        self.charged += count

    def _check(self, pos: int) -> None:
        if self.contents is None:
            raise ProtocolError("buffer query before any block was loaded")
        if not 1 <= pos <= len(self.contents):
            raise ProtocolError(f"buffer position {pos} outside 1..{len(self.contents)}")

    def read(self, pos: int) -> int:
        self._check(pos)
        self.charge(1)
        return int(self.contents[pos - 1])

    def read_range(self, first: int, last: int) -> np.ndarray:
        """Read positions first..last (inclusive), one charged query each."""
        if last < first:
            return np.empty(0, dtype=np.uint8)
        self._check(first)
        self._check(last)
        self.charge(last - first + 1)
        return self.contents[first - 1 : last]

    def peek(self) -> np.ndarray:
        """Whole block without charging; for simulators, not for players' decisions."""
        if self.contents is None:
            raise ProtocolError("no block loaded")
        return self.contents


class _Game:
    def __init__(self, player, instance: Instance, config: GameConfig):
        self.player = player
        self.bits = instance.input_bits
        self.n = instance.n
        self.K = config.buffer_size
        self.R = config.answer_period
        self.num_blocks = math.ceil(self.n / self.K)
        self.end_round = self.R * math.ceil(self.n / self.R)
        self.buffer = Buffer()
        self.ledger = QueryLedger()
        self.transcript = Transcript(self.n, self.R)
        self.rounds = 0
        self.demanded = 0
        self.truncated = False

    @property
    def over(self) -> bool:
        return self.rounds >= self.end_round

    def _demand_through(self, rounds: int) -> None:
        target = demanded_count(rounds, self.R, self.n)
        player = self.player
        while self.demanded < target:
            first = self.demanded + 1
            last = min(first + self.R - 1, self.n)
            after = self.R * math.ceil(last / self.R)
            if player.uniform_answers:
                self._record(after, first, last, player.current_answer(first))
            else:
                for idx in range(first, last + 1):
                    self._record(after, idx, idx, player.current_answer(idx))
            self.demanded = last

    def _record(self, after, first, last, answer):
        demands = self.transcript.demands
        prev = demands[-1] if demands else None
        if prev is not None and prev.after_round == after and prev.answer == answer and prev.last + 1 == first:
            demands[-1] = DemandBatch(after, prev.first, last, answer)
        else:
            demands.append(DemandBatch(after, first, last, answer))

    def _consume(self, count: int) -> int:
        """Advance the clock; demands strictly inside the run see the frozen state.

        A demand landing on the run's last round is left to the caller, who
        lets the player compute first.
        """
        available = self.end_round - self.rounds
        if count > available:
            # the action cannot complete, so the player never sees its result
            self.truncated = True
            count = available
        if count <= 0:
            return 0
        self._demand_through(self.rounds + count - 1)
        self.rounds += count
        return count

    def _append(self, event) -> None:
        events = self.transcript.events
        if events and isinstance(event, PassRun) and isinstance(events[-1], PassRun):
            events[-1] = PassRun(events[-1].rounds + event.rounds)
        else:
            events.append(event)

    def execute(self, action) -> None:
        phase = getattr(self.player, "phase", "")
        self.ledger.phase = phase
        if isinstance(action, Load):
            self._settle(phase)
            if self.over:
                return
            index = self.buffer.block_index + 1
            if index >= self.num_blocks:
                raise ProtocolError(f"load past the end of the input ({self.num_blocks} blocks)")
            lo = index * self.K
            self.buffer.contents = self.bits[lo : min(lo + self.K, self.n)]
            self.buffer.block_index = index
            self._consume(1)
            self.ledger.record_load()
            self._append(LoadBlock(index))
        elif isinstance(action, Settle):
            self._settle(phase)
        elif isinstance(action, Pass):
            self._settle(phase)
            if action.count is not None and action.count < 0:
                raise ProtocolError("negative pass count")
            want = self.end_round - self.rounds if action.count is None else action.count
            done = self._consume(want)
            if done:
                self.ledger.record_passes(done)
                self._append(PassRun(done))
        else:
            raise ProtocolError(f"unknown action {action!r}")

    def _settle(self, phase: str) -> None:
        pending, self.buffer.pending = self.buffer.pending, 0
        done = self._consume(pending)
        if done:
            self.ledger.charge(done)
            self._append(BufferQuery(done, phase))

    def play(self, rng: np.random.Generator) -> None:
        actions = self.player.play(self.buffer, rng)
        try:
            for action in actions:
                # the player has finished computing for the previous action
                self._demand_through(self.rounds)
                if self.over:
                    break
                self.execute(action)
                if self.truncated:
                    break
            else:
                self.ledger.phase = getattr(self.player, "phase", "")
                self._settle(self.ledger.phase)
                self._demand_through(self.rounds)
                if not self.over:
                    self.execute(PASS_FOREVER)
        finally:
            actions.close()
        self._demand_through(self.rounds)


def run_game(player, instance: Instance, config: GameConfig, seed: int) -> tuple[Transcript, CostReport]:
    game = _Game(player, instance, config)
    game.play(np.random.default_rng(seed))
    transcript = game.transcript
    assert game.demanded == instance.n

    i0 = offline_optimum(instance)
    answers = transcript.answers_at(instance.significant_indices())
    wrong = sum(1 for a in answers if a != i0)
    cost = 1 + wrong
    report = CostReport(
        cost=cost,
        opt_cost=1,
        competitive_ratio=competitive_ratio(cost, 1),
        wrong_significant=wrong,
        total_rounds=game.rounds,
        ledger=game.ledger.snapshot(),
        final_answer=answers[-1],
        optimum=i0,
    )
    return transcript, report
