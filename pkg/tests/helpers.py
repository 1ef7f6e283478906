"""Shared fixtures for the test modules."""

import math

from mfkgame.engine import LOAD, SETTLE, Pass, demanded_count
from mfkgame.players import OnlinePlayer


class RandomPlayer(OnlinePlayer):
    """Random legal actions with a random changing answer."""

    name = "random"

    def __init__(self, n, K, d=3, max_actions=40):
        self.blocks = math.ceil(n / K)
        self.d = d
        self.max_actions = max_actions
        self.answer = 1

    def play(self, buffer, rng):
        for _ in range(int(rng.integers(0, self.max_actions))):
            choice = int(rng.integers(4))
            if choice == 0 and buffer.block_index + 1 < self.blocks:
                yield LOAD
            elif choice == 1 and buffer.size:
                for _ in range(int(rng.integers(1, 6))):
                    buffer.read(int(rng.integers(1, buffer.size + 1)))
                yield SETTLE
            elif choice == 2:
                yield Pass(int(rng.integers(0, 5)))
            self.answer = int(rng.integers(1, self.d + 1))

    def current_answer(self, output_index):
        return self.answer


def check_schedule(transcript, R, n):
    """Demand counts follow the closed form at every prefix, indices 1..n without gaps."""
    for r in range(transcript.total_rounds + 1):
        assert transcript.demanded_by(r) == demanded_count(r, R, n), r
    assert [i for i, _ in transcript.iter_demands()] == list(range(1, n + 1))
