import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfkgame.engine import (
    LOAD,
    PASS_FOREVER,
    SETTLE,
    BufferQuery,
    GameConfig,
    LoadBlock,
    Pass,
    PassRun,
    ProtocolError,
    competitive_ratio,
    demanded_count,
    run_game,
)
from mfkgame.mfk import BitString, Instance, gen_random, offline_optimum
from mfkgame.players import ConstantPlayer, OnlinePlayer, OraclePlayer

from .helpers import RandomPlayer, check_schedule


def tiny(n_words=1, k=2, d=1):
    return Instance(tuple([BitString("0" * k)] * d), tuple([BitString("1" * k)] * n_words))


class Scripted(OnlinePlayer):
    def __init__(self, actions, answer=1):
        self.actions = actions
        self.answer = answer

    def play(self, buffer, rng):
        for a in self.actions:
            if callable(a):
                a(buffer)
            else:
                yield a

    def current_answer(self, output_index):
        return self.answer


class TestDemandedCount:
    @pytest.mark.parametrize("r,R,n,expected", [(0, 3, 10, 0), (7, 3, 10, 6), (100, 3, 10, 10), (9, 3, 10, 9)])
    def test_examples(self, r, R, n, expected):
        assert demanded_count(r, R, n) == expected

    def test_negative_rounds(self):
        with pytest.raises(ValueError):
            demanded_count(-1, 2, 4)


class TestCompetitiveRatio:
    @pytest.mark.parametrize("cost,expected", [(1, 1), (65, 65), (13, 13)])
    def test_examples(self, cost, expected):
        assert competitive_ratio(cost, 1) == Fraction(expected)

    def test_exact_rational(self):
        assert competitive_ratio(3, 2) == Fraction(3, 2)

    def test_bad_opt(self):
        with pytest.raises(ValueError):
            competitive_ratio(1, 0)


class TestConfig:
    def test_period_above_buffer(self):
        with pytest.raises(ValueError):
            GameConfig(2, 3)
        assert GameConfig(2, 3, allow_period_above_buffer=True).answer_period == 3

    def test_nonpositive(self):
        with pytest.raises(ValueError):
            GameConfig(0, 1)


class TestSchedule:
    def test_n4_r2(self):
        # d = 1, m = 1, k = 2 gives n = 4
        transcript, report = run_game(ConstantPlayer(1), tiny(), GameConfig(2, 2), seed=0)
        assert [(b.after_round, b.first, b.last) for b in transcript.demands] == [(2, 1, 2), (4, 3, 4)]
        assert report.total_rounds == 4

    def test_partial_last_batch(self):
        # n = 6, R = 4: the game runs to round 8, last batch holds outputs 5..6
        transcript, report = run_game(ConstantPlayer(1), tiny(2, 2), GameConfig(4, 4), seed=0)
        assert [(b.after_round, b.first, b.last) for b in transcript.demands] == [(4, 1, 4), (8, 5, 6)]
        assert report.total_rounds == 8

    def test_answers_frozen_during_settle(self):
        # three charged reads span the demand after round 2; the answer seen there is the old one
        def bump(buffer):
            buffer.read_range(1, 2)
            buffer.read(1)

        class Switch(Scripted):
            def play(self, buffer, rng):
                yield LOAD
                bump(buffer)
                yield SETTLE
                self.answer = 2
                yield PASS_FOREVER

        inst = Instance((BitString("00"), BitString("11")), (BitString("11"),) * 2)
        transcript, _ = run_game(Switch([]), inst, GameConfig(2, 2), seed=0)
        assert transcript.answers_at([1, 2, 3, 4, 5, 6, 7, 8]) == [1, 1, 2, 2, 2, 2, 2, 2]


class TestCosts:
    def test_oracle_player(self):
        inst = gen_random(3, 12, 5, seed=4)
        _, report = run_game(OraclePlayer(offline_optimum(inst)), inst, GameConfig.for_instance(inst), 0)
        assert report.cost == 1 and report.competitive_ratio == 1

    def test_never_correct(self):
        inst = Instance((BitString("00"), BitString("11")), (BitString("11"),) * 7)
        _, report = run_game(ConstantPlayer(1), inst, GameConfig(2, 2), 0)
        assert report.cost == 1 + 7 and report.wrong_significant == 7
        assert report.competitive_ratio == 8


class TestProtocol:
    def test_bad_position(self):
        def bad(buffer):
            buffer.read(3)

        with pytest.raises(ProtocolError):
            run_game(Scripted([LOAD, bad]), tiny(), GameConfig(2, 2), 0)

    def test_read_before_load(self):
        def bad(buffer):
            buffer.read(1)

        with pytest.raises(ProtocolError):
            run_game(Scripted([bad]), tiny(), GameConfig(2, 2), 0)

    def test_load_past_end(self):
        # n = 4 and K = 4: one block only
        with pytest.raises(ProtocolError):
            run_game(Scripted([LOAD, LOAD]), tiny(), GameConfig(4, 2), 0)

    def test_partial_block_extent(self):
        def bad(buffer):
            assert buffer.size == 1
            buffer.read(2)

        # n = 4, K = 3: the second block holds one variable
        with pytest.raises(ProtocolError):
            run_game(Scripted([LOAD, LOAD, bad]), tiny(), GameConfig(3, 1), 0)

    def test_negative_pass(self):
        with pytest.raises(ProtocolError):
            run_game(Scripted([Pass(-1)]), tiny(), GameConfig(2, 2), 0)


class TestTranscript:
    def test_events_run_length(self):
        def reads(buffer):
            buffer.read_range(1, 2)

        transcript, report = run_game(Scripted([LOAD, reads, SETTLE, Pass(1)]), tiny(2, 2), GameConfig(2, 2), 0)
        assert transcript.events[:3] == [LoadBlock(0), BufferQuery(2, ""), PassRun(3)]
        assert len(list(transcript.iter_events())) == report.total_rounds == 6
        assert transcript.first_pass_round() == 3

    def test_game_truncates_long_settle(self):
        def reads(buffer):
            for _ in range(50):
                buffer.read(1)

        transcript, report = run_game(Scripted([LOAD, reads, SETTLE]), tiny(), GameConfig(2, 2), 0)
        assert report.total_rounds == 4
        assert report.ledger.buffer_queries == 3

    def test_answers_at_unknown(self):
        transcript, _ = run_game(ConstantPlayer(1), tiny(), GameConfig(2, 2), 0)
        with pytest.raises(KeyError):
            transcript.answers_at([5])


class PerIndex(ConstantPlayer):
    uniform_answers = False

    def current_answer(self, output_index):
        return 1 + output_index % 2


def test_non_uniform_answers():
    inst = Instance((BitString("00"), BitString("11")), (BitString("11"),) * 3)
    transcript, report = run_game(PerIndex(1), inst, GameConfig(2, 2), 0)
    assert [a for _, a in transcript.iter_demands()] == [1 + i % 2 for i in range(1, 11)]
    # significant outputs 6, 8, 10 are even and answered 1, the optimum is 2
    assert report.cost == 4


def test_deterministic():
    inst = gen_random(3, 10, 6, seed=1)
    cfg = GameConfig(5, 3)
    a = run_game(RandomPlayer(inst.n, cfg.buffer_size), inst, cfg, seed=42)
    b = run_game(RandomPlayer(inst.n, cfg.buffer_size), inst, cfg, seed=42)
    assert a == b


@settings(max_examples=150, deadline=None)
@given(
    st.integers(1, 4), st.integers(1, 6), st.integers(1, 6), st.integers(1, 12), st.integers(1, 12), st.integers(0, 2**32)
)
def test_schedule_and_conservation(d, m, k, K, R, seed):
    K, R = max(K, R), min(K, R)
    inst = gen_random(min(d, 2**k), m, k, seed=seed)
    player = RandomPlayer(inst.n, K)
    transcript, report = run_game(player, inst, GameConfig(K, R), seed)
    check_schedule(transcript, R, inst.n)
    led = report.ledger
    assert report.total_rounds == led.loads + led.buffer_queries + led.passes
    assert report.total_rounds == R * math.ceil(inst.n / R)
    assert report.cost == 1 + report.wrong_significant
