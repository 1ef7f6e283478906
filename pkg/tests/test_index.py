import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mfkgame.comparator import MemoryString, classical_compare, quantum_comparator
from mfkgame.index import FAITHFUL, STRICT, KeywordTree, MaxTracker, bump_count, tree_add, tree_find
from mfkgame.mfk import BitString
from mfkgame.qsim import BackendConfig


def counting(cmp):
    calls = []

    def wrapped(a, b):
        calls.append(1)
        return cmp(a, b)

    wrapped.calls = calls
    return wrapped


class TestAdd:
    def test_single(self):
        tree = KeywordTree()
        tree_add(tree, 1, BitString("01"))
        assert len(tree) == 1

    def test_duplicate_keeps_first_index(self):
        tree = KeywordTree()
        tree_add(tree, 1, BitString("01"))
        tree_add(tree, 2, BitString("01"))
        assert len(tree) == 1
        assert next(iter(tree)).i == 1

    @pytest.mark.parametrize("seed", range(5))
    def test_all_length_three_strings(self, seed):
        strings = ["".join(p) for p in itertools.product("01", repeat=3)]
        np.random.default_rng(seed).shuffle(strings)
        tree = KeywordTree()
        for j, s in enumerate(strings, start=1):
            tree.add(j, BitString(s))
            tree.check_invariants()
        assert [str(n.s) for n in tree] == sorted(strings)
        assert tree.height <= 1.45 * math.log2(8 + 2)

    def test_sorted_insertions_stay_balanced(self):
        tree = KeywordTree()
        for j in range(1, 1025):
            tree.add(j, BitString(format(j, "011b")))
        tree.check_invariants()
        assert tree.height <= 1.45 * math.log2(1024 + 2)


class TestFind:
    def build(self, strings):
        tree = KeywordTree()
        for j, s in enumerate(strings, start=1):
            tree.add(j, BitString(s))
        return tree

    def test_missing(self):
        tree = self.build(["000", "011", "110"])
        assert tree_find(tree, MemoryString("111"), classical_compare) is None

    def test_each_of_eight(self):
        strings = ["".join(p) for p in itertools.product("01", repeat=3)]
        tree = self.build(strings)
        for s in strings:
            cmp = counting(classical_compare)
            node = tree_find(tree, MemoryString(s), cmp)
            linear = [n for n in tree if str(n.s) == s]
            assert node is linear[0]
            assert len(cmp.calls) <= math.ceil(math.log2(8)) + 1

    def test_quantum_find_error_rate(self):
        rng = np.random.default_rng(11)
        m, d, k = 16, 8, 32
        cmp = quantum_comparator(m, BackendConfig(error=0.5), rng)
        trials, wrong = 5000, 0
        for t in range(trials):
            keys = {BitString(rng.integers(0, 2, k, dtype=np.uint8)) for _ in range(d)}
            tree = self.build([str(s) for s in keys])
            target = list(keys)[0] if t % 2 else BitString(rng.integers(0, 2, k, dtype=np.uint8))
            expected = next((n for n in tree if n.s == target), None)
            wrong += tree_find(tree, MemoryString(target), cmp) is not expected
        assert wrong / trials <= 4 * d / m**3


class TestTracker:
    def test_single_node_twice(self):
        tree = KeywordTree()
        tree.add(5, BitString("1"))
        node = next(iter(tree))
        tracker = MaxTracker()
        bump_count(tree, node, tracker)
        bump_count(tree, node, tracker)
        assert (tracker.i_max, tracker.c_max) == (5, 2)

    def test_faithful_ignores_count_one(self):
        tree = KeywordTree()
        tree.add(1, BitString("0"))
        tree.add(2, BitString("1"))
        n1, n2 = list(tree)
        tracker = MaxTracker(mode=FAITHFUL)
        bump_count(tree, n2, tracker)
        bump_count(tree, n1, tracker)
        assert tracker.i_max == 1 and tracker.c_max == 1

    def test_strict_alternating_tie(self):
        tree = KeywordTree()
        tree.add(2, BitString("0"))
        tree.add(1, BitString("1"))
        by_index = {n.i: n for n in tree}
        tracker = MaxTracker(mode=STRICT)
        for i in (2, 1, 2, 1):
            bump_count(tree, by_index[i], tracker)
        assert (by_index[1].c, by_index[2].c) == (2, 2)
        assert tracker.i_max == 1

    def test_strict_handles_top_count_one(self):
        tree = KeywordTree()
        tree.add(1, BitString("0"))
        tree.add(2, BitString("1"))
        tracker = MaxTracker(mode=STRICT)
        bump_count(tree, [n for n in tree if n.i == 2][0], tracker)
        assert tracker.i_max == 2

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            MaxTracker(mode="lazy")


def replay_faithful(bumps):
    counts, c_max, i_max = {}, 1, 1
    for i in bumps:
        counts[i] = counts.get(i, 0) + 1
        if counts[i] > c_max:
            c_max, i_max = counts[i], i
    return i_max, c_max


def min_index_argmax(counts, d):
    best = max(counts.get(i, 0) for i in range(1, d + 1))
    return min(i for i in range(1, d + 1) if counts.get(i, 0) == best)


@settings(max_examples=200)
@given(st.lists(st.integers(1, 6), max_size=60))
def test_tracker_modes_fold_over_bumps(bumps):
    tree = KeywordTree()
    for i in range(1, 7):
        tree.add(i, BitString(format(i, "03b")))
    nodes = {n.i: n for n in tree}
    faithful, strict = MaxTracker(mode=FAITHFUL), MaxTracker(mode=STRICT)
    for i in bumps:
        bump_count(tree, nodes[i], faithful)
        nodes[i].c -= 1
        tree.bumps -= 1
        bump_count(tree, nodes[i], strict)
    assert (faithful.i_max, faithful.c_max) == replay_faithful(bumps)
    counts = {i: n.c for i, n in nodes.items()}
    assert strict.i_max == min_index_argmax(counts, 6)
    assert sum(counts.values()) == tree.bumps == len(bumps)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.text("01", min_size=1, max_size=6)), max_size=80))
def test_matches_sorted_map_model(ops):
    tree, model = KeywordTree(), {}
    for j, (is_add, s) in enumerate(ops, start=1):
        if is_add:
            tree.add(j, BitString(s))
            model.setdefault(s, j)
            tree.check_invariants()
        else:
            node = tree.find(MemoryString(s), classical_compare)
            if s in model:
                assert node is not None and node.i == model[s] and str(node.s) == s
            else:
                assert node is None
    assert [(str(n.s), n.i) for n in tree] == sorted(model.items())
