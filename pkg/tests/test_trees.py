import random
from fractions import Fraction as F

import pytest
from conftest import monotonize, random_tree
from hypothesis import given, settings
from hypothesis import strategies as st

from littlestone.classes import Domain, Member, WeightedClass, universal_class
from littlestone.trees import (
    LEAF,
    MistakeTree,
    NotQuasiBalancedError,
    branches,
    complete_tree,
    depth,
    expected_branch_length,
    is_monotone,
    min_branch_length,
    node,
    quasi_balance_weights,
    sample_branch,
    shatter_check,
    tree_from_json,
    tree_to_json,
    truncate,
)


def left_path_tree() -> MistakeTree:
    """Three internal nodes nested on the left, a leaf hanging at each level."""
    return node("a", node("b", node("c", LEAF, LEAF), LEAF), LEAF)


def lopsided_tree() -> MistakeTree:
    """Complete depth-4 on the left of the root, depth-1 on the right.

    Every proper subtree is complete, and E = 3.5 <= 2 * m = 4, yet the root
    violates monotonicity (the left child has E = 4 > 3.5).
    """
    return node("r", complete_tree(4), complete_tree(1))


class TestExpectedBranchLength:
    def test_left_path(self):
        assert expected_branch_length(left_path_tree()) == F(7, 4)

    def test_leaf(self):
        assert expected_branch_length(LEAF) == 0

    @pytest.mark.parametrize("d", [1, 2, 3, 6])
    def test_complete(self, d):
        assert expected_branch_length(complete_tree(d)) == d

    def test_recursion_identity(self, rng):
        for _ in range(60):
            t = random_tree(rng)
            if t.is_leaf:
                continue
            e = expected_branch_length
            assert e(t) == 1 + (e(t.zero) + e(t.one)) / 2

    def test_explicit_sum_identity(self, rng):
        for _ in range(60):
            t = random_tree(rng, max_depth=5)
            total = sum(F(len(b), 2 ** len(b)) for b in branches(t))
            assert expected_branch_length(t) == total


class TestMinBranchLength:
    def test_left_path(self):
        assert min_branch_length(left_path_tree()) == 1

    @pytest.mark.parametrize("d", [0, 1, 4])
    def test_complete(self, d):
        assert min_branch_length(complete_tree(d)) == d

    def test_one_leaf_child(self):
        assert min_branch_length(node("x", complete_tree(3), LEAF)) == 1


class TestMonotone:
    def test_left_path_is_monotone(self):
        assert is_monotone(left_path_tree())

    def test_lopsided_is_not(self):
        t = lopsided_tree()
        assert expected_branch_length(t) == F(7, 2)
        assert min_branch_length(t) == 2
        assert not is_monotone(t)

    def test_leaf(self):
        assert is_monotone(LEAF)


class TestQuasiBalanceWeights:
    def test_left_path_weights(self):
        w = quasi_balance_weights(left_path_tree())
        assert w.at("") == (F(1, 8), F(7, 8))
        assert w.at("0") == (F(1, 4), F(3, 4))
        assert w.at("00") == (F(1, 2), F(1, 2))

    def test_complete_tree_all_half(self):
        w = quasi_balance_weights(complete_tree(3))
        assert all(pair == (F(1, 2), F(1, 2)) for pair in w.weights.values())

    def test_lopsided_fails_at_root(self):
        with pytest.raises(NotQuasiBalancedError) as err:
            quasi_balance_weights(lopsided_tree())
        assert err.value.position == ""

    def test_every_branch_weighs_half_expected(self, rng):
        for _ in range(80):
            t = monotonize(random_tree(rng))
            w = quasi_balance_weights(t)
            lam = expected_branch_length(t) / 2
            for b in branches(t):
                assert w.branch_weight([y for _, y in b]) == lam

    def test_succeeds_iff_monotone(self, rng):
        succeeded = failed = 0
        for _ in range(200):
            t = random_tree(rng, max_depth=7, leaf_prob=0.3)
            mono = is_monotone(t)
            try:
                quasi_balance_weights(t)
                ok = True
                succeeded += 1
            except NotQuasiBalancedError:
                ok = False
                failed += 1
            assert ok == mono
        assert succeeded > 10 and failed > 10

    def test_expected_at_most_twice_min_when_balanced(self, rng):
        for _ in range(100):
            t = monotonize(random_tree(rng))
            assert expected_branch_length(t) <= 2 * min_branch_length(t)


@given(st.integers(0, 10**9), st.integers(2, 7))
@settings(max_examples=40, deadline=None)
def test_random_weight_functions_average_half_expected(seed, d):
    # Any weights summing to 1 per node give expected random-branch weight
    # E_T/2; quasi-balance is about making every branch hit that average.
    rng = random.Random(seed)
    t = random_tree(rng, max_depth=d)

    def expected_weight(tr):
        if tr.is_leaf:
            return F(0)
        w0 = F(rng.randint(0, 16), 16)
        return (w0 + expected_weight(tr.zero) + (1 - w0) + expected_weight(tr.one)) / 2

    assert expected_weight(t) == expected_branch_length(t) / 2


class TestTruncate:
    def test_complete_five_to_two(self):
        assert truncate(complete_tree(5), 2) == complete_tree(2)

    def test_to_zero_is_leaf(self, rng):
        assert truncate(random_tree(rng), 0) == LEAF

    def test_shallow_tree_unchanged(self):
        t = left_path_tree()
        assert truncate(t, 10) == t

    def test_depth_bound(self, rng):
        for _ in range(30):
            t = random_tree(rng, max_depth=7)
            assert depth(truncate(t, 3)) <= 3


class TestSampleBranch:
    def test_leaf_empty_any_seed(self):
        assert sample_branch(LEAF, 7) == []

    def test_deterministic_per_seed(self):
        t = complete_tree(4)
        assert sample_branch(t, 123) == sample_branch(t, 123)

    def test_uniform_over_branches(self):
        t = complete_tree(3)
        counts = {}
        n = 100_000
        for seed in range(n):
            key = tuple(y for _, y in sample_branch(t, seed))
            counts[key] = counts.get(key, 0) + 1
        assert len(counts) == 8
        for c in counts.values():
            assert abs(c / n - 0.125) < 0.01

    def test_mean_length_matches_expectation(self):
        t = left_path_tree()
        n = 100_000
        mean = sum(len(sample_branch(t, s)) for s in range(n)) / n
        assert abs(mean - 1.75) < 0.02


class TestShatterCheck:
    @staticmethod
    def two_constants(budget=0):
        return WeightedClass(
            Domain(("x",)),
            (Member("zero", (0,), budget), Member("one", (1,), budget)),
        )

    def test_depth_one_on_distinguishing_point(self):
        assert shatter_check(complete_tree(1, "x"), self.two_constants()).ok

    def test_depth_two_fails(self):
        report = shatter_check(complete_tree(2, "x"), self.two_constants())
        assert not report.ok
        assert len(report.failing_branches) == 2  # the 01 and 10 branches

    @pytest.mark.parametrize("k", [0, 1, 2, 3])
    def test_all_disagreement_tree_for_two_experts(self, k):
        w = universal_class(2, k)
        assert shatter_check(complete_tree(2 * k + 1, "01"), w).ok
        deeper = shatter_check(complete_tree(2 * k + 2, "01"), w)
        assert not deeper.ok


class TestSerialization:
    def test_round_trip_without_weights(self, rng):
        t = random_tree(rng)
        parsed, weights = tree_from_json(tree_to_json(t))
        assert parsed == t
        assert weights is None

    def test_round_trip_with_weights(self):
        t = left_path_tree()
        w = quasi_balance_weights(t)
        parsed, parsed_w = tree_from_json(tree_to_json(t, w))
        assert parsed == t
        assert parsed_w.at("") == (F(1, 8), F(7, 8))

    def test_leaf_form(self):
        assert tree_to_json(LEAF) == '{"leaf": true}'

    def test_invalid_node_rejected(self):
        with pytest.raises(ValueError):
            tree_from_json('{"instance": "x", "zero": {"leaf": true}}')


def test_internal_node_needs_both_children():
    with pytest.raises(ValueError):
        MistakeTree(instance="x", zero=LEAF, one=None)
