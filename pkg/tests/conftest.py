"""Shared test helpers: independent oracles and random generators.

The oracles here deliberately avoid the production engine's shortcuts
(behavior deduplication, canonical state compression, self-loop
resolution): they maximize directly over tree shapes rooted at raw domain
points, which is the defining supremum for bounded-depth dimensions.
"""

from __future__ import annotations

import random
from fractions import Fraction

import pytest

from littlestone.classes import Domain, Member, WeightedClass, restrict
from littlestone.trees import (
    LEAF,
    MistakeTree,
    expected_branch_length,
    node,
)


def oracle_bounded(w: WeightedClass, depth: int) -> tuple[Fraction, int]:
    """(max E_T, max m_T) over all trees of depth <= depth shattered by w.

    Direct recursion over root instance choices: a tree rooted at x is
    shattered iff both single-label restrictions are non-empty and shatter
    the subtrees.  Memoized on (member multiset, depth) only.
    """
    memo: dict = {}

    def rec(cls: WeightedClass, d: int) -> tuple[Fraction, int]:
        key = (cls.state_key(), d)
        hit = memo.get(key)
        if hit is not None:
            return hit
        best_e, best_m = Fraction(0), 0
        if d > 0:
            for x in cls.domain:
                w0 = restrict(cls, x, 0)
                w1 = restrict(cls, x, 1)
                if w0.is_empty or w1.is_empty:
                    continue
                e0, m0 = rec(w0, d - 1)
                e1, m1 = rec(w1, d - 1)
                best_e = max(best_e, 1 + (e0 + e1) / 2)
                best_m = max(best_m, 1 + min(m0, m1))
        memo[key] = (best_e, best_m)
        return memo[key]

    if w.is_empty:
        raise ValueError("oracle needs a non-empty class")
    return rec(w, depth)


def all_shattered_trees(w: WeightedClass, depth: int) -> list[MistakeTree]:
    """Literally materialize every shattered tree of depth <= depth.

    Exponential; only for validating the oracle itself at toy scale.
    """
    if w.is_empty:
        return []
    out = [LEAF]
    if depth > 0:
        for x in w.domain:
            w0 = restrict(w, x, 0)
            w1 = restrict(w, x, 1)
            if w0.is_empty or w1.is_empty:
                continue
            for t0 in all_shattered_trees(w0, depth - 1):
                for t1 in all_shattered_trees(w1, depth - 1):
                    out.append(node(x, t0, t1))
    return out


def random_tree(
    rng: random.Random,
    max_depth: int = 6,
    leaf_prob: float = 0.35,
    points: tuple[str, ...] = ("a", "b", "c"),
) -> MistakeTree:
    if max_depth == 0 or rng.random() < leaf_prob:
        return LEAF
    return node(
        rng.choice(points),
        random_tree(rng, max_depth - 1, leaf_prob, points),
        random_tree(rng, max_depth - 1, leaf_prob, points),
    )


def monotonize(tree: MistakeTree) -> MistakeTree:
    """Repair a tree bottom-up into a monotone one by promoting any child
    whose expected branch length exceeds its parent's."""
    if tree.is_leaf:
        return tree
    zero = monotonize(tree.zero)
    one = monotonize(tree.one)
    e0 = expected_branch_length(zero)
    e1 = expected_branch_length(one)
    if abs(e0 - e1) > 2:
        return zero if e0 >= e1 else one
    return node(tree.instance, zero, one)


def random_shattered_tree(
    w: WeightedClass, rng: random.Random, max_depth: int, grow_prob: float = 0.8
) -> MistakeTree:
    """A random tree shattered by w, grown point by point."""
    if max_depth == 0 or rng.random() > grow_prob:
        return LEAF
    options = []
    for x in w.domain:
        w0 = restrict(w, x, 0)
        w1 = restrict(w, x, 1)
        if not w0.is_empty and not w1.is_empty:
            options.append((x, w0, w1))
    if not options:
        return LEAF
    x, w0, w1 = rng.choice(options)
    return node(
        x,
        random_shattered_tree(w0, rng, max_depth - 1, grow_prob),
        random_shattered_tree(w1, rng, max_depth - 1, grow_prob),
    )


def random_weighted_class(
    rng: random.Random,
    max_points: int = 3,
    max_members: int = 3,
    max_budget: int = 1,
) -> WeightedClass:
    npts = rng.randint(1, max_points)
    domain = Domain(tuple(f"p{i}" for i in range(npts)))
    members = []
    seen = set()
    for i in range(rng.randint(1, max_members)):
        labels = tuple(rng.randint(0, 1) for _ in range(npts))
        budget = rng.randint(0, max_budget)
        if (labels, budget) in seen:
            continue
        seen.add((labels, budget))
        members.append(Member(f"h{i}", labels, budget))
    return WeightedClass(domain, tuple(members))


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0xC0FFEE)
