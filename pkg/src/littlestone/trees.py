"""Finite mistake trees and their branch statistics.

A mistake tree is a full rooted ordered binary tree whose internal nodes
carry instances; the left edge means label 0 and the right edge label 1, so
every root-to-leaf branch spells out an example sequence.  The central
quantities are the expected length ``E_T`` of a uniformly random branch and
the minimum branch length ``m_T``.

A tree is quasi-balanced when its edges admit weights in [0,1], summing to
one at every node, under which all branches weigh exactly ``E_T / 2``; this
happens precisely for monotone trees (no child subtree has larger expected
branch length than its parent), and the weight assignment is then unique.

Extracted adversary trees may share identical subtrees structurally, so the
statistics below memoize on object identity rather than recomputing per
occurrence.
"""

from __future__ import annotations

import json
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Mapping

from .classes import Example, ExampleSequence, ExpertClass, WeightedClass, min_mistakes

# Deep trees are built by bounded-horizon extraction; depth stays modest but
# can exceed the CPython default recursion guard together with test overhead.
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)


class NotQuasiBalancedError(ValueError):
    """The tree admits no equal-branch-weight assignment.

    ``position`` is the first node in preorder where the induced weight
    leaves [0,1].
    """

    def __init__(self, position: str):
        super().__init__(f"not quasi-balanced: weight leaves [0,1] at node {position!r}")
        self.position = position


@dataclass(frozen=True)
class MistakeTree:
    """Leaf (no fields set) or internal node with an instance and two subtrees."""

    instance: str | None = None
    zero: "MistakeTree | None" = None
    one: "MistakeTree | None" = None

    def __post_init__(self) -> None:
        parts = (self.instance, self.zero, self.one)
        if any(p is None for p in parts) and any(p is not None for p in parts):
            raise ValueError("internal nodes need an instance and both children")

    @property
    def is_leaf(self) -> bool:
        return self.instance is None


LEAF = MistakeTree()


def node(instance: str, zero: MistakeTree, one: MistakeTree) -> MistakeTree:
    return MistakeTree(instance=instance, zero=zero, one=one)


def complete_tree(depth: int, instance: str = "x") -> MistakeTree:
    """Complete tree of the given depth with every node labeled ``instance``."""
    t = LEAF
    for _ in range(depth):
        t = node(instance, t, t)
    return t


def _memoized(tree: MistakeTree, fn, cache: dict):
    key = id(tree)
    hit = cache.get(key)
    if hit is None:
        hit = fn(tree)
        cache[key] = hit
    return hit


def expected_branch_length(tree: MistakeTree) -> Fraction:
    """E_T: expected length of a uniformly random root-to-leaf walk.

    Satisfies E_T = 1 + (E_{T0} + E_{T1}) / 2 at internal nodes and equals
    the explicit sum over branches of |b| * 2^-|b|.
    """
    cache: dict[int, Fraction] = {}

    def rec(t: MistakeTree) -> Fraction:
        if t.is_leaf:
            return Fraction(0)
        e0 = _memoized(t.zero, rec, cache)
        e1 = _memoized(t.one, rec, cache)
        return 1 + (e0 + e1) / 2

    return _memoized(tree, rec, cache)


def min_branch_length(tree: MistakeTree) -> int:
    """m_T: length of the shortest root-to-leaf branch."""
    cache: dict[int, int] = {}

    def rec(t: MistakeTree) -> int:
        if t.is_leaf:
            return 0
        return 1 + min(_memoized(t.zero, rec, cache), _memoized(t.one, rec, cache))

    return _memoized(tree, rec, cache)


def depth(tree: MistakeTree) -> int:
    cache: dict[int, int] = {}

    def rec(t: MistakeTree) -> int:
        if t.is_leaf:
            return 0
        return 1 + max(_memoized(t.zero, rec, cache), _memoized(t.one, rec, cache))

    return _memoized(tree, rec, cache)


def branches(tree: MistakeTree) -> Iterator[ExampleSequence]:
    """Yield every branch as its example sequence (left edges first)."""
    stack: list[tuple[MistakeTree, ExampleSequence]] = [(tree, [])]
    while stack:
        t, prefix = stack.pop()
        if t.is_leaf:
            yield prefix
        else:
            stack.append((t.one, prefix + [(t.instance, 1)]))
            stack.append((t.zero, prefix + [(t.instance, 0)]))


def is_monotone(tree: MistakeTree) -> bool:
    """True when no subtree's child has larger expected branch length.

    Equivalently |E_{T0} - E_{T1}| <= 2 at every internal node, and exactly
    the condition under which :func:`quasi_balance_weights` succeeds.
    """
    e_cache: dict[int, Fraction] = {}
    ok_cache: dict[int, bool] = {}

    def e(t: MistakeTree) -> Fraction:
        if t.is_leaf:
            return Fraction(0)
        return 1 + (_memoized(t.zero, e, e_cache) + _memoized(t.one, e, e_cache)) / 2

    def ok(t: MistakeTree) -> bool:
        if t.is_leaf:
            return True
        balanced = abs(_memoized(t.zero, e, e_cache) - _memoized(t.one, e, e_cache)) <= 2
        return balanced and _memoized(t.zero, ok, ok_cache) and _memoized(t.one, ok, ok_cache)

    return _memoized(tree, ok, ok_cache)


@dataclass(frozen=True)
class WeightFunction:
    """Per-edge weights addressed by root-to-node label strings.

    ``weights[pos]`` holds (w0, w1) for the internal node reached from the
    root by following the bits of ``pos``; w0 + w1 = 1 always.
    """

    weights: Mapping[str, tuple[Fraction, Fraction]]

    def at(self, position: str) -> tuple[Fraction, Fraction]:
        return self.weights[position]

    def branch_weight(self, labels: Iterator[int] | list[int]) -> Fraction:
        total = Fraction(0)
        pos = ""
        for y in labels:
            w0, w1 = self.weights[pos]
            total += w0 if y == 0 else w1
            pos += str(y)
        return total


def tree_weight(tree: MistakeTree) -> Fraction:
    """The common branch weight E_T / 2 of a quasi-balanced tree."""
    return expected_branch_length(tree) / 2


def quasi_balance_weights(tree: MistakeTree) -> WeightFunction:
    """The unique equal-branch-weight assignment, if one exists.

    At a node with subtree weights lam0, lam1 the induced edge weights are
    (1 + lam1 - lam0) / 2 and its complement; the tree is quasi-balanced iff
    these stay within [0,1] everywhere, i.e. iff the tree is monotone.
    Raises :class:`NotQuasiBalancedError` at the first preorder violation.
    """
    e_cache: dict[int, Fraction] = {}

    def e(t: MistakeTree) -> Fraction:
        if t.is_leaf:
            return Fraction(0)
        return 1 + (_memoized(t.zero, e, e_cache) + _memoized(t.one, e, e_cache)) / 2

    weights: dict[str, tuple[Fraction, Fraction]] = {}
    stack: list[tuple[MistakeTree, str]] = [(tree, "")]
    while stack:
        t, pos = stack.pop()
        if t.is_leaf:
            continue
        lam0 = _memoized(t.zero, e, e_cache) / 2
        lam1 = _memoized(t.one, e, e_cache) / 2
        w0 = (1 + lam1 - lam0) / 2
        if w0 < 0 or w0 > 1:
            raise NotQuasiBalancedError(pos)
        weights[pos] = (w0, 1 - w0)
        stack.append((t.one, pos + "1"))
        stack.append((t.zero, pos + "0"))
    return WeightFunction(weights)


def truncate(tree: MistakeTree, max_depth: int) -> MistakeTree:
    """Replace every node at the given depth by a leaf."""
    cache: dict[tuple[int, int], MistakeTree] = {}

    def rec(t: MistakeTree, d: int) -> MistakeTree:
        if t.is_leaf:
            return t
        if d == 0:
            return LEAF
        key = (id(t), d)
        hit = cache.get(key)
        if hit is None:
            hit = node(t.instance, rec(t.zero, d - 1), rec(t.one, d - 1))
            cache[key] = hit
        return hit

    if max_depth < 0:
        raise ValueError("depth must be non-negative")
    return rec(tree, max_depth)


def sample_branch(tree: MistakeTree, seed: int) -> ExampleSequence:
    """Walk from the root taking a fair-coin edge at each node; deterministic per seed."""
    return sample_branch_rng(tree, random.Random(seed))


def sample_branch_rng(tree: MistakeTree, rng: random.Random) -> ExampleSequence:
    out: ExampleSequence = []
    t = tree
    while not t.is_leaf:
        y = rng.getrandbits(1)
        out.append((t.instance, y))
        t = t.one if y else t.zero
    return out


@dataclass(frozen=True)
class ShatterReport:
    ok: bool
    failing_branches: tuple[tuple[Example, ...], ...]

    def __bool__(self) -> bool:
        return self.ok


def shatter_check(tree: MistakeTree, w: WeightedClass | ExpertClass) -> ShatterReport:
    """Whether every branch's example sequence is realizable by the class."""
    failing: list[tuple[Example, ...]] = []
    for branch in branches(tree):
        if not min_mistakes(branch, w).realizable:
            failing.append(tuple(branch))
    return ShatterReport(ok=not failing, failing_branches=tuple(failing))


# ---------------------------------------------------------------------------
# Serialization: {"leaf":true} | {"instance":..., "zero":..., "one":...},
# with optional exact-rational weight annotations as "w0" strings.
# ---------------------------------------------------------------------------


def tree_to_dict(tree: MistakeTree, weights: WeightFunction | None = None) -> dict:
    def rec(t: MistakeTree, pos: str) -> dict:
        if t.is_leaf:
            return {"leaf": True}
        out = {
            "instance": t.instance,
            "zero": rec(t.zero, pos + "0"),
            "one": rec(t.one, pos + "1"),
        }
        if weights is not None:
            out["w0"] = str(weights.at(pos)[0])
        return out

    return rec(tree, "")


def tree_from_dict(doc: dict) -> tuple[MistakeTree, WeightFunction | None]:
    weights: dict[str, tuple[Fraction, Fraction]] = {}
    saw_weight = False

    def rec(d: dict, pos: str) -> MistakeTree:
        nonlocal saw_weight
        if d.get("leaf"):
            return LEAF
        if "instance" not in d or "zero" not in d or "one" not in d:
            raise ValueError(f"tree node at {pos!r}: need instance/zero/one or leaf")
        if "w0" in d:
            saw_weight = True
            w0 = Fraction(d["w0"])
            weights[pos] = (w0, 1 - w0)
        return node(d["instance"], rec(d["zero"], pos + "0"), rec(d["one"], pos + "1"))

    tree = rec(doc, "")
    return tree, (WeightFunction(weights) if saw_weight else None)


def tree_to_json(tree: MistakeTree, weights: WeightFunction | None = None) -> str:
    return json.dumps(tree_to_dict(tree, weights))


def tree_from_json(text: str) -> tuple[MistakeTree, WeightFunction | None]:
    return tree_from_dict(json.loads(text))
