"""Exact Littlestone and randomized Littlestone dimensions by memoized recursion.

The deterministic dimension of a weighted class obeys

    L(W) = max over effective adversary moves of 1 + min(L(W0), L(W1)),

and the randomized dimension obeys

    RL(W) = max over moves of (1 + RL(W0) + RL(W1)) / 2,

where W0, W1 charge the move's example to the class under labels 0 and 1,
and the empty class has dimension -1.  A move on which every member agrees
is a self-loop for the agreeing label; its resolved value is 1 + RL(W') for
the fully decremented class W' (resp. 1 + L(W')), which is the unique
solution of v = (1 + v + RL(W')) / 2.

Moves are enumerated as behaviors (distinct label columns), so only the
member matrix matters, never the raw domain size.  Universal expert classes
additionally compress states to counts of surviving experts per remaining
budget, which keeps n experts tractable without materializing a 2^n domain.

All arithmetic is exact rational; deterministic dimensions are ints.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

from .classes import ExpertClass, WeightedClass
from .trees import LEAF, MistakeTree, WeightFunction, node, quasi_balance_weights

EMPTY = -1

# Canonical explicit state: members as sorted ((labels...), budget) pairs.
# The labels tuples alone determine every behavior, so states are reusable
# across classes sharing a member matrix.
_XState = tuple[tuple[tuple[int, ...], int], ...]
_UState = tuple[int, ...]


def _xstate(w: WeightedClass) -> _XState:
    return w.state_key()


def _x_behaviors(state: _XState) -> list[tuple[int, ...]]:
    """Distinct member-label columns, ordered by first witnessing point."""
    npoints = len(state[0][0])
    seen: dict[tuple[int, ...], None] = {}
    for p in range(npoints):
        seen.setdefault(tuple(labels[p] for labels, _ in state), None)
    return list(seen)


def _x_apply(state: _XState, pattern: tuple[int, ...], y: int) -> _XState:
    out = []
    for (labels, budget), bit in zip(state, pattern):
        if bit == y:
            out.append((labels, budget))
        elif budget > 0:
            out.append((labels, budget - 1))
    return tuple(sorted(out))


def _x_decrement(state: _XState) -> _XState:
    return tuple(
        sorted((labels, budget - 1) for labels, budget in state if budget > 0)
    )


def _ustate(e: ExpertClass) -> _UState:
    return e.counts()


def _u_moves(counts: _UState) -> list[tuple[int, ...]]:
    """All splits (how many experts per budget level predict 1)."""
    return list(product(*(range(c + 1) for c in counts)))


def _trim(counts: list[int]) -> _UState:
    while counts and counts[-1] == 0:
        counts.pop()
    return tuple(counts)


def _u_apply(counts: _UState, ones: tuple[int, ...], y: int) -> _UState:
    new = [0] * len(counts)
    for i in range(len(counts)):
        stay = ones[i] if y == 1 else counts[i] - ones[i]
        new[i] += stay
        if i > 0:
            charged = counts[i] - ones[i] if y == 1 else ones[i]
            new[i - 1] += charged
    return _trim(new)


def _u_decrement(counts: _UState) -> _UState:
    return _trim(list(counts[1:]))


class ComputeBudgetError(RuntimeError):
    """A configured cap on visited dynamic-programming states was exceeded."""


class Solver:
    """Shared-memo dimension computations over weighted and expert classes."""

    def __init__(self, state_budget: int | None = None):
        self.state_budget = state_budget
        self._l_x: dict[_XState, int] = {}
        self._rl_x: dict[_XState, Fraction] = {}
        self._brl_x: dict[tuple[_XState, int], Fraction] = {}
        self._l_u: dict[_UState, int] = {}
        self._rl_u: dict[_UState, Fraction] = {}
        self._brl_u: dict[tuple[_UState, int], Fraction] = {}

    @property
    def states_visited(self) -> int:
        return (
            len(self._l_x)
            + len(self._rl_x)
            + len(self._brl_x)
            + len(self._l_u)
            + len(self._rl_u)
            + len(self._brl_u)
        )

    def _charge(self) -> None:
        if self.state_budget is not None and self.states_visited > self.state_budget:
            raise ComputeBudgetError(
                f"state budget of {self.state_budget} exceeded"
            )

    # -- deterministic -----------------------------------------------------

    def littlestone(self, w: WeightedClass | ExpertClass) -> int:
        """Optimal deterministic mistake bound; EMPTY (-1) for the empty class."""
        if isinstance(w, ExpertClass):
            return self._l_expert(_ustate(w))
        return self._l_explicit(_xstate(w))

    def _l_explicit(self, state: _XState) -> int:
        if not state:
            return EMPTY
        hit = self._l_x.get(state)
        if hit is not None:
            return hit
        self._charge()
        best = 0
        for pattern in _x_behaviors(state):
            if len(set(pattern)) == 1:
                v = 1 + self._l_explicit(_x_decrement(state))
            else:
                v = 1 + min(
                    self._l_explicit(_x_apply(state, pattern, 0)),
                    self._l_explicit(_x_apply(state, pattern, 1)),
                )
            best = max(best, v)
        self._l_x[state] = best
        return best

    def _l_expert(self, counts: _UState) -> int:
        if not counts:
            return EMPTY
        hit = self._l_u.get(counts)
        if hit is not None:
            return hit
        self._charge()
        best = 1 + self._l_expert(_u_decrement(counts))
        total = sum(counts)
        for ones in _u_moves(counts):
            s = sum(ones)
            if s == 0 or s == total:
                continue
            v = 1 + min(
                self._l_expert(_u_apply(counts, ones, 0)),
                self._l_expert(_u_apply(counts, ones, 1)),
            )
            best = max(best, v)
        best = max(best, 0)
        self._l_u[counts] = best
        return best

    # -- randomized ----------------------------------------------------------

    def randomized_littlestone(self, w: WeightedClass | ExpertClass) -> Fraction:
        """Optimal expected mistake bound; Fraction(-1) for the empty class."""
        if isinstance(w, ExpertClass):
            return self._rl_expert(_ustate(w))
        return self._rl_explicit(_xstate(w))

    def _rl_explicit(self, state: _XState) -> Fraction:
        if not state:
            return Fraction(EMPTY)
        hit = self._rl_x.get(state)
        if hit is not None:
            return hit
        self._charge()
        best = Fraction(0)
        for pattern in _x_behaviors(state):
            if len(set(pattern)) == 1:
                v = 1 + self._rl_explicit(_x_decrement(state))
            else:
                v = (
                    1
                    + self._rl_explicit(_x_apply(state, pattern, 0))
                    + self._rl_explicit(_x_apply(state, pattern, 1))
                ) / 2
            if v > best:
                best = v
        self._rl_x[state] = best
        return best

    def _rl_expert(self, counts: _UState) -> Fraction:
        if not counts:
            return Fraction(EMPTY)
        hit = self._rl_u.get(counts)
        if hit is not None:
            return hit
        self._charge()
        best = max(Fraction(0), 1 + self._rl_expert(_u_decrement(counts)))
        total = sum(counts)
        for ones in _u_moves(counts):
            s = sum(ones)
            if s == 0 or s == total:
                continue
            v = (
                1
                + self._rl_expert(_u_apply(counts, ones, 0))
                + self._rl_expert(_u_apply(counts, ones, 1))
            ) / 2
            if v > best:
                best = v
        self._rl_u[counts] = best
        return best

    # -- bounded horizon -----------------------------------------------------

    def bounded_littlestone(self, w: WeightedClass | ExpertClass, horizon: int) -> int:
        """min(horizon, L(W)): depth caps can only shorten balanced trees."""
        if horizon < 0:
            raise ValueError("horizon must be non-negative")
        dim = self.littlestone(w)
        if dim == EMPTY:
            return EMPTY
        return min(horizon, dim)

    def bounded_randomized_littlestone(
        self, w: WeightedClass | ExpertClass, horizon: int
    ) -> Fraction:
        if horizon < 0:
            raise ValueError("horizon must be non-negative")
        if isinstance(w, ExpertClass):
            return self._brl_expert(_ustate(w), horizon)
        return self._brl_explicit(_xstate(w), horizon)

    def _brl_explicit(self, state: _XState, t: int) -> Fraction:
        if not state:
            return Fraction(EMPTY)
        if t == 0:
            return Fraction(0)
        key = (state, t)
        hit = self._brl_x.get(key)
        if hit is not None:
            return hit
        self._charge()
        best = Fraction(0)
        for pattern in _x_behaviors(state):
            if len(set(pattern)) == 1:
                # Self-loop along the agreeing label; no fixed point needed
                # since the horizon strictly decreases.
                v = (
                    1
                    + self._brl_explicit(state, t - 1)
                    + self._brl_explicit(_x_decrement(state), t - 1)
                ) / 2
            else:
                v = (
                    1
                    + self._brl_explicit(_x_apply(state, pattern, 0), t - 1)
                    + self._brl_explicit(_x_apply(state, pattern, 1), t - 1)
                ) / 2
            if v > best:
                best = v
        self._brl_x[key] = best
        return best

    def _brl_expert(self, counts: _UState, t: int) -> Fraction:
        if not counts:
            return Fraction(EMPTY)
        if t == 0:
            return Fraction(0)
        key = (counts, t)
        hit = self._brl_u.get(key)
        if hit is not None:
            return hit
        self._charge()
        dec = _u_decrement(counts)
        best = max(
            Fraction(0),
            (1 + self._brl_expert(counts, t - 1) + self._brl_expert(dec, t - 1)) / 2,
        )
        total = sum(counts)
        for ones in _u_moves(counts):
            s = sum(ones)
            if s == 0 or s == total:
                continue
            v = (
                1
                + self._brl_expert(_u_apply(counts, ones, 0), t - 1)
                + self._brl_expert(_u_apply(counts, ones, 1), t - 1)
            ) / 2
            if v > best:
                best = v
        self._brl_u[key] = best
        return best

    # -- strategy extraction ---------------------------------------------------

    def extract_optimal_tree(
        self, w: WeightedClass | ExpertClass, horizon: int
    ) -> tuple[MistakeTree, WeightFunction]:
        """An optimal depth-<=horizon adversary tree with its branch weights.

        The tree is shattered by the class, monotone, and satisfies
        E_T / 2 = RL(W, horizon) exactly; node labels are the first domain
        witness of the maximizing behavior (ties resolved in witness order).
        Identical subtrees are shared structurally.
        """
        if isinstance(w, ExpertClass):
            w = w.explicit()
        if w.is_empty:
            raise ValueError("cannot extract a strategy for the empty class")
        domain = w.domain.points
        npoints = len(domain)
        cache: dict[tuple[_XState, int], MistakeTree] = {}

        def ordered_behaviors(state: _XState) -> list[tuple[tuple[int, ...], int]]:
            seen: dict[tuple[int, ...], int] = {}
            for p in range(npoints):
                col = tuple(labels[p] for labels, _ in state)
                seen.setdefault(col, p)
            return list(seen.items())

        def build(state: _XState, t: int) -> MistakeTree:
            value = self._brl_explicit(state, t)
            if value == 0:
                return LEAF
            key = (state, t)
            hit = cache.get(key)
            if hit is not None:
                return hit
            for pattern, witness in ordered_behaviors(state):
                if len(set(pattern)) == 1:
                    b = pattern[0]
                    children = (
                        (state if b == 0 else _x_decrement(state)),
                        (_x_decrement(state) if b == 0 else state),
                    )
                else:
                    children = (
                        _x_apply(state, pattern, 0),
                        _x_apply(state, pattern, 1),
                    )
                v = (
                    1
                    + self._brl_explicit(children[0], t - 1)
                    + self._brl_explicit(children[1], t - 1)
                ) / 2
                if v == value:
                    out = node(
                        domain[witness],
                        build(children[0], t - 1),
                        build(children[1], t - 1),
                    )
                    cache[key] = out
                    return out
            raise AssertionError("no behavior attains the computed dimension")

        tree = build(_xstate(w), horizon)
        return tree, quasi_balance_weights(tree)

    def horizon_for_slack(self, w: WeightedClass | ExpertClass, slack: Fraction) -> int:
        """Smallest horizon T with RL(W, T) >= RL(W) - slack.

        Doubles T until the target is met, then bisects; valid because the
        bounded dimension is non-decreasing in the horizon.
        """
        slack = Fraction(slack)
        if slack <= 0:
            raise ValueError("slack must be positive")
        target = self.randomized_littlestone(w) - slack
        if self.bounded_randomized_littlestone(w, 0) >= target:
            return 0
        hi = 1
        while self.bounded_randomized_littlestone(w, hi) < target:
            hi *= 2
        lo = hi // 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if self.bounded_randomized_littlestone(w, mid) >= target:
                hi = mid
            else:
                lo = mid
        return hi


def result_document(value, states_visited: int) -> dict:
    """Serializable record of a dimension query: exact, decimal, and work."""
    return {
        "value": str(value),
        "decimal": float(value),
        "states_visited": states_visited,
    }


_shared = Solver()


def littlestone(w: WeightedClass | ExpertClass) -> int:
    return _shared.littlestone(w)


def randomized_littlestone(w: WeightedClass | ExpertClass) -> Fraction:
    return _shared.randomized_littlestone(w)


def bounded_littlestone(w: WeightedClass | ExpertClass, horizon: int) -> int:
    return _shared.bounded_littlestone(w, horizon)


def bounded_randomized_littlestone(
    w: WeightedClass | ExpertClass, horizon: int
) -> Fraction:
    return _shared.bounded_randomized_littlestone(w, horizon)


def extract_optimal_tree(
    w: WeightedClass | ExpertClass, horizon: int
) -> tuple[MistakeTree, WeightFunction]:
    return _shared.extract_optimal_tree(w, horizon)


def horizon_for_slack(w: WeightedClass | ExpertClass, slack) -> int:
    return _shared.horizon_for_slack(w, slack)
