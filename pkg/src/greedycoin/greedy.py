"""Greedy change-making over any totally ordered, subtractable values.

Works unchanged for small Python ints and for :class:`~greedycoin.encoding.BigAmount`.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Sequence


@dataclass(frozen=True)
class GreedyTrace:
    steps: tuple[tuple[object, object], ...]   # (coin, remaining after it)
    leftover: object

    @property
    def chosen(self) -> list:
        return [c for c, _ in self.steps]

    def __len__(self) -> int:
        return len(self.steps)


class CoinSystem:
    """Distinct coin values with a largest-coin-at-most query."""

    def __init__(self, coins_desc: Sequence):
        coins = list(coins_desc)
        if not coins:
            raise ValueError("coin set is empty")
        for a, b in zip(coins, coins[1:]):
            if not a > b:
                raise ValueError(f"coins must be strictly descending; {a} before {b}")
        self.desc = coins
        self._asc = coins[::-1]

    @classmethod
    def from_values(cls, values) -> CoinSystem:
        return cls(sorted(set(values), reverse=True))

    def __len__(self) -> int:
        return len(self.desc)

    def __contains__(self, value) -> bool:
        i = bisect_right(self._asc, value)
        return i > 0 and self._asc[i - 1] == value

    def largest_at_most(self, amount):
        i = bisect_right(self._asc, amount)
        return self._asc[i - 1] if i else None


def _system(coins) -> CoinSystem:
    return coins if isinstance(coins, CoinSystem) else CoinSystem(coins)


def greedy_set(W, coins, limit: int | None = None) -> GreedyTrace:
    """Repeatedly take the largest coin not exceeding the remaining amount.

    Stops at zero or when no coin fits; ``limit`` caps the number of steps.
    """
    system = _system(coins)
    remaining = W
    zero = W - W
    steps = []
    while remaining != zero and (limit is None or len(steps) < limit):
        c = system.largest_at_most(remaining)
        if c is None:
            break
        remaining = remaining - c
        steps.append((c, remaining))
    return GreedyTrace(tuple(steps), remaining)


def gcc_decision(W, coins, query) -> bool:
    system = _system(coins)
    if query not in system:
        raise ValueError("query coin is not in the coin set")
    return any(c == query for c, _ in greedy_set(W, system).steps)


def optimal_dp(W: int, coins: Sequence[int]) -> tuple[int, list[int]]:
    """Fewest coins summing to W, with one witness multiset (largest first)."""
    if W == 0:
        return 0, []
    coins = sorted(set(coins))
    if 1 not in coins:
        raise ValueError("optimal_dp needs a coin of value 1")
    best = [0] + [W + 1] * W
    last = [0] * (W + 1)
    for w in range(1, W + 1):
        for c in coins:
            if c > w:
                break
            if best[w - c] + 1 < best[w]:
                best[w] = best[w - c] + 1
                last[w] = c
    witness = []
    w = W
    while w:
        witness.append(last[w])
        w -= last[w]
    return best[W], sorted(witness, reverse=True)
