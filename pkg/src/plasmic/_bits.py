"""Bitmask subset helpers and the shared enumeration budget."""

from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Iterator

DEFAULT_BUDGET = 10**8


class BudgetExceeded(RuntimeError):
    """An exhaustive search would visit more candidates than allowed."""


class Budget:
    __slots__ = ("limit", "used", "what")

    def __init__(self, limit: int | None, what: str = "search"):
        self.limit = DEFAULT_BUDGET if limit is None else limit
        self.used = 0
        self.what = what

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.limit:
            raise BudgetExceeded(f"{self.what}: more than {self.limit} candidates visited")

    def require(self, size: int) -> None:
        """Fail fast when a search space is known up front to be too large."""
        if size > self.limit:
            raise BudgetExceeded(f"{self.what}: {size} candidates exceed budget {self.limit}")


def members(mask: int) -> Iterator[int]:
    """Yield the bit positions set in ``mask``, ascending."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def mask_of(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << i
    return m


# Subsets of [n] = {1..n} use bit i-1 for element i.

def subset_mask(elements: Iterable[int]) -> int:
    m = 0
    for i in elements:
        if i < 1:
            raise ValueError(f"subset element {i} is not in [n]")
        m |= 1 << (i - 1)
    return m


def subset_elements(mask: int) -> tuple[int, ...]:
    return tuple(i + 1 for i in members(mask))


@lru_cache(maxsize=None)
def subset_order(n: int) -> tuple[int, ...]:
    """All subsets of [n], ordered by cardinality then lexicographically.

    This is the order used for printed tuples: 1,2,3,12,13,23,123 for n = 3.
    """
    return tuple(sorted(range(1 << n), key=lambda s: (s.bit_count(), subset_elements(s))))


@lru_cache(maxsize=None)
def unordered_splits(mask: int) -> tuple[tuple[int, int], ...]:
    """Unordered pairs {T, S-T} of nonempty disjoint parts of ``mask``."""
    out = []
    sub = (mask - 1) & mask
    while sub:
        rest = mask ^ sub
        if sub < rest:
            out.append((sub, rest))
        sub = (sub - 1) & mask
    out.sort()
    return tuple(out)


def format_subset(mask: int) -> str:
    return "{" + ",".join(map(str, subset_elements(mask))) + "}"
