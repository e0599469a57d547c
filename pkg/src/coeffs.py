# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Binomial and multinomial coefficients and their descending orders."""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, List, Sequence, Tuple

from constants import SCOPE_EXACT, SCOPES
from model import ParameterError, Shape

logger = logging.getLogger(__name__)


def binomial(n: int, k: int) -> int:
    """Return n choose k, zero when k is outside 0..n."""
    if n < 0:
        raise ParameterError(f"Binomial with negative n={n}")
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


def multinomial(shape: Sequence[int]) -> int:
    """Return the multinomial coefficient of a shape, the total being sum(shape)."""
    value = 1
    total = 0
    for size in shape:
        if size < 0:
            raise ParameterError(f"Negative part size in shape {tuple(shape)}")
        total += size
        value *= math.comb(total, size)
    return value


def weak_integer_compositions(total: int, p: int) -> Iterator[Shape]:
    """Yield every ordered p-tuple of non-negative integers summing to total."""
    if p == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in weak_integer_compositions(total - first, p - 1):
            yield (first,) + rest


def shapes_in_scope(n: int, p: int, scope: str) -> List[Shape]:
    """Return the shapes of total n, or of total at most n."""
    if scope not in SCOPES:
        raise ParameterError(f"Unknown scope {scope}")
    if n < 0 or p < 1:
        raise ParameterError(f"Need n >= 0 and p >= 1, got n={n} and p={p}")
    totals = [n] if scope == SCOPE_EXACT else range(n + 1)
    return [shape for total in totals for shape in weak_integer_compositions(total, p)]


@dataclass(frozen=True)
class CoefficientEntry:
    """A shape with its coefficient and 1-based rank in a descending order."""

    shape: Shape
    value: int
    rank: int

    @property
    def total(self) -> int:
        return sum(self.shape)

    @property
    def form(self) -> Shape:
        return tuple(sorted(self.shape, reverse=True))


@dataclass(frozen=True)
class DescendingOrder:
    """Every shape in scope, sorted by non-increasing coefficient."""

    n: int
    p: int
    scope: str
    entries: Tuple[CoefficientEntry, ...]

    @property
    def values(self) -> Tuple[int, ...]:
        return tuple(entry.value for entry in self.entries)

    def value_at(self, rank: int) -> int:
        """Return M_rank, zero past the end of the order."""
        if rank < 1:
            raise ParameterError(f"Rank {rank} must be at least 1")
        if rank > len(self.entries):
            return 0
        return self.entries[rank - 1].value

    def __len__(self) -> int:
        return len(self.entries)


def _order_key(shape: Shape, value: int) -> Tuple:
    # Larger value, then larger total, then the more balanced form, then
    # lexicographically larger raw shape.
    form = tuple(sorted(shape, reverse=True))
    return (-value, -sum(shape), form, tuple(-size for size in shape))


@lru_cache(maxsize=256)
def descending_order(n: int, p: int, scope: str = SCOPE_EXACT) -> DescendingOrder:
    """Return the descending order of coefficients for shapes in scope.

    Ties are broken deterministically, so the same (n, p, scope) always gives
    the same sequence.
    For example, descending_order(2, 2) lists (1, 1) with 2, then (2, 0) and
    (0, 2) with 1.
    """
    shapes = shapes_in_scope(n, p, scope)
    valued = sorted(((shape, multinomial(shape)) for shape in shapes), key=lambda x: _order_key(*x))
    entries = tuple(
        CoefficientEntry(shape, value, rank) for rank, (shape, value) in enumerate(valued, start=1)
    )
    logger.debug(f"Built descending order for n={n}, p={p}, scope={scope}: {len(entries)} shapes")
    return DescendingOrder(n, p, scope, entries)


def shape_count(n: int, p: int, scope: str = SCOPE_EXACT) -> int:
    """Return the number of shapes in scope without enumerating them."""
    if scope == SCOPE_EXACT:
        return binomial(n + p - 1, p - 1)
    return binomial(n + p, p)


def balanced_shape(n: int, p: int) -> Shape:
    """Return the most balanced shape of total n, larger parts first."""
    if n < 0 or p < 1:
        raise ParameterError(f"Need n >= 0 and p >= 1, got n={n} and p={p}")
    quotient, remainder = divmod(n, p)
    return tuple([quotient + 1] * remainder + [quotient] * (p - remainder))


def largest_multinomial(n: int, p: int) -> Tuple[Shape, int]:
    """Return the balanced shape of total n over p parts and its coefficient."""
    shape = balanced_shape(n, p)
    return shape, multinomial(shape)


def sum_of_largest(n: int, p: int, count: int, scope: str = SCOPE_EXACT) -> int:
    """Return the sum of the count largest coefficients in scope."""
    if count < 0:
        raise ParameterError(f"Cannot sum {count} coefficients")
    order = descending_order(n, p, scope)
    return sum(order.values[:count])
