# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

import itertools
from typing import Tuple

import pytest

from coeffs import (
    balanced_shape,
    binomial,
    descending_order,
    largest_multinomial,
    multinomial,
    shape_count,
    shapes_in_scope,
    sum_of_largest,
    weak_integer_compositions,
)
from constants import SCOPE_AT_MOST, SCOPE_EXACT
from model import ParameterError


@pytest.mark.parametrize(
    "n,k,expected", [(4, 2, 6), (0, 0, 1), (5, 6, 0), (5, -1, 0), (60, 30, 118264581564861424)]
)
def test_binomial(n: int, k: int, expected: int) -> None:
    assert binomial(n, k) == expected


def test_binomial_rejects_negative_n() -> None:
    with pytest.raises(ParameterError):
        binomial(-1, 0)


@pytest.mark.parametrize(
    "shape,expected", [((2, 2), 6), ((1, 1, 1), 6), ((5, 4, 1), 1260), ((0, 0), 1), ((), 1)]
)
def test_multinomial(shape, expected: int) -> None:
    assert multinomial(shape) == expected


def test_multinomial_matches_permutation_count() -> None:
    for shape in [(2, 1, 1), (3, 0, 2), (1, 1, 1, 1)]:
        word = [k for k, size in enumerate(shape) for _ in range(size)]

        assert multinomial(shape) == len(set(itertools.permutations(word)))


def test_weak_integer_compositions() -> None:
    shapes = list(weak_integer_compositions(2, 2))

    assert shapes == [(2, 0), (1, 1), (0, 2)]


@pytest.mark.parametrize("n,p", [(0, 1), (4, 3), (6, 2), (5, 4)])
def test_shape_count_matches_enumeration(n: int, p: int) -> None:
    assert shape_count(n, p, SCOPE_EXACT) == len(shapes_in_scope(n, p, SCOPE_EXACT))
    assert shape_count(n, p, SCOPE_AT_MOST) == len(shapes_in_scope(n, p, SCOPE_AT_MOST))


def test_shapes_in_scope_rejects_unknown_scope() -> None:
    with pytest.raises(ParameterError):
        shapes_in_scope(3, 2, "everything")


def test_descending_order_n2_p2() -> None:
    order = descending_order(2, 2)

    assert [e.shape for e in order.entries] == [(1, 1), (2, 0), (0, 2)]
    assert order.values == (2, 1, 1)
    assert [e.rank for e in order.entries] == [1, 2, 3]


def test_descending_order_ties_prefer_larger_totals() -> None:
    order = descending_order(1, 2, SCOPE_AT_MOST)

    assert [e.shape for e in order.entries] == [(1, 0), (0, 1), (0, 0)]


def test_descending_order_ties_prefer_balanced_forms() -> None:
    order = descending_order(10, 3)
    shapes = [e.shape for e in order.entries]

    assert shapes.index((5, 4, 1)) < shapes.index((6, 2, 2))


def test_descending_order_is_deterministic() -> None:
    descending_order.cache_clear()
    first = descending_order(6, 3).entries
    descending_order.cache_clear()

    assert descending_order(6, 3).entries == first


def test_descending_order_values_are_sorted() -> None:
    values = descending_order(7, 4, SCOPE_AT_MOST).values

    assert list(values) == sorted(values, reverse=True)


def test_value_at_past_the_end_is_zero() -> None:
    order = descending_order(2, 2)

    assert order.value_at(3) == 1
    assert order.value_at(4) == 0
    with pytest.raises(ParameterError):
        order.value_at(0)


@pytest.mark.parametrize("n,p", [(4, 2), (4, 3), (7, 3), (10, 4), (0, 2)])
def test_largest_multinomial_is_the_first_value(n: int, p: int) -> None:
    assert largest_multinomial(n, p)[1] == descending_order(n, p).value_at(1)


@pytest.mark.parametrize(
    "n,p,shape,value", [(10, 3, (4, 3, 3), 4200), (4, 2, (2, 2), 6), (0, 3, (0, 0, 0), 1)]
)
def test_largest_multinomial(n: int, p: int, shape: Tuple[int, ...], value: int) -> None:
    assert largest_multinomial(n, p) == (shape, value)


def test_balanced_shape() -> None:
    assert balanced_shape(7, 3) == (3, 2, 2)
    assert balanced_shape(0, 2) == (0, 0)


@pytest.mark.parametrize(
    "n,p,count,scope,expected",
    [
        (4, 2, 2, SCOPE_EXACT, 10),
        (3, 2, 4, SCOPE_AT_MOST, 9),
        (4, 3, 4, SCOPE_EXACT, 42),
        (3, 3, 100, SCOPE_EXACT, 27),
        (4, 2, 0, SCOPE_EXACT, 0),
    ],
)
def test_sum_of_largest(n: int, p: int, count: int, scope: str, expected: int) -> None:
    assert sum_of_largest(n, p, count, scope) == expected
