# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

import itertools
from fractions import Fraction
from typing import List

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from constants import SCOPE_AT_MOST, SCOPE_EXACT
from extremal import (
    all_compositions,
    all_pairs,
    all_partial_compositions,
    all_subsets,
    construct_eg_pairs,
    construct_middle_layers,
    construct_notr,
)
from hyp import eg_condition, is_r_chain_free, meshalkin_condition, unifying_condition
from lym import (
    HkrInstance,
    cardinality_bound_from_lym,
    hkr_check,
    hkr_equality,
    lym_compositions_full,
    lym_compositions_partial,
    lym_example_notr,
    lym_pairs,
    lym_subsets,
    notr_layers,
    theorem_bound,
    theorem_lym_bound,
)
from model import (
    Family,
    GroundSet,
    MalformedInstanceError,
    NotFullCompositionError,
    ParameterError,
    WeakComposition,
)
from tests.unit.conftest import (
    boundary_hkr_instances,
    hkr_instances,
    satisfying,
    valid_families,
)


def _powerset(items: List) -> List[List]:
    return [
        list(chosen)
        for size in range(len(items) + 1)
        for chosen in itertools.combinations(items, size)
    ]


def test_lym_subsets_middle_layer() -> None:
    report = lym_subsets(construct_middle_layers(4, 1))

    assert report.sum == 1
    assert report.satisfied


def test_lym_subsets_two_layers() -> None:
    report = lym_subsets(construct_middle_layers(4, 2), bound=2)

    assert report.sum == 2
    assert report.bound == 2
    assert report.satisfied
    assert not lym_subsets(construct_middle_layers(4, 2)).satisfied


def test_lym_subsets_empty_set() -> None:
    assert lym_subsets(Family.of_subsets(3, [[]])).sum == 1


def test_lym_subsets_single_set_is_exact() -> None:
    report = lym_subsets(Family.of_subsets(7, [[0, 1, 2]]))

    assert report.sum == Fraction(1, 35)


def test_lym_subsets_rejects_compositions(meshalkin_4_2: Family) -> None:
    with pytest.raises(ParameterError):
        lym_subsets(meshalkin_4_2)


def test_lym_compositions_full(meshalkin_4_2: Family) -> None:
    three = Family.of_compositions(
        3, 3, [c for c in all_compositions(3, 3) if c.shape == (1, 1, 1)]
    )
    single = Family.of_compositions(3, 1, [WeakComposition.of([0, 1, 2])])

    assert lym_compositions_full(meshalkin_4_2).sum == 1
    assert lym_compositions_full(three).sum == 1
    assert lym_compositions_full(single).sum == 1


def test_lym_compositions_full_rejects_partial() -> None:
    family = Family.of_compositions(3, 2, [WeakComposition.of([0], [1])])

    with pytest.raises(NotFullCompositionError):
        lym_compositions_full(family)


def test_lym_compositions_partial() -> None:
    swapped = Family.of_compositions(
        2, 2, [WeakComposition.of([0], [1]), WeakComposition.of([1], [0])]
    )

    assert lym_compositions_partial(swapped).sum == 1
    assert lym_compositions_partial(construct_eg_pairs(4, 2)).sum == 2
    assert lym_compositions_partial(Family.of_compositions(4, 3, [])).sum == 0


def test_lym_compositions_partial_uses_item_totals() -> None:
    family = Family.of_compositions(10, 2, [WeakComposition.of([0], [1])])

    assert lym_compositions_partial(family).sum == Fraction(1, 2)
    assert lym_compositions_partial(family).n_effective == 2


def test_lym_pairs() -> None:
    report = lym_pairs(construct_eg_pairs(4, 1))

    assert report.theorem == "pairs"
    assert report.sum == 1
    assert report.per_shape == {(2, 2): 6}


def test_lym_pairs_rejects_three_parts() -> None:
    with pytest.raises(ParameterError):
        lym_pairs(Family.of_compositions(3, 3, []))


def test_lym_report_to_dict(meshalkin_4_2: Family) -> None:
    output = lym_compositions_full(meshalkin_4_2).to_dict()

    assert output["per_shape"] == {"2,2": 6}
    assert output["satisfied"] is True
    assert output["sum"] == Fraction(1)


@pytest.mark.parametrize(
    "n,p,r,expected", [(4, 2, 1, [1]), (6, 2, 1, [2]), (6, 3, 2, [1, 2]), (5, 2, 4, [0, 1, 2, 3])]
)
def test_notr_layers(n: int, p: int, r: int, expected: List[int]) -> None:
    assert notr_layers(n, p, r) == expected


@pytest.mark.parametrize("n,p,r", [(2, 2, 1), (4, 1, 1), (4, 2, 0), (4, 2, 5)])
def test_notr_layers_rejects_small_parameters(n: int, p: int, r: int) -> None:
    with pytest.raises(ParameterError):
        notr_layers(n, p, r)


@pytest.mark.parametrize("n,expected", [(4, Fraction(3, 2)), (6, Fraction(10, 3))])
def test_lym_example_notr_values(n: int, expected: Fraction) -> None:
    assert lym_example_notr(n, 2, 1) == expected


def test_lym_example_notr_grows() -> None:
    values = [lym_example_notr(n, 2, 1) for n in range(4, 31)]

    assert all(a < b for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("n,p,r", [(4, 2, 1), (6, 2, 1), (6, 3, 2), (7, 3, 1), (7, 4, 3)])
def test_lym_example_notr_matches_items(n: int, p: int, r: int) -> None:
    family = construct_notr(n, p, r)

    assert lym_compositions_partial(family).sum == lym_example_notr(n, p, r)


def test_hkr_check_examples() -> None:
    result = hkr_check(HkrInstance.of([3, 2, 1], [Fraction(1, 2), Fraction(1, 2), 1], 2))

    assert result.lhs == Fraction(7, 2)
    assert result.rhs == 5
    assert result.holds
    assert hkr_check(HkrInstance.of([3, 2, 1], [1, 1, 0], 2)).lhs == 5
    assert hkr_check(HkrInstance.of([3, 2, 1], [0, 0, 0], 2)).lhs == 0


@pytest.mark.parametrize(
    "M,q,R",
    [
        ([1, 2], [0, 0], 1),
        ([2, 1], [0, 2], 1),
        ([2, 1], [0, Fraction(-1, 2)], 1),
        ([2, 1], [0], 1),
        ([2, 1], [0, 0], 0),
        ([2, 1], [0, 0], 3),
        ([1, -1], [0, 0], 1),
        ([], [], 1),
    ],
)
def test_hkr_instance_rejects_malformed(M: List, q: List, R: int) -> None:
    with pytest.raises(MalformedInstanceError):
        HkrInstance.of(M, q, R)


@settings(max_examples=1000)
@given(hkr_instances())
def test_hkr_check_holds_on_random_instances(instance: HkrInstance) -> None:
    assert instance.premise_holds
    assert hkr_check(instance).holds


def test_hkr_equality_examples() -> None:
    tied = hkr_equality(HkrInstance.of([3, 2, 2, 1], [1, Fraction(1, 2), Fraction(1, 2), 0], 2))
    strict = hkr_equality(HkrInstance.of([3, 2, 1], [Fraction(1, 2), 1, 0], 2))
    indicator = hkr_equality(HkrInstance.of([5, 4, 3], [1, 1, 0], 2))

    assert tied.equality and tied.characterization
    assert (tied.r_prime, tied.r_double_prime) == (1, 3)
    assert not strict.equality and not strict.characterization
    assert "q_1" in strict.reason
    assert indicator.equality and indicator.consistent


def test_hkr_equality_rejects_zero_pivot() -> None:
    with pytest.raises(ParameterError):
        hkr_equality(HkrInstance.of([1, 0], [1, 0], 2))


def test_hkr_equality_rejects_fractions_above_budget() -> None:
    instance = HkrInstance.of([2, 1], [1, 1], 1)

    assert not instance.premise_holds
    with pytest.raises(MalformedInstanceError):
        hkr_equality(instance)


@settings(max_examples=1000)
@given(st.one_of(boundary_hkr_instances(), hkr_instances(zero_weights=False)))
def test_hkr_equality_agrees_with_direct_test(instance: HkrInstance) -> None:
    result = hkr_equality(instance)

    assert result.consistent, result.reason


@pytest.mark.parametrize(
    "n,p,R,scope,expected",
    [
        (3, 2, 4, SCOPE_AT_MOST, 9),
        (4, 2, 2, SCOPE_EXACT, 10),
        (4, 3, 100, SCOPE_EXACT, 81),
        (3, 2, 100, SCOPE_AT_MOST, 15),
    ],
)
def test_cardinality_bound_from_lym(n: int, p: int, R: int, scope: str, expected: int) -> None:
    assert cardinality_bound_from_lym(n, p, R, scope) == expected


def test_cardinality_bound_rejects_zero_budget() -> None:
    with pytest.raises(ParameterError):
        cardinality_bound_from_lym(4, 2, 0)


@pytest.mark.parametrize(
    "theorem,n,p,r,expected",
    [
        ("sperner", 4, 2, 1, 6),
        ("gst", 5, 2, 1, 10),
        ("erdos", 4, 2, 2, 10),
        ("meshalkin", 4, 3, 1, 12),
        ("m-g", 4, 2, 1, 6),
        ("unifying", 3, 2, 2, 9),
        ("e-m", 4, 3, 2, 42),
        ("e-g", 4, 2, 1, 6),
        ("rfamily", 4, 2, 1, 12),
    ],
)
def test_theorem_bound(theorem: str, n: int, p: int, r: int, expected: int) -> None:
    assert theorem_bound(theorem, n, p, r) == expected


def test_theorem_bound_rejects_unknown_theorem() -> None:
    with pytest.raises(ParameterError):
        theorem_bound("dilworth", 4)
    with pytest.raises(ParameterError):
        theorem_lym_bound("rfamily", 2, 1)


def test_theorem_lym_bound() -> None:
    assert theorem_lym_bound("unifying", 3, 2) == 8
    assert theorem_lym_bound("e-m", 3, 2) == 4
    assert theorem_lym_bound("erdos", 2, 3) == 3


def test_chain_free_families_satisfy_lym() -> None:
    for sets in _powerset(all_subsets(3)):
        family = Family(GroundSet(3), "subsets", tuple(sets))
        for r in (1, 2):
            if is_r_chain_free(sets, r).holds:
                assert lym_subsets(family).sum <= r


@pytest.mark.parametrize("n,p", [(3, 2), (2, 3)])
def test_meshalkin_families_satisfy_lym(n: int, p: int) -> None:
    for items in _powerset(all_compositions(n, p)):
        family = Family.of_compositions(n, p, items)
        if meshalkin_condition(family).holds:
            assert lym_compositions_full(family).sum <= 1


def test_unifying_families_satisfy_lym_exhaustively() -> None:
    universe = all_partial_compositions(2, 2)
    for items in _powerset(universe):
        family = Family.of_compositions(2, 2, items)
        for r in (1, 2):
            if unifying_condition(family, r).holds:
                assert lym_compositions_partial(family).sum <= r**2


@pytest.mark.parametrize("n,p", [(3, 2), (2, 3), (3, 3), (4, 2)])
@pytest.mark.parametrize("r", [1, 2])
@settings(max_examples=100)
@given(data=st.data())
def test_unifying_families_satisfy_lym(n: int, p: int, r: int, data: st.DataObject) -> None:
    universe = all_partial_compositions(n, p)
    family = data.draw(valid_families(universe, n, p, satisfying(unifying_condition, r), 5))

    assert lym_compositions_partial(family).sum <= r**p


@pytest.mark.parametrize("r", [1, 2])
@settings(max_examples=200)
@given(data=st.data())
def test_eg_families_satisfy_lym(r: int, data: st.DataObject) -> None:
    holds = satisfying(eg_condition, r)
    family = data.draw(valid_families(all_pairs(3), 3, 2, holds, 6, kind="pairs"))

    assert lym_pairs(family).sum <= r
