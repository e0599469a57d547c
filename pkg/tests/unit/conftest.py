# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

import itertools
import json
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, Iterator, List, Sequence

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from extremal import _relabel, all_compositions, construct_meshalkin, construct_middle_layers
from hyp import HypothesisVerdict
from lym import HkrInstance
from model import Family, WeakComposition

# valid_families runs the condition checks while drawing.
settings.register_profile(
    "exact", derandomize=True, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("exact")

Holds = Callable[[Family], bool]


def satisfying(check: Callable[[Family, int], HypothesisVerdict], r: int) -> Holds:
    return lambda family: check(family, r).holds


def families(
    universe: Sequence[WeakComposition], n: int, p: int, max_m: int, kind: str = "compositions"
) -> st.SearchStrategy[Family]:
    """Families of at most max_m distinct items of universe."""
    return st.lists(st.sampled_from(universe), max_size=max_m, unique=True).map(
        lambda items: Family.of_compositions(n, p, items, kind)
    )


@st.composite
def valid_families(
    draw: st.DrawFn,
    universe: Sequence[WeakComposition],
    n: int,
    p: int,
    holds: Holds,
    max_m: int,
    kind: str = "compositions",
) -> Family:
    """Grow a family along a drawn order of universe, skipping items that break holds."""
    order = draw(st.permutations(universe))
    size = draw(st.integers(0, max_m))
    items: List[WeakComposition] = []
    for item in order:
        if len(items) == size:
            break
        if holds(Family.of_compositions(n, p, items + [item], kind)):
            items.append(item)
    return Family.of_compositions(n, p, items, kind)


def hereditary_families(
    universe: Sequence[WeakComposition], n: int, p: int, holds: Holds, max_m: int
) -> Iterator[Family]:
    """Yield every family of at most max_m items on which holds is true, up to relabelling.

    holds must be hereditary. Each family is reached with one of its items mapped to
    the smallest member of that item's orbit, so every class appears at least once.
    """
    permutations = list(itertools.permutations(range(n)))
    yield Family.of_compositions(n, p, [])
    for root in universe:
        if any(_relabel(root, permutation).parts < root.parts for permutation in permutations):
            continue
        others = [item for item in universe if item != root]
        yield from _grow(n, p, holds, [root], others, max_m)


def _grow(
    n: int,
    p: int,
    holds: Holds,
    items: List[WeakComposition],
    candidates: List[WeakComposition],
    max_m: int,
) -> Iterator[Family]:
    family = Family.of_compositions(n, p, items)
    if not holds(family):
        return
    yield family
    if len(items) == max_m:
        return
    extensions = [c for c in candidates if holds(Family.of_compositions(n, p, items + [c]))]
    for i, item in enumerate(extensions):
        yield from _grow(n, p, holds, items + [item], extensions[i + 1 :], max_m)


@st.composite
def hkr_instances(draw: st.DrawFn, zero_weights: bool = True) -> HkrInstance:
    """Draw an instance whose fractions sum to at most R."""
    size = draw(st.integers(1, 8))
    low = 0 if zero_weights else Fraction(1, 3)
    weights = st.fractions(min_value=low, max_value=6, max_denominator=3)
    M = sorted(draw(st.lists(weights, min_size=size, max_size=size)), reverse=True)
    R = draw(st.integers(1, size))
    fractions = st.fractions(min_value=0, max_value=1, max_denominator=4)
    q = draw(st.lists(fractions, min_size=size, max_size=size))
    total = sum(q)
    if total > R:
        q = [value * R / total for value in q]
    return HkrInstance.of(M, q, R)


@st.composite
def boundary_hkr_instances(draw: st.DrawFn) -> HkrInstance:
    """Draw an instance on the boundary of the equality case, with tied weights.

    Some of them are perturbed so that equality is lost.
    """
    size = draw(st.integers(1, 8))
    M = sorted(draw(st.lists(st.integers(1, 3), min_size=size, max_size=size)), reverse=True)
    R = draw(st.integers(1, size))
    pivot = M[R - 1]
    r_prime = sum(1 for m in M if m > pivot)
    r_double_prime = sum(1 for m in M if m >= pivot)
    middle = Fraction(R - r_prime, r_double_prime - r_prime)
    q = [Fraction(1) if m > pivot else middle if m == pivot else Fraction(0) for m in M]
    if r_double_prime - r_prime > 1 and draw(st.booleans()):
        # move mass inside the middle block, keeping its sum
        shift = min(middle, 1 - middle) * Fraction(draw(st.integers(0, 4)), 4)
        q[r_prime] += shift
        q[r_prime + 1] -= shift
    if draw(st.booleans()):
        k = draw(st.integers(0, size - 1))
        q[k] = q[k] * Fraction(draw(st.integers(0, 3)), 4)
    return HkrInstance.of(M, q, R)


@pytest.fixture()
def family_file(tmp_path: Path) -> Callable[[Dict], str]:
    def _write(document: Dict, name: str = "family.json") -> str:
        path = tmp_path / name
        path.write_text(json.dumps(document))
        return str(path)

    return _write


@pytest.fixture()
def meshalkin_4_2() -> Family:
    return construct_meshalkin(4, 2)


@pytest.fixture()
def middle_layers_4_2() -> Family:
    return construct_middle_layers(4, 2)


@pytest.fixture()
def full_compositions_3_2() -> List[WeakComposition]:
    return all_compositions(3, 2)


@pytest.fixture()
def bad_second_coordinate() -> Family:
    return Family.of_compositions(
        2, 2, [WeakComposition.of([], [0]), WeakComposition.of([], [1])]
    )
