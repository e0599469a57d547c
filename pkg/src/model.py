# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Ground sets, subsets, weak compositions and families.

Subsets of the ground set {0..n-1} are plain ints used as bitmasks, element i
being bit i. Families are immutable once built.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import jsonschema

from constants import FAMILY_KINDS, FAMILY_SCHEMA_PATH, MAX_GROUND_SET

logger = logging.getLogger(__name__)

Subset = int
Shape = Tuple[int, ...]


class SpernerError(Exception):
    """Base class for every error raised by this package."""


class FamilyValidationError(SpernerError):
    """Raised when a family document or item is invalid."""


class ParameterError(SpernerError):
    """Raised when an operation receives parameters outside its domain."""


class MalformedInstanceError(SpernerError):
    """Raised when an inequality instance is not well formed."""


class NotFullCompositionError(SpernerError):
    """Raised when a full-composition operation receives a partial composition."""


class NonHereditaryConstraintError(SpernerError):
    """Raised when a search constraint is found not to be hereditary."""


def popcount(mask: Subset) -> int:
    """Return the number of elements of a subset."""
    return bin(mask).count("1")


def subset_of(elements: Iterable[int]) -> Subset:
    """Build a subset from its elements."""
    mask = 0
    for element in elements:
        if element < 0:
            raise FamilyValidationError(f"Negative element {element}")
        mask |= 1 << element
    return mask


def elements_of(mask: Subset) -> List[int]:
    """Return the elements of a subset in ascending order."""
    elements = []
    index = 0
    while mask:
        if mask & 1:
            elements.append(index)
        mask >>= 1
        index += 1
    return elements


def is_subset(a: Subset, b: Subset) -> bool:
    """Return True if a is contained in b."""
    return a & ~b == 0


def complement(mask: Subset, n: int) -> Subset:
    """Return the complement of a subset in {0..n-1}."""
    return ((1 << n) - 1) & ~mask


@dataclass(frozen=True)
class GroundSet:
    """The ground set {0..n-1}."""

    n: int

    def __post_init__(self) -> None:
        if not 0 <= self.n <= MAX_GROUND_SET:
            raise ParameterError(f"Ground set size {self.n} outside 0..{MAX_GROUND_SET}")

    @property
    def full(self) -> Subset:
        return (1 << self.n) - 1

    def contains(self, mask: Subset) -> bool:
        return mask >= 0 and is_subset(mask, self.full)


@dataclass(frozen=True)
class WeakComposition:
    """An ordered tuple of pairwise disjoint, possibly empty, subsets."""

    parts: Tuple[Subset, ...]

    def __post_init__(self) -> None:
        if len(self.parts) < 1:
            raise FamilyValidationError("A weak composition needs at least one part")
        seen = 0
        for part in self.parts:
            if part < 0:
                raise FamilyValidationError(f"Invalid part {part}")
            if seen & part:
                raise FamilyValidationError(
                    f"Overlapping parts in composition {self.as_lists()}"
                )
            seen |= part

    @classmethod
    def of(cls, *parts: Iterable[int]) -> "WeakComposition":
        """Build a composition from element lists, one per part."""
        return cls(tuple(subset_of(part) for part in parts))

    @property
    def p(self) -> int:
        return len(self.parts)

    @property
    def support(self) -> Subset:
        mask = 0
        for part in self.parts:
            mask |= part
        return mask

    @property
    def total(self) -> int:
        return popcount(self.support)

    @property
    def shape(self) -> Shape:
        return tuple(popcount(part) for part in self.parts)

    def part(self, k: int) -> Subset:
        """Return the k-th part, k counted from 1."""
        if not 1 <= k <= self.p:
            raise ParameterError(f"Coordinate {k} outside 1..{self.p}")
        return self.parts[k - 1]

    def is_full(self, n: int) -> bool:
        return self.support == (1 << n) - 1

    def as_lists(self) -> List[List[int]]:
        return [elements_of(part) for part in self.parts]


def shape_of(item: "Item") -> Shape:
    """Return the shape of a family item; a subset has the one-part shape (|A|,)."""
    if isinstance(item, WeakComposition):
        return item.shape
    return (popcount(item),)


Item = Union[Subset, WeakComposition]


@dataclass(frozen=True)
class Family:
    """A set of distinct items of one kind over a common ground set.

    Subset families have p set to None. Composition and pair families carry the
    common number of parts, so that an empty family still knows its p.
    """

    ground: GroundSet
    kind: str
    items: Tuple[Item, ...]
    p: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in FAMILY_KINDS:
            raise FamilyValidationError(f"Unknown family kind {self.kind}")
        if self.kind == "subsets":
            self._validate_subsets()
        else:
            self._validate_compositions()
        if len(set(self.items)) != len(self.items):
            raise FamilyValidationError("Family contains a duplicate item")

    def _validate_subsets(self) -> None:
        if self.p is not None:
            raise FamilyValidationError("A subset family has no number of parts")
        for item in self.items:
            if isinstance(item, WeakComposition) or not self.ground.contains(item):
                raise FamilyValidationError(f"Item {item} is not a subset of the ground set")

    def _validate_compositions(self) -> None:
        if self.p is None or self.p < 1:
            raise FamilyValidationError("A composition family needs p >= 1")
        if self.kind == "pairs" and self.p != 2:
            raise FamilyValidationError("A pair family needs p = 2")
        for item in self.items:
            if not isinstance(item, WeakComposition):
                raise FamilyValidationError(f"Item {item} is not a weak composition")
            if item.p != self.p:
                raise FamilyValidationError(
                    f"Composition {item.as_lists()} has {item.p} parts, expected {self.p}"
                )
            if not self.ground.contains(item.support):
                raise FamilyValidationError(
                    f"Composition {item.as_lists()} uses elements outside 0..{self.ground.n - 1}"
                )

    @classmethod
    def of_subsets(cls, n: int, sets: Iterable[Iterable[int]]) -> "Family":
        """Build a subset family from element lists."""
        return cls(GroundSet(n), "subsets", tuple(subset_of(s) for s in sets))

    @classmethod
    def of_compositions(
        cls,
        n: int,
        p: int,
        compositions: Iterable[WeakComposition],
        kind: str = "compositions",
    ) -> "Family":
        """Build a composition family from composition objects."""
        return cls(GroundSet(n), kind, tuple(compositions), p)

    @property
    def n(self) -> int:
        return self.ground.n

    @property
    def m(self) -> int:
        return len(self.items)

    @property
    def is_compositions(self) -> bool:
        return self.kind != "subsets"

    def all_full(self) -> bool:
        """Return True if every composition covers the ground set."""
        return all(item.is_full(self.n) for item in self.items)

    def restrict(self, indices: Sequence[int]) -> "Family":
        """Return the subfamily made of the items at the given 0-based indices."""
        return Family(self.ground, self.kind, tuple(self.items[i] for i in indices), self.p)

    def __iter__(self) -> Iterator[Item]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)


def coordinate_slice(family: Family, k: int) -> Tuple[List[Subset], List[Subset]]:
    """Return the k-th parts of a composition family.

    The first list follows item order and keeps repetitions, the second holds
    the distinct parts in order of first occurrence.
    """
    if not family.is_compositions:
        raise ParameterError("Slices are defined for composition families only")
    if not 1 <= k <= family.p:
        raise ParameterError(f"Coordinate {k} outside 1..{family.p}")
    column = [item.parts[k - 1] for item in family.items]
    distinct = list(dict.fromkeys(column))
    return column, distinct


def item_key(item: Item) -> Tuple:
    """Return a total order key on items of one kind."""
    if isinstance(item, WeakComposition):
        return tuple(tuple(elements_of(part)) for part in item.parts)
    return (popcount(item), tuple(elements_of(item)))


def canonical_order(family: Family) -> Family:
    """Return the same family with its items in canonical order."""
    items = tuple(sorted(family.items, key=item_key))
    return Family(family.ground, family.kind, items, family.p)


def complement_pairs(n: int, sets: Iterable[Subset]) -> Family:
    """Turn subsets A into the pairs (A, complement of A)."""
    ground = GroundSet(n)
    items = tuple(WeakComposition((a, complement(a, n))) for a in sets)
    return Family(ground, "pairs", items, 2)


def family_order(family: Family) -> int:
    """Return the largest item total of a composition family.

    Items may leave elements unused, so this can be smaller than n.
    """
    if not family.is_compositions:
        raise ParameterError("The order is defined for composition families only")
    return max((item.total for item in family.items), default=0)


def gst_pairs_from_chains(n: int, chains: Sequence[Sequence[Subset]]) -> Tuple[Family, int]:
    """Turn chains A_0 <= ... <= A_q into the disjoint pairs (A_0, complement of A_q).

    All chains must have q+1 members. The pairs live on the same ground set but
    only n-q of its elements matter for the bound, which is returned alongside.
    """
    lengths = {len(chain) for chain in chains}
    if len(lengths) > 1:
        raise FamilyValidationError(f"Chains have different lengths {sorted(lengths)}")
    q = lengths.pop() - 1 if lengths else 0
    if q < 0:
        raise FamilyValidationError("A chain needs at least one member")
    items = []
    for chain in chains:
        for lower, upper in zip(chain, chain[1:]):
            if not is_subset(lower, upper):
                raise FamilyValidationError(
                    f"{elements_of(lower)} is not contained in {elements_of(upper)}"
                )
        items.append(WeakComposition((chain[0], complement(chain[-1], n))))
    return Family(GroundSet(n), "pairs", tuple(items), 2), n - q


def _load_schema() -> Dict:
    with open(FAMILY_SCHEMA_PATH) as file:
        return json.load(file)


def parse_family(document: Union[str, Dict]) -> Family:
    """Parse a family from its JSON document.

    The document holds n and either "sets" or "compositions" plus "p". The
    optional "kind" tags a composition family as "pairs".
    For example:
        {"n": 3, "sets": [[0], [1, 2]]}
        {"n": 3, "p": 2, "compositions": [[[0], [1, 2]], [[1], []]]}
    """
    if isinstance(document, str):
        try:
            document = json.loads(document)
        except json.JSONDecodeError as e:
            raise FamilyValidationError(f"Family document is not valid JSON: {e}") from e

    try:
        jsonschema.validate(instance=document, schema=_load_schema())
    except jsonschema.ValidationError as e:
        raise FamilyValidationError(f"Invalid family document: {e.message}") from e

    n = document["n"]
    ground = GroundSet(n)

    def _mask(elements: List[int]) -> Subset:
        for element in elements:
            if element >= n:
                raise FamilyValidationError(f"Element {element} outside 0..{n - 1}")
        return subset_of(elements)

    if "sets" in document:
        kind = document.get("kind", "subsets")
        if kind != "subsets":
            raise FamilyValidationError(f"Kind {kind} does not match a list of sets")
        family = Family(ground, "subsets", tuple(_mask(s) for s in document["sets"]))
    else:
        p = document["p"]
        kind = document.get("kind", "compositions")
        if kind == "subsets":
            raise FamilyValidationError("Kind subsets does not match a list of compositions")
        items = []
        for raw in document["compositions"]:
            if len(raw) != p:
                raise FamilyValidationError(f"Composition {raw} has {len(raw)} parts, expected {p}")
            items.append(WeakComposition(tuple(_mask(part) for part in raw)))
        family = Family(ground, kind, tuple(items), p)

    logger.debug(f"Parsed {family.kind} family with n={n} and m={family.m}")
    return family


def load_family(path: Union[str, Path]) -> Family:
    """Read and parse a family file."""
    with open(path) as file:
        return parse_family(file.read())


def serialize_family(family: Family) -> Dict:
    """Return the JSON document of a family."""
    if not family.is_compositions:
        return {"n": family.n, "sets": [elements_of(item) for item in family.items]}
    document = {
        "n": family.n,
        "p": family.p,
        "compositions": [item.as_lists() for item in family.items],
    }
    if family.kind == "pairs":
        document["kind"] = "pairs"
    return document
