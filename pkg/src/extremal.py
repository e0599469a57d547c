# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Extremal constructions and an exact maximum family search."""

import itertools
import logging
import math
import random
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from coeffs import balanced_shape, binomial, descending_order, multinomial
from constants import (
    BUDGET_CHECK_INTERVAL,
    HEREDITARY_SPOT_CHECKS,
    MAX_SEARCH_UNIVERSE,
    MAX_SYMMETRY_N,
    PROOF_BELOW_CUTOFF,
    PROOF_BUDGET_EXCEEDED,
    PROOF_EXHAUSTED,
    SEARCH_CONSTRAINTS,
    SEARCH_UNIVERSES,
)
from hyp import (
    HypothesisVerdict,
    eg_condition,
    is_antichain,
    is_bad_pair,
    is_r_chain_free,
    meshalkin_condition,
    mutually_intersecting,
    rfamily_condition,
    unifying_condition,
)
from lym import notr_layers
from model import (
    Family,
    GroundSet,
    Item,
    NonHereditaryConstraintError,
    ParameterError,
    Shape,
    SpernerError,
    Subset,
    WeakComposition,
    canonical_order,
    complement_pairs,
    is_subset,
    item_key,
    popcount,
    shape_of,
    subset_of,
)

logger = logging.getLogger(__name__)


def all_subsets(n: int) -> List[Subset]:
    """Return every subset of {0..n-1}."""
    GroundSet(n)
    return list(range(1 << n))


def _compositions_from_labels(n: int, p: int, labels_range: int) -> List[WeakComposition]:
    items = []
    for labels in itertools.product(range(labels_range), repeat=n):
        parts = [0] * labels_range
        for element, label in enumerate(labels):
            parts[label] |= 1 << element
        items.append(WeakComposition(tuple(parts[:p])))
    return items


def all_compositions(n: int, p: int) -> List[WeakComposition]:
    """Return every weak composition of {0..n-1} into p parts."""
    if p < 1:
        raise ParameterError(f"p must be at least 1, got {p}")
    GroundSet(n)
    return _compositions_from_labels(n, p, p)


def all_partial_compositions(n: int, p: int) -> List[WeakComposition]:
    """Return every weak partial composition of {0..n-1} into p parts."""
    if p < 1:
        raise ParameterError(f"p must be at least 1, got {p}")
    GroundSet(n)
    # label p marks an unused element
    return _compositions_from_labels(n, p, p + 1)


def all_pairs(n: int, cap: Optional[int] = None) -> List[WeakComposition]:
    """Return every pair of disjoint subsets, optionally with |A|+|B| <= cap."""
    pairs = all_partial_compositions(n, 2)
    if cap is None:
        return pairs
    return [pair for pair in pairs if pair.total <= cap]


def _layer(n: int, size: int) -> List[Subset]:
    return [subset_of(c) for c in itertools.combinations(range(n), size)]


def middle_layer_sizes(n: int, r: int) -> List[int]:
    """Return the r consecutive sizes with the largest binomial sum.

    Among windows with equal sums the one starting lower wins.
    """
    if not 1 <= r <= n + 1:
        raise ParameterError(f"Need 1 <= r <= n+1, got n={n} and r={r}")
    best_start, best_sum = 0, -1
    for start in range(n + 2 - r):
        window = sum(binomial(n, size) for size in range(start, start + r))
        if window > best_sum:
            best_start, best_sum = start, window
    return list(range(best_start, best_start + r))


def construct_middle_layers(n: int, r: int) -> Family:
    """Return the union of the r largest consecutive layers of subsets of {0..n-1}."""
    sets = [s for size in middle_layer_sizes(n, r) for s in _layer(n, size)]
    family = Family(GroundSet(n), "subsets", tuple(sets))
    logger.info(f"Built middle layers for n={n}, r={r} with {family.m} sets")
    return family


def compositions_of_shape(n: int, shape: Shape) -> List[WeakComposition]:
    """Return every full composition of {0..n-1} with the given shape."""
    if sum(shape) != n:
        raise ParameterError(f"Shape {tuple(shape)} does not sum to {n}")

    def _fill(remaining: Tuple[int, ...], sizes: Shape) -> List[Tuple[Subset, ...]]:
        if not sizes:
            return [()]
        result = []
        for chosen in itertools.combinations(remaining, sizes[0]):
            rest = tuple(e for e in remaining if e not in chosen)
            for tail in _fill(rest, sizes[1:]):
                result.append((subset_of(chosen),) + tail)
        return result

    return [WeakComposition(parts) for parts in _fill(tuple(range(n)), tuple(shape))]


def construct_meshalkin(n: int, p: int) -> Family:
    """Return all full compositions of the most balanced shape."""
    if p < 1:
        raise ParameterError(f"p must be at least 1, got {p}")
    items = compositions_of_shape(n, balanced_shape(n, p))
    family = Family(GroundSet(n), "compositions", tuple(items), p)
    logger.info(f"Built Meshalkin family for n={n}, p={p} with {family.m} compositions")
    return family


def construct_eg_pairs(n: int, r: int) -> Family:
    """Return the pairs (A, complement of A) for A in the r middle layers."""
    return complement_pairs(n, construct_middle_layers(n, r).items)


def construct_notr(n: int, p: int, r: int) -> Family:
    """Return the partial compositions whose LYM sums grow without bound in n.

    The first part runs over r central layers of {0..n-p}; the other parts are
    the singletons {n-1}, {n-2}, ..., {n-p+1}.
    """
    width = n - p + 1
    tail = tuple(1 << (n - 1 - i) for i in range(p - 1))
    items = [
        WeakComposition((first,) + tail)
        for size in notr_layers(n, p, r)
        for first in _layer(width, size)
    ]
    family = Family(GroundSet(n), "compositions", tuple(items), p)
    logger.info(f"Built unbounded example for n={n}, p={p}, r={r} with {family.m} items")
    return family


@dataclass(frozen=True)
class SharpStructureReport:
    """Occupancy of every shape against the structure an extremal family needs."""

    r: int
    rank: int
    upper_value: int
    lower_value: int
    occupancy: Dict[Shape, str]
    violations: Tuple[str, ...]

    @property
    def met(self) -> bool:
        return not self.violations

    def to_dict(self) -> Dict:
        return {
            "r": self.r,
            "rank": self.rank,
            "m_rank": self.lower_value,
            "m_rank_plus_one": self.upper_value,
            "occupancy": {",".join(map(str, s)): v for s, v in sorted(self.occupancy.items())},
            "violations": list(self.violations),
            "met": self.met,
        }


def verify_sharp_structure(family: Family, r: int) -> SharpStructureReport:
    """Check the shape structure an extremal family must have.

    With R = r^(p-1), every shape whose coefficient exceeds M_(R+1) must be fully
    present and no shape whose coefficient is below M_R may be present.
    """
    if not family.is_compositions:
        raise ParameterError("Sharp structure is defined for composition families only")
    if r < 1:
        raise ParameterError(f"r must be at least 1, got {r}")
    n, p = family.n, family.p
    if not family.all_full():
        raise ParameterError("Sharp structure needs full compositions")
    order = descending_order(n, p)
    rank = r ** (p - 1)
    lower, upper = order.value_at(rank), order.value_at(rank + 1)

    counts: Dict[Shape, int] = {}
    for item in family.items:
        counts[shape_of(item)] = counts.get(shape_of(item), 0) + 1

    occupancy: Dict[Shape, str] = {}
    violations = []
    for entry in order.entries:
        count = counts.get(entry.shape, 0)
        state = "all" if count == entry.value else "some" if count else "none"
        occupancy[entry.shape] = state
        if entry.value > upper and state != "all":
            violations.append(f"shape {entry.shape} with {entry.value} > {upper} is not full")
        if entry.value < lower and count:
            violations.append(f"shape {entry.shape} with {entry.value} < {lower} is present")
    return SharpStructureReport(r, rank, upper, lower, occupancy, tuple(violations))


@dataclass(frozen=True)
class SearchProblem:
    """A universe of items, a hereditary constraint and search options.

    Constraints: "antichain" and "chain-free" on subsets; "meshalkin",
    "rfamily" (every slice r-chain-free), "e-m" (leading p-1 slices) and
    "unifying" on full or partial compositions; "eg" on disjoint pairs.
    """

    n: int
    universe: str = "subsets"
    constraint: str = "antichain"
    r: int = 1
    p: int = 2
    cap: Optional[int] = None
    symmetry: bool = False
    budget_ms: Optional[int] = None
    lym_pruning: bool = True
    cutoff: Optional[int] = None
    seed: int = 0

    def __post_init__(self) -> None:
        if self.universe not in SEARCH_UNIVERSES:
            raise ParameterError(f"Unknown universe {self.universe}")
        if self.constraint not in SEARCH_CONSTRAINTS:
            raise ParameterError(f"Unknown constraint {self.constraint}")
        allowed = {
            "antichain": ("subsets",),
            "chain-free": ("subsets",),
            "meshalkin": ("compositions", "partial"),
            "rfamily": ("compositions", "partial"),
            "e-m": ("compositions", "partial"),
            "unifying": ("compositions", "partial"),
            "eg": ("pairs",),
        }[self.constraint]
        if self.universe not in allowed:
            raise ParameterError(
                f"Constraint {self.constraint} needs universe {' or '.join(allowed)}"
            )
        if self.r < 1 or self.p < 1:
            raise ParameterError(f"Need r >= 1 and p >= 1, got r={self.r}, p={self.p}")
        if self.universe == "pairs" and self.p != 2:
            raise ParameterError("The pairs universe has p = 2")
        if self.constraint == "e-m" and self.p < 2:
            raise ParameterError("The leading-slices constraint needs p >= 2")
        if self.symmetry and self.n > MAX_SYMMETRY_N:
            raise ParameterError(f"Symmetry reduction needs n <= {MAX_SYMMETRY_N}")
        GroundSet(self.n)


@dataclass(frozen=True)
class SearchResult:
    """The largest valid family found and how far its optimality is proven.

    With proof "exhausted" the optimum is exact. With "budget-exceeded" it is
    the best size found, a lower bound. With "below-cutoff" the search stopped
    early, so there is no optimum: the witness size is only a lower bound and
    the cutoff minus one an upper bound.
    """

    optimum: Optional[int]
    witness: Family
    proof: str
    nodes: int
    cutoff: Optional[int] = None

    @property
    def exhausted(self) -> bool:
        return self.proof != PROOF_BUDGET_EXCEEDED

    @property
    def lower_bound(self) -> int:
        return self.witness.m

    @property
    def upper_bound(self) -> Optional[int]:
        if self.proof == PROOF_BELOW_CUTOFF:
            return self.cutoff - 1
        if self.proof == PROOF_EXHAUSTED:
            return self.optimum
        return None


@dataclass
class _ConstraintModel:
    # One bad-pair relation per coordinate; a family is valid when no
    # coordinate has r+1 pairwise bad items.
    relations: List[Callable[[Item, Item], bool]]
    limit: int
    slice_parts: List[int] = field(default_factory=list)
    lym_budget: Optional[int] = None


def _comparable_parts(k: int) -> Callable[[Item, Item], bool]:
    def _bad(a: WeakComposition, b: WeakComposition) -> bool:
        x, y = a.parts[k], b.parts[k]
        return x != y and (is_subset(x, y) or is_subset(y, x))

    return _bad


def _comparable_sets(a: Subset, b: Subset) -> bool:
    return a != b and (is_subset(a, b) or is_subset(b, a))


def _constraint_model(problem: SearchProblem) -> _ConstraintModel:
    r, p, full = problem.r, problem.p, problem.universe == "compositions"
    constraint = problem.constraint
    if constraint in ("antichain", "chain-free"):
        limit = 1 if constraint == "antichain" else r
        return _ConstraintModel([_comparable_sets], limit, [], limit)
    if constraint == "eg":
        return _ConstraintModel([lambda a, b: not mutually_intersecting(a, b)], r, [], r)
    if constraint in ("meshalkin", "rfamily", "e-m"):
        limit = 1 if constraint == "meshalkin" else r
        coordinates = list(range(p - 1 if constraint == "e-m" else p))
        budget = limit ** (p - 1) if full else None
        return _ConstraintModel(
            [_comparable_parts(k) for k in coordinates], limit, coordinates, budget
        )
    # unifying: on full compositions the bad pairs are the comparable distinct parts
    relations = [lambda a, b, k=k: is_bad_pair(a, b, k + 1) for k in range(p)]
    if full:
        return _ConstraintModel(relations, r, list(range(p)), r ** (p - 1))
    return _ConstraintModel(relations, r, [], r**p)


def constraint_verdict(problem: SearchProblem, family: Family) -> HypothesisVerdict:
    """Evaluate the problem's constraint on a family with the hypothesis predicates."""
    constraint, r = problem.constraint, problem.r
    if constraint == "antichain":
        return is_antichain(family.items)
    if constraint == "chain-free":
        return is_r_chain_free(family.items, r)
    if constraint == "meshalkin":
        return meshalkin_condition(family, require_full=False)
    if constraint == "rfamily":
        return rfamily_condition(family, r)
    if constraint == "e-m":
        return rfamily_condition(family, r, coordinates=range(1, problem.p))
    if constraint == "unifying":
        return unifying_condition(family, r)
    return eg_condition(family, r)


def build_universe(problem: SearchProblem) -> List[Item]:
    """Return the items a search problem chooses from."""
    if problem.universe == "subsets":
        items = all_subsets(problem.n)
    elif problem.universe == "compositions":
        items = all_compositions(problem.n, problem.p)
    elif problem.universe == "partial":
        items = all_partial_compositions(problem.n, problem.p)
    else:
        items = all_pairs(problem.n, problem.cap)
    if problem.cap is not None and problem.universe != "pairs":
        items = [item for item in items if sum(shape_of(item)) <= problem.cap]
    if len(items) > MAX_SEARCH_UNIVERSE:
        raise ParameterError(
            f"Universe of {len(items)} items exceeds the limit of {MAX_SEARCH_UNIVERSE}"
        )
    return items


def _item_value(problem: SearchProblem, item: Item) -> int:
    if problem.universe == "subsets":
        return binomial(problem.n, popcount(item))
    return multinomial(shape_of(item))


def _relabel(item: Item, permutation: Sequence[int]) -> Item:
    def _map(mask: Subset) -> Subset:
        image = 0
        for element in range(len(permutation)):
            if mask >> element & 1:
                image |= 1 << permutation[element]
        return image

    if isinstance(item, WeakComposition):
        return WeakComposition(tuple(_map(part) for part in item.parts))
    return _map(item)


def _lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


class _BudgetExhausted(Exception):
    pass


class FamilySearch:
    """Exact branch and bound over families of a finite universe.

    Items are indexed by decreasing coefficient, so a set of candidates read in
    index order lists the smallest LYM weights first. Families and candidate
    sets are bitmasks over item indices.
    """

    def __init__(self, problem: SearchProblem):
        self.problem = problem
        self.model = _constraint_model(problem)
        universe = build_universe(problem)
        values = {item: _item_value(problem, item) for item in universe}

        raw_adjacency = self._adjacency(universe)
        degree = {
            item: len(universe) - 1 - popcount(self._union(raw_adjacency, i))
            for i, item in enumerate(universe)
        }
        self.items: List[Item] = sorted(
            universe, key=lambda item: (-values[item], -degree[item], item_key(item))
        )
        self.index = {item: i for i, item in enumerate(self.items)}
        self.adjacency = self._adjacency(self.items)
        self.all_items = (1 << len(self.items)) - 1

        self.weights: Optional[List[int]] = None
        self.budget = 0
        if problem.lym_pruning and self.model.lym_budget is not None:
            scale = 1
            for value in set(values.values()):
                scale = scale * value // math.gcd(scale, value)
            self.weights = [scale // values[item] for item in self.items]
            self.budget = self.model.lym_budget * scale

        self.same_part = [self._same_part_masks(k) for k in self.model.slice_parts]

        self.nodes = 0
        self.best_size = -1
        self.best_family = 0
        self.deadline = None
        if problem.budget_ms is not None:
            self.deadline = time.monotonic() + problem.budget_ms / 1000

    def _adjacency(self, items: Sequence[Item]) -> List[List[int]]:
        adjacency = []
        for relation in self.model.relations:
            rows = [0] * len(items)
            for i in range(len(items)):
                for j in range(i + 1, len(items)):
                    if relation(items[i], items[j]):
                        rows[i] |= 1 << j
                        rows[j] |= 1 << i
            adjacency.append(rows)
        return adjacency

    @staticmethod
    def _union(adjacency: List[List[int]], i: int) -> int:
        mask = 0
        for rows in adjacency:
            mask |= rows[i]
        return mask

    def _same_part_masks(self, k: int) -> List[int]:
        groups: Dict[Subset, int] = {}
        for i, item in enumerate(self.items):
            groups[item.parts[k]] = groups.get(item.parts[k], 0) | 1 << i
        return [groups[item.parts[k]] for item in self.items]

    def _tick(self) -> None:
        self.nodes += 1
        if self.deadline is not None and self.nodes % BUDGET_CHECK_INTERVAL == 0:
            if time.monotonic() > self.deadline:
                raise _BudgetExhausted()

    def _threshold(self) -> int:
        return max(self.best_size + 1, self.problem.cutoff or 0)

    def _bound(self, candidates: int, used: int) -> int:
        if self.weights is None:
            return popcount(candidates)
        room = self.budget - used
        count = 0
        while candidates:
            i = _lowest(candidates)
            room -= self.weights[i]
            if room < 0:
                break
            count += 1
            candidates &= candidates - 1
        return count

    def _weight(self, mask: int) -> int:
        if self.weights is None:
            return 0
        total = 0
        while mask:
            total += self.weights[_lowest(mask)]
            mask &= mask - 1
        return total

    def _has_clique(self, mask: int, size: int, rows: List[int]) -> bool:
        if size == 0:
            return True
        if popcount(mask) < size:
            return False
        while mask:
            v = _lowest(mask)
            mask &= mask - 1
            if self._has_clique(mask & rows[v], size - 1, rows):
                return True
        return False

    def _include(self, i: int, family: int, covered: Tuple[int, ...]) -> Tuple[int, Tuple[int, ...]]:
        """Return the items added with item i and the new slice coverage."""
        if not self.same_part:
            return 1 << i, covered
        covered = tuple(c | masks[i] for c, masks in zip(covered, self.same_part))
        closure = self.all_items
        for c in covered:
            closure &= c
        # items whose parts all occur in the slices keep the family valid
        return (closure | 1 << i) & ~family, covered

    def _filter(self, candidates: int, family: int, added: int) -> int:
        remaining = candidates
        scan = candidates
        while scan:
            j = _lowest(scan)
            scan &= scan - 1
            for rows in self.adjacency:
                if not rows[j] & added:
                    continue
                if self.model.limit == 1 or self._has_clique(
                    rows[j] & family, self.model.limit, rows
                ):
                    remaining &= ~(1 << j)
                    break
        return remaining

    def _expand(self, family: int, candidates: int, size: int, used: int, covered) -> None:
        self._tick()
        if size > self.best_size:
            self.best_size, self.best_family = size, family
            logger.debug(f"New best family of size {size} after {self.nodes} nodes")
        while candidates:
            if size + self._bound(candidates, used) < self._threshold():
                return
            i = _lowest(candidates)
            candidates &= candidates - 1
            added, new_covered = self._include(i, family, covered)
            grown = family | added
            self._expand(
                grown,
                self._filter(candidates & ~added, grown, added),
                size + popcount(added),
                used + self._weight(added),
                new_covered,
            )

    def _orbits(self) -> List[int]:
        """Return orbit masks of the items under relabelling of the ground set."""
        orbit_of = list(range(len(self.items)))
        for permutation in itertools.permutations(range(self.problem.n)):
            for i, item in enumerate(self.items):
                image = self.index[_relabel(item, permutation)]
                orbit_of[i] = min(orbit_of[i], image)
        masks: Dict[int, int] = {}
        for i, representative in enumerate(orbit_of):
            masks[representative] = masks.get(representative, 0) | 1 << i
        return [masks[key] for key in sorted(masks)]

    def _search(self) -> None:
        empty = tuple(0 for _ in self.same_part)
        if not self.problem.symmetry:
            self._expand(0, self.all_items, 0, 0, empty)
            return
        # Any valid family containing an item of a processed orbit maps onto
        # one containing that orbit's representative.
        self._expand(0, 0, 0, 0, empty)
        excluded = 0
        for orbit in self._orbits():
            representative = _lowest(orbit)
            pool = self.all_items & ~excluded
            if self._bound(pool, 0) < self._threshold():
                break
            added, covered = self._include(representative, 0, empty)
            self._expand(
                added,
                self._filter(pool & ~added, added, added),
                popcount(added),
                self._weight(added),
                covered,
            )
            excluded |= orbit

    def _witness(self) -> Family:
        chosen = [self.items[i] for i in range(len(self.items)) if self.best_family >> i & 1]
        problem = self.problem
        if problem.universe == "subsets":
            family = Family(GroundSet(problem.n), "subsets", tuple(chosen))
        elif problem.universe == "pairs":
            family = Family(GroundSet(problem.n), "pairs", tuple(chosen), 2)
        else:
            family = Family(GroundSet(problem.n), "compositions", tuple(chosen), problem.p)
        return canonical_order(family)

    def _check_hereditary(self, witness: Family) -> None:
        verdict = constraint_verdict(self.problem, witness)
        if not verdict:
            raise SpernerError(f"Search witness fails its constraint: {verdict.witness}")
        if witness.m == 0:
            return
        rng = random.Random(self.problem.seed)
        for _ in range(HEREDITARY_SPOT_CHECKS):
            size = rng.randrange(witness.m)
            indices = sorted(rng.sample(range(witness.m), size))
            verdict = constraint_verdict(self.problem, witness.restrict(indices))
            if not verdict:
                raise NonHereditaryConstraintError(
                    f"Constraint {self.problem.constraint} fails on a subfamily of a valid "
                    f"family: {verdict.witness}"
                )

    def run(self) -> SearchResult:
        """Run the search and return the best family with its proof status."""
        problem = self.problem
        logger.info(
            f"Searching {problem.constraint} families over {len(self.items)} {problem.universe}"
            f" items, n={problem.n}, p={problem.p}, r={problem.r}"
        )
        proof = PROOF_EXHAUSTED
        try:
            self._search()
        except _BudgetExhausted:
            proof = PROOF_BUDGET_EXCEEDED
            logger.warning(
                f"Search budget of {problem.budget_ms} ms exceeded after {self.nodes} nodes, "
                f"best size {self.best_size} is a lower bound"
            )
        if proof == PROOF_EXHAUSTED and problem.cutoff is not None:
            if self.best_size < problem.cutoff:
                proof = PROOF_BELOW_CUTOFF

        witness = self._witness()
        self._check_hereditary(witness)
        logger.info(f"Search finished with {witness.m} items ({proof}) after {self.nodes} nodes")
        optimum = None if proof == PROOF_BELOW_CUTOFF else witness.m
        return SearchResult(optimum, witness, proof, self.nodes, problem.cutoff)


def max_family_search(problem: SearchProblem) -> SearchResult:
    """Find the largest family of the universe that satisfies the constraint.

    The result is exact when its proof is "exhausted". With a cutoff, a proof of
    "below-cutoff" certifies that no valid family reaches the cutoff.
    """
    return FamilySearch(problem).run()
