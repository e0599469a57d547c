# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Maximal chains of the Boolean lattice, seen as permutations of the ground set."""

import itertools
import logging
import math
import random
from dataclasses import dataclass
from typing import Dict, Iterable, Optional, Tuple

from coeffs import binomial
from constants import DEFAULT_CHAIN_SAMPLES, MAX_ALL_CHAINS_N
from model import Family, ParameterError, Shape, WeakComposition, elements_of

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MaximalChain:
    """The chain of prefixes of a permutation of {0..n-1}."""

    order: Tuple[int, ...]

    def __post_init__(self) -> None:
        if sorted(self.order) != list(range(len(self.order))):
            raise ParameterError(f"{self.order} is not a permutation of 0..{len(self.order) - 1}")

    @property
    def n(self) -> int:
        return len(self.order)

    @property
    def positions(self) -> Dict[int, int]:
        return {element: position for position, element in enumerate(self.order)}


def separates(chain: MaximalChain, composition: WeakComposition) -> bool:
    """Return True if the chain separates the composition.

    Every element of a nonempty part must come before every element of the
    next nonempty part. Empty parts impose nothing.
    """
    if composition.support >> chain.n:
        raise ParameterError("Composition does not fit the chain's ground set")
    positions = chain.positions
    previous_max = -1
    for part in composition.parts:
        if not part:
            continue
        places = [positions[element] for element in elements_of(part)]
        if min(places) < previous_max:
            return False
        previous_max = max(places)
    return True


def count_separating(n: int, shape: Shape) -> int:
    """Return how many maximal chains of an n-set separate a composition of this shape."""
    total = sum(shape)
    if any(size < 0 for size in shape) or total > n:
        raise ParameterError(f"Shape {tuple(shape)} does not fit a ground set of size {n}")
    count = binomial(n, total) * math.factorial(n - total)
    for size in shape:
        count *= math.factorial(size)
    return count


def count_separating_brute(n: int, composition: WeakComposition) -> int:
    """Count separating chains by walking every permutation."""
    return sum(
        1
        for order in itertools.permutations(range(n))
        if separates(MaximalChain(order), composition)
    )


@dataclass(frozen=True)
class SeparationResult:
    """The largest number of items one inspected chain separates."""

    maximum: int
    witness: Optional[MaximalChain]
    inspected: int
    mode: str
    seed: Optional[int] = None

    def to_dict(self) -> Dict:
        return {
            "maximum": self.maximum,
            "witness": list(self.witness.order) if self.witness else None,
            "inspected": self.inspected,
            "mode": self.mode,
            "seed": self.seed,
        }


def _sampled_orders(n: int, samples: int, seed: int) -> Iterable[Tuple[int, ...]]:
    rng = random.Random(seed)
    for _ in range(samples):
        order = list(range(n))
        rng.shuffle(order)
        yield tuple(order)


def max_separated(
    family: Family,
    mode: str = "all",
    samples: int = DEFAULT_CHAIN_SAMPLES,
    seed: int = 0,
) -> SeparationResult:
    """Return the most items of the family separated by a single chain.

    Mode "all" walks every permutation and needs n <= 8. Mode "sampled" draws
    the given number of chains from random.Random(seed). Among chains reaching
    the maximum the lexicographically smallest is reported.
    """
    if not family.is_compositions:
        raise ParameterError("Separation is defined for composition families only")
    n = family.n
    if mode == "all":
        if n > MAX_ALL_CHAINS_N:
            raise ParameterError(
                f"All-chains mode needs n <= {MAX_ALL_CHAINS_N}, got n={n}; use sampled mode"
            )
        orders = itertools.permutations(range(n))
        used_seed = None
    elif mode == "sampled":
        if samples < 1:
            raise ParameterError(f"Need at least one sample, got {samples}")
        orders = _sampled_orders(n, samples, seed)
        used_seed = seed
    else:
        raise ParameterError(f"Unknown chain mode {mode}")

    best = -1
    witness = None
    inspected = 0
    for order in orders:
        inspected += 1
        chain = MaximalChain(order)
        count = sum(1 for item in family.items if separates(chain, item))
        if count > best or (count == best and order < witness.order):
            best, witness = count, chain

    logger.info(f"Inspected {inspected} chains in {mode} mode, maximum separated is {best}")
    return SeparationResult(max(best, 0), witness, inspected, mode, used_seed)
