# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Exact LYM sums, the rearrangement lemma and the cardinality bounds it yields."""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Sequence, Tuple, Union

from coeffs import (
    binomial,
    largest_multinomial,
    multinomial,
    shape_count,
    sum_of_largest,
)
from constants import SCOPE_AT_MOST, SCOPE_EXACT
from model import (
    Family,
    MalformedInstanceError,
    NotFullCompositionError,
    ParameterError,
    Shape,
    family_order,
    shape_of,
)

logger = logging.getLogger(__name__)

Rational = Union[int, Fraction]


@dataclass(frozen=True)
class LymReport:
    """An exact LYM sum with the bound it is tested against."""

    theorem: str
    sum: Fraction
    bound: Fraction
    per_shape: Dict[Shape, int]
    n_effective: int = 0

    @property
    def satisfied(self) -> bool:
        return self.sum <= self.bound

    def to_dict(self) -> Dict:
        return {
            "theorem": self.theorem,
            "sum": self.sum,
            "bound": self.bound,
            "satisfied": self.satisfied,
            "n_effective": self.n_effective,
            "per_shape": {",".join(map(str, s)): c for s, c in sorted(self.per_shape.items())},
        }


def _report(theorem: str, family: Family, bound: Rational, coefficient) -> LymReport:
    per_shape = Counter(shape_of(item) for item in family.items)
    total = Fraction(0)
    for shape, count in per_shape.items():
        total += Fraction(count, coefficient(shape))
    n_effective = family_order(family) if family.is_compositions else family.n
    report = LymReport(theorem, total, Fraction(bound), dict(per_shape), n_effective)
    logger.debug(f"LYM sum for {theorem}: {report.sum} against {report.bound}")
    return report


def lym_subsets(family: Family, bound: Rational = 1) -> LymReport:
    """Return the sum of 1/binom(n, |A|) over the family."""
    if family.is_compositions:
        raise ParameterError("lym_subsets needs a subset family")
    return _report("subsets", family, bound, lambda shape: binomial(family.n, shape[0]))


def lym_compositions_full(family: Family, bound: Rational = 1) -> LymReport:
    """Return the sum of 1/multinomial(n; shape) over full compositions."""
    if not family.is_compositions:
        raise ParameterError("lym_compositions_full needs a composition family")
    for j, item in enumerate(family.items, start=1):
        if not item.is_full(family.n):
            raise NotFullCompositionError(
                f"Item {j} {item.as_lists()} does not cover the ground set of size {family.n}"
            )
    return _report("compositions-full", family, bound, multinomial)


def lym_compositions_partial(family: Family, bound: Rational = 1) -> LymReport:
    """Return the sum of 1/multinomial(shape) over weak partial compositions.

    The top of each multinomial is the item's own total, not n.
    """
    if not family.is_compositions:
        raise ParameterError("lym_compositions_partial needs a composition family")
    return _report("compositions-partial", family, bound, multinomial)


def lym_pairs(family: Family, bound: Rational = 1) -> LymReport:
    """Return the sum of 1/binom(|A|+|B|, |A|) over disjoint pairs."""
    if not family.is_compositions or family.p != 2:
        raise ParameterError("lym_pairs needs a family of compositions with p = 2")
    report = lym_compositions_partial(family, bound)
    return LymReport("pairs", report.sum, report.bound, report.per_shape, report.n_effective)


def notr_layers(n: int, p: int, r: int) -> List[int]:
    """Return the r consecutive layer sizes used by the unbounded example.

    Layers are sizes of subsets of an (n-p+1)-set, centred as well as possible.
    """
    if not (n > p >= 2 and r >= 1):
        raise ParameterError(f"Need n > p >= 2 and r >= 1, got n={n}, p={p}, r={r}")
    width = n - p + 1
    start = -((r - width) // 2)
    if start < 0 or start + r - 1 > width:
        raise ParameterError(f"Cannot fit {r} layers in subsets of a {width}-set")
    return list(range(start, start + r))


def lym_example_notr(n: int, p: int, r: int) -> Fraction:
    """Return the closed-form LYM sum of the unbounded example family."""
    width = n - p + 1
    total = Fraction(0)
    for j in notr_layers(n, p, r):
        # j!/(j+p-1)! as one fraction
        falling = 1
        for factor in range(j + 1, j + p):
            falling *= factor
        total += Fraction(binomial(width, j), falling)
    return total


@dataclass(frozen=True)
class HkrInstance:
    """Weights M_1 >= ... >= M_N, fractions q_k in [0, 1] and a budget R."""

    M: Tuple[Fraction, ...]
    q: Tuple[Fraction, ...]
    R: int

    def __post_init__(self) -> None:
        if len(self.M) != len(self.q):
            raise MalformedInstanceError("M and q must have the same length")
        if not self.M:
            raise MalformedInstanceError("An instance needs N >= 1")
        if not 1 <= self.R <= len(self.M):
            raise MalformedInstanceError(f"R={self.R} outside 1..{len(self.M)}")
        for value in self.M:
            if value < 0:
                raise MalformedInstanceError(f"Negative weight {value}")
        for left, right in zip(self.M, self.M[1:]):
            if left < right:
                raise MalformedInstanceError("M must be weakly decreasing")
        for value in self.q:
            if not 0 <= value <= 1:
                raise MalformedInstanceError(f"q value {value} outside [0, 1]")

    @classmethod
    def of(cls, M: Sequence[Rational], q: Sequence[Rational], R: int) -> "HkrInstance":
        return cls(tuple(Fraction(x) for x in M), tuple(Fraction(x) for x in q), R)

    @property
    def N(self) -> int:
        return len(self.M)

    @property
    def premise_holds(self) -> bool:
        return sum(self.q) <= self.R


@dataclass(frozen=True)
class HkrResult:
    lhs: Fraction
    rhs: Fraction
    holds: bool


def hkr_check(instance: HkrInstance) -> HkrResult:
    """Compare sum q_k M_k with M_1 + ... + M_R."""
    lhs = sum((q * m for q, m in zip(instance.q, instance.M)), Fraction(0))
    rhs = sum(instance.M[: instance.R], Fraction(0))
    return HkrResult(lhs, rhs, lhs <= rhs)


@dataclass(frozen=True)
class HkrEquality:
    """Whether equality holds, and whether the sharpness characterization is met."""

    equality: bool
    characterization: bool
    r_prime: int
    r_double_prime: int
    reason: str

    @property
    def consistent(self) -> bool:
        return self.equality == self.characterization


def hkr_equality(instance: HkrInstance) -> HkrEquality:
    """Decide equality in the rearrangement lemma and diagnose it.

    R' counts the weights above M_R and R'' the weights at least M_R. Equality
    needs q_k = 1 above M_R, q_k = 0 below it and the middle block to sum to
    R - R'.

    Raises:
        MalformedInstanceError: if the fractions sum to more than R.
        ParameterError: if M_R is not positive.
    """
    if not instance.premise_holds:
        raise MalformedInstanceError(
            f"The fractions sum to {sum(instance.q)}, more than R={instance.R}"
        )
    pivot = instance.M[instance.R - 1]
    if pivot <= 0:
        raise ParameterError("Equality is characterized only when M_R > 0")
    result = hkr_check(instance)
    r_prime = sum(1 for m in instance.M if m > pivot)
    r_double_prime = sum(1 for m in instance.M if m >= pivot)

    reason = "met"
    for k, (m, q) in enumerate(zip(instance.M, instance.q), start=1):
        if m > pivot and q != 1:
            reason = f"q_{k} = {q} below 1 with M_{k} > M_R"
            break
        if m < pivot and q != 0:
            reason = f"q_{k} = {q} above 0 with M_{k} < M_R"
            break
    else:
        middle = sum(instance.q[r_prime:r_double_prime], Fraction(0))
        if middle != instance.R - r_prime:
            reason = f"middle block sums to {middle}, expected {instance.R - r_prime}"

    return HkrEquality(
        equality=result.lhs == result.rhs,
        characterization=reason == "met",
        r_prime=r_prime,
        r_double_prime=r_double_prime,
        reason=reason,
    )


def cardinality_bound_from_lym(n: int, p: int, R: int, scope: str = SCOPE_EXACT) -> int:
    """Return the sum of the min(N, R) largest coefficients in scope."""
    if R < 1:
        raise ParameterError(f"R must be at least 1, got {R}")
    return sum_of_largest(n, p, min(shape_count(n, p, scope), R), scope)


def theorem_lym_bound(theorem: str, p: int, r: int) -> int:
    """Return the bound on the LYM sum for a theorem."""
    bounds = {
        "sperner": 1,
        "erdos": r,
        "meshalkin": 1,
        "gst": 1,
        "unifying": r**p,
        "e-m": r ** (p - 1),
        "e-g": r,
        "m-g": 1,
    }
    if theorem not in bounds:
        raise ParameterError(f"No LYM inequality for theorem {theorem}")
    return bounds[theorem]


def theorem_bound(theorem: str, n: int, p: int = 2, r: int = 1) -> int:
    """Return the largest family size a theorem allows."""
    if n < 0 or p < 1 or r < 1:
        raise ParameterError(f"Need n >= 0, p >= 1 and r >= 1, got n={n}, p={p}, r={r}")
    if theorem in ("sperner", "gst"):
        return binomial(n, n // 2)
    if theorem == "erdos":
        return cardinality_bound_from_lym(n, 2, r)
    if theorem in ("meshalkin", "m-g"):
        return largest_multinomial(n, p)[1]
    if theorem == "unifying":
        return cardinality_bound_from_lym(n, p, r**p, SCOPE_AT_MOST)
    if theorem == "e-m":
        return cardinality_bound_from_lym(n, p, r ** (p - 1))
    if theorem == "e-g":
        return cardinality_bound_from_lym(n, 2, r, SCOPE_AT_MOST)
    if theorem == "rfamily":
        return cardinality_bound_from_lym(n, p + 1, r**p)
    raise ParameterError(f"Unknown theorem {theorem}")
