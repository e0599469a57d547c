# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""First appearances of part sizes and the non-attainment criteria built on them."""

import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from coeffs import descending_order, sum_of_largest
from constants import SWEEP_LSTAR_PREFIX, SWEEP_R_RANGE
from model import ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FirstAppearance:
    """The first coefficient in descending order whose form contains a size."""

    size: int
    rank: int
    value: int


@dataclass(frozen=True)
class FirstAppearanceTable:
    """First appearances of every size 0..n, listed in order of appearance."""

    n: int
    p: int
    appearances: Tuple[FirstAppearance, ...]

    @property
    def nu(self) -> int:
        return self.n // self.p

    @property
    def rho(self) -> int:
        return self.n % self.p

    @property
    def L(self) -> Dict[int, FirstAppearance]:
        return {a.size: a for a in self.appearances}

    @property
    def lstar_values(self) -> Tuple[int, ...]:
        return tuple(a.value for a in self.appearances)

    def lstar(self, k: int) -> int:
        """Return L*_k counted from 1, zero past the end."""
        if k < 1:
            raise ParameterError(f"Index {k} must be at least 1")
        if k > len(self.appearances):
            return 0
        return self.appearances[k - 1].value

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "p": self.p,
            "nu": self.nu,
            "rho": self.rho,
            "first_appearances": {
                str(a.size): {"rank": a.rank, "value": a.value} for a in self.appearances
            },
            "lstar": list(self.lstar_values),
            "lstar_sizes": [a.size for a in self.appearances],
        }


def first_appearances(n: int, p: int) -> FirstAppearanceTable:
    """Scan the descending order and record where each size first occurs.

    Sizes that first occur in the same coefficient are listed in ascending order.
    """
    if p < 2 or n < 0:
        raise ParameterError(f"Need p >= 2 and n >= 0, got n={n} and p={p}")
    seen = set()
    appearances: List[FirstAppearance] = []
    for entry in descending_order(n, p).entries:
        for size in sorted(set(entry.shape) - seen):
            seen.add(size)
            appearances.append(FirstAppearance(size, entry.rank, entry.value))
        if len(seen) == n + 1:
            break
    return FirstAppearanceTable(n, p, tuple(appearances))


def _check_range(n: int, p: int, r: int) -> None:
    if r < 2 or p < 3 or n < p:
        raise ParameterError(f"Need r >= 2, p >= 3 and n >= p, got n={n}, p={p}, r={r}")


def criterion_thm_attain(n: int, p: int, r: int) -> bool:
    """Return True if L*_r exceeds M_(r^(p-1)+1), which rules out attainment."""
    _check_range(n, p, r)
    table = first_appearances(n, p)
    return table.lstar(r) > descending_order(n, p).value_at(r ** (p - 1) + 1)


def criterion_cor_attain(n: int, p: int, r: int) -> bool:
    """Return True if L*_r exceeds L*_(r+1), which rules out attainment."""
    _check_range(n, p, r)
    table = first_appearances(n, p)
    return table.lstar(r) > table.lstar(r + 1)


@dataclass(frozen=True)
class AttainLemmaCheck:
    sizes: Tuple[int, ...]
    count: int
    total: int
    largest_sum: int
    ok: bool


def attainlemma_check(n: int, p: int, r: int) -> AttainLemmaCheck:
    """Count and sum the coefficients whose sizes all come from the first r sizes.

    The check is ok when both stay below r^(p-1) and the sum of the r^(p-1)
    largest coefficients respectively.
    """
    if r < 2 or p < 3:
        raise ParameterError(f"Need r >= 2 and p >= 3, got p={p}, r={r}")
    table = first_appearances(n, p)
    if len(table.appearances) < r:
        raise ParameterError(f"Only {len(table.appearances)} sizes exist for n={n}, fewer than r={r}")
    sizes = tuple(a.size for a in table.appearances[:r])
    allowed = set(sizes)
    order = descending_order(n, p)
    matching = [e.value for e in order.entries if set(e.shape) <= allowed]
    largest = sum_of_largest(n, p, r ** (p - 1))
    count, total = len(matching), sum(matching)
    return AttainLemmaCheck(sizes, count, total, largest, count < r ** (p - 1) and total < largest)


@dataclass(frozen=True)
class SweepRow:
    """One (n, p, r) row of the attainability sweep."""

    n: int
    p: int
    r: int
    nu: int
    rho: int
    lstar: Tuple[int, ...]
    pattern: str
    predicted: str
    thm: bool
    cor: bool
    listed_exception: bool

    @property
    def pattern_matches(self) -> bool:
        return self.pattern == self.predicted

    @property
    def status(self) -> str:
        return "unattainable" if self.thm else "undecided"

    def to_csv_row(self) -> List:
        return [
            self.n,
            self.p,
            self.r,
            self.nu,
            self.rho,
            " ".join(map(str, self.lstar)),
            self.pattern,
            self.predicted,
            self.pattern_matches,
            self.thm,
            self.cor,
            self.status,
            self.listed_exception,
        ]


SWEEP_COLUMNS = [
    "n",
    "p",
    "r",
    "nu",
    "rho",
    "lstar",
    "pattern",
    "predicted",
    "pattern_matches",
    "thm",
    "cor",
    "status",
    "listed_exception",
]


def lstar_pattern(table: FirstAppearanceTable, length: int = SWEEP_LSTAR_PREFIX) -> str:
    """Return ">" or "=" for each consecutive pair among the first L* values."""
    values = table.lstar_values[:length]
    return "".join(">" if a > b else "=" for a, b in zip(values, values[1:]))


def predicted_pattern(n: int, p: int, length: int = SWEEP_LSTAR_PREFIX) -> str:
    """Return the L* pattern the structure of the descending order predicts."""
    nu, rho = divmod(n, p)
    if rho == 0:
        relations = list(">=>>>")
    else:
        relations = list("=>>>>")
        if rho == p - 1 and p >= 4 and nu == 1:
            relations[3] = "="
        if p == 3 and nu == 3 and rho == 1:
            relations[4] = "="
    return "".join(relations[: max(0, min(length, n + 1) - 1)])


def is_listed_exception(n: int, p: int, r: int) -> bool:
    """Return True for the cases where non-attainment is left open."""
    return (
        (r == 2 and n % p == 0 and p in (3, 4, 5))
        or (r == 4 and p >= 4 and n == 2 * p - 1)
        or (r == 5 and p == 3 and n == 10)
    )


def proposition_sweep(
    p_range: Iterable[int],
    n_range: Iterable[int],
    r_range: Optional[Iterable[int]] = None,
) -> List[SweepRow]:
    """Compute a sweep row for every (n, p, r) with n >= p."""
    r_values = list(r_range if r_range is not None else SWEEP_R_RANGE)
    n_values = list(n_range)
    rows = []
    for p in p_range:
        for n in n_values:
            if n < p:
                continue
            table = first_appearances(n, p)
            pattern = lstar_pattern(table)
            predicted = predicted_pattern(n, p)
            if pattern != predicted:
                logger.warning(f"L* pattern {pattern} differs from {predicted} at n={n}, p={p}")
            for r in r_values:
                rows.append(
                    SweepRow(
                        n=n,
                        p=p,
                        r=r,
                        nu=table.nu,
                        rho=table.rho,
                        lstar=table.lstar_values[:SWEEP_LSTAR_PREFIX],
                        pattern=pattern,
                        predicted=predicted,
                        thm=criterion_thm_attain(n, p, r),
                        cor=criterion_cor_attain(n, p, r),
                        listed_exception=is_listed_exception(n, p, r),
                    )
                )
    logger.info(f"Sweep produced {len(rows)} rows")
    return rows
