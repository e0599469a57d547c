# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""Hypothesis predicates for the Sperner-type theorems.

Every predicate returns a HypothesisVerdict. A failing verdict always carries
a witness that can be replayed against the definition: a comparable pair, a
chain, an offending item or an (r+1)-set of item indices whose pairs are all
bad. Item indices in witnesses count from 1, elements count from 0.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import networkx as nx

from model import (
    Family,
    ParameterError,
    Subset,
    WeakComposition,
    coordinate_slice,
    elements_of,
    is_subset,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HypothesisVerdict:
    """The outcome of a hypothesis check."""

    holds: bool
    witness: Optional[Dict] = field(default=None)

    def __post_init__(self) -> None:
        if not self.holds and self.witness is None:
            raise ValueError("A failing verdict needs a witness")

    def __bool__(self) -> bool:
        return self.holds

    def to_dict(self) -> Dict:
        return {"holds": self.holds, "witness": self.witness}


HOLDS = HypothesisVerdict(True)


def _distinct(sets: Sequence[Subset]) -> List[Subset]:
    return list(dict.fromkeys(sets))


def is_antichain(sets: Sequence[Subset]) -> HypothesisVerdict:
    """Check that no set of the list is contained in another one."""
    distinct = _distinct(sets)
    for i, a in enumerate(distinct):
        for b in distinct[i + 1 :]:
            if is_subset(a, b) or is_subset(b, a):
                lower, upper = (a, b) if is_subset(a, b) else (b, a)
                return HypothesisVerdict(
                    False,
                    {
                        "kind": "comparable",
                        "subset": elements_of(lower),
                        "superset": elements_of(upper),
                    },
                )
    return HOLDS


def inclusion_dag(sets: Sequence[Subset]) -> nx.DiGraph:
    """Return the strict inclusion order on the distinct sets as a DAG."""
    distinct = _distinct(sets)
    dag = nx.DiGraph()
    dag.add_nodes_from(distinct)
    for a in distinct:
        for b in distinct:
            if a != b and is_subset(a, b):
                dag.add_edge(a, b)
    return dag


def longest_chain(sets: Sequence[Subset]) -> List[Subset]:
    """Return a longest chain of the distinct sets, smallest set first."""
    dag = inclusion_dag(sets)
    if dag.number_of_nodes() == 0:
        return []
    return nx.dag_longest_path(dag)


def mirsky_partition(sets: Sequence[Subset]) -> List[List[Subset]]:
    """Split the distinct sets into antichains by height."""
    dag = inclusion_dag(sets)
    return [sorted(generation) for generation in nx.topological_generations(dag)]


def mirsky_height(sets: Sequence[Subset]) -> int:
    """Return the number of antichains in the height partition.

    It equals the number of members of a longest chain.
    """
    return len(mirsky_partition(sets))


def is_r_chain_free(sets: Sequence[Subset], r: int) -> HypothesisVerdict:
    """Check that no chain of the distinct sets has more than r members."""
    if r < 1:
        raise ParameterError(f"r must be at least 1, got {r}")
    chain = longest_chain(sets)
    if len(chain) <= r:
        return HOLDS
    return HypothesisVerdict(
        False, {"kind": "chain", "chain": [elements_of(s) for s in chain[: r + 1]]}
    )


def crossing(c1: WeakComposition, c2: WeakComposition, k: int) -> bool:
    """Return True if the k-th parts of the two compositions cross.

    Part k of each composition has to meet the union of the other parts of
    the other composition.
    """
    if c1.p != c2.p:
        raise ParameterError("Compositions have different numbers of parts")
    a1, a2 = c1.part(k), c2.part(k)
    rest1 = c1.support & ~a1
    rest2 = c2.support & ~a2
    return bool(a1 & rest2) and bool(a2 & rest1)


def is_bad_pair(c1: WeakComposition, c2: WeakComposition, k: int) -> bool:
    """Return True if the pair has different k-th parts that do not cross."""
    return c1.part(k) != c2.part(k) and not crossing(c1, c2, k)


def bad_pair_graph(family: Family, k: int) -> nx.Graph:
    """Return the graph on item indices joining the bad pairs at coordinate k."""
    if not family.is_compositions:
        raise ParameterError("Bad pair graphs are defined for composition families only")
    if not 1 <= k <= family.p:
        raise ParameterError(f"Coordinate {k} outside 1..{family.p}")
    return _pair_graph(family.items, lambda a, b: is_bad_pair(a, b, k))


def _pair_graph(items: Sequence, bad) -> nx.Graph:
    graph = nx.Graph()
    graph.add_nodes_from(range(len(items)))
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if bad(items[i], items[j]):
                graph.add_edge(i, j)
    return graph


def find_clique(graph: nx.Graph, size: int) -> Optional[List[int]]:
    """Return the lexicographically smallest clique with size nodes, if any.

    Nodes must be comparable. The search walks nodes in ascending order and
    stops at the first clique found.
    """
    if size <= 0:
        return []
    nodes = sorted(graph.nodes)
    neighbours = {v: set(graph.adj[v]) for v in nodes}

    def _extend(clique: List[int], candidates: List[int]) -> Optional[List[int]]:
        if len(clique) == size:
            return clique
        if len(clique) + len(candidates) < size:
            return None
        for index, v in enumerate(candidates):
            found = _extend(
                clique + [v], [u for u in candidates[index + 1 :] if u in neighbours[v]]
            )
            if found is not None:
                return found
        return None

    return _extend([], nodes)


def _clique_verdict(graphs: Dict[int, nx.Graph], r: int, kind: str) -> HypothesisVerdict:
    for k, graph in graphs.items():
        clique = find_clique(graph, r + 1)
        if clique is not None:
            witness = {"kind": kind, "items": [i + 1 for i in clique]}
            if k:
                witness["coordinate"] = k
            return HypothesisVerdict(False, witness)
    return HOLDS


def unifying_condition(family: Family, r: int) -> HypothesisVerdict:
    """Check the crossing condition on every coordinate.

    Among any r+1 items, some two have equal or crossing k-th parts, for
    every coordinate k.
    """
    if not family.is_compositions:
        raise ParameterError("The unifying condition needs a composition family")
    if r < 1:
        raise ParameterError(f"r must be at least 1, got {r}")
    if family.m <= r:
        return HOLDS
    graphs = {k: bad_pair_graph(family, k) for k in range(1, family.p + 1)}
    verdict = _clique_verdict(graphs, r, "bad-clique")
    if not verdict:
        logger.info(f"Unifying condition fails: {verdict.witness}")
    return verdict


def _check_pairs(family: Family) -> None:
    if not family.is_compositions or family.p != 2:
        raise ParameterError("Pair conditions need a family of compositions with p = 2")


def gst_condition(family: Family, size_cap: Optional[int] = None) -> HypothesisVerdict:
    """Check A_j and B_k meet for all j != k, with an optional cap on |A_j|+|B_j|."""
    _check_pairs(family)
    items = family.items
    if size_cap is not None:
        for j, item in enumerate(items, start=1):
            if item.total > size_cap:
                return HypothesisVerdict(
                    False, {"kind": "size-cap", "item": j, "size": item.total, "cap": size_cap}
                )
    for j, a in enumerate(items):
        for k, b in enumerate(items):
            if j != k and not a.parts[0] & b.parts[1]:
                return HypothesisVerdict(False, {"kind": "non-intersecting", "items": [j + 1, k + 1]})
    return HOLDS


def mutually_intersecting(a: WeakComposition, b: WeakComposition) -> bool:
    """Return True if A_a meets B_b and A_b meets B_a."""
    return bool(a.parts[0] & b.parts[1]) and bool(b.parts[0] & a.parts[1])


def eg_condition(family: Family, r: int) -> HypothesisVerdict:
    """Check that among any r+1 pairs some two are mutually intersecting."""
    _check_pairs(family)
    if r < 1:
        raise ParameterError(f"r must be at least 1, got {r}")
    if family.m <= r:
        return HOLDS
    graph = _pair_graph(family.items, lambda a, b: not mutually_intersecting(a, b))
    return _clique_verdict({0: graph}, r, "bad-clique")


def meshalkin_condition(family: Family, require_full: bool = True) -> HypothesisVerdict:
    """Check that every coordinate slice is an antichain."""
    if not family.is_compositions:
        raise ParameterError("The Meshalkin condition needs a composition family")
    if require_full:
        for j, item in enumerate(family.items, start=1):
            if not item.is_full(family.n):
                return HypothesisVerdict(False, {"kind": "not-full", "item": j})
    return rfamily_condition(family, 1)


def rfamily_condition(
    family: Family, r: int, coordinates: Optional[Sequence[int]] = None
) -> HypothesisVerdict:
    """Check that the chosen coordinate slices are r-chain-free.

    All coordinates are checked unless a list of 1-based coordinates is given.
    """
    if not family.is_compositions:
        raise ParameterError("Slice conditions need a composition family")
    if coordinates is None:
        coordinates = range(1, family.p + 1)
    for k in coordinates:
        _, distinct = coordinate_slice(family, k)
        verdict = is_r_chain_free(distinct, r)
        if not verdict:
            witness = dict(verdict.witness)
            witness["coordinate"] = k
            return HypothesisVerdict(False, witness)
    return HOLDS


def gst_chain_condition(chains: Sequence[Sequence[Subset]]) -> HypothesisVerdict:
    """Check that no member of one chain is contained in a member of another chain.

    Chains are listed smallest member first. For nested chains it is enough to
    compare the bottom of chain j with the top of chain k.
    """
    for j, chain in enumerate(chains, start=1):
        if not chain:
            return HypothesisVerdict(False, {"kind": "empty-chain", "item": j})
        for lower, upper in zip(chain, chain[1:]):
            if not is_subset(lower, upper):
                return HypothesisVerdict(False, {"kind": "not-nested", "item": j})
    for j, chain_j in enumerate(chains):
        for k, chain_k in enumerate(chains):
            if j != k and is_subset(chain_j[0], chain_k[-1]):
                return HypothesisVerdict(
                    False,
                    {
                        "kind": "contained",
                        "items": [j + 1, k + 1],
                        "subset": elements_of(chain_j[0]),
                        "superset": elements_of(chain_k[-1]),
                    },
                )
    return HOLDS
