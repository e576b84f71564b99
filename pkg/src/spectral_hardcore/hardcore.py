"""Exact hardcore Gibbs distributions.

The hardcore model on a graph ``G`` with fugacity ``lam`` weights an
independent set ``I`` by ``lam ** |I|``.  Two exact oracles live here:
bit-mask enumeration for general graphs (``n <= 24``) and the two-state
dynamic program for forests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence

import numpy as np

from .distributions import (
    IN,
    NO_PIN,
    OUT,
    DistributionTable,
    EmptySupportError,
    Pinning,
    ZeroMassError,
    conditional_marginal,
    marginal,
)
from .graphs import Graph, RootedTree

DEFAULT_ENUM_CAP = 24


class EnumerationCapError(ValueError):
    """The requested instance is larger than the configured enumeration cap."""


class PinningError(ValueError):
    """A pinning is inconsistent with the hardcore constraint."""


class NotAForestError(ValueError):
    pass


@dataclass(frozen=True)
class HardcoreModel:
    graph: Graph
    lam: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise ValueError(f"fugacity must be positive, got {self.lam}")

    @property
    def n(self) -> int:
        return self.graph.n


def check_pinning(g: Graph, pin: Pinning) -> None:
    for v, _ in pin.items:
        if not 0 <= v < g.n:
            raise PinningError(f"pinned vertex {v} is not a vertex of the graph")
    ins = [v for v, s in pin.items if s]
    in_set = set(ins)
    for v in ins:
        for u in g.adjacency[v]:
            if u in in_set:
                raise PinningError(f"adjacent vertices {min(u, v)} and {max(u, v)} both pinned In")


def independent_set_masks(g: Graph, pin: Pinning = NO_PIN) -> np.ndarray:
    """All independent sets of ``g`` consistent with ``pin``, sorted bit masks."""
    nbr = g.neighbor_masks()
    side = pin.assignment
    masks = np.zeros(1, dtype=np.int64)
    for v in range(g.n):
        lower = int(nbr[v]) & ((1 << v) - 1)
        if side.get(v) is OUT:
            continue
        grown = masks[(masks & lower) == 0] | (1 << v)
        masks = grown if side.get(v) is IN else np.concatenate([masks, grown])
    return np.sort(masks)


def enumerate_distribution(
    m: HardcoreModel, pin: Pinning = NO_PIN, cap: int = DEFAULT_ENUM_CAP
) -> DistributionTable:
    """Table of independent sets consistent with ``pin``, mass ``lam ** |I|``.

    Pinning a vertex In removes its neighbors eagerly, so the resulting table
    never contains a contradiction.
    """
    if m.n > cap:
        raise EnumerationCapError(f"graph has {m.n} vertices, enumeration cap is {cap}")
    check_pinning(m.graph, pin)
    masks = independent_set_masks(m.graph, pin)
    if masks.size == 0:
        raise EmptySupportError(f"no independent set is consistent with {pin}")
    sizes = np.bitwise_count(masks.astype(np.uint64)).astype(float)
    weights = np.power(float(m.lam), sizes)
    return DistributionTable(
        m.n, masks, weights, float(weights.sum()), pin, fugacity=float(m.lam), graph=m.graph
    )


def partition_function(m: HardcoreModel, pin: Pinning = NO_PIN) -> float:
    return enumerate_distribution(m, pin).total


@dataclass(frozen=True)
class TreeDP:
    """Result of the forest dynamic program; unpacks as ``(Z, root_marginal)``."""

    Z: float
    root_marginal: float
    log_Z: float

    def __iter__(self) -> Iterator[float]:
        yield self.Z
        yield self.root_marginal


def tree_partition_dp(
    m: HardcoreModel,
    pin: Pinning = NO_PIN,
    root: int = 0,
    activities: Optional[Sequence[float]] = None,
) -> TreeDP:
    """Exact ``Z`` and ``Pr[root in I]`` on a forest via the two-state recursion.

    ``activities`` optionally overrides the fugacity vertex by vertex (used for
    finite trees with an external field on the leaves).  Messages are
    renormalized at every vertex and the scale is tracked in log space.
    """
    g = m.graph
    if not g.is_forest():
        raise NotAForestError("tree_partition_dp needs a forest")
    check_pinning(g, pin)
    lam = np.full(g.n, float(m.lam)) if activities is None else np.asarray(activities, float)
    side = pin.assignment
    # BFS orientation of every component, starting with the requested root
    parent = [-1] * g.n
    order: List[int] = []
    seen = [False] * g.n
    for start in [root] + list(range(g.n)):
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        for x in comp:
            for y in g.adjacency[x]:
                if not seen[y]:
                    seen[y] = True
                    parent[y] = x
                    comp.append(y)
        order.extend(comp)
    z_out = np.ones(g.n)
    z_in = lam.copy()
    log_scale = 0.0
    for v in reversed(order):
        if side.get(v) is IN:
            z_out[v] = 0.0
        elif side.get(v) is OUT:
            z_in[v] = 0.0
        s = z_out[v] + z_in[v]
        if s <= 0:
            raise ZeroMassError(f"pinning {pin} has zero mass")
        z_out[v] /= s
        z_in[v] /= s
        log_scale += math.log(s)
        p = parent[v]
        if p >= 0:
            z_out[p] *= z_out[v] + z_in[v]
            z_in[p] *= z_out[v]
    roots = [v for v in order if parent[v] < 0]
    log_z = log_scale + sum(math.log(z_out[r] + z_in[r]) for r in roots)
    rm = z_in[root] / (z_out[root] + z_in[root])
    z = math.exp(log_z) if log_z < 700 else math.inf
    return TreeDP(z, float(rm), log_z)


def ratio_R(m: HardcoreModel, pin: Pinning, r: int) -> float:
    """Exact odds ``Pr[r | pin] / (1 - Pr[r | pin])``; ``math.inf`` when r is forced In."""
    t = enumerate_distribution(m, pin)
    p = marginal(t, r)
    if p >= 1.0:
        return math.inf
    return p / (1.0 - p)


__all__ = [
    "DEFAULT_ENUM_CAP",
    "EmptySupportError",
    "EnumerationCapError",
    "HardcoreModel",
    "IN",
    "NO_PIN",
    "NotAForestError",
    "OUT",
    "Pinning",
    "PinningError",
    "TreeDP",
    "ZeroMassError",
    "check_pinning",
    "conditional_marginal",
    "enumerate_distribution",
    "independent_set_masks",
    "marginal",
    "partition_function",
    "ratio_R",
    "tree_partition_dp",
]
