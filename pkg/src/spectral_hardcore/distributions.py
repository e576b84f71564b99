"""Explicit probability tables over subsets of a ground set ``[n]``.

A :class:`DistributionTable` stores the support of an (unnormalized) measure
as sorted bit masks with matching weights.  Every conditional distribution
used elsewhere in the package (influences, link walks, Glauber kernels) is
obtained by filtering rows of one table.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

IN = True
OUT = False


class EmptySupportError(ValueError):
    """No subset in the support is consistent with the requested conditioning."""


class ZeroMassError(ValueError):
    """A conditioning event has probability zero."""


@dataclass(frozen=True)
class Pinning:
    """Partial assignment ``element -> In (True) / Out (False)``."""

    items: Tuple[Tuple[int, bool], ...] = ()

    def __post_init__(self) -> None:
        seen = set()
        for v, _ in self.items:
            if v in seen:
                raise ValueError(f"element {v} pinned twice")
            seen.add(v)
        object.__setattr__(self, "items", tuple(sorted((int(v), bool(s)) for v, s in self.items)))

    @classmethod
    def of(cls, ins: Iterable[int] = (), outs: Iterable[int] = ()) -> "Pinning":
        return cls(tuple((v, IN) for v in ins) + tuple((v, OUT) for v in outs))

    @classmethod
    def from_masks(cls, in_mask: int, out_mask: int) -> "Pinning":
        ins = [i for i in range(max(in_mask.bit_length(), 1)) if in_mask >> i & 1]
        outs = [i for i in range(max(out_mask.bit_length(), 1)) if out_mask >> i & 1]
        return cls.of(ins, outs)

    @property
    def assignment(self) -> Dict[int, bool]:
        return dict(self.items)

    @property
    def in_mask(self) -> int:
        m = 0
        for v, s in self.items:
            if s:
                m |= 1 << v
        return m

    @property
    def out_mask(self) -> int:
        m = 0
        for v, s in self.items:
            if not s:
                m |= 1 << v
        return m

    @property
    def pinned(self) -> List[int]:
        return [v for v, _ in self.items]

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, v: int) -> bool:
        return any(u == v for u, _ in self.items)

    def extend(self, v: int, side: bool) -> "Pinning":
        return Pinning(self.items + ((v, side),))

    def sort_key(self) -> Tuple[Tuple[int, str], ...]:
        """Lexicographic key: sorted ``(element, 'in'|'out')`` pairs."""
        return tuple((v, "in" if s else "out") for v, s in self.items)

    def to_json(self) -> Dict[str, List[int]]:
        return {"in": [v for v, s in self.items if s], "out": [v for v, s in self.items if not s]}

    def __str__(self) -> str:
        if not self.items:
            return "{}"
        return "{" + ", ".join(f"{v}={'In' if s else 'Out'}" for v, s in self.items) + "}"


NO_PIN = Pinning()


@dataclass(frozen=True)
class DistributionTable:
    """Measure on ``2^[n]`` restricted to its support.

    ``masks`` is sorted ascending; ``weights`` are the unnormalized masses and
    ``total`` their sum.  ``pin`` records the conditioning that produced the
    table (elements outside the support of a pinning never appear).
    """

    ground: int
    masks: np.ndarray
    weights: np.ndarray
    total: float
    pin: Pinning = NO_PIN
    fugacity: Optional[float] = None
    graph: Optional[object] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        if self.masks.size == 0:
            raise EmptySupportError("distribution has empty support")
        if np.any(self.weights < 0):
            raise ValueError("masses must be nonnegative")
        if self.masks.size > 1 and np.any(np.diff(self.masks.astype(np.int64)) <= 0):
            raise ValueError("masks must be strictly increasing")

    @classmethod
    def from_mapping(cls, ground: int, mass: Mapping[int, float], **kw) -> "DistributionTable":
        items = sorted((int(k), float(w)) for k, w in mass.items() if w > 0)
        masks = np.array([k for k, _ in items], dtype=np.int64)
        weights = np.array([w for _, w in items], dtype=float)
        return cls(ground, masks, weights, float(weights.sum()), **kw)

    @property
    def size(self) -> int:
        return int(self.masks.size)

    @property
    def probabilities(self) -> np.ndarray:
        return self.weights / self.total

    def mass(self, mask: int) -> float:
        """Unnormalized mass of one subset (0 outside the support)."""
        k = int(np.searchsorted(self.masks, mask))
        if k < self.masks.size and int(self.masks[k]) == mask:
            return float(self.weights[k])
        return 0.0

    def mass_many(self, masks: np.ndarray) -> np.ndarray:
        masks = np.asarray(masks, dtype=np.int64)
        k = np.searchsorted(self.masks, masks)
        k_clip = np.minimum(k, self.masks.size - 1)
        hit = self.masks[k_clip] == masks
        return np.where(hit, self.weights[k_clip], 0.0)

    def as_dict(self) -> Dict[int, float]:
        return {int(k): float(w) for k, w in zip(self.masks, self.weights)}

    def bits(self) -> np.ndarray:
        """``(support, n)`` 0/1 matrix of element membership."""
        shifts = np.arange(self.ground, dtype=np.int64)
        return ((self.masks[:, None] >> shifts[None, :]) & 1).astype(float)

    def to_csv(self) -> str:
        lines = ["mask,weight"] + [f"{int(k)},{float(w)!r}" for k, w in zip(self.masks, self.weights)]
        return "\n".join(lines) + "\n"

    def deterministic(self) -> Tuple[int, int]:
        """Bit masks of elements that are always in / always out of the support."""
        full = (1 << self.ground) - 1
        always_in = full
        ever_in = 0
        for m in self.masks.tolist():
            always_in &= m
            ever_in |= m
        return always_in, full & ~ever_in

    def free_elements(self) -> List[int]:
        """Elements with marginal strictly inside (0, 1)."""
        always_in, always_out = self.deterministic()
        return [i for i in range(self.ground) if not (always_in >> i & 1 or always_out >> i & 1)]


def condition(t: DistributionTable, pin: Pinning) -> DistributionTable:
    """Restrict ``t`` to subsets consistent with ``pin`` (renormalizing)."""
    if not pin.items:
        return t
    for v, _ in pin.items:
        if not 0 <= v < t.ground:
            raise ValueError(f"pinned element {v} outside ground set of size {t.ground}")
    merged = dict(t.pin.items)
    for v, s in pin.items:
        if v in merged and merged[v] != s:
            raise EmptySupportError(f"element {v} already pinned the other way")
        merged[v] = s
    in_mask, out_mask = pin.in_mask, pin.out_mask
    keep = ((t.masks & in_mask) == in_mask) & ((t.masks & out_mask) == 0)
    if not np.any(keep):
        raise EmptySupportError(f"no subset of the support is consistent with {pin}")
    w = t.weights[keep]
    total = float(w.sum())
    if total <= 0:
        raise ZeroMassError(f"pinning {pin} has zero mass")
    return DistributionTable(
        t.ground, t.masks[keep], w, total, Pinning(tuple(merged.items())), t.fugacity, t.graph
    )


def marginal(t: DistributionTable, i: int) -> float:
    """``Pr[i in S]``."""
    if not 0 <= i < t.ground:
        raise ValueError(f"element {i} outside ground set")
    hit = (t.masks >> i) & 1 == 1
    return float(t.weights[hit].sum() / t.total)


def marginals(t: DistributionTable) -> np.ndarray:
    return t.bits().T @ t.weights / t.total


def pair_marginals(t: DistributionTable) -> np.ndarray:
    """Matrix of ``Pr[i in S and j in S]``."""
    b = t.bits()
    return (b * t.weights[:, None]).T @ b / t.total


def conditional_marginal(t: DistributionTable, j: int, i: int, side: bool) -> float:
    """``Pr[j | i = side]``."""
    hit_i = (t.masks >> i) & 1 == (1 if side else 0)
    z = float(t.weights[hit_i].sum())
    if z <= 0:
        raise ZeroMassError(f"conditioning event {i}={'In' if side else 'Out'} has zero mass")
    hit_j = hit_i & ((t.masks >> j) & 1 == 1)
    return float(t.weights[hit_j].sum() / z)


# ---------------------------------------------------------------------------
# Non-hardcore reference distributions
# ---------------------------------------------------------------------------


def product_distribution(probs: Sequence[float]) -> DistributionTable:
    """Independent elements; element ``i`` is present with probability ``probs[i]``."""
    n = len(probs)
    masks = np.arange(1 << n, dtype=np.int64)
    w = np.ones(masks.size)
    for i, p in enumerate(probs):
        bit = (masks >> i) & 1
        w *= np.where(bit == 1, p, 1.0 - p)
    keep = w > 0
    return DistributionTable(n, masks[keep], w[keep], float(w[keep].sum()))


def half_half_distribution(n: int) -> DistributionTable:
    """Uniform over the two sets ``{0..n/2-1}`` and ``{n/2..n-1}`` (n even)."""
    if n < 2 or n % 2:
        raise ValueError("n must be even and at least 2")
    lo = (1 << (n // 2)) - 1
    hi = ((1 << n) - 1) ^ lo
    return DistributionTable.from_mapping(n, {lo: 1.0, hi: 1.0})


def uniform_k_subsets(n: int, k: int) -> DistributionTable:
    """Uniform over all ``k``-subsets of ``[n]`` (bases of the uniform matroid)."""
    mass = {sum(1 << i for i in c): 1.0 for c in itertools.combinations(range(n), k)}
    return DistributionTable.from_mapping(n, mass)


def iter_pinnings(n: int, size: int) -> Iterator[Pinning]:
    """All pinnings of exactly ``size`` elements, in lexicographic order."""
    for subset in itertools.combinations(range(n), size):
        for sides in itertools.product((IN, OUT), repeat=size):
            yield Pinning(tuple(zip(subset, sides)))


def iter_consistent_pinnings(
    t: DistributionTable, max_size: Optional[int] = None
) -> Iterator[Tuple[Pinning, np.ndarray]]:
    """Every pinning with positive mass (at most ``max_size`` elements), with its support rows."""
    n = t.ground
    limit = n if max_size is None else max_size
    bits = t.bits()
    stack = [(0, np.arange(t.size), ())]
    while stack:
        depth, rows, items = stack.pop()
        if depth == n:
            yield Pinning(items), rows
            continue
        col = bits[rows, depth]
        stack.append((depth + 1, rows, items))
        if len(items) < limit:
            rows_out = rows[col == 0.0]
            if rows_out.size:
                stack.append((depth + 1, rows_out, items + ((depth, OUT),)))
            rows_in = rows[col == 1.0]
            if rows_in.size:
                stack.append((depth + 1, rows_in, items + ((depth, IN),)))


def restrict_rows(t: DistributionTable, rows: np.ndarray, pin: Pinning) -> DistributionTable:
    """Conditional table from precomputed support rows (see :func:`iter_consistent_pinnings`)."""
    w = t.weights[rows]
    return DistributionTable(t.ground, t.masks[rows], w, float(w.sum()), pin, t.fugacity, t.graph)
