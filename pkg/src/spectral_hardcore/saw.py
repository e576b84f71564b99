"""Self-avoiding-walk trees and pseudoinfluence on rooted trees.

Nodes of the SAW tree rooted at ``r`` are the self-avoiding walks starting
at ``r`` plus the walks whose last step closes a cycle.  Closing walks are
leaves with a fixed spin: for a walk ``v_0..v_l`` with ``v_l = v_i``, the
leaf is In when ``v_{i+1}`` ranks after ``v_{l-1}`` in the neighbor order of
``v_i`` and Out otherwise.

Conditioning on the tree uses the odds recursion ``R = lam * prod 1/(1+R_c)``.
A fixed node (structural label or pinning) has ``R = inf`` (In) or ``R = 0``
(Out) regardless of its subtree, which is how fixed vertices and the
neighbors of In vertices drop out of the computation.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .checks import Check
from .distributions import IN, NO_PIN, OUT, Pinning
from .graphs import Graph, RootedTree
from .hardcore import HardcoreModel, enumerate_distribution, marginal
from .influence import influence_matrix

DEFAULT_NODE_CAP = 2_000_000
VERTEX_WIDTH_CAP = 20
GRID_EVAL_CAP = 4_000_000
_CHUNK = 1 << 14


class SawCapError(ValueError):
    pass


@dataclass
class SawTree:
    """SAW tree with structural labels (``True`` In, ``False`` Out, ``None`` unlabeled)."""

    tree: RootedTree
    origin: List[int]
    structural: List[Optional[bool]]
    copies: Dict[int, List[int]]
    graph: Graph
    root_vertex: int

    @property
    def size(self) -> int:
        return self.tree.size

    def walk(self, node: int) -> List[int]:
        return [self.origin[x] for x in self.tree.path_to_root(node)]

    def to_text(self) -> str:
        """Indented listing, one node per line: ``name [In|Out]``."""
        names = self.graph.names
        lines: List[str] = []
        stack = [self.tree.root]
        while stack:
            x = stack.pop()
            tag = "" if self.structural[x] is None else (" [In]" if self.structural[x] else " [Out]")
            lines.append("  " * self.tree.level[x] + names[self.origin[x]] + tag)
            stack.extend(reversed(self.tree.children[x]))
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        names = self.graph.names
        out = ["graph saw {"]
        for x in range(self.size):
            walk = "".join(names[v] for v in self.walk(x))
            color = {None: "", True: ", style=filled, fillcolor=red", False: ", style=filled, fillcolor=lightblue"}
            out.append(f'  n{x} [label="{names[self.origin[x]]}", walk="{walk}"{color[self.structural[x]]}];')
        for x, p in enumerate(self.tree.parent):
            if p is not None:
                out.append(f"  n{p} -- n{x};")
        out.append("}")
        return "\n".join(out) + "\n"


def reverse_lexicographic_order(g: Graph) -> List[List[int]]:
    """Neighbors of each vertex sorted by decreasing id (names a..f sort with ids)."""
    return [sorted(nb, reverse=True) for nb in g.adjacency]


def build_saw_tree(
    g: Graph,
    r: int,
    neighbor_order: Optional[Sequence[Sequence[int]]] = None,
    node_cap: int = DEFAULT_NODE_CAP,
) -> SawTree:
    """Tree of self-avoiding walks from ``r`` with structural cycle-closing leaves."""
    if not 0 <= r < g.n:
        raise ValueError(f"invalid root {r}")
    order = reverse_lexicographic_order(g) if neighbor_order is None else [list(o) for o in neighbor_order]
    for v, o in enumerate(order):
        if sorted(o) != sorted(g.adjacency[v]):
            raise ValueError(f"neighbor order for vertex {v} is not a permutation of its neighbors")
    rank = [{u: k for k, u in enumerate(o)} for o in order]
    parent: List[Optional[int]] = [None]
    children: List[List[int]] = [[]]
    origin = [r]
    structural: List[Optional[bool]] = [None]
    # stack of (node, walk as list, position map)
    stack = [(0, [r], {r: 0})]
    while stack:
        node, walk, pos = stack.pop()
        x = walk[-1]
        prev = walk[-2] if len(walk) > 1 else None
        for y in g.adjacency[x]:
            if y == prev:
                continue
            child = len(parent)
            if child >= node_cap:
                raise SawCapError(f"SAW tree exceeds {node_cap} nodes")
            parent.append(node)
            children.append([])
            children[node].append(child)
            origin.append(y)
            if y in pos:
                i = pos[y]
                left, back = walk[i + 1], x
                structural.append(rank[y][left] > rank[y][back])
            else:
                structural.append(None)
                new_pos = dict(pos)
                new_pos[y] = len(walk)
                stack.append((child, walk + [y], new_pos))
    # renumber in BFS order for readability
    tree0 = RootedTree(parent, children, 0)
    bfs = tree0.bfs_order
    new = {o: k for k, o in enumerate(bfs)}
    parent2: List[Optional[int]] = [None if parent[o] is None else new[parent[o]] for o in bfs]
    children2 = [[new[c] for c in children[o]] for o in bfs]
    origin2 = [origin[o] for o in bfs]
    struct2 = [structural[o] for o in bfs]
    tree = RootedTree(parent2, children2, 0, list(origin2))
    copies: Dict[int, List[int]] = {}
    for k, v in enumerate(origin2):
        copies.setdefault(v, []).append(k)
    return SawTree(tree, origin2, struct2, copies, g, r)


# ---------------------------------------------------------------------------
# Odds recursion on trees
# ---------------------------------------------------------------------------

TreeLike = Union[SawTree, RootedTree]


@dataclass
class _View:
    tree: RootedTree
    fixed: List[Optional[bool]]

    @classmethod
    def of(cls, t: TreeLike) -> "_View":
        if isinstance(t, SawTree):
            return cls(t.tree, list(t.structural))
        return cls(t, [None] * t.size)


def _fixed_ratio(side: bool) -> float:
    return math.inf if side else 0.0


def tree_root_ratio(
    t: TreeLike, lam: float, fixed: Optional[Dict[int, bool]] = None, values: Optional[Dict[int, float]] = None
) -> float:
    """Root odds with structural labels, extra fixed nodes and explicit node ratios.

    ``values`` assigns a ratio to a node directly (a boundary node with
    marginal ``p`` has ratio ``p / (1 - p)``); its subtree is ignored.
    """
    view = _View.of(t)
    tree = view.tree
    fix = list(view.fixed)
    for x, s in (fixed or {}).items():
        fix[x] = s
    R = np.zeros(tree.size)
    for x in reversed(tree.bfs_order):
        if values is not None and x in values:
            R[x] = values[x]
        elif fix[x] is not None:
            R[x] = _fixed_ratio(fix[x])
        else:
            prod = 1.0
            for c in tree.children[x]:
                prod *= 1.0 / (1.0 + R[c])
            R[x] = lam * prod
    return float(R[tree.root])


def ratio_to_probability(R: float) -> float:
    return 1.0 if math.isinf(R) else R / (1.0 + R)


def saw_pinning(st: SawTree, pin: Pinning) -> Dict[int, bool]:
    """Copy a pinning of graph vertices onto every copy in the SAW tree."""
    out: Dict[int, bool] = {}
    for v, s in pin.items:
        for x in st.copies.get(v, []):
            out[x] = s
    return out


def weitz_identity_check(m: HardcoreModel, r: int, pin: Pinning = NO_PIN, tol: float = 1e-10) -> Check:
    """``Pr_G[r | pin]`` by enumeration against the SAW-tree recursion with ``pin`` on all copies."""
    t = enumerate_distribution(m, pin)
    lhs = marginal(t, r)
    st = build_saw_tree(m.graph, r)
    rhs = ratio_to_probability(tree_root_ratio(st, m.lam, saw_pinning(st, pin)))
    return Check.equal("weitz_identity", lhs, rhs, tol, root=r, pin=pin.to_json(), nodes=st.size)


# ---------------------------------------------------------------------------
# Pseudoinfluence
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class VertexBoundary:
    pass


@dataclass(frozen=True)
class GridRefined:
    grid_size: int = 101


@dataclass(frozen=True)
class Continuous:
    """Exact maximum over continuous boundary marginals (see :func:`_continuous_level`)."""

    max_sweeps: int = 2000
    tol: float = 1e-15


Mode = Union[VertexBoundary, GridRefined, Continuous]


def _phi(R: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        return 2.0 * np.arcsinh(np.sqrt(R))


def _interval_bounds(view: _View, lam: float, ell: int) -> Tuple[np.ndarray, np.ndarray]:
    """Range ``[lo, hi]`` of every node's ratio over boundaries at level ``ell``."""
    tree = view.tree
    lo = np.zeros(tree.size)
    hi = np.zeros(tree.size)
    for x in reversed(tree.bfs_order):
        lev = tree.level[x]
        if lev > ell:
            continue
        if view.fixed[x] is not None:
            lo[x] = hi[x] = _fixed_ratio(view.fixed[x])
        elif lev == ell:
            lo[x], hi[x] = 0.0, math.inf
        else:
            kids = tree.children[x]
            hi[x] = lam * np.prod([1.0 / (1.0 + lo[c]) for c in kids]) if kids else lam
            lo[x] = lam * np.prod([1.0 / (1.0 + hi[c]) for c in kids]) if kids else lam
    return lo, hi


def level_ratio_envelope(t: TreeLike, lam: float, ell: int) -> Tuple[float, float]:
    """``(R_min, R_max)`` of the root over all boundaries at level ``ell``."""
    view = _View.of(t)
    lo, hi = _interval_bounds(view, lam, ell)
    return float(lo[view.tree.root]), float(hi[view.tree.root])


def _continuous_level(view: _View, lam: float, ell: int, nodes: List[int], mode: Continuous) -> np.ndarray:
    """Exact R-pseudoinfluence of every node in ``nodes`` (all at level ``ell``).

    Along the path ``r = w_0, ..., w_ell = v`` let ``m_k`` be the product of
    ``1/(1+R_s)`` over the off-path children of ``w_{k-1}``.  The boundary
    enters only through the ``m_k``, which range independently over boxes
    given by :func:`_interval_bounds`.  Composing the Mobius maps
    ``x -> lam m_k / (1 + x)`` gives

        |R(v Out) - R(v In)| = lam^ell prod m_k / (a * b),

    where ``(a, b) = (1, 1) A_2 ... A_ell`` and ``A_k = [[0, lam m_k], [1, 1]]``.
    ``a`` and ``b`` are posynomials in ``m``, so the objective is log-concave
    in ``log m``; ``m_1`` sits at its upper end and the remaining coordinates
    are optimized by exact cyclic coordinate ascent
    (``m* = sqrt(p_a p_b / (q_a q_b))`` clipped to the box).
    """
    tree = view.tree
    out = np.zeros(len(nodes))
    if ell == 0 or not nodes:
        return out
    lo, hi = _interval_bounds(view, lam, ell)
    K = len(nodes)
    m_lo = np.ones((K, ell + 1))
    m_hi = np.ones((K, ell + 1))
    dead = np.zeros(K, dtype=bool)
    for row, v in enumerate(nodes):
        path = tree.path_to_root(v)
        if any(view.fixed[w] is not None for w in path[1:]):
            dead[row] = True
            continue
        for k in range(1, ell + 1):
            w_prev, w_k = path[k - 1], path[k]
            for c in tree.children[w_prev]:
                if c == w_k:
                    continue
                m_lo[row, k] *= 1.0 / (1.0 + hi[c])
                m_hi[row, k] *= 1.0 / (1.0 + lo[c])
    dead |= np.any(m_hi[:, 1:] <= 0.0, axis=1)
    m = m_hi.copy()

    def row_ab(mm: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        a = np.ones(K)
        b = np.ones(K)
        for k in range(2, ell + 1):
            a, b = b, a * lam * mm[:, k] + b
        return a, b

    def objective(mm: np.ndarray) -> np.ndarray:
        a, b = row_ab(mm)
        return lam**ell * np.prod(mm[:, 1:], axis=1) / (a * b)

    best = objective(m)
    for _ in range(mode.max_sweeps if ell >= 2 else 0):
        prev = best
        for k in range(2, ell + 1):
            m0 = m.copy()
            m0[:, k] = 0.0
            a0, b0 = row_ab(m0)
            m0[:, k] = 1.0
            a1, b1 = row_ab(m0)
            qa, qb = a1 - a0, b1 - b0
            with np.errstate(divide="ignore", invalid="ignore"):
                star = np.sqrt(a0 * b0 / (qa * qb))
            star = np.where(qa * qb > 0, star, np.inf)
            m[:, k] = np.clip(star, m_lo[:, k], m_hi[:, k])
        best = objective(m)
        if np.all(np.abs(best - prev) <= mode.tol * np.maximum(best, 1e-300)):
            break
    out = np.where(dead, 0.0, best)
    return out


def _boundary_setup(view: _View, ell: int) -> Tuple[List[int], np.ndarray]:
    """Level nodes in BFS order and their positions."""
    level_nodes = view.tree.nodes_at_level(ell)
    return level_nodes, np.array(level_nodes, dtype=int)


def _batch_root_ratio(view: _View, lam: float, ell: int, boundary: Dict[int, np.ndarray], batch: int) -> np.ndarray:
    """Root ratio for a batch of boundary assignments at level ``ell``."""
    tree = view.tree
    R: Dict[int, np.ndarray] = {}
    for x in reversed(tree.bfs_order):
        lev = tree.level[x]
        if lev > ell:
            continue
        if x in boundary:
            R[x] = boundary[x]
        elif view.fixed[x] is not None:
            R[x] = np.full(batch, _fixed_ratio(view.fixed[x]))
        elif lev == ell:
            raise AssertionError("unassigned free boundary node")
        else:
            prod = np.ones(batch)
            for c in tree.children[x]:
                prod = prod / (1.0 + R[c])
            R[x] = lam * prod
    return R[tree.root]


def _search_level_node(view: _View, lam: float, v: int, values: np.ndarray, scale: str) -> float:
    """Max over the product grid ``values^W`` of the scaled root difference."""
    tree = view.tree
    ell = tree.level[v]
    others = [x for x in tree.nodes_at_level(ell) if x != v and view.fixed[x] is None]
    W = len(others)
    total = values.size**W
    best = 0.0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(total, start + _CHUNK))
        B = idx.size
        boundary: Dict[int, np.ndarray] = {}
        rem = idx.copy()
        for x in others:
            boundary[x] = values[rem % values.size]
            rem //= values.size
        boundary[v] = np.zeros(B)
        r_out = _batch_root_ratio(view, lam, ell, boundary, B)
        boundary[v] = np.full(B, math.inf)
        r_in = _batch_root_ratio(view, lam, ell, boundary, B)
        if scale == "R":
            diff = np.abs(r_out - r_in)
        elif scale == "K":
            diff = np.abs(_phi(r_out) - _phi(r_in))
        elif scale == "I":
            diff = np.abs(r_out / (1.0 + r_out) - np.where(np.isinf(r_in), 1.0, r_in / (1.0 + r_in)))
        else:
            raise ValueError(f"unknown scale {scale!r}")
        diff = np.nan_to_num(diff, nan=0.0)
        best = max(best, float(diff.max()))
    return best


def r_pseudoinfluence(
    t: TreeLike, lam: float, v: int, mode: Mode = VertexBoundary(), scale: str = "R"
) -> float:
    """``max_p |R_r(v Out, p) - R_r(v In, p)|`` over boundary marginals at the level of ``v``.

    Structurally fixed nodes keep their labels (their copies never vary), so a
    fixed ``v`` has pseudoinfluence 0.  ``scale`` selects odds (``R``),
    probabilities (``I``) or the potential ``phi`` (``K``); the continuous
    mode supports ``R`` only.
    """
    view = _View.of(t)
    tree = view.tree
    if v == tree.root:
        raise ValueError("pseudoinfluence is defined for non-root nodes")
    if view.fixed[v] is not None or any(view.fixed[w] is not None for w in tree.path_to_root(v)[1:]):
        return 0.0
    ell = tree.level[v]
    if isinstance(mode, Continuous):
        if scale != "R":
            raise ValueError("continuous mode computes the R scale only")
        return float(_continuous_level(view, lam, ell, [v], mode)[0])
    others = [x for x in tree.nodes_at_level(ell) if x != v and view.fixed[x] is None]
    if isinstance(mode, VertexBoundary):
        if len(others) > VERTEX_WIDTH_CAP:
            raise SawCapError(f"level width {len(others)} exceeds {VERTEX_WIDTH_CAP} in VertexBoundary mode")
        values = np.array([0.0, math.inf])
    elif isinstance(mode, GridRefined):
        if mode.grid_size < 2:
            raise ValueError("grid needs at least two points")
        if mode.grid_size ** len(others) > GRID_EVAL_CAP:
            raise SawCapError(
                f"grid of {mode.grid_size}^{len(others)} boundary points exceeds {GRID_EVAL_CAP} evaluations"
            )
        p = np.linspace(0.0, 1.0, mode.grid_size)
        with np.errstate(divide="ignore"):
            values = np.where(p < 1.0, p / np.where(p < 1.0, 1.0 - p, 1.0), math.inf)
    else:
        raise TypeError(f"unknown mode {mode!r}")
    return _search_level_node(view, lam, v, values, scale)


def all_pseudoinfluences(t: TreeLike, lam: float, mode: Mode = Continuous()) -> np.ndarray:
    """R-pseudoinfluence of every node (0 at the root)."""
    view = _View.of(t)
    tree = view.tree
    out = np.zeros(tree.size)
    for ell in range(1, tree.height + 1):
        nodes = tree.nodes_at_level(ell)
        if isinstance(mode, Continuous):
            out[nodes] = _continuous_level(view, lam, ell, nodes, mode)
        else:
            for v in nodes:
                out[v] = r_pseudoinfluence(t, lam, v, mode)
    return out


def level_pseudoinfluence_sum(t: TreeLike, lam: float, ell: int, mode: Mode = Continuous()) -> float:
    """``sum_{v in L_r(ell)} R-pseudoinfluence``; 0 for an empty level."""
    view = _View.of(t)
    tree = view.tree
    if ell < 1 or ell > tree.height:
        return 0.0
    nodes = tree.nodes_at_level(ell)
    if isinstance(mode, Continuous):
        return float(_continuous_level(view, lam, ell, nodes, mode).sum())
    return float(sum(r_pseudoinfluence(t, lam, v, mode) for v in nodes))


@dataclass
class ModeComparison:
    """Pseudoinfluence of one node under the three boundary modes.

    ``flagged`` marks nodes where the grid search beats the best vertex
    boundary by more than ``flag_tol``, i.e. the maximizer is interior.
    ``None`` entries were beyond the search caps.
    """

    node: int
    level: int
    vertex: Optional[float]
    grid: Optional[float]
    continuous: float
    flagged: bool

    def to_json(self) -> Dict[str, object]:
        return dict(self.__dict__)


def compare_modes(
    t: TreeLike, lam: float, grid: GridRefined = GridRefined(11), flag_tol: float = 1e-9
) -> List[ModeComparison]:
    """VertexBoundary, GridRefined and Continuous pseudoinfluence for every non-root node."""
    view = _View.of(t)
    tree = view.tree
    cont = all_pseudoinfluences(t, lam, Continuous())
    out = []
    for v in range(tree.size):
        if v == tree.root:
            continue
        vals: List[Optional[float]] = []
        for mode in (VertexBoundary(), grid):
            try:
                vals.append(r_pseudoinfluence(t, lam, v, mode))
            except SawCapError:
                vals.append(None)
        vb, gr = vals
        flagged = vb is not None and gr is not None and gr > vb + flag_tol
        out.append(ModeComparison(v, tree.level[v], vb, gr, float(cont[v]), flagged))
    return out


@dataclass
class DecouplingReport:
    check: Check
    influences: Dict[int, float]
    pseudoinfluence_sum: float
    saw_nodes: int


def decoupling_check(
    m: HardcoreModel, r: int, mode: Mode = Continuous(), tol: float = 1e-9, table=None
) -> DecouplingReport:
    """``sum_{v != r} |Psi(v, r)| <= 2 sum_{x != root} R-pseudoinfluence`` on the SAW tree of ``r``."""
    t = table if table is not None else enumerate_distribution(m)
    psi = influence_matrix(t)
    if r not in psi.free:
        lhs = 0.0
        infl: Dict[int, float] = {}
    else:
        col = psi.free.index(r)
        infl = {u: float(abs(psi.entries[row, col])) for row, u in enumerate(psi.free) if u != r}
        lhs = float(sum(infl.values()))
    st = build_saw_tree(m.graph, r)
    total = float(all_pseudoinfluences(st, m.lam, mode).sum())
    check = Check.leq("decoupling", lhs, 2.0 * total, tol=tol, root=r, saw_nodes=st.size)
    return DecouplingReport(check, infl, total, st.size)
