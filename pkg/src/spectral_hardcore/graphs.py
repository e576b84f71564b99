"""Simple undirected graphs, rooted trees and the edge-list file format.

Vertices are dense integers ``0..n-1`` so that downstream code can encode
vertex subsets as machine-word bit masks.  Display names (``a``..``f`` for
the worked SAW example) live in an optional name table.

Edge-list format (UTF-8, LF line endings)::

    n m
    u v            # m lines, 0-based ids
    #name idx name # optional, any number of lines
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np


class GraphFormatError(ValueError):
    """Raised when an edge-list file cannot be parsed or violates an invariant."""


class _Unreachable:
    """Sentinel returned by :func:`shortest_path_distance` for disconnected pairs."""

    _instance: Optional["_Unreachable"] = None

    def __new__(cls) -> "_Unreachable":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "UNREACHABLE"

    def __reduce__(self):
        return (_Unreachable, ())


UNREACHABLE = _Unreachable()


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph on vertices ``0..n-1``."""

    n: int
    edges: frozenset
    adjacency: Tuple[Tuple[int, ...], ...]
    names: Tuple[str, ...] = ()

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[Tuple[int, int]],
        names: Optional[Sequence[str]] = None,
    ) -> "Graph":
        """Validate and build a graph; rejects self-loops and duplicate edges."""
        if n < 0:
            raise GraphFormatError(f"vertex count must be nonnegative, got {n}")
        seen = set()
        nbrs: List[List[int]] = [[] for _ in range(n)]
        for u, v in edges:
            u, v = int(u), int(v)
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u}, {v}) has a vertex id outside 0..{n - 1}")
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphFormatError(f"duplicate edge {key}")
            seen.add(key)
            nbrs[u].append(v)
            nbrs[v].append(u)
        if names is None:
            name_tuple: Tuple[str, ...] = tuple(str(i) for i in range(n))
        else:
            if len(names) != n:
                raise GraphFormatError("name table must cover every vertex")
            name_tuple = tuple(names)
        return cls(
            n=n,
            edges=frozenset(seen),
            adjacency=tuple(tuple(sorted(a)) for a in nbrs),
            names=name_tuple,
        )

    @classmethod
    def from_networkx(cls, g: nx.Graph) -> "Graph":
        nodes = sorted(g.nodes())
        index = {v: i for i, v in enumerate(nodes)}
        return cls.from_edges(len(nodes), [(index[u], index[v]) for u, v in g.edges()])

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.n))
        g.add_edges_from(self.edges)
        return g

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def neighbor_masks(self) -> np.ndarray:
        """Bit mask of the neighborhood of every vertex."""
        out = np.zeros(self.n, dtype=np.int64)
        for v, nb in enumerate(self.adjacency):
            mask = 0
            for u in nb:
                mask |= 1 << u
            out[v] = mask
        return out

    def is_forest(self) -> bool:
        return nx.is_forest(self.to_networkx()) if self.n else True

    def is_connected(self) -> bool:
        return self.n > 0 and nx.is_connected(self.to_networkx())

    def vertex_id(self, name_or_id) -> int:
        """Resolve a display name or integer id to a vertex id."""
        if isinstance(name_or_id, (int, np.integer)):
            v = int(name_or_id)
        elif str(name_or_id) in self.names:
            v = self.names.index(str(name_or_id))
        else:
            try:
                v = int(name_or_id)
            except ValueError as exc:
                raise ValueError(f"unknown vertex {name_or_id!r}") from exc
        if not 0 <= v < self.n:
            raise ValueError(f"invalid vertex id {v} for a graph on {self.n} vertices")
        return v

    def to_text(self) -> str:
        lines = [f"{self.n} {self.m}"]
        lines += [f"{u} {v}" for u, v in sorted(self.edges)]
        if self.names != tuple(str(i) for i in range(self.n)):
            lines += [f"#name {i} {name}" for i, name in enumerate(self.names)]
        return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    """Parse edge-list text; errors carry the 1-based line number."""
    lines = text.split("\n")
    header: Optional[Tuple[int, int]] = None
    edges: List[Tuple[int, int]] = []
    names: Dict[int, str] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line.split()
            if parts[0] == "#name":
                if len(parts) != 3:
                    raise GraphFormatError(f"line {lineno}: expected '#name idx name'")
                try:
                    names[int(parts[1])] = parts[2]
                except ValueError as exc:
                    raise GraphFormatError(f"line {lineno}: bad name index {parts[1]!r}") from exc
            continue
        parts = line.split()
        if len(parts) != 2:
            raise GraphFormatError(f"line {lineno}: expected two integers, got {line!r}")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError as exc:
            raise GraphFormatError(f"line {lineno}: expected two integers, got {line!r}") from exc
        if header is None:
            header = (a, b)
            continue
        n = header[0]
        if not (0 <= a < n and 0 <= b < n):
            raise GraphFormatError(f"line {lineno}: vertex id out of range 0..{n - 1}")
        if a == b:
            raise GraphFormatError(f"line {lineno}: self-loop at vertex {a}")
        edges.append((a, b))
    if header is None:
        raise GraphFormatError("line 1: missing 'n m' header")
    n, m = header
    if len(edges) != m:
        raise GraphFormatError(f"header declares {m} edges but {len(edges)} were given")
    name_list = None
    if names:
        bad = [i for i in names if not 0 <= i < n]
        if bad:
            raise GraphFormatError(f"name index {bad[0]} out of range")
        name_list = [names.get(i, str(i)) for i in range(n)]
    seen = set()
    for a, b in edges:
        key = (min(a, b), max(a, b))
        if key in seen:
            raise GraphFormatError(f"duplicate edge {key}")
        seen.add(key)
    return Graph.from_edges(n, edges, name_list)


def load_graph(path) -> Graph:
    """Read and validate an edge-list file."""
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(f"graph file not found: {p}")
    return parse_graph(p.read_text(encoding="utf-8"))


def save_graph(g: Graph, path) -> None:
    Path(path).write_text(g.to_text(), encoding="utf-8")


def max_degree(g: Graph) -> int:
    return max((len(a) for a in g.adjacency), default=0)


def shortest_path_distance(g: Graph, u: int, v: int):
    """BFS distance between ``u`` and ``v``, or :data:`UNREACHABLE`."""
    for x in (u, v):
        if not 0 <= x < g.n:
            raise ValueError(f"invalid vertex id {x}")
    if u == v:
        return 0
    dist = {u: 0}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in g.adjacency[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                if y == v:
                    return dist[y]
                queue.append(y)
    return UNREACHABLE


# ---------------------------------------------------------------------------
# Named graphs used throughout the tests and the CLI
# ---------------------------------------------------------------------------

FIG1_NAMES = ("a", "b", "c", "d", "e", "f")


def saw_example_graph() -> Graph:
    """Six-vertex graph a..f with edges ab, ac, ad, cd, de, df, ef."""
    pairs = ["ab", "ac", "ad", "cd", "de", "df", "ef"]
    idx = {c: i for i, c in enumerate(FIG1_NAMES)}
    return Graph.from_edges(6, [(idx[p[0]], idx[p[1]]) for p in pairs], FIG1_NAMES)


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def empty_graph(n: int) -> Graph:
    return Graph.from_edges(n, [])


def random_connected_graph(n: int, rng: np.random.Generator, p: Optional[float] = None) -> Graph:
    """Random spanning tree plus independent extra edges with probability ``p``."""
    if n <= 0:
        raise ValueError("n must be positive")
    if p is None:
        p = float(rng.uniform(0.1, 0.6))
    edges = set()
    order = rng.permutation(n)
    for k in range(1, n):
        a, b = int(order[k]), int(order[rng.integers(0, k)])
        edges.add((min(a, b), max(a, b)))
    for i in range(n):
        for j in range(i + 1, n):
            if (i, j) not in edges and rng.random() < p:
                edges.add((i, j))
    return Graph.from_edges(n, sorted(edges))


def random_tree(n: int, rng: np.random.Generator) -> Graph:
    return random_connected_graph(n, rng, p=0.0)


def atlas_graphs(max_n: int = 7) -> List[Graph]:
    """Every graph on at most ``max_n`` (<= 7) vertices up to isomorphism."""
    if max_n > 7:
        raise ValueError("the graph atlas stops at 7 vertices")
    return [Graph.from_networkx(g) for g in nx.graph_atlas_g() if 0 < g.number_of_nodes() <= max_n]


def graph_from_spec(spec: str) -> Graph:
    """Resolve a built-in graph name or an edge-list file path.

    Built-ins: ``k2``, ``saw-example``, ``path:N``, ``cycle:N``, ``complete:N``,
    ``star:K``, ``empty:N``, ``gnp:N:P:SEED``.
    """
    key = spec.strip()
    low = key.lower()
    parts = low.split(":")
    try:
        if low == "k2":
            return path_graph(2)
        if low == "saw-example":
            return saw_example_graph()
        if parts[0] == "path" and len(parts) == 2:
            return path_graph(int(parts[1]))
        if parts[0] == "cycle" and len(parts) == 2:
            return cycle_graph(int(parts[1]))
        if parts[0] == "complete" and len(parts) == 2:
            return complete_graph(int(parts[1]))
        if parts[0] == "star" and len(parts) == 2:
            return star_graph(int(parts[1]))
        if parts[0] == "empty" and len(parts) == 2:
            return empty_graph(int(parts[1]))
        if parts[0] == "gnp" and len(parts) == 4:
            rng = np.random.default_rng(int(parts[3]))
            return random_connected_graph(int(parts[1]), rng, float(parts[2]))
    except ValueError as exc:
        raise GraphFormatError(f"bad graph spec {spec!r}: {exc}") from exc
    return load_graph(key)


# ---------------------------------------------------------------------------
# Rooted trees
# ---------------------------------------------------------------------------


@dataclass
class RootedTree:
    """Rooted tree with ordered children; node ``root`` is usually 0.

    ``labels`` holds an optional original-vertex id per node (SAW trees use it
    to remember which graph vertex a walk ends at).
    """

    parent: List[Optional[int]]
    children: List[List[int]]
    root: int = 0
    labels: List[Optional[int]] = field(default_factory=list)

    def __post_init__(self) -> None:
        n = len(self.parent)
        if len(self.children) != n:
            raise ValueError("parent and children lists differ in length")
        if not self.labels:
            self.labels = [None] * n
        if self.parent[self.root] is not None:
            raise ValueError("the root cannot have a parent")
        level = [-1] * n
        level[self.root] = 0
        order = [self.root]
        for x in order:
            for c in self.children[x]:
                if self.parent[c] != x:
                    raise ValueError(f"child {c} of {x} has parent {self.parent[c]}")
                if level[c] != -1:
                    raise ValueError("cycle detected in rooted tree")
                level[c] = level[x] + 1
                order.append(c)
        if len(order) != n:
            raise ValueError("tree is not connected")
        self.level = level
        self.bfs_order = order

    @property
    def size(self) -> int:
        return len(self.parent)

    @property
    def height(self) -> int:
        return max(self.level)

    def nodes_at_level(self, ell: int) -> List[int]:
        return [v for v in self.bfs_order if self.level[v] == ell]

    def path_to_root(self, v: int) -> List[int]:
        """Nodes ``root = w_0, ..., w_k = v``."""
        path = [v]
        while self.parent[path[-1]] is not None:
            path.append(self.parent[path[-1]])
        return path[::-1]

    def subtree(self, u: int) -> Tuple["RootedTree", List[int]]:
        """Subtree hanging from ``u`` re-rooted at 0, plus the new-to-old node map."""
        old = [u]
        for x in old:
            old.extend(self.children[x])
        new_of = {o: i for i, o in enumerate(old)}
        parent: List[Optional[int]] = [None] + [new_of[self.parent[o]] for o in old[1:]]
        children = [[new_of[c] for c in self.children[o]] for o in old]
        labels = [self.labels[o] for o in old]
        return RootedTree(parent, children, 0, labels), old

    def max_degree(self) -> int:
        return max(len(self.children[v]) + (self.parent[v] is not None) for v in range(self.size))

    def to_graph(self) -> Graph:
        return Graph.from_edges(self.size, [(p, v) for v, p in enumerate(self.parent) if p is not None])

    @classmethod
    def from_graph(cls, g: Graph, root: int = 0) -> "RootedTree":
        """BFS orientation of a tree graph; node ids are kept."""
        if not g.is_forest() or not g.is_connected():
            raise ValueError("graph is not a tree")
        parent: List[Optional[int]] = [None] * g.n
        children: List[List[int]] = [[] for _ in range(g.n)]
        seen = {root}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y in g.adjacency[x]:
                if y not in seen:
                    seen.add(y)
                    parent[y] = x
                    children[x].append(y)
                    queue.append(y)
        return cls(parent, children, root, list(range(g.n)))


def complete_ary_tree(branching: int, depth: int) -> RootedTree:
    """Complete ``branching``-ary tree with leaves at ``depth``, nodes in BFS order."""
    if branching < 1 or depth < 0:
        raise ValueError("need branching >= 1 and depth >= 0")
    parent: List[Optional[int]] = [None]
    children: List[List[int]] = [[]]
    frontier = [0]
    for _ in range(depth):
        nxt = []
        for x in frontier:
            for _ in range(branching):
                parent.append(x)
                children.append([])
                children[x].append(len(parent) - 1)
                nxt.append(len(parent) - 1)
        frontier = nxt
    return RootedTree(parent, children, 0)


def regular_tree_ball(degree: int, radius: int) -> RootedTree:
    """Ball of radius ``radius`` in the infinite ``degree``-regular tree.

    The root has ``degree`` children and every other internal node has
    ``degree - 1``.
    """
    if degree < 2 or radius < 0:
        raise ValueError("need degree >= 2 and radius >= 0")
    parent: List[Optional[int]] = [None]
    children: List[List[int]] = [[]]
    frontier = [0]
    for depth in range(radius):
        nxt = []
        for x in frontier:
            for _ in range(degree if depth == 0 else degree - 1):
                parent.append(x)
                children.append([])
                children[x].append(len(parent) - 1)
                nxt.append(len(parent) - 1)
        frontier = nxt
    return RootedTree(parent, children, 0)
