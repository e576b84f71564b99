from __future__ import annotations

import math

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectral_hardcore.distributions import NO_PIN, Pinning
from spectral_hardcore.graphs import (
    Graph,
    RootedTree,
    complete_ary_tree,
    cycle_graph,
    path_graph,
    random_tree,
    star_graph,
)
from spectral_hardcore.hardcore import HardcoreModel
from spectral_hardcore.saw import (
    Continuous,
    GridRefined,
    SawCapError,
    VertexBoundary,
    all_pseudoinfluences,
    build_saw_tree,
    compare_modes,
    decoupling_check,
    level_pseudoinfluence_sum,
    r_pseudoinfluence,
    ratio_to_probability,
    tree_root_ratio,
    weitz_identity_check,
)

from conftest import connected_graphs, fugacities

TRIANGLE = Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)])


def _walk_name(st_, x):
    return "".join(st_.graph.names[v] for v in st_.walk(x))


def test_saw_ex_saw_tree(saw_example):
    st_ = build_saw_tree(saw_example, saw_example.vertex_id("a"))
    assert st_.size == 20
    levels = np.bincount(st_.tree.level).tolist()
    assert levels == [1, 3, 4, 6, 4, 2]
    ins = sorted(_walk_name(st_, x) for x in range(st_.size) if st_.structural[x] is True)
    outs = sorted(_walk_name(st_, x) for x in range(st_.size) if st_.structural[x] is False)
    assert ins == sorted(["acda", "adefd", "acdefd"])
    assert outs == sorted(["adca", "adfed", "acdfed"])
    text = st_.to_text()
    assert text.count("[In]") == 3 and text.count("[Out]") == 3
    assert st_.to_dot().startswith("graph")


def test_saw_of_tree_is_the_tree():
    rng = np.random.default_rng(0)
    g = random_tree(9, rng)
    st_ = build_saw_tree(g, 4)
    assert st_.size == g.n
    assert all(s is None for s in st_.structural)
    assert nx.is_isomorphic(st_.tree.to_graph().to_networkx(), g.to_networkx())


def test_triangle_saw_tree():
    # two self-avoiding branches 0-1-2 and 0-2-1, each closed by a labeled copy of 0
    st_ = build_saw_tree(TRIANGLE, 0)
    assert [len(st_.tree.nodes_at_level(k)) for k in range(4)] == [1, 2, 2, 2]
    assert all(st_.structural[x] is None for k in range(3) for x in st_.tree.nodes_at_level(k))
    terminals = st_.tree.nodes_at_level(3)
    assert all(st_.origin[x] == 0 for x in terminals)
    assert sorted(str(st_.structural[x]) for x in terminals) == ["False", "True"]


def test_saw_node_cap(saw_example):
    with pytest.raises(SawCapError):
        build_saw_tree(saw_example, 0, node_cap=10)


@pytest.mark.parametrize("lam", [0.5, 1.0, 2.0])
def test_weitz_saw_ex_all_roots(saw_example, lam):
    for r in range(saw_example.n):
        assert weitz_identity_check(HardcoreModel(saw_example, lam), r).passed


def test_weitz_tree_and_cycle():
    g = random_tree(8, np.random.default_rng(1))
    assert weitz_identity_check(HardcoreModel(g, 1.3), 0).passed
    c4 = HardcoreModel(cycle_graph(4), 2.0)
    assert weitz_identity_check(c4, 0, Pinning.of(outs=[1])).passed


@given(connected_graphs(max_n=8), fugacities, st.integers(0, 2**32 - 1))
def test_weitz_fuzz(g, lam, seed):
    rng = np.random.default_rng(seed)
    ins, outs = [], []
    for v in rng.permutation(g.n)[: int(rng.integers(0, 3))]:
        v = int(v)
        if rng.random() < 0.5 and not any(u in ins for u in g.adjacency[v]):
            ins.append(v)
        else:
            outs.append(v)
    pin = Pinning.of(ins, outs)
    m = HardcoreModel(g, lam)
    for r in range(g.n):
        if r in pin:
            continue
        assert weitz_identity_check(m, r, pin).passed


def test_edge_pseudoinfluence_equals_lambda():
    t = RootedTree.from_graph(path_graph(2), 0)
    for mode in (VertexBoundary(), GridRefined(11), Continuous()):
        assert r_pseudoinfluence(t, 1.7, 1, mode) == pytest.approx(1.7, abs=1e-12)


@given(st.integers(2, 9), fugacities, st.integers(0, 2**32 - 1))
def test_level_one_bound(n, lam, seed):
    t = RootedTree.from_graph(random_tree(n, np.random.default_rng(seed)), 0)
    for v in t.nodes_at_level(1):
        assert r_pseudoinfluence(t, lam, v, Continuous()) <= lam + 1e-12


def test_vertex_vs_grid_on_binary_tree():
    t = complete_ary_tree(2, 2)
    leaf = t.nodes_at_level(2)[0]
    a = r_pseudoinfluence(t, 1.0, leaf, VertexBoundary())
    b = r_pseudoinfluence(t, 1.0, leaf, GridRefined(101))
    assert abs(a - b) < 1e-12


@given(st.integers(3, 8), fugacities, st.integers(0, 2**32 - 1))
def test_mode_ordering(n, lam, seed):
    t = RootedTree.from_graph(random_tree(n, np.random.default_rng(seed)), 0)
    for v in range(1, t.size):
        if len(t.nodes_at_level(t.level[v])) > 4:
            continue
        vb = r_pseudoinfluence(t, lam, v, VertexBoundary())
        gr = r_pseudoinfluence(t, lam, v, GridRefined(21))
        co = r_pseudoinfluence(t, lam, v, Continuous())
        assert vb <= gr + 1e-12
        assert gr <= co + 1e-9


@given(st.integers(3, 8), fugacities, st.integers(0, 2**32 - 1))
def test_probability_scale_below_odds_scale(n, lam, seed):
    t = RootedTree.from_graph(random_tree(n, np.random.default_rng(seed)), 0)
    for v in range(1, t.size):
        if len(t.nodes_at_level(t.level[v])) > 6:
            continue
        i = r_pseudoinfluence(t, lam, v, GridRefined(11), scale="I")
        r = r_pseudoinfluence(t, lam, v, GridRefined(11), scale="R")
        assert i <= r + 1e-12


@given(st.integers(3, 9), fugacities, st.integers(0, 2**32 - 1))
def test_root_probability_monotone_in_one_marginal(n, lam, seed):
    rng = np.random.default_rng(seed)
    t = RootedTree.from_graph(random_tree(n, rng), 0)
    ell = int(rng.integers(1, t.height + 1))
    level = t.nodes_at_level(ell)
    v = level[int(rng.integers(len(level)))]
    others = {x: float(rng.uniform(0, 5)) for x in level if x != v}
    probs = []
    for p in np.linspace(0, 0.99, 30):
        vals = dict(others)
        vals[v] = p / (1 - p)
        probs.append(ratio_to_probability(tree_root_ratio(t, lam, values=vals)))
    d = np.diff(probs)
    # alternating sign with the parity of the level
    sign = -1 if ell % 2 else 1
    assert np.all(sign * d >= -1e-14)


def test_level_sum_examples():
    lam = 0.8
    t = RootedTree.from_graph(star_graph(4), 0)
    assert level_pseudoinfluence_sum(t, lam, 1) <= 4 * lam + 1e-12
    p = RootedTree.from_graph(path_graph(5), 0)
    assert level_pseudoinfluence_sum(p, lam, 1) == pytest.approx(lam, abs=1e-12)
    assert level_pseudoinfluence_sum(p, lam, 10) == 0.0


def test_structural_nodes_have_zero_pseudoinfluence(saw_example):
    st_ = build_saw_tree(saw_example, 0)
    vals = all_pseudoinfluences(st_, 1.0)
    for x in range(st_.size):
        if st_.structural[x] is not None:
            assert vals[x] == 0.0


@pytest.mark.parametrize(
    "g, lam",
    [(TRIANGLE, 0.5), (random_tree(7, np.random.default_rng(5)), 1.2), (None, 1.0)],
)
def test_decoupling_examples(g, lam, saw_example):
    g = saw_example if g is None else g
    m = HardcoreModel(g, lam)
    for r in range(g.n):
        rep = decoupling_check(m, r)
        assert rep.check.passed, rep.check
        assert rep.check.slack is not None


@given(connected_graphs(max_n=6), st.sampled_from([0.5, 1.0, 2.0]))
def test_decoupling_fuzz(g, lam):
    m = HardcoreModel(g, lam)
    for r in range(g.n):
        assert decoupling_check(m, r).check.passed


def test_unknown_scale():
    t = complete_ary_tree(2, 2)
    with pytest.raises(ValueError):
        r_pseudoinfluence(t, 1.0, 1, VertexBoundary(), scale="Q")
    with pytest.raises(ValueError):
        r_pseudoinfluence(t, 1.0, 1, Continuous(), scale="K")
    with pytest.raises(ValueError):
        r_pseudoinfluence(t, 1.0, 0, VertexBoundary())


def test_grid_cap():
    t = complete_ary_tree(2, 4)
    with pytest.raises(SawCapError):
        r_pseudoinfluence(t, 1.0, t.nodes_at_level(4)[0], GridRefined(101))
    assert math.isfinite(r_pseudoinfluence(t, 1.0, t.nodes_at_level(4)[0], Continuous()))


def test_mode_comparison_flags_interior_maximizer():
    # on this tree at lambda = 4 the best boundary for the level-3 nodes is interior
    g = Graph.from_edges(6, [(0, 2), (1, 2), (1, 5), (2, 3), (3, 4)])
    rows = compare_modes(build_saw_tree(g, 0), 4.0)
    flagged = [c for c in rows if c.flagged]
    assert flagged
    for c in rows:
        assert c.vertex <= c.grid + 1e-12 <= c.continuous + 1e-9
    assert all(c.grid - c.vertex > 0.05 for c in flagged)


def test_mode_comparison_example_graph(saw_example):
    rows = compare_modes(build_saw_tree(saw_example, 0), 1.0)
    assert len(rows) == 19
    assert not any(c.flagged for c in rows)
