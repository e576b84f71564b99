from __future__ import annotations

import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectral_hardcore.distributions import (
    IN,
    NO_PIN,
    OUT,
    DistributionTable,
    EmptySupportError,
    Pinning,
    condition,
    conditional_marginal,
    iter_consistent_pinnings,
    marginal,
    marginals,
    pair_marginals,
    product_distribution,
    restrict_rows,
)
from spectral_hardcore.graphs import Graph, complete_ary_tree, empty_graph, path_graph, random_tree, star_graph
from spectral_hardcore.hardcore import (
    EnumerationCapError,
    HardcoreModel,
    NotAForestError,
    PinningError,
    enumerate_distribution,
    partition_function,
    ratio_R,
    tree_partition_dp,
)

from conftest import connected_graphs, fugacities


def brute_force(g: Graph, lam: float, pin: Pinning = NO_PIN):
    """Independent sets by checking every subset; returns {mask: weight}."""
    side = pin.assignment
    out = {}
    for mask in range(1 << g.n):
        if any(mask >> a & 1 and mask >> b & 1 for a, b in g.edges):
            continue
        if any((mask >> v & 1) != int(s) for v, s in side.items()):
            continue
        out[mask] = lam ** bin(mask).count("1")
    return out


K2 = path_graph(2)


def test_k2_table():
    t = enumerate_distribution(HardcoreModel(K2, 1.0))
    assert t.as_dict() == {0: 1.0, 1: 1.0, 2: 1.0}
    assert t.total == 3.0


def test_k2_pinned_in():
    t = enumerate_distribution(HardcoreModel(K2, 1.0), Pinning.of(ins=[0]))
    assert t.as_dict() == {1: 1.0}
    assert t.total == 1.0


def test_single_vertex():
    t = enumerate_distribution(HardcoreModel(empty_graph(1), 2.0))
    assert t.as_dict() == {0: 1.0, 1: 2.0}
    assert t.total == 3.0


def test_marginal_examples():
    t = enumerate_distribution(HardcoreModel(K2, 1.0))
    assert marginal(t, 0) == pytest.approx(1 / 3, abs=1e-15)
    lam = 0.7
    t1 = enumerate_distribution(HardcoreModel(empty_graph(1), lam))
    assert marginal(t1, 0) == pytest.approx(lam / (1 + lam), abs=1e-15)
    tp = enumerate_distribution(HardcoreModel(K2, 1.0), Pinning.of(ins=[1]))
    assert marginal(tp, 1) == 1.0


def test_conditional_marginal_examples():
    t = enumerate_distribution(HardcoreModel(K2, 1.0))
    assert conditional_marginal(t, 1, 0, IN) == 0.0
    assert conditional_marginal(t, 1, 0, OUT) == pytest.approx(0.5)
    t2 = enumerate_distribution(HardcoreModel(empty_graph(2), 1.0))
    assert conditional_marginal(t2, 1, 0, IN) == pytest.approx(0.5)


def test_tree_dp_examples():
    assert tree_partition_dp(HardcoreModel(K2, 1.0)).Z == pytest.approx(3.0)
    Z, _ = tree_partition_dp(HardcoreModel(star_graph(3), 1.0))
    assert Z == pytest.approx(9.0)
    bt = complete_ary_tree(2, 2).to_graph()
    m = HardcoreModel(bt, 1.0)
    assert tree_partition_dp(m).Z == pytest.approx(partition_function(m), rel=1e-13)


def test_ratio_examples():
    lam = 1.7
    assert ratio_R(HardcoreModel(empty_graph(1), lam), NO_PIN, 0) == pytest.approx(lam)
    assert ratio_R(HardcoreModel(K2, 1.0), Pinning.of(outs=[1]), 0) == pytest.approx(1.0)
    assert ratio_R(HardcoreModel(K2, 1.0), Pinning.of(ins=[1]), 0) == 0.0
    assert ratio_R(HardcoreModel(K2, 1.0), Pinning.of(ins=[0]), 0) == math.inf


def test_errors():
    with pytest.raises(ValueError):
        HardcoreModel(K2, 0.0)
    with pytest.raises(PinningError):
        enumerate_distribution(HardcoreModel(K2, 1.0), Pinning.of(ins=[0, 1]))
    with pytest.raises(PinningError):
        enumerate_distribution(HardcoreModel(K2, 1.0), Pinning.of(ins=[5]))
    with pytest.raises(EnumerationCapError):
        enumerate_distribution(HardcoreModel(path_graph(30), 1.0))
    with pytest.raises(NotAForestError):
        tree_partition_dp(HardcoreModel(Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)]), 1.0))
    with pytest.raises(ValueError):
        Pinning(((0, IN), (0, OUT)))


@given(connected_graphs(max_n=8), fugacities, st.integers(0, 2**32 - 1))
def test_enumeration_matches_brute_force(g, lam, seed):
    rng = np.random.default_rng(seed)
    pin = NO_PIN
    v = int(rng.integers(g.n))
    if rng.random() < 0.5:
        pin = Pinning.of(outs=[v]) if rng.random() < 0.5 else Pinning.of(ins=[v])
    t = enumerate_distribution(HardcoreModel(g, lam), pin)
    ref = brute_force(g, lam, pin)
    assert sorted(ref) == t.masks.tolist()
    assert np.allclose([ref[k] for k in sorted(ref)], t.weights, rtol=1e-14)


@given(st.integers(1, 20), fugacities, st.integers(0, 2**32 - 1))
def test_tree_dp_matches_enumeration(n, lam, seed):
    rng = np.random.default_rng(seed)
    g = random_tree(n, rng)
    m = HardcoreModel(g, lam)
    k = int(rng.integers(0, min(n, 4) + 1))
    ins, outs = [], []
    for v in rng.permutation(n)[:k]:
        v = int(v)
        if rng.random() < 0.5 and not any(u in ins for u in g.adjacency[v]):
            ins.append(v)
        else:
            outs.append(v)
    pin = Pinning.of(ins, outs)
    t = enumerate_distribution(m, pin)
    root = int(rng.integers(n))
    dp = tree_partition_dp(m, pin, root)
    assert dp.Z == pytest.approx(t.total, rel=1e-10)
    assert abs(dp.root_marginal - marginal(t, root)) < 1e-10


@given(connected_graphs(max_n=7), fugacities)
def test_law_of_total_probability(g, lam):
    t = enumerate_distribution(HardcoreModel(g, lam))
    p = marginals(t)
    for i, j in itertools.permutations(range(g.n), 2):
        if not 0 < p[i] < 1:
            continue
        lhs = p[j]
        rhs = conditional_marginal(t, j, i, IN) * p[i] + conditional_marginal(t, j, i, OUT) * (1 - p[i])
        assert abs(lhs - rhs) < 1e-12


@given(connected_graphs(max_n=7), fugacities)
def test_marginal_cap_under_pinnings(g, lam):
    t = enumerate_distribution(HardcoreModel(g, lam))
    cap = lam / (1 + lam)
    for pin, rows in iter_consistent_pinnings(t, max_size=2):
        ct = restrict_rows(t, rows, pin)
        p = marginals(ct)
        for v in ct.free_elements():
            assert p[v] <= cap + 1e-12


def test_isolated_vertex_monotone_in_lambda():
    grid = np.linspace(0.01, 10, 200)
    probs = [marginal(enumerate_distribution(HardcoreModel(empty_graph(1), lam)), 0) for lam in grid]
    assert np.all(np.diff(probs) > 0)


def test_pair_marginals_and_condition():
    t = enumerate_distribution(HardcoreModel(path_graph(3), 1.0))
    pm = pair_marginals(t)
    assert pm[0, 1] == 0.0 and pm[1, 2] == 0.0
    assert np.allclose(np.diag(pm), marginals(t))
    c = condition(t, Pinning.of(outs=[1]))
    assert c.total == pytest.approx(4.0)
    with pytest.raises(EmptySupportError):
        condition(c, Pinning.of(ins=[1]))


def test_product_distribution_marginals():
    probs = [0.2, 0.5, 0.9]
    t = product_distribution(probs)
    assert np.allclose(marginals(t), probs)
    assert isinstance(t, DistributionTable)


def test_consistent_pinnings_count_k2():
    t = enumerate_distribution(HardcoreModel(K2, 1.0))
    pins = {str(p) for p, _ in iter_consistent_pinnings(t)}
    # all 3^2 partial assignments except {0=In, 1=In}
    assert len(pins) == 8


def test_large_tree_dp_log_scale():
    g = path_graph(2000)
    dp = tree_partition_dp(HardcoreModel(g, 3.0))
    assert math.isinf(dp.Z) or dp.Z > 0
    assert dp.log_Z > 700
    assert 0 < dp.root_marginal < 1
