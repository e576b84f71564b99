from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given

from spectral_hardcore.distributions import DistributionTable, Pinning, marginals, product_distribution
from spectral_hardcore.glauber import (
    GlauberChain,
    ChainSpectrum,
    detailed_balance_residual,
    eigen_envelope,
    empirical_step_distribution,
    exact_chain_spectrum,
    first_hitting,
    generic_glauber_step,
    generic_kernel,
    glauber_step,
    hardcore_kernel,
    mixing_time_bound,
    mixing_time_formula,
    run_ensemble,
    sample_independent_sets,
    tv_distance_curve,
)
from spectral_hardcore.graphs import cycle_graph, empty_graph, path_graph, saw_example_graph
from spectral_hardcore.hardcore import HardcoreModel, enumerate_distribution
from spectral_hardcore.influence import main_theorem_gap_bound, spectral_profile
from spectral_hardcore.simplicial import StateCapError, build_down_up_walk

from conftest import connected_graphs, fugacities

K2 = HardcoreModel(path_graph(2), 1.0)


def test_isolated_vertex_adds_with_half():
    m = HardcoreModel(empty_graph(1), 1.0)
    adds = 0
    for seed in range(4000):
        c = GlauberChain.start(m, seed)
        adds += glauber_step(c).state
    assert abs(adds / 4000 - 0.5) < 3 * math.sqrt(0.25 / 4000)


def test_k2_blocked_vertex_never_added():
    c = GlauberChain.start(K2, 7, state=1)
    moves = set()
    for _ in range(2000):
        glauber_step(c)
        moves.add(c.state)
        c.state = 1
    # from {0} the chain either stays or drops vertex 0; {0, 1} is never reached
    assert moves == {0, 1}
    P = hardcore_kernel(enumerate_distribution(K2))
    assert P[1, 2] == 0.0


def test_single_step_kernel_matches_exact_row():
    t = enumerate_distribution(K2)
    P = hardcore_kernel(t)
    trials = 1_000_000
    emp = empirical_step_distribution(K2, start=1, trials=trials, seed=11)
    row = P[1]
    for k, mask in enumerate(t.masks.tolist()):
        p = row[k]
        se = math.sqrt(max(p * (1 - p), 1e-300) / trials)
        assert abs(emp.get(mask, 0.0) - p) <= 3 * se + 1e-15


def test_generic_step_on_product_and_point_mass():
    t = product_distribution([0.5, 0.5])
    c = GlauberChain.start(t, 3)
    seen = set()
    for _ in range(500):
        seen.add(generic_glauber_step(c).state)
    assert seen == {0, 1, 2, 3}
    point = DistributionTable.from_mapping(3, {5: 1.0})
    c = GlauberChain.start(point, 1, state=5)
    for _ in range(100):
        generic_glauber_step(c)
    assert c.state == 5


def test_generic_step_type_errors():
    with pytest.raises(TypeError):
        generic_glauber_step(GlauberChain.start(K2, 0))
    with pytest.raises(TypeError):
        glauber_step(GlauberChain.start(enumerate_distribution(K2), 0))


@pytest.mark.parametrize("g", [path_graph(2), cycle_graph(4), saw_example_graph()])
def test_three_kernels_agree(g):
    t = enumerate_distribution(HardcoreModel(g, 1.3))
    A = hardcore_kernel(t)
    B = generic_kernel(t).toarray()
    C = build_down_up_walk(t).dense()
    assert np.max(np.abs(A - B)) < 1e-12
    assert np.max(np.abs(B - C)) < 1e-12


def test_pinned_kernel_agrees():
    g = saw_example_graph()
    t = enumerate_distribution(HardcoreModel(g, 0.7), Pinning.of(ins=[1], outs=[3]))
    A = hardcore_kernel(t)
    assert np.allclose(A.sum(axis=1), 1.0, atol=1e-12)
    pi = t.weights / t.total
    assert np.max(np.abs(pi @ A - pi)) < 1e-12


def test_single_free_element_gap_one():
    spec = exact_chain_spectrum(product_distribution([0.3]))
    assert spec.gap == pytest.approx(1.0, abs=1e-12)


def test_k2_gap_and_bound():
    t = enumerate_distribution(K2)
    spec = exact_chain_spectrum(t)
    bound = main_theorem_gap_bound(spectral_profile(t))
    assert bound == pytest.approx(0.25)
    assert spec.gap >= bound - 1e-12
    assert spec.gap == pytest.approx(0.25, abs=1e-12)


def test_saw_ex_gap_vs_bound():
    t = enumerate_distribution(HardcoreModel(saw_example_graph(), 1.0))
    assert exact_chain_spectrum(t).gap >= main_theorem_gap_bound(spectral_profile(t)) - 1e-12


def test_mixing_formula_examples():
    assert mixing_time_formula(1.0, 0.5, 0.25) == pytest.approx(math.log(8))
    assert mixing_time_formula(0.3, 0.5, 2.0) == 0.0


def test_k2_mixing_curve():
    spec = exact_chain_spectrum(enumerate_distribution(K2))
    b = mixing_time_bound(spec, 0, 0.01)
    assert math.isfinite(b.bound)
    curve = tv_distance_curve(spec, 0, int(math.ceil(b.bound)))
    assert np.all(np.diff(curve) <= 1e-15)
    assert curve[int(math.floor(b.bound))] <= 0.01
    hit = first_hitting(curve, 0.01)
    assert hit is not None and hit <= b.bound
    assert b.remark_bound >= b.bound


def test_tv_from_stationarity_is_zero():
    t = enumerate_distribution(K2)
    spec = exact_chain_spectrum(t)
    P = spec.dense()
    # a chain whose rows equal pi is at stationarity from any start
    stat = ChainSpectrum(np.tile(spec.stationary, (3, 1)), spec.stationary, spec.states, None, 0.0, 0.0, 2)
    assert np.allclose(tv_distance_curve(stat, 1, 5)[1:], 0.0, atol=1e-15)
    assert P.shape == (3, 3)


def test_two_state_chain_envelope():
    a, b = 0.3, 0.2
    P = np.array([[1 - a, a], [b, 1 - b]])
    pi = np.array([b, a]) / (a + b)
    lam = 1 - a - b
    spec = ChainSpectrum(P, pi, np.array([0, 1]), np.array([lam, 1.0]), lam, lam, 1)
    curve = tv_distance_curve(spec, 0, 40)
    # closed form: |P^t(0, 0) - pi(0)| = pi(1) * lam^t
    assert np.allclose(curve, pi[1] * lam ** np.arange(41), atol=1e-15)
    assert np.all(curve <= eigen_envelope(spec, 0, 40) + 1e-15)


@given(connected_graphs(max_n=7), fugacities)
def test_chain_properties(g, lam):
    t = enumerate_distribution(HardcoreModel(g, lam))
    spec = exact_chain_spectrum(t)
    assert detailed_balance_residual(spec) < 1e-12
    assert np.allclose(spec.dense().sum(axis=1), 1.0, atol=1e-12)
    assert np.max(np.abs(spec.dense() - build_down_up_walk(t).dense())) < 1e-12
    curve = tv_distance_curve(spec, 0, 60)
    assert np.all(np.diff(curve) <= 1e-12)
    assert np.all(curve <= eigen_envelope(spec, 0, 60) + 1e-12)


@given(connected_graphs(min_n=2, max_n=7), fugacities)
def test_main_theorem_gap_property(g, lam):
    t = enumerate_distribution(HardcoreModel(g, lam))
    assert exact_chain_spectrum(t).gap >= main_theorem_gap_bound(spectral_profile(t)) - 1e-12


def test_sparse_path_matches_dense():
    g = path_graph(14)  # 610 states: force the sparse route with a tiny cap
    t = enumerate_distribution(HardcoreModel(g, 1.0))
    dense = exact_chain_spectrum(t)
    import spectral_hardcore.glauber as gl

    old = gl.DENSE_EIGEN_CAP
    try:
        gl.DENSE_EIGEN_CAP = 100
        sparse = exact_chain_spectrum(t)
    finally:
        gl.DENSE_EIGEN_CAP = old
    assert sparse.eigenvalues is None
    assert sparse.lambda2 == pytest.approx(dense.lambda2, abs=1e-9)
    assert sparse.lambda_min == pytest.approx(dense.lambda_min, abs=1e-9)


def test_state_cap():
    with pytest.raises(StateCapError):
        exact_chain_spectrum(enumerate_distribution(HardcoreModel(saw_example_graph(), 1.0)), cap=3)


@pytest.mark.parametrize(
    "m",
    [K2, HardcoreModel(empty_graph(1), 3.0), HardcoreModel(cycle_graph(4), 1.0)],
    ids=["k2", "isolated", "c4"],
)
def test_sampler_frequencies(m):
    stats = sample_independent_sets(m, burn_in=200, count=100_000, seed=2024)
    exact = marginals(enumerate_distribution(m))
    for v in range(m.n):
        se = math.sqrt(exact[v] * (1 - exact[v]) / stats.count)
        assert abs(stats.frequencies[v] - exact[v]) <= 3 * se


def test_sampler_bit_reproducible():
    a = run_ensemble(HardcoreModel(saw_example_graph(), 1.0), 40_000, 30, seed=99)
    b = run_ensemble(HardcoreModel(saw_example_graph(), 1.0), 40_000, 30, seed=99)
    c = run_ensemble(HardcoreModel(saw_example_graph(), 1.0), 40_000, 30, seed=100)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.dtype == np.int64


def test_sample_stats_json():
    stats = sample_independent_sets(K2, 10, 1000, 5)
    js = stats.to_json()
    assert js["count"] == 1000 and js["rng"] == "numpy.PCG64"
    assert sum(js["size_histogram"].values()) == 1000
