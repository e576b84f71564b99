from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spectral_hardcore.distributions import (
    IN,
    NO_PIN,
    OUT,
    Pinning,
    half_half_distribution,
    iter_consistent_pinnings,
    product_distribution,
    restrict_rows,
)
from spectral_hardcore.glauber import chain_spectrum_from_walk
from spectral_hardcore.graphs import cycle_graph, path_graph
from spectral_hardcore.hardcore import HardcoreModel, enumerate_distribution
from spectral_hardcore.influence import influence_matrix, lambda_max_influence
from spectral_hardcore.simplicial import (
    StateCapError,
    build_down_up_walk,
    build_link_walk,
    link_second_eigenvalue,
    local_to_global_check,
    spectrum_identity_check,
    trivial_decomposition,
    walk_invariants,
)

from conftest import connected_graphs, fugacities

K2 = enumerate_distribution(HardcoreModel(path_graph(2), 1.0))


def _index(w, literal):
    return w.vertices.index(literal)


def test_product_two_coins_link_entries():
    w = build_link_walk(product_distribution([0.5, 0.5]))
    assert w.matrix[_index(w, (0, IN)), _index(w, (1, IN))] == pytest.approx(0.5)
    assert w.matrix[_index(w, (0, OUT)), _index(w, (1, IN))] == pytest.approx(0.5)


def test_k2_link():
    w = build_link_walk(K2)
    assert w.matrix[_index(w, (0, IN)), _index(w, (1, IN))] == 0.0
    for i in (0, 1):
        assert w.matrix[_index(w, (i, IN)), _index(w, (i, OUT))] == 0.0
    assert link_second_eigenvalue(w) == pytest.approx(0.5, abs=1e-12)


def test_product_link_second_eigenvalue_zero():
    w = build_link_walk(product_distribution([0.3, 0.6, 0.5]))
    assert link_second_eigenvalue(w) == pytest.approx(0.0, abs=1e-12)


def test_product_four_spectrum():
    rep = spectrum_identity_check(product_distribution([0.5] * 4))
    expect = np.sort([1.0] + [0.0] * 4 + [-1 / 3] * 3)
    assert np.allclose(rep.walk_spectrum, expect, atol=1e-12)
    assert rep.passed


def test_half_half_second_eigenvalue_one():
    t = half_half_distribution(4)
    w = build_link_walk(t)
    assert link_second_eigenvalue(w) == pytest.approx(1.0, abs=1e-9)
    assert lambda_max_influence(influence_matrix(t)) == pytest.approx(3.0, abs=1e-9)
    assert spectrum_identity_check(t).passed


def test_saw_ex_spectrum_identity(saw_example):
    t = enumerate_distribution(HardcoreModel(saw_example, 1.0))
    rep = spectrum_identity_check(t)
    assert rep.passed
    assert rep.check.detail["max_imag_psi"] < 1e-9


def test_trivial_decomposition_k2_and_product():
    d = trivial_decomposition(K2)
    psi = influence_matrix(K2).entries
    assert np.allclose(d.A - d.B, psi, atol=1e-15)
    assert d.passed
    d = trivial_decomposition(product_distribution([0.4, 0.7, 0.2]))
    assert np.allclose(d.A, 0, atol=1e-15) and np.allclose(d.B, 0, atol=1e-15)


@given(connected_graphs(max_n=7), fugacities)
def test_trivial_decomposition_kernel(g, lam):
    t = enumerate_distribution(HardcoreModel(g, lam))
    if len(t.free_elements()) < 2:
        return
    d = trivial_decomposition(t)
    assert d.passed, d.residuals


def test_down_up_k2():
    w = build_down_up_walk(K2)
    expect = np.array([[0.5, 0.25, 0.25], [0.25, 0.75, 0.0], [0.25, 0.0, 0.75]])
    assert np.allclose(w.dense(), expect, atol=1e-15)


def test_down_up_single_element_mixes_in_one_step():
    t = product_distribution([0.3])
    w = build_down_up_walk(t)
    assert np.allclose(w.dense(), np.tile(w.stationary, (2, 1)))


def test_down_up_saw_ex_stationary(saw_example):
    w = build_down_up_walk(enumerate_distribution(HardcoreModel(saw_example, 1.0)))
    assert np.sum(np.abs(w.stationary @ w.dense() - w.stationary)) < 1e-12


def test_down_up_state_cap(saw_example):
    with pytest.raises(StateCapError):
        build_down_up_walk(enumerate_distribution(HardcoreModel(saw_example, 1.0)), cap=5)


def test_local_to_global_product():
    n = 4
    rep = local_to_global_check(product_distribution([0.5] * n))
    assert rep.alphas == pytest.approx([0.0] * (n - 1), abs=1e-12)
    assert rep.bound == pytest.approx(1 - 1 / n)
    assert rep.lambda2 == pytest.approx(1 - 1 / n, abs=1e-12)
    assert rep.passed


@pytest.mark.parametrize("g, lam", [(path_graph(2), 1.0), (cycle_graph(4), 0.5)])
def test_local_to_global_examples(g, lam):
    rep = local_to_global_check(enumerate_distribution(HardcoreModel(g, lam)))
    assert rep.passed
    assert rep.check.slack is not None


@given(connected_graphs(max_n=7), fugacities, st.integers(0, 2**32 - 1))
def test_link_walk_invariants_and_conditional_identity(g, lam, seed):
    t = enumerate_distribution(HardcoreModel(g, lam))
    rng = np.random.default_rng(seed)
    cands = [(p, r) for p, r in iter_consistent_pinnings(t) if len(restrict_rows(t, r, p).free_elements()) >= 2]
    pin, rows = cands[int(rng.integers(len(cands)))]
    w = build_link_walk(t, pin)
    inv = walk_invariants(w)
    assert inv["row_sum"] < 1e-12
    assert inv["detailed_balance"] < 1e-12
    assert inv["partite"] == 0.0
    k = len(w.free)
    eta = lambda_max_influence(influence_matrix(t, pin))
    assert link_second_eigenvalue(w) == pytest.approx(eta / (k - 1), abs=1e-9)
    assert spectrum_identity_check(t, pin).passed


@given(connected_graphs(max_n=7), fugacities)
def test_link_walk_with_forced_literals(g, lam):
    t = enumerate_distribution(HardcoreModel(g, lam))
    for pin, rows in iter_consistent_pinnings(t, max_size=2):
        ct = restrict_rows(t, rows, pin)
        if g.n - len(pin) < 2:
            continue
        w = build_link_walk(ct, NO_PIN, include_forced=True)
        inv = walk_invariants(w)
        assert inv["row_sum"] < 1e-12 and inv["detailed_balance"] < 1e-12


@given(connected_graphs(max_n=6), fugacities)
def test_local_to_global_fuzz(g, lam):
    rep = local_to_global_check(enumerate_distribution(HardcoreModel(g, lam)))
    assert rep.passed, (rep.lambda2, rep.bound)


def test_down_up_matches_chain_spectrum(saw_example):
    t = enumerate_distribution(HardcoreModel(saw_example, 2.0))
    spec = chain_spectrum_from_walk(build_down_up_walk(t))
    ev = np.sort(np.linalg.eigvals(build_down_up_walk(t).dense()).real)
    assert spec.lambda2 == pytest.approx(ev[-2], abs=1e-10)


def test_link_too_small():
    with pytest.raises(ValueError):
        build_link_walk(K2, Pinning.of(outs=[0]))
