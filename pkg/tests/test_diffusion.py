import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specgraph import diffusion, errors
from specgraph.graph import (
    build_graph,
    complete,
    cycle,
    d_regular,
    dumbbell,
    gnp,
    hypercube,
    laplacian,
    partition_quality,
    path,
    star,
)

from test_graph import graphs


def test_walk_matrix_column_stochastic():
    w = diffusion.walk_matrix(star(5)).matrix
    assert np.allclose(w.sum(axis=0), 1.0)
    # from the hub every leaf has probability 1/4
    assert np.allclose(w[1:, 0], 0.25)
    lazy = diffusion.walk_matrix(star(5), lazy=True).matrix
    assert np.allclose(np.diag(lazy), 0.5)


@given(graphs(min_n=2, max_n=10, connected=True))
@settings(max_examples=40, deadline=None)
def test_stationary_is_fixed(g):
    pi = diffusion.stationary(g)
    for lazy in (False, True):
        assert np.allclose(diffusion.walk_matrix(g, lazy)(pi), pi, atol=1e-12)


def test_evolve_path_two_steps():
    g = path(3)
    p = diffusion.evolve(diffusion.walk_matrix(g), np.array([1.0, 0.0, 0.0]), 2)
    assert np.allclose(p, [0.5, 0.0, 0.5])
    with pytest.raises(errors.ValidationError):
        diffusion.evolve(diffusion.walk_matrix(g), np.array([0.5, 0.0, 0.0]), 1)


@pytest.mark.parametrize("g", [complete(8), hypercube(3), d_regular(64, 3, 0), cycle(9)])
@pytest.mark.parametrize("lazy", [False, True])
def test_mixing_bound(g, lazy):
    p0 = np.zeros(g.n)
    p0[0] = 1.0
    prof = diffusion.mixing_bound_check(g, p0, 30, lazy=lazy)
    assert np.all(prof.l1_dist <= prof.bound + 1e-12)


def test_mixing_alpha_complete_graph():
    # adjacency of K_n has mu_2 = ... = mu_n = -1
    prof = diffusion.mixing_bound_check(complete(8), np.eye(8)[0], 3)
    assert prof.alpha == pytest.approx(1 / 7)


def test_mixing_needs_regular():
    with pytest.raises(errors.ValidationError):
        diffusion.mixing_bound_check(star(5), np.eye(5)[0], 3)


def test_expander_mixing_ratio():
    for s in range(3):
        assert diffusion.expander_mixing_check(d_regular(40, 4, s), 50, s) <= 1.0


def test_heat_kernel_complete_graph_closed_form():
    n, t = 6, 0.3
    h = diffusion.heat_kernel(complete(n), t)
    want = math.exp(-t * n) * np.eye(n) + (1 - math.exp(-t * n)) * np.ones((n, n)) / n
    assert np.allclose(h, want, atol=1e-13)


def test_heat_kernel_semigroup():
    g = gnp(15, 0.3, 0)
    assert np.allclose(diffusion.heat_kernel(g, 0.4) @ diffusion.heat_kernel(g, 0.6), diffusion.heat_kernel(g, 1.0))


@given(graphs(min_n=2, max_n=10, connected=True), st.floats(0.05, 0.95))
@settings(max_examples=40, deadline=None)
def test_pagerank_fixed_point(g, alpha):
    s = np.zeros(g.n)
    s[0] = 1.0
    for lazy in (False, True):
        pi = diffusion.pagerank_dense(g, alpha, s, lazy=lazy)
        w = diffusion.walk_matrix(g, lazy).matrix
        assert np.allclose(pi, alpha * s + (1 - alpha) * w @ pi, atol=1e-12)
        assert pi.sum() == pytest.approx(1.0)
        assert pi.min() >= -1e-15


def test_pagerank_rho_half_is_lazy():
    g = dumbbell(4)
    s = np.eye(g.n)[2]
    assert np.allclose(diffusion.pagerank_dense(g, 0.2, s), diffusion.pagerank_dense(g, 0.2, s, rho=0.5))
    assert np.allclose(
        diffusion.pagerank_dense(g, 0.2, s, lazy=False), diffusion.pagerank_dense(g, 0.2, s, rho=1.0)
    )


def test_pagerank_regular_uniform_seed():
    g = cycle(7)
    pi = diffusion.pagerank_dense(g, 0.3, np.full(7, 1 / 7))
    assert np.allclose(pi, 1 / 7)


def test_ppr_operator_columns():
    g = gnp(12, 0.4, 1)
    op = diffusion.ppr_operator(g, 0.15)
    assert np.allclose(op[:, 3], diffusion.pagerank_dense(g, 0.15, np.eye(12)[3]))


def test_ncut_identity_dumbbell():
    rep = diffusion.ncut_walk_check(dumbbell(5), range(5))
    assert rep.ncut == pytest.approx(2 / 21)
    assert rep.p_leave_s == pytest.approx(1 / 21)


@given(graphs(min_n=3, max_n=10, connected=True), st.data())
@settings(max_examples=40, deadline=None)
def test_ncut_identity_property(g, data):
    k = data.draw(st.integers(1, g.n - 1))
    s = data.draw(st.lists(st.integers(0, g.n - 1), min_size=k, max_size=k, unique=True))
    rep = diffusion.ncut_walk_check(g, s)
    assert rep.ncut == pytest.approx(partition_quality(g, s).ncut, abs=1e-12)


KERNELS = [("heat", {"t": 1.0}), ("pagerank", {"gamma": 0.2}), ("lazy_power", {"alpha": 0.5, "t": 5})]


@pytest.mark.parametrize("kind, params", KERNELS)
@pytest.mark.parametrize("g", [complete(4), cycle(8), gnp(16, 0.4, 0), dumbbell(4)])
def test_kernel_is_regularized_optimum(kind, params, g):
    dm = diffusion.diffusion_kernel(g, kind, **params)
    rep = diffusion.verify_regularized_optimum(g, dm, trials=60, seed=1)
    assert rep.ok, rep.margin


@pytest.mark.parametrize("kind, params", KERNELS)
def test_wrong_eta_is_detected(kind, params):
    g = cycle(8)
    dm = diffusion.diffusion_kernel(g, kind, **params)
    bad = dataclasses.replace(dm, eta=dm.eta * 4.0)
    assert not diffusion.verify_regularized_optimum(g, bad, trials=200, seed=0).ok


def test_lazy_power_p_and_alpha_range():
    dm = diffusion.diffusion_kernel(cycle(6), "lazy_power", alpha=0.5, t=3)
    assert dm.p == pytest.approx(4 / 3)
    with pytest.raises(errors.InfeasibleParameterError):
        diffusion.diffusion_kernel(cycle(6), "lazy_power", alpha=0.3, t=3)


def test_heat_density_matches_normalized_exponential():
    g = star(5)
    dm = diffusion.diffusion_kernel(g, "heat", t=0.7)
    lsym = laplacian(g, "normalized_symmetric")
    vals, vecs = np.linalg.eigh(lsym)
    x = (vecs[:, 1:] * np.exp(-0.7 * vals[1:])) @ vecs[:, 1:].T
    assert np.allclose(dm.X, x / np.trace(x), atol=1e-12)


def test_regularizer_mismatch_rejected():
    dm = diffusion.diffusion_kernel(cycle(6), "heat", t=1.0)
    with pytest.raises(errors.ValidationError):
        diffusion.verify_regularized_optimum(cycle(6), dm, regularizer="logdet")


def test_project_simplex():
    assert np.allclose(diffusion.project_simplex(np.array([0.5, 0.5])), [0.5, 0.5])
    assert np.allclose(diffusion.project_simplex(np.array([2.0, 0.0, -1.0])), [1.0, 0.0, 0.0])


def test_disconnected_kernel_rejected():
    g = build_graph(4, [(0, 1), (2, 3)])
    with pytest.raises(errors.DisconnectedGraphError):
        diffusion.diffusion_kernel(g, "heat", t=1.0)
