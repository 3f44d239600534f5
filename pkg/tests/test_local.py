import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specgraph import errors, local
from specgraph.diffusion import pagerank_dense
from specgraph.graph import complete, cycle, dumbbell, gnp, grid2d, laplacian, path, star

from test_graph import graphs


def test_seed_vector_normalization():
    g = dumbbell(4)
    sv = local.seed_vector(g, [0, 1])
    d = g.degree
    assert sv.s @ d == pytest.approx(0.0, abs=1e-14)
    assert sv.s @ (d * sv.s) == pytest.approx(1.0)
    assert local.correlation(g, sv, sv) == pytest.approx(1.0)
    assert sv.origin_set == frozenset({0, 1})


# --------------------------------------------------------------------------
# PageRank push


def test_push_single_edge_by_hand():
    # K_2, alpha=1/2, lazy: first push at 0 keeps (1-a)(1-rho)=1/4 and sends 1/4
    g = complete(2)
    st = local.push_ppr(g, 0, 0.5, 0.2, max_pushes=1)
    assert st.p.tolist() == [0.5, 0.0]
    assert st.r.tolist() == [0.25, 0.25]


@given(
    graphs(min_n=2, max_n=12, connected=True),
    st.floats(0.05, 0.9),
    st.sampled_from([1e-2, 1e-3, 1e-4]),
    st.sampled_from([0.25, 0.5, 1.0]),
)
@settings(max_examples=60, deadline=None)
def test_push_invariant_property(g, alpha, eps, rho):
    gaps = []
    st_ = local.push_ppr(
        g, 0, alpha, eps, rho=rho, checkpoint_every=3, callback=lambda s: gaps.append(local.push_invariant_gap(g, s))
    )
    assert max(gaps + [local.push_invariant_gap(g, st_)]) <= 1e-10
    assert np.all(st_.r < eps * g.degree)
    assert st_.p.min() >= 0 and st_.r.min() >= 0
    assert st_.p.sum() + st_.r.sum() == pytest.approx(1.0)
    assert st_.work <= 1.0 / (alpha * eps) + 1e-9
    assert g.degree[st_.support()].sum() <= local.support_volume_bound(alpha, eps, rho) + 1e-9


def test_push_matches_dense_pagerank_as_eps_shrinks():
    g = gnp(30, 0.2, 0)
    exact = pagerank_dense(g, 0.15, np.eye(g.n)[0])
    st_ = local.push_ppr(g, 0, 0.15, 1e-9)
    assert np.max(np.abs(st_.p - exact)) < 1e-7


def test_push_dict_seed_and_sparse_export():
    g = cycle(8)
    st_ = local.push_ppr(g, {0: 0.5, 4: 0.5}, 0.3, 1e-3)
    assert local.push_invariant_gap(g, st_) <= 1e-12
    sp = st_.as_sparse()
    assert set(sp["p"]) == set(st_.support().tolist())


@pytest.mark.parametrize(
    "kwargs, exc",
    [
        ({"alpha": 0.0, "eps": 1e-3}, errors.InfeasibleParameterError),
        ({"alpha": 0.5, "eps": 0.0}, errors.InfeasibleParameterError),
        ({"alpha": 0.5, "eps": 1e-3, "rho": 0.0}, errors.InfeasibleParameterError),
    ],
)
def test_push_parameter_errors(kwargs, exc):
    with pytest.raises(exc):
        local.push_ppr(path(4), 0, **kwargs)


def test_push_seed_out_of_range():
    with pytest.raises(errors.ValidationError):
        local.push_ppr(path(4), 9, 0.2, 1e-3)


def test_push_sweep_finds_dumbbell_side():
    g = dumbbell(6)
    st_ = local.push_ppr(g, 0, 0.05, 1e-6)
    sw = local.push_sweep(g, st_)
    assert sw.best_set == frozenset(range(6))
    assert sw.best_conductance == pytest.approx(1 / 31)


def test_support_bound_constants():
    assert local.support_volume_bound(0.2, 1e-3) == pytest.approx(2 / (0.8 * 1e-3))
    assert local.support_volume_bound(0.2, 1e-3, rho=1.0) == math.inf


# --------------------------------------------------------------------------
# l1-regularized push


@given(graphs(min_n=3, max_n=10, connected=True), st.sampled_from([1e-2, 1e-3, 1e-4]), st.floats(0.5, 0.95))
@settings(max_examples=40, deadline=None)
def test_push_l1_optimality_property(g, tau, beta):
    st_ = local.push_l1(g, [0], beta, tau)
    rep = local.gm_optimality_check(g, st_, tol=1e-10)
    assert rep.ok, rep.violations


def test_push_l1_lazy_breaks_slackness():
    g = dumbbell(6)
    st_ = local.push_l1(g, [0], 0.9, 1e-3, rho=0.5)
    rep = local.gm_optimality_check(g, st_)
    assert rep.violations["complementary_slackness"] > 1e-6
    assert rep.violations["residual_identity"] <= 1e-12


def test_push_l1_tends_to_dense_limit():
    g = gnp(20, 0.3, 2)
    st_ = local.push_l1(g, [0, 1], 0.8, 1e-9)
    assert np.max(np.abs(st_.p - local.l1_dense_limit(g, [0, 1], 0.8))) < 1e-6


def test_push_l1_checkpoints():
    g = gnp(40, 0.2, 0)
    gaps = []
    local.push_l1(g, [0], 0.9, 1e-5, checkpoint_every=10, callback=lambda s: gaps.append(local.l1_residual_gap(g, s)))
    assert len(gaps) > 2 and max(gaps) <= 1e-12


# --------------------------------------------------------------------------
# Locally biased spectral program


def _fiedler_space(g):
    vals, vecs = np.linalg.eigh(laplacian(g, "normalized_symmetric"))
    return vecs[:, np.abs(vals - vals[1]) <= 1e-9] / np.sqrt(g.degree)[:, None], vals[1]


@pytest.mark.parametrize("g, t", [(dumbbell(6), [0, 1]), (grid2d(5, 5), [0]), (gnp(30, 0.25, 1), [3, 4])])
def test_mov_kappa_zero_is_fiedler(g, t):
    sv = local.seed_vector(g, t)
    sol = local.mov_solve(g, sv, 0.0)
    basis, lam2 = _fiedler_space(g)
    d = g.degree
    assert not sol.constraint_active and sol.gamma == pytest.approx(lam2)
    assert np.linalg.norm(basis.T @ (d * sol.x)) == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("kappa", [0.3, 0.5, 0.9, 0.999])
def test_mov_hits_correlation_target(kappa):
    g = gnp(40, 0.2, 0)
    sv = local.seed_vector(g, [0, 1, 2])
    sol = local.mov_solve(g, sv, kappa)
    if sol.constraint_active:
        assert sol.correlation_achieved == pytest.approx(kappa, abs=1e-7)
        assert sol.gamma < _fiedler_space(g)[1]
    assert local.mov_residual(g, sol, sv) <= 1e-7
    assert sol.steps <= 200
    assert sol.x @ (g.degree * sol.x) == pytest.approx(1.0)


def test_mov_matches_pagerank_form():
    g = dumbbell(5)
    sv = local.seed_vector(g, [0])
    sol = local.mov_solve(g, sv, 0.8)
    assert sol.gamma < 0
    z = local.mov_ppr_vector(g, sv, sol.gamma)
    cos = abs(z @ (g.degree * sol.x))
    assert cos == pytest.approx(1.0, abs=1e-9)


def test_mov_correlation_monotone_in_kappa():
    g = grid2d(5, 5)
    sv = local.seed_vector(g, [0, 1])
    gammas = [local.mov_solve(g, sv, k).gamma for k in (0.6, 0.8, 0.95)]
    assert gammas[0] > gammas[1] > gammas[2]


def test_mov_rejects_bad_kappa_and_seed():
    g = cycle(6)
    sv = local.seed_vector(g, [0])
    with pytest.raises(errors.InfeasibleParameterError):
        local.mov_solve(g, sv, 1.0)
    with pytest.raises(errors.ValidationError):
        local.mov_solve(g, np.ones(6), 0.5)


# --------------------------------------------------------------------------
# Localized cut graph


def test_localized_cut_graph_shape():
    g = star(5)
    lcg = local.localized_cut_graph(g, [0], 0.5)
    assert lcg.graph.n == 7 and lcg.graph.m == g.m + 5
    assert lcg.graph.degree[lcg.s_node] == pytest.approx(0.5 * 4)
    assert lcg.graph.degree[lcg.t_node] == pytest.approx(0.5 * 4)
    empty = local.localized_cut_graph(g, [0], 0.0)
    assert empty.graph.m == g.m


@given(graphs(min_n=3, max_n=10, connected=True), st.floats(0.01, 2.0))
@settings(max_examples=40, deadline=None)
def test_pr_cut_equivalence_property(g, alpha):
    rep = local.pr_cut_equivalence_check(g, [0], alpha)
    assert rep.ok, rep.max_diff
