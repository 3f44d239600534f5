import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from specgraph import errors, solver, sparsify
from specgraph.graph import build_graph, complete, dumbbell, gnp, grid2d, laplacian, path

from test_graph import graphs


def test_k2_solution():
    rep = solver.solve_cg(complete(2), np.array([1.0, -1.0]), 1e-8)
    assert np.allclose(rep.x, [0.5, -0.5])
    assert solver.solve_dense(complete(2), [1.0, -1.0]).x.tolist() == pytest.approx([0.5, -0.5])


def test_path_potential_is_linear():
    # unit current from 0 to n-1 on a unit path drops one volt per edge
    n = 6
    b = np.zeros(n)
    b[0], b[-1] = 1.0, -1.0
    x = solver.solve_dense(path(n), b).x
    assert np.allclose(np.diff(x), -1.0)


@given(graphs(min_n=2, max_n=12, connected=True), st.integers(0, 1000))
@settings(max_examples=40, deadline=None)
def test_cg_matches_dense(g, seed):
    b = np.random.default_rng(seed).standard_normal(g.n)
    rep = solver.solve_cg(g, b, 1e-10)
    assert rep.converged
    assert rep.rel_error_L <= 1e-10 * (1 + 1e-6)
    exact = solver.solve_dense(g, b).x
    assert solver.l_norm(g, rep.x - exact) <= 1e-10 * max(solver.l_norm(g, exact), 1e-300) * 1.000001


def test_cg_projects_rhs_and_callback():
    g = grid2d(4, 4)
    b = np.ones(g.n)
    b[0] += 1.0
    seen = []
    rep = solver.solve_cg(g, b, 1e-8, callback=lambda k, x: seen.append(k))
    assert seen == list(range(1, rep.iterations + 1))
    assert abs(rep.x.sum()) < 1e-10
    assert np.allclose(laplacian(g) @ rep.x, b - b.mean(), atol=1e-6)


def test_cg_max_iter_reports_non_convergence():
    g = path(60)
    rep = solver.solve_cg(g, np.random.default_rng(0).standard_normal(60), 1e-12, max_iter=3)
    assert not rep.converged and rep.iterations == 3


def test_pcg_fewer_iterations():
    g = gnp(100, 0.1, 0)
    b = np.random.default_rng(0).standard_normal(g.n)
    h = sparsify.sparsify(g, sparsify.SparsifierConfig(sparsify.sample_size(g.n, 1.0), seed=0))
    cg = solver.solve_cg(g, b, 1e-8)
    pcg = solver.solve_pcg(g, b, 1e-8, h)
    assert pcg.rel_error_L <= 1e-8
    assert pcg.iterations <= cg.iterations / 2


def test_pcg_with_exact_preconditioner_is_one_step():
    g = dumbbell(5)
    b = np.random.default_rng(1).standard_normal(g.n)
    assert solver.solve_pcg(g, b, 1e-10, g).iterations <= 2


def test_pcg_disconnected_sketch():
    g = path(4)
    with pytest.raises(errors.DisconnectedGraphError, match="larger r"):
        solver.solve_pcg(g, np.array([1.0, 0, 0, -1.0]), 1e-8, build_graph(4, [(0, 1), (2, 3)]))


def test_disconnected_rejected():
    with pytest.raises(errors.DisconnectedGraphError):
        solver.solve_cg(build_graph(4, [(0, 1), (2, 3)]), np.array([1.0, -1, 0, 0]))


# --------------------------------------------------------------------------
# semi-supervised learning


def test_zgl_path_interpolation():
    f = solver.ssl_zgl(path(5), {0: 0, 4: 1}, 0)
    assert np.allclose(f, [1.0, 0.5, 0.0, -0.5, -1.0], atol=1e-12)


def test_zgl_unlabeled_component():
    g = build_graph(4, [(0, 1), (2, 3)])
    with pytest.raises(errors.ValidationError):
        solver.ssl_zgl(g, {0: 0, 1: 1})


def test_zhou_forms_agree():
    g = gnp(30, 0.25, 0)
    labels = {0: 0, 1: 1, 2: 2}
    for j in range(3):
        a = solver.ssl_zhou(g, labels, 0.8, j)
        assert np.allclose(a, solver.ssl_zhou_laplacian_form(g, labels, 0.8, j), atol=1e-12)
        assert np.allclose(a, solver.zhou_iterate(g, labels, 0.8, 300, j), atol=1e-12)


def test_joachims_system():
    g = gnp(20, 0.3, 1)
    labels = {0: 0, 5: 1}
    s = solver.class_indicator(g, labels, 0)
    f = solver.ssl_joachims(g, labels, 0)
    assert np.allclose((np.diag(np.abs(s)) + laplacian(g)) @ f, s)


@pytest.mark.parametrize("method", ["joachims", "zgl", "zhou"])
def test_ssl_predict_dumbbell(method):
    g = dumbbell(5)
    _, pred = solver.ssl_predict(g, {0: 0, 9: 1}, method)
    assert pred.tolist() == [0] * 5 + [1] * 5


def test_label_validation():
    with pytest.raises(errors.ValidationError):
        solver.label_set({})
    with pytest.raises(errors.ValidationError):
        solver.label_set({0: 0, 1: 2})
    with pytest.raises(errors.ValidationError):
        solver.ssl_zhou(path(3), {0: 0, 2: 1}, alpha=1.0)
    with pytest.raises(errors.ValidationError):
        solver.ssl_predict(path(3), {0: 0, 2: 1}, "knn")
