import warnings

import numpy as np
import pytest

from specgraph import errors, sbm
from specgraph.graph import build_graph


def test_sbm_model_validation():
    with pytest.raises(errors.ValidationError):
        sbm.SbmModel(2, [0, 1], np.array([[0.5, 0.1], [0.2, 0.5]]))
    with pytest.raises(errors.ValidationError):
        sbm.SbmModel(2, [0, 2], np.eye(2))
    with pytest.raises(errors.ValidationError):
        sbm.SbmModel(2, [0, 1], 2 * np.eye(2))


def test_gen_sbm_extremes():
    m = sbm.SbmModel(2, [0, 0, 0, 1, 1, 1], np.array([[1.0, 0.0], [0.0, 1.0]]))
    g = sbm.gen_sbm(m, 0)
    assert g.m == 6
    assert all((a < 3) == (b < 3) for a, b in zip(g.u, g.v))


def test_gen_sbm_edge_density():
    m = sbm.SbmModel(2, np.repeat([0, 1], 100), np.array([[0.3, 0.05], [0.05, 0.3]]))
    g = sbm.gen_sbm(m, 3)
    inside = np.sum((g.u < 100) == (g.v < 100))
    assert inside / (2 * 100 * 99 / 2) == pytest.approx(0.3, abs=0.02)
    assert (g.m - inside) / (100 * 100) == pytest.approx(0.05, abs=0.01)


def test_dcsbm_rejects_infeasible_theta():
    m = sbm.SbmModel(1, [0, 0], np.array([[0.9]]))
    with pytest.raises(errors.InfeasibleParameterError):
        sbm.DcSbmModel(m, np.array([2.0, 1.0])).probabilities()


def test_planted_bisection_population_quantities():
    pb = sbm.gen_planted_bisection(20, 0.6, 0.1, 0)
    assert pb.mu1 == pytest.approx(7.0) and pb.mu2 == pytest.approx(5.0)
    pop = sbm.population_matrix(20, 0.6, 0.1)
    vals = np.sort(np.linalg.eigvalsh(pop))[::-1]
    assert vals[0] == pytest.approx(pb.mu1) and vals[1] == pytest.approx(pb.mu2)
    assert not pb.theory_void


def test_planted_bisection_flags_void_regime():
    with pytest.warns(UserWarning):
        pb = sbm.gen_planted_bisection(20, 0.1, 0.3, 0)
    assert pb.theory_void
    with pytest.raises(errors.InfeasibleParameterError):
        sbm.gen_planted_bisection(21, 0.5, 0.1, 0)


def test_misclassification_rate_permutations():
    truth = np.array([0, 0, 1, 1, 2, 2])
    assert sbm.misclassification_rate(np.array([2, 2, 0, 0, 1, 1]), truth) == 0.0
    assert sbm.misclassification_rate(np.array([2, 2, 0, 1, 1, 1]), truth) == pytest.approx(1 / 6)


def test_adjacency_recovery_worked_example():
    pb = sbm.gen_planted_bisection(400, 0.5, 0.2, 0)
    assert sbm.misclassification_rate(sbm.recover_bisection_adjacency(pb.graph), pb.truth) <= 1 / 8


def test_sparse_dcsbm_min_expected_degree():
    model = sbm.sparse_dcsbm(400, 5)
    assert sbm.expected_degrees(model).min() == pytest.approx(2.0)
    th = model.theta
    for b in range(2):
        assert th[model.model.z == b].mean() == pytest.approx(1.0)


def test_sample_theta_cap():
    th = sbm.sample_theta(np.zeros(1000, dtype=int), 0, shape=1.0, cap=5.0)
    assert th.mean() == pytest.approx(1.0)
    assert th.max() / th.min() <= 5.0 + 1e-9


def test_rsc_recovers_dense_blocks():
    pb = sbm.gen_planted_bisection(200, 0.3, 0.05, 1)
    rep = sbm.rsc(pb.graph, 2, float(pb.graph.degree.mean()), pb.truth)
    assert rep.misclassified_fraction <= 0.02
    assert rep.xi > 0


def test_rsc_isolated_vertex_policy():
    g = build_graph(7, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    with pytest.raises(errors.InfeasibleParameterError):
        sbm.rsc(g, 2, 0.0)
    rep = sbm.rsc(g, 2, 0.0, isolated="pinv")
    assert 6 in rep.zero_rows.tolist()
    lab = rep.labels.labels
    assert len(set(lab[:3])) == 1 and len(set(lab[3:6])) == 1 and lab[0] != lab[3]
    assert sbm.rsc(g, 2, 1.0).min_expected_degree == pytest.approx(1.0)


def test_rsc_validates_arguments():
    g = build_graph(4, [(0, 1), (2, 3), (1, 2)])
    with pytest.raises(errors.ValidationError):
        sbm.rsc(g, 1, 1.0)
    with pytest.raises(errors.InfeasibleParameterError):
        sbm.rsc(g, 2, -1.0)
