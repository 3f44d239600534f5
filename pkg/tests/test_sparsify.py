import math

import numpy as np
import pytest

from specgraph import errors, sparsify
from specgraph.graph import build_graph, complete, cycle, dumbbell, gnp, laplacian, path


def test_sample_size_formula():
    assert sparsify.sample_size(100, 0.5) == math.ceil(20 * 100 * math.log(100) / 0.25)
    assert sparsify.sample_size(100, 1.0, c=4) == math.ceil(400 * math.log(100))


def test_sparsify_is_unbiased_in_expectation():
    g = gnp(30, 0.3, 0)
    r = 2000
    total = np.zeros(g.m)
    for seed in range(40):
        total += sparsify.sample_scales(g, sparsify.SparsifierConfig(r, seed=seed))
    assert np.mean(total / 40) == pytest.approx(1.0, abs=0.02)


def test_sparsifier_is_deterministic():
    g = gnp(30, 0.3, 0)
    cfg = sparsify.SparsifierConfig(500, seed=7)
    assert sparsify.sparsify(g, cfg) == sparsify.sparsify(g, cfg)


def test_similarity_identity_and_scaling():
    g = gnp(20, 0.4, 1)
    assert sparsify.spectral_similarity(g, g).sigma == pytest.approx(1.0)
    h = build_graph(g.n, zip(g.u.tolist(), g.v.tolist(), (2.0 * g.w).tolist()))
    assert sparsify.spectral_similarity(g, h).sigma == pytest.approx(2.0)


def test_similarity_path_vs_cycle():
    # the cycle's extra edge is a tree path of length n-1 in the path graph
    rep = sparsify.spectral_similarity(cycle(16), path(16))
    assert rep.sigma == pytest.approx(16.0)


def test_similarity_disconnected_is_infinite():
    g = path(4)
    h = build_graph(4, [(0, 1), (2, 3)])
    assert sparsify.spectral_similarity(g, h).sigma == math.inf


def test_leverage_sparsifier_quality():
    g = gnp(60, 0.2, 0)
    h = sparsify.sparsify(g, sparsify.SparsifierConfig(sparsify.sample_size(g.n, 1.0), seed=0))
    assert sparsify.spectral_similarity(g, h).sigma <= 1.5
    assert sparsify.embedding_check(g, sparsify.SparsifierConfig(sparsify.sample_size(g.n, 0.5), seed=0)) <= 0.5


def test_embedding_basis_is_orthonormal():
    g = dumbbell(4)
    u = sparsify.embedding_basis(g)
    assert np.allclose(u.T @ u, np.eye(g.n - 1), atol=1e-12)
    assert sparsify.embedding_norm(g, np.ones(g.m), u) == pytest.approx(0.0, abs=1e-12)


def test_embedding_norm_matches_quadratic_forms():
    # ||I - U^T S U|| equals the largest relative quadratic-form error
    g = gnp(20, 0.4, 0)
    cfg = sparsify.SparsifierConfig(800, seed=2)
    scale = sparsify.sample_scales(g, cfg)
    h = build_graph(g.n, zip(g.u[scale > 0].tolist(), g.v[scale > 0].tolist(), (g.w * scale)[scale > 0].tolist()))
    ratios = sparsify.spectral_similarity(g, h).ratios
    want = max(abs(1 - 1 / ratios.min()), abs(1 - 1 / ratios.max()))
    assert sparsify.embedding_norm(g, scale) == pytest.approx(want, rel=1e-8)


def test_uniform_needs_beta():
    g = dumbbell(5)
    with pytest.raises(errors.ValidationError):
        sparsify.edge_probabilities(g, sparsify.SparsifierConfig(100, beta=1.0, source="uniform"))
    p = sparsify.edge_probabilities(g, sparsify.SparsifierConfig(100, beta=0.4, source="uniform"))
    assert np.allclose(p, 1 / g.m)


def test_user_probabilities_validated():
    g = complete(4)
    with pytest.raises(errors.ValidationError):
        sparsify.edge_probabilities(g, sparsify.SparsifierConfig(10, source="user", probabilities=np.ones(g.m)))
    p = np.full(g.m, 1 / g.m)
    assert np.allclose(sparsify.edge_probabilities(g, sparsify.SparsifierConfig(10, source="user", probabilities=p)), p)


def test_config_validation():
    with pytest.raises(errors.ValidationError):
        sparsify.edge_probabilities(path(3), sparsify.SparsifierConfig(0))
    with pytest.raises(errors.ValidationError):
        sparsify.edge_probabilities(path(3), sparsify.SparsifierConfig(5, beta=0.0))


def test_sparsifier_preserves_laplacian_expectation():
    g = complete(6)
    acc = np.zeros((6, 6))
    for seed in range(200):
        acc += laplacian(sparsify.sparsify(g, sparsify.SparsifierConfig(50, seed=seed)))
    assert np.allclose(acc / 200, laplacian(g), atol=0.15)
