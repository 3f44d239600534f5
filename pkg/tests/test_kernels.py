"""Compiled and pure-Python kernels must agree."""

import numpy as np
import pytest

from specgraph import _backend, _pykernels, local, spectra
from specgraph.graph import dumbbell, gnp, grid2d, laplacian, star

ck = _backend.compiled_kernels
needs_c = pytest.mark.skipif(ck is None, reason="compiled kernels not built")


def _both(monkeypatch, fn):
    out = []
    for mod in (ck, _pykernels):
        monkeypatch.setattr(local, "kernels", mod)
        monkeypatch.setattr(spectra, "kernels", mod)
        out.append(fn())
    return out


@needs_c
def test_backend_selected():
    assert _backend.BACKEND == "cython"


@needs_c
@pytest.mark.parametrize("g", [star(16), dumbbell(6), gnp(64, 0.15, 0)])
@pytest.mark.parametrize("rho", [0.5, 1.0])
def test_push_ppr_identical(monkeypatch, g, rho):
    a, b = _both(monkeypatch, lambda: local.push_ppr(g, 0, 0.1, 1e-5, rho=rho))
    assert a.push_count == b.push_count
    assert np.array_equal(a.p, b.p) and np.array_equal(a.r, b.r)
    assert a.work == b.work


@needs_c
@pytest.mark.parametrize("rho", [0.5, 1.0])
def test_push_l1_identical(monkeypatch, rho):
    g = gnp(40, 0.2, 0)
    a, b = _both(monkeypatch, lambda: local.push_l1(g, [0, 3], 0.9, 1e-5, rho=rho))
    assert a.push_count == b.push_count
    assert np.array_equal(a.p, b.p) and np.array_equal(a.r, b.r)


@needs_c
def test_jacobi_agrees(monkeypatch):
    m = laplacian(grid2d(5, 6))
    a, b = _both(monkeypatch, lambda: spectra.eig_dense(m))
    assert np.allclose(a.values, b.values, atol=1e-12)
    assert a.sweeps == b.sweeps


@needs_c
def test_sweep_profile_identical(monkeypatch):
    g = gnp(50, 0.2, 3)
    x = np.random.default_rng(0).standard_normal(g.n)
    a, b = _both(monkeypatch, lambda: spectra.sweep_cut(g, x))
    assert np.array_equal(a.prefix_cut, b.prefix_cut) and np.array_equal(a.prefix_vol, b.prefix_vol)


def test_pure_python_push_matches_dense(monkeypatch):
    monkeypatch.setattr(local, "kernels", _pykernels)
    g = dumbbell(5)
    st = local.push_ppr(g, 0, 0.2, 1e-6)
    assert local.push_invariant_gap(g, st) <= 1e-12
