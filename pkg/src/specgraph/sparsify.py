"""Leverage-score sampling sparsifiers and spectral similarity."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InvariantViolation, ValidationError
from .graph import Graph, build_graph, connected_components, laplacian, require_connected
from .resistance import leverage_scores
from .spectra import sym_eig

SAMPLE_CONSTANT = 20.0
PROB_SOURCES = ("leverage", "uniform", "user")


@dataclass(frozen=True)
class SparsifierConfig:
    """Sampling plan: ``r`` draws with replacement from per-edge probabilities.

    ``source`` is ``leverage`` (exact ``l_e/(n-1)``), ``uniform`` or ``user``
    (``probabilities`` given).  Non-exact probabilities must dominate
    ``beta * l_e/(n-1)`` edge by edge.
    """

    r: int
    beta: float = 1.0
    seed: int = 0
    source: str = "leverage"
    probabilities: np.ndarray | None = field(default=None, repr=False)


def sample_size(n: int, eps: float, c: float = SAMPLE_CONSTANT) -> int:
    """``ceil(c n ln n / eps^2)``."""
    return int(math.ceil(c * n * math.log(n) / eps**2))


def edge_probabilities(g: Graph, cfg: SparsifierConfig) -> np.ndarray:
    """Validated sampling distribution over edge ids."""
    if cfg.r < 1:
        raise ValidationError("sample count r must be at least 1")
    if not 0.0 < cfg.beta <= 1.0:
        raise ValidationError("beta must lie in (0, 1]")
    require_connected(g)
    exact = leverage_scores(g).probability
    if cfg.source == "leverage":
        return exact
    if cfg.source == "uniform":
        p = np.full(g.m, 1.0 / g.m)
    elif cfg.source == "user":
        if cfg.probabilities is None:
            raise ValidationError("user source needs probabilities")
        p = np.asarray(cfg.probabilities, dtype=float)
        if p.shape != (g.m,):
            raise ValidationError(f"expected {g.m} edge probabilities")
        if np.any(p <= 0):
            raise ValidationError("every existing edge needs positive probability")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValidationError("edge probabilities must sum to 1")
    else:
        raise ValidationError(f"unknown probability source {cfg.source!r}")
    if np.any(p < cfg.beta * exact - 1e-15):
        raise ValidationError("probabilities fall below beta times the leverage distribution")
    return p


def sample_scales(g: Graph, cfg: SparsifierConfig) -> np.ndarray:
    """Per-edge multiplier ``count_e / (r p_e)`` from ``r`` i.i.d. draws."""
    p = edge_probabilities(g, cfg)
    rng = np.random.default_rng(cfg.seed)
    counts = rng.multinomial(cfg.r, p)
    return counts / (cfg.r * p)


def sparsify(g: Graph, cfg: SparsifierConfig) -> Graph:
    """Reweighted subgraph; sampled edge ``e`` gets ``w_e count_e / (r p_e)``."""
    scale = sample_scales(g, cfg)
    keep = scale > 0
    w = g.w[keep] * scale[keep]
    return build_graph(g.n, zip(g.u[keep].tolist(), g.v[keep].tolist(), w.tolist()))


@dataclass(frozen=True)
class SimilarityReport:
    sigma: float
    ratios: np.ndarray
    embedding_norm: float | None = None
    quad_min: float | None = None
    quad_max: float | None = None


def _perp_basis(n: int) -> np.ndarray:
    q, _ = np.linalg.qr(np.eye(n) - 1.0 / n)
    return q[:, : n - 1]


def spectral_similarity(g: Graph, h: Graph, trials: int = 100, seed: int = 0) -> SimilarityReport:
    """Smallest ``sigma`` with ``x^T L_h x / sigma <= x^T L_g x <= sigma x^T L_h x`` on ``1``-perp.

    Returns ``sigma = inf`` when either graph is disconnected.  Random
    quadratic-form ratios are checked against ``[1/sigma, sigma]``.
    """
    if g.n != h.n:
        raise ValidationError("graphs must share the vertex set")
    n = g.n
    if connected_components(g).max() > 0 or connected_components(h).max() > 0:
        return SimilarityReport(np.inf, np.array([]))
    q = _perp_basis(n)
    a = q.T @ laplacian(g) @ q
    b = q.T @ laplacian(h) @ q
    bv, bvec = sym_eig(b)
    if bv[0] <= 1e-12 * max(bv[-1], 1.0):
        return SimilarityReport(np.inf, np.array([]))
    bis = (bvec / np.sqrt(bv)[None, :]) @ bvec.T
    ratios = np.linalg.eigvalsh(bis @ a @ bis)
    if ratios[0] <= 0:
        return SimilarityReport(np.inf, ratios)
    sigma = float(max(ratios[-1], 1.0 / ratios[0]))
    rng = np.random.default_rng(seed)
    y = rng.standard_normal((n - 1, trials))
    quad = np.einsum("ij,ij->j", y, a @ y) / np.einsum("ij,ij->j", y, b @ y)
    lo, hi = float(quad.min()), float(quad.max())
    slack = 1e-9 * sigma
    if lo < 1.0 / sigma - slack or hi > sigma + slack:
        raise InvariantViolation("quadratic-form ratio outside [1/sigma, sigma]")
    return SimilarityReport(sigma, ratios, None, lo, hi)


def embedding_basis(g: Graph) -> np.ndarray:
    """``U = Phi V Lambda^-1/2`` with ``Phi = W^1/2 B``; ``U^T U = I`` on ``1``-perp."""
    require_connected(g)
    vals, vecs = sym_eig(laplacian(g))
    phi = np.zeros((g.m, g.n))
    idx = np.arange(g.m)
    sw = np.sqrt(g.w)
    phi[idx, g.u] = sw
    phi[idx, g.v] = -sw
    return phi @ vecs[:, 1:] / np.sqrt(vals[1:])[None, :]


def embedding_norm(g: Graph, scale: np.ndarray, basis: np.ndarray | None = None) -> float:
    """``||I - U^T diag(scale) U||_2`` for a per-edge sampling scale."""
    u = embedding_basis(g) if basis is None else basis
    k = u.shape[1]
    m = np.eye(k) - u.T @ (u * np.asarray(scale, dtype=float)[:, None])
    return float(np.max(np.abs(np.linalg.eigvalsh((m + m.T) / 2.0))))


def embedding_check(g: Graph, cfg: SparsifierConfig) -> float:
    """Subspace-embedding distortion of one sampled sketch."""
    return embedding_norm(g, sample_scales(g, cfg))
