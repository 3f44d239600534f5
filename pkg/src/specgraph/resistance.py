"""Laplacian pseudo-inverse, effective resistance and edge leverage scores."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation, ValidationError
from .graph import Graph, laplacian, require_connected
from .spectra import sym_eig

PINV_ZERO_TOL = 1e-9
RTOT_TOL = 1e-6
LEVERAGE_SUM_TOL = 1e-6
METRIC_TOL = 1e-10


@dataclass(frozen=True)
class PinvOperator:
    """Dense ``L^+`` with the spectrum it was built from."""

    matrix: np.ndarray
    values: np.ndarray
    vectors: np.ndarray

    def __matmul__(self, b):
        return self.matrix @ b


def lap_pinv(g: Graph) -> PinvOperator:
    """``V diag(1/lam) V^T`` over the nonzero eigenvalues of the combinatorial Laplacian."""
    require_connected(g)
    vals, vecs = sym_eig(laplacian(g))
    inv = np.zeros_like(vals)
    keep = vals > PINV_ZERO_TOL * max(vals[-1], 1.0)
    inv[keep] = 1.0 / vals[keep]
    m = (vecs * inv[None, :]) @ vecs.T
    return PinvOperator((m + m.T) / 2.0, vals, vecs)


def _pinv(g: Graph, pinv: PinvOperator | None) -> PinvOperator:
    return lap_pinv(g) if pinv is None else pinv


def effective_resistance(g: Graph, a: int, b: int, pinv: PinvOperator | None = None) -> float:
    """``(e_a - e_b)^T L^+ (e_a - e_b)``; zero when ``a == b``."""
    for x in (a, b):
        if not 0 <= x < g.n:
            raise ValidationError(f"vertex {x} out of range")
    if a == b:
        return 0.0
    m = _pinv(g, pinv).matrix
    return float(m[a, a] + m[b, b] - 2.0 * m[a, b])


def resistance_matrix(g: Graph, pinv: PinvOperator | None = None) -> np.ndarray:
    """All-pairs effective resistances."""
    m = _pinv(g, pinv).matrix
    diag = np.diag(m)
    r = diag[:, None] + diag[None, :] - 2.0 * m
    np.fill_diagonal(r, 0.0)
    return r


def total_resistance(g: Graph) -> float:
    """``R_tot = n * sum_i 1/lam_i``, checked against the sum over vertex pairs."""
    pinv = lap_pinv(g)
    nz = pinv.values[pinv.values > PINV_ZERO_TOL * max(pinv.values[-1], 1.0)]
    spectral = g.n * float(np.sum(1.0 / nz))
    pairs = float(np.triu(resistance_matrix(g, pinv), 1).sum())
    if abs(spectral - pairs) > RTOT_TOL * max(1.0, spectral):
        raise InvariantViolation(f"R_tot spectral {spectral} != pairwise {pairs}")
    return spectral


@dataclass(frozen=True)
class EdgeLeverage:
    """Per-edge table; row ``i`` is edge id ``i`` of the graph."""

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    resistance: np.ndarray
    leverage: np.ndarray
    probability: np.ndarray

    def rows(self):
        for i in range(len(self.u)):
            yield (i, int(self.u[i]), int(self.v[i]), float(self.w[i]), float(self.resistance[i]),
                   float(self.leverage[i]), float(self.probability[i]))


def leverage_scores(g: Graph, pinv: PinvOperator | None = None) -> EdgeLeverage:
    """``l_e = w_e R_e``; they sum to ``n - 1`` on a connected graph."""
    m = _pinv(g, pinv).matrix
    u, v, w = g.u, g.v, g.w
    res = m[u, u] + m[v, v] - 2.0 * m[u, v]
    lev = w * res
    total = lev.sum()
    if abs(total - (g.n - 1)) > LEVERAGE_SUM_TOL:
        raise InvariantViolation(f"leverage scores sum to {total}, expected {g.n - 1}")
    if np.any(lev <= 0) or np.any(lev > 1.0 + 1e-8):
        raise InvariantViolation("leverage scores outside (0, 1]")
    return EdgeLeverage(u.copy(), v.copy(), w.copy(), res, lev, lev / (g.n - 1))


def geodesic_distances(g: Graph) -> np.ndarray:
    """All-pairs shortest paths with edge length ``1/w`` (series resistors)."""
    dist = np.full((g.n, g.n), np.inf)
    np.fill_diagonal(dist, 0.0)
    dist[g.u, g.v] = 1.0 / g.w
    dist[g.v, g.u] = 1.0 / g.w
    for k in range(g.n):
        np.minimum(dist, dist[:, k:k + 1] + dist[k:k + 1, :], out=dist)
    return dist


@dataclass(frozen=True)
class MetricReport:
    triangle_violation: float
    geodesic_excess: float
    triples: int


def resistance_metric_check(g: Graph, trials: int = 500, seed: int = 0) -> MetricReport:
    """Sample triples for the triangle inequality and check ``R <= geodesic`` everywhere.

    Violations are reported as positive numbers (zero when none); anything
    above ``1e-10`` raises :class:`InvariantViolation`.
    """
    if g.n < 3:
        raise ValidationError("need at least three vertices to sample triples")
    r = resistance_matrix(g)
    rng = np.random.default_rng(seed)
    tri = np.array([rng.choice(g.n, size=3, replace=False) for _ in range(trials)])
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    tri_viol = float(max(0.0, np.max(r[a, c] - r[a, b] - r[b, c]))) if trials else 0.0
    geo = geodesic_distances(g)
    excess = float(max(0.0, np.max(r - geo)))
    if tri_viol > METRIC_TOL or excess > METRIC_TOL:
        raise InvariantViolation(f"resistance metric check failed ({tri_viol}, {excess})")
    return MetricReport(tri_viol, excess, trials)
