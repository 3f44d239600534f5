"""Stochastic blockmodels, planted-bisection recovery and regularized spectral clustering."""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleParameterError, ValidationError
from .graph import Graph, build_graph
from .spectra import ClusterLabels, kmeans, row_normalize, sym_eig

MAX_PERMUTATION_K = 8
ZERO_ROW_TOL = 1e-12


@dataclass(frozen=True)
class SbmModel:
    k: int
    z: np.ndarray
    B: np.ndarray

    def __post_init__(self):
        z = np.asarray(self.z, dtype=np.int64)
        b = np.asarray(self.B, dtype=float)
        if b.shape != (self.k, self.k):
            raise ValidationError("B must be k x k")
        if not np.allclose(b, b.T):
            raise ValidationError("B must be symmetric")
        if np.any(b < 0) or np.any(b > 1):
            raise ValidationError("B entries must lie in [0, 1]")
        if np.any(z < 0) or np.any(z >= self.k):
            raise ValidationError("block labels must lie in 0..k-1")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "B", b)

    @property
    def n(self) -> int:
        return len(self.z)


@dataclass(frozen=True)
class DcSbmModel:
    model: SbmModel
    theta: np.ndarray

    def probabilities(self) -> np.ndarray:
        th = np.asarray(self.theta, dtype=float)
        if th.shape != (self.model.n,) or np.any(th <= 0):
            raise ValidationError("theta must be positive with one entry per vertex")
        p = np.outer(th, th) * self.model.B[np.ix_(self.model.z, self.model.z)]
        if np.any(p > 1.0 + 1e-12):
            raise InfeasibleParameterError("theta_i theta_j B exceeds 1 for some pair")
        return p


def _coin_graph(n: int, prob: np.ndarray, seed: int) -> Graph:
    iu, ju = np.triu_indices(n, 1)
    rng = np.random.default_rng(seed)
    hit = rng.random(len(iu)) < prob[iu, ju]
    return build_graph(n, zip(iu[hit].tolist(), ju[hit].tolist()))


def gen_sbm(model: SbmModel, seed: int) -> Graph:
    """Independent edge coins with probability ``B[z_i, z_j]``."""
    return _coin_graph(model.n, model.B[np.ix_(model.z, model.z)], seed)


def gen_dcsbm(model: DcSbmModel, seed: int) -> Graph:
    """Independent edge coins with probability ``theta_i theta_j B[z_i, z_j]``."""
    return _coin_graph(model.model.n, model.probabilities(), seed)


@dataclass(frozen=True)
class PlantedBisection:
    graph: Graph
    truth: ClusterLabels
    mu1: float
    mu2: float
    theory_void: bool


def bisection_labels(n: int) -> np.ndarray:
    return (np.arange(n) >= n // 2).astype(np.int64)


def population_matrix(n: int, p: float, q: float) -> np.ndarray:
    """Expected adjacency with ``p`` inside blocks (diagonal included) and ``q`` across."""
    z = bisection_labels(n)
    return np.where(z[:, None] == z[None, :], p, q)


def gen_planted_bisection(n: int, p: float, q: float, seed: int) -> PlantedBisection:
    """Two equal blocks; ``mu1 = n(p+q)/2`` and ``mu2 = n(p-q)/2`` recorded.

    ``p <= q`` is allowed but flagged, since the recovery guarantee is void there.
    """
    if n < 2 or n % 2:
        raise InfeasibleParameterError("planted bisection needs an even n >= 2")
    for x in (p, q):
        if not 0.0 <= x <= 1.0:
            raise InfeasibleParameterError("p and q must lie in [0, 1]")
    void = p <= q
    if void:
        warnings.warn("p <= q: planted bisection recovery has no guarantee", stacklevel=2)
    z = bisection_labels(n)
    model = SbmModel(2, z, np.array([[p, q], [q, p]]))
    g = gen_sbm(model, seed)
    return PlantedBisection(g, ClusterLabels(z, 2), n * (p + q) / 2, n * (p - q) / 2, void)


def sample_theta(z: np.ndarray, seed: int, shape: float = 2.0, cap: float = 25.0) -> np.ndarray:
    """Degree parameters: ``min(1 + Pareto(shape), cap)``, rescaled to mean one per block."""
    z = np.asarray(z, dtype=np.int64)
    rng = np.random.default_rng(seed)
    th = np.minimum(1.0 + rng.pareto(shape, size=len(z)), cap)
    for b in np.unique(z):
        m = z == b
        th[m] = th[m] / th[m].mean()
    return th


def sparse_dcsbm(
    n: int,
    seed: int,
    k: int = 2,
    min_expected_degree: float = 2.0,
    ratio: float = 0.02,
    shape: float = 1.2,
    cap: float = 8.0,
) -> DcSbmModel:
    """Balanced DC-SBM with ``B ~ (I + ratio (J - I))`` scaled so the smallest expected degree is the target."""
    z = np.arange(n) % k
    z = np.sort(z)
    theta = sample_theta(z, seed, shape, cap)
    base = np.full((k, k), ratio) + (1.0 - ratio) * np.eye(k)
    p = np.outer(theta, theta) * base[np.ix_(z, z)]
    np.fill_diagonal(p, 0.0)
    c = min_expected_degree / p.sum(axis=1).min()
    b = c * base
    dc = DcSbmModel(SbmModel(k, z, b), theta)
    dc.probabilities()
    return dc


def expected_degrees(model: DcSbmModel) -> np.ndarray:
    p = model.probabilities().copy()
    np.fill_diagonal(p, 0.0)
    return p.sum(axis=1)


# --------------------------------------------------------------------------
# Recovery


def misclassification_rate(found, truth) -> float:
    """Smallest disagreement fraction over relabelings of ``found`` (``k <= 8``)."""
    f = found.labels if isinstance(found, ClusterLabels) else np.asarray(found, dtype=np.int64)
    t = truth.labels if isinstance(truth, ClusterLabels) else np.asarray(truth, dtype=np.int64)
    if f.shape != t.shape:
        raise ValidationError("label vectors differ in length")
    k = int(max(f.max(), t.max())) + 1
    if k > MAX_PERMUTATION_K:
        raise ValidationError(f"permutation search limited to k <= {MAX_PERMUTATION_K}")
    conf = np.zeros((k, k))
    np.add.at(conf, (f, t), 1.0)
    best = max(conf[np.arange(k), list(perm)].sum() for perm in itertools.permutations(range(k)))
    return float(1.0 - best / len(f))


def recover_bisection_adjacency(g: Graph) -> ClusterLabels:
    """Sign split of the eigenvector for the second-largest adjacency eigenvalue."""
    if g.n < 4:
        raise ValidationError("need at least four vertices")
    _, vecs = sym_eig(g.adjacency())
    v = vecs[:, -2]
    return ClusterLabels((v < 0).astype(np.int64), 2)


@dataclass(frozen=True)
class RecoveryReport:
    labels: ClusterLabels
    misclassified_fraction: float | None
    tau_used: float
    min_expected_degree: float
    xi: float
    zero_rows: np.ndarray = field(repr=False, default=None)


def rsc(
    g: Graph,
    k: int,
    tau: float,
    truth=None,
    seed: int = 0,
    isolated: str = "error",
) -> RecoveryReport:
    """Regularized spectral clustering on ``D_tau^-1/2 A D_tau^-1/2``, ``D_tau = D + tau I``.

    Rows of the top-``k`` eigenvector block are projected to the unit sphere
    and clustered by k-means; zero rows join the nearest centroid computed in
    the unnormalized embedding.  ``xi`` is the smallest nonzero row norm.

    With ``tau = 0`` an isolated vertex is an error unless
    ``isolated='pinv'``, which uses ``D^+`` (zero scaling) for that vertex.
    """
    if k < 2:
        raise ValidationError("k must be at least 2")
    if k > g.n:
        raise ValidationError(f"k={k} exceeds n={g.n}")
    if tau < 0:
        raise InfeasibleParameterError("tau must be nonnegative")
    if isolated not in ("error", "pinv"):
        raise ValidationError("isolated must be 'error' or 'pinv'")
    dt = g.degree + tau
    if np.any(dt <= 0):
        if isolated == "error":
            raise InfeasibleParameterError("tau = 0 with an isolated vertex; use tau > 0")
    scale = np.zeros(g.n)
    scale[dt > 0] = 1.0 / np.sqrt(dt[dt > 0])
    lt = scale[:, None] * g.adjacency() * scale[None, :]
    _, vecs = sym_eig(lt)
    x = vecs[:, ::-1][:, :k]
    xn, zero = row_normalize(x, ZERO_ROW_TOL)
    norms = np.linalg.norm(x, axis=1)
    xi = float(norms[~zero].min()) if (~zero).any() else 0.0
    labels = np.zeros(g.n, dtype=np.int64)
    live = np.flatnonzero(~zero)
    kk = min(k, len(live))
    if kk >= 1:
        labels[live] = kmeans(xn[live], kk, seed).labels
    if zero.any() and len(live):
        cents = np.array([x[live][labels[live] == j].mean(axis=0) for j in range(kk)])
        d2 = ((x[zero][:, None, :] - cents[None, :, :]) ** 2).sum(axis=2)
        labels[zero] = np.argmin(d2, axis=1)
    found = ClusterLabels(labels, k)
    frac = None if truth is None else misclassification_rate(found, truth)
    return RecoveryReport(found, frac, float(tau), float(dt.min()), xi, np.flatnonzero(zero))
