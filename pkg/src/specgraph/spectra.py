"""Eigensolvers, Fiedler vectors, sweep cuts, Cheeger checks and spectral clustering."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._backend import kernels
from .errors import ConvergenceError, InvariantViolation, ValidationError
from .graph import Graph, NodeSet, connected_components, laplacian, require_connected

ZERO_EIG_TOL = 1e-8
CHEEGER_TOL = 1e-9
SPECTRAL_VARIANTS = ("unnormalized", "random_walk", "normalized_rownorm")


@dataclass(frozen=True)
class EigenSystem:
    """Ascending eigenvalues with orthonormal eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray
    residual_tol: float
    sweeps: int = 0


def canonical_signs(vectors: np.ndarray, atol: float = 1e-12) -> np.ndarray:
    """Flip columns so that the first entry with magnitude above ``atol`` is positive."""
    out = np.array(vectors, dtype=float, copy=True)
    if out.ndim == 1:
        return canonical_signs(out[:, None], atol)[:, 0]
    for j in range(out.shape[1]):
        col = out[:, j]
        nz = np.flatnonzero(np.abs(col) > atol)
        if len(nz) and col[nz[0]] < 0:
            out[:, j] = -col
    return out


def _check_symmetric(m: np.ndarray, atol: float = 1e-10) -> np.ndarray:
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError("expected a square matrix")
    if not np.allclose(m, m.T, rtol=0.0, atol=atol):
        raise ValidationError("matrix is not symmetric")
    return m


def sym_eig(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """LAPACK symmetric eigendecomposition with canonical signs (production path)."""
    m = _check_symmetric(m)
    vals, vecs = np.linalg.eigh((m + m.T) / 2.0)
    return vals, canonical_signs(vecs)


def eig_dense(m: np.ndarray, tol: float = 1e-10, max_sweeps: int = 100) -> EigenSystem:
    """Full eigensystem by cyclic Jacobi rotations.

    This is the independent oracle used to validate everything else.  Raises
    :class:`ConvergenceError` if the off-diagonal mass does not fall below the
    target within ``max_sweeps`` or the eigenpair residual exceeds ``tol``.
    """
    m = _check_symmetric(m)
    n = m.shape[0]
    a = np.ascontiguousarray((m + m.T) / 2.0)
    scale = float(np.linalg.norm(a))
    target = max(tol * 1e-2, 8.0 * np.finfo(float).eps * scale * np.sqrt(n))
    diag, vecs, sweeps, off = kernels.jacobi_eigh(a, target, max_sweeps)
    if off > target:
        raise ConvergenceError(f"Jacobi did not converge in {max_sweeps} sweeps (off={off:.3e})")
    order = np.argsort(diag, kind="stable")
    values = diag[order]
    vectors = canonical_signs(vecs[:, order])
    resid = np.linalg.norm(m @ vectors - vectors * values[None, :], axis=0)
    residual = float(resid.max()) if n else 0.0
    if residual > tol:
        raise ConvergenceError(f"Jacobi residual {residual:.3e} exceeds tol {tol:.1e}")
    return EigenSystem(values, vectors, residual, sweeps)


def eig_iterative(
    m: np.ndarray,
    k: int,
    tol: float = 1e-8,
    deflate: np.ndarray | None = None,
    max_iter: int = 100_000,
    seed: int = 0,
) -> EigenSystem:
    """Smallest ``k`` eigenpairs of a PSD matrix by deflated subspace iteration.

    Iterates a block of ``k + 2`` vectors on ``c*I - m`` with ``c`` a
    Gershgorin bound, projecting out ``deflate`` columns (e.g. the known
    trivial eigenvector), with a Rayleigh-Ritz step each round so that
    repeated eigenvalues do not stall.  Stops when every wanted Ritz residual
    is below ``tol``.  Meant for sizes where a dense Jacobi sweep is too slow.
    """
    m = _check_symmetric(m)
    n = m.shape[0]
    q0 = None
    if deflate is not None:
        q0 = np.linalg.qr(np.asarray(deflate, dtype=float).reshape(n, -1))[0]
    avail = n - (0 if q0 is None else q0.shape[1])
    if not 1 <= k <= avail:
        raise ValidationError(f"k must be in 1..{avail}")
    b = min(k + 2, avail)
    c = float(np.max(np.sum(np.abs(m), axis=1)))
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, b))

    def project(y):
        if q0 is not None:
            y = y - q0 @ (q0.T @ y)
        return np.linalg.qr(y)[0]

    x = project(x)
    for _ in range(max_iter):
        mx = m @ x
        h = x.T @ mx
        theta, s = np.linalg.eigh((h + h.T) / 2.0)
        x = x @ s
        mx = mx @ s
        res = np.linalg.norm(mx[:, :k] - x[:, :k] * theta[None, :k], axis=0)
        if np.all(res <= tol):
            return EigenSystem(theta[:k].copy(), canonical_signs(x[:, :k]), float(res.max()))
        x = project(c * x - mx)
    raise ConvergenceError("subspace iteration hit max_iter")


# --------------------------------------------------------------------------
# Fiedler pairs


@dataclass(frozen=True)
class FiedlerPair:
    value: float
    vector: np.ndarray
    disconnected: bool = False


def fiedler(g: Graph, kind: str = "combinatorial") -> FiedlerPair:
    """Second-smallest eigenpair of the requested Laplacian.

    For ``random_walk`` the generalized problem ``L u = lam D u`` is solved
    through the normalized Laplacian and ``u = D^-1/2 v`` (so ``u^T D u = 1``).
    A disconnected graph yields ``lam = 0`` with a component-indicator vector
    and ``disconnected=True``.
    """
    if g.n < 2:
        raise ValidationError("Fiedler pair needs at least two vertices")
    labels = connected_components(g)
    if labels.max() > 0:
        return FiedlerPair(0.0, _component_vector(g, labels == 0, kind), True)
    if kind == "combinatorial":
        vals, vecs = sym_eig(laplacian(g, "combinatorial"))
        return FiedlerPair(float(vals[1]), vecs[:, 1])
    vals, vecs = sym_eig(laplacian(g, "normalized_symmetric"))
    v = vecs[:, 1]
    if kind == "random_walk":
        v = canonical_signs(v / np.sqrt(g.degree))
    elif kind != "normalized_symmetric":
        raise ValidationError(f"unknown Laplacian kind {kind!r}")
    return FiedlerPair(float(vals[1]), v)


def _component_vector(g: Graph, mask: np.ndarray, kind: str) -> np.ndarray:
    if kind == "combinatorial":
        x = np.where(mask, 1.0 / mask.sum(), -1.0 / (~mask).sum())
        return canonical_signs(x / np.linalg.norm(x))
    d = g.degree
    x = np.where(mask, 1.0 / d[mask].sum(), -1.0 / d[~mask].sum())
    x = x / np.sqrt(x @ (d * x))
    if kind == "normalized_symmetric":
        x = np.sqrt(d) * x
    return canonical_signs(x)


# --------------------------------------------------------------------------
# Sweep cuts


@dataclass(frozen=True)
class SweepResult:
    order: np.ndarray
    best_index: int
    best_set: NodeSet
    best_conductance: float
    profile: np.ndarray
    prefix_cut: np.ndarray = field(repr=False, default=None)
    prefix_vol: np.ndarray = field(repr=False, default=None)


def sweep_order(x: np.ndarray) -> np.ndarray:
    """Vertices sorted by ``x`` ascending, ties broken by vertex id."""
    x = np.asarray(x, dtype=float)
    return np.lexsort((np.arange(len(x)), x)).astype(np.int64)


def prefix_conductances(g: Graph, order: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    cut, vol = kernels.sweep_profile(
        g.indptr, g.indices, g.weights, g.degree, np.ascontiguousarray(order, dtype=np.int64)
    )
    cut = np.asarray(cut)
    vol = np.asarray(vol)
    small = np.minimum(vol, g.volume - vol)
    with np.errstate(divide="ignore", invalid="ignore"):
        phi = np.where(small > 0, cut / np.where(small > 0, small, 1.0), np.inf)
    return phi, cut, vol


def _sweep_from_order(g: Graph, order: np.ndarray, phi, cut, vol, best: int) -> SweepResult:
    prefix = order[: best + 1]
    if vol[best] <= g.volume - vol[best]:
        best_set = NodeSet(int(i) for i in prefix)
    else:
        best_set = NodeSet(int(i) for i in order[best + 1:])
    return SweepResult(order, best + 1, best_set, float(phi[best]), phi, cut, vol)


def sweep_cut(g: Graph, x: np.ndarray) -> SweepResult:
    """Best-conductance prefix of the ordering of ``x`` (all ``n-1`` prefixes scanned)."""
    x = np.asarray(x, dtype=float)
    if x.shape != (g.n,):
        raise ValidationError("sweep vector must have one entry per vertex")
    if g.n < 2:
        raise ValidationError("sweep needs at least two vertices")
    order = sweep_order(x)
    phi, cut, vol = prefix_conductances(g, order[:-1])
    if np.ptp(x) == 0.0:
        best = 0
    else:
        best = int(np.argmin(phi))
    return _sweep_from_order(g, order, phi, cut, vol, best)


# --------------------------------------------------------------------------
# Cheeger


@dataclass(frozen=True)
class CheegerReport:
    lambda2: float
    sweep_phi: float
    lower: float
    upper: float
    sweep: SweepResult = field(repr=False)


def cheeger_report(g: Graph) -> CheegerReport:
    """Normalized lambda_2, the sweep conductance of ``D^-1/2 v_2``, and the sandwich.

    Raises :class:`InvariantViolation` if ``lambda_2/2 <= phi <= sqrt(2 lambda_2)`` fails.
    """
    require_connected(g)
    pair = fiedler(g, "random_walk")
    sweep = sweep_cut(g, pair.vector)
    lam = pair.value
    lower, upper = lam / 2.0, float(np.sqrt(2.0 * lam))
    phi = sweep.best_conductance
    if not (lower - CHEEGER_TOL <= phi <= upper + CHEEGER_TOL):
        raise InvariantViolation(f"Cheeger sandwich failed: {lower} <= {phi} <= {upper}")
    return CheegerReport(lam, phi, lower, upper, sweep)


# --------------------------------------------------------------------------
# Clustering


@dataclass(frozen=True)
class ClusterLabels:
    labels: np.ndarray
    k: int


def _sq_dists(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def kmeans(points: np.ndarray, k: int, seed: int = 0, max_iter: int = 100) -> ClusterLabels:
    """k-means++ seeding then Lloyd iterations to an assignment fixpoint.

    An emptied cluster is re-seeded at the point farthest from its assigned
    centroid.  Deterministic for a given seed.
    """
    x = np.asarray(points, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    n = x.shape[0]
    if k < 1 or k > n:
        raise ValidationError(f"k must be in 1..{n}, got {k}")
    if k == 1:
        return ClusterLabels(np.zeros(n, dtype=np.int64), 1)
    rng = np.random.default_rng(seed)
    centers = [x[rng.integers(n)]]
    for _ in range(1, k):
        d2 = _sq_dists(x, np.asarray(centers)).min(axis=1)
        total = d2.sum()
        if total <= 0:
            idx = int(rng.integers(n))
        else:
            idx = int(np.searchsorted(np.cumsum(d2), rng.random() * total, side="right"))
            idx = min(idx, n - 1)
        centers.append(x[idx])
    centers = np.asarray(centers, dtype=float)
    labels = np.full(n, -1, dtype=np.int64)
    for _ in range(max_iter):
        d2 = _sq_dists(x, centers)
        new = np.argmin(d2, axis=1)
        for j in range(k):
            if not np.any(new == j):
                far = int(np.argmax(d2[np.arange(n), new]))
                centers[j] = x[far]
                new[far] = j
        if np.array_equal(new, labels):
            break
        labels = new
        for j in range(k):
            centers[j] = x[labels == j].mean(axis=0)
    return ClusterLabels(labels, k)


def spectral_cluster(g: Graph, k: int, variant: str = "normalized_rownorm", seed: int = 0) -> ClusterLabels:
    """Bottom-``k`` Laplacian eigenvectors followed by k-means on the rows."""
    if k > g.n:
        raise ValidationError(f"k={k} exceeds n={g.n}")
    if k < 1:
        raise ValidationError("k must be positive")
    if k == 1:
        return ClusterLabels(np.zeros(g.n, dtype=np.int64), 1)
    if variant == "unnormalized":
        _, vecs = sym_eig(laplacian(g, "combinatorial"))
        emb = vecs[:, :k]
    elif variant in ("random_walk", "normalized_rownorm"):
        _, vecs = sym_eig(laplacian(g, "normalized_symmetric"))
        emb = vecs[:, :k]
        if variant == "random_walk":
            emb = emb / np.sqrt(g.degree)[:, None]
        else:
            emb = row_normalize(emb)[0]
    else:
        raise ValidationError(f"unknown spectral clustering variant {variant!r}")
    return kmeans(emb, k, seed)


def row_normalize(x: np.ndarray, atol: float = 1e-12) -> tuple[np.ndarray, np.ndarray]:
    """Project rows onto the unit sphere; rows with norm <= ``atol`` stay zero."""
    norms = np.linalg.norm(x, axis=1)
    zero = norms <= atol
    out = np.zeros_like(x)
    out[~zero] = x[~zero] / norms[~zero, None]
    return out, zero


@dataclass(frozen=True)
class SpectralFacts:
    num_zero_eigs: int
    num_components: int
    has_bipartite_component: bool
    lambda_max: float
    eigenvalues: np.ndarray = field(repr=False)


def spectral_facts(g: Graph) -> SpectralFacts:
    """Zero-eigenvalue multiplicity and bipartiteness read off the normalized spectrum.

    Isolated vertices use the convention ``D^-1/2 = 0``, giving a zero
    eigenvalue per isolated vertex.
    """
    d = g.degree
    s = np.zeros(g.n)
    s[d > 0] = 1.0 / np.sqrt(d[d > 0])
    nl = np.diag((d > 0).astype(float)) - s[:, None] * g.adjacency() * s[None, :]
    vals = np.linalg.eigvalsh(nl)
    lam_max = float(vals[-1])
    zeros = int(np.sum(np.abs(vals) <= ZERO_EIG_TOL))
    comps = int(connected_components(g).max()) + 1
    if zeros != comps:
        raise InvariantViolation(f"{zeros} zero eigenvalues but {comps} components")
    return SpectralFacts(zeros, comps, bool(lam_max >= 2.0 - 1e-8), lam_max, vals)
