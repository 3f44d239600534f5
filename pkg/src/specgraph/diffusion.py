"""Random walks, heat kernel, dense PageRank, mixing checks and the diffusion SDP.

Convention: the teleport parameter ``alpha`` means
``pi = alpha * s + (1 - alpha) * W pi``, distributions are column vectors,
and the lazy walk ``(I + A D^-1) / 2`` is the default for PageRank.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InfeasibleParameterError, InvariantViolation, ValidationError
from .graph import (
    Graph,
    as_mask,
    is_regular,
    laplacian,
    partition_quality,
    require_connected,
    require_positive_degrees,
)
from .spectra import sym_eig

STOCHASTIC_TOL = 1e-12
NCUT_TOL = 1e-10
SDP_TOL = 1e-8
SDP_STEPS = (1e-3, 1e-2, 1e-1)
REGULARIZER_FOR = {"heat": "entropy", "pagerank": "logdet", "lazy_power": "pnorm"}


@dataclass(frozen=True)
class WalkOperator:
    """Column-stochastic walk matrix; ``matrix @ p`` advances a distribution."""

    matrix: np.ndarray
    lazy: bool
    graph: Graph = field(repr=False)

    def __call__(self, p: np.ndarray) -> np.ndarray:
        return self.matrix @ p


def walk_matrix(g: Graph, lazy: bool = False) -> WalkOperator:
    require_positive_degrees(g)
    w = g.adjacency() / g.degree[None, :]
    if lazy:
        w = 0.5 * (np.eye(g.n) + w)
    if not np.allclose(w.sum(axis=0), 1.0, rtol=0.0, atol=STOCHASTIC_TOL):
        raise InvariantViolation("walk matrix columns do not sum to one")
    return WalkOperator(w, lazy, g)


def stationary(g: Graph) -> np.ndarray:
    """``pi_i = d_i / Vol(G)``."""
    require_connected(g)
    return g.degree / g.volume


def _check_distribution(p: np.ndarray, n: int) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (n,):
        raise ValidationError(f"distribution must have {n} entries")
    if np.any(p < -1e-14) or abs(p.sum() - 1.0) > 1e-10:
        raise ValidationError("expected a nonnegative vector summing to 1")
    return p


def evolve(w: WalkOperator, p0: np.ndarray, t: int) -> np.ndarray:
    """``W^t p0`` by repeated application, clamping round-off negatives."""
    p = _check_distribution(p0, w.matrix.shape[0]).copy()
    if t < 0:
        raise ValidationError("t must be nonnegative")
    for _ in range(t):
        p = w.matrix @ p
        p[(p < 0) & (p >= -1e-14)] = 0.0
    return p


# --------------------------------------------------------------------------
# Mixing and expansion checks on regular graphs


def _require_unweighted_regular(g: Graph) -> int:
    if not is_regular(g) or g.m == 0 or not np.all(g.w == 1.0):
        raise ValidationError("expected an unweighted d-regular graph")
    return int(round(g.degree[0]))


def adjacency_expansion(g: Graph) -> float:
    """``max(|mu_2|, |mu_n|)`` of the adjacency spectrum."""
    mu = np.sort(np.linalg.eigvalsh(g.adjacency()))[::-1]
    return float(max(abs(mu[1]), abs(mu[-1])))


@dataclass(frozen=True)
class MixingProfile:
    t: np.ndarray
    l1_dist: np.ndarray
    bound: np.ndarray
    alpha: float
    lazy: bool


def mixing_bound_check(g: Graph, p0: np.ndarray, t_max: int, lazy: bool = False) -> MixingProfile:
    """Check ``||W^t p - u||_1 <= sqrt(n) alpha^t`` for ``t = 0..t_max``.

    With ``lazy=False`` the walk is ``A/d`` and ``alpha = max(|mu_2|,|mu_n|)/d``.
    With ``lazy=True`` the walk is ``(I + A/d)/2`` and ``alpha`` is the
    second-largest eigenvalue magnitude of that operator.
    """
    d = _require_unweighted_regular(g)
    n = g.n
    if lazy:
        mu = np.sort(np.linalg.eigvalsh(g.adjacency()))[::-1] / d
        alpha = float(np.max(np.abs((1.0 + mu[1:]) / 2.0)))
    else:
        alpha = adjacency_expansion(g) / d
    w = walk_matrix(g, lazy)
    p = _check_distribution(p0, n).copy()
    u = np.full(n, 1.0 / n)
    ts = np.arange(t_max + 1)
    dist = np.empty(t_max + 1)
    for t in ts:
        dist[t] = np.abs(p - u).sum()
        p = w.matrix @ p
    bound = np.sqrt(n) * alpha ** ts
    bad = np.flatnonzero(dist > bound + 1e-12)
    if len(bad):
        t = int(bad[0])
        raise InvariantViolation(f"mixing bound fails at t={t}: {dist[t]} > {bound[t]}")
    return MixingProfile(ts, dist, bound, alpha, lazy)


def expander_mixing_check(g: Graph, trials: int = 100, seed: int = 0) -> float:
    """Largest ``|E(S,T) - d|S||T|/n| / (lam sqrt(|S||T|))`` over random disjoint pairs."""
    d = _require_unweighted_regular(g)
    n = g.n
    if n < 2:
        raise ValidationError("need at least two vertices")
    lam = adjacency_expansion(g)
    a = g.adjacency()
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        perm = rng.permutation(n)
        ks = int(rng.integers(1, n))
        kt = int(rng.integers(1, n - ks + 1))
        s, t = perm[:ks], perm[ks:ks + kt]
        e_st = a[np.ix_(s, t)].sum()
        lhs = abs(e_st - d * ks * kt / n)
        rhs = lam * np.sqrt(ks * kt)
        ratio = lhs / rhs if rhs > 0 else (0.0 if lhs <= 1e-12 else np.inf)
        worst = max(worst, ratio)
    return float(worst)


# --------------------------------------------------------------------------
# Heat kernel and PageRank


def heat_kernel(g: Graph, t: float) -> np.ndarray:
    """``exp(-t L)`` for the combinatorial Laplacian."""
    if t < 0:
        raise ValidationError("t must be nonnegative")
    vals, vecs = sym_eig(laplacian(g, "combinatorial"))
    return (vecs * np.exp(-t * vals)[None, :]) @ vecs.T


def _ppr_walk(g: Graph, alpha: float, lazy: bool, rho: float | None) -> np.ndarray:
    if not 0.0 < alpha <= 1.0:
        raise InfeasibleParameterError("alpha must lie in (0, 1]")
    if rho is None:
        return walk_matrix(g, lazy).matrix
    if not 0.0 < rho <= 1.0:
        raise InfeasibleParameterError("rho must lie in (0, 1]")
    return (1.0 - rho) * np.eye(g.n) + rho * walk_matrix(g, False).matrix


def pagerank_dense(
    g: Graph, alpha: float, s: np.ndarray, lazy: bool = True, rho: float | None = None
) -> np.ndarray:
    """Solve ``(I - (1-alpha) W) pi = alpha s`` directly.

    ``W`` is the lazy walk by default, ``A D^-1`` with ``lazy=False``, or
    ``(1-rho) I + rho A D^-1`` when ``rho`` is given.
    """
    w = _ppr_walk(g, alpha, lazy, rho)
    s = np.asarray(s, dtype=float)
    if s.shape != (g.n,):
        raise ValidationError(f"seed must have {g.n} entries")
    return np.linalg.solve(np.eye(g.n) - (1.0 - alpha) * w, alpha * s)


def ppr_operator(g: Graph, alpha: float, lazy: bool = True, rho: float | None = None) -> np.ndarray:
    """Dense matrix ``alpha (I - (1-alpha) W)^-1`` so that ``pr_alpha(s) = P @ s``."""
    w = _ppr_walk(g, alpha, lazy, rho)
    return alpha * np.linalg.inv(np.eye(g.n) - (1.0 - alpha) * w)


# --------------------------------------------------------------------------
# NCUT as walk escape probabilities


@dataclass(frozen=True)
class NcutReport:
    ncut: float
    p_leave_s: float
    p_leave_sbar: float


def ncut_walk_check(g: Graph, s) -> NcutReport:
    """Compare NCUT with ``P[Sbar | S] + P[S | Sbar]`` for one stationary step."""
    require_connected(g)
    mask = as_mask(g, s)
    score = partition_quality(g, mask)
    pi = stationary(g)
    w = walk_matrix(g).matrix
    # w[j, i] = P(next = j | now = i)
    flow = w * pi[None, :]
    p_s = pi[mask].sum()
    leave_s = flow[np.ix_(~mask, mask)].sum() / p_s
    leave_sbar = flow[np.ix_(mask, ~mask)].sum() / (1.0 - p_s)
    if abs(score.ncut - (leave_s + leave_sbar)) > NCUT_TOL:
        raise InvariantViolation(f"NCUT {score.ncut} != {leave_s + leave_sbar}")
    return NcutReport(score.ncut, float(leave_s), float(leave_sbar))


# --------------------------------------------------------------------------
# Diffusions as regularized SDP optima


@dataclass(frozen=True)
class DensityMatrix:
    """Trace-one PSD kernel deflated against ``u = D^1/2 1 / ||D^1/2 1||``.

    ``eta`` is the regularization weight for which ``X`` is the optimum of
    ``L . X + (1/eta) G(X)`` with ``L`` the normalized Laplacian.
    """

    X: np.ndarray
    eta: float
    regularizer: str
    kind: str
    param: dict
    p: float | None = None


def _normalized_system(g: Graph):
    require_connected(g)
    require_positive_degrees(g)
    vals, vecs = sym_eig(laplacian(g, "normalized_symmetric"))
    u = np.sqrt(g.degree)
    u = u / np.linalg.norm(u)
    # pin the first column exactly to the trivial direction
    rest = vecs[:, 1:] - np.outer(u, u @ vecs[:, 1:])
    rest, _ = np.linalg.qr(rest)
    return vals, u, rest


def diffusion_kernel(g: Graph, kind: str, **params) -> DensityMatrix:
    """Heat (``t``), PageRank (``gamma``) or lazy-power (``alpha``, ``t``) density matrix.

    heat: ``exp(-t Lsym)`` deflated and trace-normalized, entropy regularizer, ``eta = t``.
    pagerank: ``D^-1/2 R_gamma D^1/2 = gamma (gamma I + (1-gamma) Lsym)^-1``,
    logdet regularizer, ``eta = sum_i 1/(lam_i + gamma/(1-gamma))``.
    lazy_power: ``(I - (1-alpha) Lsym)^t``, p-norm regularizer with ``p = 1 + 1/t``.
    """
    vals, u, q = _normalized_system(g)
    lam = vals[1:]
    p = None
    if kind == "heat":
        t = float(params.get("t", 1.0))
        if t < 0:
            raise InfeasibleParameterError("heat time t must be nonnegative")
        w = np.exp(-t * (lam - lam[0]))
        eta = t
    elif kind == "pagerank":
        gamma = float(params.get("gamma", 0.2))
        if not 0.0 < gamma <= 1.0:
            raise InfeasibleParameterError("gamma must lie in (0, 1]")
        w = gamma / (gamma + (1.0 - gamma) * lam)
        eta = np.inf if gamma == 1.0 else float(np.sum(1.0 / (lam + gamma / (1.0 - gamma))))
    elif kind == "lazy_power":
        alpha = float(params.get("alpha", 0.5))
        t = int(params.get("t", 1))
        if not 0.5 <= alpha < 1.0:
            raise InfeasibleParameterError("lazy_power needs alpha in [1/2, 1) to stay PSD")
        if t < 1:
            raise InfeasibleParameterError("lazy_power needs t >= 1")
        base = np.clip(1.0 - (1.0 - alpha) * lam, 0.0, None)
        w = base ** t
        z = w.sum()
        eta = float(((1.0 - alpha) ** t / z) ** (1.0 / t))
        p = 1.0 + 1.0 / t
    else:
        raise ValidationError(f"unknown diffusion kind {kind!r}")
    w = w / w.sum()
    x = (q * w[None, :]) @ q.T
    x = (x + x.T) / 2.0
    dm = DensityMatrix(x, eta, REGULARIZER_FOR[kind], kind, dict(params), p)
    _check_density(dm, u)
    return dm


def _check_density(dm: DensityMatrix, u: np.ndarray) -> None:
    x = dm.X
    if abs(np.trace(x) - 1.0) > SDP_TOL:
        raise InvariantViolation("density matrix trace is not one")
    if np.linalg.eigvalsh(x)[0] < -SDP_TOL:
        raise InvariantViolation("density matrix is not PSD")
    if abs(u @ x @ u) > SDP_TOL:
        raise InvariantViolation("density matrix not orthogonal to the trivial direction")


def _regularizer_value(sig: np.ndarray, regularizer: str, p: float | None) -> float:
    if regularizer == "entropy":
        pos = sig[sig > 0]
        return float(np.sum(pos * np.log(pos)))
    if regularizer == "logdet":
        if np.any(sig <= 0):
            return np.inf
        return float(-np.sum(np.log(sig)))
    if regularizer == "pnorm":
        return float(np.sum(np.clip(sig, 0.0, None) ** p) / p)
    raise ValidationError(f"unknown regularizer {regularizer!r}")


def sdp_objective(g: Graph, dm: DensityMatrix, x: np.ndarray) -> float:
    """``Lsym . X + (1/eta) G(X)`` with ``G`` evaluated on the trivial-orthogonal block."""
    _, _, q = _normalized_system(g)
    lsym = laplacian(g, "normalized_symmetric")
    y = q.T @ x @ q
    sig = np.linalg.eigvalsh((y + y.T) / 2.0)
    sig[np.abs(sig) < 1e-15] = 0.0
    reg = _regularizer_value(sig, dm.regularizer, dm.p)
    lin = float(np.sum(lsym * x))
    if np.isinf(dm.eta):
        return lin
    return lin + reg / dm.eta


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto ``{x >= 0, sum x = 1}``."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    k = np.arange(1, len(v) + 1)
    rho = np.flatnonzero(u - css / k > 0)[-1]
    return np.maximum(v - css[rho] / (rho + 1), 0.0)


@dataclass(frozen=True)
class OptimalityReport:
    ok: bool
    margin: float
    objective: float
    trials: int


def verify_regularized_optimum(
    g: Graph, dm: DensityMatrix, trials: int = 200, seed: int = 0, regularizer: str | None = None
) -> OptimalityReport:
    """Compare ``F(X*)`` against random feasible rank-2 perturbations.

    Each candidate moves ``X*`` by ``step (a a^T - b b^T)`` inside the
    trivial-orthogonal subspace, then projects its spectrum back onto the
    simplex so it stays trace one and PSD.  ``margin`` is the smallest
    ``F(candidate) - F(X*)`` seen.
    """
    if regularizer is not None and regularizer != dm.regularizer:
        raise ValidationError(f"{dm.kind} kernel pairs with {dm.regularizer}, not {regularizer}")
    if REGULARIZER_FOR[dm.kind] != dm.regularizer:
        raise ValidationError("density matrix has a mismatched regularizer tag")
    _, _, q = _normalized_system(g)
    base = sdp_objective(g, dm, dm.X)
    y0 = q.T @ dm.X @ q
    k = y0.shape[0]
    rng = np.random.default_rng(seed)
    margin = np.inf
    for i in range(trials):
        step = SDP_STEPS[i % len(SDP_STEPS)]
        a = rng.standard_normal(k)
        b = rng.standard_normal(k)
        a /= np.linalg.norm(a)
        b /= np.linalg.norm(b)
        y = y0 + step * (np.outer(a, a) - np.outer(b, b))
        sig, vecs = np.linalg.eigh((y + y.T) / 2.0)
        sig = project_simplex(sig)
        cand = q @ ((vecs * sig[None, :]) @ vecs.T) @ q.T
        margin = min(margin, sdp_objective(g, dm, cand) - base)
    return OptimalityReport(bool(margin >= -SDP_TOL), float(margin), base, trials)
