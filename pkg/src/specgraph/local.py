"""Strongly local push methods, the locally biased spectral program and their checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ._backend import kernels
from .diffusion import pagerank_dense
from .errors import InfeasibleParameterError, InvariantViolation, ValidationError
from .graph import Graph, NodeSet, as_mask, build_graph, laplacian, require_connected
from .spectra import SweepResult, prefix_conductances, sym_eig

SEED_TOL = 1e-10
MOV_KAPPA_TOL = 1e-8
MOV_MAX_STEPS = 200
MOV_GAMMA_MIN = -1e6
MOV_GAP = 1e-9
GM_TOL = 1e-10
L1_SLACK = 1e-13


# --------------------------------------------------------------------------
# Seed vectors


@dataclass(frozen=True)
class SeedVector:
    """Seed with ``s^T D 1 = 0`` and ``s^T D s = 1``."""

    s: np.ndarray
    origin_set: NodeSet | None = None


def seed_vector(g: Graph, t) -> SeedVector:
    """Normalized indicator of ``T``: ``+c/vol(T)`` on ``T`` and ``-c/vol(Tbar)`` off it."""
    mask = as_mask(g, t)
    d = g.degree
    vol_t = d[mask].sum()
    vol_tbar = d[~mask].sum()
    if vol_t <= 0 or vol_tbar <= 0:
        raise ValidationError("both sides of the seed set need positive volume")
    c = np.sqrt(vol_t * vol_tbar / g.volume)
    s = np.where(mask, c / vol_t, -c / vol_tbar)
    if abs(s @ d) > SEED_TOL or abs(s @ (d * s) - 1.0) > SEED_TOL:
        raise InvariantViolation("seed vector normalization failed")
    return SeedVector(s, NodeSet(int(i) for i in np.flatnonzero(mask)))


def correlation(g: Graph, a: SeedVector | np.ndarray, b: SeedVector | np.ndarray) -> float:
    """``(a^T D b)^2``, the squared D-weighted correlation of two seed vectors."""
    a = a.s if isinstance(a, SeedVector) else np.asarray(a, dtype=float)
    b = b.s if isinstance(b, SeedVector) else np.asarray(b, dtype=float)
    return float((a @ (g.degree * b)) ** 2)


# --------------------------------------------------------------------------
# Push


@dataclass
class PushState:
    """Approximation ``p`` and residual ``r`` of a push run.

    For ``kind='ppr'`` the invariant is ``p + pr_alpha(r) = pr_alpha(seed)``.
    For ``kind='l1'`` ``p`` holds ``x`` and ``r = (1-beta) v - (I - beta A D^-1) x``.
    """

    p: np.ndarray
    r: np.ndarray
    alpha: float | None
    eps: float | None
    rho: float
    push_count: int = 0
    work: float = 0.0
    kind: str = "ppr"
    beta: float | None = None
    tau: float | None = None
    seed: np.ndarray = field(default=None, repr=False)

    def support(self) -> np.ndarray:
        return np.flatnonzero(self.p > 0)

    def as_sparse(self) -> dict:
        return {
            "p": {int(i): float(self.p[i]) for i in np.flatnonzero(self.p)},
            "r": {int(i): float(self.r[i]) for i in np.flatnonzero(self.r)},
        }


def _seed_distribution(g: Graph, seed) -> np.ndarray:
    if isinstance(seed, (int, np.integer)):
        if not 0 <= seed < g.n:
            raise ValidationError(f"seed vertex {seed} out of range")
        s = np.zeros(g.n)
        s[int(seed)] = 1.0
        return s
    if isinstance(seed, Mapping):
        s = np.zeros(g.n)
        for k, val in seed.items():
            if not 0 <= int(k) < g.n:
                raise ValidationError(f"seed vertex {k} out of range")
            s[int(k)] += float(val)
    else:
        s = np.array(seed, dtype=float)
        if s.shape != (g.n,):
            raise ValidationError(f"seed must have {g.n} entries")
    if np.any(s < 0) or abs(s.sum() - 1.0) > 1e-12:
        raise ValidationError("seed must be a nonnegative distribution")
    return s


def _initial_queue(over: np.ndarray, n: int):
    queue = np.zeros(n, dtype=np.int64)
    idx = np.flatnonzero(over)
    queue[: len(idx)] = idx
    inq = np.zeros(n, dtype=np.uint8)
    inq[idx] = 1
    state = np.array([0, len(idx)], dtype=np.int64)
    return queue, state, inq


def support_volume_bound(alpha: float, eps: float, rho: float = 0.5) -> float:
    """Volume bound on ``supp(p)`` at termination: ``1/((1-alpha)(1-rho) eps)``.

    Each pushed vertex keeps at least ``(1-alpha)(1-rho) eps d_u`` residual,
    and total residual is at most one.  Infinite for ``rho = 1``.
    """
    if rho >= 1.0:
        return np.inf
    return 1.0 / ((1.0 - alpha) * (1.0 - rho) * eps)


def push_ppr(
    g: Graph,
    seed,
    alpha: float,
    eps: float,
    rho: float = 0.5,
    max_pushes: int | None = None,
    checkpoint_every: int | None = None,
    callback: Callable[[PushState], None] | None = None,
) -> PushState:
    """Approximate personalized PageRank by residual pushes.

    A push at ``u`` moves ``alpha r_u`` into ``p_u``, keeps ``(1-alpha)(1-rho) r_u``
    at ``u`` and spreads ``(1-alpha) rho r_u`` over the neighbors in proportion to
    edge weight.  ``rho = 1/2`` is the lazy walk.  Vertices with
    ``r_u >= eps d_u`` are processed FIFO, initial ties by vertex id.

    If ``checkpoint_every`` is set, ``callback`` receives the state after each
    block of that many pushes.
    """
    if not 0.0 < alpha < 1.0:
        raise InfeasibleParameterError("alpha must lie in (0, 1)")
    if eps <= 0:
        raise InfeasibleParameterError("eps must be positive")
    if not 0.0 < rho <= 1.0:
        raise InfeasibleParameterError("rho must lie in (0, 1]")
    if np.any(g.degree <= 0):
        raise ValidationError("push needs every vertex to have positive degree")
    s = _seed_distribution(g, seed)
    p = np.zeros(g.n)
    r = s.copy()
    queue, state, inq = _initial_queue(r >= eps * g.degree, g.n)
    st = PushState(p, r, alpha, eps, rho, seed=s)
    cap = int(max_pushes) if max_pushes is not None else 2**62
    block = int(checkpoint_every) if checkpoint_every else cap
    while state[1] > 0 and st.push_count < cap:
        step = min(block, cap - st.push_count)
        pushes, work = kernels.push_ppr_run(
            g.indptr, g.indices, g.weights, g.degree, p, r, queue, state, inq,
            float(alpha), float(eps), float(rho), step,
        )
        st.push_count += int(pushes)
        st.work += float(work)
        if callback is not None:
            callback(st)
        if pushes == 0:
            break
    return st


def push_invariant_gap(g: Graph, st: PushState) -> float:
    """``max |p + pr_alpha(r) - pr_alpha(seed)|`` against the dense solve."""
    lhs = st.p + pagerank_dense(g, st.alpha, st.r, rho=st.rho)
    rhs = pagerank_dense(g, st.alpha, st.seed, rho=st.rho)
    return float(np.max(np.abs(lhs - rhs)))


def push_sweep(g: Graph, st: PushState) -> SweepResult:
    """Sweep over ``p_u / d_u`` descending, restricted to ``supp(p)``."""
    if not np.any(st.p > 0):
        raise ValidationError("push vector is zero; nothing to sweep")
    q = st.p / g.degree
    ids = np.arange(g.n)
    supp = np.flatnonzero(st.p > 0)
    order_s = supp[np.lexsort((supp, -q[supp]))]
    rest = ids[st.p <= 0]
    order = np.concatenate([order_s, rest]).astype(np.int64)
    k = min(len(order_s), g.n - 1)
    phi, cut, vol = prefix_conductances(g, order[:k])
    best = int(np.argmin(phi))
    prefix = order[: best + 1]
    if vol[best] <= g.volume - vol[best]:
        best_set = NodeSet(int(i) for i in prefix)
    else:
        best_set = NodeSet(int(i) for i in order[best + 1:])
    return SweepResult(order, best + 1, best_set, float(phi[best]), phi, cut, vol)


# --------------------------------------------------------------------------
# l1-regularized push


def push_l1(
    g: Graph,
    seed_set,
    beta: float,
    tau: float,
    rho: float = 1.0,
    max_pushes: int | None = None,
    checkpoint_every: int | None = None,
    callback: Callable[[PushState], None] | None = None,
    slack: float = L1_SLACK,
) -> PushState:
    """Push for the sparsity-regularized cut problem.

    Starts from ``x = 0`` and ``r = (1-beta) v`` with ``v = d_S / vol(S)``.
    While some ``r_j > tau d_j``: ``m = r_j - tau d_j rho``, ``x_j += m``,
    ``r_j = tau d_j rho`` and each neighbor gains ``beta m w / d_j``.

    With ``rho = 1`` a pushed vertex sits exactly at its threshold, so the
    exact process only converges in the limit.  ``slack`` is the absolute
    excess over ``tau d_j`` that still counts as converged.
    """
    if not 0.0 < beta < 1.0:
        raise InfeasibleParameterError("beta must lie in (0, 1)")
    if tau <= 0:
        raise InfeasibleParameterError("tau must be positive")
    if not 0.0 < rho <= 1.0:
        raise InfeasibleParameterError("rho must lie in (0, 1]")
    mask = as_mask(g, seed_set, proper=False)
    if not mask.any():
        raise ValidationError("seed set is empty")
    d = g.degree
    v = np.where(mask, d, 0.0) / d[mask].sum()
    x = np.zeros(g.n)
    r = (1.0 - beta) * v
    if slack < 0:
        raise InfeasibleParameterError("slack must be nonnegative")
    queue, state, inq = _initial_queue(r > tau * d + slack, g.n)
    st = PushState(x, r, None, None, rho, kind="l1", beta=beta, tau=tau, seed=v)
    cap = int(max_pushes) if max_pushes is not None else 2**62
    block = int(checkpoint_every) if checkpoint_every else cap
    while state[1] > 0 and st.push_count < cap:
        step = min(block, cap - st.push_count)
        pushes, work = kernels.push_l1_run(
            g.indptr, g.indices, g.weights, d, x, r, queue, state, inq,
            float(beta), float(tau), float(rho), float(slack), step,
        )
        st.push_count += int(pushes)
        st.work += float(work)
        if callback is not None:
            callback(st)
        if pushes == 0:
            break
    return st


def l1_residual_gap(g: Graph, st: PushState) -> float:
    """``max |r - ((1-beta) v - (I - beta A D^-1) x)|``."""
    x = st.p
    expected = (1.0 - st.beta) * st.seed - (x - st.beta * g.adj_matvec(x / g.degree))
    return float(np.max(np.abs(st.r - expected)))


@dataclass(frozen=True)
class GmReport:
    ok: bool
    max_violation: float
    violations: dict


def gm_optimality_check(g: Graph, st: PushState, tol: float = GM_TOL) -> GmReport:
    """Optimality conditions of the l1-regularized problem at a ``push_l1`` output.

    Checks ``x >= 0``, ``0 <= r <= tau d``, ``x^T (tau d - r) = 0`` and the
    residual identity.  Conditions are returned, not raised; with
    ``rho < 1`` complementary slackness is expected to fail.
    """
    if st.kind != "l1":
        raise ValidationError("gm_optimality_check needs a push_l1 state")
    d = g.degree
    x, r = st.p, st.r
    viol = {
        "x_nonnegative": float(max(0.0, -x.min())),
        "r_bounds": float(max(0.0, -r.min(), np.max(r - st.tau * d))),
        "complementary_slackness": float(abs(x @ (st.tau * d - r))),
        "residual_identity": l1_residual_gap(g, st),
    }
    worst = max(viol.values())
    return GmReport(bool(worst <= tol), worst, viol)


def l1_dense_limit(g: Graph, seed_set, beta: float) -> np.ndarray:
    """``tau -> 0`` limit ``x = (1-beta)(I - beta A D^-1)^-1 v``."""
    mask = as_mask(g, seed_set, proper=False)
    d = g.degree
    v = np.where(mask, d, 0.0) / d[mask].sum()
    m = np.eye(g.n) - beta * g.adjacency() / d[None, :]
    return (1.0 - beta) * np.linalg.solve(m, v)


# --------------------------------------------------------------------------
# Locally biased spectral program


@dataclass(frozen=True)
class MovSolution:
    x: np.ndarray
    gamma: float
    kappa: float
    c: float
    correlation_achieved: float
    constraint_active: bool
    steps: int


class _Pencil:
    """Generalized eigenpairs of ``(L, D)``: ``L v_i = lam_i D v_i``, ``v_i^T D v_j = delta_ij``."""

    def __init__(self, g: Graph):
        require_connected(g)
        vals, phi = sym_eig(laplacian(g, "normalized_symmetric"))
        sq = np.sqrt(g.degree)
        u = sq / np.linalg.norm(sq)
        phi[:, 0] = u
        rest = phi[:, 1:] - np.outer(u, u @ phi[:, 1:])
        phi[:, 1:] = np.linalg.qr(rest)[0]
        self.values = vals
        self.vectors = phi / sq[:, None]
        self.degree = g.degree

    def coefficients(self, s: np.ndarray) -> np.ndarray:
        return self.vectors.T @ (self.degree * s)


def _mov_terms(lam, c2, gamma):
    inv = 1.0 / (lam - gamma)
    num = np.sum(c2 * inv)
    den = np.sum(c2 * inv * inv)
    return num * num / den


def mov_solve(
    g: Graph,
    seed: SeedVector | np.ndarray,
    kappa: float,
    tol: float = MOV_KAPPA_TOL,
    max_steps: int = MOV_MAX_STEPS,
) -> MovSolution:
    """Locally biased spectral vector ``x = c (L - gamma D)^+ D s``.

    ``gamma`` is found by bisection so that ``(x^T D s)^2 = kappa``.  When the
    Fiedler direction already meets the constraint, returns it with
    ``constraint_active=False`` and ``gamma = lambda_2``.
    """
    s = seed.s if isinstance(seed, SeedVector) else np.asarray(seed, dtype=float)
    if not 0.0 <= kappa < 1.0:
        raise InfeasibleParameterError("kappa must lie in [0, 1)")
    pen = _Pencil(g)
    d = g.degree
    if abs(s @ d) > 1e-8 or abs(s @ (d * s) - 1.0) > 1e-8:
        raise ValidationError("seed must satisfy s^T D 1 = 0 and s^T D s = 1")
    coef = pen.coefficients(s)
    lam = pen.values[1:]
    c = coef[1:]
    vecs = pen.vectors[:, 1:]
    lam2 = lam[0]
    top = lam <= lam2 + MOV_GAP
    c2 = c * c
    limit = float(c2[top].sum())
    if limit <= 1e-20:
        raise ValidationError("seed is D-orthogonal to the Fiedler eigenspace")

    if kappa <= limit:
        x = vecs[:, top] @ c[top]
        norm = np.sqrt(x @ (d * x))
        x = x / norm
        corr = float((x @ (d * s)) ** 2)
        return MovSolution(x, float(lam2), kappa, 1.0 / norm, corr, False, 0)

    seen: list[tuple[float, float]] = []

    def corr_at(gamma):
        val = _mov_terms(lam, c2, gamma)
        seen.append((gamma, val))
        return val

    hi = lam2 - MOV_GAP
    lo = MOV_GAMMA_MIN
    while corr_at(lo) < kappa:
        lo *= 2.0
        if lo < -1e300:
            raise InvariantViolation("could not bracket the correlation target")
    steps = 0
    gamma = lo
    val = seen[-1][1]
    while steps < max_steps:
        gamma = 0.5 * (lo + hi)
        val = corr_at(gamma)
        steps += 1
        if abs(val - kappa) <= tol:
            break
        if val > kappa:
            lo = gamma
        else:
            hi = gamma
    ordered = sorted(seen)
    cors = np.array([v for _, v in ordered])
    if np.any(np.diff(cors) > 1e-12):
        raise InvariantViolation("correlation is not monotone in gamma")
    y = vecs @ (c / (lam - gamma))
    norm = np.sqrt(y @ (d * y))
    sign = 1.0 if y @ (d * s) >= 0 else -1.0
    x = sign * y / norm
    corr = float((x @ (d * s)) ** 2)
    return MovSolution(x, float(gamma), kappa, sign / norm, corr, True, steps)


def mov_residual(g: Graph, sol: MovSolution, seed: SeedVector | np.ndarray) -> float:
    """``||P ((L - gamma D) x - c D s)||`` with ``P`` the projector onto ``1``-perp.

    For an inactive constraint ``x`` is a Fiedler vector and the multiplier is zero.
    """
    s = seed.s if isinstance(seed, SeedVector) else np.asarray(seed, dtype=float)
    c = sol.c if sol.constraint_active else 0.0
    res = g.lap_matvec(sol.x) - sol.gamma * g.degree * sol.x - c * g.degree * s
    res -= res.mean()
    return float(np.linalg.norm(res))


def mov_ppr_vector(g: Graph, seed: SeedVector | np.ndarray, gamma: float) -> np.ndarray:
    """For ``gamma < 0``, ``(L + |gamma| D)^-1 D s`` built from non-lazy PageRank.

    Uses ``|gamma| = a/(1-a)`` so PageRank with teleport ``a`` on seed ``D s``
    equals ``D`` times the solve.  The seed is split into its positive and
    negative parts since PageRank takes distributions.  D-normalized.
    """
    if gamma >= 0:
        raise ValidationError("the PageRank form needs gamma < 0")
    s = seed.s if isinstance(seed, SeedVector) else np.asarray(seed, dtype=float)
    a = -gamma / (1.0 - gamma)
    ds = g.degree * s
    pos, neg = np.clip(ds, 0, None), np.clip(-ds, 0, None)
    pi = np.zeros(g.n)
    for part, sign in ((pos, 1.0), (neg, -1.0)):
        total = part.sum()
        if total > 0:
            pi += sign * total * pagerank_dense(g, a, part / total, lazy=False)
    z = pi / g.degree
    return z / np.sqrt(z @ (g.degree * z))


# --------------------------------------------------------------------------
# Localized cut graph


@dataclass(frozen=True)
class LocalizedCutGraph:
    graph: Graph
    base: Graph = field(repr=False)
    s_node: int
    t_node: int
    alpha: float
    seed_set: NodeSet


def localized_cut_graph(g: Graph, s, alpha: float) -> LocalizedCutGraph:
    """Augment ``g`` with a source tied to ``S`` and a sink tied to ``Sbar``.

    Source and sink edges carry weight ``alpha d_v``.  Zero weights are
    omitted, so ``alpha = 0`` leaves both extra vertices isolated.
    """
    if alpha < 0:
        raise InfeasibleParameterError("alpha must be nonnegative")
    mask = as_mask(g, s)
    n = g.n
    edges = list(zip(g.u.tolist(), g.v.tolist(), g.w.tolist()))
    if alpha > 0:
        for v in range(n):
            end = n if mask[v] else n + 1
            edges.append((v, end, alpha * g.degree[v]))
    aug = build_graph(n + 2, edges)
    return LocalizedCutGraph(aug, g, n, n + 1, float(alpha), NodeSet(int(i) for i in np.flatnonzero(mask)))


@dataclass(frozen=True)
class PrCutReport:
    ok: bool
    max_diff: float
    z: np.ndarray
    x_g: np.ndarray


def pr_cut_equivalence_check(g: Graph, s, alpha: float, tol: float = 1e-8) -> PrCutReport:
    """Compare the PageRank system with the 2-norm cut on the localized cut graph.

    Solves ``(alpha D + L) z = alpha d_S / vol(S)``, then minimizes the
    augmented quadratic form with ``x_s = 1`` and ``x_t = 0``; the restriction
    of that minimizer to ``G`` must equal ``vol(S) z``.
    """
    if alpha <= 0:
        raise InfeasibleParameterError("alpha must be positive for the equivalence")
    lcg = localized_cut_graph(g, s, alpha)
    mask = as_mask(g, s)
    d = g.degree
    vol_s = d[mask].sum()
    rhs = alpha * np.where(mask, d, 0.0) / vol_s
    z = np.linalg.solve(alpha * np.diag(d) + laplacian(g), rhs)
    la = laplacian(lcg.graph)
    inner = np.arange(g.n)
    fixed = np.array([lcg.s_node, lcg.t_node])
    x_fixed = np.array([1.0, 0.0])
    x_g = np.linalg.solve(la[np.ix_(inner, inner)], -la[np.ix_(inner, fixed)] @ x_fixed)
    diff = float(np.max(np.abs(x_g - vol_s * z)))
    return PrCutReport(bool(diff <= tol), diff, z, x_g)
