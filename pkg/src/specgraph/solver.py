"""Laplacian solves (dense, CG, sparsifier-preconditioned CG) and graph label propagation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .errors import DisconnectedGraphError, ValidationError
from .graph import Graph, connected_components, laplacian, require_connected, require_positive_degrees
from .resistance import lap_pinv

ORACLE_MAX_N = 2048
SSL_METHODS = ("joachims", "zgl", "zhou")


@dataclass(frozen=True)
class SolveReport:
    x: np.ndarray
    iterations: int
    rel_error_L: float
    eps_requested: float
    converged: bool = True
    method: str = "dense"
    residual_norm: float = 0.0


def _project(b: np.ndarray) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    return b - b.mean()


def _check_rhs(g: Graph, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.shape != (g.n,):
        raise ValidationError(f"right-hand side must have {g.n} entries")
    return _project(b)


def l_norm(g: Graph, z: np.ndarray) -> float:
    """``sqrt(z^T L z)``."""
    return float(np.sqrt(max(z @ g.lap_matvec(z), 0.0)))


def _oracle(g: Graph, b: np.ndarray):
    if g.n > ORACLE_MAX_N:
        return None
    return lap_pinv(g).matrix @ b


def _rel_error(g: Graph, x: np.ndarray, exact: np.ndarray | None, bound: float) -> float:
    if exact is None:
        return bound
    denom = l_norm(g, exact)
    if denom == 0.0:
        return l_norm(g, x)
    return l_norm(g, x - exact) / denom


def solve_dense(g: Graph, b) -> SolveReport:
    """``x = L^+ b`` after projecting ``b`` onto ``1``-perp."""
    require_connected(g)
    b = _check_rhs(g, b)
    x = _project(lap_pinv(g).matrix @ b)
    res = float(np.linalg.norm(g.lap_matvec(x) - b))
    return SolveReport(x, 0, 0.0, 0.0, True, "dense", res)


def _spectral_bounds(g: Graph) -> tuple[float, float]:
    vals = np.linalg.eigvalsh(laplacian(g))
    return float(vals[1]), float(vals[-1])


def _cg(g, b, eps, max_iter, apply_precond, callback, method):
    require_connected(g)
    b = _check_rhs(g, b)
    if eps <= 0:
        raise ValidationError("eps must be positive")
    n = g.n
    max_iter = 10 * n if max_iter is None else int(max_iter)
    exact = _oracle(g, b)
    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return SolveReport(np.zeros(n), 0, 0.0, eps, True, method, 0.0)
    lam2, lam_max = _spectral_bounds(g)
    scale = np.sqrt(lam_max / lam2)
    target = eps * bnorm / scale
    x = np.zeros(n)
    r = b.copy()
    z = apply_precond(r)
    p = z.copy()
    rz = r @ z
    it = 0
    rnorm = bnorm
    while rnorm > target and it < max_iter:
        lp = g.lap_matvec(p)
        step = rz / (p @ lp)
        x = _project(x + step * p)
        r = _project(r - step * lp)
        z = apply_precond(r)
        rz_new = r @ z
        p = _project(z + (rz_new / rz) * p)
        rz = rz_new
        it += 1
        rnorm = float(np.linalg.norm(r))
        if callback is not None:
            callback(it, x)
    converged = rnorm <= target
    rel = _rel_error(g, x, exact, rnorm / bnorm * scale)
    return SolveReport(x, it, rel, eps, bool(converged), method, rnorm)


def solve_cg(
    g: Graph,
    b,
    eps: float = 1e-8,
    max_iter: int | None = None,
    callback: Callable[[int, np.ndarray], None] | None = None,
) -> SolveReport:
    """Conjugate gradient on ``1``-perp.

    Stops when ``||r||_2 <= eps ||b|| sqrt(lam_2 / lam_max)``, which certifies
    ``||x - L^+ b||_L <= eps ||L^+ b||_L``.  ``callback(k, x)`` sees each iterate.
    """
    return _cg(g, b, eps, max_iter, lambda r: r, callback, "cg")


def preconditioner(h: Graph | np.ndarray):
    """Dense ``L_h^+`` application; a disconnected sketch is rejected."""
    if isinstance(h, Graph):
        if connected_components(h).max() > 0:
            raise DisconnectedGraphError(
                "preconditioner graph is disconnected; sample more edges (larger r)"
            )
        m = lap_pinv(h).matrix
    else:
        m = np.asarray(h, dtype=float)
    return lambda r: _project(m @ r)


def solve_pcg(
    g: Graph,
    b,
    eps: float = 1e-8,
    precond: Graph | np.ndarray | None = None,
    max_iter: int | None = None,
    callback: Callable[[int, np.ndarray], None] | None = None,
) -> SolveReport:
    """Preconditioned CG; ``precond`` is a sparsifier graph or a dense ``L_h^+``."""
    if precond is None:
        raise ValidationError("solve_pcg needs a preconditioner")
    if isinstance(precond, Graph) and precond.n != g.n:
        raise ValidationError("preconditioner must share the vertex set")
    return _cg(g, b, eps, max_iter, preconditioner(precond), callback, "pcg")


# --------------------------------------------------------------------------
# Semi-supervised learning


@dataclass(frozen=True)
class LabelSet:
    """Labeled vertices with classes ``0..num_classes-1``."""

    vertices: np.ndarray
    classes: np.ndarray
    num_classes: int

    def as_dict(self) -> dict:
        return {int(v): int(c) for v, c in zip(self.vertices, self.classes)}


def label_set(labels: Mapping[int, int], num_classes: int | None = None) -> LabelSet:
    if not labels:
        raise ValidationError("no labeled vertices")
    items = sorted((int(v), int(c)) for v, c in labels.items())
    verts = np.array([v for v, _ in items], dtype=np.int64)
    cls = np.array([c for _, c in items], dtype=np.int64)
    if np.any(cls < 0):
        raise ValidationError("class ids must be nonnegative")
    k = int(cls.max()) + 1 if num_classes is None else int(num_classes)
    missing = set(range(k)) - set(cls.tolist())
    if missing:
        raise ValidationError(f"classes without labeled vertices: {sorted(missing)}")
    if np.any(cls >= k):
        raise ValidationError("class id exceeds num_classes")
    return LabelSet(verts, cls, k)


def _labels(g: Graph, labels) -> LabelSet:
    ls = labels if isinstance(labels, LabelSet) else label_set(labels)
    if np.any(ls.vertices < 0) or np.any(ls.vertices >= g.n):
        raise ValidationError("labeled vertex out of range")
    return ls


def class_indicator(g: Graph, labels, class_j: int) -> np.ndarray:
    """``+1`` on vertices labeled ``class_j``, ``-1`` on other labeled vertices, ``0`` elsewhere."""
    ls = _labels(g, labels)
    if not 0 <= class_j < ls.num_classes:
        raise ValidationError(f"class {class_j} out of range")
    s = np.zeros(g.n)
    s[ls.vertices] = np.where(ls.classes == class_j, 1.0, -1.0)
    return s


def ssl_joachims(g: Graph, labels, class_j: int = 0) -> np.ndarray:
    """``(D_S + L)^-1 s`` with ``D_S = diag(|s|)``."""
    require_connected(g)
    s = class_indicator(g, labels, class_j)
    return np.linalg.solve(np.diag(np.abs(s)) + laplacian(g), s)


def ssl_zgl(g: Graph, labels, class_j: int = 0) -> np.ndarray:
    """Harmonic extension: ``L_UU f_U = -L_UL f_L`` with ``f_L = +-1``."""
    ls = _labels(g, labels)
    comp = connected_components(g)
    unlabeled_comps = set(comp.tolist()) - set(comp[ls.vertices].tolist())
    if unlabeled_comps:
        raise ValidationError("a connected component has no labeled vertex")
    s = class_indicator(g, ls, class_j)
    lab = np.zeros(g.n, dtype=bool)
    lab[ls.vertices] = True
    f = s.copy()
    if (~lab).any():
        lap = laplacian(g)
        uu = np.ix_(~lab, ~lab)
        ul = np.ix_(~lab, lab)
        f[~lab] = np.linalg.solve(lap[uu], -lap[ul] @ s[lab])
    return f


def _zhou_w(g: Graph) -> np.ndarray:
    require_positive_degrees(g)
    isq = 1.0 / np.sqrt(g.degree)
    return isq[:, None] * g.adjacency() * isq[None, :]


def _check_alpha(alpha: float) -> None:
    if not 0.0 < alpha < 1.0:
        raise ValidationError("alpha must lie in (0, 1)")


def ssl_zhou(g: Graph, labels, alpha: float = 0.9, class_j: int = 0) -> np.ndarray:
    """Closed form ``(1 - alpha)(I - alpha W~)^-1 s`` with ``W~ = D^-1/2 A D^-1/2``."""
    _check_alpha(alpha)
    s = class_indicator(g, labels, class_j)
    return (1.0 - alpha) * np.linalg.solve(np.eye(g.n) - alpha * _zhou_w(g), s)


def zhou_iterate(g: Graph, labels, alpha: float, steps: int, class_j: int = 0) -> np.ndarray:
    """``Y <- alpha W~ Y + (1 - alpha) s`` from ``Y = s``."""
    _check_alpha(alpha)
    s = class_indicator(g, labels, class_j)
    w = _zhou_w(g)
    y = s.copy()
    for _ in range(steps):
        y = alpha * (w @ y) + (1.0 - alpha) * s
    return y


def ssl_zhou_laplacian_form(g: Graph, labels, alpha: float = 0.9, class_j: int = 0) -> np.ndarray:
    """Same scores through ``(L + a D) D^-1/2 Y = a D^1/2 s`` with ``a = (1 - alpha)/alpha``."""
    _check_alpha(alpha)
    s = class_indicator(g, labels, class_j)
    a = (1.0 - alpha) / alpha
    sq = np.sqrt(g.degree)
    z = np.linalg.solve(laplacian(g) + a * np.diag(g.degree), a * sq * s)
    return sq * z


def ssl_predict(g: Graph, labels, method: str = "zgl", alpha: float = 0.9) -> tuple[np.ndarray, np.ndarray]:
    """One-vs-rest scores for every class and the argmax prediction."""
    ls = _labels(g, labels)
    if method == "joachims":
        cols = [ssl_joachims(g, ls, j) for j in range(ls.num_classes)]
    elif method == "zgl":
        cols = [ssl_zgl(g, ls, j) for j in range(ls.num_classes)]
    elif method == "zhou":
        cols = [ssl_zhou(g, ls, alpha, j) for j in range(ls.num_classes)]
    else:
        raise ValidationError(f"unknown SSL method {method!r}")
    scores = np.column_stack(cols)
    return scores, np.argmax(scores, axis=1)
