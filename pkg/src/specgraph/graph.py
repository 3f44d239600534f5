"""Weighted undirected simple graphs, generators, and cut objectives."""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateDegreeError,
    DisconnectedGraphError,
    DuplicateEdgeError,
    InfeasibleParameterError,
    NonPositiveWeightError,
    SelfLoopError,
    ValidationError,
    VertexRangeError,
)

LAPLACIAN_KINDS = ("combinatorial", "normalized_symmetric", "random_walk")
D_REGULAR_RETRY_CAP = 1000


class Graph:
    """Immutable weighted undirected simple graph on vertices ``0..n-1``.

    Edges are stored canonically (``u < v``, lexicographically sorted); the
    position of an edge in that order is its edge id.  Adjacency is kept in
    CSR form (``indptr``, ``indices``, ``weights``) so that neighbors of a
    vertex are a contiguous slice.
    """

    __slots__ = ("n", "u", "v", "w", "indptr", "indices", "weights", "degree")

    def __init__(self, n: int, u: np.ndarray, v: np.ndarray, w: np.ndarray):
        self.n = int(n)
        self.u = u
        self.v = v
        self.w = w
        heads = np.concatenate([u, v])
        tails = np.concatenate([v, u])
        ww = np.concatenate([w, w])
        order = np.lexsort((tails, heads))
        self.indices = tails[order]
        self.weights = ww[order]
        counts = np.bincount(heads, minlength=self.n)
        self.indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(counts, out=self.indptr[1:])
        self.degree = np.bincount(heads, weights=ww, minlength=self.n).astype(float)
        for arr in (self.u, self.v, self.w, self.indices, self.weights, self.indptr, self.degree):
            arr.setflags(write=False)

    @property
    def m(self) -> int:
        return len(self.u)

    @property
    def volume(self) -> float:
        return float(self.degree.sum())

    def neighbors(self, x: int) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.indptr[x], self.indptr[x + 1]
        return self.indices[lo:hi], self.weights[lo:hi]

    def edges(self) -> list[tuple[int, int, float]]:
        return [(int(a), int(b), float(c)) for a, b, c in zip(self.u, self.v, self.w)]

    def adjacency(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        a[self.u, self.v] = self.w
        a[self.v, self.u] = self.w
        return a

    def adj_matvec(self, x: np.ndarray) -> np.ndarray:
        rows = np.repeat(np.arange(self.n), np.diff(self.indptr))
        return np.bincount(rows, weights=self.weights * x[self.indices], minlength=self.n)

    def lap_matvec(self, x: np.ndarray) -> np.ndarray:
        return self.degree * x - self.adj_matvec(x)

    def scaled(self, factor: float) -> "Graph":
        if factor <= 0:
            raise NonPositiveWeightError("scale factor must be positive")
        return Graph(self.n, self.u, self.v, self.w * factor)

    def with_edge(self, a: int, b: int, w: float = 1.0) -> "Graph":
        return build_graph(self.n, self.edges() + [(a, b, w)])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.u, other.u)
            and np.array_equal(self.v, other.v)
            and np.array_equal(self.w, other.w)
        )

    def __hash__(self) -> int:
        return hash((self.n, self.u.tobytes(), self.v.tobytes(), self.w.tobytes()))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m}, vol={self.volume:g})"


def build_graph(n: int, edges: Iterable[Sequence[float]]) -> Graph:
    """Validate an edge sequence and build a :class:`Graph`.

    Each edge is ``(u, v)`` or ``(u, v, w)``; a missing weight means 1.
    """
    n = int(n)
    if n < 1:
        raise ValidationError("vertex count must be at least 1")
    us, vs, ws = [], [], []
    seen: set[tuple[int, int]] = set()
    for e in edges:
        if len(e) == 2:
            a, b = e
            w = 1.0
        else:
            a, b, w = e
        a, b, w = int(a), int(b), float(w)
        if not (0 <= a < n and 0 <= b < n):
            raise VertexRangeError(f"edge ({a}, {b}) has an endpoint outside 0..{n - 1}")
        if a == b:
            raise SelfLoopError(f"self-loop at vertex {a}")
        if not w > 0 or not np.isfinite(w):
            raise NonPositiveWeightError(f"edge ({a}, {b}) has weight {w}")
        key = (a, b) if a < b else (b, a)
        if key in seen:
            raise DuplicateEdgeError(f"duplicate edge {key}")
        seen.add(key)
        us.append(key[0])
        vs.append(key[1])
        ws.append(w)
    u = np.asarray(us, dtype=np.int64)
    v = np.asarray(vs, dtype=np.int64)
    w = np.asarray(ws, dtype=float)
    order = np.lexsort((v, u))
    return Graph(n, u[order], v[order], w[order])


class NodeSet(frozenset):
    """A set of vertex ids; the complement is taken relative to ``n``."""

    def mask(self, n: int) -> np.ndarray:
        m = np.zeros(n, dtype=bool)
        if self:
            idx = np.fromiter(self, dtype=np.int64)
            if idx.min() < 0 or idx.max() >= n:
                raise VertexRangeError("node set has ids outside the vertex range")
            m[idx] = True
        return m

    def complement(self, n: int) -> "NodeSet":
        return NodeSet(set(range(n)) - self)


def as_mask(g: Graph, s: Iterable[int] | np.ndarray, proper: bool = True) -> np.ndarray:
    """Boolean membership mask for ``s``; rejects empty/full sets when ``proper``."""
    arr = np.asarray(s) if not isinstance(s, (set, frozenset)) else None
    if arr is not None and arr.dtype == bool:
        if arr.shape != (g.n,):
            raise ValidationError("boolean mask must have one entry per vertex")
        mask = arr.copy()
    else:
        mask = NodeSet(int(x) for x in s).mask(g.n)
    if proper and (not mask.any() or mask.all()):
        raise ValidationError("node set must be a proper nonempty subset")
    return mask


# --------------------------------------------------------------------------
# Laplacians


def laplacian(g: Graph, kind: str = "combinatorial") -> np.ndarray:
    """Dense Laplacian of the requested kind.

    combinatorial ``D - A``; normalized_symmetric ``I - D^-1/2 A D^-1/2``;
    random_walk ``I - D^-1 A``.
    """
    a = g.adjacency()
    d = g.degree
    if kind == "combinatorial":
        return np.diag(d) - a
    if kind not in LAPLACIAN_KINDS:
        raise ValidationError(f"unknown Laplacian kind {kind!r}")
    if np.any(d <= 0):
        raise DegenerateDegreeError(f"{kind} Laplacian needs every degree > 0")
    if kind == "normalized_symmetric":
        s = 1.0 / np.sqrt(d)
        return np.eye(g.n) - s[:, None] * a * s[None, :]
    return np.eye(g.n) - a / d[:, None]


def require_positive_degrees(g: Graph) -> None:
    if np.any(g.degree <= 0):
        raise DegenerateDegreeError("every vertex needs positive degree")


# --------------------------------------------------------------------------
# Deterministic families


def path(n: int) -> Graph:
    _min_size("path", n, 2)
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n: int) -> Graph:
    _min_size("cycle", n, 3)
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def grid2d(rows: int, cols: int | None = None) -> Graph:
    cols = rows if cols is None else cols
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise InfeasibleParameterError("grid2d needs at least 2 vertices")
    idx = lambda r, c: r * cols + c  # noqa: E731
    edges = [(idx(r, c), idx(r, c + 1)) for r in range(rows) for c in range(cols - 1)]
    edges += [(idx(r, c), idx(r + 1, c)) for r in range(rows - 1) for c in range(cols)]
    return build_graph(rows * cols, edges)


def complete(n: int) -> Graph:
    _min_size("complete", n, 2)
    return build_graph(n, itertools.combinations(range(n), 2))


def star(n: int) -> Graph:
    """Center 0 joined to leaves ``1..n-1``."""
    _min_size("star", n, 2)
    return build_graph(n, [(0, i) for i in range(1, n)])


def hypercube(dim: int) -> Graph:
    _min_size("hypercube", dim, 1)
    n = 1 << dim
    return build_graph(n, [(x, x ^ (1 << b)) for x in range(n) for b in range(dim) if x < x ^ (1 << b)])


def binary_tree(n: int) -> Graph:
    """Heap-indexed binary tree on ``n`` vertices (parent of i is (i-1)//2)."""
    _min_size("binary_tree", n, 2)
    return build_graph(n, [((i - 1) // 2, i) for i in range(1, n)])


def dumbbell(k: int) -> Graph:
    """Two copies of K_k joined by the single bridge (k-1, k)."""
    _min_size("dumbbell", k, 2)
    left = list(itertools.combinations(range(k), 2))
    right = [(a + k, b + k) for a, b in left]
    return build_graph(2 * k, left + right + [(k - 1, k)])


def lollipop(k: int, tail: int) -> Graph:
    """K_k with a path of ``tail`` extra vertices hanging off vertex k-1."""
    _min_size("lollipop", k, 2)
    _min_size("lollipop tail", tail, 1)
    edges = list(itertools.combinations(range(k), 2))
    edges += [(i, i + 1) for i in range(k - 1, k + tail - 1)]
    return build_graph(k + tail, edges)


FAMILIES = {
    "path": path,
    "cycle": cycle,
    "grid2d": grid2d,
    "complete": complete,
    "star": star,
    "hypercube": hypercube,
    "binary_tree": binary_tree,
    "dumbbell": dumbbell,
    "lollipop": lollipop,
}


def gen_family(name: str, *sizes: int) -> Graph:
    try:
        fn = FAMILIES[name]
    except KeyError:
        raise ValidationError(f"unknown family {name!r}; choose from {sorted(FAMILIES)}") from None
    return fn(*sizes)


def _min_size(name: str, value: int, minimum: int) -> None:
    if int(value) < minimum:
        raise InfeasibleParameterError(f"{name} needs size >= {minimum}, got {value}")


# --------------------------------------------------------------------------
# Random generators


def gnp(n: int, p: float, seed: int) -> Graph:
    if n < 1:
        raise InfeasibleParameterError("gnp needs n >= 1")
    if not 0.0 <= p <= 1.0:
        raise InfeasibleParameterError(f"gnp needs 0 <= p <= 1, got {p}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return Graph(n, iu[keep].astype(np.int64), ju[keep].astype(np.int64), np.ones(int(keep.sum())))


def d_regular(n: int, d: int, seed: int) -> Graph:
    """Configuration-model pairing, restarting on any self-loop or repeat."""
    if d < 0 or d >= n:
        raise InfeasibleParameterError(f"d_regular needs 0 <= d < n, got d={d}, n={n}")
    if (n * d) % 2:
        raise InfeasibleParameterError(f"d_regular needs n*d even, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    stubs = np.repeat(np.arange(n), d)
    for _ in range(D_REGULAR_RETRY_CAP):
        pairs = rng.permutation(stubs).reshape(-1, 2)
        a, b = pairs.min(axis=1), pairs.max(axis=1)
        if np.any(a == b):
            continue
        keys = a * n + b
        if len(np.unique(keys)) != len(keys):
            continue
        return build_graph(n, zip(a.tolist(), b.tolist()))
    raise InfeasibleParameterError(f"d_regular pairing failed {D_REGULAR_RETRY_CAP} times")


def ring_plus_matching(n: int, seed: int) -> Graph:
    """Cycle C_n plus a uniformly random perfect matching avoiding ring edges."""
    if n < 4 or n % 2:
        raise InfeasibleParameterError(f"ring_plus_matching needs even n >= 4, got {n}")
    rng = np.random.default_rng(seed)
    ring = {(i, (i + 1) % n) if i < (i + 1) % n else ((i + 1) % n, i) for i in range(n)}
    for _ in range(D_REGULAR_RETRY_CAP):
        pairs = rng.permutation(n).reshape(-1, 2)
        extra = {(int(min(p)), int(max(p))) for p in pairs}
        if extra & ring:
            continue
        return build_graph(n, sorted(ring | extra))
    raise InfeasibleParameterError("ring_plus_matching failed to avoid ring edges")


def gen_random(kind: str, seed: int, **params) -> Graph:
    if kind == "gnp":
        return gnp(params["n"], params["p"], seed)
    if kind == "d_regular":
        return d_regular(params["n"], params["d"], seed)
    if kind == "ring_plus_matching":
        return ring_plus_matching(params["n"], seed)
    raise ValidationError(f"unknown random graph kind {kind!r}")


# --------------------------------------------------------------------------
# Cut objectives and connectivity


@dataclass(frozen=True)
class PartitionScore:
    cut: float
    vol_s: float
    vol_sbar: float
    size_s: int
    size_sbar: int
    expansion_h: float
    sparsity: float
    conductance_phi: float
    ncut: float


def cut_weight(g: Graph, mask: np.ndarray) -> float:
    crossing = mask[g.u] != mask[g.v]
    return float(g.w[crossing].sum())


def partition_quality(g: Graph, s) -> PartitionScore:
    mask = as_mask(g, s)
    cut = cut_weight(g, mask)
    vol_s = float(g.degree[mask].sum())
    vol_sbar = float(g.degree[~mask].sum())
    k = int(mask.sum())
    kbar = g.n - k
    min_vol = min(vol_s, vol_sbar)
    return PartitionScore(
        cut=cut,
        vol_s=vol_s,
        vol_sbar=vol_sbar,
        size_s=k,
        size_sbar=kbar,
        expansion_h=cut / min(k, kbar),
        sparsity=cut * g.n / (k * kbar),
        conductance_phi=cut / min_vol if min_vol > 0 else float("inf"),
        ncut=(cut / vol_s if vol_s > 0 else float("inf")) + (cut / vol_sbar if vol_sbar > 0 else float("inf")),
    )


def conductance(g: Graph, s) -> float:
    return partition_quality(g, s).conductance_phi


def connected_components(g: Graph) -> np.ndarray:
    """Component label per vertex, numbered by BFS from the lowest unvisited id."""
    labels = np.full(g.n, -1, dtype=np.int64)
    c = 0
    for start in range(g.n):
        if labels[start] >= 0:
            continue
        labels[start] = c
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for y in g.indices[g.indptr[x]:g.indptr[x + 1]]:
                if labels[y] < 0:
                    labels[y] = c
                    queue.append(int(y))
        c += 1
    return labels


def is_connected(g: Graph) -> bool:
    return g.n == 1 or int(connected_components(g).max()) == 0


def require_connected(g: Graph) -> None:
    if not is_connected(g):
        raise DisconnectedGraphError("operation requires a connected graph")


def is_regular(g: Graph) -> bool:
    return bool(np.all(g.w == 1.0)) and bool(np.all(g.degree == g.degree[0]))
