"""Pure-Python reference versions of the compiled kernels.

Signatures and update order match ``_ckernels.pyx`` exactly; this module is
used when the extension is not built or ``SPECGRAPH_PURE_PYTHON=1``.
Arrays passed in are mutated in place.
"""

import math

import numpy as np

BIG_THETA = 1e150


def jacobi_eigh(a, tol, max_sweeps):
    """Cyclic Jacobi on a symmetric matrix (overwritten).

    Returns ``(diag, vectors, sweeps, off)`` where ``off`` is the final
    off-diagonal Frobenius norm.
    """
    n = a.shape[0]
    v = np.eye(n)
    off = _offdiag_norm(a)
    sweeps = 0
    while off > tol and sweeps < max_sweeps:
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = float(a[p, q])
                if apq == 0.0:
                    continue
                theta = (float(a[q, q]) - float(a[p, p])) / (2.0 * apq)
                if abs(theta) > BIG_THETA:
                    # theta^2 would overflow; t ~ 1/(2 theta)
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                colp = a[:, p].copy()
                colq = a[:, q].copy()
                a[:, p] = c * colp - s * colq
                a[:, q] = s * colp + c * colq
                rowp = a[p, :].copy()
                rowq = a[q, :].copy()
                a[p, :] = c * rowp - s * rowq
                a[q, :] = s * rowp + c * rowq
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
                rotated = True
        sweeps += 1
        off = _offdiag_norm(a)
        if not rotated:
            break
    return np.diag(a).copy(), v, sweeps, off


def _offdiag_norm(a):
    off = a.copy()
    np.fill_diagonal(off, 0.0)
    return float(np.sqrt(np.sum(off * off)))


def push_ppr_run(indptr, indices, weights, degree, p, r, queue, state, inq, alpha, eps, rho, max_pushes):
    """Push loop for the walk ``(1-rho) I + rho A D^-1``.  ``state`` holds ``[head, size]`` of the ring buffer."""
    n = degree.shape[0]
    head, size = int(state[0]), int(state[1])
    pushes = 0
    work = 0.0
    while size > 0 and pushes < max_pushes:
        u = int(queue[head])
        head = (head + 1) % n
        size -= 1
        inq[u] = 0
        ru = r[u]
        du = degree[u]
        if ru < eps * du:
            continue
        p[u] += alpha * ru
        r[u] = (1.0 - alpha) * (1.0 - rho) * ru
        share = (1.0 - alpha) * rho * ru / du
        for k in range(indptr[u], indptr[u + 1]):
            x = indices[k]
            r[x] += share * weights[k]
            if not inq[x] and r[x] >= eps * degree[x]:
                queue[(head + size) % n] = x
                size += 1
                inq[x] = 1
        if not inq[u] and r[u] >= eps * du:
            queue[(head + size) % n] = u
            size += 1
            inq[u] = 1
        pushes += 1
        work += du
    state[0] = head
    state[1] = size
    return pushes, work


def push_l1_run(indptr, indices, weights, degree, x, r, queue, state, inq, beta, tau, rho, slack, max_pushes):
    """Direct-walk push keeping ``r = (1-beta) v - (I - beta A D^-1) x``."""
    n = degree.shape[0]
    head, size = int(state[0]), int(state[1])
    pushes = 0
    work = 0.0
    while size > 0 and pushes < max_pushes:
        u = int(queue[head])
        head = (head + 1) % n
        size -= 1
        inq[u] = 0
        du = degree[u]
        if r[u] <= tau * du + slack:
            continue
        m = r[u] - tau * du * rho
        x[u] += m
        r[u] = tau * du * rho
        share = beta * m / du
        for k in range(indptr[u], indptr[u + 1]):
            y = indices[k]
            r[y] += share * weights[k]
            if not inq[y] and r[y] > tau * degree[y] + slack:
                queue[(head + size) % n] = y
                size += 1
                inq[y] = 1
        pushes += 1
        work += du
    state[0] = head
    state[1] = size
    return pushes, work


def sweep_profile(indptr, indices, weights, degree, order):
    """Cut weight and volume of every prefix ``order[:k+1]``."""
    n = degree.shape[0]
    k = order.shape[0]
    inside = np.zeros(n, dtype=np.uint8)
    cut = np.empty(k)
    vol = np.empty(k)
    c = 0.0
    v = 0.0
    for i in range(k):
        u = order[i]
        internal = 0.0
        for j in range(indptr[u], indptr[u + 1]):
            if inside[indices[j]]:
                internal += weights[j]
        c += degree[u] - 2.0 * internal
        v += degree[u]
        inside[u] = 1
        cut[i] = c
        vol[i] = v
    return cut, vol
