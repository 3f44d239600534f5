# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Must stay behaviourally identical to _pykernels."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs

cnp.import_array()

cdef double BIG_THETA = 1e150


cdef double _offdiag_norm(double[:, ::1] a):
    cdef Py_ssize_t n = a.shape[0], i, j
    cdef double total = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                total += a[i, j] * a[i, j]
    return sqrt(total)


def jacobi_eigh(cnp.ndarray a_in, double tol, int max_sweeps):
    cdef double[:, ::1] a = a_in
    cdef Py_ssize_t n = a.shape[0], p, q, k
    v_arr = np.eye(n)
    cdef double[:, ::1] v = v_arr
    cdef double apq, theta, t, c, s, x, y, off
    cdef int sweeps = 0
    cdef bint rotated
    off = _offdiag_norm(a)
    while off > tol and sweeps < max_sweeps:
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if fabs(theta) > BIG_THETA:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / sqrt(t * t + 1.0)
                s = t * c
                for k in range(n):
                    x = a[k, p]
                    y = a[k, q]
                    a[k, p] = c * x - s * y
                    a[k, q] = s * x + c * y
                for k in range(n):
                    x = a[p, k]
                    y = a[q, k]
                    a[p, k] = c * x - s * y
                    a[q, k] = s * x + c * y
                a[p, q] = 0.0
                a[q, p] = 0.0
                for k in range(n):
                    x = v[k, p]
                    y = v[k, q]
                    v[k, p] = c * x - s * y
                    v[k, q] = s * x + c * y
                rotated = True
        sweeps += 1
        off = _offdiag_norm(a)
        if not rotated:
            break
    return np.diag(a_in).copy(), v_arr, sweeps, off


def push_ppr_run(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                 const double[::1] weights, const double[::1] degree,
                 double[::1] p, double[::1] r, cnp.int64_t[::1] queue,
                 cnp.int64_t[::1] state, cnp.uint8_t[::1] inq,
                 double alpha, double eps, double rho, long long max_pushes):
    cdef Py_ssize_t n = degree.shape[0]
    cdef Py_ssize_t head = state[0], size = state[1], u, x, k
    cdef long long pushes = 0
    cdef double work = 0.0, ru, du, share
    while size > 0 and pushes < max_pushes:
        u = queue[head]
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


def push_l1_run(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                const double[::1] weights, const double[::1] degree,
                double[::1] x, double[::1] r, cnp.int64_t[::1] queue,
                cnp.int64_t[::1] state, cnp.uint8_t[::1] inq,
                double beta, double tau, double rho, double slack,
                long long max_pushes):
    cdef Py_ssize_t n = degree.shape[0]
    cdef Py_ssize_t head = state[0], size = state[1], u, y, k
    cdef long long pushes = 0
    cdef double work = 0.0, du, m, share
    while size > 0 and pushes < max_pushes:
        u = queue[head]
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


def sweep_profile(const cnp.int64_t[::1] indptr, const cnp.int64_t[::1] indices,
                  const double[::1] weights, const double[::1] degree,
                  const cnp.int64_t[::1] order):
    cdef Py_ssize_t n = degree.shape[0], k = order.shape[0], i, j, u
    inside_arr = np.zeros(n, dtype=np.uint8)
    cut_arr = np.empty(k)
    vol_arr = np.empty(k)
    cdef cnp.uint8_t[::1] inside = inside_arr
    cdef double[::1] cut = cut_arr
    cdef double[::1] vol = vol_arr
    cdef double c = 0.0, v = 0.0, internal
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
    return cut_arr, vol_arr
