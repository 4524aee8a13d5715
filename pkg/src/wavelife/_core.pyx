# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops: Gauss series summation and the radial leapfrog."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, pow, isfinite, ceil, sqrt

cnp.import_array()


def hyp2f1_series(double a, double b, double c, double[::1] z, double tol, long max_terms):
    """Sum 2F1(a, b; c; z_i) for every entry; returns (values, term_counts).

    A count of -1 flags an entry that hit ``max_terms``.
    """
    cdef Py_ssize_t n = z.shape[0], i
    cdef long k, calm
    cdef double zi, term, s, comp, y, t, thresh
    out = np.empty(n, dtype=np.float64)
    counts = np.empty(n, dtype=np.int64)
    cdef double[::1] o = out
    cdef long long[::1] cnt = counts
    for i in range(n):
        zi = z[i]
        term = 1.0
        s = 1.0
        comp = 0.0
        calm = 0
        k = 0
        thresh = tol * (1.0 - zi)
        while True:
            term = term * (a + k) * (b + k) * zi / ((c + k) * (k + 1.0))
            k += 1
            # Neumaier compensated summation
            t = s + term
            if fabs(s) >= fabs(term):
                comp += (s - t) + term
            else:
                comp += (term - t) + s
            s = t
            if fabs(term) < thresh * fabs(s + comp) or term == 0.0:
                calm += 1
                if calm >= 3:
                    break
            else:
                calm = 0
            if k >= max_terms:
                k = -1
                break
        o[i] = s + comp
        cnt[i] = k
    return out, counts


cdef inline double _src(int idx, double[:, ::1] cur, double[:, ::1] ut, Py_ssize_t i) nogil:
    # idx: 0 -> u, 1 -> u_t, 2 -> v, 3 -> v_t
    if idx == 0:
        return cur[0, i]
    if idx == 1:
        return ut[0, i]
    if idx == 2:
        return cur[1, i]
    return ut[1, i]


cdef inline double _powabs(double x, double p) nogil:
    # common exponents without pow(); the numpy fallback uses the same operations
    x = fabs(x)
    if p == 2.0:
        return x * x
    if p == 3.0:
        return x * x * x
    if p == 1.5:
        return x * sqrt(x)
    return pow(x, p)


def leapfrog_advance(double[:, :, ::1] U, double[::1] cp, double[::1] cm,
                     double dt, double[:, ::1] coef, double[:, ::1] pw, int[:, ::1] src,
                     long n_start, long n_end, long support, double cells_per_step, double threshold,
                     long save_every, double[:, :, ::1] tr_u, double[:, :, ::1] tr_ut,
                     double[::1] amp, int laplacian):
    """Advance the leapfrog from step ``n_start`` to at most ``n_end``.

    ``U[f, n % 3]`` holds field ``f`` at time level ``n``; on entry levels
    ``n_start-2 .. n_start`` are present.  Nodes ``i < support + 1 +
    ceil((n+1) * cells_per_step)`` are updated (all of them when
    ``cells_per_step < 0``); the rest stay zero.  Returns
    ``(n_reached, status)`` with status 0 (finished), 1 (threshold crossed)
    or 2 (non-finite).
    """
    cdef Py_ssize_t nf = U.shape[0], M = U.shape[2] - 1
    cdef Py_ssize_t i, f, j, top
    cdef long n, s0, s1, s2, snew
    cdef double dt2 = dt * dt, lap, g, x, a, amax, inv2dt = 0.5 / dt
    cdef double[:, ::1] ut = np.zeros((nf, M + 1))
    cdef double[:, ::1] cur = np.zeros((nf, M + 1))
    cdef int status = 0
    n = n_start
    while n < n_end:
        # n - 1 == n + 2 and n - 2 == n + 1 (mod 3); C modulo of negatives is negative
        s0 = n % 3
        s1 = (n + 2) % 3
        s2 = (n + 1) % 3
        snew = s2
        if cells_per_step < 0:
            top = M
        else:
            top = support + 1 + <long>ceil((n + 1) * cells_per_step - 1e-9)
            if top > M:
                top = M
        for f in range(nf):
            for i in range(top):
                cur[f, i] = U[f, s0, i]
                ut[f, i] = (3.0 * U[f, s0, i] - 4.0 * U[f, s1, i] + U[f, s2, i]) * inv2dt
        for f in range(nf):
            for i in range(top):
                if laplacian:
                    if i == 0:
                        lap = cp[0] * (cur[f, 1] - cur[f, 0])
                    else:
                        lap = cp[i] * (cur[f, i + 1] - cur[f, i]) - cm[i] * (cur[f, i] - cur[f, i - 1])
                else:
                    lap = 0.0
                g = 0.0
                for j in range(2):
                    if coef[f, j] != 0.0:
                        x = _src(src[f, j], cur, ut, i)
                        g = g + coef[f, j] * _powabs(x, pw[f, j])
                U[f, snew, i] = 2.0 * cur[f, i] - U[f, s1, i] + dt2 * (lap + g)
        amax = 0.0
        for f in range(nf):
            for i in range(top):
                a = fabs(U[f, snew, i])
                x = fabs((U[f, snew, i] - U[f, s1, i]) * inv2dt)
                if x > a:
                    a = x
                if not isfinite(a):
                    amax = a
                    break
                if a > amax:
                    amax = a
            if not isfinite(amax):
                break
        if save_every > 0 and n % save_every == 0 and n // save_every < tr_u.shape[1]:
            j = n // save_every
            for f in range(nf):
                for i in range(M + 1):
                    tr_u[f, j, i] = U[f, s0, i]
                    tr_ut[f, j, i] = (U[f, snew, i] - U[f, s1, i]) * inv2dt
        amp[n + 1] = amax
        n += 1
        if not isfinite(amax):
            status = 2
            break
        if amax > threshold:
            status = 1
            break
    return n, status
