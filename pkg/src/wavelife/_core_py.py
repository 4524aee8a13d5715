"""Pure numpy versions of the compiled loops in ``_core.pyx``.

Same signatures, same arithmetic order; used when the extension is not
built or when ``WAVELIFE_BACKEND=python`` is set.
"""
import numpy as np


def hyp2f1_series(a, b, c, z, tol, max_terms):
    z = np.ascontiguousarray(z, dtype=np.float64)
    n = z.shape[0]
    term = np.ones(n)
    s = np.ones(n)
    comp = np.zeros(n)
    calm = np.zeros(n, dtype=np.int64)
    counts = np.zeros(n, dtype=np.int64)
    done = np.zeros(n, dtype=bool)
    thresh = tol * (1.0 - z)
    k = 0
    while not done.all():
        act = ~done
        zi = z[act]
        term_a = term[act] * (a + k) * (b + k) * zi / ((c + k) * (k + 1.0))
        k += 1
        s_a = s[act]
        t = s_a + term_a
        big = np.abs(s_a) >= np.abs(term_a)
        comp[act] += np.where(big, (s_a - t) + term_a, (term_a - t) + s_a)
        s[act] = t
        term[act] = term_a
        small = (np.abs(term_a) < thresh[act] * np.abs(t + comp[act])) | (term_a == 0.0)
        c_a = np.where(small, calm[act] + 1, 0)
        calm[act] = c_a
        finished = c_a >= 3
        idx = np.flatnonzero(act)
        counts[idx[finished]] = k
        done[idx[finished]] = True
        if k >= max_terms:
            rest = np.flatnonzero(~done)
            counts[rest] = -1
            done[rest] = True
    return s + comp, counts


def _powabs(x, p):
    x = np.abs(x)
    if p == 2.0:
        return x * x
    if p == 3.0:
        return x * x * x
    if p == 1.5:
        return x * np.sqrt(x)
    return np.power(x, p)


def leapfrog_advance(U, cp, cm, dt, coef, pw, src, n_start, n_end, support, cells_per_step, threshold,
                     save_every, tr_u, tr_ut, amp, laplacian):
    nf, _, M1 = U.shape
    M = M1 - 1
    dt2 = dt * dt
    inv2dt = 0.5 / dt
    status = 0
    n = n_start
    while n < n_end:
        s0, s1, snew = n % 3, (n - 1) % 3, (n + 1) % 3
        if cells_per_step < 0:
            top = M
        else:
            top = min(support + 1 + int(np.ceil((n + 1) * cells_per_step - 1e-9)), M)
        cur = U[:, s0, : top + 1].copy()
        cur[:, top] = 0.0
        ut = (3.0 * cur[:, :top] - 4.0 * U[:, s1, :top] + U[:, snew, :top]) * inv2dt
        sources = (cur[0, :top], ut[0], cur[-1, :top], ut[-1])
        for f in range(nf):
            c = cur[f]
            if laplacian:
                lap = np.empty(top)
                lap[0] = cp[0] * (c[1] - c[0])
                lap[1:] = cp[1:top] * (c[2:top + 1] - c[1:top]) - cm[1:top] * (c[1:top] - c[:top - 1])
            else:
                lap = np.zeros(top)
            g = np.zeros(top)
            for j in range(2):
                if coef[f, j] != 0.0:
                    g = g + coef[f, j] * _powabs(sources[src[f, j]], pw[f, j])
            U[f, snew, :top] = 2.0 * c[:top] - U[f, s1, :top] + dt2 * (lap + g)
        new = U[:, snew, :top]
        a = np.maximum(np.abs(new), np.abs((new - U[:, s1, :top]) * inv2dt))
        amax = float(a.max()) if np.all(np.isfinite(a)) else float("nan")
        if save_every > 0 and n % save_every == 0 and n // save_every < tr_u.shape[1]:
            j = n // save_every
            tr_u[:, j, :] = U[:, s0, :]
            tr_ut[:, j, :] = (U[:, snew, :] - U[:, s1, :]) * inv2dt
        amp[n + 1] = amax
        n += 1
        if not np.isfinite(amax):
            status = 2
            break
        if amax > threshold:
            status = 1
            break
    return n, status
