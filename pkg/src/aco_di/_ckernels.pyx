# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled batch construction kernels.

Mirrors ``_pykernels.py`` operation for operation; the construction loops
run without the GIL so the engine's worker threads overlap.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport pow, fabs, INFINITY

cnp.import_array()

BACKEND = "cython"

cdef double WEIGHTLESS_IMPACT = 1e6
cdef double MMPPFO_IMPACT_FLOOR = 0.1


cdef inline Py_ssize_t _select(const double[::1] w, Py_ssize_t k, double u_exploit,
                               double u_pick, double q0, int* degenerate) noexcept nogil:
    cdef Py_ssize_t i, best, last
    cdef double total, target, acc
    if u_exploit < q0:
        best = 0
        for i in range(1, k):
            if w[i] > w[best]:
                best = i
        return best
    total = 0.0
    for i in range(k):
        total += w[i]
    if not (total > 0.0 and total < INFINITY):
        degenerate[0] += 1
        i = <Py_ssize_t>(u_pick * k)
        return i if i < k - 1 else k - 1
    target = u_pick * total
    acc = 0.0
    last = 0
    for i in range(k):
        if w[i] > 0.0:
            last = i
        acc += w[i]
        if target < acc:
            return i
    return last


cdef inline double _ipow(double x, double gamma) noexcept nogil:
    # twin of core.impact_power
    cdef long n
    cdef double result
    if gamma >= 1.0 and gamma <= 64.0 and gamma == <double>(<long>gamma):
        n = <long>gamma
        result = 1.0
        while True:
            if n & 1:
                result *= x
            n >>= 1
            if n == 0:
                return result
            x *= x
    return pow(x, gamma)


cdef inline void _weights(const double[::1] base, const int[::1] cand, const double[::1] imp,
                          double[::1] out, Py_ssize_t k, double gamma) noexcept nogil:
    cdef Py_ssize_t i
    cdef double dmax
    if gamma == 0.0:
        for i in range(k):
            out[i] = base[cand[i]]
        return
    dmax = imp[0]
    for i in range(1, k):
        if imp[i] > dmax:
            dmax = imp[i]
    for i in range(k):
        out[i] = base[cand[i]] * _ipow(imp[i] / dmax, gamma)


def _base(tau, eta, double alpha, double beta):
    cdef const double[::1] t = np.ascontiguousarray(tau, dtype=np.float64)
    cdef const double[::1] h = np.ascontiguousarray(eta, dtype=np.float64)
    cdef Py_ssize_t i, n = t.shape[0]
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] b = out
    for i in range(n):
        b[i] = pow(t[i], alpha) * pow(h[i], beta)
    return out


def mkp_construct(norm_profit, profits, weights, capacities, tau, eta,
                  double alpha, double beta, double gamma, double q0, uniforms):
    cdef const double[::1] NP = np.ascontiguousarray(norm_profit, dtype=np.float64)
    cdef const double[::1] P = np.ascontiguousarray(profits, dtype=np.float64)
    cdef const double[:, ::1] W = np.ascontiguousarray(weights, dtype=np.float64)
    cdef const double[::1] cap = np.ascontiguousarray(capacities, dtype=np.float64)
    cdef const double[:, ::1] U = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef double[::1] base = _base(tau, eta, alpha, beta)
    cdef Py_ssize_t m = W.shape[0], n = W.shape[1], K = U.shape[0]

    sols_arr = np.full((K, max(n, 1)), -1, dtype=np.int32)
    counts_arr = np.zeros(K, dtype=np.int32)
    fits_arr = np.zeros(K, dtype=np.float64)
    cdef int[:, ::1] sols = sols_arr
    cdef int[::1] counts = counts_arr
    cdef double[::1] fits = fits_arr
    cdef double[::1] rc = np.empty(m, dtype=np.float64)
    cdef char[::1] taken = np.empty(max(n, 1), dtype=np.int8)
    cdef int[::1] cand = np.empty(max(n, 1), dtype=np.int32)
    cdef double[::1] imp = np.empty(max(n, 1), dtype=np.float64)
    cdef double[::1] w = np.empty(max(n, 1), dtype=np.float64)

    cdef Py_ssize_t a, i, j, k, step, idx
    cdef double mx, sm, r, wij, ci, profit
    cdef bint ok
    cdef int degenerate = 0

    with nogil:
        for a in range(K):
            for j in range(m):
                rc[j] = cap[j]
            for i in range(n):
                taken[i] = 0
            profit = 0.0
            step = 0
            while True:
                k = 0
                for i in range(n):
                    if taken[i]:
                        continue
                    ok = True
                    for j in range(m):
                        if W[j, i] > rc[j]:
                            ok = False
                            break
                    if not ok:
                        continue
                    cand[k] = <int>i
                    if gamma != 0.0:
                        mx = 0.0
                        sm = 0.0
                        for j in range(m):
                            wij = W[j, i]
                            if wij > 0.0:
                                r = wij / rc[j]
                                if r > mx:
                                    mx = r
                                sm += r
                        ci = mx + sm / m
                        imp[k] = NP[i] / ci if ci > 0.0 else WEIGHTLESS_IMPACT
                    k += 1
                if k == 0:
                    break
                _weights(base, cand, imp, w, k, gamma)
                idx = _select(w, k, U[a, 2 * step], U[a, 2 * step + 1], q0, &degenerate)
                i = cand[idx]
                taken[i] = 1
                sols[a, step] = <int>i
                step += 1
                for j in range(m):
                    rc[j] -= W[j, i]
                profit += P[i]
            counts[a] = <int>step
            fits[a] = profit

    return ([sols_arr[a, :counts_arr[a]].tolist() for a in range(K)],
            fits_arr.tolist(), degenerate)


def mmppfo_construct(edge_lot, edge_cell, edge_pull, edge_push, lot_qty, lot_stay,
                     order_demand, order_ptr, order_edges, cell_cap, tau, eta,
                     double alpha, double beta, double gamma, double q0, uniforms):
    cdef const int[::1] E_lot = np.ascontiguousarray(edge_lot, dtype=np.int32)
    cdef const int[::1] E_cell = np.ascontiguousarray(edge_cell, dtype=np.int32)
    cdef const int[::1] E_pull = np.ascontiguousarray(edge_pull, dtype=np.int32)
    cdef const int[::1] E_push = np.ascontiguousarray(edge_push, dtype=np.int32)
    cdef const double[::1] Q = np.ascontiguousarray(lot_qty, dtype=np.float64)
    cdef const int[::1] stay = np.ascontiguousarray(lot_stay, dtype=np.int32)
    cdef const double[::1] D = np.ascontiguousarray(order_demand, dtype=np.float64)
    cdef const int[::1] ptr = np.ascontiguousarray(order_ptr, dtype=np.int32)
    cdef const int[::1] OE = np.ascontiguousarray(order_edges, dtype=np.int32)
    cdef const double[::1] cap = np.ascontiguousarray(cell_cap, dtype=np.float64)
    cdef const double[:, ::1] U = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef double[::1] base = _base(tau, eta, alpha, beta)
    cdef Py_ssize_t L = Q.shape[0], O = D.shape[0], C = cap.shape[0], K = U.shape[0]
    cdef Py_ssize_t maxc = max(OE.shape[0], 1)
    # impacts depend on the lot only through its quantity, so each step needs
    # at most one power per distinct quantity
    qvals, qinv = np.unique(np.asarray(Q), return_inverse=True)
    cdef const long[::1] QI = np.ascontiguousarray(qinv.reshape(-1), dtype=np.int64) if L else np.zeros(1, np.int64)
    cdef Py_ssize_t NQ = max(len(qvals), 1)
    cdef long[::1] stamp = np.full(NQ, -1, dtype=np.int64)
    cdef double[::1] qpow = np.empty(NQ, dtype=np.float64)
    cdef long tick = 0
    cdef long qi
    cdef double dmax

    sols_arr = np.full((K, max(L, 1)), -1, dtype=np.int32)
    counts_arr = np.zeros(K, dtype=np.int32)
    fits_arr = np.zeros(K, dtype=np.float64)
    cdef int[:, ::1] sols = sols_arr
    cdef int[::1] counts = counts_arr
    cdef double[::1] fits = fits_arr
    cdef char[::1] assigned = np.empty(max(L, 1), dtype=np.int8)
    cdef double[::1] util = np.empty(max(C, 1), dtype=np.float64)
    cdef double[::1] sr = np.empty(max(O, 1), dtype=np.float64)
    cdef int[::1] cand = np.empty(maxc, dtype=np.int32)
    cdef int[::1] alive = np.empty(maxc, dtype=np.int32)
    cdef double[::1] imp = np.empty(maxc, dtype=np.float64)
    cdef double[::1] w = np.empty(maxc, dtype=np.float64)

    cdef Py_ssize_t a, o, p, k, step, nchosen, idx, lot, c, nalive, keep
    cdef int e, pulls, pushes
    cdef double rd, di, fitness
    cdef int degenerate = 0

    with nogil:
        for a in range(K):
            for lot in range(L):
                assigned[lot] = 0
            for c in range(C):
                util[c] = 0.0
            for o in range(O):
                sr[o] = 0.0
            pulls = 0
            pushes = 0
            step = 0
            nchosen = 0
            for o in range(O):
                # edges dropped for a taken lot or a full cell never come back
                # while this order is open, so the scan list shrinks in place
                nalive = 0
                for p in range(ptr[o], ptr[o + 1]):
                    alive[nalive] = OE[p]
                    nalive += 1
                while True:
                    rd = D[o] - sr[o]
                    if rd <= 0.0:
                        break
                    k = 0
                    keep = 0
                    for p in range(nalive):
                        e = alive[p]
                        lot = E_lot[e]
                        if assigned[lot]:
                            continue
                        c = E_cell[e]
                        if util[c] + Q[lot] > cap[c]:
                            continue
                        alive[keep] = e
                        keep += 1
                        if pushes + E_push[e] > pulls + E_pull[e]:
                            continue
                        cand[k] = e
                        di = rd - fabs(rd - Q[lot])
                        imp[k] = di if di > MMPPFO_IMPACT_FLOOR else MMPPFO_IMPACT_FLOOR
                        k += 1
                    nalive = keep
                    if k == 0:
                        break
                    if gamma == 0.0:
                        for p in range(k):
                            w[p] = base[cand[p]]
                    else:
                        dmax = imp[0]
                        for p in range(1, k):
                            if imp[p] > dmax:
                                dmax = imp[p]
                        tick += 1
                        for p in range(k):
                            qi = QI[E_lot[cand[p]]]
                            if stamp[qi] != tick:
                                stamp[qi] = tick
                                qpow[qi] = _ipow(imp[p] / dmax, gamma)
                            w[p] = base[cand[p]] * qpow[qi]
                    idx = _select(w, k, U[a, 2 * step], U[a, 2 * step + 1], q0, &degenerate)
                    step += 1
                    e = cand[idx]
                    lot = E_lot[e]
                    assigned[lot] = 1
                    util[E_cell[e]] += Q[lot]
                    sr[o] += Q[lot]
                    pulls += E_pull[e]
                    pushes += E_push[e]
                    sols[a, nchosen] = e
                    nchosen += 1
            for lot in range(L):
                e = stay[lot]
                if assigned[lot] or e < 0:
                    continue
                c = E_cell[e]
                if c >= 0 and util[c] + Q[lot] <= cap[c]:
                    util[c] += Q[lot]
                    assigned[lot] = 1
                    sols[a, nchosen] = e
                    nchosen += 1
            fitness = 0.0
            for o in range(O):
                if D[o] > sr[o]:
                    fitness += D[o] - sr[o]
            counts[a] = <int>nchosen
            fits[a] = fitness

    return ([sols_arr[a, :counts_arr[a]].tolist() for a in range(K)],
            fits_arr.tolist(), degenerate)
