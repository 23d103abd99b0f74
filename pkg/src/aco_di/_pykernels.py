"""Pure-Python batch construction kernels.

Line-for-line twins of ``_ckernels.pyx``.  Floating-point operations are
performed in the same order so both backends return identical solutions
for identical uniforms.
"""

from __future__ import annotations

from .core import impact_power, select_index

BACKEND = "python"

# Dynamic Impact given to an item that consumes no capacity at all.
WEIGHTLESS_IMPACT = 1e6
MMPPFO_IMPACT_FLOOR = 0.1


def _base(tau, eta, alpha, beta):
    return [float(t) ** alpha * float(h) ** beta for t, h in zip(tau, eta)]


def _weights(base, cand, impacts, gamma):
    if gamma == 0.0:
        return [base[e] for e in cand]
    dmax = max(impacts)
    return [base[e] * impact_power(d / dmax, gamma) for e, d in zip(cand, impacts)]


def mkp_construct(norm_profit, profits, weights, capacities, tau, eta,
                  alpha, beta, gamma, q0, uniforms):
    """Build ``len(uniforms)`` MKP solutions.

    Returns ``(solutions, fitnesses, degenerate_steps)``; each solution is
    the list of item ids in selection order.
    """
    m = len(capacities)
    n = len(profits)
    W = [[float(x) for x in row] for row in weights]
    P = [float(x) for x in profits]
    NP = [float(x) for x in norm_profit]
    cap = [float(x) for x in capacities]
    base = _base(tau, eta, alpha, beta)
    sols, fits = [], []
    degenerate = 0
    for u in uniforms:
        u = u.tolist() if hasattr(u, "tolist") else list(u)
        rc = list(cap)
        taken = [False] * n
        chosen = []
        profit = 0.0
        step = 0
        while True:
            cand, imp = [], []
            for i in range(n):
                if taken[i]:
                    continue
                ok = True
                for j in range(m):
                    if W[j][i] > rc[j]:
                        ok = False
                        break
                if not ok:
                    continue
                cand.append(i)
                if gamma != 0.0:
                    mx = 0.0
                    sm = 0.0
                    for j in range(m):
                        w = W[j][i]
                        if w > 0.0:
                            r = w / rc[j]
                            if r > mx:
                                mx = r
                            sm += r
                    ci = mx + sm / m
                    imp.append(NP[i] / ci if ci > 0.0 else WEIGHTLESS_IMPACT)
            if not cand:
                break
            idx, deg = select_index(_weights(base, cand, imp, gamma),
                                    u[2 * step], u[2 * step + 1], q0)
            degenerate += deg
            step += 1
            i = cand[idx]
            taken[i] = True
            chosen.append(i)
            for j in range(m):
                rc[j] -= W[j][i]
            profit += P[i]
        sols.append(chosen)
        fits.append(profit)
    return sols, fits, degenerate


def mmppfo_impact(remaining: float, quantity: float) -> float:
    return max(remaining - abs(remaining - quantity), MMPPFO_IMPACT_FLOOR)


def mmppfo_construct(edge_lot, edge_cell, edge_pull, edge_push, lot_qty, lot_stay,
                     order_demand, order_ptr, order_edges, cell_cap, tau, eta,
                     alpha, beta, gamma, q0, uniforms):
    """Build ``len(uniforms)`` schedules.

    Orders arrive pre-sorted in processing order; ``order_edges[order_ptr[o]:
    order_ptr[o + 1]]`` lists the edges that can support order ``o``.
    Returns ``(solutions, fitnesses, degenerate_steps)`` where a solution is
    the list of chosen edge ids (order assignments, then default placements).
    """
    E_lot = list(map(int, edge_lot))
    E_cell = list(map(int, edge_cell))
    E_pull = list(map(int, edge_pull))
    E_push = list(map(int, edge_push))
    Q = [float(x) for x in lot_qty]
    stay = list(map(int, lot_stay))
    D = [float(x) for x in order_demand]
    ptr = list(map(int, order_ptr))
    OE = list(map(int, order_edges))
    cap = [float(x) for x in cell_cap]
    L, O, C = len(Q), len(D), len(cap)
    base = _base(tau, eta, alpha, beta)
    sols, fits = [], []
    degenerate = 0
    for u in uniforms:
        u = u.tolist() if hasattr(u, "tolist") else list(u)
        assigned = [False] * L
        util = [0.0] * C
        sr = [0.0] * O
        pulls = pushes = 0
        chosen = []
        step = 0
        for o in range(O):
            while True:
                rd = D[o] - sr[o]
                if rd <= 0.0:
                    break
                cand, imp = [], []
                for k in range(ptr[o], ptr[o + 1]):
                    e = OE[k]
                    lot = E_lot[e]
                    if assigned[lot]:
                        continue
                    c = E_cell[e]
                    if util[c] + Q[lot] > cap[c]:
                        continue
                    if pushes + E_push[e] > pulls + E_pull[e]:
                        continue
                    cand.append(e)
                    imp.append(mmppfo_impact(rd, Q[lot]))
                if not cand:
                    break
                idx, deg = select_index(_weights(base, cand, imp, gamma),
                                        u[2 * step], u[2 * step + 1], q0)
                degenerate += deg
                step += 1
                e = cand[idx]
                lot = E_lot[e]
                assigned[lot] = True
                util[E_cell[e]] += Q[lot]
                sr[o] += Q[lot]
                pulls += E_pull[e]
                pushes += E_push[e]
                chosen.append(e)
        for lot in range(L):
            e = stay[lot]
            if assigned[lot] or e < 0:
                continue
            c = E_cell[e]
            if c >= 0 and util[c] + Q[lot] <= cap[c]:
                util[c] += Q[lot]
                assigned[lot] = True
                chosen.append(e)
        fitness = 0.0
        for o in range(O):
            if D[o] > sr[o]:
                fitness += D[o] - sr[o]
        sols.append(chosen)
        fits.append(fitness)
    return sols, fits, degenerate


__all__ = ["BACKEND", "mkp_construct", "mmppfo_construct", "mmppfo_impact",
           "WEIGHTLESS_IMPACT", "MMPPFO_IMPACT_FLOOR"]
