"""Hot numeric kernels: dense simplex pivoting and entropy sums.

Each kernel exists twice: ``py_<name>`` is the plain numpy/python
implementation, and ``<name>`` is the same function compiled with numba
when JIT is enabled (see :mod:`ccbound._jit`).  The kernels are
self-contained (no cross-calls) so each compiles independently.

Probabilities below 1e-15 are pruned from all entropy sums to avoid log
underflow; logarithms are base 2 throughout.
"""

import numpy as np

from ._jit import maybe_jit

PROB_FLOOR = 1e-15

SIMPLEX_OPTIMAL = 0
SIMPLEX_ITERATION_LIMIT = 1
SIMPLEX_UNBOUNDED = 2


def py_simplex_maximize(A, b, c, tol, maxiter):
    """Maximize c.x subject to A x <= b, x >= 0, assuming b >= 0.

    Tableau simplex starting from the slack basis (feasible because b >= 0).
    Entering column by Dantzig's rule, switching to Bland's rule after
    50*(m+n) pivots to rule out cycling; leaving row by minimum ratio with
    smallest-basis-index tie break.

    Returns (status, objective, x).
    """
    m, n = A.shape
    width = n + m + 1
    T = np.zeros((m + 1, width))
    T[:m, :n] = A
    for i in range(m):
        T[i, n + i] = 1.0
    T[:m, width - 1] = b
    T[m, :n] = -c
    basis = np.arange(n, n + m)

    bland_after = 50 * (m + n)
    it = 0
    while it < maxiter:
        # entering column
        col = -1
        if it < bland_after:
            best = -tol
            for j in range(n + m):
                if T[m, j] < best:
                    best = T[m, j]
                    col = j
        else:
            for j in range(n + m):
                if T[m, j] < -tol:
                    col = j
                    break
        if col < 0:
            x = np.zeros(n)
            for i in range(m):
                if basis[i] < n:
                    x[basis[i]] = T[i, width - 1]
            return SIMPLEX_OPTIMAL, T[m, width - 1], x

        # leaving row: minimum ratio test
        row = -1
        best_ratio = np.inf
        for i in range(m):
            a = T[i, col]
            if a > tol:
                ratio = T[i, width - 1] / a
                if ratio < best_ratio - 1e-12:
                    best_ratio = ratio
                    row = i
                elif ratio < best_ratio + 1e-12 and row >= 0 and basis[i] < basis[row]:
                    row = i
        if row < 0:
            return SIMPLEX_UNBOUNDED, 0.0, np.zeros(n)

        piv = T[row, col]
        T[row, :] /= piv
        for i in range(m + 1):
            if i != row:
                f = T[i, col]
                if f != 0.0:
                    T[i, :] -= f * T[row, :]
        basis[row] = col
        it += 1

    return SIMPLEX_ITERATION_LIMIT, 0.0, np.zeros(n)


def py_mutual_information_bits(p_ab):
    """I(A:B) in bits of a normalized joint table p_ab[a, b]."""
    na, nb = p_ab.shape
    pa = np.zeros(na)
    pb = np.zeros(nb)
    for a in range(na):
        for b in range(nb):
            pa[a] += p_ab[a, b]
            pb[b] += p_ab[a, b]
    total = 0.0
    for a in range(na):
        for b in range(nb):
            pab = p_ab[a, b]
            if pab > PROB_FLOOR:
                total += pab * np.log2(pab / (pa[a] * pb[b]))
    return total


def py_conditional_mutual_information_bits(p_abf):
    """I(A:B|F) in bits of a normalized joint table p_abf[a, b, f].

    Computed as sum_f of the unnormalized per-branch contribution
    sum_ab p(a,b,f) log2[ p(a,b,f) p(f) / (p(a,f) p(b,f)) ], which equals
    p(f) * I(A:B|F=f) without forming the conditional distribution.
    """
    na, nb, nf = p_abf.shape
    total = 0.0
    pa = np.zeros(na)
    pb = np.zeros(nb)
    for f in range(nf):
        pf = 0.0
        for a in range(na):
            pa[a] = 0.0
        for b in range(nb):
            pb[b] = 0.0
        for a in range(na):
            for b in range(nb):
                w = p_abf[a, b, f]
                pa[a] += w
                pb[b] += w
                pf += w
        if pf <= PROB_FLOOR:
            continue
        for a in range(na):
            for b in range(nb):
                w = p_abf[a, b, f]
                if w > PROB_FLOOR:
                    total += w * np.log2(w * pf / (pa[a] * pb[b]))
    return total


def py_cmi_after_map_bits(p_abe, rows):
    """I(A:B|F) after pushing e through the row-stochastic map rows[e, f]."""
    na, nb, ne = p_abe.shape
    nf = rows.shape[1]
    p_abf = np.zeros((na, nb, nf))
    for e in range(ne):
        for f in range(nf):
            w = rows[e, f]
            if w != 0.0:
                for a in range(na):
                    for b in range(nb):
                        p_abf[a, b, f] += w * p_abe[a, b, e]
    total = 0.0
    pa = np.zeros(na)
    pb = np.zeros(nb)
    for f in range(nf):
        pf = 0.0
        for a in range(na):
            pa[a] = 0.0
        for b in range(nb):
            pb[b] = 0.0
        for a in range(na):
            for b in range(nb):
                w = p_abf[a, b, f]
                pa[a] += w
                pb[b] += w
                pf += w
        if pf <= PROB_FLOOR:
            continue
        for a in range(na):
            for b in range(nb):
                w = p_abf[a, b, f]
                if w > PROB_FLOOR:
                    total += w * np.log2(w * pf / (pa[a] * pb[b]))
    return total


def py_sweep_deterministic_maps(p_abe, n_f):
    """Minimum of I(A:B|F) over all deterministic maps e -> f.

    Enumerates the n_f**n_e assignments with an odometer counter and
    returns (best value, best assignment).
    """
    na, nb, ne = p_abe.shape
    assign = np.zeros(ne, np.int64)
    best_assign = np.zeros(ne, np.int64)
    best = np.inf
    p_abf = np.zeros((na, nb, n_f))
    pa = np.zeros(na)
    pb = np.zeros(nb)
    done = False
    while not done:
        for a in range(na):
            for b in range(nb):
                for f in range(n_f):
                    p_abf[a, b, f] = 0.0
        for e in range(ne):
            f = assign[e]
            for a in range(na):
                for b in range(nb):
                    p_abf[a, b, f] += p_abe[a, b, e]
        total = 0.0
        for f in range(n_f):
            pf = 0.0
            for a in range(na):
                pa[a] = 0.0
            for b in range(nb):
                pb[b] = 0.0
            for a in range(na):
                for b in range(nb):
                    w = p_abf[a, b, f]
                    pa[a] += w
                    pb[b] += w
                    pf += w
            if pf <= PROB_FLOOR:
                continue
            for a in range(na):
                for b in range(nb):
                    w = p_abf[a, b, f]
                    if w > PROB_FLOOR:
                        total += w * np.log2(w * pf / (pa[a] * pb[b]))
        if total < best:
            best = total
            for e in range(ne):
                best_assign[e] = assign[e]
        # odometer increment
        pos = 0
        while pos < ne:
            assign[pos] += 1
            if assign[pos] < n_f:
                break
            assign[pos] = 0
            pos += 1
        if pos == ne:
            done = True
    return best, best_assign


simplex_maximize = maybe_jit(py_simplex_maximize)
mutual_information_bits = maybe_jit(py_mutual_information_bits)
conditional_mutual_information_bits = maybe_jit(py_conditional_mutual_information_bits)
cmi_after_map_bits = maybe_jit(py_cmi_after_map_bits)
sweep_deterministic_maps = maybe_jit(py_sweep_deterministic_maps)
