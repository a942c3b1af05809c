"""Compiled hot loops: unitary assembly, the residual objective, annealing steps.

Everything here mirrors the readable reference implementations in `hurwitz`
and `objective`; the test suite cross-checks the two routes. When numba is
unavailable the same functions run as plain Python (slow but correct), and
`HAVE_NUMBA` tells callers which case they are in.
"""

import math

import numpy as np

try:
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


@njit(cache=True)
def compose_unitary_kernel(x, n):
    """Assemble an n x n unitary from a flat angle vector.

    Walks the vector in its serialization order (see `hurwitz`): the global
    phase first, then for each composite k = 1..n-1 the factor angles
    (phi, psi) left to right, with the extra chi angle on the last factor.
    Factor t of composite k mixes columns i = n-k+t-1 and i+1 (0-based).
    """
    u = np.zeros((n, n), dtype=np.complex128)
    for a in range(n):
        u[a, a] = 1.0 + 0.0j
    pos = 1
    for k in range(1, n):
        for t in range(k):
            phi = x[pos]
            psi = x[pos + 1]
            pos += 2
            if t == k - 1:
                chi = x[pos]
                pos += 1
            else:
                chi = 0.0
            i = n - k + t - 1
            j = i + 1
            c = math.cos(phi)
            s = math.sin(phi)
            eii = c * complex(math.cos(psi), math.sin(psi))
            eij = s * complex(math.cos(chi), math.sin(chi))
            eji = -s * complex(math.cos(chi), -math.sin(chi))
            ejj = c * complex(math.cos(psi), -math.sin(psi))
            # right-multiply u by the elementary rotation: only columns i, j move
            for r in range(n):
                ai = u[r, i]
                aj = u[r, j]
                u[r, i] = ai * eii + aj * eji
                u[r, j] = ai * eij + aj * ejj
    ph = complex(math.cos(x[0]), math.sin(x[0]))
    for a in range(n):
        for b in range(n):
            u[a, b] *= ph
    return u


@njit(cache=True)
def objective_kernel(x, d, m, gauge_fixed):
    """Sum of squared residuals over all basis pairs, from stacked angle vectors.

    `x` holds m angle vectors of length d*d (m-1 when gauge_fixed; the first
    basis is then the identity). For each pair i < j the overlap Gram matrix
    G = U_i^dag U_j is formed and sum((|G_lm|^2 - 1/d)^2) accumulated.
    """
    k = d * d
    nfree = m - 1 if gauge_fixed else m
    us = np.zeros((m, d, d), dtype=np.complex128)
    if gauge_fixed:
        for a in range(d):
            us[0, a, a] = 1.0 + 0.0j
        off = 1
    else:
        off = 0
    for b in range(nfree):
        us[off + b] = compose_unitary_kernel(x[b * k:(b + 1) * k], d)
    inv_d = 1.0 / d
    total = 0.0
    for i in range(m):
        for j in range(i + 1, m):
            for r in range(d):
                for c in range(d):
                    g = 0.0 + 0.0j
                    for t in range(d):
                        g += np.conj(us[i, t, r]) * us[j, t, c]
                    dev = (g.real * g.real + g.imag * g.imag) - inv_d
                    total += dev * dev
    return total


@njit(cache=True)
def anneal_block_kernel(x, fx, xbest, fbest, counts, raw_idx, steps, uacc,
                        temperature, d, m, gauge_fixed, target, limit):
    """Run up to `limit` Metropolis proposals of one Monte Carlo step in place.

    Pre-drawn randomness comes in as arrays so the caller owns the RNG stream:
    `counts[t]` is the subset size, `raw_idx[t, q]` are draws on shrinking
    ranges that map to distinct coordinate indices, `steps[t, q]` the Gaussian
    perturbations, `uacc[t]` the acceptance uniforms. Returns the updated
    (fx, fbest, proposals done, target hit) with x / xbest mutated in place.
    """
    nprop = min(counts.shape[0], limit)
    idx = np.empty(3, dtype=np.int64)
    old = np.empty(3)
    hit = False
    done = 0
    for t in range(nprop):
        kk = counts[t]
        # map range-limited draws to distinct indices (uniform over subsets):
        # draw q lives on [0, dim-q) and is shifted past the earlier picks
        idx[0] = raw_idx[t, 0]
        if kk >= 2:
            c = raw_idx[t, 1]
            if c >= idx[0]:
                c += 1
            idx[1] = c
        if kk >= 3:
            lo = idx[0] if idx[0] < idx[1] else idx[1]
            hi = idx[0] if idx[0] > idx[1] else idx[1]
            c = raw_idx[t, 2]
            if c >= lo:
                c += 1
            if c >= hi:
                c += 1
            idx[2] = c
        for q in range(kk):
            old[q] = x[idx[q]]
            x[idx[q]] += steps[t, q]
        fnew = objective_kernel(x, d, m, gauge_fixed)
        done += 1
        df = fnew - fx
        if df <= 0.0 or uacc[t] < math.exp(-df / temperature):
            fx = fnew
            if fnew < fbest:
                fbest = fnew
                xbest[:] = x
                if fbest < target:
                    hit = True
                    break
        else:
            for q in range(kk - 1, -1, -1):
                x[idx[q]] = old[q]
    return fx, fbest, done, hit


def warm_up(d=2, m=2):
    """Trigger JIT compilation of all kernels (no-op without numba)."""
    x = np.zeros((m - 1) * d * d)
    objective_kernel(x, d, m, True)
    xb = x.copy()
    counts = np.ones(1, dtype=np.int64)
    raw = np.zeros((1, 3), dtype=np.int64)
    steps = np.zeros((1, 3))
    uacc = np.zeros(1)
    anneal_block_kernel(x, 1.0, xb, 1.0, counts, raw, steps, uacc,
                        1.0, d, m, True, 0.0, 1)
