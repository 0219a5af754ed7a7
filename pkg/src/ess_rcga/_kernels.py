"""Compiled inner loops for the genetic algorithm.

Genes are chained (each interval depends on the left neighbour), so every
operator is a left-to-right scan per individual. Random numbers are drawn by
the caller with numpy and passed in, which keeps the kernels deterministic and
the RNG stream under a single Generator.
"""

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def init_population(u, x0, cap, pc, pd, floors):
    n, T = u.shape
    out = np.empty((n, T))
    for k in range(n):
        prev = x0
        for i in range(T):
            lo = max(floors[i], prev - pd)
            hi = min(cap, prev + pc)
            v = min(lo + u[k, i] * (hi - lo), hi)
            out[k, i] = v
            prev = v
    return out


@njit(cache=True, nogil=True)
def blx_offspring(pa, pb, u, alpha, x0, cap, pc, pd, floors):
    m, T = pa.shape
    out = np.empty((m, T))
    for k in range(m):
        prev = x0
        for i in range(T):
            lo = max(floors[i], prev - pd)
            hi = min(cap, prev + pc)
            a = pa[k, i]
            b = pb[k, i]
            cmin = min(a, b)
            cmax = max(a, b)
            spread = alpha * (cmax - cmin)
            blo = max(lo, cmin - spread)
            bhi = min(hi, cmax + spread)
            if blo > bhi:
                # blend range misses the feasible interval entirely
                blo = lo
                bhi = hi
            v = min(blo + u[k, i] * (bhi - blo), bhi)
            out[k, i] = v
            prev = v
    return out


@njit(cache=True, nogil=True)
def mutate_inplace(X, mask_u, z, pm, x0, cap, pc, pd, floors):
    m, T = X.shape
    for k in range(m):
        prev = x0
        for i in range(T):
            lo = max(floors[i], prev - pd)
            hi = min(cap, prev + pc)
            v = X[k, i]
            if mask_u[k, i] < pm:
                v += (hi - lo) * z[k, i]
            if v < lo:
                v = lo
            elif v > hi:
                v = hi
            X[k, i] = v
            prev = v


@njit(cache=True, nogil=True)
def batch_costs(X, x0, load, gen, price, rate, literal):
    m, T = X.shape
    out = np.empty(m)
    for k in range(m):
        prev = x0
        energy = 0.0
        peak = -np.inf
        for i in range(T):
            net = X[k, i] - prev + load[i] - gen[i]
            if net > 0:
                energy += net * price[i]
            if net > peak:
                peak = net
            prev = X[k, i]
        if not literal and peak < 0:
            peak = 0.0
        out[k] = energy + peak * rate
    return out


@njit(cache=True, nogil=True)
def all_feasible(X, x0, cap, pc, pd, floors, tol):
    m, T = X.shape
    for k in range(m):
        prev = x0
        for i in range(T):
            v = X[k, i]
            if not (v >= floors[i] - tol and v <= cap + tol):
                return False
            d = v - prev
            if d > pc + tol or d < -pd - tol:
                return False
            prev = v
    return True
