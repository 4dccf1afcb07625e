"""Pure numpy implementations of the hot kernels.

Mirrors ``_kernels.pyx`` function for function; ``kernels.py`` picks one at
import time. Zero-gain blocks get ``inf`` as an outage sentinel inside the
minimum-power arrays; callers only ever export counts derived from them.
"""

import numpy as np


def _order(gA, gB, sA, sB, gbA, gbB):
    a_first = gA / sA >= gB / sB
    x = np.where(a_first, gA, gB)
    y = np.where(a_first, gB, gA)
    s1 = np.where(a_first, sA, sB)
    s2 = np.where(a_first, sB, sA)
    g1 = np.where(a_first, gbA, gbB)
    g2 = np.where(a_first, gbB, gbA)
    return x, y, s1, s2, g1, g2


def min_power_batch(gA, gB, gz, sA, sB, gbA, gbB):
    """Minimum total power of NC, CR(=IR) and BC for every block."""
    gA = np.asarray(gA, dtype=float)
    gB = np.asarray(gB, dtype=float)
    z = np.asarray(gz, dtype=float)
    x, y, s1, s2, g1, g2 = _order(gA, gB, sA, sB, gbA, gbB)
    a = g1 + g1 * g2
    T = a + g2
    c1 = s1 * a
    c2 = s2 * g2
    dead = (x <= 0) | (y <= 0)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        p_nc = c1 / x + c2 / y

        w = 1.0 / y + s1 * g1 / (s2 * x)
        coop = z > 1.0 / w
        p_cr = np.where(coop, s1 * T / x + g2 * (s2 / y - s1 / x) / (z * w), p_nc)

        lo = (y / x) ** 2 * c1 / c2
        hi = s2 * a / (s1 * g2)
        low = (g2 == 0) | (z <= lo)
        high = ~low & (z >= hi)
        denom = x * z + y
        p_mid = (c1 * (2.0 * np.sqrt(c2 * z / c1) + z) + c2) / denom
        p_high = T * (s2 + s1 * z) / denom
        p_bc = np.where(low, p_nc, np.where(high, p_high, p_mid))

    for p in (p_nc, p_cr, p_bc):
        p[dead] = np.inf
    return p_nc, p_cr, p_bc


def _refine(best, step, dom_lo, dom_hi):
    return max(dom_lo, best - 2.0 * step), min(dom_hi, best + 2.0 * step)


_quiet = np.errstate(divide="ignore", invalid="ignore", over="ignore")


@_quiet
def oracle_nc(x, y, s1, s2, g1, g2, upper, points, refinements):
    x, y = np.float64(x), np.float64(y)
    lo, hi = 0.0, upper
    best = (np.inf, 0.0, 0.0)
    for _ in range(refinements + 1):
        p1 = np.linspace(lo, hi, points)
        ok = p1 * x / s1 >= g1
        p2 = g2 * np.maximum(p1 + s1 / x, p1 + s2 / y)
        tot = np.where(ok, p1 + p2, np.inf)
        k = int(np.argmin(tot))
        if tot[k] < best[0]:
            best = (float(tot[k]), float(p1[k]), float(p2[k]))
        if not np.isfinite(tot[k]):
            break
        lo, hi = _refine(p1[k], (hi - lo) / (points - 1), 0.0, upper)
    return best


def _grid(lo, hi, points):
    # row-wise linspace, same arithmetic as the compiled kernels
    k = np.arange(points)
    g = lo[:, None] + k[None, :] * ((hi - lo) / (points - 1))[:, None]
    g[:, -1] = hi
    return g


def _cr_inner(ph, x, y, z, s1, s2, g1, g2, upper, points, refinements):
    """Zoomed search over P1 for each P_h in ``ph``; best total and its P1, P2."""
    m = len(ph)
    lo, hi = np.zeros(m), np.full(m, float(upper))
    best = np.full(m, np.inf)
    b1, b2 = np.zeros(m), np.zeros(m)
    rows = np.arange(m)
    lift = np.maximum(0.0, g2 - ph * z / s2)[:, None]
    for _ in range(refinements + 1):
        p1 = _grid(lo, hi, points)
        p2 = np.maximum(g2 * (p1 + s1 / x), lift * (p1 + s2 / y))
        tot = np.where(p1 * x / s1 >= g1, p1 + p2 + ph[:, None], np.inf)
        k = np.argmin(tot, axis=1)
        t = tot[rows, k]
        better = t < best
        best = np.where(better, t, best)
        b1 = np.where(better, p1[rows, k], b1)
        b2 = np.where(better, p2[rows, k], b2)
        ok = np.isfinite(t)
        step = (hi - lo) / (points - 1)
        c = p1[rows, k]
        lo = np.where(ok, np.maximum(0.0, c - 2.0 * step), lo)
        hi = np.where(ok, np.minimum(upper, c + 2.0 * step), hi)
    return best, b1, b2


@_quiet
def oracle_cr(x, y, z, s1, s2, g1, g2, upper, points, refinements):
    """Nested search: P1 is refined for every P_h before P_h candidates compare."""
    x, y = np.float64(x), np.float64(y)
    if not (x > 0 and y > 0):
        return (np.inf, 0.0, 0.0, 0.0)
    lo, hi = 0.0, upper
    best = (np.inf, 0.0, 0.0, 0.0)
    for _ in range(refinements + 1):
        ph = _grid(np.array([lo]), np.array([hi]), points)[0]
        tot, p1, p2 = _cr_inner(ph, x, y, z, s1, s2, g1, g2, upper, points, refinements)
        j = int(np.argmin(tot))
        if tot[j] < best[0]:
            best = (float(tot[j]), float(p1[j]), float(p2[j]), float(ph[j]))
        if not np.isfinite(tot[j]):
            break
        lo, hi = _refine(ph[j], (hi - lo) / (points - 1), 0.0, upper)
    return best


def _bc_eval(beta, x, y, z, s1, s2, g1, g2):
    xe = x * (1.0 - beta)
    ye = y + beta * x * z
    p1 = s1 * g1 / xe
    p2 = g2 * np.maximum(p1 + s1 / xe, p1 + s2 / ye)
    return p1, p2


@_quiet
def oracle_bc(x, y, z, s1, s2, g1, g2, points, refinements, beta_cap):
    x, y = np.float64(x), np.float64(y)
    lo, hi = 0.0, beta_cap
    best = (np.inf, 0.0, 0.0, 0.0)
    for _ in range(refinements + 1):
        beta = np.linspace(lo, hi, points)
        p1, p2 = _bc_eval(beta, x, y, z, s1, s2, g1, g2)
        tot = p1 + p2
        k = int(np.argmin(tot))
        if tot[k] < best[0]:
            best = (float(tot[k]), float(p1[k]), float(p2[k]), float(beta[k]))
        lo, hi = _refine(beta[k], (hi - lo) / (points - 1), 0.0, beta_cap)
    return best
