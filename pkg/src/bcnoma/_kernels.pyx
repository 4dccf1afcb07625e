# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels. Same contracts as ``_fallback.py``."""

import numpy as np
from libc.math cimport sqrt, INFINITY, fmax


cdef inline double _p_nc(double x, double y, double s1, double s2, double g1, double g2) nogil:
    return s1 * (g1 + g1 * g2) / x + s2 * g2 / y


cdef inline double _p_cr(double x, double y, double z, double s1, double s2,
                         double g1, double g2, double p_nc) nogil:
    cdef double w = 1.0 / y + s1 * g1 / (s2 * x)
    if z > 1.0 / w:
        return s1 * (g1 + g1 * g2 + g2) / x + g2 * (s2 / y - s1 / x) / (z * w)
    return p_nc


cdef inline double _p_bc(double x, double y, double z, double s1, double s2,
                         double g1, double g2, double p_nc) nogil:
    cdef double a = g1 + g1 * g2
    cdef double c1 = s1 * a
    cdef double c2 = s2 * g2
    cdef double r
    if g2 == 0.0:
        return p_nc
    r = y / x
    if z <= r * r * c1 / c2:
        return p_nc
    if z >= s2 * a / (s1 * g2):
        return (a + g2) * (s2 + s1 * z) / (x * z + y)
    return (c1 * (2.0 * sqrt(c2 * z / c1) + z) + c2) / (x * z + y)


def min_power_batch(gA, gB, gz, double sA, double sB, double gbA, double gbB):
    """Minimum total power of NC, CR(=IR) and BC for every block."""
    cdef const double[::1] a_ = np.ascontiguousarray(gA, dtype=np.float64)
    cdef const double[::1] b_ = np.ascontiguousarray(gB, dtype=np.float64)
    cdef const double[::1] z_ = np.ascontiguousarray(gz, dtype=np.float64)
    cdef Py_ssize_t n = a_.shape[0], i
    out_nc = np.empty(n)
    out_cr = np.empty(n)
    out_bc = np.empty(n)
    cdef double[::1] nc = out_nc
    cdef double[::1] cr = out_cr
    cdef double[::1] bc = out_bc
    cdef double x, y, z, s1, s2, g1, g2, p
    with nogil:
        for i in range(n):
            if a_[i] / sA >= b_[i] / sB:
                x = a_[i]; y = b_[i]; s1 = sA; s2 = sB; g1 = gbA; g2 = gbB
            else:
                x = b_[i]; y = a_[i]; s1 = sB; s2 = sA; g1 = gbB; g2 = gbA
            z = z_[i]
            if x <= 0.0 or y <= 0.0:
                nc[i] = INFINITY; cr[i] = INFINITY; bc[i] = INFINITY
                continue
            p = _p_nc(x, y, s1, s2, g1, g2)
            nc[i] = p
            cr[i] = _p_cr(x, y, z, s1, s2, g1, g2, p)
            bc[i] = _p_bc(x, y, z, s1, s2, g1, g2, p)
    return out_nc, out_cr, out_bc


cdef inline double _grid(double lo, double hi, Py_ssize_t k, Py_ssize_t points) nogil:
    # matches numpy.linspace, including the exact right endpoint
    if k == points - 1:
        return hi
    return lo + k * ((hi - lo) / (points - 1))


def oracle_nc(double x, double y, double s1, double s2, double g1, double g2,
              double upper, Py_ssize_t points, int refinements):
    cdef double lo = 0.0, hi = upper, step, p1, p2, tot
    cdef double best = INFINITY, b1 = 0.0, b2 = 0.0, round_best, r1 = 0.0
    cdef Py_ssize_t k
    cdef int r
    for r in range(refinements + 1):
        round_best = INFINITY
        for k in range(points):
            p1 = _grid(lo, hi, k, points)
            if p1 * x / s1 < g1:
                continue
            p2 = g2 * fmax(p1 + s1 / x, p1 + s2 / y)
            tot = p1 + p2
            if tot < round_best:
                round_best = tot; r1 = p1
                if tot < best:
                    best = tot; b1 = p1; b2 = p2
        if round_best == INFINITY:
            break
        step = (hi - lo) / (points - 1)
        lo, hi = max(0.0, r1 - 2.0 * step), min(upper, r1 + 2.0 * step)
    return best, b1, b2


cdef double _cr_inner(double ph, double x, double y, double z, double s1, double s2,
                      double g1, double g2, double upper, Py_ssize_t points, int refinements,
                      double* out_p1, double* out_p2) nogil:
    # zoomed 1-D search over P1 at fixed P_h; returns the best total
    cdef double lo = 0.0, hi = upper, p1, p2, tot, step
    cdef double best = INFINITY, round_best, r1 = 0.0
    cdef Py_ssize_t k
    cdef int r
    out_p1[0] = 0.0
    out_p2[0] = 0.0
    for r in range(refinements + 1):
        round_best = INFINITY
        for k in range(points):
            p1 = _grid(lo, hi, k, points)
            if p1 * x / s1 < g1:
                continue
            p2 = fmax(g2 * (p1 + s1 / x), fmax(0.0, g2 - ph * z / s2) * (p1 + s2 / y))
            tot = p1 + p2 + ph
            if tot < round_best:
                round_best = tot; r1 = p1
                if tot < best:
                    best = tot; out_p1[0] = p1; out_p2[0] = p2
        if round_best == INFINITY:
            break
        step = (hi - lo) / (points - 1)
        lo, hi = max(0.0, r1 - 2.0 * step), min(upper, r1 + 2.0 * step)
    return best


def oracle_cr(double x, double y, double z, double s1, double s2, double g1, double g2,
              double upper, Py_ssize_t points, int refinements):
    """Nested search: P1 is refined for every P_h before P_h candidates compare."""
    cdef double lo = 0.0, hi = upper, ph, tot, step, p1, p2
    cdef double best = INFINITY, b1 = 0.0, b2 = 0.0, bh = 0.0, round_best, rh = 0.0
    cdef Py_ssize_t k
    cdef int r
    with nogil:
        for r in range(refinements + 1):
            round_best = INFINITY
            for k in range(points):
                ph = _grid(lo, hi, k, points)
                tot = _cr_inner(ph, x, y, z, s1, s2, g1, g2, upper, points, refinements, &p1, &p2)
                if tot < round_best:
                    round_best = tot; rh = ph
                    if tot < best:
                        best = tot; b1 = p1; b2 = p2; bh = ph
            if round_best == INFINITY:
                break
            step = (hi - lo) / (points - 1)
            lo, hi = max(0.0, rh - 2.0 * step), min(upper, rh + 2.0 * step)
    return best, b1, b2, bh


def oracle_bc(double x, double y, double z, double s1, double s2, double g1, double g2,
              Py_ssize_t points, int refinements, double beta_cap):
    cdef double lo = 0.0, hi = beta_cap, beta, xe, ye, p1, p2, tot, step
    cdef double best = INFINITY, b1 = 0.0, b2 = 0.0, bb = 0.0, round_best, rb = 0.0
    cdef Py_ssize_t k
    cdef int r
    for r in range(refinements + 1):
        round_best = INFINITY
        for k in range(points):
            beta = _grid(lo, hi, k, points)
            xe = x * (1.0 - beta)
            ye = y + beta * x * z
            p1 = s1 * g1 / xe
            p2 = g2 * fmax(p1 + s1 / xe, p1 + s2 / ye)
            tot = p1 + p2
            if tot < round_best:
                round_best = tot; rb = beta
                if tot < best:
                    best = tot; b1 = p1; b2 = p2; bb = beta
        step = (hi - lo) / (points - 1)
        lo, hi = max(0.0, rb - 2.0 * step), min(beta_cap, rb + 2.0 * step)
    return best, b1, b2, bb
