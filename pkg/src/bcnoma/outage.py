"""System outage probability: Monte Carlo over fading blocks and
semi-analytic quadrature for Rayleigh fading.

The analytic path splits the outage event by which physical user is the
stronger one. :class:`_Ordering` evaluates one such term with user A as
user 1; the other term is the same code on ``params.swapped()``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernels
from .model import Scheme, SystemParams, sample_channels
from .numerics import (DEFAULT_SPEC, QuadratureSpec, h_gamma2, integrate_1d,
                       parallel_map, scaled_erf_difference, substream)

CHUNK = 1 << 18
SQRT_PI = math.sqrt(math.pi)
# beyond this many means an exponential weight is below e^-60 of its start
_TAIL = 60.0


@dataclass(frozen=True)
class Estimate:
    """A probability (or rate) with its uncertainty.

    Monte Carlo results carry ``std_error`` and ``n``; quadrature results
    carry ``error_bound`` (sum of reported quadrature errors) and n = 0.
    """

    value: float
    std_error: float = 0.0
    n: int = 0
    method: str = "quadrature"
    error_bound: float = 0.0

    def __post_init__(self):
        if self.std_error < 0 or self.error_bound < 0:
            raise ValueError("uncertainties must be nonnegative")


def _binomial(k: int, n: int, scale: float = 1.0) -> Estimate:
    p = k / n
    return Estimate(scale * p, scale * math.sqrt(p * (1.0 - p) / n), n, "mc")


# Monte Carlo ---------------------------------------------------------------

def _chunk_sizes(n: int):
    full, rest = divmod(n, CHUNK)
    return [CHUNK] * full + ([rest] if rest else [])


def _count_chunk(task):
    params, powers, seed, index, size = task
    ch = sample_channels(params, size, substream(seed, index))
    p_nc, p_cr, p_bc = kernels.min_power_batch(
        ch.gA, ch.gB, ch.gz, params.sigma2_A, params.sigma2_B, params.gbar_A, params.gbar_B)
    out = np.zeros((4, len(powers)), dtype=np.int64)
    for j, P in enumerate(powers):
        nc_out = p_nc > P
        out[0, j] = np.count_nonzero(nc_out)
        out[1, j] = np.count_nonzero(p_cr > P)
        out[2, j] = np.count_nonzero(p_bc > P)
        out[3, j] = np.count_nonzero(nc_out & (p_cr <= P))
    return out


@dataclass(frozen=True)
class OutageCounts:
    """Outage tallies of one Monte Carlo run over a grid of power budgets.

    Rows of ``counts`` are NC, CR(=IR), BC outages and IR cooperation
    activations; columns follow ``powers``.
    """

    powers: tuple
    counts: np.ndarray
    n: int

    def sop(self, scheme, index: int) -> Estimate:
        row = {Scheme.NC: 0, Scheme.CR: 1, Scheme.IR: 1, Scheme.BC: 2}[Scheme.parse(scheme)]
        return _binomial(int(self.counts[row, index]), self.n)

    def p_ct(self, index: int) -> Estimate:
        return _binomial(int(self.counts[3, index]), self.n)


def simulate_outage(params: SystemParams, powers: Iterable[float], n: int, seed: int,
                    workers: int | None = None) -> OutageCounts:
    """Draw ``n`` blocks once and tally outages at every budget in ``powers``.

    Blocks come in fixed-size chunks, chunk ``i`` from substream ``(seed, i)``,
    so the tallies do not depend on the worker count.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    powers = tuple(float(P) for P in powers)
    if any(P < 0 for P in powers):
        raise ValueError("power budgets must be nonnegative")
    tasks = [(params, powers, seed, i, m) for i, m in enumerate(_chunk_sizes(n))]
    total = sum(parallel_map(_count_chunk, tasks, workers))
    return OutageCounts(powers, total, n)


def sop_monte_carlo(params: SystemParams, scheme, P_p: float, n: int, seed: int) -> Estimate:
    """Fraction of ``n`` fading blocks whose minimum power exceeds ``P_p``."""
    return simulate_outage(params, [P_p], n, seed).sop(scheme, 0)


def sop_monte_carlo_grid(params: SystemParams, scheme, powers: Sequence[float], n: int,
                         seed: int) -> list[Estimate]:
    """Same draws reused across all budgets (common random numbers)."""
    counts = simulate_outage(params, powers, n, seed)
    return [counts.sop(scheme, j) for j in range(len(counts.powers))]


# quadrature helpers --------------------------------------------------------

def _clip(lo: float, hi: float, mean: float) -> float:
    """Upper limit for an integral against exp(-t/mean) starting at ``lo``."""
    return min(hi, lo + _TAIL * mean)


def _band(lo: float, hi: float, lx: float, c: float) -> float:
    """Integral over t in [lo, hi] of (1 - exp(-c*(hi - t))) * exp(-t/lx)/lx.

    With c = z/ly this is P(lo < x < hi, y < z*(hi - x)) for independent
    exponential x, y. Stays accurate when c - 1/lx or the band is tiny.
    """
    if not hi > lo:
        return 0.0
    d = hi - lo
    k = c - 1.0 / lx
    head = -math.exp(-lo / lx) * math.expm1(-d / lx)
    if abs(k * d) < 1e-3:
        w = -k * d
        exprel = 1.0 + w / 2.0 + w * w / 6.0 + w ** 3 / 24.0
        return head - math.exp(-hi / lx) * d * exprel / lx
    return head - (math.exp(-hi / lx) - math.exp(-lo / lx - c * d)) / (lx * k)


class _Ordering:
    """One ordering term of the outage probability: physical user A plays
    user 1 (gain x, mean lx) and B plays user 2 (gain y, mean ly)."""

    def __init__(self, params: SystemParams, P: float, spec: QuadratureSpec):
        if not P > 0:
            raise ValueError(f"P_p must be positive for the analytic backend, got {P}")
        self.P = P
        self.spec = spec
        self.inner = spec.tighter(10.0)
        self.lx, self.ly, self.lz = params.lambda_A, params.lambda_B, params.lambda_z
        self.s1, self.s2 = params.sigma2_A, params.sigma2_B
        self.g1, self.g2 = params.gbar_A, params.gbar_B
        self.a = self.g1 + self.g1 * self.g2
        self.T = self.a + self.g2
        self.c1 = self.s1 * self.a
        self.c2 = self.s2 * self.g2
        self.rho = self.s1 / self.s2
        self.err = 0.0

    def _quad(self, f, a, b, **kw):
        r = integrate_1d(f, a, b, self.spec, **kw)
        self.err += r.error
        return r.value

    def _iquad(self, f, a, b, **kw):
        return integrate_1d(f, a, b, self.inner, **kw).value

    def _fy(self, y):
        return math.exp(-y / self.ly) / self.ly

    def _fx(self, x):
        return math.exp(-x / self.lx) / self.lx

    def _fz(self, z):
        return math.exp(-z / self.lz) / self.lz

    # NC

    def nc(self) -> float:
        P, lx, ly, rho = self.P, self.lx, self.ly, self.rho
        if self.T == 0:
            return 0.0
        k = rho / lx + 1.0 / ly
        y0 = self.c2 / P
        part1 = -math.expm1(-k * y0) / (ly * k)
        y1 = self.s2 * self.T / P

        def f(y):
            gap = P - self.c2 / y
            cut = math.exp(-self.c1 / (lx * gap)) if gap > 0 else 0.0
            return (math.exp(-rho * y / lx) - cut) * self._fy(y)

        return part1 + self._quad(f, y0, _clip(y0, y1, ly))

    # CR / IR

    def _theta(self, x, y):
        # cooperative gain at which relaying starts to pay off
        return 1.0 / (1.0 / y + self.s1 * self.g1 / (self.s2 * x))

    def _phi3(self, x, y):
        s1, s2, g1, g2, P = self.s1, self.s2, self.g1, self.g2, self.P
        return (g2 * s2 * (s2 / y - s1 / x)
                / ((P - s1 * self.T / x) * (s2 / y + s1 * g1 / x)))

    def q11(self) -> float:
        Y = self.c2 / self.P
        if Y == 0:
            return 0.0
        lx, ly, lz, rho, g1 = self.lx, self.ly, self.lz, self.rho, self.g1

        def f(u):
            p1 = 1.0 / ly + rho * u / lx
            p2 = p1 + u / (lz * (g1 + u))
            return h_gamma2(p1 * Y) - h_gamma2(p2 * Y)

        spec = QuadratureSpec(self.spec.abs_tol, self.spec.rel_tol,
                              self.spec.max_subdivisions, "algebraic")
        r = integrate_1d(f, 1.0, math.inf, spec, scale=lx / rho)
        scale = rho * Y * Y / (lx * ly)
        self.err += scale * r.error
        return scale * r.value

    def q12(self) -> float:
        P, lx, lz = self.P, self.lx, self.lz
        y0, y1 = self.c2 / P, self.s2 * self.T / P

        def outer(y):
            gap = P - self.c2 / y
            if gap <= 0:
                return 0.0
            x_hi = self.c1 / gap
            x_lo = self.rho * y
            if not x_hi > x_lo:
                return 0.0
            x_hi = _clip(x_lo, x_hi, lx)
            inner = self._iquad(lambda x: -math.expm1(-self._theta(x, y) / lz) * self._fx(x),
                                x_lo, x_hi)
            return inner * self._fy(y)

        return self._quad(outer, y0, _clip(y0, y1, self.ly))

    def q21(self) -> float:
        P, lx, lz = self.P, self.lx, self.lz
        x1 = self.s1 * self.T / P
        y1 = self.s2 * self.T / P

        def outer(y):
            x_lo = self.rho * y
            x_hi = _clip(x_lo, x1, lx)
            if not x_hi > x_lo:
                return 0.0
            inner = self._iquad(lambda x: math.exp(-self._theta(x, y) / lz) * self._fx(x),
                                x_lo, x_hi)
            return inner * self._fy(y)

        return self._quad(outer, 0.0, _clip(0.0, y1, self.ly))

    def q22(self) -> float:
        P, lz = self.P, self.lz
        x0 = self.s1 * self.T / P
        if self.g2 == 0:
            return 0.0

        def outer(x):
            gap = P - self.c1 / x
            if gap <= 0:
                return 0.0
            y_hi = _clip(0.0, self.c2 / gap, self.ly)

            def g(y):
                if y <= 0:
                    return 0.0
                return ((math.exp(-self._theta(x, y) / lz) - math.exp(-self._phi3(x, y) / lz))
                        * self._fy(y))

            return self._iquad(g, 0.0, y_hi) * self._fx(x)

        return self._quad(outer, x0, math.inf, scale=self.lx)

    def cr(self) -> float:
        if self.T == 0:
            return 0.0
        return self.q11() + self.q12() + self.q21() + self.q22()

    # BC

    def _low_inner(self, x, y_hi):
        """P(y < y_hi, z below the low-regime threshold) given x, as an erf form."""
        p = math.sqrt(self.c2 * self.lz / self.c1) * x / (2.0 * self.ly)
        s = math.sqrt(self.c1 / (self.c2 * self.lz)) * y_hi / x
        return -math.expm1(-y_hi / self.ly) + SQRT_PI * p * scaled_erf_difference(p, s)

    def i11(self) -> float:
        x1 = self.s1 * self.T / self.P
        lx = self.lx
        return self._quad(lambda x: self._fx(x) * self._low_inner(x, x / self.rho) if x > 0 else 0.0,
                          0.0, _clip(0.0, x1, lx))

    def i12(self) -> float:
        P = self.P
        x0 = self.s1 * self.T / P

        def f(x):
            gap = P - self.c1 / x
            if gap <= 0:
                return 0.0
            return self._fx(x) * self._low_inner(x, self.c2 / gap)

        return self._quad(f, x0, math.inf, scale=self.lx)

    def _phi9(self, z):
        return math.sqrt(self.c2 * z / self.c1)

    def _phi10(self, z):
        r = math.sqrt(self.c1 * z) + math.sqrt(self.c2)
        return r * r

    def _phi5(self):
        return self.s2 * self.a / (self.s1 * self.g2)

    def i21(self) -> float:
        P, lx, ly = self.P, self.lx, self.ly

        def f(z):
            if z <= 0:
                return 0.0
            f9 = self._phi9(z)
            X7 = self._phi10(z) / (P * (f9 + z))
            k = f9 / ly + 1.0 / lx
            inner = -math.expm1(-X7 / lx) + math.expm1(-k * X7) / (lx * k)
            return inner * self._fz(z)

        return self._quad(f, 0.0, self._phi5(), sqrt_endpoint=True)

    def i22(self) -> float:
        P, lx, ly = self.P, self.lx, self.ly

        def f(z):
            if z <= 0:
                return 0.0
            f10 = self._phi10(z)
            X7 = f10 / (P * (self._phi9(z) + z))
            X8 = f10 / (P * z)
            return _band(X7, X8, lx, z / ly) * self._fz(z)

        return self._quad(f, 0.0, self._phi5(), sqrt_endpoint=True)

    def i31(self) -> float:
        P, lx, ly, lz = self.P, self.lx, self.ly, self.lz
        D = lx * self.s2 / (ly * self.s1) + 1.0
        ex = math.exp(-self.s1 * self.T / (lx * P))
        ey = math.exp(-self.s2 * self.T / (ly * P))
        # written as 1 - ex - (1 - ex*ey)/D to avoid cancellation at high power
        body = -math.expm1(-self.s1 * self.T / (lx * P)) + (ex * ey - 1.0) / D
        return max(body, 0.0) * math.exp(-self._phi5() / lz)

    def i32(self) -> float:
        P, lx, ly = self.P, self.lx, self.ly
        x0 = self.s1 * self.T / P

        def f(z):
            X = self.T * (self.s2 + self.s1 * z) / (P * z)
            return _band(x0, X, lx, z / ly) * self._fz(z)

        return self._quad(f, self._phi5(), math.inf, scale=self.lz)

    def bc(self) -> float:
        if self.T == 0:
            return 0.0
        if self.g2 == 0:
            return self.nc()
        low_mid = 0.0
        if self.a > 0:
            low_mid = self.i11() + self.i12() + self.i21() + self.i22()
        return low_mid + self.i31() + self.i32()


def _analytic(params: SystemParams, P_p: float, which: str, spec: QuadratureSpec) -> Estimate:
    total, err = 0.0, 0.0
    for p in (params, params.swapped()):
        term = _Ordering(p, P_p, spec)
        total += getattr(term, which)()
        err += term.err
    return Estimate(min(max(total, 0.0), 1.0), 0.0, 0, "quadrature", err)


def sop_analytic_nc(params: SystemParams, P_p: float, spec: QuadratureSpec = DEFAULT_SPEC) -> Estimate:
    return _analytic(params, P_p, "nc", spec)


def sop_analytic_cr_ir(params: SystemParams, P_p: float, spec: QuadratureSpec = DEFAULT_SPEC) -> Estimate:
    return _analytic(params, P_p, "cr", spec)


def sop_analytic_bc(params: SystemParams, P_p: float, spec: QuadratureSpec = DEFAULT_SPEC) -> Estimate:
    return _analytic(params, P_p, "bc", spec)


def sop_analytic(params: SystemParams, scheme, P_p: float,
                 spec: QuadratureSpec = DEFAULT_SPEC) -> Estimate:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.NC:
        return sop_analytic_nc(params, P_p, spec)
    if scheme is Scheme.BC:
        return sop_analytic_bc(params, P_p, spec)
    return sop_analytic_cr_ir(params, P_p, spec)


def sop(params: SystemParams, scheme, P_p: float, method: str = "analytic", *,
        n: int = 10 ** 6, seed: int = 0) -> Estimate:
    """Dispatch to the Monte Carlo (``"mc"``) or quadrature (``"analytic"``) backend."""
    if method == "mc":
        return sop_monte_carlo(params, scheme, P_p, n, seed)
    if method == "analytic":
        return sop_analytic(params, scheme, P_p)
    raise ValueError(f"unknown method {method!r}; expected 'mc' or 'analytic'")
