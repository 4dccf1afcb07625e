"""Minimum total transmit power per fading block for NC, CR, IR and BC,
plus a brute-force grid search used as an independent check.

All closed forms take an :class:`~bcnoma.model.OrderedChannel` (user 1 is
the stronger user). A block with a zero direct gain cannot be served at any
power; the solvers then return a result with ``feasible=False`` and no
numeric power rather than an infinity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from . import kernels
from .model import OrderedChannel, Scheme

BETA_CAP = 1.0 - 1e-9


@dataclass(frozen=True)
class PowerAllocation:
    P1: float
    P2: float
    P_h: float = 0.0
    beta1: float = 0.0

    def __post_init__(self):
        if min(self.P1, self.P2, self.P_h) < 0:
            raise ValueError(f"negative power in allocation {self}")
        if not 0.0 <= self.beta1 < 1.0:
            raise ValueError(f"beta1 must lie in [0, 1), got {self.beta1}")

    @property
    def total(self) -> float:
        return self.P1 + self.P2 + self.P_h

    def feasible_under(self, P_p: float) -> bool:
        return self.total <= P_p

    @property
    def p2_below_p1(self) -> bool:
        """Diagnostic: the optimum gives the weaker user less power than the stronger one."""
        return self.P2 < self.P1


@dataclass(frozen=True)
class MinPowerResult:
    """Outcome of a minimum-power solve.

    ``regime`` names the branch that produced the value, e.g. ``"bc-mid"``.
    ``activated`` is only filled in by :func:`min_power_ir` when a power
    budget is supplied.
    """

    p_min: Optional[float]
    alloc: Optional[PowerAllocation]
    regime: str
    scheme: Scheme
    activated: Optional[bool] = None

    @property
    def feasible(self) -> bool:
        return self.p_min is not None

    def in_outage(self, P_p: float) -> bool:
        return not self.feasible or self.p_min > P_p


def _infeasible(scheme: Scheme) -> MinPowerResult:
    return MinPowerResult(None, None, "infeasible", scheme)


def _dead(ord: OrderedChannel) -> bool:
    return not (ord.x > 0 and ord.y > 0)


def _sums(ord: OrderedChannel):
    g1, g2 = ord.gbar1, ord.gbar2
    a = g1 + g1 * g2
    return a, a + g2


def _p_nc(ord: OrderedChannel) -> float:
    a, _ = _sums(ord)
    return ord.sigma2_1 * a / ord.x + ord.sigma2_2 * ord.gbar2 / ord.y


def min_power_nc(ord: OrderedChannel) -> MinPowerResult:
    if _dead(ord):
        return _infeasible(Scheme.NC)
    p = _p_nc(ord)
    p1 = ord.sigma2_1 * ord.gbar1 / ord.x
    return MinPowerResult(p, PowerAllocation(p1, max(p - p1, 0.0)), "nc", Scheme.NC)


# CR / IR -----------------------------------------------------------------

def cr_threshold(ord: OrderedChannel) -> float:
    """Cooperative gain above which relaying lowers the required power."""
    return 1.0 / (1.0 / ord.y + ord.sigma2_1 * ord.gbar1 / (ord.sigma2_2 * ord.x))


def cr_branch_values(ord: OrderedChannel, z: float) -> tuple[float, float]:
    """Both branch expressions of the CR minimum power evaluated at gain ``z``."""
    x, y, s1, s2, g1, g2 = ord.x, ord.y, ord.sigma2_1, ord.sigma2_2, ord.gbar1, ord.gbar2
    _, T = _sums(ord)
    w = s1 * g1 / (s2 * x) + 1.0 / y
    direct = _p_nc(ord)
    relayed = s1 * T / x + g2 * (s2 / y - s1 / x) / (z * w)
    return direct, relayed


def min_power_cr(ord: OrderedChannel, _scheme: Scheme = Scheme.CR) -> MinPowerResult:
    if _dead(ord):
        return _infeasible(_scheme)
    x, y, z, s1, s2, g1, g2 = ord.x, ord.y, ord.z, ord.sigma2_1, ord.sigma2_2, ord.gbar1, ord.gbar2
    p1 = s1 * g1 / x
    if z <= cr_threshold(ord):
        p = _p_nc(ord)
        return MinPowerResult(p, PowerAllocation(p1, max(p - p1, 0.0)),
                              f"{_scheme.value}-direct", _scheme)
    _, relayed = cr_branch_values(ord, z)
    w = s1 * g1 / (s2 * x) + 1.0 / y
    ph = (s2 * g2 / y - s1 * g2 / x) / (w * z)
    return MinPowerResult(relayed, PowerAllocation(p1, max(relayed - p1 - ph, 0.0), ph),
                          f"{_scheme.value}-relayed", _scheme)


def min_power_ir(ord: OrderedChannel, P_p: Optional[float] = None) -> MinPowerResult:
    """Same minimum power as CR. With ``P_p`` the result also says whether the
    cooperative slot would be used: only when the direct phase alone cannot
    meet the budget but cooperation can."""
    res = min_power_cr(ord, Scheme.IR)
    if P_p is None:
        return res
    nc = min_power_nc(ord)
    active = nc.in_outage(P_p) and not res.in_outage(P_p)
    return MinPowerResult(res.p_min, res.alloc, res.regime, Scheme.IR, active)


def ir_activated(ord: OrderedChannel, P_p: float) -> bool:
    return bool(min_power_ir(ord, P_p).activated)


# BC ------------------------------------------------------------------------

def bc_thresholds(ord: OrderedChannel) -> tuple[float, float]:
    """(lower, upper) cooperative-gain thresholds separating the three BC regimes."""
    a, _ = _sums(ord)
    s1, s2, g2 = ord.sigma2_1, ord.sigma2_2, ord.gbar2
    if g2 == 0:
        return math.inf, math.inf
    lower = (ord.y / ord.x) ** 2 * s1 * a / (s2 * g2)
    upper = s2 * a / (s1 * g2)
    return lower, upper


def bc_branch_values(ord: OrderedChannel, z: float) -> tuple[float, float, float]:
    """(low, mid, high) BC expressions at cooperative gain ``z``."""
    a, T = _sums(ord)
    x, y, s1, s2, g2 = ord.x, ord.y, ord.sigma2_1, ord.sigma2_2, ord.gbar2
    c1, c2 = s1 * a, s2 * g2
    denom = x * z + y
    mid = (c1 * (2.0 * math.sqrt(c2 * z / c1) + z) + c2) / denom if c1 > 0 else math.nan
    high = T * (s2 + s1 * z) / denom
    return _p_nc(ord), mid, high


def bc_beta_candidates(ord: OrderedChannel) -> tuple[float, float]:
    """(stationary point, equalizing point) of the BC reflection coefficient."""
    a, _ = _sums(ord)
    x, y, z, s1, s2, g2 = ord.x, ord.y, ord.z, ord.sigma2_1, ord.sigma2_2, ord.gbar2
    r = math.sqrt(s2 * g2 * z / (s1 * a)) if a > 0 else math.inf
    stationary = (r - y / x) / (r + z) if math.isfinite(r) else 1.0
    equalizing = (s2 * x - s1 * y) / (s2 * x + s1 * x * z)
    return stationary, equalizing


def bc_objective(ord: OrderedChannel, beta: float) -> float:
    """Total power needed at a fixed reflection coefficient (optimal P1, P2)."""
    x, y, z, s1, s2, g1, g2 = ord.x, ord.y, ord.z, ord.sigma2_1, ord.sigma2_2, ord.gbar1, ord.gbar2
    xe = x * (1.0 - beta)
    p1 = s1 * g1 / xe
    return p1 + p1 * g2 + max(s1 * g2 / xe, s2 * g2 / (y + beta * x * z))


def min_power_bc(ord: OrderedChannel) -> MinPowerResult:
    if _dead(ord):
        return _infeasible(Scheme.BC)
    lower, upper = bc_thresholds(ord)
    z = ord.z
    low, mid, high = bc_branch_values(ord, z)
    if z <= lower:
        p, beta, regime = low, 0.0, "bc-low"
    elif z >= upper:
        p, beta, regime = high, bc_beta_candidates(ord)[1], "bc-high"
    else:
        p, beta, regime = mid, bc_beta_candidates(ord)[0], "bc-mid"
    beta = min(max(beta, 0.0), BETA_CAP)
    p1 = ord.sigma2_1 * ord.gbar1 / (ord.x * (1.0 - beta))
    return MinPowerResult(p, PowerAllocation(p1, max(p - p1, 0.0), 0.0, beta), regime, Scheme.BC)


def min_power(ord: OrderedChannel, scheme) -> MinPowerResult:
    scheme = Scheme.parse(scheme)
    if scheme is Scheme.NC:
        return min_power_nc(ord)
    if scheme is Scheme.CR:
        return min_power_cr(ord)
    if scheme is Scheme.IR:
        return min_power_ir(ord)
    return min_power_bc(ord)


# grid oracle -----------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Resolution of the brute-force search: ``points`` per dimension, then
    ``refinements`` zoom passes of the same size around the best cell."""

    points: int = 2000
    refinements: int = 1
    beta_cap: float = BETA_CAP

    def __post_init__(self):
        if self.points < 3:
            raise ValueError("grid needs at least 3 points per dimension")
        if self.refinements < 0:
            raise ValueError("refinements must be >= 0")


def _nc_total(ord: OrderedChannel, p1: float) -> Optional[float]:
    # direct rearrangement of the three decoding conditions for a given P1
    if p1 * ord.x / ord.sigma2_1 < ord.gbar1:
        return None
    p2 = ord.gbar2 * max(p1 + ord.sigma2_1 / ord.x, p1 + ord.sigma2_2 / ord.y)
    return p1 + p2


def _cr_total(ord: OrderedChannel, p1: float, ph: float) -> float:
    # smallest P2 meeting both user-2 conditions at fixed (P1, P_h)
    lift = max(0.0, ord.gbar2 - ph * ord.z / ord.sigma2_2)
    p2 = max(ord.gbar2 * (p1 + ord.sigma2_1 / ord.x), lift * (p1 + ord.sigma2_2 / ord.y))
    return p1 + p2 + ph


def _search_bound(ord: OrderedChannel, scheme: Scheme) -> float:
    """Total power of a feasible point found on doubling ladders.

    Any optimum uses at most this much power in each coordinate. The P1
    ladder stops at the first feasible rung; for CR/IR a second ladder over
    P_h keeps the bound within a small factor of the optimum even when the
    direct link to user 2 is very weak.
    """
    p1 = 0.0
    t = _nc_total(ord, p1)
    p1 = ord.sigma2_1 / ord.x * 2.0 ** -40
    while t is None:
        p1 *= 2.0
        t = _nc_total(ord, p1)
    if scheme in (Scheme.CR, Scheme.IR):
        ph = t
        while ph > t * 2.0 ** -60:
            t = min(t, _cr_total(ord, p1, ph))
            ph *= 0.5
    return max(t, 1e-300)


def oracle_min_power(ord: OrderedChannel, scheme, grid: GridSpec = GridSpec()) -> MinPowerResult:
    """Exhaustive grid minimum of the total power.

    NC searches P1 (P2 at its binding value), CR/IR searches (P1, P_h),
    BC searches the reflection coefficient with the power split solved
    directly for each candidate.
    """
    scheme = Scheme.parse(scheme)
    if _dead(ord):
        return _infeasible(scheme)
    x, y, z, s1, s2, g1, g2 = ord.x, ord.y, ord.z, ord.sigma2_1, ord.sigma2_2, ord.gbar1, ord.gbar2
    if scheme is Scheme.NC:
        p, p1, p2 = kernels.oracle_nc(x, y, s1, s2, g1, g2, _search_bound(ord, scheme),
                                      grid.points, grid.refinements)
        alloc = PowerAllocation(p1, p2)
    elif scheme in (Scheme.CR, Scheme.IR):
        p, p1, p2, ph = kernels.oracle_cr(x, y, z, s1, s2, g1, g2, _search_bound(ord, scheme),
                                          grid.points, grid.refinements)
        alloc = PowerAllocation(p1, p2, ph)
    else:
        p, p1, p2, beta = kernels.oracle_bc(x, y, z, s1, s2, g1, g2,
                                            grid.points, grid.refinements, grid.beta_cap)
        alloc = PowerAllocation(p1, p2, 0.0, beta)
    if not math.isfinite(p):
        return _infeasible(scheme)
    return MinPowerResult(p, alloc, "oracle", scheme)
