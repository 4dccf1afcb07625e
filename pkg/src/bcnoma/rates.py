"""Expected sum rate and the probability that IR uses its cooperative slot."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .model import Scheme, SystemParams
from .numerics import DEFAULT_SPEC, QuadratureSpec
from .outage import Estimate, _clip, _Ordering, simulate_outage, sop_analytic


class _Activation(_Ordering):

    def p_ct(self) -> float:
        """P(direct phase fails, relaying succeeds, A is user 1)."""
        P, lz = self.P, self.lz
        if self.T == 0 or self.g2 == 0:
            return 0.0
        x0 = self.s1 * self.T / P

        def outer(x):
            gap = P - self.c1 / x
            if gap <= 0:
                return 0.0
            y_hi = _clip(0.0, self.c2 / gap, self.ly)

            def g(y):
                if y <= 0:
                    return 0.0
                return math.exp(-self._phi3(x, y) / lz) * self._fy(y)

            return self._iquad(g, 0.0, y_hi) * self._fx(x)

        return self._quad(outer, x0, math.inf, scale=self.lx)


def p_ct_ir_monte_carlo(params: SystemParams, P_p: float, n: int, seed: int) -> Estimate:
    return simulate_outage(params, [P_p], n, seed).p_ct(0)


def p_ct_ir_analytic(params: SystemParams, P_p: float, spec: QuadratureSpec = DEFAULT_SPEC) -> Estimate:
    total, err = 0.0, 0.0
    for p in (params, params.swapped()):
        term = _Activation(p, P_p, spec)
        total += term.p_ct()
        err += term.err
    return Estimate(min(max(total, 0.0), 1.0), 0.0, 0, "quadrature", err)


@dataclass(frozen=True)
class EsrResult:
    esr: float
    p_out: Estimate
    p_ct: Estimate
    scheme: Scheme
    method: str

    def __post_init__(self):
        if self.esr < 0:
            raise ValueError("expected sum rate cannot be negative")


def esr_from(p_out: float, p_ct: float, rate_sum: float) -> float:
    """(1 - P_out) (R_A + R_B) / (1 + P_CT)."""
    return (1.0 - p_out) * rate_sum / (1.0 + p_ct)


def _fixed(value: float, method: str) -> Estimate:
    return Estimate(value, 0.0, 0, method)


def esr(params: SystemParams, scheme, P_p: float, method: str = "analytic", *,
        n: int = 10 ** 6, seed: int = 0) -> EsrResult:
    """Expected sum rate of ``scheme`` with outage and activation
    probabilities both taken from the ``method`` backend."""
    scheme = Scheme.parse(scheme)
    if not P_p > 0:
        raise ValueError(f"P_p must be positive, got {P_p}")
    if method == "mc":
        counts = simulate_outage(params, [P_p], n, seed)
        p_out = counts.sop(scheme, 0)
        ct = counts.p_ct(0) if scheme is Scheme.IR else None
    elif method == "analytic":
        p_out = sop_analytic(params, scheme, P_p)
        ct = p_ct_ir_analytic(params, P_p) if scheme is Scheme.IR else None
    else:
        raise ValueError(f"unknown method {method!r}; expected 'mc' or 'analytic'")
    if ct is None:
        ct = _fixed(1.0 if scheme is Scheme.CR else 0.0, p_out.method)
    value = esr_from(p_out.value, ct.value, params.R_A + params.R_B)
    return EsrResult(value, p_out, ct, scheme, method)
