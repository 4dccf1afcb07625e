"""System parameters, Rayleigh block-fading draws, user ordering and the
SINR/SNR expressions of the four downlink schemes.

Everything works on channel *power gains*; no complex samples are drawn.
The backscatter efficiency is folded into the user-to-user link, so the
cooperative gain ``z`` is ``eta * |g'|**2`` with mean ``eta * lambda_g``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .numerics import exponential


class Scheme(str, enum.Enum):
    NC = "nc"   # no cooperation
    CR = "cr"   # conventional relaying, always two slots
    IR = "ir"   # incremental relaying
    BC = "bc"   # backscatter cooperation

    @classmethod
    def parse(cls, value) -> "Scheme":
        if isinstance(value, Scheme):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(f"unknown scheme {value!r}; expected one of nc, cr, ir, bc") from None


ALL_SCHEMES = (Scheme.NC, Scheme.CR, Scheme.IR, Scheme.BC)


def threshold_snr(rate: float) -> float:
    """Decoding threshold 2**R - 1 for a target rate R in bit/s/Hz."""
    return 2.0 ** rate - 1.0


@dataclass(frozen=True)
class SystemParams:
    """Static configuration of the two-user downlink.

    Means and noise variances are linear. Rates may be zero (no decoding
    requirement); everything else must be strictly positive.
    """

    lambda_A: float = 1.0
    lambda_B: float = 0.5
    lambda_g: float = 0.5
    eta: float = 0.5
    sigma2_A: float = 1.0
    sigma2_B: float = 1.0
    R_A: float = 1.0
    R_B: float = 0.5
    P_p: float = 1.0

    def __post_init__(self):
        for name in ("lambda_A", "lambda_B", "lambda_g", "eta", "sigma2_A", "sigma2_B", "P_p"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v > 0):
                raise ValueError(f"{name} must be positive and finite, got {v!r}")
        if self.eta > 1:
            raise ValueError(f"eta must be in (0, 1], got {self.eta}")
        for name in ("R_A", "R_B"):
            v = getattr(self, name)
            if not (np.isfinite(v) and v >= 0):
                raise ValueError(f"{name} must be >= 0, got {v!r}")

    @property
    def gbar_A(self) -> float:
        return threshold_snr(self.R_A)

    @property
    def gbar_B(self) -> float:
        return threshold_snr(self.R_B)

    @property
    def lambda_z(self) -> float:
        """Mean of the efficiency-scaled cooperative gain."""
        return self.eta * self.lambda_g

    def swapped(self) -> "SystemParams":
        """Same system with the roles of users A and B exchanged."""
        return replace(self, lambda_A=self.lambda_B, lambda_B=self.lambda_A,
                       sigma2_A=self.sigma2_B, sigma2_B=self.sigma2_A,
                       R_A=self.R_B, R_B=self.R_A)

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class ChannelRealization:
    gA: float
    gB: float
    gz: float

    def __post_init__(self):
        if min(self.gA, self.gB, self.gz) < 0:
            raise ValueError("channel power gains must be nonnegative")


@dataclass(frozen=True)
class ChannelBatch:
    """Many fading blocks at once, as parallel arrays."""

    gA: np.ndarray
    gB: np.ndarray
    gz: np.ndarray

    def __len__(self):
        return len(self.gA)


@dataclass(frozen=True)
class OrderedChannel:
    """Per-block relabeling: user 1 has the larger noise-normalized gain."""

    x: float
    y: float
    z: float
    sigma2_1: float
    sigma2_2: float
    gbar1: float
    gbar2: float
    user1_is_A: bool = True

    @classmethod
    def direct(cls, x, y, z, sigma2_1=1.0, sigma2_2=1.0, gbar1=1.0, gbar2=1.0) -> "OrderedChannel":
        """Build an already-ordered channel; rejects an inverted pair."""
        if x / sigma2_1 < y / sigma2_2:
            raise ValueError("user 1 must have the larger normalized gain")
        return cls(float(x), float(y), float(z), float(sigma2_1), float(sigma2_2),
                   float(gbar1), float(gbar2), True)


def sample_channel(params: SystemParams, rng: np.random.Generator) -> ChannelRealization:
    """One fading block: independent exponential power gains (inverse CDF)."""
    u = rng.random(3)
    return ChannelRealization(
        gA=float(exponential(params.lambda_A, u[0])),
        gB=float(exponential(params.lambda_B, u[1])),
        gz=float(params.eta * exponential(params.lambda_g, u[2])),
    )


def sample_channels(params: SystemParams, n: int, rng: np.random.Generator) -> ChannelBatch:
    """``n`` fading blocks; consumes exactly 3*n uniforms."""
    u = rng.random((3, n))
    return ChannelBatch(
        gA=exponential(params.lambda_A, u[0]),
        gB=exponential(params.lambda_B, u[1]),
        gz=params.eta * exponential(params.lambda_g, u[2]),
    )


def order_users(params: SystemParams, ch: ChannelRealization) -> OrderedChannel:
    # ties go to A so that runs stay reproducible
    if ch.gA / params.sigma2_A >= ch.gB / params.sigma2_B:
        return OrderedChannel(ch.gA, ch.gB, ch.gz, params.sigma2_A, params.sigma2_B,
                              params.gbar_A, params.gbar_B, True)
    return OrderedChannel(ch.gB, ch.gA, ch.gz, params.sigma2_B, params.sigma2_A,
                          params.gbar_B, params.gbar_A, False)


@dataclass(frozen=True)
class SinrSet:
    """Linear SINRs/SNRs of one block under one allocation.

    ``g11``, ``g12``, ``g22`` are the direct-phase values and are always
    present. ``g22_mrc`` is set for CR/IR, the ``*_bt`` values for BC.
    """

    g11: float
    g12: float
    g22: float
    g22_mrc: Optional[float] = None
    g11_bt: Optional[float] = None
    g12_bt: Optional[float] = None
    g22_bt: Optional[float] = None

    def user_values(self, scheme: Scheme) -> tuple[float, float, float]:
        """(user-1 own SNR, user-1 SINR on x2, user-2 SINR on x2) that decide outage."""
        scheme = Scheme.parse(scheme)
        if scheme is Scheme.NC:
            return self.g11, self.g12, self.g22
        if scheme in (Scheme.CR, Scheme.IR):
            return self.g11, self.g12, self.g22_mrc
        return self.g11_bt, self.g12_bt, self.g22_bt

    def satisfies(self, gbar1: float, gbar2: float, scheme: Scheme, rel_slack: float = 0.0) -> bool:
        s11, s12, s22 = self.user_values(scheme)
        lo = 1.0 - rel_slack
        return s11 >= gbar1 * lo and s12 >= gbar2 * lo and s22 >= gbar2 * lo


def _sic_sinr(p_sig, p_int, gain, noise):
    return p_sig * gain / (p_int * gain + noise)


def evaluate_sinrs(ord: OrderedChannel, alloc, scheme) -> SinrSet:
    """SINRs of the ordered block under ``alloc`` (a ``PowerAllocation``).

    For BC the user-2 value is the in-phase lower bound, i.e. the direct and
    backscattered powers add: effective gain y + beta1*x*z.
    """
    scheme = Scheme.parse(scheme)
    P1, P2, Ph, beta = alloc.P1, alloc.P2, alloc.P_h, alloc.beta1
    if min(P1, P2, Ph) < 0:
        raise ValueError("powers must be nonnegative")
    if not 0.0 <= beta < 1.0:
        raise ValueError(f"beta1 must lie in [0, 1), got {beta}")
    x, y, z = ord.x, ord.y, ord.z
    s1, s2 = ord.sigma2_1, ord.sigma2_2

    g11 = P1 * x / s1
    g12 = _sic_sinr(P2, P1, x, s1)
    g22 = _sic_sinr(P2, P1, y, s2)
    if scheme is Scheme.NC:
        return SinrSet(g11, g12, g22)
    if scheme in (Scheme.CR, Scheme.IR):
        return SinrSet(g11, g12, g22, g22_mrc=g22 + Ph * z / s2)
    x_eff = x * (1.0 - beta)
    y_eff = y + beta * x * z
    return SinrSet(g11, g12, g22,
                   g11_bt=P1 * x_eff / s1,
                   g12_bt=_sic_sinr(P2, P1, x_eff, s1),
                   g22_bt=_sic_sinr(P2, P1, y_eff, s2))
