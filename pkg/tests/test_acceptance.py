"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances are the stated ones. Runtimes are measured on one core.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from bcnoma.dmt import dmt_empirical
from bcnoma.model import ChannelRealization, OrderedChannel, SystemParams, order_users, sample_channels
from bcnoma.numerics import substream
from bcnoma.outage import simulate_outage, sop_analytic
from bcnoma.power import (GridSpec, bc_branch_values, bc_thresholds, cr_branch_values, cr_threshold,
                          min_power, oracle_min_power)
from bcnoma.rates import esr

DEFAULT = SystemParams()
SNR_31 = [float(s) for s in range(31)]

# CR searches two dimensions, so it zooms more often on a coarser grid
ORACLE_GRIDS = {"nc": GridSpec(2000, 1), "cr": GridSpec(128, 3), "bc": GridSpec(2000, 2)}


def _power(snr_db):
    return DEFAULT.sigma2_A * 10.0 ** (snr_db / 10.0)


def test_1_oracle_equivalence(acceptance):
    t0 = time.perf_counter()
    ch = sample_channels(DEFAULT, 10 ** 4, substream(2024, 0))
    ordered = [order_users(DEFAULT, ChannelRealization(*t)) for t in zip(ch.gA, ch.gB, ch.gz)]
    worst = {}
    for scheme, grid in ORACLE_GRIDS.items():
        err = 0.0
        for o in ordered:
            a = min_power(o, scheme).p_min
            q = oracle_min_power(o, scheme, grid).p_min
            err = max(err, abs(a - q) / a)
        worst[scheme] = err
    elapsed = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-3 and elapsed <= 120
    detail = ", ".join(f"{s} {e:.1e}" for s, e in worst.items())
    acceptance(1, ok, f"worst relative error {detail}; {elapsed:.0f} s")
    assert ok


def test_2_hand_values(acceptance):
    o = OrderedChannel.direct(2.0, 0.5, 1.0)
    want = {"nc": 3.0, "cr": 2.1, "bc": (2.0 * (2.0 * math.sqrt(0.5) + 1.0) + 1.0) / 2.5}
    got = {s: min_power(o, s).p_min for s in want}
    err = max(abs(got[s] - want[s]) / want[s] for s in want)
    ok = err <= 1e-9
    acceptance(2, ok, f"NC {got['nc']:.12g}, CR {got['cr']:.12g}, BC {got['bc']:.12g}; "
                      f"max relative error {err:.1e}")
    assert ok


def test_3_analytic_vs_monte_carlo(acceptance):
    t0 = time.perf_counter()
    snrs = [0.0, 10.0, 20.0, 30.0]
    counts = simulate_outage(DEFAULT, [_power(s) for s in snrs], 10 ** 7, 2024)
    worst, bad = 0.0, []
    for j, s in enumerate(snrs):
        for scheme in ("nc", "cr", "ir", "bc"):
            mc = counts.sop(scheme, j)
            z = abs(sop_analytic(DEFAULT, scheme, _power(s)).value - mc.value) / mc.std_error
            worst = max(worst, z)
            if z > 3:
                bad.append(f"{scheme}@{s:g}dB")
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed <= 600
    acceptance(3, ok, f"largest deviation {worst:.2f} std errors over 16 points"
                      + (f"; outside: {', '.join(bad)}" if bad else "") + f"; {elapsed:.0f} s")
    assert ok


def test_4_cooperative_outage_ordering(acceptance):
    bad = []
    for s in SNR_31:
        P = _power(s)
        nc = sop_analytic(DEFAULT, "nc", P).value
        cr = sop_analytic(DEFAULT, "cr", P).value
        ir = sop_analytic(DEFAULT, "ir", P).value
        bc = sop_analytic(DEFAULT, "bc", P).value
        if not (cr == ir and cr <= nc and bc <= nc):
            bad.append(s)
    ok = not bad
    acceptance(4, ok, "SOP(CR)=SOP(IR)<=SOP(NC) and SOP(BC)<=SOP(NC) at all 31 points"
               if ok else f"violated at {bad} dB")
    assert ok


def test_5_bc_rate_ordering(acceptance):
    bad = []
    for s in SNR_31:
        P = _power(s)
        if esr(DEFAULT, "bc", P).esr < esr(DEFAULT, "nc", P).esr:
            bad.append(f"analytic@{s:g}")
    counts = simulate_outage(DEFAULT, [_power(s) for s in SNR_31], 10 ** 6, 7)
    for j, s in enumerate(SNR_31):
        if counts.sop("bc", j).value > counts.sop("nc", j).value:
            bad.append(f"mc@{s:g}")
    ok = not bad
    acceptance(5, ok, "ESR(BC)>=ESR(NC) at all 31 points, analytic and Monte Carlo backends"
               if ok else f"violated at {bad}")
    assert ok


def test_6_high_snr_rate_limits(acceptance):
    P = _power(40.0)
    values = {s: esr(DEFAULT, s, P).esr for s in ("nc", "cr", "ir", "bc")}
    target = {"nc": 1.5, "cr": 0.75, "ir": 1.5, "bc": 1.5}
    ok = all(abs(values[s] - target[s]) <= 0.01 * target[s] for s in values)
    acceptance(6, ok, ", ".join(f"{s.upper()} {v:.4f}" for s, v in values.items()))
    assert ok


DMT_CASES = [("nc", 0.0, (0.85, 1.15)), ("bc", 0.0, (1.7, 2.3)), ("ir", 0.0, (1.7, 2.3)),
             ("nc", 0.2, (0.65, 0.95)), ("ir", 0.2, (1.0, 1.4))]


def test_7_dmt_slopes(acceptance):
    t0 = time.perf_counter()
    parts, ok = [], True
    for scheme, r, (lo, hi) in DMT_CASES:
        fit = dmt_empirical(DEFAULT, scheme, r, r, [30, 35, 40, 45, 50], 10 ** 7, seed=2024)
        inside = lo <= fit.slope <= hi
        ok &= inside
        parts.append(f"{scheme.upper()} r={r:g}: {fit.slope:.3f} in [{lo}, {hi}]"
                     + ("" if inside else " NO") + (f" ({fit.n_used}/5 pts)" if fit.excluded else ""))
    elapsed = time.perf_counter() - t0
    ok &= elapsed <= 1800
    acceptance(7, ok, "; ".join(parts) + f"; {elapsed:.0f} s")
    assert ok


def _random_params(rng):
    return SystemParams(lambda_A=rng.uniform(0.1, 5), lambda_B=rng.uniform(0.1, 5),
                        lambda_g=rng.uniform(0.1, 5), eta=rng.uniform(0.05, 1),
                        sigma2_A=rng.uniform(0.2, 5), sigma2_B=rng.uniform(0.2, 5),
                        R_A=rng.uniform(0.05, 3), R_B=rng.uniform(0.05, 3))


def test_8_regime_continuity(acceptance):
    rng = np.random.default_rng(8)
    worst = 0.0
    for _ in range(1000):
        p = _random_params(rng)
        o = order_users(p, ChannelRealization(rng.exponential(p.lambda_A), rng.exponential(p.lambda_B), 0.0))
        if not (o.x > 0 and o.y > 0):
            continue
        gaps = []
        t = cr_threshold(o)
        gaps.append(cr_branch_values(o, t))
        lo, hi = bc_thresholds(o)
        gaps.append(bc_branch_values(o, lo)[:2])
        gaps.append(bc_branch_values(o, hi)[1:])
        # p_min itself on both sides of every threshold
        for scheme, z in (("cr", t), ("bc", lo), ("bc", hi)):
            below = min_power(OrderedChannel(o.x, o.y, z * (1 - 1e-15), o.sigma2_1, o.sigma2_2,
                                             o.gbar1, o.gbar2), scheme).p_min
            above = min_power(OrderedChannel(o.x, o.y, z * (1 + 1e-15), o.sigma2_1, o.sigma2_2,
                                             o.gbar1, o.gbar2), scheme).p_min
            gaps.append((below, above))
        worst = max(worst, max(abs(a - b) / max(a, b) for a, b in gaps))
    ok = worst <= 1e-9
    acceptance(8, ok, f"largest relative jump {worst:.1e} over 1000 parameter sets")
    assert ok


def test_9_figure_determinism(acceptance, tmp_path):
    outs = []
    for name in ("first.csv", "second.csv"):
        path = tmp_path / name
        subprocess.run([sys.executable, "-m", "bcnoma.cli", "figure", "2", "--seed", "11",
                        "--out", str(path)], check=True)
        outs.append(path.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    acceptance(9, ok, f"two runs of figure 2, {len(outs[0])} bytes each, "
                      + ("identical" if ok else "different"))
    assert ok
