import numpy as np
import pytest

from bcnoma.model import SystemParams
from bcnoma.outage import simulate_outage, sop_analytic_nc
from bcnoma.rates import EsrResult, esr, esr_from, p_ct_ir_analytic, p_ct_ir_monte_carlo

DEFAULT = SystemParams()
ASYM = SystemParams(lambda_A=0.7, lambda_B=1.6, lambda_g=2.0, eta=0.8,
                    sigma2_A=1.3, sigma2_B=0.6, R_A=0.4, R_B=1.2)


def test_p_ct_mc_limits():
    assert p_ct_ir_monte_carlo(DEFAULT, 1e9, 10 ** 5, 1).value == 0.0
    assert p_ct_ir_monte_carlo(DEFAULT, 1e-6, 10 ** 5, 1).value == 0.0
    assert p_ct_ir_monte_carlo(DEFAULT.with_(lambda_g=1e-15), 10.0, 10 ** 5, 1).value == 0.0


def test_p_ct_analytic_vanishing_link():
    assert p_ct_ir_analytic(DEFAULT.with_(lambda_g=1e-15), 10.0).value < 1e-12


@pytest.mark.parametrize("P", [1.0, 10.0, 100.0])
def test_p_ct_analytic_vs_mc(P):
    mc = p_ct_ir_monte_carlo(DEFAULT, P, 10 ** 7, 21)
    assert abs(p_ct_ir_analytic(DEFAULT, P).value - mc.value) <= 3 * mc.std_error


def test_p_ct_asymmetric_vs_mc():
    c = simulate_outage(ASYM, [2.0, 20.0], 4 * 10 ** 6, 22)
    for j, P in enumerate(c.powers):
        mc = c.p_ct(j)
        assert abs(p_ct_ir_analytic(ASYM, P).value - mc.value) <= 3 * mc.std_error


def test_p_ct_swap_symmetry():
    for P in (2.0, 30.0):
        assert p_ct_ir_analytic(ASYM, P).value == pytest.approx(
            p_ct_ir_analytic(ASYM.swapped(), P).value, rel=1e-10)


def test_p_ct_bounded_by_nc_outage():
    for s in range(0, 31, 5):
        P = 10 ** (s / 10)
        ct = p_ct_ir_analytic(DEFAULT, P).value
        assert 0 <= ct <= sop_analytic_nc(DEFAULT, P).value


def test_esr_formula_examples():
    assert esr_from(0.0, 0.0, 1.5) == 1.5
    assert esr_from(0.0, 1.0, 1.5) == 0.75
    with pytest.raises(ValueError):
        EsrResult(-0.1, None, None, None, "mc")


def test_esr_fixed_activation_terms():
    for s in ("nc", "bc"):
        assert esr(DEFAULT, s, 10.0).p_ct.value == 0.0
    assert esr(DEFAULT, "cr", 10.0).p_ct.value == 1.0
    r = esr(DEFAULT, "ir", 10.0, "mc", n=10 ** 5, seed=1)
    assert r.method == "mc" and r.p_out.method == r.p_ct.method == "mc"


def test_esr_rejects_bad_input():
    with pytest.raises(ValueError):
        esr(DEFAULT, "nc", 0.0)
    with pytest.raises(ValueError):
        esr(DEFAULT, "nc", 1.0, "exact")


@pytest.mark.parametrize("method", ["analytic", "mc"])
def test_bc_never_below_nc(method):
    for s in range(0, 41, 4):
        P = 10 ** (s / 10)
        a = esr(DEFAULT, "bc", P, method, n=10 ** 5, seed=3)
        b = esr(DEFAULT, "nc", P, method, n=10 ** 5, seed=3)
        assert a.esr >= b.esr
        assert 0 <= a.esr <= DEFAULT.R_A + DEFAULT.R_B


@pytest.mark.parametrize("lambda_g", [0.1, 0.5, 1.0])
def test_ir_never_below_nc_on_matched_backend(lambda_g):
    # with P_CT = P(NC fails, IR succeeds) = SOP_NC - SOP_IR the ratio
    # ESR_IR/ESR_NC = 1 + SOP_NC*P_CT/((1 - SOP_NC)(1 + P_CT)) >= 1
    p = DEFAULT.with_(lambda_g=lambda_g)
    for s in range(0, 41, 4):
        P = 10 ** (s / 10)
        assert esr(p, "ir", P).esr >= esr(p, "nc", P).esr * (1 - 1e-12)


def test_high_power_limits():
    P = 10 ** 4
    assert esr(DEFAULT, "cr", P).esr == pytest.approx(0.75, rel=0.01)
    for s in ("nc", "ir", "bc"):
        assert esr(DEFAULT, s, P).esr == pytest.approx(1.5, rel=0.01)
