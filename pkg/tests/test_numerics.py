import math

import mpmath
import numpy as np
import pytest

from bcnoma.numerics import (QuadratureError, QuadratureSpec, erf, erfc_scaled, exp_stream,
                             h_gamma2, integrate_1d, parallel_map, scaled_erf_difference,
                             substream, worker_count)


def test_simple_integrals():
    r = integrate_1d(lambda x: math.exp(-x), 0.0, math.inf)
    assert abs(r.value - 1.0) <= 1e-10
    assert integrate_1d(lambda x: 2 * x, 0.0, 1.0).value == pytest.approx(1.0, rel=1e-14)
    assert integrate_1d(math.sin, 1.0, 1.0).value == 0.0


def test_bessel_identity():
    # int_0^inf exp(-a/x - b x) dx = 2 sqrt(a/b) K1(2 sqrt(ab))
    a = b = 1.0
    r = integrate_1d(lambda x: math.exp(-a / x - b * x) if x > 0 else 0.0, 0.0, math.inf)
    ref = float(2 * mpmath.sqrt(a / b) * mpmath.besselk(1, 2 * mpmath.sqrt(a * b)))
    assert abs(r.value - ref) <= 1e-8


@pytest.mark.parametrize("f,a,b,exact", [
    (lambda x: math.exp(-3 * x), 0.0, math.inf, 1 / 3),
    (lambda x: 1 / math.sqrt(x) if x > 0 else 0.0, 0.0, 4.0, 4.0),
    (lambda x: math.erf(x) * math.exp(-x), 0.0, math.inf, math.exp(0.25) * math.erfc(0.5)),
    (lambda x: math.exp(-x * x), 0.0, 5.0, math.sqrt(math.pi) / 2 * math.erf(5.0)),
])
def test_error_bound_covers_true_error(f, a, b, exact):
    r = integrate_1d(f, a, b)
    assert abs(r.value - exact) <= max(r.error, 1e-14) * 10 or abs(r.value - exact) < 1e-12


def test_sqrt_endpoint_substitution():
    f = lambda x: math.exp(-x) / math.sqrt(x) if x > 0 else 0.0
    r = integrate_1d(f, 0.0, 1.0, sqrt_endpoint=True)
    assert r.value == pytest.approx(math.sqrt(math.pi) * math.erf(1.0), rel=1e-12)


def test_algebraic_tail():
    spec = QuadratureSpec(semi_infinite_transform="algebraic")
    r = integrate_1d(lambda x: 1 / (1 + x) ** 3, 0.0, math.inf, spec)
    assert r.value == pytest.approx(0.5, rel=1e-12)
    r = integrate_1d(lambda x: 1 / (1 + x) ** 2, 0.0, math.inf, spec)
    assert abs(r.value - 1.0) <= max(10 * r.error, 1e-12)


def test_power_law_tail_on_log_map_is_reported():
    # the log map is for exponential tails; a slow power-law tail must not pass silently
    with pytest.raises(QuadratureError):
        integrate_1d(lambda x: 1 / (1 + x) ** 2, 0.0, math.inf)


def test_quadrature_errors():
    with pytest.raises(ValueError):
        integrate_1d(math.exp, 1.0, 0.0)
    with pytest.raises(QuadratureError) as exc:
        integrate_1d(lambda x: math.sin(1 / x) / x if x else 0.0, 0.0, 1.0,
                     QuadratureSpec(1e-15, 1e-15, 5))
    assert math.isfinite(exc.value.value)
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0)


def test_tighter():
    s = QuadratureSpec().tighter(10)
    assert s.abs_tol == pytest.approx(1e-14) and s.rel_tol == pytest.approx(1e-11)


def test_erf_reference_values():
    assert erf(0.0) == 0.0
    assert erf(math.inf) == 1.0
    assert abs(erf(1.0) - 0.8427007929497149) < 1e-15
    for x in (0.1, 0.7, 1.9, 3.3, 5.0):
        assert erf(x) == pytest.approx(float(mpmath.erf(x)), rel=1e-15)
        assert erf(-x) == -erf(x)


def test_erfc_scaled_against_mpmath():
    for x in (0.0, 0.5, 3.0, 30.0, 3e3):
        ref = float(mpmath.exp(mpmath.mpf(x) ** 2) * mpmath.erfc(x))
        assert erfc_scaled(x) == pytest.approx(ref, rel=1e-14)


def test_scaled_erf_difference_no_overflow():
    for p, s in ((0.3, 0.4), (2.0, 1.0), (40.0, 0.5), (1e3, 1e-3)):
        with mpmath.workdps(40):
            # erf(p) - erf(p+s) = erfc(p+s) - erfc(p); mpmath's exponent range is unbounded
            p_ = mpmath.mpf(p)
            ref = float(mpmath.exp(p_ ** 2) * (mpmath.erfc(p_ + s) - mpmath.erfc(p_)))
        assert scaled_erf_difference(p, s) == pytest.approx(ref, rel=1e-12)


def test_h_gamma2_branches():
    for t in (1e-8, 0.1, 0.2499, 0.25, 1.0, 40.0):
        with mpmath.workdps(50):
            t_ = mpmath.mpf(t)
            ref = float((1 - (1 + t_) * mpmath.exp(-t_)) / t_ ** 2)
        assert h_gamma2(t) == pytest.approx(ref, rel=1e-14)


def test_exp_stream_mean_and_determinism():
    s = exp_stream(1.0, seed=9)
    x = s.draw(10 ** 6)
    assert abs(x.mean() - 1.0) < 0.004
    a, b = exp_stream(2.0, 4, 1), exp_stream(2.0, 4, 1)
    np.testing.assert_array_equal(a.draw(1000), b.draw(1000))
    c = exp_stream(1.0, 4, 3)
    first = np.concatenate([c.draw(3), c.draw(2)])
    np.testing.assert_array_equal(first, exp_stream(1.0, 4, 3).draw(5))
    assert next(iter(exp_stream(1.0, 4, 3))) == first[0]


def test_streams_uncorrelated():
    a = exp_stream(1.0, 11, 0).draw(10 ** 5)
    b = exp_stream(1.0, 11, 1).draw(10 ** 5)
    assert abs(np.corrcoef(a, b)[0, 1]) < 0.01


def test_exp_stream_rejects_bad_mean():
    with pytest.raises(ValueError):
        exp_stream(0.0, 1)


def test_substream_distinct():
    assert substream(1, 0).random() != substream(1, 1).random()
    assert substream(1, 0).random() == substream(1, 0).random()


def test_worker_env(monkeypatch):
    monkeypatch.setenv("BCNOMA_WORKERS", "3")
    assert worker_count() == 3
    monkeypatch.setenv("BCNOMA_WORKERS", "x")
    with pytest.raises(ValueError):
        worker_count()


def test_parallel_map_order():
    assert parallel_map(abs, [-3, 2, -1], workers=2) == [3, 2, 1]
    assert parallel_map(abs, [-3, 2, -1], workers=1) == [3, 2, 1]
