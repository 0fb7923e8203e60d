import math

import mpmath
import pytest
import scipy.integrate as si

from absbm.core import ConvergenceError, PrecisionError, SeriesBudget
from absbm.meijerg import (
    KernelQuery,
    W_SWITCH,
    kernel,
    kernel_contour,
    kernel_log_small_x,
    kernel_series,
    kernel_small_x_asymptotic,
)

LAMBDAS = [0.0, 1.0, 2.0, 3.0, 4.0, 1.5, 2.5, 3.5, 4.5, 5.0]
XGRID = [0.3, 0.55, 1.0, 1.8, 3.2, 5.6, 10.0, 17.0, 24.0, 30.0]


def test_query_validation():
    with pytest.raises(ValueError):
        KernelQuery(-1.0, 1.0)
    with pytest.raises(ValueError):
        KernelQuery(0.0, 0.0)


def test_cross_method_grid():
    budget = SeriesBudget.for_digits(25)
    for lam in LAMBDAS:
        for x in XGRID:
            a = kernel_series(KernelQuery(lam, x), budget)
            c = kernel_contour(KernelQuery(lam, x), budget)
            rel = abs(float(a.value - c.value)) / abs(float(c.value))
            assert rel < 1e-10, (lam, x, rel)


def test_dispatcher_bit_identical():
    budget = SeriesBudget.for_digits(17)
    for lam, x in ((0.0, 1.0), (1.5, 0.2), (2.0, 5.0)):
        q = KernelQuery(lam, x)
        d = kernel(q, budget)
        expected = kernel_series(q, budget) if q.w <= W_SWITCH else kernel_contour(q, budget)
        assert d.value == expected.value
        assert d.method == expected.method


def test_switch_boundary_agreement():
    x = math.sqrt(4.0 / 27.0)  # w = 1 exactly
    for lam in (0.0, 1.5, 3.0):
        a = kernel_series(KernelQuery(lam, x * 0.999))
        c = kernel_contour(KernelQuery(lam, x * 0.999))
        assert abs(a.value - c.value) <= 5 * (a.error_bound + c.error_bound + 1e-14)


def test_error_bound_at_unit_argument():
    r = kernel(KernelQuery(0.0, 1.0))
    assert r.error_bound < 1e-10
    ref = kernel_contour(KernelQuery(0.0, 1.0), SeriesBudget.for_digits(30))
    assert abs(r.value - float(ref.value)) < 1e-10


def test_positivity():
    for lam in (0.0, 0.5, 1.0, 2.5, 4.0, 5.0):
        for x in (0.05, 0.2, 0.7, 2.0, 8.0, 30.0):
            assert kernel(KernelQuery(lam, x)).value > 0.0


def test_normalization_integral():
    # int_0^inf K_0 = 1 (transform value at u = 0); analytic algebraic tail
    def k0(x):
        return kernel(KernelQuery(0.0, x)).value

    total = 0.0
    for a, b in ((0.0, 0.2), (0.2, 1.0), (1.0, 3.0), (3.0, 10.0), (10.0, 50.0),
                 (50.0, 200.0), (200.0, 1000.0)):
        v, _ = si.quad(k0, a, b, limit=300)
        total += v
    X = 1000.0
    tail = 0.0
    for m in range(1, 7):
        g = float(mpmath.rgamma(-2 * mpmath.mpf(m) / 3))
        tail += (-1) ** m / math.factorial(m) * g * (3.0 / (2 * m)) * X ** (-2 * m / 3.0)
    assert total + tail == pytest.approx(1.0, abs=1e-8)


def test_small_x_asymptote_trend():
    lam = 0.0
    devs = []
    for x in (0.08, 0.05, 0.02):
        r = kernel(KernelQuery(lam, x)).value
        a = kernel_small_x_asymptotic(KernelQuery(lam, x))
        devs.append(abs(r / a - 1.0))
    assert devs[0] > devs[1] > devs[2]
    # deviation shrinks like x^2
    assert devs[0] / devs[2] == pytest.approx((0.08 / 0.02) ** 2, rel=0.35)


def test_small_x_leading_exponent():
    # log K_0(x) is dominated by -1/z, z = 27 x^2/4, as x -> 0 (the remaining
    # algebraic prefactor grows only logarithmically)
    devs = []
    for x in (0.05, 0.02):
        z = 27 * x * x / 4
        r = kernel(KernelQuery(0.0, x), SeriesBudget.for_digits(30))
        lead = float(mpmath.log(mpmath.mpf(r.value)))
        devs.append(abs(lead / (-1.0 / z) - 1.0))
    assert devs[0] < 0.10
    assert devs[1] < devs[0]


def test_log_small_x_helper():
    q = KernelQuery(1.5, 0.05)
    assert kernel_log_small_x(1.5, 0.05) == pytest.approx(
        math.log(kernel_small_x_asymptotic(q)), rel=1e-12)


def test_series_cancellation_alarm():
    # forcing the series route deep into the small-x regime must alarm
    with pytest.raises(PrecisionError):
        kernel_series(KernelQuery(0.0, 0.02))


def test_contour_gives_up_honestly():
    # far beyond any sensible argument in high precision: explicit failure
    with pytest.raises(ConvergenceError):
        kernel_contour(KernelQuery(0.0, 2e-4), SeriesBudget.for_digits(40))
