import math
from fractions import Fraction

import mpmath
import pytest
import scipy.integrate as si
from scipy.stats import norm

from absbm.core import DriftParams
from absbm import moments as mo
from absbm import mcoracle


# ---------------------------------------------------------------------------
# coefficient tables


def test_c2_leading_value():
    co = mo.airy_coeffs(6)
    assert co.c2[0] == 1
    # reflection-formula oracle: Gamma(5/6) Gamma(1/6) = 2 pi, so the k = 0
    # product formula collapses to exactly 1
    assert math.gamma(5 / 6) * math.gamma(1 / 6) == pytest.approx(2 * math.pi, rel=1e-14)
    assert co.c2[1] == Fraction(-5, 48)


def test_c1_ratio():
    co = mo.airy_coeffs(4)
    assert co.c1[1] == Fraction(7, -5) * co.c2[1]
    assert co.c1[0] == 1 and co.c1_recip[0] == 1


def test_reciprocal_series_cauchy_identity():
    co = mo.airy_coeffs(12)
    for k in range(1, 13):
        s = sum(co.c1[m] * co.c1_recip[k - m] for m in range(0, k + 1))
        assert s == 0  # exact rational arithmetic


# ---------------------------------------------------------------------------
# index polynomials


def _poly_oracle(i, j):
    """(9/4)^j [s^i] g(s)^{2j} with g(s) = sum_m (G(5/3)/G(5/3-m)/m!) s^{m-1},
    the regularized-power construction, in exact rationals."""
    coeffs = []
    p = Fraction(1)
    for m in range(1, i + 2):
        p *= Fraction(5, 3) - m
        coeffs.append(p / math.factorial(m))
    acc = [Fraction(1)] + [Fraction(0)] * i
    for _ in range(2 * j):
        out = [Fraction(0)] * (i + 1)
        for a, va in enumerate(acc):
            if va == 0:
                continue
            for b, vb in enumerate(coeffs):
                if a + b > i:
                    break
                out[a + b] += va * vb
        acc = out
    return Fraction(9, 4) ** j * acc[i]


def test_index_polynomials_base_cases():
    polys = mo.index_polynomials(6)
    assert polys[0].coefficients == (Fraction(1),)
    for i in range(7):
        assert polys[i](0) == (1 if i == 0 else 0)


def test_index_polynomial_linear_term():
    # hand evaluation of the m = 1 recurrence term gives P_1(j) = -j/3
    polys = mo.index_polynomials(1)
    assert polys[1].coefficients == (Fraction(0), Fraction(-1, 3))


def test_index_polynomials_against_power_construction():
    polys = mo.index_polynomials(6)
    for i in range(7):
        for j in range(6):
            assert polys[i](j) == _poly_oracle(i, j), (i, j)


def test_rational_coefficients():
    for poly in mo.index_polynomials(8):
        assert all(isinstance(c, Fraction) for c in poly.coefficients)


# ---------------------------------------------------------------------------
# sigma series


def test_sigma_series_theta_zero():
    for n, l, i in ((2, 1, 0), (3, 2, 1), (4, 4, 4)):
        v = float(mo.sigma_series(n, l, i, 0.0, digits=25))
        expect = math.factorial(l) / math.gamma(1.5 * n + 1) * (1 if i == 0 else 0)
        assert v == pytest.approx(expect, rel=1e-14, abs=1e-20)


def test_sigma_series_i0_is_2f2():
    from absbm.specfun import HyperSeriesSpec, pfq
    from absbm.core import SeriesBudget

    n, l, th = 2, 1, 0.7
    f = pfq(HyperSeriesSpec(((l + 1) / 2, l / 2 + 1), (0.5, 1.5 * n + 1), th),
            SeriesBudget.for_digits(30)).value
    val = float(f) * math.factorial(l) / math.gamma(1.5 * n + 1)
    assert float(mo.sigma_series(n, l, 0, th, digits=30)) == pytest.approx(val, rel=1e-13)


def test_sigma_series_dual_route():
    for (n, l, i, th) in ((2, 1, 1, 0.5), (3, 2, 2, 1.0), (5, 4, 2, 1.7), (4, 3, 1, 2.0)):
        a = mpmath.mpf(mo.sigma_series(n, l, i, th, digits=30))
        b = mpmath.mpf(mo.sigma_series_recursion(n, l, i, th, digits=30))
        assert abs(a - b) <= 1e-12 * max(1.0, abs(b)), (n, l, i, th)


# ---------------------------------------------------------------------------
# moments against the published table rows


TABLE_SPOTS = [
    (0.0, 1, 0.5319230405), (0.0, 4, 0.3527343750), (0.0, 9, 2.228265881),
    (1.0, 2, 0.6245573959), (1.0, 3, 0.7058625313), (1.0, 10, 27.27829330),
    (1.5, 2, 0.9356522379), (1.5, 7, 9.795274998),
    (2.0, 7, 23.84966824), (2.0, 10, 267.4234795),
]


@pytest.mark.parametrize("mu,n,expect", TABLE_SPOTS)
def test_moment_table_spots(mu, n, expect):
    digits = 60 if n >= 5 and mu != 0 else 25
    v = float(mo.moment(n, DriftParams(mu), digits=digits).value)
    assert v == pytest.approx(expect, rel=5e-10)


def test_moment_mu0_exact_fraction():
    # driftless even orders are exact rationals; n = 4 must equal 903/2560
    r4 = mo.driftless_moment_fraction(4)
    # the remaining factor sigma^n t^{3n/2}/(2^{n/2} Gamma(3n/2 + 1)) at
    # sigma = t = 1, n = 4 equals 1/(4 * 720)
    assert r4 / (4 * math.factorial(6)) == Fraction(903, 2560)


def test_closed_moments_match_tables():
    cm = mo.closed_moments(DriftParams(1.5), digits=30)
    assert float(cm[1].value) == pytest.approx(0.8500968398, rel=1e-9)
    assert float(cm[2].value) == pytest.approx(0.9356522379, rel=1e-9)
    cm = mo.closed_moments(DriftParams(2.0), digits=30)
    assert float(cm[3].value) == pytest.approx(2.048717191, rel=1e-9)
    assert float(cm[4].value) == pytest.approx(3.393732065, rel=1e-9)


def test_mean_against_direct_integral():
    # Fubini oracle: E X_t = int_0^t E|mu s + sigma W_s| ds with the folded
    # normal mean under the integral
    for mu, sigma, t in ((1.0, 1.0, 1.0), (1.5, 0.7, 1.3), (0.4, 2.0, 0.6)):
        def folded_mean(s):
            if s == 0:
                return 0.0
            m, sd = mu * s, sigma * math.sqrt(s)
            return m * (1 - 2 * norm.cdf(-m / sd)) + 2 * sd * norm.pdf(m / sd)

        val, _ = si.quad(folded_mean, 0, t, limit=200)
        got = float(mo.closed_moments(DriftParams(mu, sigma, t))[1].value)
        assert got == pytest.approx(val, rel=1e-9)
        assert float(mo.moment(1, DriftParams(mu, sigma, t)).value) == pytest.approx(val, rel=1e-9)


def test_route_agreement_sample_grid():
    for mu in (0.1, 1.0, 4.0):
        for sigma, t in ((1.0, 1.0), (0.5, 2.0), (2.0, 0.5)):
            p = DriftParams(mu, sigma, t)
            cl = mo.closed_moments(p, digits=25)
            for n in range(1, 5):
                a = mpmath.mpf(mo.moment(n, p, digits=25).value)
                b = mpmath.mpf(cl[n].value)
                assert abs(a - b) <= 1e-12 * abs(b), (mu, sigma, t, n)


def test_mu_to_zero_continuity():
    p_small = DriftParams(1e-6)
    p_zero = DriftParams(0.0)
    for n in range(1, 9):
        a = float(mo.moment(n, p_small, digits=25).value)
        b = float(mo.moment_mu0(n, p_zero, digits=25).value)
        assert abs(a - b) <= 1e-8 * abs(b)


def test_evenness_exact():
    for n in (1, 3, 6):
        a = mo.moment(n, DriftParams(1.3), digits=20).value
        b = mo.moment(n, DriftParams(-1.3), digits=20).value
        assert a == b


def test_log_convexity():
    for mu in (0.0, 1.0, 2.0):
        p = DriftParams(mu)
        ms = [float(mo.moment(n, p, digits=30).value) for n in range(11)]
        for n in range(1, 10):
            assert ms[n] ** 2 <= ms[n - 1] * ms[n + 1] * (1 + 1e-12)


def test_positivity_and_unit_mass():
    assert float(mo.moment(0, DriftParams(2.0)).value) == 1.0
    for n in range(1, 8):
        assert float(mo.moment(n, DriftParams(0.7)).value) > 0


def test_moments_vs_mc(mc_mu1):
    p = DriftParams(1.0)
    for n in range(1, 5):
        est, se = mcoracle.empirical_moment(mc_mu1, n)
        exact = float(mo.moment(n, p).value)
        assert abs(est - exact) < 3 * se, (n, est, exact, se)


# ---------------------------------------------------------------------------
# statistics and extremal constants


def test_driftless_extremal_constants():
    st = mo.stats(DriftParams(0.0))
    skew_max = 8 * (4480 - 1257 * math.pi) / (35 * (27 * math.pi - 64) ** 1.5)
    ekurt_max = (3 * (858112 * math.pi - 33453 * math.pi ** 2 - 2293760)
                 / (280 * (27 * math.pi - 64) ** 2))
    assert st[2] == pytest.approx(skew_max, abs=1e-9)
    assert st[2] == pytest.approx(1.277368533, abs=1e-9)
    assert st[3] == pytest.approx(ekurt_max, abs=1e-9)
    assert st[3] == pytest.approx(1.776923532, abs=1e-9)


def test_ekurt_at_two():
    assert mo.stats(DriftParams(2.0))[3] == pytest.approx(-0.2165605388, abs=1e-9)


def test_skewness_positive_on_grid():
    for mu in (0.0, 0.5, 1.0, 2.0, 4.0):
        for sigma, t in ((1.0, 1.0), (0.5, 2.0)):
            assert mo.stats(DriftParams(mu, sigma, t))[2] > 0


def test_ekurt_interior_minimum():
    mu_star, val = mo.ekurt_minimum()
    assert 0.1 < mu_star < 5.9
    assert val == pytest.approx(-0.2621350996, abs=1e-6)


# ---------------------------------------------------------------------------
# large-order asymptotics


def test_moment_asymptotic_driftless_trend():
    p = DriftParams(0.0)
    devs = []
    for n in (10, 20, 40):
        r = float(mo.moment_mu0(n, p, digits=40).value) / mo.moment_asymptotic(n, p)
        devs.append(abs(r - 1))
    assert devs[0] > devs[1] > devs[2]


def test_moment_asymptotic_drift_envelope():
    p = DriftParams(1.0)
    devs = {}
    for n in (20, 30):
        r = float(mo.moment(n, p, digits=90).value) / mo.moment_asymptotic(n, p)
        devs[n] = abs(r - 1)
    assert devs[30] < devs[20]
    assert devs[20] < 10.0 / 20  # O(1/n) envelope with a generous constant


def test_moment_asymptotic_sign():
    assert mo.moment_asymptotic(1, DriftParams(2.0, 0.5, 1.5)) > 0
