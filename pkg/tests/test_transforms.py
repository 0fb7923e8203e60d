import math

import numpy as np
import pytest
import scipy.integrate as si

from absbm.core import ConvergenceError, DriftParams, RegimeError, SeriesBudget
from absbm import dist, transforms


def test_driftless_collapse():
    # the drifted double series at mu -> 0 collapses to the single series
    p_tiny = DriftParams(1e-9)
    p_zero = DriftParams(0.0)
    a = transforms.laplace_large_u(5.0, p_tiny)
    b = transforms.laplace_mu0(5.0, p_zero)
    assert abs(a.value - b.value) < 1e-10


def test_large_u_vs_density_quadrature():
    p = DriftParams(1.0)
    budget = SeriesBudget(max_terms=400, abs_tol=1e-10, rel_tol=1e-10)
    val, _ = si.quad(lambda x: math.exp(-5 * x) * dist.pdf(x, p, budget=budget).value,
                     1e-4, 4.0, limit=200)
    got = transforms.laplace_large_u(5.0, p).value
    assert got == pytest.approx(val, abs=1e-8)


def test_mu0_against_mc(mc_mu0):
    samples = mc_mu0.sorted_samples
    est = float(np.mean(np.exp(-samples)))
    se = float(np.std(np.exp(-samples), ddof=1) / math.sqrt(len(samples)))
    got = transforms.laplace_mu0(1.0, DriftParams(0.0)).value
    assert abs(got - est) < 3 * se


def test_monotone_decay_to_zero():
    p = DriftParams(1.0)
    vals = [transforms.laplace_large_u(u, p).value for u in (2.0, 5.0, 20.0, 80.0)]
    assert all(0 < v <= 1 for v in vals)
    assert all(vals[i] > vals[i + 1] for i in range(len(vals) - 1))


def test_evenness_in_mu():
    a = transforms.laplace_large_u(3.0, DriftParams(1.2)).value
    b = transforms.laplace_large_u(3.0, DriftParams(-1.2)).value
    assert a == b
    c = transforms.laplace_small_u(1.5, DriftParams(0.8)).value
    d = transforms.laplace_small_u(1.5, DriftParams(-0.8)).value
    assert c == d


def test_small_u_at_origin_and_derivative():
    p = DriftParams(1.0)
    assert transforms.laplace_small_u(0.0, p).value == 1.0
    h = 1e-6
    fh = transforms.laplace_small_u(h, p).value
    deriv = (1.0 - float(fh)) / h
    assert deriv == pytest.approx(0.6826894921, abs=1e-5)


def test_small_u_vs_density_quadrature():
    p = DriftParams(1.0)
    budget = SeriesBudget(max_terms=400, abs_tol=1e-10, rel_tol=1e-10)
    val, _ = si.quad(lambda x: math.exp(-x) * dist.pdf(x, p, budget=budget).value,
                     1e-4, 4.5, limit=200)
    got = transforms.laplace_small_u(1.0, p).value
    assert float(got) == pytest.approx(val, abs=1e-7)


def test_route_overlap_agreement():
    for mu in (0.0, 1.0, 2.0):
        p = DriftParams(mu)
        us, lv, sv = transforms.overlap_interval(p)
        assert len(us) >= 2, f"no overlap window found for mu={mu}"
        for u, a, b in zip(us, lv, sv):
            assert abs(float(a) - float(b)) < 1e-6, (mu, u)


def test_log_slope_matches_first_zero():
    # log fbar(u) ~ (u^2/2)^{1/3} t alpha'_1 for u -> infinity
    from absbm import specfun

    p = DriftParams(0.0)
    a1 = specfun.airy_ai_prime_zeros(1)[1]
    us = np.linspace(50.0, 200.0, 12)
    xs = np.array([(u * u / 2.0) ** (1.0 / 3.0) for u in us])
    ys = np.array([math.log(transforms.laplace_mu0(u, p).value) for u in us])
    slope = np.polyfit(xs, ys, 1)[0]
    assert slope == pytest.approx(a1 * p.t, rel=0.01)


def test_small_u_regime_alarm():
    with pytest.raises(RegimeError):
        transforms.laplace_large_u(0.05, DriftParams(1.0))


def test_small_u_radius_alarm():
    with pytest.raises(ConvergenceError):
        transforms.laplace_small_u(50.0, DriftParams(1.0))


def test_characteristic_function_modulus():
    p = DriftParams(1.0)
    for w in (0.5, 1.5):
        val = transforms.laplace_small_u(complex(0.0, w), p).value
        assert abs(complex(val)) <= 1.0 + 1e-12


def test_requires_positive_real_part():
    with pytest.raises(ValueError):
        transforms.laplace_large_u(-1.0, DriftParams(1.0))
