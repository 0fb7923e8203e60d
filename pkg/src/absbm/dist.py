"""Density, distribution function, and quantiles of the absolute-value integral.

Both functions are double series over the Ai' zeros: the outer index counts
zeros, the inner one powers of the drift; each term carries an inverse-Laplace
kernel K_j (density) or K_{j+3/2} (distribution).  The outer series is
truncated adaptively through the geometric remainder bound
|h_K h_{K+1}| / (|h_K| - |h_{K+1}|); once the bound cannot be met within the
term cap, evaluation switches to the large-deviation tail estimate, and below
the kernel-underflow floor to the small-deviation one.

Everything is computed for the unit-dispersion process and rescaled, so the
dispersion scaling law holds exactly by construction, and drift enters only
through theta = mu^2 t/(2 sigma^2), making mu-evenness exact as well.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .core import (
    NATIVE_DIGITS,
    ConvergenceError,
    DriftParams,
    EvalResult,
    RegimeError,
    SeriesBudget,
    working_ctx,
    to_native,
)
from . import asymptotics, specfun
from .meijerg import KernelQuery, kernel
from .specfun import AiryPrimeZeroTable

DEFAULT_KMAX = 24
_UNDERFLOW_W = 700.0  # k=1 kernel exponent below double range


def default_zero_table(n: int = DEFAULT_KMAX + 2) -> AiryPrimeZeroTable:
    return specfun.airy_ai_prime_zeros(n)


def _dist_budget(budget: SeriesBudget | None) -> SeriesBudget:
    if budget is None:
        return SeriesBudget(max_terms=400, abs_tol=1e-4, rel_tol=1e-4)
    return budget


def _series_terms(xs, p: DriftParams, shift: float, zeros: AiryPrimeZeroTable,
                  budget: SeriesBudget, kmax: int):
    """Yield the outer-series terms h_k for the unit-dispersion process."""
    digits = budget.precision_digits
    with working_ctx(digits) as ctx:
        t = ctx.mpf(p.t)
        b = ctx.mpf(p.b)
        theta = b * b * t / 2
        pref = ctx.exp(-theta)
        for k in range(1, kmax + 2):
            hk = ctx.mpf(0)
            for j in range(0, k):
                m = k - j
                if digits > NATIVE_DIGITS:
                    a = -specfun.zero_mp(m, digits)
                else:
                    a = -ctx.mpf(zeros[m])
                c32 = t ** ctx.mpf("1.5") * a ** ctx.mpf("1.5") / ctx.sqrt(2)
                y = xs / c32
                kv = kernel(KernelQuery(float(j) + shift, float(y)), budget).value
                ai = specfun.ai_at_zero(m, digits)
                term = ((theta * a) ** j * specfun.ai_partial_moment(m, j, digits=digits)
                        / (a * ai * ctx.factorial(2 * j)))
                if shift == 0.0:
                    term = term / c32
                hk += term * kv
            yield pref * hk


def _geometric_eval(x: float, p: DriftParams, shift: float,
                    zeros: AiryPrimeZeroTable, budget: SeriesBudget, kmax: int):
    """Sum outer terms until the geometric remainder bound meets tolerance.

    Returns (value, bound, K, converged).
    """
    xs = x / p.sigma
    tol_abs = float(budget.abs_tol)
    tol_rel = float(budget.rel_tol)
    total = None
    prev_mag = None
    k = 0
    last_mag = math.inf
    for hk in _series_terms(xs, p, shift, zeros, budget, kmax):
        total = hk if total is None else total + hk
        mag = abs(hk)
        k += 1
        if prev_mag is not None and mag < prev_mag:
            bound = prev_mag * mag / (prev_mag - mag)
            if bound < max(tol_abs, tol_rel * abs(total)):
                return total, bound, k - 1, True
        prev_mag = mag
        last_mag = mag
        if k >= kmax + 1:
            break
    return total, float(last_mag), k, False


def _dist_mean_std(p: DriftParams):
    from . import moments

    st = moments.stats(p)
    return float(st[0]), math.sqrt(max(float(st[1]), 1e-12))


@lru_cache(maxsize=512)
def _tail_calibration(p_key, shift: float, tol: float):
    """Relative tail-vs-series deviation at the largest x where the series
    still meets tol.  Feeds the (heuristic, labelled) tail error bound."""
    mu, sigma, t = p_key
    p = DriftParams(mu=mu, sigma=sigma, t=t)
    zeros = default_zero_table()
    budget = SeriesBudget(max_terms=400, abs_tol=tol, rel_tol=tol)
    mean, sd = _dist_mean_std(p)
    for c in (5.0, 4.0, 3.0, 2.5, 2.0):
        x_sw = mean + c * sd
        val, _, _, ok = _geometric_eval(x_sw, p, shift, zeros, budget, DEFAULT_KMAX)
        if not ok:
            continue
        if shift == 0.0:
            tail = asymptotics.pdf_large_x(x_sw, p)
            delta = abs(float(val) / p.sigma - tail) / max(tail, 1e-300)
        else:
            tail = asymptotics.cdf_tail_large_x(x_sw, p)
            delta = abs((1.0 - float(val)) - tail) / max(tail, 1e-300)
        return x_sw, max(delta, 1e-12)
    return mean + 2.0 * sd, 1.0


def _small_x_floor(p: DriftParams) -> float:
    a1 = -default_zero_table(2)[1]
    # x at which w of the k=1 kernel reaches the double-underflow exponent
    y1 = math.sqrt(4.0 / (27.0 * _UNDERFLOW_W))
    return y1 * (p.t * a1) ** 1.5 / math.sqrt(2.0) * p.sigma


def pdf(x: float, p: DriftParams, zeros: AiryPrimeZeroTable = None,
        budget: SeriesBudget = None, kmax: int = DEFAULT_KMAX) -> EvalResult:
    """Density of the absolute-value integral at x > 0."""
    return _dist_eval(x, p, 0.0, zeros, budget, kmax)


def cdf(x: float, p: DriftParams, zeros: AiryPrimeZeroTable = None,
        budget: SeriesBudget = None, kmax: int = DEFAULT_KMAX) -> EvalResult:
    """Distribution function of the absolute-value integral at x > 0."""
    return _dist_eval(x, p, 1.5, zeros, budget, kmax)


def _dist_eval(x: float, p: DriftParams, shift: float,
               zeros: AiryPrimeZeroTable, budget: SeriesBudget, kmax: int):
    if not (x > 0 and math.isfinite(x)):
        raise ValueError("x must be positive and finite")
    budget = _dist_budget(budget)
    zeros = zeros or default_zero_table(max(kmax + 2, DEFAULT_KMAX + 2))
    digits = budget.precision_digits

    if digits <= NATIVE_DIGITS and x < _small_x_floor(p):
        # k=1 kernel underflows the double range: small-deviation estimate,
        # assembled in log space
        if shift == 0.0:
            val = asymptotics.pdf_small_x(x, p)
        else:
            val = asymptotics.cdf_small_x(x, p)
        return EvalResult(val, abs(val), 1, "tail-small-x")

    value, bound, K, ok = _geometric_eval(x, p, shift, zeros, budget, kmax)
    if ok:
        tag = "series-mu0" if p.mu == 0 else "series"
        val = value / p.sigma if shift == 0.0 else value
        return EvalResult(to_native(val, digits), float(bound), K, tag)

    # outer series not geometric by the cap: tail estimate for genuinely
    # large x, otherwise the best value with its honest bound
    mean, sd = _dist_mean_std(p)
    if x > mean + 1.5 * sd:
        x_sw, delta = _tail_calibration((p.mu, p.sigma, p.t), shift,
                                        float(budget.abs_tol))
        decay = (x_sw / x) ** (2 if p.mu == 0 else 1)
        if shift == 0.0:
            tl = asymptotics.pdf_large_x(x, p)
            return EvalResult(tl, tl * delta * decay, 0, "tail-large-x")
        tl = asymptotics.cdf_tail_large_x(x, p)
        return EvalResult(1.0 - tl, tl * delta * decay, 0, "tail-large-x")
    val = value / p.sigma if shift == 0.0 else value
    return EvalResult(to_native(val, digits), float(bound), K, "series",
                      truncated=True)


def truncation_k(x: float, p: DriftParams, zeros: AiryPrimeZeroTable = None,
                 tol: float = 1e-4, kmax: int = DEFAULT_KMAX,
                 budget: SeriesBudget = None, shift: float = 0.0) -> int:
    """Smallest K whose geometric remainder bound is below tol at this x."""
    zeros = zeros or default_zero_table(max(kmax + 2, DEFAULT_KMAX + 2))
    digits = budget.precision_digits if budget else NATIVE_DIGITS
    bd = SeriesBudget(max_terms=400, abs_tol=tol, rel_tol=tol,
                      precision_digits=digits)
    _, bound, K, ok = _geometric_eval(x, p, shift, zeros, bd, kmax)
    if not ok:
        raise RegimeError(
            f"geometric regime not reached by K={kmax} at x={x} (last term {bound:.3g})")
    return K


def pdf_mu0_reduced(x: float, p: DriftParams, zeros: AiryPrimeZeroTable = None,
                    kmax: int = DEFAULT_KMAX, tol: float = 1e-12) -> float:
    """Driftless density through the confluent-hypergeometric spelling.

    Independent of the kernel machinery: each term carries two 1F1 values,
    evaluated through the e^z transformation so the series stay
    positive-term.  Cross-check route for pdf at mu = 0.
    """
    if p.mu != 0:
        raise ValueError("reduced route is the mu = 0 spelling")
    zeros = zeros or default_zero_table(max(kmax + 2, DEFAULT_KMAX + 2))
    from mpmath import fp

    sigma, t = p.sigma, p.t
    pre = sigma ** (4.0 / 3.0) * t / (math.sqrt(3.0) * 2 ** (2.0 / 3.0)
                                      * math.pi * x ** (7.0 / 3.0))
    g43 = math.gamma(4.0 / 3.0)
    g23 = math.gamma(2.0 / 3.0)
    total = 0.0
    prev = math.inf
    for k in range(1, kmax + 2):
        a = zeros[k]
        eta = 2 * sigma ** 2 * t ** 3 * a ** 3 / (27 * x * x)  # negative
        if eta < -700:
            break
        e = math.exp(eta)
        f1, _, _, _ = specfun._hyp_series([fp.mpf(1) / 6], [fp.mpf(4) / 3], -eta,
                                          fp, fp.eps / 4, 100000)
        f2, _, _, _ = specfun._hyp_series([-fp.mpf(1) / 6], [fp.mpf(2) / 3], -eta,
                                          fp, fp.eps / 4, 100000)
        br = (g43 * t * (-a) * e * f1
              + 2 ** (1.0 / 3.0) * g23 * (x / sigma) ** (2.0 / 3.0) * e * f2)
        hk = specfun.ai_partial_moment(k, 0) / specfun.ai_at_zero(k) * br
        total += hk
        mag = abs(hk)
        if mag < prev and prev * mag / (prev - mag) < tol * max(1.0, abs(total)):
            break
        prev = mag
    return pre * total


def quantile(q: float, p: DriftParams, zeros: AiryPrimeZeroTable = None,
             budget: SeriesBudget = None, tol: float = 1e-6) -> float:
    """x with cdf(x) = q, by bracket growth and Brent root-finding."""
    from scipy.optimize import brentq

    if not (0.0 < q < 1.0):
        raise ValueError("q must lie in (0, 1)")
    if budget is None:
        budget = SeriesBudget(max_terms=400, abs_tol=tol / 20.0, rel_tol=tol / 20.0)
    zeros = zeros or default_zero_table()
    mean, sd = _dist_mean_std(p)
    floor = _small_x_floor(p) * 1.05

    def f(x):
        return cdf(x, p, zeros, budget).value - q

    lo = max(floor, mean - 2.0 * sd)
    hi = mean + 2.0 * sd
    flo, fhi = f(lo), f(hi)
    tries = 0
    while flo > 0 and tries < 60:
        if lo <= floor:
            break
        lo = max(lo * 0.5, floor)
        flo = f(lo)
        tries += 1
    while fhi < 0 and tries < 120:
        hi *= 1.5
        fhi = f(hi)
        tries += 1
    if not (flo <= 0 <= fhi):
        raise ConvergenceError(
            f"quantile bracket failed for q={q} (f ends {flo:.2e}, {fhi:.2e})")
    return float(brentq(f, lo, hi, xtol=1e-13, rtol=8.9e-16, maxiter=200))
