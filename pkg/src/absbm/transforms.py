"""Space Laplace transform E e^{-u X_t} in its three series forms.

* ``laplace_large_u``  — the drifted double series over Ai' zeros (asymptotic
  in u: accurate for moderate-to-large |u|, unusable near u = 0);
* ``laplace_mu0``      — its single-sum driftless reduction;
* ``laplace_small_u``  — the moment series sum M(n) (-u)^n / n!, convergent
  near u = 0 (also serves as the characteristic function for imaginary u).

``overlap_interval`` locates a real-u window where the large-u and small-u
routes are simultaneously trustworthy, by scanning term decay of both.
"""

from __future__ import annotations

import math

from mpmath import mp

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
from . import specfun
from .specfun import AiryPrimeZeroTable

DEFAULT_K = 24          # outer truncation of the large-u series
SMALL_U_TERMS = 40
SMALL_U_DIGITS = 40


def _transform_budget(budget: SeriesBudget | None) -> SeriesBudget:
    if budget is None:
        return SeriesBudget(max_terms=DEFAULT_K, abs_tol=1e-12, rel_tol=1e-12)
    return budget


def _cbrt_u2(u, ctx):
    # ((sigma u)^2 / 2)^{1/3} with principal branches, Re u > 0
    return (u * u / 2) ** (ctx.mpf(1) / 3)


def laplace_large_u(u, p: DriftParams, zeros: AiryPrimeZeroTable = None,
                    budget: SeriesBudget = None) -> EvalResult:
    """Drifted large-|u| series; raises RegimeError when terms grow (small |u|)."""
    budget = _transform_budget(budget)
    if p.mu == 0:
        return laplace_mu0(u, p, zeros, budget)
    return _laplace_series(u, p, budget, driftless=False)


def laplace_mu0(u, p: DriftParams, zeros: AiryPrimeZeroTable = None,
                budget: SeriesBudget = None) -> EvalResult:
    """Driftless single series (any mu in DriftParams is ignored here)."""
    budget = _transform_budget(budget)
    return _laplace_series(u, p, budget, driftless=True)


def _laplace_series(u, p: DriftParams, budget: SeriesBudget, driftless: bool):
    digits = budget.precision_digits
    kmax = budget.max_terms
    with working_ctx(digits) as ctx:
        is_cplx = isinstance(u, complex) or (hasattr(u, "imag") and u.imag != 0)
        uu = ctx.mpc(u) if is_cplx else ctx.mpf(u)
        if (uu.real if is_cplx else uu) <= 0:
            raise ValueError("need Re u > 0")
        sig = ctx.mpf(p.sigma)
        t = ctx.mpf(p.t)
        b = ctx.mpf(p.b)
        theta = b * b * t / 2
        root = _cbrt_u2(sig * uu, ctx)
        upow = (2 * sig ** 4 * uu) ** (ctx.mpf(2) / 3)
        total = ctx.mpf(0)
        prev_mag = None
        grow = 0
        bound = None
        for k in range(1, kmax + 1):
            hk = ctx.mpf(0)
            jtop = 1 if driftless else k
            for j in range(0, jtop):
                m = k - j
                if digits > NATIVE_DIGITS:
                    a = specfun.zero_mp(m, digits)
                else:
                    a = ctx.mpf(specfun.airy_ai_prime_zeros(m)[m])
                ai = specfun.ai_at_zero(m, digits)
                num = ctx.exp(root * t * a) * specfun.ai_partial_moment(m, j, digits=digits)
                den = (-a) * ai * ctx.factorial(2 * j)
                if j:
                    num = num * (p.mu * p.mu) ** j / upow ** j
                hk += num / den
            total += hk
            mag = abs(hk)
            if prev_mag is not None:
                if mag > prev_mag:
                    grow += 1
                    if grow >= 3:
                        raise RegimeError(
                            f"large-u series terms grow at |u|={abs(complex(uu)):.3g}; "
                            "use the small-u (moment) series")
                else:
                    grow = 0
                    bound = prev_mag * mag / (prev_mag - mag) if mag < prev_mag else mag
                    if bound < max(float(budget.abs_tol),
                                   float(budget.rel_tol) * abs(total)):
                        val = (1 if driftless else ctx.exp(-theta)) * total
                        return EvalResult(to_native(val, digits), float(bound), k,
                                          "series-mu0" if driftless else "series")
            prev_mag = mag
        val = (1 if driftless else ctx.exp(-theta)) * total
        return EvalResult(to_native(val, digits), float(prev_mag), kmax,
                          "series-mu0" if driftless else "series", truncated=True)


def laplace_small_u(u, p: DriftParams, budget: SeriesBudget = None) -> EvalResult:
    """Moment series sum_n M(n) (-u)^n / n!; valid near u = 0, complex u allowed."""
    from . import moments

    budget = budget or SeriesBudget(max_terms=SMALL_U_TERMS, abs_tol=1e-12,
                                    rel_tol=1e-12, precision_digits=SMALL_U_DIGITS)
    digits = max(budget.precision_digits, SMALL_U_DIGITS)
    nmax = min(budget.max_terms if budget.max_terms > 4 else SMALL_U_TERMS, 60)
    if u == 0:
        return EvalResult(1.0, 0.0, 1, "small-u")
    with working_ctx(digits) as ctx:
        is_cplx = isinstance(u, complex) or (hasattr(u, "imag") and u.imag != 0)
        uu = ctx.mpc(u) if is_cplx else ctx.mpf(u)
        total = ctx.mpf(1)
        tol = max(float(budget.abs_tol), 10.0 ** (-(digits - 5)))
        decay_run = 0
        prev_mag = None
        nfact = ctx.mpf(1)
        for n in range(1, nmax + 1):
            nfact *= n
            mom = moments.moment(n, p, digits=digits).value
            term = ctx.mpf(mom) * (-uu) ** n / nfact
            total += term
            mag = abs(term)
            if prev_mag is not None and mag < prev_mag:
                decay_run += 1
                if mag <= tol * max(1.0, abs(total)) and decay_run >= 3:
                    return EvalResult(to_native(total, budget.precision_digits),
                                      float(mag), n, "small-u")
            else:
                decay_run = 0
            prev_mag = mag
        if decay_run >= 3:
            return EvalResult(to_native(total, budget.precision_digits),
                              float(prev_mag), nmax, "small-u", truncated=True)
    raise ConvergenceError(
        f"moment series shows no term decay by n={nmax} at |u|={abs(complex(u)):.3g}: "
        "outside the empirical convergence radius")


def overlap_interval(p: DriftParams, zeros: AiryPrimeZeroTable = None,
                     budget: SeriesBudget = None, u_grid=None):
    """Real-u values where both transform routes converge, and the agreement
    tolerance-ready pairs.  Returns (us, large_vals, small_vals)."""
    if u_grid is None:
        u_grid = [0.5 * 1.25 ** i for i in range(16)]
    us, lv, sv = [], [], []
    for u in u_grid:
        try:
            a = laplace_large_u(u, p, zeros, budget)
            b = laplace_small_u(u, p)
        except (RegimeError, ConvergenceError):
            continue
        if a.truncated or b.truncated:
            continue
        if a.error_bound < 1e-8:
            us.append(u)
            lv.append(a.value)
            sv.append(b.value)
    return us, lv, sv
