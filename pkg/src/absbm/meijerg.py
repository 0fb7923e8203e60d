"""Inverse-Laplace kernels K_lambda(x) = (1/2 pi i) int e^{ux - u^{2/3}} u^{-2 lambda/3} du.

These are the Meijer G-function factors of the density (lambda = j) and
distribution (lambda = j + 3/2) series.  Two independent evaluation routes:

* ``kernel_contour`` — midpoint quadrature of the Bromwich integral over a
  cotangent-shaped (Talbot) contour, node-doubling until the N-vs-N/2
  discrepancy is below tolerance.  The contour radius switches to the saddle
  radius (2/(3x))^3 of ux - u^{2/3} once w = 4/(27x^2) >= 2; the standard
  Talbot radius 2N/(5x) is unusable there because e^{-u^{2/3}} grows along
  the contour tails.
* ``kernel_series`` — convergent expansion of the equivalent G^{3,0}_{2,3}
  into three entire 2F2 series (simple-pole Slater expansion).

``kernel`` dispatches between them at w = 1 and is what the distribution
series consume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from mpmath import fp, mp

from .core import (
    NATIVE_DIGITS,
    ConvergenceError,
    EvalResult,
    PrecisionError,
    SeriesBudget,
    working_ctx,
    to_native,
)
from .specfun import _hyp_series, _mag10

W_SWITCH = 1.0        # series route for w <= W_SWITCH, contour beyond
_W_SADDLE = 1.0       # contour radius switches to the saddle radius here
_MIN_NODES = 32
_MAX_NODES = 4096


@dataclass(frozen=True)
class KernelQuery:
    """lambda >= 0 (j for pdf terms, j + 3/2 for cdf terms) and x > 0."""

    lam: float
    x: float

    def __post_init__(self):
        if not (self.x > 0 and math.isfinite(self.x)):
            raise ValueError("x must be positive and finite")
        if not (self.lam >= 0 and math.isfinite(self.lam)):
            raise ValueError("lambda must be nonnegative and finite")

    @property
    def w(self) -> float:
        return 4.0 / (27.0 * self.x * self.x)


def _contour_radius(x: float, w: float, nodes: int) -> float:
    if w >= _W_SADDLE:
        return (2.0 / (3.0 * x)) ** 3  # saddle of ux - u^{2/3}
    return 2.0 * nodes / (5.0 * x)


def _talbot_sum_fp(lam: float, x: float, radius: float, nodes: int) -> float:
    k = np.arange(nodes)
    phi = (k + 0.5) * np.pi / nodes
    cot = 1.0 / np.tan(phi)
    v = phi * (cot + 1j)
    sigma = phi + (phi * cot - 1.0) * cot
    u = radius * v
    expo = u * x - u ** (2.0 / 3.0) - (2.0 * lam / 3.0) * np.log(u)
    vals = np.exp(expo) * (1.0 + 1j * sigma)
    return radius * float(np.sum(vals.real)) / nodes


def _talbot_sum_mp(lam, x, radius, nodes: int, dps: int):
    with mp.workdps(dps):
        lam = mp.mpf(lam)
        x = mp.mpf(x)
        radius = mp.mpf(radius)
        total = mp.mpf(0)
        for k in range(nodes):
            phi = (k + mp.mpf("0.5")) * mp.pi / nodes
            cot = mp.cot(phi)
            v = phi * (cot + 1j)
            sigma = phi + (phi * cot - 1) * cot
            u = radius * v
            expo = u * x - u ** (mp.mpf(2) / 3) - (2 * lam / 3) * mp.log(u)
            total += (mp.exp(expo) * (1 + 1j * sigma)).real
        return +(radius * total / nodes)


def _amplification_digits(x: float, w: float, nodes: int) -> int:
    # peak of Re(ux - u^{2/3}) along the contour, relative to the result scale
    if w >= _W_SADDLE:
        return 2  # saddle-scaled contour: peak term is at the result's own scale
    return int((2.0 * nodes / 5.0) / math.log(10.0)) + 2


def kernel_contour(q: KernelQuery, budget: SeriesBudget = None) -> EvalResult:
    """Bromwich-integral route, honest N-vs-N/2 error estimate."""
    budget = budget or SeriesBudget()
    digits = budget.precision_digits
    w = q.w
    if digits <= NATIVE_DIGITS and w > 700.0:
        # leading exponent e^{-w} is below the double-precision range
        return EvalResult(0.0, 0.0, 0, "contour")
    start = _MIN_NODES
    if w > 16.0:
        start = 1 << max(5, int(math.ceil(math.log2(4.0 * math.sqrt(w)))))
    start = min(start, _MAX_NODES // 2)
    # double precision bottoms out around 1e-13 relative on the saddle contour
    tol = 1e-13 if digits <= NATIVE_DIGITS else mp.mpf(10) ** (-(digits - 2))

    def one(nodes: int):
        radius = _contour_radius(q.x, w, nodes)
        amp = _amplification_digits(q.x, w, nodes)
        if digits <= NATIVE_DIGITS and amp <= 4:
            return _talbot_sum_fp(q.lam, q.x, radius, nodes)
        return _talbot_sum_mp(q.lam, q.x, radius, nodes, max(digits, NATIVE_DIGITS + 1) + amp + 6)

    prev = one(start)
    nodes = 2 * start
    best, est = prev, None
    while nodes <= _MAX_NODES:
        cur = one(nodes)
        est = abs(cur - prev)
        best = cur
        scale = abs(cur)
        if est <= tol * (scale if scale > 0 else 1.0):
            return EvalResult(to_native(best, digits), float(est), nodes, "contour")
        prev = cur
        nodes *= 2
    scale = abs(best) if best is not None and abs(best) > 0 else None
    if est is not None and scale is not None and est <= 1e-8 * scale:
        # converged but short of the requested tolerance: still usable, flagged
        return EvalResult(to_native(best, digits), float(est), nodes // 2, "contour", truncated=True)
    raise ConvergenceError(
        f"contour quadrature did not settle by {_MAX_NODES} nodes at lambda={q.lam}, x={q.x}")


# Slater expansion constants of G^{3,0}_{2,3} with b = (0, 1/3, 2/3):
# prod_{j != h} Gamma(b_j - b_h) for h = 0, 1, 2.
def _slater_prefactors(ctx):
    third = ctx.mpf(1) / 3
    g13, g23, g43 = ctx.gamma(third), ctx.gamma(2 * third), ctx.gamma(4 * third)
    gm13 = -3 * g23          # Gamma(-1/3)
    gm23 = g13 / (-2 * third)  # Gamma(-2/3) = Gamma(1/3)/(-2/3)
    return (
        (g13 * g23, ctx.mpf(0)),
        (gm13 * g13, third),
        (gm23 * gm13, 2 * third),
    )


def _rgamma(ctx, v):
    fv = float(v)
    if fv <= 0 and fv == int(fv):
        return ctx.mpf(0)
    return 1 / ctx.gamma(v)


def kernel_series(q: KernelQuery, budget: SeriesBudget = None) -> EvalResult:
    """Convergent 2F2 expansion route; alarms on catastrophic cancellation."""
    budget = budget or SeriesBudget()
    digits = budget.precision_digits
    w = q.w
    with working_ctx(digits) as ctx:
        lam = ctx.mpf(q.lam)
        x = ctx.mpf(q.x)
        ww = ctx.mpf(w)
        third = ctx.mpf(1) / 3
        a1, a2 = lam / 3, lam / 3 + ctx.mpf("0.5")
        bs = (ctx.mpf(0), third, 2 * third)
        tol = ctx.eps / 4
        total = ctx.mpf(0)
        max_partial = ctx.mpf(0)
        terms_used = 0
        for (gpair, bh) in _slater_prefactors(ctx):
            coef = gpair * _rgamma(ctx, a1 - bh) * _rgamma(ctx, a2 - bh)
            if coef == 0:
                continue
            dens = [1 + bh - b for b in bs if b != bh]
            val, terms, _, mxp = _hyp_series([1 + bh - a1, 1 + bh - a2], dens, -ww,
                                             ctx, tol, 200000)
            piece = coef * ww ** bh * val
            total += piece
            cand = abs(coef) * ww ** bh * mxp
            if cand > max_partial:
                max_partial = cand
            terms_used += terms
        g = total
        kval = ctx.sqrt(3 / ctx.pi) / x * (x / 2) ** (2 * lam / 3) * g
        scale = abs(kval)
        if scale == 0:
            raise PrecisionError("series route fully cancelled; use the contour route",
                                 best_value=0.0, digits_validated=0)
        lost = _mag10(max_partial * ctx.sqrt(3 / ctx.pi) / x * (x / 2) ** (2 * lam / 3)) - _mag10(scale)
        remaining = digits - max(lost, 0)
        if remaining < 6:
            raise PrecisionError(
                f"series route keeps only ~{remaining} of {digits} digits at w={w:.3g}; "
                "retry with more precision_digits or use the contour route",
                best_value=to_native(kval, digits), digits_validated=max(remaining, 0))
        err = scale * ctx.mpf(10) ** (-remaining + 1)
        return EvalResult(to_native(kval, digits), float(err), terms_used, "series")


def kernel(q: KernelQuery, budget: SeriesBudget = None) -> EvalResult:
    """Regime dispatcher: series for w <= 1, contour beyond; cross-checks near the switch."""
    budget = budget or SeriesBudget()
    if q.w <= W_SWITCH:
        return kernel_series(q, budget)
    return kernel_contour(q, budget)


def kernel_small_x_asymptotic(q: KernelQuery) -> float:
    """Leading-order K_lambda(x) as x -> 0: e^{-1/z} z^{lambda - 1/2} through the
    (3.4)-style prefactor, z = 27 x^2 / 4.  Relative error O(z)."""
    z = 27.0 * q.x * q.x / 4.0
    logv = (-1.0 / z + (q.lam - 0.5) * math.log(z)
            - (q.lam - 0.5) * math.log(3.0) - 0.5 * math.log(math.pi) - math.log(q.x))
    return math.exp(logv) if logv > -745.0 else 0.0


def kernel_log_small_x(lam: float, x: float) -> float:
    """log of the small-x kernel asymptote (for underflow-safe tail work)."""
    z = 27.0 * x * x / 4.0
    return (-1.0 / z + (lam - 0.5) * math.log(z)
            - (lam - 0.5) * math.log(3.0) - 0.5 * math.log(math.pi) - math.log(x))
