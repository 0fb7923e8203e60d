"""Airy functions, zeros of Ai', hypergeometric series, and Ai tail-moment integrals.

Everything here is a pure function of its inputs.  Evaluators accept a
``digits`` argument: at or below 17 they run on native floats, above that on
mpmath working precision.  Fractional powers take principal values throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from mpmath import fp, mp

from .core import (
    NATIVE_DIGITS,
    ConvergenceError,
    PoleError,
    RangeError,
    SectorDomainError,
    SeriesBudget,
    TruncationError,
    working_ctx,
    to_native,
)

# Maclaurin series below this radius, asymptotic expansion above it.
# Cancellation in the Maclaurin series grows like exp(|z|^{3/2}); 8 keeps
# double precision usable while the asymptotic error floor exp(-2|zeta|) is
# already below 1e-14 there.
SWITCH_RADIUS = 8.0
ASYM_TERMS = 20
SECTOR = 2.0 * math.pi / 3.0
_SECTOR_MARGIN = 0.05


# ---------------------------------------------------------------------------
# generalized hypergeometric series


@dataclass(frozen=True)
class HyperSeriesSpec:
    """Parameters of a pFq series; entire cases only (p <= q)."""

    numerator: tuple
    denominator: tuple
    argument: object

    def __post_init__(self):
        if len(self.numerator) > len(self.denominator):
            raise ValueError("pfq restricted to p <= q (entire series)")
        for b in self.denominator:
            if float(b) <= 0 and float(b) == int(float(b)):
                raise ValueError("denominator parameter at a nonpositive integer")


@dataclass(frozen=True)
class PfqValue:
    value: object
    terms_used: int
    last_term: float
    max_partial: float


def _hyp_series(num, den, z, ctx, tol, max_terms):
    """Raw pFq summation with a two-consecutive-small-terms stop rule.

    ``tol`` is an absolute/relative hybrid: the stop fires once two
    consecutive terms fall below tol * max(1, |partial sum|).  Returns
    (value, terms, |last term|, max |partial sum|).
    """
    one = ctx.mpf(1)
    term = one
    total = one
    max_partial = one
    small = 0
    m = 0
    while m < max_terms:
        ratio = one
        for a in num:
            ratio *= a + m
        for b in den:
            ratio /= b + m
        term = term * ratio * z / (m + 1)
        total += term
        m += 1
        ap = abs(total)
        if ap > max_partial:
            max_partial = ap
        if abs(term) <= tol * (ap if ap > 1 else one):
            small += 1
            if small >= 2:
                return total, m, abs(term), max_partial
        else:
            small = 0
    raise TruncationError(
        f"pFq budget of {max_terms} terms exhausted (last term ~ 1e{_mag10(abs(term))})",
        last_term=abs(term), partial=total)


def _mag10(x) -> int:
    """Order of magnitude of a nonnegative scalar, safe for mpf/float/0."""
    if x == 0:
        return -999999
    return int(mp.floor(mp.log10(abs(mp.mpf(x)))))


def pfq(spec: HyperSeriesSpec, budget: SeriesBudget = None) -> PfqValue:
    """Sum the generalized hypergeometric series of ``spec`` under ``budget``."""
    budget = budget or SeriesBudget()
    digits = budget.precision_digits
    with working_ctx(digits) as ctx:
        num = [ctx.mpf(a) if not isinstance(a, complex) else ctx.mpc(a) for a in spec.numerator]
        den = [ctx.mpf(b) for b in spec.denominator]
        z = spec.argument
        z = ctx.mpc(z) if isinstance(z, complex) or (hasattr(z, "imag") and z.imag != 0) else ctx.mpf(z)
        value, terms, last, mx = _hyp_series(num, den, z, ctx, ctx.mpf(budget.abs_tol),
                                              budget.max_terms)
        return PfqValue(to_native(value, digits), terms, float(last), float(mx))


# ---------------------------------------------------------------------------
# asymptotic-expansion coefficients, exact rationals
# c2_k = (-1)^k (5/6)_k (1/6)_k (3/4)^k / k!,  c1_k = (6k+1)/(1-6k) c2_k,
# and the reciprocal-series coefficients of the Ai' expansion.


@lru_cache(maxsize=None)
def c2_fractions(n: int) -> tuple:
    out = [Fraction(1)]
    p56 = p16 = Fraction(1)
    fact = 1
    for k in range(1, n + 1):
        p56 *= Fraction(5, 6) + (k - 1)
        p16 *= Fraction(1, 6) + (k - 1)
        fact *= k
        out.append((-1) ** k * p56 * p16 * Fraction(3, 4) ** k / fact)
    return tuple(out)


@lru_cache(maxsize=None)
def c1_fractions(n: int) -> tuple:
    return tuple(Fraction(6 * k + 1, 1 - 6 * k) * c for k, c in enumerate(c2_fractions(n)))


@lru_cache(maxsize=None)
def c1_recip_fractions(n: int) -> tuple:
    c1 = c1_fractions(n)
    out = [Fraction(1)]
    for k in range(1, n + 1):
        out.append(-sum(c1[m] * out[k - m] for m in range(1, k + 1)))
    return tuple(out)


# ---------------------------------------------------------------------------
# Airy functions


def _ai_pieces_maclaurin(z, ctx):
    """Return (Ai, Ai') at z from the 0F1 Maclaurin combination."""
    w = z * z * z / 9
    tol = ctx.eps / 4
    f23, _, _, _ = _hyp_series([], [ctx.mpf(2) / 3], w, ctx, tol, 20000)
    f43, _, _, _ = _hyp_series([], [ctx.mpf(4) / 3], w, ctx, tol, 20000)
    f53, _, _, _ = _hyp_series([], [ctx.mpf(5) / 3], w, ctx, tol, 20000)
    f73, _, _, _ = _hyp_series([], [ctx.mpf(7) / 3], w, ctx, tol, 20000)
    c_a = 3 ** (-ctx.mpf(2) / 3) / ctx.gamma(ctx.mpf(2) / 3)
    c_b = 3 ** (-ctx.mpf(1) / 3) / ctx.gamma(ctx.mpf(1) / 3)
    ai = c_a * f23 - c_b * z * f43
    aip = c_a * z * z / 2 * f53 - c_b * (f43 + z * z * z / 4 * f73)
    return ai, aip


def _maclaurin_cancel(absz: float) -> float:
    # decimal digits lost to cancellation in the 0F1 combination: the series
    # peak is exp(2 sqrt(|z|^3/9)) and on the e^{-zeta} side the combination
    # cancels by another exp(2 zeta); (4/3)|z|^{3/2} covers both
    return (4.0 / 3.0) * absz ** 1.5 / math.log(10.0)


def _maclaurin_pad(absz: float) -> int:
    return int(_maclaurin_cancel(absz)) + 6


def _asymptotic_digits(absz: float) -> float:
    # decimal digits reachable by the truncated expansion: the optimal
    # truncation floor e^{-2|zeta|}, capped by stopping at ASYM_TERMS terms
    zeta = 2.0 / 3.0 * absz ** 1.5
    return min(0.868 * zeta, ASYM_TERMS * math.log10(max(zeta, 1.001)) - 13.0)


def _ai_pieces_asymptotic(z, ctx):
    """(Ai, Ai') from the large-|z| expansion; valid for |arg z| < 2 pi/3."""
    if abs(ctx.arg(z)) >= SECTOR:
        raise SectorDomainError(
            f"asymptotic Airy route needs |arg z| < 2*pi/3, got arg z = {float(ctx.arg(z)):.4f}")
    c2 = c2_fractions(ASYM_TERMS)
    c1 = c1_fractions(ASYM_TERMS)
    zeta = ctx.mpf(2) / 3 * z ** ctx.mpf("1.5")
    zm32 = 1 / (z * ctx.sqrt(z))
    s_a = ctx.mpf(1)
    s_p = ctx.mpf(1)
    powz = ctx.mpf(1)
    prev = ctx.inf if ctx is mp else math.inf
    for k in range(1, ASYM_TERMS + 1):
        powz = powz * zm32
        term = ctx.mpf(c2[k].numerator) / c2[k].denominator * powz
        if abs(term) > prev:
            break  # optimal truncation: terms started growing
        prev = abs(term)
        s_a += term
        s_p += ctx.mpf(c1[k].numerator) / c1[k].denominator * powz
    pre = ctx.exp(-zeta) / (2 * ctx.sqrt(ctx.pi))
    z14 = z ** ctx.mpf("0.25")
    return pre / z14 * s_a, -pre * z14 * s_p


_OMEGA_NUM = complex(-0.5, math.sqrt(3.0) / 2.0)  # e^{2 pi i/3}


def _ai_maclaurin_padded(z, ctx):
    """Maclaurin evaluation with working precision padded for cancellation.

    The float context keeps the fast path while fewer than ~3 digits cancel
    and otherwise rides mpmath at padded precision before downcasting.
    """
    absz = float(abs(z))
    if ctx is fp:
        if _maclaurin_cancel(absz) <= 3.0:
            return _ai_pieces_maclaurin(z, ctx)
        with mp.workdps(NATIVE_DIGITS + _maclaurin_pad(absz)):
            zz = mp.mpc(z) if isinstance(z, complex) else mp.mpf(z)
            ai, aip = _ai_pieces_maclaurin(zz, mp)
        if isinstance(z, complex):
            return complex(ai), complex(aip)
        return float(ai.real if hasattr(ai, "real") else ai), \
            float(aip.real if hasattr(aip, "real") else aip)
    with mp.workdps(mp.dps + _maclaurin_pad(absz)):
        ai, aip = _ai_pieces_maclaurin(+z, mp)
    return +ai, +aip


def _ai_pieces(z, ctx, method="auto"):
    """Dispatch (Ai, Ai') between Maclaurin, asymptotic, and rotation routes."""
    absz = abs(z)
    if method == "series":
        return _ai_maclaurin_padded(z, ctx)
    if method == "asymptotic":
        return _ai_pieces_asymptotic(z, ctx)
    if method != "auto":
        raise ValueError(f"unknown Airy method {method!r}")
    if absz <= SWITCH_RADIUS:
        return _ai_maclaurin_padded(z, ctx)
    if ctx is mp and mp.dps > _asymptotic_digits(float(absz)):
        # requested precision beyond the asymptotic route's truncation floor
        return _ai_maclaurin_padded(z, ctx)
    argz = abs(ctx.arg(z)) if absz > 0 else 0.0
    if argz < SECTOR - _SECTOR_MARGIN:
        return _ai_pieces_asymptotic(z, ctx)
    if argz <= SECTOR + _SECTOR_MARGIN:
        # on/near the boundary rays: extended-precision Maclaurin
        pad = _maclaurin_pad(float(absz))
        with mp.workdps((mp.dps if ctx is mp else NATIVE_DIGITS) + pad):
            ai, aip = _ai_pieces_maclaurin(mp.mpc(z), mp)
            ai, aip = +ai, +aip
        if ctx is fp:
            return complex(ai), complex(aip)
        return ai, aip
    # |arg z| well beyond the sector: connection formula
    # Ai(z) = -w Ai(w z) - w^2 Ai(w^2 z), w = e^{2 pi i/3}; both rotated
    # points land strictly inside the asymptotic sector.
    w = _OMEGA_NUM if ctx is fp else mp.exp(2j * mp.pi / 3)
    w2 = w * w
    a_p, ap_p = _ai_pieces_asymptotic(w * z, ctx)
    a_m, ap_m = _ai_pieces_asymptotic(w2 * z, ctx)
    ai = -w * a_p - w2 * a_m
    aip = -w2 * ap_p - w * ap_m
    return ai, aip


def _real_if_real(z, value, ctx):
    if isinstance(z, complex) or (hasattr(z, "imag") and z.imag != 0):
        return value
    return value.real if hasattr(value, "real") else value


def airy_ai(z, digits: int = NATIVE_DIGITS, method: str = "auto"):
    """First Airy function Ai(z) for complex z."""
    with working_ctx(digits) as ctx:
        zz = ctx.mpc(z) if isinstance(z, complex) or (hasattr(z, "imag") and z.imag != 0) else ctx.mpf(z)
        if ctx is fp and not isinstance(zz, complex) and abs(zz) > SWITCH_RADIUS and method == "auto":
            zz = complex(zz)  # negative reals go through the rotation route
        val, _ = _ai_pieces(zz, ctx, method)
        return to_native(_real_if_real(z, val, ctx), digits)


def airy_ai_prime(z, digits: int = NATIVE_DIGITS, method: str = "auto"):
    """Derivative Ai'(z) for complex z."""
    with working_ctx(digits) as ctx:
        zz = ctx.mpc(z) if isinstance(z, complex) or (hasattr(z, "imag") and z.imag != 0) else ctx.mpf(z)
        if ctx is fp and not isinstance(zz, complex) and abs(zz) > SWITCH_RADIUS and method == "auto":
            zz = complex(zz)
        _, val = _ai_pieces(zz, ctx, method)
        return to_native(_real_if_real(z, val, ctx), digits)


_BI_OVERFLOW = 600.0  # (2/3) z^{3/2} beyond this overflows double precision


def _bi_pieces_maclaurin(z, ctx):
    w = z * z * z / 9
    tol = ctx.eps / 4
    f23, _, _, _ = _hyp_series([], [ctx.mpf(2) / 3], w, ctx, tol, 20000)
    f43, _, _, _ = _hyp_series([], [ctx.mpf(4) / 3], w, ctx, tol, 20000)
    f53, _, _, _ = _hyp_series([], [ctx.mpf(5) / 3], w, ctx, tol, 20000)
    f73, _, _, _ = _hyp_series([], [ctx.mpf(7) / 3], w, ctx, tol, 20000)
    c_a = 3 ** (-ctx.mpf(1) / 6) / ctx.gamma(ctx.mpf(2) / 3)
    c_b = 3 ** (ctx.mpf(1) / 6) / ctx.gamma(ctx.mpf(1) / 3)
    bi = c_a * f23 + c_b * z * f43
    bip = c_a * z * z / 2 * f53 + c_b * (f43 + z * z * z / 4 * f73)
    return bi, bip


def airy_bi(z: float, digits: int = NATIVE_DIGITS):
    """Second Airy function Bi on the real line (identity tests only)."""
    z = float(z)
    if z > 0 and (2.0 / 3.0) * z ** 1.5 > _BI_OVERFLOW:
        raise RangeError(f"Bi({z}) overflows double range")
    with working_ctx(digits, pad=_maclaurin_pad(abs(z))) as ctx:
        val, _ = _bi_pieces_maclaurin(ctx.mpf(z), ctx)
        return to_native(val, digits)


def airy_bi_prime(z: float, digits: int = NATIVE_DIGITS):
    z = float(z)
    if z > 0 and (2.0 / 3.0) * z ** 1.5 > _BI_OVERFLOW:
        raise RangeError(f"Bi'({z}) overflows double range")
    with working_ctx(digits, pad=_maclaurin_pad(abs(z))) as ctx:
        _, val = _bi_pieces_maclaurin(ctx.mpf(z), ctx)
        return to_native(val, digits)


# ---------------------------------------------------------------------------
# zeros of Ai'


@dataclass(frozen=True)
class AiryPrimeZeroTable:
    """Ordered negative zeros of Ai', largest (closest to zero) first."""

    zeros: tuple

    def __post_init__(self):
        prev = 0.0
        for z in self.zeros:
            if not z < prev:
                raise ValueError("zeros must be strictly decreasing and negative")
            prev = z

    @property
    def count(self) -> int:
        return len(self.zeros)

    def __getitem__(self, k: int) -> float:
        """1-based access matching the series index."""
        return self.zeros[k - 1]


def airy_prime_zero_seed(k: int) -> float:
    """Large-k asymptotic location of the k-th zero of Ai'."""
    return -(3.0 * math.pi * (4 * k - 3) / 8.0) ** (2.0 / 3.0)


def _zero_newton(k: int, dps: int):
    """Newton refinement of the k-th Ai' zero at ``dps`` digits."""
    seed = airy_prime_zero_seed(k)
    pad = _maclaurin_pad(abs(seed) + 0.5)
    lo, hi = seed - 0.5, seed + 0.5
    with mp.workdps(dps + pad):
        z = mp.mpf(seed)
        target = mp.mpf(10) ** (-(dps + 2))
        converged = False
        for _ in range(50):
            ai, aip = _ai_pieces_maclaurin(z, mp)
            step = aip / (z * ai)  # Ai''(z) = z Ai(z)
            z = z - step
            if not (lo <= z <= hi):
                break
            if abs(step) <= target * abs(z):
                converged = True
                break
        if not converged:
            # bisection fallback on the guaranteed bracket
            a, b = mp.mpf(lo), mp.mpf(hi)
            fa = _ai_pieces_maclaurin(a, mp)[1]
            fb = _ai_pieces_maclaurin(b, mp)[1]
            if fa * fb > 0:
                raise ConvergenceError(f"no sign change bracketing Ai' zero {k}")
            for _ in range(int(3.4 * (dps + 4)) + 8):
                z = (a + b) / 2
                fz = _ai_pieces_maclaurin(z, mp)[1]
                if fa * fz <= 0:
                    b = z
                else:
                    a, fa = z, fz
            z = (a + b) / 2
        residual = abs(_ai_pieces_maclaurin(z, mp)[1])
        if residual > mp.mpf(10) ** (-(dps - 4)):
            raise ConvergenceError(
                f"Ai' zero {k} refinement stalled (residual {mp.nstr(residual, 3)})")
        return +z


@lru_cache(maxsize=None)
def _zero_mp_cached(k: int, dps: int):
    return _zero_newton(k, dps)


def zero_mp(k: int, dps: int = 25):
    """k-th zero of Ai' as an mpf at (at least) ``dps`` digits."""
    bucket = max(25, int(math.ceil(dps / 25.0)) * 25)
    with mp.workdps(dps):
        return +_zero_mp_cached(k, bucket)


_ZERO_FLOATS: list = []


def airy_ai_prime_zeros(n: int) -> AiryPrimeZeroTable:
    """First n zeros of Ai', Newton-refined from the asymptotic seeds."""
    if n < 1:
        raise ValueError("n must be >= 1")
    while len(_ZERO_FLOATS) < n:
        _ZERO_FLOATS.append(float(_zero_mp_cached(len(_ZERO_FLOATS) + 1, 25)))
    return AiryPrimeZeroTable(zeros=tuple(_ZERO_FLOATS[:n]))


@lru_cache(maxsize=None)
def _ai_at_zero_cached(k: int, dps: int):
    with mp.workdps(dps + _maclaurin_pad(abs(airy_prime_zero_seed(k)))):
        z = zero_mp(k, dps)
        return +_ai_pieces_maclaurin(z, mp)[0]


def ai_at_zero(k: int, digits: int = NATIVE_DIGITS):
    """Ai evaluated at the k-th zero of Ai' (cached; used by every series)."""
    bucket = max(25, int(math.ceil(digits / 25.0)) * 25)
    val = _ai_at_zero_cached(k, bucket)
    return to_native(val, digits)


# ---------------------------------------------------------------------------
# gamma, erf


def gamma(x, digits: int = NATIVE_DIGITS):
    x = float(x)
    if x <= 0 and x == int(x):
        raise PoleError(f"gamma pole at {x}")
    with working_ctx(digits) as ctx:
        return to_native(ctx.gamma(x), digits)


def reciprocal_gamma(x, digits: int = NATIVE_DIGITS):
    """1/Gamma(x), exactly zero at the poles of Gamma."""
    x = float(x)
    if x <= 0 and x == int(x):
        return 0.0 if digits <= NATIVE_DIGITS else mp.mpf(0)
    with working_ctx(digits) as ctx:
        return to_native(1 / ctx.gamma(x), digits)


def erf(x, digits: int = NATIVE_DIGITS):
    with working_ctx(digits) as ctx:
        return to_native(ctx.erf(x), digits)


# ---------------------------------------------------------------------------
# Mellin moments and tail-moment integrals of Ai


def mellin_ai(i: int, digits: int = NATIVE_DIGITS):
    """int_0^inf z^i Ai(z) dz = Gamma(i)/(3^{i/3} Gamma(i/3)); 1/3 at i = 0."""
    if i < 0:
        raise ValueError("i must be >= 0")
    with working_ctx(digits) as ctx:
        if i == 0:
            return to_native(ctx.mpf(1) / 3, digits)
        val = ctx.gamma(i) / (3 ** (ctx.mpf(i) / 3) * ctx.gamma(ctx.mpf(i) / 3))
        return to_native(val, digits)


@lru_cache(maxsize=None)
def _partial_moment_cached(k: int, j: int, dps: int):
    seed = abs(airy_prime_zero_seed(k))
    # the 1F2 values at (alpha_k^3)/9 cancel like exp(2 sqrt(|w|))
    pad = int(2.0 * math.sqrt(seed ** 3 / 9.0) / math.log(10.0)) + 8
    with mp.workdps(dps + pad):
        a = zero_mp(k, dps + pad)
        w = a ** 3 / 9
        tol = mp.mpf(10) ** (-(dps + pad + 2))
        total = mp.mpf(0)
        third = mp.mpf(1) / 3
        g23 = mp.gamma(2 * third)
        g13 = mp.gamma(third)
        for i in range(2 * j + 1):
            if i == 0:
                mell = third
            else:
                mell = mp.gamma(i) / (3 ** (mp.mpf(i) / 3) * mp.gamma(mp.mpf(i) / 3))
            f1, _, _, _ = _hyp_series([(i + 1) * third], [2 * third, (i + 4) * third], w, mp, tol, 100000)
            f2, _, _, _ = _hyp_series([(i + 2) * third], [4 * third, (i + 5) * third], w, mp, tol, 100000)
            bracket = mell + (-1) ** i * (-a) ** (i + 1) / 3 ** third * (
                f1 / (3 ** third * g23 * (i + 1)) + (-a) * f2 / (g13 * (i + 2)))
            total += mp.binomial(2 * j, i) * (-a) ** (2 * j - i) * bracket
        return +total


def ai_partial_moment(k: int, j: int, zeros: AiryPrimeZeroTable = None,
                      digits: int = NATIVE_DIGITS):
    """Tail-moment integral int_{a'_k}^inf (z - a'_k)^{2j} Ai(z) dz.

    Closed binomial/1F2 form; strictly positive.  Internally evaluated in
    padded working precision since the 1F2 arguments are large and negative.
    """
    if k < 1 or j < 0:
        raise ValueError("need k >= 1 and j >= 0")
    if zeros is not None and k > zeros.count:
        raise ValueError(f"zero table holds {zeros.count} zeros, requested k={k}")
    bucket = max(25, int(math.ceil(digits / 25.0)) * 25)
    return to_native(_partial_moment_cached(k, j, bucket), digits)


def aibar(p, digits: int = NATIVE_DIGITS):
    """Laplace transform int_0^inf e^{-pz} Ai(z) dz of Ai, any complex p."""
    with working_ctx(digits) as ctx:
        pp = ctx.mpc(p) if isinstance(p, complex) or (hasattr(p, "imag") and p.imag != 0) else ctx.mpf(p)
        w = pp * pp * pp / 3
        tol = ctx.eps / 4
        f13, _, _, _ = _hyp_series([ctx.mpf(1) / 3], [ctx.mpf(4) / 3], w, ctx, tol, 50000)
        f23, _, _, _ = _hyp_series([ctx.mpf(2) / 3], [ctx.mpf(5) / 3], w, ctx, tol, 50000)
        val = ctx.exp(-w) * (
            ctx.mpf(1) / 3
            - pp / (3 ** (ctx.mpf(4) / 3) * ctx.gamma(ctx.mpf(4) / 3)) * f13
            + pp * pp / (3 ** (ctx.mpf(5) / 3) * ctx.gamma(ctx.mpf(5) / 3)) * f23)
        return to_native(_real_if_real(p, val, ctx), digits)
