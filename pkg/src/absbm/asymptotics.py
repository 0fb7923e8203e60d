"""Small- and large-deviation closed forms, and a generalized Laplace method
for integrals int g1 e^{x g2 - x^2 g3} over R^d with complex-valued integrands.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import ConvergenceError, DriftParams, NumericError
from . import specfun


def _lead_constants(p: DriftParams):
    a1 = specfun.airy_ai_prime_zeros(1)[1]
    ai1 = specfun.ai_at_zero(1)
    i10 = specfun.ai_partial_moment(1, 0)
    return a1, ai1, i10


def pdf_small_x_log(x: float, p: DriftParams) -> float:
    """log of the leading small-x density estimate (underflow-safe)."""
    a1, ai1, i10 = _lead_constants(p)
    s2, t = p.sigma ** 2, p.t
    return (math.log(i10) + 0.5 * math.log(2 * s2 * t ** 3 * (-a1))
            - math.log(3.0) - 0.5 * math.log(math.pi) - math.log(ai1)
            - 2 * math.log(x) - p.theta + 2 * s2 * (t * a1) ** 3 / (27 * x * x))


def pdf_small_x(x: float, p: DriftParams) -> float:
    """Leading-order density as x -> 0, relative error O(x^2)."""
    lv = pdf_small_x_log(x, p)
    return math.exp(lv) if lv > -745.0 else 0.0


def cdf_small_x_log(x: float, p: DriftParams) -> float:
    a1, ai1, i10 = _lead_constants(p)
    s2, t = p.sigma ** 2, p.t
    return (math.log(9 * i10) + math.log(x)
            - math.log(2.0) - 0.5 * math.log(2 * math.pi * s2 * t ** 3 * (-a1) ** 5)
            - math.log(ai1) - p.theta + 2 * s2 * (t * a1) ** 3 / (27 * x * x))


def cdf_small_x(x: float, p: DriftParams) -> float:
    """Leading-order distribution function as x -> 0, relative error O(x^2)."""
    lv = cdf_small_x_log(x, p)
    return math.exp(lv) if lv > -745.0 else 0.0


def _tail_log_parts(x: float, p: DriftParams):
    s2, t = p.sigma ** 2, p.t
    expo = -3 * p.mu ** 2 * t / (8 * s2) - 3 * x * x / (2 * s2 * t ** 3)
    # log cosh, safe for large arguments
    h = 3 * p.mu * x / (2 * s2 * t)
    logcosh = abs(h) + math.log1p(math.exp(-2 * abs(h))) - math.log(2.0)
    return expo, logcosh


def pdf_large_x_log(x: float, p: DriftParams) -> float:
    expo, logcosh = _tail_log_parts(x, p)
    return 0.5 * math.log(6 / (math.pi * p.sigma ** 2 * p.t ** 3)) + expo + logcosh


def pdf_large_x(x: float, p: DriftParams) -> float:
    """Leading-order density as x -> infinity, relative error O(1/x)."""
    lv = pdf_large_x_log(x, p)
    return math.exp(lv) if lv > -745.0 else 0.0


def cdf_tail_large_x_log(x: float, p: DriftParams) -> float:
    expo, logcosh = _tail_log_parts(x, p)
    return (0.5 * math.log(2 * p.sigma ** 2 * p.t ** 3 / (3 * math.pi))
            - math.log(x) + expo + logcosh)


def cdf_tail_large_x(x: float, p: DriftParams) -> float:
    """Leading-order survival probability 1 - F(x) as x -> infinity."""
    lv = cdf_tail_large_x_log(x, p)
    return math.exp(lv) if lv > -745.0 else 0.0


# ---------------------------------------------------------------------------
# generalized Laplace method


@dataclass(frozen=True)
class ExpIntegrandTriple:
    """Integrand triple (g1, g2, g3) on a box domain in R^d.

    The callables take d real arguments and may return complex values; g3
    must be twice differentiable near the minimizer of its real part.
    """

    g1: object
    g2: object
    g3: object
    domain: tuple  # ((lo, hi), ...) box bounds
    d: int

    def __post_init__(self):
        if len(self.domain) != self.d:
            raise ValueError("domain must provide d (lo, hi) pairs")


@dataclass
class GenLaplaceResult:
    value: complex
    minimizer: np.ndarray
    hessian: np.ndarray       # complex Hessian of g3 at the minimizer
    grad_g2: np.ndarray


_EPS3 = 6.06e-6  # cbrt of double eps, central-difference step scale


def _grad_fd(f, w, h=None):
    d = len(w)
    h = h or [_EPS3 * max(1.0, abs(wi)) for wi in w]
    g = np.empty(d, dtype=complex)
    for i in range(d):
        e = np.zeros(d)
        e[i] = h[i]
        g[i] = (f(*(w + e)) - f(*(w - e))) / (2 * h[i])
    return g


def _hess_fd(f, w, step=1e-4):
    d = len(w)
    H = np.empty((d, d), dtype=complex)
    hs = [step * max(1.0, abs(wi)) for wi in w]
    f0 = f(*w)
    for i in range(d):
        ei = np.zeros(d)
        ei[i] = hs[i]
        H[i, i] = (f(*(w + ei)) - 2 * f0 + f(*(w - ei))) / hs[i] ** 2
        for j in range(i + 1, d):
            ej = np.zeros(d)
            ej[j] = hs[j]
            H[i, j] = H[j, i] = (
                f(*(w + ei + ej)) - f(*(w + ei - ej))
                - f(*(w - ei + ej)) + f(*(w - ei - ej))) / (4 * hs[i] * hs[j])
    return H


def gen_laplace(triple: ExpIntegrandTriple, x: float, x0=None,
                grad_g3=None, hess_g3=None, grad_g2=None,
                grad_tol: float = 1e-10, max_iter: int = 60) -> GenLaplaceResult:
    """Approximate int_D g1 e^{x g2 - x^2 g3} dw by the Gaussian around the
    interior minimizer w0 of Re g3:

        (2 pi)^{d/2} g1(w0) / (x^d sqrt(det Hess)) *
        exp(x g2(w0) - x^2 g3(w0) + (1/2) grad_g2^T Hess^{-1} grad_g2)

    Newton iteration on grad(Re g3) with central finite differences unless
    analytic derivatives are supplied.  Raises if Newton fails or if the real
    part of the Hessian is not positive definite.
    """
    d = triple.d
    lo = np.array([b[0] for b in triple.domain], dtype=float)
    hi = np.array([b[1] for b in triple.domain], dtype=float)
    w = np.array(x0 if x0 is not None else (lo + hi) / 2.0, dtype=float)

    def re_g3(*args):
        v = triple.g3(*args)
        return v.real if isinstance(v, complex) else float(v)

    converged = False
    for _ in range(max_iter):
        g = (np.asarray(grad_g3(*w), dtype=float) if grad_g3 is not None
             else _grad_fd(re_g3, w).real)
        if np.max(np.abs(g)) < grad_tol:
            converged = True
            break
        H = (np.asarray(hess_g3(*w), dtype=float) if hess_g3 is not None
             else _hess_fd(re_g3, w).real)
        try:
            step = np.linalg.solve(H, g)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"Newton Hessian solve failed: {exc}") from exc
        wn = w - step
        wn = np.clip(wn, lo + 1e-12, hi - 1e-12)
        w = wn
    if not converged:
        raise ConvergenceError("Newton on grad(Re g3) did not reach the gradient tolerance")

    Hc = _hess_fd(triple.g3, w)
    eig = np.linalg.eigvalsh(0.5 * (Hc.real + Hc.real.T))
    if np.min(eig) <= 0:
        raise NumericError("Re Hess(g3) is not positive definite at the located point")
    g2grad = (np.asarray(grad_g2(*w), dtype=complex) if grad_g2 is not None
              else _grad_fd(triple.g2, w))
    det = np.linalg.det(Hc)
    quad = g2grad @ np.linalg.solve(Hc, g2grad)
    val = ((2 * np.pi) ** (d / 2.0) * triple.g1(*w)
           / (x ** d * np.sqrt(complex(det)))
           * np.exp(x * triple.g2(*w) - x * x * triple.g3(*w) + 0.5 * quad))
    return GenLaplaceResult(value=complex(val), minimizer=w, hessian=Hc,
                            grad_g2=np.asarray(g2grad))
