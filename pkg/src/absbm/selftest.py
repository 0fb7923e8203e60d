"""Fast invariant suite runnable from the CLI (`absbm selftest`).

A trimmed version of the pytest suite: one representative invariant per
module, a few seconds total.  Returns 0 when everything holds.
"""

from __future__ import annotations

import math

import numpy as np

from .core import DriftParams, SeriesBudget
from . import asymptotics, dist, mcoracle, moments, specfun, transforms
from .meijerg import KernelQuery, kernel_contour, kernel_series


def _checks():
    p0 = DriftParams(0.0)
    p1 = DriftParams(1.0)

    yield ("airy zero residuals", lambda: max(
        abs(specfun.airy_ai_prime(specfun.zero_mp(k, 25), digits=25))
        for k in range(1, 11)) < 1e-20)

    yield ("airy Wronskian", lambda: all(
        abs(specfun.airy_ai(z) * specfun.airy_bi_prime(z)
            - specfun.airy_ai_prime(z) * specfun.airy_bi(z) - 1 / math.pi) < 1e-12
        for z in (-2.0, 0.0, 2.0)))

    def rotation():
        w = complex(-0.5, math.sqrt(3) / 2)
        p = 0.7
        s = specfun.aibar(p / w) + specfun.aibar(p) + specfun.aibar(p * w)
        return abs(s - math.exp(-p ** 3 / 3)) < 1e-12
    yield ("aibar rotation identity", rotation)

    yield ("tail-moment constant", lambda:
           abs(specfun.ai_partial_moment(1, 0) - 0.8090732963) < 1e-9)

    def kernel_cross():
        b = SeriesBudget.for_digits(25)
        for lam, x in ((0.0, 1.0), (1.5, 0.9), (2.0, 3.0)):
            a = kernel_series(KernelQuery(lam, x), b)
            c = kernel_contour(KernelQuery(lam, x), b)
            if abs(float(a.value) - float(c.value)) > 1e-12 * abs(float(c.value)):
                return False
        return True
    yield ("kernel cross-method", kernel_cross)

    def moment_routes():
        for mu in (0.5, 1.0, 2.0):
            p = DriftParams(mu)
            cl = moments.closed_moments(p, digits=25)
            for n in range(1, 5):
                a = float(moments.moment(n, p, digits=25).value)
                b = float(cl[n].value)
                if abs(a - b) > 1e-11 * abs(b):
                    return False
        return True
    yield ("moment route agreement", moment_routes)

    yield ("driftless skewness constant", lambda: abs(
        float(moments.stats(p0)[2])
        - 8 * (4480 - 1257 * math.pi) / (35 * (27 * math.pi - 64) ** 1.5)) < 1e-9)

    def dist_consistency():
        h = 1e-4
        budget = SeriesBudget(max_terms=400, abs_tol=1e-10, rel_tol=1e-10)
        d = (dist.cdf(1.0 + h, p1, budget=budget).value
             - dist.cdf(1.0 - h, p1, budget=budget).value) / (2 * h)
        return abs(d - dist.pdf(1.0, p1, budget=budget).value) < 1e-5
    yield ("cdf derivative vs pdf", dist_consistency)

    def transform_consistency():
        a = transforms.laplace_large_u(2.0, p1)
        b = transforms.laplace_small_u(2.0, p1)
        return abs(a.value - b.value) < 1e-8
    yield ("transform route agreement", transform_consistency)

    def tail_trend():
        r = [asymptotics.cdf_tail_large_x(x, p0)
             / (1.0 - dist.cdf(x, p0, budget=SeriesBudget(
                 max_terms=400, abs_tol=1e-10, rel_tol=1e-10)).value)
             for x in (2.0, 2.5, 3.0)]
        d = [abs(v - 1) for v in r]
        return d[0] > d[1] > d[2]
    yield ("large-deviation trend", tail_trend)

    def mc_determinism():
        cfg = mcoracle.SimConfig(n_paths=400, n_steps=128, seed=7)
        s1 = mcoracle.simulate(p1, cfg)
        s2 = mcoracle.simulate(p1, cfg)
        return np.array_equal(s1.sorted_samples, s2.sorted_samples)
    yield ("mc determinism", mc_determinism)


def run(verbose: bool = True) -> int:
    failures = 0
    for name, fn in _checks():
        try:
            ok = fn()
        except Exception as exc:  # a crash is a failure, keep going
            ok = False
            if verbose:
                print(f"FAIL {name}: {type(exc).__name__}: {exc}")
        if ok:
            if verbose:
                print(f"PASS {name}")
        else:
            failures += 1
            if verbose and ok is False:
                print(f"FAIL {name}")
    return 0 if failures == 0 else 3
