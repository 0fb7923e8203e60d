"""Distribution of X_t = int_0^t |mu s + sigma W_s| ds, the time-integral of a
drifted Brownian motion's absolute value.

Submodules:

* ``specfun``     Airy functions, zeros of Ai', pFq series, Ai tail moments
* ``meijerg``     inverse-Laplace kernels by contour quadrature and series
* ``transforms``  the space Laplace transform in three series forms
* ``moments``     exact moments of arbitrary order, summary statistics
* ``dist``        pdf, cdf, quantiles with adaptive truncation
* ``asymptotics`` small/large-deviation estimates, generalized Laplace method
* ``mcoracle``    reproducible Monte Carlo path oracle
* ``cli``         command-line interface (``absbm``)
"""

from .core import (
    DriftParams,
    EvalResult,
    MomentValue,
    NumericError,
    SeriesBudget,
)
from .specfun import (
    AiryPrimeZeroTable,
    HyperSeriesSpec,
    aibar,
    ai_partial_moment,
    airy_ai,
    airy_ai_prime,
    airy_ai_prime_zeros,
    airy_bi,
    airy_bi_prime,
    erf,
    gamma,
    mellin_ai,
    pfq,
    reciprocal_gamma,
)
from .meijerg import KernelQuery, kernel, kernel_contour, kernel_series
from .transforms import laplace_large_u, laplace_mu0, laplace_small_u
from .moments import (
    airy_coeffs,
    closed_moments,
    index_polynomials,
    moment,
    moment_asymptotic,
    moment_mu0,
    sigma_series,
    stats,
)
from .dist import cdf, pdf, quantile, truncation_k
from .asymptotics import (
    ExpIntegrandTriple,
    cdf_small_x,
    cdf_tail_large_x,
    gen_laplace,
    pdf_large_x,
    pdf_small_x,
)
from .mcoracle import SampleSummary, SimConfig, empirical_cdf, empirical_moment, simulate

__version__ = "0.1.0"

__all__ = [
    "DriftParams", "EvalResult", "MomentValue", "NumericError", "SeriesBudget",
    "AiryPrimeZeroTable", "HyperSeriesSpec", "aibar", "ai_partial_moment",
    "airy_ai", "airy_ai_prime", "airy_ai_prime_zeros", "airy_bi",
    "airy_bi_prime", "erf", "gamma", "mellin_ai", "pfq", "reciprocal_gamma",
    "KernelQuery", "kernel", "kernel_contour", "kernel_series",
    "laplace_large_u", "laplace_mu0", "laplace_small_u",
    "airy_coeffs", "closed_moments", "index_polynomials", "moment",
    "moment_asymptotic", "moment_mu0", "sigma_series", "stats",
    "cdf", "pdf", "quantile", "truncation_k",
    "ExpIntegrandTriple", "cdf_small_x", "cdf_tail_large_x", "gen_laplace",
    "pdf_large_x", "pdf_small_x",
    "SampleSummary", "SimConfig", "empirical_cdf", "empirical_moment", "simulate",
]
