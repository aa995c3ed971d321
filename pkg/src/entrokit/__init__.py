"""entrokit: entropies and log-gamma expectations of discrete distributions.

Series expansions, integral representations, asymptotic estimates, and
brute-force oracles for the Poisson, binomial, beta-binomial, negative
binomial, geometric, and hypergeometric families, built on a generic
factorial-moment expectation engine and the logarithmic difference
coefficients c_alpha(j).
"""

from .coeffs import (
    CoeffEntry,
    CoeffTable,
    coeff,
    coeff_entry,
    coeff_table,
    gen_C,
    newton_log,
    weighted_sum,
)
from .distributions import (
    BetaBinomial,
    Binomial,
    DistParams,
    Geometric,
    Hypergeometric,
    NegBinomial,
    Poisson,
    direct_entropy_oracle,
    entropy,
    gaussian_entropy_estimate,
    log_expectation,
    log_gamma_expectation,
    log_pmf,
    make_spec,
    poisson_asymptotic,
    support,
    variance,
)
from .engine import (
    EvalResult,
    FactorialMomentSpec,
    SeriesControl,
    elog_gamma_integral_t,
    elog_gamma_integral_z,
    elog_gamma_series,
    elog_integral,
    elog_series,
)
from .errors import (
    BudgetError,
    DomainError,
    IncompleteSupportError,
    PrecisionError,
    QuadratureDivergenceError,
    SeriesCancellationError,
    UnsupportedPathError,
)
from .quadrature import (
    PatchedIntegrand,
    QuadratureResult,
    integrate_semi_infinite,
    integrate_unit,
)
from .special import (
    EULER_GAMMA,
    binary_entropy,
    digamma,
    lerch_phi_prime,
    log_falling_factorial,
    log_gamma,
    log_rising_factorial,
)
from .transforms import (
    LaplacePoint,
    Z_GRID,
    laplace_E_poi_identity,
    laplace_H_poi_closed,
    laplace_H_poi_identity,
    laplace_numeric,
)

__version__ = "0.1.0"
