"""Log-gamma and logarithmic expectations from factorial moments.

For any distribution on the nonnegative reals presented through the
power-series coefficients q(j) of Q(z) = M(log(z+1)) (so j! q(j) is the
j-th falling-factorial moment) and through M(-t), the following routes
compute E[log Gamma(X+alpha)] and E[log(X+alpha)]:

  series:      log Gamma(alpha) + sum_{j>=1} (-1)^j q(j) c_alpha(j)
  t-integral:  log Gamma(alpha)
               + int_0^inf ( mu e^-t / t
                             - e^(-alpha t)(1 - M(-t)) / (t(1 - e^-t)) ) dt
  z-integral:  log Gamma(alpha) + mu log alpha
               - int_0^1 (1-z)^(alpha-1) (Q(-z) + mu z - 1)/(z log(1-z)) dz
  and for E[log(X+alpha)]:
               sum_{j>=1} (-1)^j q(j-1) c_alpha(j)
               = int_0^inf (e^-t - e^(-alpha t) M(-t))/t dt.

The series path self-reports catastrophic cancellation (its terms can
peak far above the result before decaying) instead of returning garbage;
callers then use an integral route.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import coeffs
from .errors import (
    BudgetError,
    DomainError,
    SeriesCancellationError,
    UnsupportedPathError,
)
from .quadrature import PatchedIntegrand, integrate_semi_infinite, integrate_unit
from .special import log_gamma

__all__ = [
    "EvalResult",
    "SeriesControl",
    "FactorialMomentSpec",
    "elog_gamma_series",
    "elog_gamma_integral_t",
    "elog_gamma_integral_z",
    "elog_series",
    "elog_integral",
]

_EPS = 2.0 ** -52
_STALL_WINDOW = 4096


@dataclass(frozen=True)
class EvalResult:
    """A computed expectation: value, error bound, route, and work count.

    ``work`` counts series terms or quadrature nodes depending on the
    method; ``method`` records the route that actually produced the value.
    """

    value: float
    err_bound: float
    method: str
    work: int


@dataclass(frozen=True)
class SeriesControl:
    tol: float = 1e-10
    max_terms: int = 10 ** 6
    cancellation_guard: float = 1e-3

    def __post_init__(self) -> None:
        if not self.tol >= 1e-13:
            raise DomainError(f"SeriesControl.tol must be >= 1e-13, got {self.tol}")
        if self.max_terms < 1:
            raise DomainError("SeriesControl.max_terms must be positive")
        if not self.cancellation_guard > 0.0:
            raise DomainError("SeriesControl.cancellation_guard must be > 0")


@dataclass(frozen=True)
class FactorialMomentSpec:
    """The full input surface of the expectation engine.

    q(j) are the power-series coefficients of Q(z) = M(log(z+1)), so
    q(0) = 1, q(1) = mu and j! q(j) is the j-th falling-factorial moment.
    ``m_neg(t) = M(-t)`` and ``q_neg(z) = Q(-z)`` feed the integral routes
    (vectorized over ndarrays).  ``one_minus_m_neg`` and ``qbar_neg`` are
    optional cancellation-free forms of 1 - M(-t) and Q(-z) + mu z - 1;
    without them the integral routes lose ~1e-8 absolute near the origin,
    so concrete families should always supply them.
    """

    mu: float
    q: Callable[[int], float]
    m_neg: Callable[[np.ndarray], np.ndarray]
    q_neg: Callable[[np.ndarray], np.ndarray]
    q_support_bound: Optional[int] = None
    one_minus_m_neg: Optional[Callable[[np.ndarray], np.ndarray]] = None
    qbar_neg: Optional[Callable[[np.ndarray], np.ndarray]] = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.mu) and self.mu >= 0.0):
            raise DomainError(f"spec.mu must be a finite nonnegative real, got {self.mu}")
        q0 = self.q(0)
        if abs(q0 - 1.0) > 1e-12:
            raise DomainError(f"spec.q(0) must equal 1, got {q0}")
        q1 = self.q(1)
        if abs(q1 - self.mu) > 1e-9 * (1.0 + abs(self.mu)):
            raise DomainError(f"spec.q(1)={q1} disagrees with mu={self.mu}")


def _run_series(base: float, term, ctl: SeriesControl, support_jmax, what: str):
    """Compensated summation of base + sum_j term(j) with the engine's
    stopping and failure contract.

    ``term(j)`` returns (value, error_contribution) and is called for
    j = 1, 2, ... in order.  Stops after 3 consecutive terms below tol or
    past the support bound; raises on budget exhaustion, non-decaying
    terms, or when the largest intermediate partial sum S_max implies the
    result has fewer correct digits than the cancellation guard allows.
    """
    total = base
    comp = 0.0
    s_max = abs(base)
    err_terms = 0.0
    below = 0
    j = 0
    support_stop = False
    stall_ref = None
    while True:
        j += 1
        if support_jmax is not None and j > support_jmax:
            support_stop = True
            j -= 1
            break
        if j > ctl.max_terms:
            raise BudgetError(f"{what}: series exceeded max_terms={ctl.max_terms}")
        t, t_err = term(j)
        err_terms += t_err
        # Neumaier update
        s = total + t
        if abs(total) >= abs(t):
            comp += (total - s) + t
        else:
            comp += (t - s) + total
        total = s
        running = total + comp
        if not math.isfinite(running) or s_max > 1e280:
            raise SeriesCancellationError(f"{what}: series blew up (divergent regime)")
        s_max = max(s_max, abs(running))
        if abs(t) < ctl.tol:
            below += 1
            if below >= 3:
                break
        else:
            below = 0
        if j % _STALL_WINDOW == 0:
            if stall_ref is not None and abs(t) > 0.5 * stall_ref and abs(t) > 1e3 * ctl.tol:
                raise BudgetError(f"{what}: series terms not decaying (stalled at j={j})")
            stall_ref = abs(t)

    result = total + comp
    floor = s_max * _EPS
    if floor > ctl.cancellation_guard * abs(result) and floor > ctl.tol:
        raise SeriesCancellationError(
            f"{what}: cancellation floor {floor:.2e} exceeds guard for result {result:.6e}"
        )
    trunc = 0.0 if support_stop else 2.0 * ctl.tol
    return result, floor + trunc + err_terms, j


def elog_gamma_series(spec: FactorialMomentSpec, alpha: float,
                      ctl: Optional[SeriesControl] = None) -> EvalResult:
    """E[log Gamma(X+alpha)] by the alternating factorial-moment series."""
    alpha = _check_alpha(alpha)
    ctl = ctl or SeriesControl()

    def term(j: int):
        qj = spec.q(j)
        entry = coeffs.coeff_entry(alpha, j)
        t = (qj if j % 2 == 0 else -qj) * entry.value
        return t, abs(qj) * entry.err_bound

    value, err, work = _run_series(
        log_gamma(alpha), term, ctl, spec.q_support_bound, "elog_gamma_series"
    )
    return EvalResult(value, err, "series", work)


def elog_series(spec: FactorialMomentSpec, alpha: float,
                ctl: Optional[SeriesControl] = None) -> EvalResult:
    """E[log(X+alpha)] by the shifted series sum_j (-1)^j q(j-1) c_alpha(j)."""
    alpha = _check_alpha(alpha)
    ctl = ctl or SeriesControl()
    bound = None if spec.q_support_bound is None else spec.q_support_bound + 1

    def term(j: int):
        qj = spec.q(j - 1)
        entry = coeffs.coeff_entry(alpha, j)
        t = (qj if j % 2 == 0 else -qj) * entry.value
        return t, abs(qj) * entry.err_bound

    value, err, work = _run_series(0.0, term, ctl, bound, "elog_series")
    return EvalResult(value, err, "series", work)


def _one_minus_m(spec: FactorialMomentSpec):
    if spec.one_minus_m_neg is not None:
        return spec.one_minus_m_neg
    return lambda t: 1.0 - spec.m_neg(t)


def _qbar(spec: FactorialMomentSpec):
    if spec.qbar_neg is not None:
        return spec.qbar_neg
    return lambda z: spec.q_neg(z) + spec.mu * z - 1.0


def _gamma_t_integrand(spec: FactorialMomentSpec, alpha: float):
    om = _one_minus_m(spec)
    mu = spec.mu

    def g(t):
        return mu * np.exp(-t) / t - np.exp(-alpha * t) * om(t) / (t * (-np.expm1(-t)))

    # both pieces are ~ mu/t + O(1); the O(1) parts leave this limit
    limit0 = spec.q(2) + mu * (alpha - 1.0)
    return g, limit0


def _gamma_z_integrand(spec: FactorialMomentSpec, alpha: float):
    qb = _qbar(spec)

    def g(z):
        return np.exp((alpha - 1.0) * np.log1p(-z)) * qb(z) / (z * np.log1p(-z))

    # Q(-z)+mu z-1 ~ q(2) z^2 against z log(1-z) ~ -z^2
    return g, -spec.q(2), 0.0


def _log_t_integrand(spec: FactorialMomentSpec, alpha: float):
    m = spec.m_neg

    def g(t):
        return (np.exp(-t) - np.exp(-alpha * t) * m(t)) / t

    # e^-t - e^(-alpha t) M(-t) ~ (alpha - 1 + mu) t
    return g, alpha - 1.0 + spec.mu


def elog_gamma_integral_t(spec: FactorialMomentSpec, alpha: float,
                          tol: float = 1e-10) -> EvalResult:
    """E[log Gamma(X+alpha)] via the (0, inf) integral representation."""
    alpha = _check_alpha(alpha)
    g, limit0 = _gamma_t_integrand(spec, alpha)
    r = integrate_semi_infinite(
        g, tol, limit_at_zero=limit0, decay_rate=min(1.0, alpha)
    )
    value = log_gamma(alpha) + r.value
    return EvalResult(value, r.err_estimate + 4.0 * _EPS * abs(value), "integral_t", r.nodes)


def elog_gamma_integral_z(spec: FactorialMomentSpec, alpha: float,
                          tol: float = 1e-10) -> EvalResult:
    """E[log Gamma(X+alpha)] via the (0, 1) integral representation.

    Requires alpha >= 1: for alpha < 1 the (1-z)^(alpha-1) factor blows up
    at z = 1 and the t-form must be used instead.
    """
    alpha = _check_alpha(alpha)
    if alpha < 1.0:
        raise UnsupportedPathError(
            f"z-form integral needs alpha >= 1 (got {alpha}); use elog_gamma_integral_t"
        )
    g, limit0, limit1 = _gamma_z_integrand(spec, alpha)
    r = integrate_unit(PatchedIntegrand(g, limit0, limit1, 1e-8, 1e-12), tol)
    value = log_gamma(alpha) + spec.mu * math.log(alpha) - r.value
    return EvalResult(value, r.err_estimate + 4.0 * _EPS * abs(value), "integral_z", r.nodes)


def elog_integral(spec: FactorialMomentSpec, alpha: float,
                  tol: float = 1e-10) -> EvalResult:
    """E[log(X+alpha)] via the (0, inf) integral representation."""
    alpha = _check_alpha(alpha)
    g, limit0 = _log_t_integrand(spec, alpha)
    r = integrate_semi_infinite(
        g, tol, limit_at_zero=limit0, decay_rate=min(1.0, alpha)
    )
    return EvalResult(r.value, r.err_estimate + 4.0 * _EPS * abs(r.value), "integral_t", r.nodes)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be a positive finite real, got {alpha}")
    return alpha
