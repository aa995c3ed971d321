"""The six discrete families: parameters, factorial-moment specs, and
entropy / log-gamma expectation evaluation.

Every family exposes the same evaluation routes:

  series    -- the convergent alternating series assembled from the
               logarithmic difference coefficients
  integral  -- the integral representations (t-form on (0, inf) or
               z-form on (0, 1), picked per shift parameter)
  oracle    -- the defining sum -sum p_k log p_k over the (possibly
               truncated, tail-certified) support
  gaussian  -- (1/2) log(2 pi e sigma^2), the matching-variance normal
  asymptotic-- the large-lambda Poisson expansion (Poisson only)
  auto      -- series where its cancellation/accuracy report allows,
               otherwise integral; closed form for the geometric family

The binomial family accepts non-integer n on the series/integral routes;
the result is then the analytic continuation of the entropy formula
("formula value"), and the pmf-based oracle refuses it.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import betaln, gammaln

from .engine import (
    EvalResult,
    FactorialMomentSpec,
    SeriesControl,
    _run_series,
    elog_gamma_integral_t,
    elog_gamma_integral_z,
    elog_gamma_series,
    elog_integral,
    elog_series,
)
from .errors import BudgetError, DomainError
from .quadrature import integrate_semi_infinite
from .special import binary_entropy, lerch_phi_prime, log_gamma
from . import coeffs

__all__ = [
    "Poisson",
    "Binomial",
    "BetaBinomial",
    "NegBinomial",
    "Geometric",
    "Hypergeometric",
    "DistParams",
    "METHODS",
    "make_spec",
    "entropy",
    "log_gamma_expectation",
    "log_expectation",
    "direct_entropy_oracle",
    "gaussian_entropy_estimate",
    "poisson_asymptotic",
    "variance",
    "log_pmf",
    "support",
]

METHODS = ("auto", "series", "integral", "oracle", "gaussian", "asymptotic")

_EPS = 2.0 ** -52
_ORACLE_MAX_TERMS = 10 ** 7


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise DomainError(msg)


def _is_int(x) -> bool:
    return isinstance(x, (int, np.integer)) or (isinstance(x, float) and x.is_integer())


@dataclass(frozen=True)
class Poisson:
    lam: float

    def __post_init__(self):
        _require(isinstance(self.lam, (int, float)) and self.lam > 0
                 and math.isfinite(self.lam), f"lambda must be > 0, got {self.lam}")


@dataclass(frozen=True)
class Binomial:
    n: float
    p: float

    def __post_init__(self):
        _require(self.n > 0 and math.isfinite(self.n), f"n must be > 0, got {self.n}")
        _require(0.0 < self.p < 1.0, f"p must lie in (0, 1), got {self.p}")


@dataclass(frozen=True)
class BetaBinomial:
    n: int
    alpha: float
    beta: float

    def __post_init__(self):
        _require(_is_int(self.n) and self.n > 0,
                 f"n must be a positive integer, got {self.n}")
        _require(self.alpha > 0, f"alpha must be > 0, got {self.alpha}")
        _require(self.beta > 0, f"beta must be > 0, got {self.beta}")


@dataclass(frozen=True)
class NegBinomial:
    r: float
    p: float

    def __post_init__(self):
        _require(self.r > 0 and math.isfinite(self.r), f"r must be > 0, got {self.r}")
        _require(0.0 < self.p < 1.0, f"p must lie in (0, 1), got {self.p}")


@dataclass(frozen=True)
class Geometric:
    p: float

    def __post_init__(self):
        _require(0.0 < self.p < 1.0, f"p must lie in (0, 1), got {self.p}")


@dataclass(frozen=True)
class Hypergeometric:
    N: int
    K: int
    n: int

    def __post_init__(self):
        _require(_is_int(self.N) and self.N > 0,
                 f"N must be a positive integer, got {self.N}")
        _require(_is_int(self.K) and 0 <= self.K <= self.N,
                 f"K must be an integer in [0, N], got {self.K}")
        _require(_is_int(self.n) and 0 <= self.n <= self.N,
                 f"n must be an integer in [0, N], got {self.n}")


DistParams = Union[Poisson, Binomial, BetaBinomial, NegBinomial, Geometric, Hypergeometric]


class _RatioSeq:
    """q(j) defined by q(0) = 1 and a ratio recurrence; caches the prefix."""

    __slots__ = ("_ratio", "_vals", "_lock")

    def __init__(self, ratio):
        self._ratio = ratio
        self._vals = [1.0]
        self._lock = threading.Lock()

    def __call__(self, j: int) -> float:
        if j < len(self._vals):
            return self._vals[j]
        with self._lock:
            while len(self._vals) <= j:
                jj = len(self._vals)
                prev = self._vals[-1]
                self._vals.append(0.0 if prev == 0.0 else prev * self._ratio(jj))
        return self._vals[j]


def _finite_q_list(q, j_max: int) -> np.ndarray:
    return np.array([q(j) for j in range(j_max + 1)])


def _finite_spec(d: DistParams, mu: float, q: _RatioSeq, bound: int) -> FactorialMomentSpec:
    """Spec for a finite-support family.

    The integral-route hooks evaluate the coefficient polynomial when it is
    small and representable; otherwise (e.g. hypergeometric symmetry images
    whose factorial moments overflow doubles long before the support ends)
    they fall back to pmf sums: Q(-z) = E[(1-z)^X] and M(-t) = E[e^-tX],
    which stay bounded however large the moments are.
    """
    qs = _finite_q_list(q, min(bound, 400))
    if bound <= 400 and np.all(np.isfinite(qs)):
        from numpy.polynomial import polynomial as P

        def q_neg(z):
            return P.polyval(-z, qs)

        def qbar_neg(z):
            # sum_{j>=2} q(j)(-z)^j = z^2 * sum_i q(i+2)(-z)^i
            if len(qs) <= 2:
                return np.zeros_like(z)
            return z * z * P.polyval(-z, qs[2:])

        def m_neg(t):
            return P.polyval(np.expm1(-t), qs)

        def one_minus_m_neg(t):
            if len(qs) <= 1:
                return np.zeros_like(t)
            w = np.expm1(-t)
            return -w * P.polyval(w, qs[1:])
    else:
        lo, hi = support(d)
        ks = np.arange(lo, hi + 1, dtype=float)
        pk = np.exp(log_pmf(d, np.arange(lo, hi + 1)))

        def q_neg(z):
            return np.exp(ks[None, :] * np.log1p(-z[:, None])) @ pk

        def qbar_neg(z):
            # per-k stable (1-z)^k - 1 + kz keeps the q(2) z^2 behaviour
            lz = np.log1p(-z[:, None])
            return (np.expm1(ks[None, :] * lz) + ks[None, :] * z[:, None]) @ pk

        def m_neg(t):
            return np.exp(-ks[None, :] * t[:, None]) @ pk

        def one_minus_m_neg(t):
            return -np.expm1(-ks[None, :] * t[:, None]) @ pk

    return FactorialMomentSpec(
        mu=mu, q=q, m_neg=m_neg, q_neg=q_neg, q_support_bound=bound,
        one_minus_m_neg=one_minus_m_neg, qbar_neg=qbar_neg,
    )


def make_spec(d: DistParams) -> FactorialMomentSpec:
    """Factorial-moment spec (the expectation engine's input) for a family."""
    if isinstance(d, Poisson):
        lam = float(d.lam)
        return FactorialMomentSpec(
            mu=lam,
            q=_RatioSeq(lambda j: lam / j),
            m_neg=lambda t: np.exp(lam * np.expm1(-t)),
            q_neg=lambda z: np.exp(-lam * z),
            one_minus_m_neg=lambda t: -np.expm1(lam * np.expm1(-t)),
            qbar_neg=lambda z: np.expm1(-lam * z) + lam * z,
        )
    if isinstance(d, Binomial):
        n, p = float(d.n), float(d.p)
        return FactorialMomentSpec(
            mu=n * p,
            q=_RatioSeq(lambda j: (n - j + 1) * p / j),
            m_neg=lambda t: np.exp(n * np.log1p(p * np.expm1(-t))),
            q_neg=lambda z: np.exp(n * np.log1p(-p * z)),
            q_support_bound=int(n) if _is_int(n) else None,
            one_minus_m_neg=lambda t: -np.expm1(n * np.log1p(p * np.expm1(-t))),
            qbar_neg=lambda z: np.expm1(n * np.log1p(-p * z)) + n * p * z,
        )
    if isinstance(d, (NegBinomial, Geometric)):
        r = 1.0 if isinstance(d, Geometric) else float(d.r)
        p = float(d.p)
        qq = p / (1.0 - p)
        return FactorialMomentSpec(
            mu=r * qq,
            q=_RatioSeq(lambda j: qq * (j + r - 1) / j),
            m_neg=lambda t: np.exp(-r * np.log1p(-qq * np.expm1(-t))),
            q_neg=lambda z: np.exp(-r * np.log1p(qq * z)),
            one_minus_m_neg=lambda t: -np.expm1(-r * np.log1p(-qq * np.expm1(-t))),
            qbar_neg=lambda z: np.expm1(-r * np.log1p(qq * z)) + r * qq * z,
        )
    if isinstance(d, BetaBinomial):
        n, a, b = int(d.n), float(d.alpha), float(d.beta)
        q = _RatioSeq(lambda j: ((n - j + 1) / j) * ((a + j - 1) / (a + b + j - 1)))
        return _finite_spec(d, n * a / (a + b), q, n)
    if isinstance(d, Hypergeometric):
        N, K, n = d.N, d.K, d.n
        # series coefficients of Q: the falling-factorial moment over j!
        q = _RatioSeq(lambda j: (K - j + 1) * (n - j + 1) / ((N - j + 1) * j))
        return _finite_spec(d, K * n / N, q, min(K, n))
    raise DomainError(f"unknown distribution {d!r}")


def variance(d: DistParams) -> float:
    if isinstance(d, Poisson):
        return d.lam
    if isinstance(d, Binomial):
        return d.n * d.p * (1.0 - d.p)
    if isinstance(d, BetaBinomial):
        n, a, b = d.n, d.alpha, d.beta
        return n * a * b * (a + b + n) / ((a + b) ** 2 * (a + b + 1.0))
    if isinstance(d, NegBinomial):
        return d.r * d.p / (1.0 - d.p) ** 2
    if isinstance(d, Geometric):
        return d.p / (1.0 - d.p) ** 2
    if isinstance(d, Hypergeometric):
        N, K, n = d.N, d.K, d.n
        top = n * (K / N) * (1.0 - K / N) * (N - n)
        return 0.0 if top == 0.0 else top / (N - 1.0)
    raise DomainError(f"unknown distribution {d!r}")


def _mean(d: DistParams) -> float:
    return make_spec(d).mu


# ---------------------------------------------------------------------------
# pmf in log space


def _log_binom(a, b):
    """log C(a, b) for integer arrays with 0 <= b <= a, else -inf."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ok = (b >= 0) & (b <= a)
    safe_b = np.where(ok, b, 0.0)
    out = gammaln(a + 1.0) - gammaln(safe_b + 1.0) - gammaln(a - safe_b + 1.0)
    return np.where(ok, out, -np.inf)


def log_pmf(d: DistParams, k):
    """log of the probability mass at k (scalar or integer ndarray)."""
    scalar = np.ndim(k) == 0
    k = np.atleast_1d(np.asarray(k))
    if not np.issubdtype(k.dtype, np.integer):
        raise DomainError("log_pmf: k must be integer-valued")
    if np.any(k < 0):
        raise DomainError("log_pmf: k must be nonnegative")
    kf = k.astype(float)
    if isinstance(d, Poisson):
        out = kf * math.log(d.lam) - d.lam - gammaln(kf + 1.0)
    elif isinstance(d, Binomial):
        if not _is_int(d.n):
            raise DomainError("log_pmf: binomial pmf requires integer n")
        out = (_log_binom(d.n, kf) + kf * math.log(d.p)
               + (d.n - kf) * math.log1p(-d.p))
    elif isinstance(d, BetaBinomial):
        out = (_log_binom(d.n, kf) + betaln(kf + d.alpha, d.n - kf + d.beta)
               - betaln(d.alpha, d.beta))
        out = np.where(kf <= d.n, out, -np.inf)
    elif isinstance(d, NegBinomial):
        out = (gammaln(kf + d.r) - gammaln(d.r) - gammaln(kf + 1.0)
               + kf * math.log(d.p) + d.r * math.log1p(-d.p))
    elif isinstance(d, Geometric):
        out = kf * math.log(d.p) + math.log1p(-d.p)
    elif isinstance(d, Hypergeometric):
        out = _log_binom(d.K, kf) + _log_binom(d.N - d.K, d.n - kf) - _log_binom(d.N, d.n)
    else:
        raise DomainError(f"unknown distribution {d!r}")
    return float(out[0]) if scalar else out


def support(d: DistParams):
    """(k_min, k_max) of the support; k_max is None for infinite support."""
    if isinstance(d, (Poisson, NegBinomial, Geometric)):
        return 0, None
    if isinstance(d, Binomial):
        if not _is_int(d.n):
            raise DomainError("support: binomial requires integer n")
        return 0, int(d.n)
    if isinstance(d, BetaBinomial):
        return 0, int(d.n)
    if isinstance(d, Hypergeometric):
        return max(0, d.n - (d.N - d.K)), min(d.n, d.K)
    raise DomainError(f"unknown distribution {d!r}")


# ---------------------------------------------------------------------------
# entropy: series route


def _series_ctl(tol: float) -> SeriesControl:
    return SeriesControl(tol=max(0.1 * tol, 1e-13), max_terms=500_000)


def _series_preferred(d: DistParams) -> bool:
    if isinstance(d, Poisson):
        return d.lam <= 30.0
    if isinstance(d, Binomial):
        return d.n * max(d.p, 1.0 - d.p) <= 30.0
    if isinstance(d, NegBinomial):
        return d.r * d.p / (1.0 - d.p) <= 30.0
    if isinstance(d, BetaBinomial):
        return d.n <= 60
    if isinstance(d, Hypergeometric):
        return True
    return False


def _entropy_series(d: DistParams, tol: float) -> EvalResult:
    ctl = _series_ctl(tol)
    if isinstance(d, Poisson):
        lam = float(d.lam)
        base = lam - lam * math.log(lam)
        r = elog_gamma_series(make_spec(d), 1.0, ctl)
        return EvalResult(base + r.value, r.err_bound + 2.0 * _EPS * abs(base),
                          "series", r.work)

    if isinstance(d, Binomial):
        n, p = float(d.n), float(d.p)
        state = {"binom": 1.0, "pj": 1.0, "qj": 1.0}

        def term(j: int):
            state["binom"] *= (n - j + 1) / j
            state["pj"] *= p
            state["qj"] *= 1.0 - p
            entry = coeffs.coeff_entry(1.0, j)
            factor = state["binom"] * (state["pj"] + state["qj"] - 1.0)
            t = (factor if j % 2 == 0 else -factor) * entry.value
            return t, abs(factor) * entry.err_bound

        bound = int(n) if _is_int(n) else None
        base = n * binary_entropy(p)
        value, err, work = _run_series(base, term, ctl, bound, "binomial entropy series")
        return EvalResult(value, err + 2.0 * _EPS * abs(base), "series", work)

    if isinstance(d, BetaBinomial):
        n, a, b = int(d.n), float(d.alpha), float(d.beta)
        base = -(math.log(n) + float(betaln(n, a + b)))
        state = {"binom": 1.0, "ra": 1.0, "rb": 1.0, "rab": 1.0}

        def term(j: int):
            state["binom"] *= (n - j + 1) / j
            state["ra"] *= a + j - 1
            state["rb"] *= b + j - 1
            state["rab"] *= a + b + j - 1
            c1 = coeffs.coeff_entry(1.0, j)
            ca = coeffs.coeff_entry(a, j)
            cb = coeffs.coeff_entry(b, j)
            scale = state["binom"] / state["rab"]
            inner = ((c1.value - ca.value) * state["ra"]
                     + (c1.value - cb.value) * state["rb"])
            t = (scale if j % 2 == 0 else -scale) * inner
            err = abs(scale) * (state["ra"] * (c1.err_bound + ca.err_bound)
                                + state["rb"] * (c1.err_bound + cb.err_bound))
            return t, err

        value, err, work = _run_series(base, term, ctl, n, "beta-binomial entropy series")
        return EvalResult(value, err + 2.0 * _EPS * abs(base), "series", work)

    if isinstance(d, (NegBinomial, Geometric)):
        r_ = 1.0 if isinstance(d, Geometric) else float(d.r)
        p = float(d.p)
        qq = p / (1.0 - p)
        base = r_ * binary_entropy(p) / (1.0 - p)
        state = {"w": 1.0}

        def term(j: int):
            state["w"] *= -qq * (j + r_ - 1) / j
            c1 = coeffs.coeff_entry(1.0, j)
            cr = coeffs.coeff_entry(r_, j)
            t = state["w"] * (c1.value - cr.value)
            return t, abs(state["w"]) * (c1.err_bound + cr.err_bound)

        value, err, work = _run_series(base, term, ctl, None,
                                       "negative-binomial entropy series")
        return EvalResult(value, err + 2.0 * _EPS * abs(base), "series", work)

    if isinstance(d, Hypergeometric):
        N, K, n = d.N, d.K, d.n
        base = (float(_log_binom(N, n)) - float(gammaln(K + 1.0))
                - float(gammaln(N - K + 1.0)))
        pairs = [(K, n), (N - K, n), (K, N - n), (N - K, N - n)]
        seqs = [
            _RatioSeq(lambda j, A=A, B=B: (A - j + 1) * (B - j + 1) / ((N - j + 1) * j))
            for A, B in pairs
        ]
        bound = max(min(A, B) for A, B in pairs)

        def term(j: int):
            entry = coeffs.coeff_entry(1.0, j)
            s = sum(seq(j) for seq in seqs)
            t = (s if j % 2 == 0 else -s) * entry.value
            return t, abs(s) * entry.err_bound

        value, err, work = _run_series(base, term, ctl, bound,
                                       "hypergeometric entropy series")
        return EvalResult(value, err + 4.0 * _EPS * abs(base), "series", work)

    raise DomainError(f"unknown distribution {d!r}")


# ---------------------------------------------------------------------------
# entropy: integral route


def _entropy_integral(d: DistParams, tol: float) -> EvalResult:
    if isinstance(d, Poisson):
        lam = float(d.lam)
        base = lam - lam * math.log(lam)
        r = elog_gamma_integral_z(make_spec(d), 1.0, tol)
        return EvalResult(base + r.value, r.err_bound + 2.0 * _EPS * abs(base),
                          "integral_z", r.work)

    if isinstance(d, Binomial):
        n, p = float(d.n), float(d.p)

        def g(t):
            # numerator (1-p+pe^-t)^n + (p+(1-p)e^-t)^n - e^-nt - 1, grouped
            # as [(1-p+pe^-t)^n - 1] + [(p+(1-p)e^-t)^n - e^-nt]; the first
            # group is stable everywhere, the second switches form once
            # n*t is large enough that e^-nt no longer cancels anything
            # (n*log1p(p*expm1(t)) <= n*t keeps the small form from
            # overflowing)
            w_m = np.expm1(-t)
            d1 = np.expm1(n * np.log1p(p * w_m))
            out = np.empty_like(t)
            small = (n * t <= 200.0) & (t <= 600.0)
            large = ~small
            ts = t[small]
            tl = t[large]
            d2s = np.exp(-n * ts) * np.expm1(n * np.log1p(p * np.expm1(ts)))
            out[small] = (d1[small] + d2s) / (ts * np.expm1(ts))
            d2l = np.exp(n * np.log1p((1.0 - p) * np.expm1(-tl))) - np.exp(-n * tl)
            out[large] = (d1[large] + d2l) / (tl * np.expm1(tl))
            return out

        limit0 = -n * (n - 1.0) * p * (1.0 - p)
        r = integrate_semi_infinite(g, tol, limit_at_zero=limit0, decay_rate=1.0)
        base = n * binary_entropy(p)
        return EvalResult(base + r.value, r.err_estimate + 2.0 * _EPS * abs(base),
                          "integral_t", r.nodes)

    if isinstance(d, BetaBinomial):
        n, a, b = int(d.n), float(d.alpha), float(d.beta)
        base = (float(betaln(a, b)) + float(gammaln(n + a + b)) - float(gammaln(n + 1.0)))
        spec_ab = make_spec(d)
        spec_ba = make_spec(BetaBinomial(n, b, a))
        parts = [
            (spec_ab, 1.0, +1.0),
            (spec_ba, 1.0, +1.0),
            (spec_ab, a, -1.0),
            (spec_ba, b, -1.0),
        ]
        value, err, work = base, 4.0 * _EPS * abs(base), 0
        for spec, shift, sign in parts:
            e = _elog_gamma_integral(spec, shift, tol / 4.0)
            value += sign * e.value
            err += e.err_bound
            work += e.work
        return EvalResult(value, err, "integral_t" if min(a, b) < 1.0 else "integral_z", work)

    if isinstance(d, (NegBinomial, Geometric)):
        r_ = 1.0 if isinstance(d, Geometric) else float(d.r)
        p = float(d.p)
        base = r_ * binary_entropy(p) / (1.0 - p) + log_gamma(r_)
        spec = make_spec(d)
        e1 = _elog_gamma_integral(spec, 1.0, tol / 2.0)
        er = e1 if r_ == 1.0 else _elog_gamma_integral(spec, r_, tol / 2.0)
        value = base + e1.value - er.value
        err = e1.err_bound + er.err_bound + 4.0 * _EPS * abs(base)
        return EvalResult(value, err, er.method, e1.work + er.work)

    if isinstance(d, Hypergeometric):
        N, K, n = d.N, d.K, d.n
        base = (float(_log_binom(N, n)) - float(gammaln(K + 1.0))
                - float(gammaln(N - K + 1.0)))
        value, err, work = base, 4.0 * _EPS * abs(base), 0
        for K2, n2 in [(K, n), (N - K, n), (K, N - n), (N - K, N - n)]:
            spec = make_spec(Hypergeometric(N, K2, n2))
            e = _elog_gamma_integral(spec, 1.0, tol / 4.0)
            value += e.value
            err += e.err_bound
            work += e.work
        return EvalResult(value, err, "integral_z", work)

    raise DomainError(f"unknown distribution {d!r}")


def _elog_gamma_integral(spec, alpha, tol) -> EvalResult:
    if alpha >= 1.0:
        return elog_gamma_integral_z(spec, alpha, tol)
    return elog_gamma_integral_t(spec, alpha, tol)


# ---------------------------------------------------------------------------
# oracle route


def _ratio_next(d: DistParams, k: int) -> float:
    """p_{k+1}/p_k, monotonically decreasing past the mode."""
    if isinstance(d, Poisson):
        return d.lam / (k + 1.0)
    if isinstance(d, NegBinomial):
        return d.p * (k + d.r) / (k + 1.0)
    if isinstance(d, Geometric):
        return d.p
    raise DomainError(f"no infinite-support ratio for {d!r}")


def _truncated_expectation(d: DistParams, weight, slope, curv, tol: float):
    """sum_k p_k w_k over an infinite support with a certified tail bound.

    Starts at the mode and sweeps outward; the upward sweep stops once the
    term drops below tol*1e-3 and the closed-form geometric-ratio bound
    sum_m p_k rho^m (w_k + m s_k + m^2 c_k) certifies the remainder, using
    w_{k+m} <= w_k + m*s_k + m^2*c_k (log-growth weights are concave).
    """
    k0 = max(0, int(_mean(d)))
    ks = np.arange(0, k0 + 1)
    lp = log_pmf(d, ks)
    pk = np.exp(lp)
    terms = list(pk * weight(ks.astype(float), lp))
    k = k0
    tail_bound = None
    while True:
        k += 1
        if k > _ORACLE_MAX_TERMS:
            raise BudgetError(f"oracle: tail bound not reached within {_ORACLE_MAX_TERMS} terms")
        lpk = log_pmf(d, k)
        p = math.exp(lpk)
        w = float(weight(np.array([float(k)]), np.array([lpk]))[0])
        t = p * w
        terms.append(t)
        if abs(t) < tol * 1e-3 and p < 0.36:
            rho = _ratio_next(d, k)
            if rho < 1.0:
                s0 = rho / (1.0 - rho)
                s1 = rho / (1.0 - rho) ** 2
                s2 = rho * (1.0 + rho) / (1.0 - rho) ** 3
                bound = p * (abs(w) * s0 + slope(k) * s1 + curv(k) * s2)
                if bound < 0.5 * tol:
                    tail_bound = bound
                    break
    value = math.fsum(terms)
    err = tail_bound + _EPS * math.fsum(abs(t) for t in terms)
    return value, err, len(terms)


def direct_entropy_oracle(d: DistParams, tol: float = 1e-12) -> EvalResult:
    """-sum_k p_k log p_k over the support, tail-certified when infinite."""
    _check_tol(tol)
    lo, hi = support(d)  # raises for non-integer binomial n
    if hi is not None:
        ks = np.arange(lo, hi + 1)
        lp = log_pmf(d, ks)
        pk = np.exp(lp)
        terms = -pk * lp
        value = math.fsum(terms)
        mass_gap = abs(1.0 - math.fsum(pk))
        err = mass_gap * (1.0 + float(np.max(np.abs(lp)))) + _EPS * math.fsum(np.abs(terms))
        return EvalResult(value, err, "oracle", len(ks))

    def weight(kf, lp):
        return -lp

    value, err, work = _truncated_expectation(
        d, weight,
        slope=lambda k: max(0.0, -math.log(_ratio_next(d, k))),
        curv=lambda k: 1.0 / (k + 1.0),
        tol=tol,
    )
    return EvalResult(value, err, "oracle", work)


def _direct_elog_gamma_oracle(d: DistParams, alpha: float, tol: float) -> EvalResult:
    lo, hi = support(d)
    if hi is not None:
        ks = np.arange(lo, hi + 1)
        lp = log_pmf(d, ks)
        terms = np.exp(lp) * gammaln(ks + alpha)
        value = math.fsum(terms)
        err = abs(1.0 - math.fsum(np.exp(lp))) * float(np.max(np.abs(gammaln(ks + alpha)))) \
            + _EPS * math.fsum(np.abs(terms))
        return EvalResult(value, err, "oracle", len(ks))

    def weight(kf, lp):
        return gammaln(kf + alpha)

    value, err, work = _truncated_expectation(
        d, weight,
        slope=lambda k: math.log(k + 1.0 + alpha),
        curv=lambda k: 1.0 / (k + alpha),
        tol=tol,
    )
    return EvalResult(value, err, "oracle", work)


def _direct_elog_oracle(d: DistParams, alpha: float, tol: float) -> EvalResult:
    lo, hi = support(d)
    if hi is not None:
        ks = np.arange(lo, hi + 1)
        lp = log_pmf(d, ks)
        terms = np.exp(lp) * np.log(ks + alpha)
        value = math.fsum(terms)
        err = abs(1.0 - math.fsum(np.exp(lp))) * float(np.max(np.abs(np.log(ks + alpha)))) \
            + _EPS * math.fsum(np.abs(terms))
        return EvalResult(value, err, "oracle", len(ks))

    def weight(kf, lp):
        return np.log(kf + alpha)

    value, err, work = _truncated_expectation(
        d, weight,
        slope=lambda k: 1.0 / (k + alpha),
        curv=lambda k: 0.0,
        tol=tol,
    )
    return EvalResult(value, err, "oracle", work)


# ---------------------------------------------------------------------------
# normal and asymptotic estimates


def gaussian_entropy_estimate(d: DistParams) -> float:
    """(1/2) log(2 pi e sigma^2) with the family's variance."""
    var = variance(d)
    if var <= 0.0:
        raise DomainError(f"gaussian_entropy_estimate: variance is 0 for {d!r}")
    return 0.5 * math.log(2.0 * math.pi * math.e * var)


def poisson_asymptotic(lam: float, terms: int = 4) -> float:
    """Partial sum of the large-lambda expansion of the Poisson entropy.

    terms=1 is the Gaussian estimate (1/2) log(2 pi e lam); terms 2..4 add
    -1/(12 lam), -1/(24 lam^2), -19/(360 lam^3).  Residual is O(lam^-4).
    """
    _require(lam > 0, f"lambda must be > 0, got {lam}")
    if not isinstance(terms, (int, np.integer)) or not 1 <= terms <= 4:
        raise DomainError(f"terms must be an integer in [1, 4], got {terms}")
    out = 0.5 * math.log(2.0 * math.pi * math.e * lam)
    if terms >= 2:
        out -= 1.0 / (12.0 * lam)
    if terms >= 3:
        out -= 1.0 / (24.0 * lam * lam)
    if terms >= 4:
        out -= 19.0 / (360.0 * lam ** 3)
    return out


# ---------------------------------------------------------------------------
# public dispatchers


def _check_tol(tol: float) -> None:
    if not (isinstance(tol, (int, float)) and tol > 0.0):
        raise DomainError(f"tol must be > 0, got {tol}")


def _check_method(method: str) -> None:
    if method not in METHODS:
        raise DomainError(f"method must be one of {METHODS}, got {method!r}")


def _closed(value: float) -> EvalResult:
    return EvalResult(value, 4.0 * _EPS * (1.0 + abs(value)), "closed_form", 1)


def entropy(d: DistParams, method: str = "auto", tol: float = 1e-10) -> EvalResult:
    """Shannon entropy in nats by the requested route.

    ``auto`` prefers the series when the family's parameter regime keeps
    its cancellation in check and the reported error bound meets ``tol``,
    else the integral route; the geometric family returns its closed form
    h(p)/(1-p).  A forced ``series`` raises SeriesCancellationError rather
    than silently falling back.
    """
    _check_method(method)
    _check_tol(tol)
    if method == "oracle":
        return direct_entropy_oracle(d, min(tol, 1e-12))
    if method == "gaussian":
        var = variance(d)
        value = gaussian_entropy_estimate(d)
        # heuristic first-correction scale, not a rigorous bound
        return EvalResult(value, 1.0 / (12.0 * var), "gaussian", 1)
    if method == "asymptotic":
        if not isinstance(d, Poisson):
            raise DomainError("asymptotic method exists only for the Poisson family")
        return EvalResult(poisson_asymptotic(d.lam, 4), d.lam ** -4.0, "asymptotic", 4)

    if isinstance(d, Geometric):
        if method == "auto":
            return _closed(binary_entropy(d.p) / (1.0 - d.p))
        d_eff: DistParams = NegBinomial(1.0, d.p)
    else:
        d_eff = d

    if method == "series":
        return _entropy_series(d_eff, tol)
    if method == "integral":
        return _entropy_integral(d_eff, tol)
    # auto
    if _series_preferred(d_eff):
        try:
            r = _entropy_series(d_eff, tol)
            if r.err_bound <= tol:
                return r
        except (ArithmeticError, BudgetError):
            pass
    return _entropy_integral(d_eff, tol)


def log_gamma_expectation(d: DistParams, alpha: float, method: str = "auto",
                          tol: float = 1e-10) -> EvalResult:
    """E[log Gamma(X+alpha)] by the requested route."""
    _check_method(method)
    _check_tol(tol)
    if method in ("gaussian", "asymptotic"):
        raise DomainError(f"method {method!r} does not apply to log-gamma expectations")
    if method == "oracle":
        return _direct_elog_gamma_oracle(d, alpha, min(tol, 1e-12))
    spec = make_spec(d)
    if method == "series":
        return elog_gamma_series(spec, alpha, _series_ctl(tol))
    if method == "integral":
        return _elog_gamma_integral(spec, alpha, tol)
    if _series_preferred(d if not isinstance(d, Geometric) else NegBinomial(1.0, d.p)):
        try:
            r = elog_gamma_series(spec, alpha, _series_ctl(tol))
            if r.err_bound <= tol:
                return r
        except (ArithmeticError, BudgetError):
            pass
    return _elog_gamma_integral(spec, alpha, tol)


def log_expectation(d: DistParams, alpha: float, method: str = "auto",
                    tol: float = 1e-10) -> EvalResult:
    """E[log(X+alpha)] by the requested route.

    For the geometric family ``auto`` uses the closed form
    (p-1) Phi'_alpha(p); the series/integral routes go through the engine.
    """
    _check_method(method)
    _check_tol(tol)
    if method in ("gaussian", "asymptotic"):
        raise DomainError(f"method {method!r} does not apply to log expectations")
    if method == "oracle":
        return _direct_elog_oracle(d, alpha, min(tol, 1e-12))
    if isinstance(d, Geometric) and method == "auto":
        value = (d.p - 1.0) * lerch_phi_prime(d.p, alpha, min(tol, 1e-12))
        return _closed(value)
    spec = make_spec(d)
    if method == "series":
        return elog_series(spec, alpha, _series_ctl(tol))
    if method == "integral":
        return elog_integral(spec, alpha, tol)
    if _series_preferred(d if not isinstance(d, Geometric) else NegBinomial(1.0, d.p)):
        try:
            r = elog_series(spec, alpha, _series_ctl(tol))
            if r.err_bound <= tol:
                return r
        except (ArithmeticError, BudgetError):
            pass
    return elog_integral(spec, alpha, tol)
