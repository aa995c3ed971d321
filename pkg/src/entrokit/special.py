"""Scalar special functions shared by the rest of the package.

All logarithms are natural; conversion to other bases happens only at the
CLI boundary.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special as _sp

from .errors import BudgetError, DomainError

__all__ = [
    "EULER_GAMMA",
    "log_gamma",
    "digamma",
    "binary_entropy",
    "lerch_phi_prime",
    "log_falling_factorial",
    "log_rising_factorial",
]

#: Euler-Mascheroni constant.
EULER_GAMMA = 0.5772156649015328606

_LERCH_BLOCK = 256
_LERCH_MAX_TERMS = 5_000_000


def log_gamma(x):
    """log Gamma(x) for x > 0.  Accepts scalars or ndarrays."""
    if np.any(np.asarray(x) <= 0.0):
        raise DomainError("log_gamma: x must be > 0")
    out = _sp.gammaln(x)
    return float(out) if np.ndim(x) == 0 else out


def digamma(x):
    """psi(x) = d/dx log Gamma(x) for x > 0.  Accepts scalars or ndarrays."""
    if np.any(np.asarray(x) <= 0.0):
        raise DomainError("digamma: x must be > 0")
    out = _sp.psi(x)
    return float(out) if np.ndim(x) == 0 else out


def binary_entropy(p: float) -> float:
    """h(p) = -p log p - (1-p) log(1-p), with h(0) = h(1) = 0 by continuity."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"binary_entropy: p must lie in [0, 1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -(p * math.log(p) + (1.0 - p) * math.log1p(-p))


def log_falling_factorial(a: float, j: int) -> float:
    """log of a(a-1)...(a-j+1); requires every factor positive."""
    _check_count(j)
    if j == 0:
        return 0.0
    if a - j + 1 <= 0.0:
        raise DomainError(
            f"log_falling_factorial: a-j+1 must be > 0, got a={a}, j={j}"
        )
    return float(_sp.gammaln(a + 1.0) - _sp.gammaln(a - j + 1.0))


def log_rising_factorial(a: float, j: int) -> float:
    """log of a(a+1)...(a+j-1) for a > 0."""
    _check_count(j)
    if a <= 0.0:
        raise DomainError(f"log_rising_factorial: a must be > 0, got {a}")
    if j == 0:
        return 0.0
    return float(_sp.gammaln(a + j) - _sp.gammaln(a))


def _check_count(j) -> None:
    if not isinstance(j, (int, np.integer)) or j < 0:
        raise DomainError(f"factor count must be a nonnegative integer, got {j!r}")


def lerch_phi_prime(z: float, alpha: float, tol: float = 1e-12) -> float:
    """Phi'_alpha(z) = -sum_{k>=0} log(k+alpha) z^k.

    This is the s-derivative at s=0 of the Lerch transcendent
    Phi(z, s, alpha), i.e. the generating function of the sequence
    -log(k+alpha).  Direct summation for |z| < 1 with a rigorous geometric
    tail bound; at z = -1 the (Abel-summable) alternating series is
    evaluated by Euler acceleration.  The returned value is within ``tol``
    of the limit.
    """
    if not alpha > 0.0:
        raise DomainError(f"lerch_phi_prime: alpha must be > 0, got {alpha}")
    if not tol > 0.0:
        raise DomainError(f"lerch_phi_prime: tol must be > 0, got {tol}")
    if z == 0.0:
        return -math.log(alpha)
    if z == -1.0:
        return _lerch_alternating(alpha, tol)
    az = abs(z)
    if az >= 1.0:
        raise DomainError(f"lerch_phi_prime: need |z| < 1 or z = -1, got z={z}")

    block_sums = []
    k0 = 0
    while k0 < _LERCH_MAX_TERMS:
        ks = np.arange(k0, k0 + _LERCH_BLOCK)
        block = -np.log(ks + alpha) * np.power(z, ks)
        block_sums.append(math.fsum(block))
        K = k0 + _LERCH_BLOCK - 1
        # log(k+alpha) <= log(K+1+alpha) + (k-K-1)/(K+1+alpha) for k > K
        lead = math.log(K + 1 + alpha)
        tail = az ** (K + 1) * (
            lead / (1.0 - az) + az / ((K + 1 + alpha) * (1.0 - az) ** 2)
        )
        if tail < tol:
            return math.fsum(block_sums)
        k0 += _LERCH_BLOCK
    raise BudgetError(
        f"lerch_phi_prime: no convergence within {_LERCH_MAX_TERMS} terms "
        f"(z={z}, alpha={alpha}, tol={tol})"
    )


def _lerch_alternating(alpha: float, tol: float) -> float:
    # Euler acceleration: repeated pairwise averaging of the partial sums of
    # sum (-1)^k log(k+alpha).  The transformed terms are the forward
    # differences of log at alpha over 2^(j+1), which decay fast enough to
    # hit 1e-13 within ~50 terms.
    prev = None
    for n_terms in (24, 40, 56, 72):
        k = np.arange(n_terms + 1)
        partial = np.cumsum(((-1.0) ** k) * np.log(k + alpha))
        while partial.size > 1:
            partial = 0.5 * (partial[:-1] + partial[1:])
        est = -float(partial[0])
        if prev is not None and abs(est - prev) < 0.5 * tol:
            return est
        prev = est
    raise BudgetError(
        f"lerch_phi_prime: Euler acceleration did not converge at z=-1 "
        f"(alpha={alpha}, tol={tol})"
    )
