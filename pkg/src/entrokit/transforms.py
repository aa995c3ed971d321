"""Laplace-transform identities of the Poisson entropy machinery.

Two closed forms are checked against direct numerical transforms:

  L{H_Poi}(z) = (gamma + log z)/z^2 - Phi'(1/(1+z)) / (z(1+z))
  L{E_Poi}(z) = E_Geom(1/(1+z)) / z^2,

where E_Poi(lam) = E[log X!] for Poisson X, E_Geom(p) = E[log(X+1)] for a
geometric X with mean p/(1-p), and Phi' is the s-derivative of the
polylogarithm-generating Lerch transcendent at s=0.  The numerical side
integrates the entropy/expectation pointwise (inner evaluations one order
tighter than the outer quadrature).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import Poisson, entropy, log_gamma_expectation
from .errors import DomainError
from .quadrature import integrate_semi_infinite
from .special import EULER_GAMMA, lerch_phi_prime

__all__ = [
    "LaplacePoint",
    "laplace_numeric",
    "laplace_H_poi_closed",
    "laplace_H_poi_identity",
    "laplace_E_poi_identity",
    "Z_GRID",
]

#: Fixed z grid of the validation suite.
Z_GRID = (0.5, 1.0, 2.0, 5.0)


@dataclass(frozen=True)
class LaplacePoint:
    """One two-sided evaluation of a Laplace identity."""

    z: float
    numeric: float
    closed_form: float

    @property
    def abs_gap(self) -> float:
        return abs(self.numeric - self.closed_form)


def laplace_numeric(f, z: float, tol: float = 1e-8, limit_at_zero=None) -> float:
    """int_0^inf f(lam) e^(-z lam) dlam by semi-infinite quadrature."""
    if not z > 0.0:
        raise DomainError(f"laplace_numeric: z must be > 0, got {z}")

    def g(lam: np.ndarray) -> np.ndarray:
        return np.array([f(v) for v in lam]) * np.exp(-z * lam)

    r = integrate_semi_infinite(g, tol, decay_rate=z, limit_at_zero=limit_at_zero)
    return r.value


def laplace_H_poi_closed(z: float, tol: float = 1e-10) -> float:
    """Closed form of the Laplace transform of the Poisson entropy."""
    if not z > 0.0:
        raise DomainError(f"laplace_H_poi_closed: z must be > 0, got {z}")
    phi = lerch_phi_prime(1.0 / (1.0 + z), 1.0, tol)
    return (EULER_GAMMA + math.log(z)) / (z * z) - phi / (z * (1.0 + z))


def laplace_H_poi_identity(z: float, tol: float = 1e-8) -> LaplacePoint:
    """Two-sided evaluation of L{H_Poi} at z."""
    inner_tol = tol / 10.0

    def H(lam: float) -> float:
        return entropy(Poisson(lam), "auto", inner_tol).value

    numeric = laplace_numeric(H, z, tol, limit_at_zero=0.0)
    return LaplacePoint(z, numeric, laplace_H_poi_closed(z, inner_tol))


def laplace_E_poi_identity(z: float, tol: float = 1e-8) -> LaplacePoint:
    """Two-sided evaluation of L{E_Poi}(z) = E_Geom(1/(1+z))/z^2."""
    if not z > 0.0:
        raise DomainError(f"laplace_E_poi_identity: z must be > 0, got {z}")
    inner_tol = tol / 10.0

    def E(lam: float) -> float:
        return log_gamma_expectation(Poisson(lam), 1.0, "auto", inner_tol).value

    numeric = laplace_numeric(E, z, tol, limit_at_zero=0.0)
    p = 1.0 / (1.0 + z)
    e_geom = (p - 1.0) * lerch_phi_prime(p, 1.0, inner_tol)
    return LaplacePoint(z, numeric, e_geom / (z * z))
