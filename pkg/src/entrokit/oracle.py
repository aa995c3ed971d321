"""Deliberately naive reference implementations and golden records.

These paths exist only for cross-validation and golden-value generation:
they share no code with the production series/integral routes.  The
coefficient oracle runs the raw alternating sum in mpmath at a requested
working precision, which defeats the binomial cancellation outright.

Golden records live in ``data/golden.csv`` (``key,value,tol,generator``)
and are regenerated via ``entrokit validate --regen-golden``.
"""

from __future__ import annotations

import csv
import math
import os
import tempfile
from dataclasses import dataclass
from importlib import resources
from typing import Dict, List, Optional

import mpmath as mp
import numpy as np

from . import distributions as dist
from .errors import DomainError, IncompleteSupportError, PrecisionError

__all__ = [
    "naive_entropy",
    "naive_coeff",
    "naive_elog_gamma",
    "GoldenRecord",
    "golden_path",
    "load_golden",
    "regenerate_golden",
    "write_golden",
]

_MASS_DEFICIT = 1e-14


def _pmf_prefix(d, k_max: int) -> np.ndarray:
    lo, hi = dist.support(d)
    top = k_max if hi is None else min(hi, k_max)
    ks = np.arange(lo, top + 1)
    return np.exp(dist.log_pmf(d, ks))


def naive_entropy(d, k_max: int) -> float:
    """Plain -sum_{k<=k_max} p_k log p_k; no tail certification.

    Errors out if the truncated support misses more than 1e-14 of mass.
    """
    pk = _pmf_prefix(d, k_max)
    deficit = abs(1.0 - math.fsum(pk))
    if deficit > _MASS_DEFICIT:
        raise IncompleteSupportError(
            f"naive_entropy: mass deficit {deficit:.3e} at k_max={k_max}"
        )
    return math.fsum(float(-p * math.log(p)) for p in pk if p > 0.0)


def naive_elog_gamma(d, alpha: float, k_max: int) -> float:
    """Plain sum_{k<=k_max} p_k log Gamma(k+alpha) over the truncated support."""
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    pk = _pmf_prefix(d, k_max)
    deficit = abs(1.0 - math.fsum(pk))
    if deficit > _MASS_DEFICIT:
        raise IncompleteSupportError(
            f"naive_elog_gamma: mass deficit {deficit:.3e} at k_max={k_max}"
        )
    lo, _ = dist.support(d)
    return math.fsum(
        float(p) * math.lgamma(k + lo + alpha) for k, p in enumerate(pk)
    )


def naive_coeff(alpha: float, j: int, precision_bits: int = 212) -> float:
    """c_alpha(j) by the raw alternating sum in extended precision.

    Works at ``precision_bits`` of mantissa; refuses when the estimated
    cancellation would leave fewer than 40 guard bits.
    """
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    if not isinstance(j, (int, np.integer)) or j < 1:
        raise DomainError(f"j must be a positive integer, got {j!r}")
    if j > 200:
        raise DomainError(f"naive_coeff certified only for j <= 200, got {j}")
    if precision_bits < 106:
        raise DomainError(f"precision_bits must be >= 106, got {precision_bits}")
    with mp.workprec(precision_bits):
        a = mp.mpf(alpha)
        terms = [
            (-1) ** (k + 1) * mp.binomial(j - 1, k) * mp.log(k + a)
            for k in range(j)
        ]
        total = mp.fsum(terms)
        magnitude = mp.fsum(abs(t) for t in terms)
        if total != 0 and magnitude > 0:
            cancel_bits = float(mp.log(magnitude / abs(total), 2))
            if cancel_bits > precision_bits - 40:
                raise PrecisionError(
                    f"naive_coeff: ~{cancel_bits:.0f} bits cancel at j={j}; "
                    f"raise precision_bits above {int(cancel_bits) + 40}"
                )
        return float(total)


# ---------------------------------------------------------------------------
# golden records


@dataclass(frozen=True)
class GoldenRecord:
    key: str
    value: float
    tol: float
    generator: str


_GENERATORS: Dict[str, tuple] = {
    "poisson:lam=1:entropy": (
        lambda: naive_entropy(dist.Poisson(1.0), 60),
        1e-12, "naive_entropy k<=60"),
    "poisson:lam=10:entropy": (
        lambda: naive_entropy(dist.Poisson(10.0), 120),
        1e-12, "naive_entropy k<=120"),
    "poisson:lam=1:elog_gamma:alpha=1": (
        lambda: naive_elog_gamma(dist.Poisson(1.0), 1.0, 60),
        1e-12, "naive_elog_gamma k<=60"),
    "binomial:n=10:p=0.5:elog_gamma:alpha=1": (
        lambda: naive_elog_gamma(dist.Binomial(10, 0.5), 1.0, 10),
        1e-13, "naive_elog_gamma exact 11-term sum"),
    "negbinomial:r=2:p=0.3:elog_gamma:alpha=2": (
        lambda: naive_elog_gamma(dist.NegBinomial(2.0, 0.3), 2.0, 200),
        1e-12, "naive_elog_gamma k<=200"),
    "geometric:p=0.5:entropy": (
        lambda: naive_entropy(dist.Geometric(0.5), 120),
        1e-13, "naive_entropy k<=120"),
    "betabinomial:n=10:a=2:b=3:entropy": (
        lambda: naive_entropy(dist.BetaBinomial(10, 2.0, 3.0), 10),
        1e-13, "naive_entropy exact 11-term sum"),
    "hypergeometric:N=20:K=8:n=5:entropy": (
        lambda: naive_entropy(dist.Hypergeometric(20, 8, 5), 20),
        1e-13, "naive_entropy exact support sum"),
    "coeff:alpha=1:j=40": (
        lambda: naive_coeff(1.0, 40, 212),
        1e-13, "naive_coeff mpmath 212 bits"),
    "coeff:alpha=0.5:j=40": (
        lambda: naive_coeff(0.5, 40, 212),
        1e-13, "naive_coeff mpmath 212 bits"),
    "coeff:alpha=1:j=60": (
        lambda: naive_coeff(1.0, 60, 212),
        1e-13, "naive_coeff mpmath 212 bits"),
}


def golden_path() -> str:
    """Filesystem path of the checked-in golden CSV."""
    return str(resources.files("entrokit").joinpath("data/golden.csv"))


def load_golden(path: Optional[str] = None) -> List[GoldenRecord]:
    path = path or golden_path()
    records = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0] == "key":
                continue
            records.append(GoldenRecord(row[0], float(row[1]), float(row[2]), row[3]))
    return records


def regenerate_golden() -> List[GoldenRecord]:
    """Recompute every golden record from its registered oracle."""
    return [
        GoldenRecord(key, fn(), tol, gen)
        for key, (fn, tol, gen) in sorted(_GENERATORS.items())
    ]


def write_golden(path: Optional[str] = None) -> List[GoldenRecord]:
    """Regenerate and atomically rewrite the golden CSV."""
    path = path or golden_path()
    records = regenerate_golden()
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["key", "value", "tol", "generator"])
            for rec in records:
                writer.writerow([rec.key, repr(rec.value), repr(rec.tol), rec.generator])
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return records
