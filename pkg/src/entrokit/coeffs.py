"""Logarithmic difference coefficients and their generating function.

``c_alpha(1) = -log(alpha)`` and, for j >= 2,

    c_alpha(j) = -sum_{k=0}^{j-1} (-1)^k C(j-1, k) log(k + alpha),

the (sign-adjusted) forward differences of the logarithm at alpha, i.e.
the Newton-series coefficients of log around alpha.  They are positive
and strictly decreasing in j from j = 2 on, roughly like 1/(j log j).

Small j use the exact alternating sum (the log(alpha) level cancels, so
the terms are C(j-1,k) log1p(k/alpha) summed exactly with fsum); binomial
growth makes that lose one bit per order, so beyond ``J_SWITCH`` the
equivalent integral representation

    c_alpha(j) = -int_0^1 (1-z)^(alpha-1) z^(j-1) / log(1-z) dz

takes over (for alpha < 1 after the substitution v = (1-z)^alpha, which
removes the endpoint blowup).  Tables are memoized per alpha (exact bit
pattern) and can be persisted to a headerless CSV cache.
"""

from __future__ import annotations

import heapq
import math
import os
import struct
import tempfile
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List

import numpy as np

from .errors import DomainError
from .quadrature import WG, WGK, XGK
from .special import lerch_phi_prime

__all__ = [
    "J_SWITCH",
    "CoeffEntry",
    "CoeffTable",
    "coeff",
    "coeff_entry",
    "coeff_table",
    "gen_C",
    "newton_log",
    "weighted_sum",
    "save_cache",
    "load_cache",
    "clear_memory_cache",
]

#: Last order computed by the alternating sum; beyond this the integral
#: path keeps the absolute error within the 1e-10 contract.
J_SWITCH = 18

_EPS = 2.0 ** -52
_INTEGRAL_TOL = 1e-12
_PATCH = 1e-12
_BLOCK = 1024
_MAX_PANELS = 4000

METHOD_ALTERNATING = "alternating-sum"
METHOD_INTEGRAL = "integral"


@dataclass(frozen=True)
class CoeffEntry:
    j: int
    value: float
    method: str
    err_bound: float


@dataclass(frozen=True)
class CoeffTable:
    """Dense table of c_alpha(j) for j = 1..len(entries)."""

    alpha: float
    entries: tuple

    def value(self, j: int) -> float:
        return self.entries[j - 1].value


_tables: Dict[bytes, List[CoeffEntry]] = {}
_lock = threading.Lock()


def _key(alpha: float) -> bytes:
    return struct.pack("<d", alpha)


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not (alpha > 0.0 and math.isfinite(alpha)):
        raise DomainError(f"alpha must be a positive finite real, got {alpha}")
    return alpha


def _alternating_entry(alpha: float, j: int) -> CoeffEntry:
    if j == 1:
        v = -math.log(alpha)
        return CoeffEntry(1, v, METHOD_ALTERNATING, 2.0 * _EPS * abs(v) + 1e-300)
    # The sum is log of prod_k (k+alpha)^(s_k C(j-1,k)) with s_k = (-1)^(k+1).
    # alpha is a dyadic rational, and the common denominator drops out since
    # sum_k s_k C(j-1,k) = 0 for j >= 2, so both sides are exact integers:
    # c = log1p((N-D)/D) is then correct to ~1 ulp, immune to the ~2^j
    # cancellation that limits a floating-point evaluation of the same sum.
    # Families weight these coefficients by factorial moments as large as
    # ~1e6, which is what makes the extra exactness necessary.
    fa = Fraction(alpha)
    num = 1
    den = 1
    for k in range(j):
        c_k = math.comb(j - 1, k)
        p_k = (fa + k).numerator
        if k % 2:
            num *= pow(p_k, c_k)
        else:
            den *= pow(p_k, c_k)
    try:
        v = math.log1p((num - den) / den)
        err = 2.0 * _EPS * abs(v) + 1e-300
    except OverflowError:  # ratio beyond float range (alpha absurdly small)
        v = math.log(num) - math.log(den)
        err = _EPS * (abs(math.log(num)) + abs(math.log(den)))
    return CoeffEntry(j, v, METHOD_ALTERNATING, err)


def _integral_entries(alpha: float, j_lo: int, j_hi: int) -> List[CoeffEntry]:
    entries: List[CoeffEntry] = []
    for start in range(j_lo, j_hi + 1, _BLOCK):
        js = np.arange(start, min(start + _BLOCK, j_hi + 1))
        vals, errs = _block_quad(alpha, js)
        entries.extend(
            CoeffEntry(int(j), float(v), METHOD_INTEGRAL, float(e))
            for j, v, e in zip(js, vals, errs)
        )
    return entries


def _block_quad(alpha: float, js: np.ndarray, tol_each: float = _INTEGRAL_TOL):
    """Integral-path c_alpha(j) for all j in ``js`` (each >= 2) at once.

    One adaptive Gauss-Kronrod subdivision of (0, 1) is shared by the whole
    block: every panel evaluates exp(base + (j-1) g) * w as an outer product
    over j, and refinement is driven by the worst per-j error.  Both
    endpoint limits vanish for j >= 3, so integration runs over
    [PATCH, 1-PATCH] and the clipped slivers go into the error bound.
    """
    jm1 = (js - 1.0)[:, None]
    if alpha >= 1.0:
        # raw z-form: -(1-z)^(alpha-1) z^(j-1) / log(1-z)
        def rows(x):
            l1 = np.log1p(-x)
            return np.exp((alpha - 1.0) * l1 + jm1 * np.log(x)) / (-l1)
    else:
        # substituted form: (1 - v^(1/alpha))^(j-1) / (-log v)
        inv = 1.0 / alpha

        def rows(x):
            return np.exp(jm1 * np.log1p(-np.power(x, inv))) / (-np.log(x))

    def panel(a, b):
        c = 0.5 * (a + b)
        h = 0.5 * (b - a)
        y = rows(c + h * XGK)
        vk = h * (y @ WGK)
        vg = h * (y[:, 1::2] @ WG)
        return vk, np.abs(vk - vg)

    a0, b0 = _PATCH, 1.0 - _PATCH
    vk, err = panel(a0, b0)
    heap = [(-float(err.max()), a0, b0, 0, vk, err)]
    frozen = []
    total_err = err.copy()
    n_panels = 1
    while heap and float(total_err.max()) > tol_each and n_panels < _MAX_PANELS:
        _, pa, pb, depth, pv, pe = heapq.heappop(heap)
        mid = 0.5 * (pa + pb)
        if depth >= 40 or not (pa < mid < pb):
            frozen.append((pa, pb, pv, pe))
            continue
        v1, e1 = panel(pa, mid)
        v2, e2 = panel(mid, pb)
        n_panels += 2
        total_err += e1 + e2 - pe
        heapq.heappush(heap, (-float(e1.max()), pa, mid, depth + 1, v1, e1))
        heapq.heappush(heap, (-float(e2.max()), mid, pb, depth + 1, v2, e2))

    panels = sorted(
        frozen + [(pa, pb, pv, pe) for _, pa, pb, _, pv, pe in heap],
        key=lambda p: p[0],
    )
    vals = np.sum(np.stack([p[2] for p in panels]), axis=0)
    errs = np.sum(np.stack([p[3] for p in panels]), axis=0) + 4e-14
    return vals, errs


def _ensure(alpha: float, j_max: int) -> List[CoeffEntry]:
    key = _key(alpha)
    entries = _tables.get(key)
    if entries is not None and len(entries) >= j_max:
        return entries
    with _lock:
        entries = _tables.setdefault(key, [])
        have = len(entries)
        if have < j_max:
            for j in range(have + 1, min(j_max, J_SWITCH) + 1):
                entries.append(_alternating_entry(alpha, j))
            if j_max > J_SWITCH:
                lo = max(len(entries) + 1, J_SWITCH + 1)
                entries.extend(_integral_entries(alpha, lo, j_max))
        return entries


def coeff_entry(alpha: float, j: int) -> CoeffEntry:
    """c_alpha(j) together with its method tag and error bound."""
    alpha = _check_alpha(alpha)
    if not isinstance(j, (int, np.integer)) or j < 1:
        raise DomainError(f"j must be a positive integer, got {j!r}")
    return _ensure(alpha, int(j))[j - 1]


def coeff(alpha: float, j: int) -> float:
    """The logarithmic difference coefficient c_alpha(j), |error| <= 1e-10."""
    return coeff_entry(alpha, j).value


def coeff_table(alpha: float, j_max: int) -> CoeffTable:
    """Dense coefficient table for j = 1..j_max (memoized per alpha)."""
    alpha = _check_alpha(alpha)
    if not isinstance(j_max, (int, np.integer)) or j_max < 1:
        raise DomainError(f"j_max must be a positive integer, got {j_max!r}")
    entries = _ensure(alpha, int(j_max))
    return CoeffTable(alpha, tuple(entries[:j_max]))


def gen_C(alpha: float, z: float, tol: float = 1e-12) -> float:
    """Generating function C_alpha(z) = sum_{j>=1} c_alpha(j) z^j.

    Evaluated through C_alpha(z) = z/(1-z) * Phi'_alpha(-z/(1-z)); the
    Lerch argument stays in the unit disc (or equals -1) exactly for
    z <= 1/2, which is the supported domain — in particular every z <= -1
    is fine even though the raw power series diverges there.
    """
    alpha = _check_alpha(alpha)
    if not tol > 0.0:
        raise DomainError(f"tol must be > 0, got {tol}")
    if z == 0.0:
        return 0.0
    if z > 0.5:
        raise DomainError(
            f"gen_C: defined for z <= 1/2 (Lerch argument leaves the unit disc), got {z}"
        )
    scale = z / (1.0 - z)
    w = -scale
    inner_tol = tol / max(1.0, abs(scale))
    return scale * lerch_phi_prime(w, alpha, inner_tol)


def newton_log(x: float, alpha: float, j_max: int) -> float:
    """Partial Newton series for log(x + alpha) around alpha.

    sum_{j=0}^{j_max} C(x, j) (-1)^(j+1) c_alpha(j+1), where C(x, j) is the
    generalized binomial coefficient.  Diagnostic: converges for x > -alpha,
    slowly (the j_max=0 term alone is log(alpha)).
    """
    alpha = _check_alpha(alpha)
    if not x > -alpha:
        raise DomainError(f"newton_log: need x > -alpha, got x={x}, alpha={alpha}")
    if not isinstance(j_max, (int, np.integer)) or j_max < 0:
        raise DomainError(f"j_max must be a nonnegative integer, got {j_max!r}")
    entries = _ensure(alpha, int(j_max) + 1)
    terms = []
    binom = 1.0
    for j in range(j_max + 1):
        c = entries[j].value  # c_alpha(j+1)
        terms.append(binom * c if j % 2 else -binom * c)
        binom *= (x - j) / (j + 1)
    return math.fsum(terms)


def weighted_sum(alpha: float, j_max: int) -> float:
    """Partial sum of sum_j c_alpha(j)/j, which converges to -psi(alpha)."""
    alpha = _check_alpha(alpha)
    if not isinstance(j_max, (int, np.integer)) or j_max < 1:
        raise DomainError(f"j_max must be a positive integer, got {j_max!r}")
    entries = _ensure(alpha, int(j_max))
    return math.fsum(e.value / e.j for e in entries[:j_max])


def save_cache(path: str) -> None:
    """Persist all memoized tables: headerless CSV, atomically replaced.

    Row format: ``alpha,j,value,err_bound,method``.
    """
    with _lock:
        rows = []
        for key, entries in sorted(_tables.items()):
            alpha = struct.unpack("<d", key)[0]
            rows.extend(
                f"{alpha!r},{e.j},{e.value!r},{e.err_bound!r},{e.method}\n"
                for e in entries
            )
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.writelines(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def load_cache(path: str) -> int:
    """Merge a cache file into the in-process tables; returns rows adopted.

    Only a dense prefix j = 1..k per alpha is usable; rows are adopted when
    they extend past what is already memoized.
    """
    grouped: Dict[float, Dict[int, CoeffEntry]] = {}
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            alpha_s, j_s, value_s, err_s, method = line.split(",")
            entry = CoeffEntry(int(j_s), float(value_s), method, float(err_s))
            grouped.setdefault(float(alpha_s), {})[entry.j] = entry
    adopted = 0
    with _lock:
        for alpha, by_j in grouped.items():
            dense = []
            j = 1
            while j in by_j:
                dense.append(by_j[j])
                j += 1
            current = _tables.setdefault(_key(alpha), [])
            if len(dense) > len(current):
                current[:] = dense
                adopted += len(dense)
    return adopted


def clear_memory_cache() -> None:
    with _lock:
        _tables.clear()
