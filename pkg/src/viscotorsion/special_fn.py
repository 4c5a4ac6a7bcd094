"""Bessel functions J0, J1 and J1' on x >= 0, and the torsional root condition.

Three regimes, switch points frozen below:

* ``x <= SERIES_MAX``: ascending power series.
* ``SERIES_MAX < x <= ASYMPTOTIC_MIN``: Miller backward recurrence normalised
  with ``J0 + 2 * sum(J_2k) = 1`` (the continued-fraction regime).
* ``x > ASYMPTOTIC_MIN``: Hankel asymptotic expansion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import RootFindingError

SERIES_MAX = 6.0
ASYMPTOTIC_MIN = 25.0
SERIES_TERMS = 40
HANKEL_TERMS = 14
# Miller start order: even integer >= MILLER_SLOPE * x + MILLER_OFFSET
MILLER_SLOPE = 1.2
MILLER_OFFSET = 32
_RESCALE = 1e200

# Root scan step; J2 zeros are separated by more than pi.
ROOT_SCAN_STEP = 0.25
ROOT_SCAN_START = 0.5


@dataclass(frozen=True)
class BesselEval:
    x: float | np.ndarray
    j0: float | np.ndarray
    j1: float | np.ndarray
    j1p: float | np.ndarray


def _series(x):
    # J0, J1 and J1(x)/x by ascending series; term ratio -(x/2)^2 / (m (m + nu))
    q = -0.25 * x * x
    t0 = np.ones_like(x)
    t1 = 0.5 * np.ones_like(x)  # J1(x)/x leading term
    s0 = t0.copy()
    s1 = t1.copy()
    for m in range(1, SERIES_TERMS):
        t0 = t0 * q / (m * m)
        t1 = t1 * q / (m * (m + 1))
        s0 += t0
        s1 += t1
    return s0, s1 * x, s1


def _miller(x):
    start = int(2 * math.ceil((MILLER_SLOPE * float(np.max(x)) + MILLER_OFFSET) / 2))
    jp1 = np.zeros_like(x)
    jn = np.full_like(x, 1e-30)
    norm = np.zeros_like(x)
    j1 = np.zeros_like(x)
    # jn holds J_n (unnormalised); step down to n - 1
    for n in range(start, 0, -1):
        if n % 2 == 0:
            norm += 2.0 * jn
        jm1 = (2.0 * n / x) * jn - jp1
        jp1, jn = jn, jm1
        if n - 1 == 1:
            j1 = jn.copy()
        big = np.abs(jn) > _RESCALE
        if big.any():
            scale = np.where(big, 1.0 / _RESCALE, 1.0)
            jn *= scale
            jp1 *= scale
            norm *= scale
            j1 *= scale
    norm += jn
    return jn / norm, j1 / norm


def _hankel(x):
    out = []
    for nu in (0, 1):
        mu = 4.0 * nu * nu
        p = np.ones_like(x)
        q = np.zeros_like(x)
        term = np.ones_like(x)
        for k in range(1, 2 * HANKEL_TERMS):
            term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * x)
            if k % 2 == 1:
                q += term if (k // 2) % 2 == 0 else -term
            else:
                p += -term if (k // 2) % 2 == 1 else term
        chi = x - (2 * nu + 1) * math.pi / 4
        out.append(np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi)))
    return out[0], out[1]


def bessel_j01(x):
    """Return ``(J0(x), J1(x), J1(x)/x)`` for an array of nonnegative arguments.

    ``J1(x)/x`` takes its limit 1/2 at the origin.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0) or np.any(~np.isfinite(x)):
        raise ValueError("bessel_j01 requires finite x >= 0")
    flat = x.ravel()
    j0 = np.empty_like(flat)
    j1 = np.empty_like(flat)
    j1x = np.empty_like(flat)

    lo = flat <= SERIES_MAX
    mid = (flat > SERIES_MAX) & (flat <= ASYMPTOTIC_MIN)
    hi = flat > ASYMPTOTIC_MIN
    if lo.any():
        j0[lo], j1[lo], j1x[lo] = _series(flat[lo])
    if mid.any():
        j0[mid], j1[mid] = _miller(flat[mid])
        j1x[mid] = j1[mid] / flat[mid]
    if hi.any():
        j0[hi], j1[hi] = _hankel(flat[hi])
        j1x[hi] = j1[hi] / flat[hi]
    return j0.reshape(x.shape), j1.reshape(x.shape), j1x.reshape(x.shape)


def bessel_j(x) -> BesselEval:
    """Evaluate J0, J1 and J1' at ``x >= 0`` (scalar or array)."""
    j0, j1, j1x = bessel_j01(x)
    j1p = j0 - j1x
    if np.ndim(x) == 0:
        return BesselEval(float(x), float(j0), float(j1), float(j1p))
    return BesselEval(np.asarray(x, dtype=float), j0, j1, j1p)


def root_condition(k):
    """``k J1'(k) - J1(k)``, which equals ``-k J2(k)``."""
    j0, j1, _ = bessel_j01(k)
    return np.asarray(k) * j0 - 2.0 * j1


def root_search_bound(count: int) -> float:
    return math.pi * (count + 3) + 10.0


def modal_roots(count: int) -> list[float]:
    """First ``count`` positive solutions k_2 < k_3 < ... of k J1'(k) = J1(k).

    Sign changes of ``k J0(k) - 2 J1(k)`` (= -k J2(k)) are bracketed on a
    uniform scan of step ``ROOT_SCAN_STEP`` and polished with Brent's method.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    bound = root_search_bound(count)
    grid = np.arange(ROOT_SCAN_START, bound + ROOT_SCAN_STEP, ROOT_SCAN_STEP)
    vals = root_condition(grid)
    roots: list[float] = []

    def g(k):
        return float(root_condition(np.array(k)))

    for i in range(len(grid) - 1):
        if vals[i] == 0.0:
            roots.append(float(grid[i]))
        elif vals[i] * vals[i + 1] < 0:
            roots.append(brentq(g, grid[i], grid[i + 1], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200))
        if len(roots) == count:
            return roots
    raise RootFindingError(
        f"found only {len(roots)} of {count} roots of k J1'(k) = J1(k) below k = {bound:.3f}"
    )
