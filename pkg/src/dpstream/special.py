"""Dilogarithm (Spence's function) on [-1, 1] and its inverse on [0, 1].

li2(z) = sum_{t>=1} z^t / t^2. The direct series is geometric only for
|z| <= 1/2, so the evaluation is split:

  * |z| <= 1/2        direct summation, stops when the term underflows the
                      target tolerance (worst case ~60 terms),
  * z in (1/2, 1)     Landen reflection
                      li2(z) = pi^2/6 - ln(z) ln(1-z) - li2(1-z),
  * z in (-1, -1/2)   square identity li2(z) = li2(z^2)/2 - li2(-z),
  * z = 1, -1         closed forms pi^2/6 and -pi^2/12.

Absolute error is well below the 1e-12 contract on the whole interval.
"""

from __future__ import annotations

import math

from .exceptions import OutOfDomainError

PI2_OVER_6 = math.pi**2 / 6.0

_SERIES_TOL = 1e-18


def _li2_series(z: float) -> float:
    # |z| <= 1/2: terms shrink at least geometrically with ratio 1/2
    total = 0.0
    term = z
    t = 1
    while abs(term) / (t * t) > _SERIES_TOL and t < 500:
        total += term / (t * t)
        t += 1
        term *= z
    return total


def li2(z: float) -> float:
    """Evaluate the dilogarithm at ``z`` in [-1, 1]."""
    if not -1.0 <= z <= 1.0:
        raise OutOfDomainError(f"li2 domain is [-1, 1], got {z!r}")
    if z == 1.0:
        return PI2_OVER_6
    if z == -1.0:
        return -math.pi**2 / 12.0
    if abs(z) <= 0.5:
        return _li2_series(z)
    if z > 0.5:
        return PI2_OVER_6 - math.log(z) * math.log1p(-z) - _li2_series(1.0 - z)
    # z in (-1, -1/2)
    return 0.5 * li2(z * z) - li2(-z)


def li2_inv(y: float, tol: float = 1e-12) -> float:
    """Invert li2 on [0, 1].

    li2 is strictly increasing there, so a bisection bracket down to ``tol``
    width plus one Newton polish (d/dz li2 = -ln(1-z)/z) is robust and
    accurate to the 1e-10 contract with a wide margin.
    """
    if not 0.0 <= y <= PI2_OVER_6:
        raise OutOfDomainError(f"li2_inv domain is [0, pi^2/6], got {y!r}")
    if y == 0.0:
        return 0.0
    if y == PI2_OVER_6:
        return 1.0
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if li2(mid) < y:
            lo = mid
        else:
            hi = mid
    z = 0.5 * (lo + hi)
    if 0.0 < z < 1.0:
        deriv = -math.log1p(-z) / z
        if deriv > 0:
            z -= (li2(z) - y) / deriv
            z = min(max(z, lo - tol), hi + tol)
    return min(max(z, 0.0), 1.0)
