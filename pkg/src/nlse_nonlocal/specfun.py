"""Special functions and quadrature rules used by the kernel machinery.

The classical special functions are thin wrappers over scipy.special so every
consumer in this package goes through one audited interface.  The adaptive
Gauss-Kronrod integrator is implemented here directly because it doubles as an
independent check against closed-form kernel symbols elsewhere in the package.
"""

from __future__ import annotations

import heapq

import numpy as np
import scipy.special as sps

euler_gamma = float(np.euler_gamma)


def erf(x):
    return sps.erf(x)


def erfc(x):
    return sps.erfc(x)


def exp_e1(x):
    """Exponential integral E1(x) = int_x^inf exp(-s)/s ds, x > 0."""
    return sps.exp1(x)


def bessel_i0(x):
    return sps.i0(x)


def bessel_i0e(x):
    """exp(-|x|) * I0(x), stable for large argument."""
    return sps.i0e(x)


def erfcx(x):
    """exp(x^2) * erfc(x), stable for large argument."""
    return sps.erfcx(x)


def exp_e1_scaled(x):
    """exp(x) * E1(x) for x >= 0, stable for large argument.

    Switches to the asymptotic expansion once exp(x) would lose the tail of
    E1 to underflow.
    """
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(arr)
    small = arr <= 600.0
    out[small] = np.exp(arr[small]) * sps.exp1(arr[small])
    big = ~small
    if np.any(big):
        xi = 1.0 / arr[big]
        # 1/x - 1/x^2 + 2/x^3 - 6/x^4 + 24/x^5 - 120/x^6
        out[big] = xi * (1.0 + xi * (-1.0 + xi * (2.0 + xi * (-6.0 + xi * (24.0 - 120.0 * xi)))))
    return out.reshape(np.shape(x)) if np.ndim(x) else float(out[0])


def gauss_legendre(n, a=-1.0, b=1.0):
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    if n < 1:
        raise ValueError("need at least one node")
    x, w = np.polynomial.legendre.leggauss(int(n))
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    return mid + half * x, half * w


# 15-point Kronrod extension of 7-point Gauss-Legendre (positive abscissae).
_XGK = np.array([
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691,
    0.7415311855993944, 0.5860872354676911, 0.4058451513773972,
    0.2077849550078985, 0.0,
])
_WGK = np.array([
    0.0229353220105292, 0.0630920926299786, 0.1047900103222502,
    0.1406532597155259, 0.1690047266392679, 0.1903505780647854,
    0.2044329400752989, 0.2094821410847278,
])
_WG = np.array([
    0.1294849661688697, 0.2797053914892767,
    0.3818300505051189, 0.4179591836734694,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG_FULL = np.zeros_like(_WK)
_WG_FULL[1:-1:2] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15_panel(func, a, b):
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    fx = np.asarray(func(mid + half * _NODES), dtype=float)
    coarse = half * float(fx @ _WG_FULL)
    fine = half * float(fx @ _WK)
    # QUADPACK-style sharpened error estimate
    resabs = half * float(np.abs(fx) @ _WK)
    mean = fine / (b - a)
    resasc = half * float(np.abs(fx - mean) @ _WK)
    err = abs(fine - coarse)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    tiny = 50.0 * np.finfo(float).eps * resabs
    return fine, max(err, tiny)


def _adaptive_finite(func, a, b, tol, max_intervals):
    val, err = _gk15_panel(func, a, b)
    heap = [(-err, a, b, val)]
    total, total_err = val, err
    n = 1
    while total_err > tol * max(1.0, abs(total)) and n < max_intervals:
        nerr, lo, hi, v = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15_panel(func, lo, mid)
        v2, e2 = _gk15_panel(func, mid, hi)
        total += (v1 + v2) - v
        total_err += (e1 + e2) + nerr  # nerr is negative
        heapq.heappush(heap, (-e1, lo, mid, v1))
        heapq.heappush(heap, (-e2, mid, hi, v2))
        n += 1
    return total, total_err, n


def adaptive_gk15(func, a, b, tol=1e-13, max_intervals=4000, return_error=False):
    """Adaptive Gauss-Kronrod quadrature of a vectorized integrand.

    Supports b = inf through the substitution s = c/v on the tail [c, inf)
    with c = max(a, 0) + 1, so integrands decaying at least algebraically are
    handled without user-side transformations.
    """
    if not b > a:
        raise ValueError("need b > a")
    if np.isinf(a):
        raise ValueError("left endpoint must be finite")
    if np.isinf(b):
        c = max(a, 0.0) + 1.0
        head, e1, n1 = _adaptive_finite(func, a, c, 0.5 * tol, max_intervals)

        def tail_integrand(v):
            v = np.asarray(v, dtype=float)
            return func(c / v) * (c / v**2)

        tail, e2, n2 = _adaptive_finite(tail_integrand, 0.0, 1.0, 0.5 * tol,
                                        max_intervals)
        value, err, n = head + tail, e1 + e2, n1 + n2
    else:
        value, err, n = _adaptive_finite(func, a, b, tol, max_intervals)
    if err > 100.0 * tol * max(1.0, abs(value)) and n >= max_intervals:
        raise RuntimeError(
            f"quadrature did not converge: error estimate {err:.3e} after {n} intervals"
        )
    if return_error:
        return value, err
    return value
