"""Hot numerical kernels, compiled with numba when available.

Every kernel has a plain-Python/numpy twin that is used when numba is not
installed or when the environment variable ``WFOURIER_NO_NUMBA`` is set to a
non-empty value other than ``0``/``false``.  The twins implement the exact
same arithmetic in the same order, so results agree between the two paths.
``benchmarks/bench_kernels.py`` times both.
"""

from __future__ import annotations

import math
import os

import numpy as np

_flag = os.environ.get("WFOURIER_NO_NUMBA", "").strip().lower()
_DISABLED = _flag not in ("", "0", "false")

try:
    if _DISABLED:
        raise ImportError("numba disabled by WFOURIER_NO_NUMBA")
    from numba import njit

    USING_NUMBA = True
except ImportError:
    USING_NUMBA = False

    def njit(*args, **kwargs):
        # decorator stand-in returning the function unchanged
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(fn):
            return fn

        return wrap


def kahan_sum_py(values):
    """Compensated (Kahan-Babuska-Neumaier) sum in fixed left-to-right order."""
    s = 0.0
    c = 0.0
    for i in range(values.shape[0]):
        x = values[i]
        t = s + x
        if abs(s) >= abs(x):
            c += (s - t) + x
        else:
            c += (x - t) + s
        s = t
    return s + c


def pav_nonincreasing_py(y, w):
    """Weighted least-squares projection onto the non-increasing cone.

    Pools adjacent violators; a violating block is merged into the block on
    its right.  Returns the projected array.
    """
    n = y.shape[0]
    means = np.empty(n)
    weights = np.empty(n)
    sizes = np.empty(n, dtype=np.int64)
    m = 0
    for i in range(n):
        means[m] = y[i]
        weights[m] = w[i]
        sizes[m] = 1
        m += 1
        # non-increasing fit: pool while the newer (right) block mean exceeds
        # the older (left) one
        while m > 1 and means[m - 1] > means[m - 2]:
            tw = weights[m - 2] + weights[m - 1]
            if tw > 0.0:
                mu = (means[m - 2] * weights[m - 2] + means[m - 1] * weights[m - 1]) / tw
            else:
                mu = 0.5 * (means[m - 2] + means[m - 1])
            means[m - 2] = mu
            weights[m - 2] = tw
            sizes[m - 2] += sizes[m - 1]
            m -= 1
    out = np.empty(n)
    k = 0
    for b in range(m):
        for _ in range(sizes[b]):
            out[k] = means[b]
            k += 1
    return out


def dp_best_chain_py(term):
    """Best chain value over an upper-triangular pair-term matrix.

    ``term[i, j]`` is the gain of using the consecutive pair ``(i, j)`` with
    ``i < j``.  A chain i0 < i1 < ... < il scores the sum of its consecutive
    pair terms; returns the maximum over all chains (of length >= 2).
    """
    n = term.shape[0]
    best = np.full(n, -np.inf)
    ans = -np.inf
    for j in range(1, n):
        bj = -np.inf
        for i in range(j):
            prev = best[i]
            if prev < 0.0:
                prev = 0.0
            v = prev + term[i, j]
            if v > bj:
                bj = v
        best[j] = bj
        if bj > ans:
            ans = bj
    return ans


def upper_hull_py(x, f):
    """Vertex indices of the upper convex hull of (x, f), x strictly increasing.

    Collinear middle points are dropped, so ties resolve to the earliest
    breakpoint.
    """
    n = x.shape[0]
    hull = np.empty(n, dtype=np.int64)
    m = 0
    for k in range(n):
        while m >= 2:
            a = hull[m - 2]
            b = hull[m - 1]
            # keep b only if slope(a,b) > slope(b,k)
            lhs = (f[b] - f[a]) * (x[k] - x[b])
            rhs = (f[k] - f[b]) * (x[b] - x[a])
            if lhs > rhs:
                break
            m -= 1
        hull[m] = k
        m += 1
    return hull[:m].copy()


def osc_gauss_sum_py(y, wt, c, s, tau, g2, z0, x):
    """Oscillatory quadrature accumulation over prepared Gauss nodes.

    Integrand family: c * y**s * log(y)**tau * exp(-g2*(y-z0)**2/2)
    with phase y*log(y) + 2*pi*x*y.  Returns (real, imag) partial sums.
    """
    re = 0.0
    im = 0.0
    for i in range(y.shape[0]):
        yi = y[i]
        ly = math.log(yi)
        amp = c * yi**s
        if tau != 0.0:
            amp *= ly**tau
        if g2 != 0.0:
            d = yi - z0
            amp *= math.exp(-0.5 * g2 * d * d)
        ph = yi * ly + 2.0 * math.pi * x * yi
        re += wt[i] * amp * math.cos(ph)
        im += wt[i] * amp * math.sin(ph)
    return re, im


if USING_NUMBA:
    kahan_sum = njit(cache=True)(kahan_sum_py)
    pav_nonincreasing = njit(cache=True)(pav_nonincreasing_py)
    dp_best_chain = njit(cache=True)(dp_best_chain_py)
    upper_hull = njit(cache=True)(upper_hull_py)
    osc_gauss_sum = njit(cache=True)(osc_gauss_sum_py)
else:
    kahan_sum = kahan_sum_py
    pav_nonincreasing = pav_nonincreasing_py
    dp_best_chain = dp_best_chain_py
    upper_hull = upper_hull_py
    osc_gauss_sum = osc_gauss_sum_py


def warmup():
    """Trigger JIT compilation of all kernels (no-op on the plain path)."""
    v = np.array([1.0, 2.0, 3.0])
    kahan_sum(v)
    pav_nonincreasing(v, v)
    dp_best_chain(np.array([[0.0, 1.0], [0.0, 0.0]]))
    upper_hull(v, v)
    osc_gauss_sum(v + 2.0, v, 1.0, -0.5, 0.0, 0.0, 0.0, 0.0)
