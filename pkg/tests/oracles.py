"""Independent reference implementations used only by the tests.

Everything here deliberately avoids the code paths under test: exact
rational arithmetic via fractions, high-precision floats via mpmath, and
plain recursive Python summation for the tensor operator.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import product

import mpmath as mp

mp.mp.dps = 50


def frac_bernstein_basis(n: int, k: int, t: Fraction) -> Fraction:
    return math.comb(n, k) * t**k * (1 - t) ** (n - k)


def frac_first_moment(n: int, x: Fraction) -> Fraction:
    return sum(
        abs(Fraction(k, n) - x) * frac_bernstein_basis(n, k, x) for k in range(n + 1)
    )


def mp_warp(mu, n, x):
    return mp.expm1(mp.mpf(mu) * x / n) / mp.expm1(mp.mpf(mu) / n)


def mp_warp_gap(mu, n, resolution: int = 20000):
    """Max of x - warp(x) by dense high-precision grid plus local refinement."""
    best_x, best = mp.mpf(0), mp.mpf(0)
    for i in range(resolution + 1):
        x = mp.mpf(i) / resolution
        g = x - mp_warp(mu, n, x)
        if g > best:
            best_x, best = x, g
    lo = max(best_x - mp.mpf(2) / resolution, mp.mpf(0))
    hi = min(best_x + mp.mpf(2) / resolution, mp.mpf(1))
    for _ in range(200):  # trisection on the unimodal gap
        m1 = lo + (hi - lo) / 3
        m2 = hi - (hi - lo) / 3
        if m1 - mp_warp(mu, n, m1) < m2 - mp_warp(mu, n, m2):
            lo = m1
        else:
            hi = m2
    mid = (lo + hi) / 2
    return mid - mp_warp(mu, n, mid)


def mp_basis(n: int, k: int, t):
    t = mp.mpf(t)
    return mp.binomial(n, k) * t**k * (1 - t) ** (n - k)


def mp_exp_weights(mu, n, x):
    a = mp_warp(mu, n, x) if mu != 0 else mp.mpf(x)
    return [
        mp.e ** (-mp.mpf(mu) * k / n) * mp.e ** (mp.mpf(mu) * x) * mp_basis(n, k, a)
        for k in range(n + 1)
    ]


def mp_exp_apply(f_mp, mu, n, x):
    """High-precision brute-force sum of the 1-D exponential operator."""
    weights = mp_exp_weights(mu, n, x)
    return mp.fsum(w * f_mp(mp.mpf(k) / n) for k, w in enumerate(weights))


def recursive_apply_nd(f, mu: float, n: int, x, classical: bool = False) -> float:
    """Plain recursive summation of the tensor operator, no numpy.

    f : callable taking a tuple of d floats.  Intended for small n and d.
    """
    d = len(x)
    if classical or mu == 0.0:
        axis_weights = [
            [math.comb(n, k) * xi**k * (1 - xi) ** (n - k) for k in range(n + 1)]
            for xi in x
        ]
    else:
        denom = math.expm1(mu / n)
        axis_weights = []
        for xi in x:
            a = math.expm1(mu * xi / n) / denom
            axis_weights.append(
                [
                    math.exp(mu * (xi - k / n))
                    * math.comb(n, k)
                    * a**k
                    * (1 - a) ** (n - k)
                    for k in range(n + 1)
                ]
            )

    def recurse(axis: int, prefix: tuple, weight: float) -> float:
        if axis == d:
            return weight * f(prefix)
        return sum(
            recurse(axis + 1, prefix + (k / n,), weight * axis_weights[axis][k])
            for k in range(n + 1)
        )

    return recurse(0, (), 1.0)


def brute_lattice_sum_nd(f, mu: float, n: int, x) -> float:
    """Iterative full-lattice sum via itertools, another numpy-free route."""
    d = len(x)
    denom = math.expm1(mu / n) if mu != 0.0 else None
    axis_weights = []
    for xi in x:
        if mu == 0.0:
            a = xi
            pref = [1.0] * (n + 1)
        else:
            a = math.expm1(mu * xi / n) / denom
            pref = [math.exp(mu * (xi - k / n)) for k in range(n + 1)]
        axis_weights.append(
            [pref[k] * math.comb(n, k) * a**k * (1 - a) ** (n - k) for k in range(n + 1)]
        )
    total = 0.0
    for ks in product(range(n + 1), repeat=d):
        w = 1.0
        for axis, k in enumerate(ks):
            w *= axis_weights[axis][k]
        total += w * f(tuple(k / n for k in ks))
    return total
