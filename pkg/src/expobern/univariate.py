"""One-dimensional operators on C([0, 1]).

The classical degree-n Bernstein operator samples a function at k/n and
blends with the binomial basis; the exponential variant multiplies each
sample by e^(-mu*k/n), evaluates the basis at the warped coordinate and
scales by e^(mu*x).  The exponential operator reproduces e^(mu*x) and
e^(2*mu*x) exactly, interpolates at both endpoints, and admits closed forms
for the constant one and for e^(3*mu*x), e^(4*mu*x).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import (
    OperatorParams,
    bernstein_basis_row,
    exp_weights,
    warp,
)
from .validation import check_unit_scalar

__all__ = [
    "Function1D",
    "exp_power_function",
    "bernstein_apply",
    "exp_bernstein_apply",
    "exp_bernstein_via_classical",
    "closed_form_e0",
    "closed_form_exp3",
    "closed_form_exp4",
    "centered_exp_sq",
    "voronovskaja_e0_check",
    "voronovskaja_e0_threshold",
]


@dataclass(frozen=True)
class Function1D:
    """A real function on [0, 1].

    ``eval`` must accept scalars and 1-D ndarrays and evaluate elementwise;
    it is assumed total and deterministic on [0, 1].
    """

    eval: Callable
    name: str = ""
    sup_norm_hint: float | None = None

    def __call__(self, t):
        return self.eval(t)


def exp_power_function(mu: float, m: int) -> Function1D:
    """The function t -> e^(m*mu*t) as a Function1D (m = 0 gives the constant one)."""
    rate = m * mu

    def _eval(t, _rate=rate):
        return np.exp(_rate * np.asarray(t, dtype=float))

    name = "e0" if m == 0 else f"exp{m}_mu"
    return Function1D(eval=_eval, name=name, sup_norm_hint=math.exp(max(rate, 0.0)))


def _samples(f: Function1D, n: int) -> np.ndarray:
    vals = np.asarray(f.eval(np.arange(n + 1) / n), dtype=float)
    if vals.shape != (n + 1,):
        raise ValueError(
            f"function {f.name!r} must evaluate elementwise; "
            f"expected shape ({n + 1},), got {vals.shape}"
        )
    return vals


def bernstein_apply(f: Function1D, n: int, x: float) -> float:
    """Classical Bernstein approximation sum_k f(k/n) p_{n,k}(x)."""
    x = check_unit_scalar(x, "x")
    return float(np.dot(_samples(f, n), bernstein_basis_row(n, x)))


def exp_bernstein_apply(f: Function1D, params: OperatorParams, x: float) -> float:
    """Exponential Bernstein approximation sum_k f(k/n) w_k(x).

    Interpolates f at x = 0 and x = 1 (the weight vector is one-hot there)
    and is a positive linear operator in f.
    """
    x = check_unit_scalar(x, "x")
    return float(np.dot(_samples(f, params.n), exp_weights(params, x).values))


def exp_bernstein_via_classical(f: Function1D, params: OperatorParams, x: float) -> float:
    """Same operator routed through the classical one.

    Divides the samples by e^(mu*k/n), applies the classical operator at the
    warped coordinate, and rescales by e^(mu*x); agrees with
    :func:`exp_bernstein_apply` to roundoff.
    """
    x = check_unit_scalar(x, "x")
    n, mu = params.n, params.mu
    damped = _samples(f, n) * np.exp(-mu * np.arange(n + 1) / n)
    inner = float(np.dot(damped, bernstein_basis_row(n, warp(params, x))))
    return math.exp(mu * x) * inner


def _as_float_or_array(values: np.ndarray):
    return float(values) if values.ndim == 0 else values


def _e0_exponent(params: OperatorParams, x):
    # log of the operator applied to the constant one:
    #   mu*(x-1) + n*log(e^(mu/n) + 1 - e^(mu*x/n)),
    # with the base written as 1 + (expm1(mu/n) - expm1(mu*x/n)) so the
    # log1p argument never cancels against 1.
    n, mu = params.n, params.mu
    x = np.asarray(x, dtype=float)
    delta = np.expm1(mu / n) - np.expm1(mu * x / n)
    return mu * (x - 1.0) + n * np.log1p(delta)


def closed_form_e0(params: OperatorParams, x):
    """Closed form of the operator applied to the constant one.

    Equals e^(mu*(x-1)) * (e^(mu/n) + 1 - e^(mu*x/n))^n, evaluated as a
    single exp of n*log1p(...) so the n-th power does not amplify error.
    Accepts a scalar or an ndarray.
    """
    return _as_float_or_array(np.exp(_e0_exponent(params, x)))


def closed_form_exp3(params: OperatorParams, x):
    """Closed form for f(t) = e^(3*mu*t):
    e^(mu*x) * (e^(mu*(x+1)/n) + e^(mu*x/n) - e^(mu/n))^n."""
    n, mu = params.n, params.mu
    x = np.asarray(x, dtype=float)
    delta = np.expm1(mu * (x + 1.0) / n) + np.expm1(mu * x / n) - np.expm1(mu / n)
    return _as_float_or_array(np.exp(mu * x + n * np.log1p(delta)))


def closed_form_exp4(params: OperatorParams, x):
    """Closed form for f(t) = e^(4*mu*t):
    e^(mu*x) * (e^(mu*(x+2)/n) + e^(mu*(x+1)/n) + e^(mu*x/n) - e^(mu/n) - e^(2*mu/n))^n."""
    n, mu = params.n, params.mu
    x = np.asarray(x, dtype=float)
    delta = (
        np.expm1(mu * (x + 2.0) / n)
        + np.expm1(mu * (x + 1.0) / n)
        + np.expm1(mu * x / n)
        - np.expm1(mu / n)
        - np.expm1(2.0 * mu / n)
    )
    return _as_float_or_array(np.exp(mu * x + n * np.log1p(delta)))


def centered_exp_sq(params: OperatorParams, x):
    """Operator value on t -> (e^(mu*t) - e^(mu*x))^2, at the centering point x.

    Identically e^(2*mu*x) * (closed_form_e0 - 1); the deviation factor is
    taken through expm1 so values near the endpoints do not cancel.
    Nonnegative up to roundoff.
    """
    x = np.asarray(x, dtype=float)
    out = np.exp(2.0 * params.mu * x) * np.expm1(_e0_exponent(params, x))
    return _as_float_or_array(out)


def voronovskaja_e0_check(params: OperatorParams, grid_resolution: int = 257):
    """Check |operator(one)(x) - 1| <= mu^2/n on a uniform grid.

    Returns ``(max_deviation, bound_holds)``.  The deviation comes from the
    expm1 form of the closed expression, so it stays meaningful down to the
    classical limit mu -> 0 where it vanishes identically.
    """
    if grid_resolution < 257:
        raise ValueError(f"grid_resolution must be >= 257, got {grid_resolution}")
    xs = np.linspace(0.0, 1.0, grid_resolution)
    deviation = np.abs(np.expm1(_e0_exponent(params, xs)))
    max_dev = float(deviation.max())
    bound = params.mu**2 / params.n
    return max_dev, bool(max_dev <= bound)


def voronovskaja_e0_threshold(
    mu: float, n_max: int = 64, grid_resolution: int = 257, d: int = 1
) -> int | None:
    """Smallest n such that the mu^2/n bound on the constant holds from n up to n_max.

    Returns None when no such n exists below n_max.  Empirically the bound
    holds from n = 1 for moderate mu; the threshold is recorded rather than
    assumed.
    """
    threshold = None
    for n in range(1, n_max + 1):
        _, ok = voronovskaja_e0_check(OperatorParams(n=n, mu=mu, d=d), grid_resolution)
        if ok and threshold is None:
            threshold = n
        elif not ok:
            threshold = None
    return threshold
