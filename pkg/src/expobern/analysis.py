"""Convergence analysis: moduli of continuity, error bounds, and rate fits.

The headline quantitative estimate bounds the grid sup-norm error of the
exponential operator by

    (1 + d/2) e^(mu*d) w(f, 1/sqrt(n))
        + e^(mu*d) ||f||_inf mu^2 / n
        + e^(mu*d) (1 + mu*d) w(f, 1/n),

where w is the Euclidean modulus of continuity on the hypercube.  Moduli are
estimated from below by finite stencils, so dominance checks must inflate
the bound side, never the error side.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .basis import OperatorParams, bernstein_basis_row, warp, warp_gap_closed
from .tensor import EXPONENTIAL, Grid, ScalarField, sup_error
from .validation import check_point, check_unit_scalar

__all__ = [
    "ModulusEstimate",
    "ConvergenceRecord",
    "ConvergenceReport",
    "modulus",
    "modulus_subadditivity_check",
    "quantitative_bound",
    "grid_modulus_source",
    "fit_rate",
    "convergence_report",
    "korovkin_witness",
    "tail_mass_bound_check",
    "warp_gap_threshold",
]

RATE_FLOOR = 1e-10  # sup errors below this are roundoff, not convergence
DIRECTIONAL = "directional-grid"
PAIRWISE = "pairwise-sample"


@dataclass(frozen=True)
class ModulusEstimate:
    """A lower-bound estimate of the modulus of continuity at one radius."""

    delta: float
    omega: float
    method: str
    resolution: tuple[int, ...]


@dataclass(frozen=True)
class ConvergenceRecord:
    n: int
    sup_error: float
    bound_rhs: float
    runtime: float


@dataclass
class ConvergenceReport:
    """Per-degree sup errors and bound values for one field, plus a rate fit.

    ``fitted_rate`` is the least-squares slope of log(sup_error) against
    log(n) over records with n >= n_min and error above the roundoff floor;
    it is None (with ``rate_note`` set) when too few records survive.
    """

    f_name: str
    mu: float
    d: int
    operator: str
    records: list[ConvergenceRecord] = field(default_factory=list)
    fitted_rate: float | None = None
    rate_note: str = ""
    n_min: int = 25

    def to_dicts(self) -> list[dict]:
        return [
            {
                "function": self.f_name,
                "n": r.n,
                "mu": self.mu,
                "d": self.d,
                "operator": self.operator,
                "sup_error": r.sup_error,
                "bound_rhs": r.bound_rhs,
                "pass": r.sup_error <= r.bound_rhs,
                "runtime_ms": r.runtime * 1e3,
            }
            for r in self.records
        ]


def _stencil_directions(d: int, seed: int) -> np.ndarray:
    """2d + 8 unit directions: axes, both main diagonals, and random fills."""
    dirs = []
    eye = np.eye(d)
    for i in range(d):
        dirs.append(eye[i])
        dirs.append(-eye[i])
    diag = np.ones(d) / math.sqrt(d)
    dirs.append(diag)
    dirs.append(-diag)
    rng = np.random.default_rng(seed)
    while len(dirs) < 2 * d + 8:
        v = rng.normal(size=d)
        norm = np.linalg.norm(v)
        if norm > 1e-12:
            dirs.append(v / norm)
    return np.asarray(dirs)


def modulus(
    f: ScalarField,
    delta: float,
    grid: Grid,
    method: str = DIRECTIONAL,
    seed: int = 42,
    samples: int = 20000,
) -> ModulusEstimate:
    """Estimate w(f, delta) = sup |f(t) - f(x)| over ||t - x||_2 <= delta.

    ``directional-grid`` probes every grid point along a fixed stencil of
    2d + 8 directions at radii delta/2 and delta, clipping the displaced
    point to the hypercube (clipping never increases the distance).
    ``pairwise-sample`` draws random base points and random offsets instead.
    Both are lower bounds of the true modulus.
    """
    if delta <= 0.0:
        raise ValueError(f"delta must be > 0, got {delta}")
    if method == DIRECTIONAL:
        pts = grid.points()
        fx = f(pts)
        best = 0.0
        for direction in _stencil_directions(f.d, seed):
            for radius in (0.5 * delta, delta):
                shifted = np.clip(pts + radius * direction, 0.0, 1.0)
                best = max(best, float(np.max(np.abs(f(shifted) - fx))))
        resolution = grid.shape
    elif method == PAIRWISE:
        rng = np.random.default_rng(seed)
        base = rng.uniform(0.0, 1.0, size=(samples, f.d))
        dirs = rng.normal(size=(samples, f.d))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        radii = delta * rng.uniform(0.0, 1.0, size=(samples, 1)) ** (1.0 / f.d)
        shifted = np.clip(base + radii * dirs, 0.0, 1.0)
        best = float(np.max(np.abs(f(shifted) - f(base))))
        resolution = (samples,)
    else:
        raise ValueError(f"unknown modulus method {method!r}")
    return ModulusEstimate(delta=delta, omega=best, method=method, resolution=tuple(resolution))


def modulus_subadditivity_check(
    f: ScalarField, delta: float, lam: float, grid: Grid, tolerance: float = 0.05
) -> bool:
    """Check the scaling property w(f, lam*delta) <= (1 + lam) * w(f, delta).

    Estimates carry grid noise, so the right-hand side gets a small
    multiplicative allowance.
    """
    if lam <= 0.0:
        raise ValueError(f"lambda must be > 0, got {lam}")
    lhs = modulus(f, lam * delta, grid).omega
    rhs = (1.0 + lam) * modulus(f, delta, grid).omega
    return bool(lhs <= rhs * (1.0 + tolerance) + 1e-15)


def grid_modulus_source(
    f: ScalarField, grid: Grid, inflation: float = 1.0, seed: int = 42
) -> Callable[[float], float]:
    """Modulus callable delta -> estimate, optionally inflated.

    Stencil estimates sit slightly below the true modulus; dominance tests
    pass ``inflation`` > 1 so the bound side absorbs that bias.
    """

    def _omega(delta: float) -> float:
        return inflation * modulus(f, delta, grid, seed=seed).omega

    return _omega


def quantitative_bound(
    f: ScalarField,
    params: OperatorParams,
    modulus_source: Callable[[float], float],
    sup_norm: float | None = None,
    grid: Grid | None = None,
) -> float:
    """Right-hand side of the sup-norm error estimate for the exponential operator.

    ``modulus_source`` supplies w(f, delta); the sup norm comes from the
    field's hint, the explicit argument, or a grid estimate (in that order
    of preference).
    """
    n, mu, d = params.n, params.mu, params.d
    if sup_norm is None:
        sup_norm = f.sup_norm_hint
    if sup_norm is None:
        if grid is None:
            grid = Grid.uniform(d)
        sup_norm = float(np.max(np.abs(grid.field_values(f))))
    amp = math.exp(mu * d)
    return (
        (1.0 + d / 2.0) * amp * modulus_source(1.0 / math.sqrt(n))
        + amp * sup_norm * mu**2 / n
        + amp * (1.0 + mu * d) * modulus_source(1.0 / n)
    )


def fit_rate(report: ConvergenceReport, n_min: int | None = None) -> float:
    """Least-squares slope of log(sup_error) against log(n).

    Records below ``RATE_FLOOR`` are roundoff-dominated and excluded; fewer
    than four usable records raises ValueError.
    """
    if n_min is None:
        n_min = report.n_min
    usable = [
        r for r in report.records if r.n >= n_min and r.sup_error >= RATE_FLOOR
    ]
    if len(usable) < 4:
        raise ValueError(
            f"insufficient records for a rate fit: {len(usable)} usable "
            f"(need >= 4, n >= {n_min}, error >= {RATE_FLOOR:g})"
        )
    log_n = np.log([r.n for r in usable])
    log_e = np.log([r.sup_error for r in usable])
    return float(np.polyfit(log_n, log_e, 1)[0])


def convergence_report(
    f: ScalarField,
    mu: float,
    d: int,
    n_list: Sequence[int],
    grid: Grid | None = None,
    operator: str = EXPONENTIAL,
    modulus_inflation: float = 1.0,
    n_min: int = 25,
    seed: int = 42,
) -> ConvergenceReport:
    """Sweep degrees, recording sup error and bound value, then fit the rate."""
    if grid is None:
        grid = Grid.uniform(d)
    report = ConvergenceReport(f_name=f.name, mu=mu, d=d, operator=operator, n_min=n_min)
    omega = grid_modulus_source(f, grid, inflation=modulus_inflation, seed=seed)
    omega_cache: dict[float, float] = {}

    def _omega(delta: float) -> float:
        if delta not in omega_cache:
            omega_cache[delta] = omega(delta)
        return omega_cache[delta]

    for n in sorted(n_list):
        params = OperatorParams(n=n, mu=mu, d=d)
        start = time.perf_counter()
        err = sup_error(f, params, grid, operator)
        elapsed = time.perf_counter() - start
        bound = quantitative_bound(f, params, _omega, grid=grid)
        report.records.append(
            ConvergenceRecord(n=n, sup_error=err, bound_rhs=bound, runtime=elapsed)
        )
    try:
        report.fitted_rate = fit_rate(report)
    except ValueError:
        report.fitted_rate = None
        report.rate_note = "floor-limited"
    return report


def korovkin_witness(x_ref, x, mu: float) -> float:
    """Separating witness h(x) = sum_i (e^(mu*(x_i - x_ref_i)) - 1)^2.

    Expanding the square gives the equivalent three-term form
    d - 2*sum_i e^(mu*(x_i - x_ref_i)) + sum_i e^(2*mu*(x_i - x_ref_i)).
    Nonnegative everywhere, zero exactly at x == x_ref: together with the
    exponential test functions this separates points of the hypercube.
    """
    x_ref = np.atleast_1d(np.asarray(x_ref, dtype=float))
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x_ref.shape != x.shape:
        raise ValueError(f"point shapes differ: {x_ref.shape} vs {x.shape}")
    check_point(x_ref, x_ref.size)
    check_point(x, x.size)
    return float(np.sum(np.expm1(mu * (x - x_ref)) ** 2))


def tail_mass_bound_check(
    params: OperatorParams, x: float, delta: float
) -> tuple[float, float, bool]:
    """Basis mass far from x versus its first-moment bound.

    lhs = sum over |k/n - x| > delta of p_{n,k}(warp(x));
    rhs = (1/(2 sqrt(n)) + max warp gap) / delta.
    Returns (lhs, rhs, lhs <= rhs + 1e-12).
    """
    x = check_unit_scalar(x, "x")
    if delta <= 0.0:
        raise ValueError(f"delta must be > 0, got {delta}")
    n = params.n
    k = np.arange(n + 1)
    row = bernstein_basis_row(n, warp(params, x))
    lhs = float(row[np.abs(k / n - x) > delta].sum())
    rhs = (0.5 / math.sqrt(n) + warp_gap_closed(params)) / delta
    return lhs, rhs, bool(lhs <= rhs + 1e-12)


def warp_gap_threshold(mu: float, n_max: int = 200) -> int | None:
    """Smallest n such that the warp gap stays below mu/n from n up to n_max.

    n times the gap tends to mu/8, so the inequality certainly holds
    eventually; the crossover is measured, not assumed.  None if it never
    holds below n_max.
    """
    threshold = None
    for n in range(1, n_max + 1):
        ok = warp_gap_closed(OperatorParams(n=n, mu=mu)) <= mu / n
        if ok and threshold is None:
            threshold = n
        elif not ok:
            threshold = None
    return threshold
