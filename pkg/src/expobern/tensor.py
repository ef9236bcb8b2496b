"""Tensor-product operators on the unit hypercube [0, 1]^d.

Both the classical and the exponential operator factor into per-axis weight
vectors, so a single evaluation is a contraction of the sample lattice
f(k_1/n, ..., k_d/n) against d weight vectors, and a full grid sweep is a
contraction against d weight matrices (one per axis).  Fields that declare
separable factors skip the lattice entirely and multiply per-axis results.
"""

from __future__ import annotations

import string
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .basis import (
    OperatorParams,
    bernstein_basis_matrix,
    bernstein_basis_row,
    exp_weight_matrix,
    exp_weights,
    warp,
)
from .univariate import (
    Function1D,
    _e0_exponent,
    bernstein_apply,
    closed_form_e0,
    closed_form_exp3,
    closed_form_exp4,
    exp_bernstein_apply,
    exp_power_function,
)
from .validation import check_dimension, check_point

__all__ = [
    "ScalarField",
    "Grid",
    "bernstein_apply_nd",
    "exp_bernstein_apply_nd",
    "exp_bernstein_via_classical_nd",
    "exp_power_product",
    "closed_form_e0_nd",
    "closed_form_exp3_nd",
    "closed_form_exp4_nd",
    "centered_exp_sq_nd",
    "evaluate_on_grid",
    "sup_error",
]

DEFAULT_GRID_POINTS = {1: 1025, 2: 129, 3: 33}

CLASSICAL = "classical"
EXPONENTIAL = "exponential"
_KINDS = (CLASSICAL, EXPONENTIAL)


@dataclass
class ScalarField:
    """A real function on the d-dimensional unit hypercube.

    ``eval`` maps an (m, d) array of points to an (m,) array of values and
    must be safe for concurrent calls.  ``separable_factors``, when given,
    asserts eval(x) == prod_i factors[i](x_i) and unlocks the per-axis fast
    path for operator evaluation.  Sample lattices are cached per degree so
    repeated sweeps do not re-evaluate the field.
    """

    eval: Callable
    d: int
    name: str = ""
    sup_norm_hint: float | None = None
    lip_alpha_hint: float | None = None
    separable_factors: tuple[Function1D, ...] | None = None
    _lattice_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.d = check_dimension(self.d)
        if self.separable_factors is not None:
            self.separable_factors = tuple(self.separable_factors)
            if len(self.separable_factors) != self.d:
                raise ValueError(
                    f"{self.name!r}: expected {self.d} separable factors, "
                    f"got {len(self.separable_factors)}"
                )

    def __call__(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[None, :] if self.d > 1 else pts[:, None]
        return np.asarray(self.eval(pts), dtype=float)

    def lattice_values(self, n: int) -> np.ndarray:
        """f on the sample lattice {0, 1/n, ..., 1}^d, shaped (n+1, ..., n+1)."""
        cached = self._lattice_cache.get(n)
        if cached is None:
            t = np.arange(n + 1) / n
            mesh = np.meshgrid(*([t] * self.d), indexing="ij")
            pts = np.stack([m.ravel() for m in mesh], axis=-1)
            cached = self(pts).reshape((n + 1,) * self.d)
            cached.setflags(write=False)
            self._lattice_cache[n] = cached
        return cached


@dataclass(frozen=True)
class Grid:
    """Tensor evaluation lattice on the hypercube, one sorted axis per dimension.

    Every axis must contain both endpoints 0 and 1.
    """

    axes: tuple[np.ndarray, ...]

    def __post_init__(self):
        axes = tuple(np.asarray(a, dtype=float) for a in self.axes)
        for a in axes:
            if a.ndim != 1 or a.size < 2:
                raise ValueError("each grid axis needs at least the two endpoints")
            if a[0] != 0.0 or a[-1] != 1.0:
                raise ValueError("grid axes must include the endpoints 0 and 1")
            if np.any(np.diff(a) <= 0.0):
                raise ValueError("grid axis points must be strictly increasing")
            a.setflags(write=False)
        object.__setattr__(self, "axes", axes)

    @classmethod
    def uniform(cls, d: int, resolution: int | Sequence[int] | None = None) -> "Grid":
        """Uniform grid with `resolution` points per axis (defaults by dimension)."""
        d = check_dimension(d)
        if resolution is None:
            resolution = DEFAULT_GRID_POINTS.get(d, 17)
        if np.isscalar(resolution):
            resolution = [int(resolution)] * d
        if len(resolution) != d:
            raise ValueError(f"expected {d} per-axis resolutions, got {len(resolution)}")
        return cls(axes=tuple(np.linspace(0.0, 1.0, int(r)) for r in resolution))

    @property
    def d(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(a.size for a in self.axes)

    def points(self) -> np.ndarray:
        """All grid points as an (m, d) array in row-major axis order."""
        mesh = np.meshgrid(*self.axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def field_values(self, f: ScalarField) -> np.ndarray:
        return f(self.points()).reshape(self.shape)


def _check_kind(kind: str) -> str:
    if kind not in _KINDS:
        raise ValueError(f"operator kind must be one of {_KINDS}, got {kind!r}")
    return kind


def _check_field(f: ScalarField, params: OperatorParams) -> None:
    if f.d != params.d:
        raise ValueError(
            f"dimension mismatch: field {f.name!r} has d={f.d}, parameters have d={params.d}"
        )


def _axis_weight_vector(params: OperatorParams, xi: float, kind: str) -> np.ndarray:
    if kind == CLASSICAL:
        return bernstein_basis_row(params.n, xi)
    return exp_weights(params, xi).values


def _axis_weight_matrix(params: OperatorParams, xs: np.ndarray, kind: str) -> np.ndarray:
    if kind == CLASSICAL:
        return bernstein_basis_matrix(params.n, xs)
    return exp_weight_matrix(params, xs)


def _contract_point(lattice: np.ndarray, weights: list[np.ndarray]) -> float:
    letters = string.ascii_lowercase[: len(weights)]
    expr = ",".join(letters) + "," + letters + "->"
    return float(np.einsum(expr, *weights, lattice, optimize=True))


def _apply_point(f: ScalarField, params: OperatorParams, x, kind: str) -> float:
    _check_field(f, params)
    pt = check_point(x, params.d)
    if f.separable_factors is not None:
        out = 1.0
        for factor, xi in zip(f.separable_factors, pt):
            if kind == CLASSICAL:
                out *= bernstein_apply(factor, params.n, float(xi))
            else:
                out *= exp_bernstein_apply(factor, params, float(xi))
        return out
    weights = [_axis_weight_vector(params, float(xi), kind) for xi in pt]
    return _contract_point(f.lattice_values(params.n), weights)


def bernstein_apply_nd(f: ScalarField, n: int, x) -> float:
    """Classical tensor-product Bernstein value at one hypercube point.

    sum over the lattice of f(k/n) times the product of per-axis basis
    values; cost O((n+1)^d).
    """
    params = OperatorParams(n=n, mu=0.0, d=f.d)
    return _apply_point(f, params, x, CLASSICAL)


def exp_bernstein_apply_nd(f: ScalarField, params: OperatorParams, x) -> float:
    """Exponential tensor-product operator value at one hypercube point.

    Reproduces e^(mu*sum(x)) and e^(2*mu*sum(x)) exactly and interpolates f
    at every corner of the hypercube.
    """
    return _apply_point(f, params, x, EXPONENTIAL)


def exp_bernstein_via_classical_nd(f: ScalarField, params: OperatorParams, x) -> float:
    """Exponential operator routed through the classical one.

    Damps the lattice samples by e^(-mu*sum(k)/n), applies the classical
    operator at the warped point, and rescales by e^(mu*sum(x)).
    """
    _check_field(f, params)
    pt = check_point(x, params.d)
    n, mu, d = params.n, params.mu, params.d
    t = np.arange(n + 1) / n
    damp_1d = np.exp(-mu * t)
    damped = f.lattice_values(n).copy()
    for axis in range(d):
        shape = [1] * d
        shape[axis] = n + 1
        damped = damped * damp_1d.reshape(shape)
    weights = [bernstein_basis_row(n, warp(params, float(xi))) for xi in pt]
    inner = _contract_point(damped, weights)
    return float(np.exp(mu * pt.sum()) * inner)


def exp_power_product(m: int, params: OperatorParams, x) -> float:
    """Operator value on e^(m*mu*sum(t)) as a product of 1-D evaluations.

    The tensor operator applied to any power of the exponential factors
    exactly into per-axis one-dimensional values.
    """
    if not isinstance(m, (int, np.integer)) or m < 1:
        raise ValueError(f"power m must be a positive integer, got {m!r}")
    pt = check_point(x, params.d)
    f1 = exp_power_function(params.mu, m)
    out = 1.0
    for xi in pt:
        out *= exp_bernstein_apply(f1, params, float(xi))
    return out


def _product_over_axes(closed_1d, params: OperatorParams, x):
    pt = check_point(x, params.d)
    vals = closed_1d(params, pt)
    return float(np.prod(vals))


def closed_form_e0_nd(params: OperatorParams, x) -> float:
    """Product over axes of the 1-D closed form for the constant one."""
    return _product_over_axes(closed_form_e0, params, x)


def closed_form_exp3_nd(params: OperatorParams, x) -> float:
    """Product over axes of the 1-D closed form for e^(3*mu*t)."""
    return _product_over_axes(closed_form_exp3, params, x)


def closed_form_exp4_nd(params: OperatorParams, x) -> float:
    """Product over axes of the 1-D closed form for e^(4*mu*t)."""
    return _product_over_axes(closed_form_exp4, params, x)


def centered_exp_sq_nd(params: OperatorParams, x) -> float:
    """Operator value on t -> (e^(mu*sum(t)) - e^(mu*sum(x)))^2 at x.

    Identically e^(2*mu*sum(x)) * (closed_form_e0_nd - 1); evaluated via a
    summed per-axis exponent and expm1 so corners give exact zeros up to
    roundoff.  Nonnegative, being the operator applied to a square.
    """
    pt = check_point(x, params.d)
    exponent = float(np.sum(_e0_exponent(params, pt)))
    return float(np.exp(2.0 * params.mu * pt.sum()) * np.expm1(exponent))


def evaluate_on_grid(
    f: ScalarField, params: OperatorParams, grid: Grid, kind: str = EXPONENTIAL
) -> np.ndarray:
    """Operator values on every grid point, shaped like the grid.

    Separable fields contract axis by axis (d small matrix-vector products,
    then an outer product); general fields contract the cached sample
    lattice against one weight matrix per axis.
    """
    kind = _check_kind(kind)
    _check_field(f, params)
    if grid.d != params.d:
        raise ValueError(f"grid dimension {grid.d} != operator dimension {params.d}")
    n, d = params.n, params.d
    if f.separable_factors is not None:
        t = np.arange(n + 1) / n
        per_axis = []
        for factor, axis in zip(f.separable_factors, grid.axes):
            w = _axis_weight_matrix(params, axis, kind)
            per_axis.append(w @ np.asarray(factor(t), dtype=float))
        out = per_axis[0]
        for vec in per_axis[1:]:
            out = np.multiply.outer(out, vec)
        return out
    lattice = f.lattice_values(n)
    mats = [_axis_weight_matrix(params, axis, kind) for axis in grid.axes]
    grid_letters = string.ascii_lowercase[:d]
    lattice_letters = string.ascii_lowercase[d : 2 * d]
    expr = (
        ",".join(g + l for g, l in zip(grid_letters, lattice_letters))
        + ","
        + lattice_letters
        + "->"
        + grid_letters
    )
    return np.einsum(expr, *mats, lattice, optimize=True)


def sup_error(
    f: ScalarField, params: OperatorParams, grid: Grid, kind: str = EXPONENTIAL
) -> float:
    """Max over the grid of |operator(f) - f|, the grid sup-norm error."""
    approx = evaluate_on_grid(f, params, grid, kind)
    exact = grid.field_values(f)
    return float(np.max(np.abs(approx - exact)))
