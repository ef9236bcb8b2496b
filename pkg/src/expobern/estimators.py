"""scikit-learn style facade over the hypercube operators.

The operator is a function approximator: configured with (n, mu, d), fitted
to a target function (a callable, a ScalarField, or precomputed sample
lattice values), and then evaluated at arbitrary hypercube points through
``predict``.  Inheriting ``BaseEstimator`` gives ``get_params``/``set_params``
so the approximator drops into pipelines, grid searches and clone().
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError

from .basis import OperatorParams
from .tensor import (
    CLASSICAL,
    EXPONENTIAL,
    ScalarField,
    _axis_weight_matrix,
    _check_kind,
)
from .validation import check_points

__all__ = ["ExponentialBernstein", "as_scalar_field"]


def as_scalar_field(f, d: int, name: str = "") -> ScalarField:
    """Wrap a callable as a ScalarField, vectorizing point-wise callables.

    Callables that already map (m, d) arrays to (m,) arrays are used as-is;
    anything else is evaluated one point at a time.
    """
    if isinstance(f, ScalarField):
        return f
    if not callable(f):
        raise ValueError(f"expected a callable or ScalarField, got {type(f).__name__}")
    probe = np.full((2, d), 0.5)
    try:
        out = np.asarray(f(probe), dtype=float)
        vectorized = out.shape == (2,)
    except Exception:
        vectorized = False
    if vectorized:
        return ScalarField(eval=f, d=d, name=name or getattr(f, "__name__", ""))

    def _eval(pts):
        pts = np.asarray(pts, dtype=float)
        if d == 1:
            return np.array([float(f(float(p[0]))) for p in pts])
        return np.array([float(f(*p)) for p in pts])

    return ScalarField(eval=_eval, d=d, name=name or getattr(f, "__name__", ""))


class ExponentialBernstein(BaseEstimator, RegressorMixin):
    """Hypercube Bernstein approximator with an exponential weighting.

    Parameters
    ----------
    n : int
        Polynomial degree per axis; the target is sampled on the
        (n+1)^d lattice {0, 1/n, ..., 1}^d.
    mu : float
        Exponential rate; ``mu=0`` gives the classical Bernstein operator.
    d : int
        Dimension of the hypercube.
    operator : str
        "exponential" or "classical"; "classical" ignores ``mu``.

    Examples
    --------
    >>> est = ExponentialBernstein(n=40, mu=1.0, d=2).fit(
    ...     lambda pts: pts[:, 0] * pts[:, 1])
    >>> est.predict([[0.5, 0.5]]).shape
    (1,)
    """

    def __init__(self, n: int = 20, mu: float = 1.0, d: int = 1, operator: str = EXPONENTIAL):
        self.n = n
        self.mu = mu
        self.d = d
        self.operator = operator

    def _params(self) -> OperatorParams:
        mu = 0.0 if self.operator == CLASSICAL else self.mu
        return OperatorParams(n=self.n, mu=mu, d=self.d)

    def fit(self, f, y=None):
        """Sample the target on the lattice.

        Parameters
        ----------
        f : callable, ScalarField, or ndarray
            The target function, or its precomputed values on the
            (n+1)^d sample lattice (any shape that reshapes to it).
        y : ignored
        """
        _check_kind(self.operator)
        params = self._params()  # validates n, mu, d
        if isinstance(f, np.ndarray) or (
            not callable(f) and not isinstance(f, ScalarField)
        ):
            values = np.asarray(f, dtype=float)
            expected = (params.n + 1) ** params.d
            if values.size != expected:
                raise ValueError(
                    f"lattice values must have {expected} entries for n={params.n}, "
                    f"d={params.d}; got {values.size}"
                )
            lattice = values.reshape((params.n + 1,) * params.d)
            field = ScalarField(eval=_LatticeOnly(params), d=params.d, name="lattice-data")
            field._lattice_cache[params.n] = lattice
        else:
            field = as_scalar_field(f, params.d)
            field.lattice_values(params.n)  # sample eagerly; fit does the work
        self.field_ = field
        self.params_ = params
        self.n_features_in_ = params.d
        return self

    def predict(self, X) -> np.ndarray:
        """Operator values at the rows of X (shape (m, d), entries in [0, 1])."""
        if not hasattr(self, "field_"):
            raise NotFittedError("this ExponentialBernstein instance is not fitted yet")
        pts = check_points(X, self.params_.d)
        kind = CLASSICAL if self.params_.is_classical else self.operator
        lattice = self.field_.lattice_values(self.params_.n)
        mats = [
            _axis_weight_matrix(self.params_, pts[:, i], kind)
            for i in range(self.params_.d)
        ]
        out = lattice
        # Contract the lattice against per-point weight rows, one axis at a
        # time; after axis i the leading dimension is the point index.
        for i, mat in enumerate(mats):
            if i == 0:
                out = np.tensordot(mat, out, axes=(1, 0))  # (m, n+1, ..., n+1)
            else:
                out = np.einsum("pk,pk...->p...", mat, out)
        return np.asarray(out, dtype=float)

    def __call__(self, X) -> np.ndarray:
        return self.predict(X)


class _LatticeOnly:
    """Placeholder eval for estimators fitted on raw lattice values."""

    def __init__(self, params: OperatorParams):
        self._params = params

    def __call__(self, pts):
        raise ValueError(
            "this field was fitted from lattice values only and cannot be "
            "evaluated at arbitrary points"
        )
