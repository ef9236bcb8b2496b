"""Input validation helpers shared across the package.

All checks raise ``ValueError`` with a message naming the offending
argument, so estimator and CLI layers can surface them directly.
"""

from __future__ import annotations

import os

import numpy as np

DEFAULT_DMAX = 3


def max_dimension() -> int:
    """Dimension cap for operator parameters (env ``EXPOBERN_DMAX`` overrides)."""
    raw = os.environ.get("EXPOBERN_DMAX")
    if raw is None:
        return DEFAULT_DMAX
    try:
        value = int(raw)
    except ValueError as exc:
        raise ValueError(f"EXPOBERN_DMAX must be an integer, got {raw!r}") from exc
    if value < 1:
        raise ValueError(f"EXPOBERN_DMAX must be >= 1, got {value}")
    return value


def check_degree(n) -> int:
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise ValueError(f"degree n must be an integer, got {n!r}")
    if n < 1:
        raise ValueError(f"degree n must be >= 1, got {n}")
    return int(n)


def check_rate(mu) -> float:
    # mu == 0 is the documented classical fallback; negative rates are invalid.
    mu = float(mu)
    if not np.isfinite(mu) or mu < 0.0:
        raise ValueError(f"exponential rate mu must be finite and >= 0, got {mu}")
    return mu


def check_dimension(d) -> int:
    if not isinstance(d, (int, np.integer)) or isinstance(d, bool):
        raise ValueError(f"dimension d must be an integer, got {d!r}")
    dmax = max_dimension()
    if not 1 <= d <= dmax:
        raise ValueError(f"dimension d must be in [1, {dmax}], got {d}")
    return int(d)


def check_index(k, n) -> int:
    if not isinstance(k, (int, np.integer)) or isinstance(k, bool):
        raise ValueError(f"basis index k must be an integer, got {k!r}")
    if not 0 <= k <= n:
        raise ValueError(f"basis index k must be in [0, {n}], got {k}")
    return int(k)


def check_unit_scalar(x, name: str = "x") -> float:
    x = float(x)
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"{name} must lie in [0, 1], got {x}")
    return x


def check_point(x, d: int) -> np.ndarray:
    """Validate a single point of the d-dimensional unit hypercube."""
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    if pt.ndim != 1 or pt.shape[0] != d:
        raise ValueError(f"point must have {d} coordinates, got shape {pt.shape}")
    if not (np.all(pt >= 0.0) and np.all(pt <= 1.0)):
        raise ValueError(f"point {pt.tolist()} lies outside the unit hypercube")
    return pt


def check_points(X, d: int) -> np.ndarray:
    """Validate an (m, d) array of hypercube points (1-D input allowed for d=1)."""
    pts = np.asarray(X, dtype=float)
    if pts.ndim == 1:
        if d == 1:
            pts = pts[:, None]
        else:
            raise ValueError(f"expected (m, {d}) array of points, got shape {pts.shape}")
    if pts.ndim != 2 or pts.shape[1] != d:
        raise ValueError(f"expected (m, {d}) array of points, got shape {pts.shape}")
    if pts.size and not (np.all(pts >= 0.0) and np.all(pts <= 1.0)):
        raise ValueError("points must lie inside the unit hypercube")
    return pts
