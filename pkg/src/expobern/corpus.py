"""Registry of named test fields with known properties.

Every experiment (CLI sweeps, bound checks, rate fits) draws its functions
from here, so each entry records what is provable about it: sup norm,
Lipschitz/Hoelder exponent, separability, exact modulus of continuity where
a closed form exists, and whether the exponential operator reproduces it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterator

import numpy as np

from .tensor import ScalarField
from .univariate import Function1D
from .validation import check_dimension, check_rate

__all__ = ["CorpusEntry", "Corpus", "builtin_corpus"]

SMOOTH = "smooth"
LIPSCHITZ = "lipschitz"
REPRODUCED = "reproduced"
NON_SEPARABLE = "non-separable"


@dataclass(frozen=True)
class CorpusEntry:
    """A test field plus its analytic metadata."""

    field: ScalarField
    tags: frozenset[str]
    exact_modulus: Callable[[float], float] | None = None

    @property
    def name(self) -> str:
        return self.field.name

    def __post_init__(self):
        if REPRODUCED in self.tags and not self.field.name.startswith(("exp_mu", "exp2_mu")):
            raise ValueError(
                f"{self.name!r}: only the exponential and its square are reproduced"
            )
        if LIPSCHITZ in self.tags and self.field.lip_alpha_hint is None:
            raise ValueError(f"{self.name!r}: lipschitz tag requires lip_alpha_hint")


class Corpus:
    """Name-keyed registry of corpus entries for one (d, mu) setting."""

    def __init__(self, d: int, mu: float):
        self.d = check_dimension(d)
        self.mu = check_rate(mu)
        self._entries: dict[str, CorpusEntry] = {}

    def register(self, entry: CorpusEntry) -> None:
        if entry.name in self._entries:
            raise ValueError(f"duplicate corpus entry {entry.name!r}")
        if entry.field.d != self.d:
            raise ValueError(
                f"entry {entry.name!r} has d={entry.field.d}, corpus has d={self.d}"
            )
        self._entries[entry.name] = entry

    def lookup(self, name: str) -> CorpusEntry:
        try:
            return self._entries[name]
        except KeyError:
            raise KeyError(
                f"unknown corpus function {name!r}; known: {', '.join(self.names())}"
            ) from None

    def names(self) -> list[str]:
        return list(self._entries)

    def __iter__(self) -> Iterator[CorpusEntry]:
        return iter(self._entries.values())

    def __len__(self) -> int:
        return len(self._entries)


def _const_one() -> Function1D:
    return Function1D(eval=lambda t: np.ones_like(np.asarray(t, dtype=float)), name="one")


def _identity() -> Function1D:
    return Function1D(eval=lambda t: np.asarray(t, dtype=float), name="t")


def _exp_factor(rate: float) -> Function1D:
    return Function1D(
        eval=lambda t, _r=rate: np.exp(_r * np.asarray(t, dtype=float)),
        name=f"exp({rate:g} t)",
    )


def _bump_factor() -> Function1D:
    return Function1D(
        eval=lambda t: np.asarray(t, dtype=float) * (1.0 - np.asarray(t, dtype=float)),
        name="t(1-t)",
    )


def builtin_corpus(d: int, mu: float) -> Corpus:
    """The standard corpus for dimension d and rate mu.

    Contains the multivariate Korovkin set {1, x_i, sum x_i^2}, the
    exponential family e^(m*mu*sum(x)) for m = 1..4 (m = 1, 2 reproduced),
    an oscillatory field, a separable bump, two Hoelder ridges with their
    kink centred at 1/2 per axis (so odd-degree sample lattices straddle
    it), and for d >= 2 a non-separable oscillatory mix.
    """
    corpus = Corpus(d, mu)
    sqrt_d = math.sqrt(d)

    def add(name, eval_fn, tags, sup_norm, lip_alpha=None, factors=None, exact_modulus=None):
        fld = ScalarField(
            eval=eval_fn,
            d=d,
            name=name,
            sup_norm_hint=sup_norm,
            lip_alpha_hint=lip_alpha,
            separable_factors=factors,
        )
        corpus.register(CorpusEntry(field=fld, tags=frozenset(tags), exact_modulus=exact_modulus))

    add(
        "e0",
        lambda pts: np.ones(np.asarray(pts).shape[0]),
        {SMOOTH},
        sup_norm=1.0,
        factors=tuple(_const_one() for _ in range(d)),
        exact_modulus=lambda delta: 0.0,
    )

    for i in range(d):
        factors = tuple(_identity() if j == i else _const_one() for j in range(d))
        add(
            f"pr{i + 1}",
            lambda pts, _i=i: np.asarray(pts, dtype=float)[:, _i],
            {SMOOTH, LIPSCHITZ},
            sup_norm=1.0,
            lip_alpha=1.0,
            factors=factors,
            exact_modulus=lambda delta: min(delta, 1.0),
        )

    def _sum_sq_modulus(delta: float) -> float:
        s = min(delta, sqrt_d)
        return 2.0 * sqrt_d * s - s * s

    add(
        "sum_sq",
        lambda pts: np.sum(np.asarray(pts, dtype=float) ** 2, axis=1),
        {SMOOTH, LIPSCHITZ},
        sup_norm=float(d),
        lip_alpha=1.0,
        exact_modulus=_sum_sq_modulus,
    )

    def _exp_modulus(rate: float) -> Callable[[float], float]:
        def _omega(delta: float) -> float:
            shift = rate * min(sqrt_d * delta, float(d))
            return -math.exp(rate * d) * math.expm1(-shift)

        return _omega

    for m in (1, 2, 3, 4):
        rate = m * mu
        name = "exp_mu" if m == 1 else f"exp{m}_mu"
        tags = {SMOOTH} | ({REPRODUCED} if m in (1, 2) else set())
        if rate > 0.0:
            tags |= {LIPSCHITZ}  # degenerate to constants when mu == 0
        add(
            name,
            lambda pts, _r=rate: np.exp(_r * np.sum(np.asarray(pts, dtype=float), axis=1)),
            tags,
            sup_norm=math.exp(rate * d),
            lip_alpha=1.0 if rate > 0.0 else None,
            factors=tuple(_exp_factor(rate) for _ in range(d)),
            exact_modulus=_exp_modulus(rate),
        )

    def _sine_modulus(delta: float) -> float:
        if d == 1:
            # sin(pi x) on [0, 1] never goes negative, so the spread caps at 1.
            h = math.pi * delta
            return 1.0 if h >= math.pi / 2.0 else math.sin(h)
        h = min(math.pi * sqrt_d * delta, math.pi)
        return 2.0 * math.sin(h / 2.0)

    add(
        "sin_pi_sum",
        lambda pts: np.sin(math.pi * np.sum(np.asarray(pts, dtype=float), axis=1)),
        {SMOOTH, LIPSCHITZ} | ({NON_SEPARABLE} if d >= 2 else set()),
        sup_norm=1.0,
        lip_alpha=1.0,
        exact_modulus=_sine_modulus,
    )

    def _bump_modulus(delta: float) -> float:
        s = min(delta, 0.5)
        return s * (1.0 - s)

    add(
        "bump_prod",
        lambda pts: np.prod(
            np.asarray(pts, dtype=float) * (1.0 - np.asarray(pts, dtype=float)), axis=1
        ),
        {SMOOTH, LIPSCHITZ},
        sup_norm=0.25**d,
        lip_alpha=1.0,
        factors=tuple(_bump_factor() for _ in range(d)),
        exact_modulus=_bump_modulus if d == 1 else None,
    )

    def _ridge_modulus(alpha: float) -> Callable[[float], float]:
        # The ridge coordinate sum(x)/d moves by at most delta/sqrt(d) along
        # any Euclidean step of length delta, and the kink makes that sharp.
        def _omega(delta: float) -> float:
            return min(delta / sqrt_d, 0.5) ** alpha

        return _omega

    for alpha, name in ((0.5, "ridge_sqrt"), (1.0, "ridge_abs")):
        add(
            name,
            lambda pts, _a=alpha: np.abs(
                np.mean(np.asarray(pts, dtype=float), axis=1) - 0.5
            )
            ** _a,
            {LIPSCHITZ},
            sup_norm=0.5**alpha,
            lip_alpha=alpha,
            exact_modulus=_ridge_modulus(alpha),
        )

    if d >= 2:
        coeffs = np.arange(1, d + 1, dtype=float)
        add(
            "osc_mix",
            lambda pts, _c=coeffs: np.sin(np.asarray(pts, dtype=float) @ _c),
            {SMOOTH, LIPSCHITZ, NON_SEPARABLE},
            sup_norm=1.0,
            lip_alpha=1.0,
        )

    return corpus
