"""Core domain types: finite channels, distributions, rates and tolerances.

Everything downstream works on these immutable containers.  Probabilities are
kept in linear double precision; log-domain arithmetic is confined to the
type-class machinery in :mod:`mmconverse.dmc`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class DimensionMismatch(ValueError):
    """Inputs indexed by different alphabets were mixed."""


class NonStochasticRow(ValueError):
    """A channel row does not sum to one within tolerance."""


class NegativeEntry(ValueError):
    """A probability entry is negative beyond tolerance."""


class TooLarge(ValueError):
    """A requested construction exceeds its memory guard."""


@dataclass(frozen=True)
class TolerancePolicy:
    """Numeric policy shared across the package.

    tol_eq   -- absolute tolerance for equality of probabilities/masses
    tol_gap  -- duality-gap stopping tolerance for the saddle solver
    max_iter -- iteration cap for the saddle solver
    """

    tol_eq: float = 1e-10
    tol_gap: float = 1e-8
    max_iter: int = 1000

    def __post_init__(self):
        if not (self.tol_eq > 0 and self.tol_gap > 0):
            raise ValueError("tolerances must be strictly positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


DEFAULT_TOL = TolerancePolicy()


def _freeze(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class Channel:
    """Row-stochastic matrix w[x, y] = W(y|x) over finite alphabets."""

    w: np.ndarray

    @property
    def nx(self) -> int:
        return self.w.shape[0]

    @property
    def ny(self) -> int:
        return self.w.shape[1]

    def row(self, x: int) -> np.ndarray:
        return self.w[x]


def make_channel(rows, tol: TolerancePolicy = DEFAULT_TOL) -> Channel:
    """Validate and build a channel from conditional probability rows.

    Rows are renormalized only when their sum is within ``tol.tol_eq`` of 1;
    larger deviations raise :class:`NonStochasticRow`.
    """
    w = np.asarray(rows, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
        raise DimensionMismatch("channel needs a nonempty 2-d array of rows")
    if np.any(w < -tol.tol_eq):
        bad = np.argwhere(w < -tol.tol_eq)[0]
        raise NegativeEntry(f"negative probability at row {bad[0]}, column {bad[1]}")
    w = np.clip(w, 0.0, None)
    sums = w.sum(axis=1)
    off = np.abs(sums - 1.0)
    if np.any(off > tol.tol_eq):
        x = int(np.argmax(off))
        raise NonStochasticRow(f"row {x} sums to {sums[x]:.12g}, not 1")
    w = w / sums[:, None]
    return Channel(_freeze(w))


def product_channel(w: Channel, n: int, max_entries: int = 1_000_000) -> Channel:
    """Memoryless n-fold extension W^n(y|x) = prod_i W(y_i|x_i).

    Indices are lexicographic with the first channel use most significant.
    """
    if n < 1:
        raise ValueError("blocklength must be >= 1")
    entries = (w.nx ** n) * (w.ny ** n)
    if entries > max_entries:
        raise TooLarge(f"{w.nx}^{n} x {w.ny}^{n} = {entries} entries exceeds guard {max_entries}")
    big = w.w
    for _ in range(n - 1):
        big = np.kron(big, w.w)
    return Channel(_freeze(big))


@dataclass(frozen=True)
class ProbVector:
    """A probability distribution over a finite index set."""

    p: np.ndarray

    @property
    def n(self) -> int:
        return self.p.shape[0]


def make_prob(values, tol: TolerancePolicy = DEFAULT_TOL) -> ProbVector:
    """Validate a probability vector; renormalize exactly when near one."""
    p = np.asarray(values, dtype=np.float64)
    if p.ndim != 1 or p.size < 1:
        raise DimensionMismatch("probability vector must be 1-d and nonempty")
    if np.any(p < -tol.tol_eq):
        raise NegativeEntry("negative probability entry")
    p = np.clip(p, 0.0, None)
    s = p.sum()
    if abs(s - 1.0) > tol.tol_eq:
        raise NonStochasticRow(f"probabilities sum to {s:.12g}, not 1")
    return ProbVector(_freeze(p / s))


def uniform_prob(n: int) -> ProbVector:
    return ProbVector(_freeze(np.full(n, 1.0 / n)))


@dataclass(frozen=True)
class ZVector:
    """Auxiliary variable over the output alphabet, entries in [0, 1]."""

    z: np.ndarray

    @property
    def n(self) -> int:
        return self.z.shape[0]


def make_z(values) -> ZVector:
    z = np.asarray(values, dtype=np.float64)
    if z.ndim != 1:
        raise DimensionMismatch("z must be a 1-d vector over outputs")
    if np.any(z < -1e-12) or np.any(z > 1.0 + 1e-12):
        raise ValueError("z entries must lie in [0, 1]")
    return ZVector(_freeze(np.clip(z, 0.0, 1.0)))


@dataclass(frozen=True)
class RatePoint:
    """A coding rate in nats together with the cached threshold e^{-rate}."""

    rate: float
    threshold: float = field(init=False)

    def __post_init__(self):
        if not (math.isfinite(self.rate) and self.rate >= 0.0):
            raise ValueError("rate must be finite and >= 0 nats")
        object.__setattr__(self, "threshold", math.exp(-self.rate))


def as_prob(x, tol: TolerancePolicy = DEFAULT_TOL) -> ProbVector:
    return x if isinstance(x, ProbVector) else make_prob(x, tol)


def as_z(x) -> ZVector:
    return x if isinstance(x, ZVector) else make_z(x)


def as_rate(x) -> RatePoint:
    return x if isinstance(x, RatePoint) else RatePoint(float(x))
