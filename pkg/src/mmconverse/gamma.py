"""The convex-concave functional behind the converse bound.

    gamma(Q_X, z) = sum_{x,y} Q_X(x) min(W(y|x), z_y) - e^{-R} sum_y z_y

It is affine in Q_X and concave in z; its saddle value is the error-probability
lower bound.  This module evaluates gamma, solves the inner maximization over
z in closed form, scores individual inputs, and checks saddle-point conditions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import view as _view
from .channel import (
    DEFAULT_TOL,
    Channel,
    DimensionMismatch,
    ProbVector,
    RatePoint,
    TolerancePolicy,
    ZVector,
    as_prob,
    as_rate,
    as_z,
)


class ZeroZ(ValueError):
    """An all-zero z has no (lambda, Q_Y) decomposition."""


@dataclass(frozen=True)
class ScoreVector:
    """Per-input decomposition of gamma: score(x) = b(x) - rate_term."""

    b: np.ndarray
    rate_term: float

    @property
    def scores(self) -> np.ndarray:
        return self.b - self.rate_term

    @property
    def min_score(self) -> float:
        return float(np.min(self.scores))


@dataclass(frozen=True)
class SaddleReport:
    value: float
    support_scores_ok: bool
    offsupport_scores_ok: bool
    z_condition_ok: bool
    duality_gap: float

    @property
    def ok(self) -> bool:
        return self.support_scores_ok and self.offsupport_scores_ok and self.z_condition_ok


def _check_dims(qx: ProbVector, z: ZVector | None, w: Channel):
    if qx.n != w.nx:
        raise DimensionMismatch("input distribution does not match channel inputs")
    if z is not None and z.n != w.ny:
        raise DimensionMismatch("z does not match channel outputs")


def gamma_eval(qx, z, w: Channel, r) -> float:
    qx, z, r = as_prob(qx), as_z(z), as_rate(r)
    _check_dims(qx, z, w)
    inner = np.minimum(w.w, z.z[None, :]).sum(axis=1)
    return float(qx.p @ inner - r.threshold * z.z.sum())


def score_vector(z, w: Channel, r) -> ScoreVector:
    """score(x) = sum_y min(W(y|x), z_y) - e^{-R} sum_y z_y; its minimum over x
    equals the minimum of gamma(., z) over all input distributions."""
    z, r = as_z(z), as_rate(r)
    if z.n != w.ny:
        raise DimensionMismatch("z does not match channel outputs")
    b = np.minimum(w.w, z.z[None, :]).sum(axis=1)
    return ScoreVector(b=b, rate_term=float(r.threshold * z.z.sum()))


def optimal_z(qx, w: Channel, r, tol: TolerancePolicy = DEFAULT_TOL) -> ZVector:
    """Canonical inner maximizer of gamma(qx, .).

    Per output, descending over channel values, picks the value at which the
    cumulative qx-mass of {x : W(y|x) >= value} first reaches e^{-R}; every
    choice satisfying the threshold condition attains the same maximum.
    """
    qx, r = as_prob(qx), as_rate(r)
    _check_dims(qx, None, w)
    v = _view.plain_view(w, r)
    z, _ = _view.optimal_z_view(v, qx.p, tol)
    return ZVector(z)


def optimal_z_interval(qx, w: Channel, r, tol: TolerancePolicy = DEFAULT_TOL) -> list[tuple[float, float]]:
    """Per output, the whole closed interval of maximizing z values."""
    qx, r = as_prob(qx), as_rate(r)
    _check_dims(qx, None, w)
    return _view.z_intervals(_view.plain_view(w, r), qx.p, tol)


def max_over_z(qx, w: Channel, r, tol: TolerancePolicy = DEFAULT_TOL) -> tuple[float, ZVector]:
    z = optimal_z(qx, w, r, tol)
    return gamma_eval(qx, z, w, r), z


def recover_qy(z) -> tuple[float, ProbVector]:
    """Split z into (lambda, Q_Y) with z_y = lambda Q_Y(y); gamma is invariant."""
    z = as_z(z)
    lam = float(z.z.sum())
    if lam <= 0.0:
        raise ZeroZ("all-zero z has no output-distribution decomposition")
    return lam, ProbVector(z.z / lam)


def eq12_condition_holds(qx, z, w: Channel, r, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """Per-output maximizer condition: Q{W > z_y} <= e^{-R} <= Q{W >= z_y}."""
    qx, z, r = as_prob(qx), as_z(z), as_rate(r)
    _check_dims(qx, z, w)
    thr = r.threshold
    for y in range(w.ny):
        col = w.w[:, y]
        above = float(qx.p[col > z.z[y]].sum())
        atab = float(qx.p[col >= z.z[y]].sum())
        if above > thr + tol.tol_eq or atab < thr - tol.tol_eq:
            return False
    return True


def check_saddle(qx, z, w: Channel, r, tol: float | None = None) -> SaddleReport:
    """Verify the sufficient saddle conditions at tolerance ``tol``.

    Supported inputs must score exactly the saddle value, unsupported ones at
    least it, and z must satisfy the per-output maximizer condition; the
    duality gap compares the inner maximum against the worst score.
    """
    qx, z, r = as_prob(qx), as_z(z), as_rate(r)
    _check_dims(qx, z, w)
    if tol is None:
        tol = DEFAULT_TOL.tol_gap
    pol = TolerancePolicy(tol_eq=tol, tol_gap=tol)
    value = gamma_eval(qx, z, w, r)
    sc = score_vector(z, w, r).scores
    on = qx.p > tol
    support_ok = bool(np.all(np.abs(sc[on] - value) <= tol)) if on.any() else True
    off = ~on
    offsupport_ok = bool(np.all(sc[off] >= value - tol)) if off.any() else True
    z_ok = eq12_condition_holds(qx, z, w, r, pol)
    upper, _ = max_over_z(qx, w, r)
    return SaddleReport(
        value=value,
        support_scores_ok=support_ok,
        offsupport_scores_ok=offsupport_ok,
        z_condition_ok=z_ok,
        duality_gap=upper - float(np.min(sc)),
    )
