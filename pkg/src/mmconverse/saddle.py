"""Saddle-point computation: alternate local weight optimization with
perturbation-based escapes until the sufficient optimality conditions hold.

One iteration is: recompute the inner maximizer z, run the local weight LP at
fixed z, and if that is stuck, search for a zero-sum perturbation of the
weights whose score derivative is negative (a homogeneous LP on the support).
A bounded perturbation LP yields a Farkas certificate of global optimality;
the certificate coefficients also produce the final z at which every
supported input scores exactly the saddle value.  Off-support violations are
repaired afterwards by the zero-support recovery passes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gamma as _gamma
from . import lp
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
from .view import InfeasibleLocalLP, NoDecomposition, TraceStep, ZeroStep  # re-exported

__all__ = [
    "SaddleCertificate",
    "IterationTrace",
    "PerturbationVector",
    "InfeasibleLocalLP",
    "ZeroStep",
    "NoDecomposition",
    "GloballyOptimal",
    "local_qx_step",
    "tighten_z",
    "z_mu",
    "eta_direction",
    "find_improving_direction",
    "apply_direction",
    "zero_support_fix",
    "solve_saddle",
]


@dataclass(frozen=True)
class PerturbationVector:
    """Zero-sum change of the input weights, nonnegative off the support."""

    mu: np.ndarray


@dataclass(frozen=True)
class GloballyOptimal:
    """Outcome of the direction search when no improvement exists."""

    certificate: lp.FarkasCertificate


@dataclass(frozen=True)
class SaddleCertificate:
    qx_star: ProbVector
    z_star: ZVector
    epsilon: float
    gap: float
    farkas: lp.FarkasCertificate | None
    iterations: int
    status: str  # "optimal" | "iteration-limit" | "stalled"

    @property
    def converged(self) -> bool:
        return self.status == "optimal"


@dataclass
class IterationTrace:
    steps: list[TraceStep] = field(default_factory=list)

    def upper_values(self) -> np.ndarray:
        return np.array([s.upper_after for s in self.steps])

    def min_scores(self) -> np.ndarray:
        return np.array([s.min_score for s in self.steps])


def _plain(w: Channel, r: RatePoint) -> _view.View:
    return _view.plain_view(w, r)


def local_qx_step(qx, z, w: Channel, r, tol: TolerancePolicy = DEFAULT_TOL):
    """One local linear optimization of the weights at fixed z.

    Minimizes gamma(., z) over distributions that keep z an inner maximizer
    (two threshold constraints per output).  Returns (qx', improved); the
    original qx is kept on objective ties.
    """
    qx, z, r = as_prob(qx, tol), as_z(z), as_rate(r)
    v = _plain(w, r)
    q_new, _val, improved = _view.local_lp(v, qx.p, z.z, _safe_log(z.z), tol)
    return ProbVector(q_new), improved


def tighten_z(qx, z, w: Channel, r, tol: TolerancePolicy = DEFAULT_TOL):
    """Phase I/II pair (z_tight, z_lower) on the support of qx."""
    qx, z, r = as_prob(qx, tol), as_z(z), as_rate(r)
    v = _plain(w, r)
    supp = np.nonzero(qx.p > tol.tol_eq)[0]
    zt, _lzt, zl, _lzl = _view.tighten(v, qx.p, z.z, _safe_log(z.z), supp, tol)
    return ZVector(zt), ZVector(zl)


def z_mu(mu, z_tight, z_lower, w: Channel, r=None):
    """Switched z under a perturbation: z_y where the weak-set rate is
    nonnegative, z_lower_y where it is negative."""
    mu = mu.mu if isinstance(mu, PerturbationVector) else np.asarray(mu, dtype=np.float64)
    zt, zl = as_z(z_tight), as_z(z_lower)
    z = zt.z.copy()
    for y in range(w.ny):
        a = (w.w[:, y] >= zt.z[y]).astype(float)
        if float(mu @ a) < 0.0:
            z[y] = zl.z[y]
    return ZVector(z)


def eta_direction(mu, z_tight, z_lower, w: Channel, r, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """Exact per-unit score change along mu after re-optimizing z."""
    mu = mu.mu if isinstance(mu, PerturbationVector) else np.asarray(mu, dtype=np.float64)
    zt, zl, r = as_z(z_tight), as_z(z_lower), as_rate(r)
    if abs(float(mu.sum())) > 1e-9:
        raise ValueError("perturbations must sum to zero")
    b = np.minimum(w.w, zt.z[None, :]).sum(axis=1)
    val = float(mu @ b)
    for y in range(w.ny):
        a = (w.w[:, y] >= zt.z[y]).astype(float)
        dot = float(mu @ a)
        if dot < 0.0:
            val -= (zt.z[y] - zl.z[y]) * dot
    return val


def find_improving_direction(qx, z_tight, z_lower, w: Channel, r, tol: TolerancePolicy = DEFAULT_TOL):
    """Either a strictly improving PerturbationVector or GloballyOptimal.

    Builds the Farkas system on the support of qx and solves the equivalent
    homogeneous LP; unbounded means the extreme ray improves the score,
    bounded-at-zero yields the certificate.
    """
    qx, r = as_prob(qx, tol), as_rate(r)
    zt, zl = as_z(z_tight), as_z(z_lower)
    v = _plain(w, r)
    supp = np.nonzero(qx.p > tol.tol_eq)[0]
    system = _view.direction_system(v, zt.z, _safe_log(zt.z), zl.z, _safe_log(zl.z), supp)
    sol = lp.solve(lp.build_perturbation_lp(system))
    if sol.status == "unbounded":
        mu = np.zeros(w.nx)
        mu[supp] = sol.ray[: supp.size]
        mu[supp] -= mu[supp].mean()
        return PerturbationVector(mu)
    cert = lp.farkas_certificate(system)
    if cert is None:
        raise lp.NumericalFailure("perturbation LP optimal but certificate missing")
    return GloballyOptimal(cert)


def apply_direction(qx, mu, z_tight, z_lower, w: Channel, r, tol: TolerancePolicy = DEFAULT_TOL):
    """Exact line search along mu to the first constraint breakpoint."""
    qx, r = as_prob(qx, tol), as_rate(r)
    mu_arr = mu.mu if isinstance(mu, PerturbationVector) else np.asarray(mu, dtype=np.float64)
    zt, zl = as_z(z_tight), as_z(z_lower)
    v = _plain(w, r)
    q_new, z_new, _lz, _delta = _view.apply_step(
        v, qx.p, mu_arr, zt.z, _safe_log(zt.z), zl.z, _safe_log(zl.z), tol
    )
    q_new = q_new / q_new.sum()
    return ProbVector(q_new), ZVector(z_new)


def zero_support_fix(qx, z, w: Channel, r, tol: TolerancePolicy = DEFAULT_TOL) -> ZVector:
    """One recovery pass raising the worst off-support score toward the saddle
    value; returns z unchanged when no violation exists."""
    qx, z, r = as_prob(qx, tol), as_z(z), as_rate(r)
    v = _plain(w, r)
    supp = np.nonzero(qx.p > tol.tol_eq)[0]
    logz = _safe_log(z.z)
    sc = _view.scores_view(v, logz)
    eps_val = _view.gamma_view(v, qx.p, logz)
    off = np.ones(w.nx, dtype=bool)
    off[supp] = False
    off_idx = np.nonzero(off)[0]
    if off_idx.size == 0:
        return z
    worst = off_idx[int(np.argmin(sc[off_idx]))]
    if sc[worst] >= eps_val - tol.tol_eq:
        return z
    z_new, _ = _view.zero_fix_pass(
        v, qx.p, z.z.copy(), logz, int(worst), supp, eps_val, float(sc[worst]), tol
    )
    return ZVector(z_new)


def solve_saddle(
    w: Channel,
    r,
    tol: TolerancePolicy = DEFAULT_TOL,
    qx0=None,
) -> tuple[SaddleCertificate, IterationTrace]:
    """Compute the saddle point of gamma for (w, r).

    The reported epsilon is the minimum per-input score at the final z, which
    is a valid converse bound regardless of convergence; at optimality it
    equals the saddle value and the certificate passes check_saddle at
    tol.tol_gap.
    """
    r = as_rate(r)
    q0 = as_prob(qx0, tol).p if qx0 is not None else None
    if q0 is not None and q0.shape[0] != w.nx:
        raise DimensionMismatch("qx0 does not match channel inputs")
    v = _plain(w, r)
    out = _view.solve_view(v, tol, q0)
    cert = SaddleCertificate(
        qx_star=ProbVector(out.q / out.q.sum()),
        z_star=ZVector(np.clip(out.z, 0.0, 1.0)),
        epsilon=out.epsilon,
        gap=out.gap,
        farkas=out.farkas,
        iterations=out.iterations,
        status=out.status,
    )
    return cert, IterationTrace(steps=out.trace)


def _safe_log(z: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(z)
