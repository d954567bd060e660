"""Optimal binary hypothesis testing between two finite distributions.

beta_np builds the randomized likelihood-ratio test directly; beta_variational
maximizes the concave piecewise-linear dual

    beta_alpha(P, Q) = max_lambda { sum_w min(Q(w), lambda P(w)) - lambda (1 - alpha) }

over the breakpoints of the ratio Q(w)/P(w).  Both agree with the LP oracle in
:mod:`mmconverse.oracle`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import DEFAULT_TOL, DimensionMismatch, ProbVector, TolerancePolicy, as_prob


@dataclass(frozen=True)
class NPTest:
    """Randomized threshold test: accept ratio < lambda, randomize on = lambda."""

    strict_set: np.ndarray  # indices with Q/P below the threshold, accepted surely
    boundary_set: np.ndarray  # indices with Q/P at the threshold
    randomization: float  # acceptance probability on the boundary
    threshold: float

    def accept_probs(self, n: int) -> np.ndarray:
        t = np.zeros(n)
        t[self.strict_set] = 1.0
        t[self.boundary_set] = self.randomization
        return t


@dataclass(frozen=True)
class BetaResult:
    beta: float
    lambda_interval: tuple[float, float]  # all maximizers of the dual; right end may be inf
    test: NPTest


def _ratio_groups(p: np.ndarray, q: np.ndarray, tol_eq: float):
    """Indices of finite-ratio points grouped by equal Q/P, ascending.

    Points with P(w) = 0 < Q(w) have ratio +inf and are never accepted;
    points with P(w) = Q(w) = 0 are ignored entirely.  Ratios are bucketed
    when they differ by at most tol_eq relatively, so boundary sets stay
    crisp under floating noise.
    """
    finite = np.nonzero(p > 0.0)[0]
    ratios = q[finite] / p[finite]
    order = np.argsort(ratios, kind="stable")
    finite = finite[order]
    ratios = ratios[order]
    groups = []
    i = 0
    while i < len(finite):
        r0 = ratios[i]
        j = i
        while j + 1 < len(finite) and ratios[j + 1] - r0 <= tol_eq * max(1.0, r0):
            j += 1
        groups.append((r0, finite[i : j + 1]))
        i = j + 1
    return groups


def _common(p, q, tol: TolerancePolicy):
    p = as_prob(p, tol)
    q = as_prob(q, tol)
    if p.n != q.n:
        raise DimensionMismatch("P and Q must share one finite alphabet")
    return p.p, q.p


def beta_np(p, q, alpha: float, tol: TolerancePolicy = DEFAULT_TOL) -> BetaResult:
    """Minimal Q-mass over randomized tests accepting P-mass >= alpha."""
    pv, qv = _common(p, q, tol)
    if not -tol.tol_eq <= alpha <= 1.0 + tol.tol_eq:
        raise ValueError("alpha must lie in [0, 1]")
    alpha = min(max(alpha, 0.0), 1.0)
    groups = _ratio_groups(pv, qv, tol.tol_eq)

    cum = 0.0
    k = 0
    for k, (_r, idx) in enumerate(groups):
        cum += float(pv[idx].sum())
        if cum >= alpha - tol.tol_eq:
            break
    r_k, idx_k = groups[k]
    strict = np.concatenate([g[1] for g in groups[:k]]) if k else np.array([], dtype=np.int64)
    p_strict = float(pv[strict].sum()) if strict.size else 0.0
    p_bound = float(pv[idx_k].sum())
    delta = min(max((alpha - p_strict) / p_bound, 0.0), 1.0) if p_bound > 0.0 else 0.0
    beta = float(qv[strict].sum()) + delta * float(qv[idx_k].sum())

    lo = r_k
    hi = r_k
    if abs(cum - alpha) <= tol.tol_eq:  # boundary group fully accepted: flat stretch
        hi = groups[k + 1][0] if k + 1 < len(groups) else math.inf
    if alpha <= tol.tol_eq:  # empty test permitted: flat stretch down to zero
        lo = 0.0
    test = NPTest(strict_set=strict, boundary_set=idx_k, randomization=delta, threshold=r_k)
    return BetaResult(beta=beta, lambda_interval=(lo, hi), test=test)


def variational_objective(p, q, alpha: float, lam: float, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """sum_w min(Q(w), lambda P(w)) - lambda (1 - alpha)."""
    pv, qv = _common(p, q, tol)
    return float(np.minimum(qv, lam * pv).sum() - lam * (1.0 - alpha))


def beta_variational(p, q, alpha: float, tol: TolerancePolicy = DEFAULT_TOL) -> tuple[float, float]:
    """Maximize the dual over its breakpoints; returns (beta, smallest maximizer)."""
    pv, qv = _common(p, q, tol)
    if not -tol.tol_eq <= alpha <= 1.0 + tol.tol_eq:
        raise ValueError("alpha must lie in [0, 1]")
    alpha = min(max(alpha, 0.0), 1.0)
    groups = _ratio_groups(pv, qv, tol.tol_eq)
    candidates = [0.0] + [r for r, _ in groups]
    best = -math.inf
    best_lam = 0.0
    for lam in candidates:
        val = float(np.minimum(qv, lam * pv).sum() - lam * (1.0 - alpha))
        if val > best + 1e-15:
            best = val
            best_lam = lam
    return best, best_lam


def lambda_condition_holds(p, q, alpha: float, lam: float, tol: TolerancePolicy = DEFAULT_TOL) -> bool:
    """P{Q/P < lambda} <= alpha <= P{Q/P <= lambda}, comparisons at tol_eq.

    Ratio comparisons against lambda reuse the relative bucketing of the
    test construction so ties behave identically in both code paths.
    """
    if lam < 0.0:
        raise ValueError("lambda must be nonnegative")
    pv, qv = _common(p, q, tol)
    below = 0.0
    upto = 0.0
    for r, idx in _ratio_groups(pv, qv, tol.tol_eq):
        mass = float(pv[idx].sum())
        if r < lam - tol.tol_eq * max(1.0, lam):
            below += mass
            upto += mass
        elif abs(r - lam) <= tol.tol_eq * max(1.0, lam):
            upto += mass
    return below <= alpha + tol.tol_eq and alpha <= upto + tol.tol_eq
