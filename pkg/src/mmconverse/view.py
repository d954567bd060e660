"""Shared working representation for the saddle-point solver.

A :class:`View` describes the optimization data for one saddle problem:
inputs carrying simplex weights, and per-output columns of (value, input,
mass coefficient) entries grouped by equal channel value.  A plain channel
maps one-to-one onto a view (mass coefficient 1, column size 1); the
type-class reduction maps input types to inputs, output types to columns,
joint types to entries whose coefficients are formed in the log domain.

All score/gamma arithmetic goes through exp(sum of logs) so the reduced path
never materializes astronomically large type-class sizes; for plain channels
the logs are zero and the formulas collapse to the textbook expressions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import lp
from .channel import Channel, RatePoint, TolerancePolicy

_NEG_INF = -math.inf

# Relative tolerance for grouping equal channel values (log-domain absolute).
_VALUE_GROUP_TOL = 1e-9


class InfeasibleLocalLP(RuntimeError):
    """The local weight LP was infeasible; signals tolerance misconfiguration."""


class ZeroStep(RuntimeError):
    """A descent step collapsed below tolerance (degenerate geometry)."""


class NoDecomposition(RuntimeError):
    """No Farkas decomposition for an off-support score violation."""

    def __init__(self, message, direction=None):
        super().__init__(message)
        self.direction = direction


@dataclass
class ViewColumn:
    """One output class: entries sorted by descending value, grouped when equal.

    starts[g]:starts[g+1] slices the per-group rows; row_mass holds the
    Q-mass coefficients used in the threshold constraints, row_log_gamma the
    log of the score coefficients (0 for plain channels).
    """

    log_size: float
    values: np.ndarray
    log_values: np.ndarray
    starts: np.ndarray
    row_inputs: np.ndarray
    row_mass: np.ndarray
    row_log_gamma: np.ndarray

    def n_groups(self) -> int:
        return self.values.shape[0]

    def group_masses(self, q: np.ndarray) -> np.ndarray:
        gm = np.empty(self.n_groups())
        contrib = self.row_mass * q[self.row_inputs]
        for g in range(self.n_groups()):
            gm[g] = contrib[self.starts[g] : self.starts[g + 1]].sum()
        return gm

    def count_above(self, z: float, strict: bool) -> int:
        """Number of leading groups with value > z (strict) or >= z."""
        side = "left" if strict else "right"
        return int(np.searchsorted(-self.values, -z, side=side))

    def mass_above(self, q: np.ndarray, z: float, strict: bool) -> float:
        g = self.count_above(z, strict)
        end = self.starts[g]
        return float((self.row_mass[:end] * q[self.row_inputs[:end]]).sum())

    def coef_above(self, n_inputs: int, z: float, strict: bool) -> np.ndarray:
        """Per-input mass coefficients of the set {value > z} (or >= z)."""
        g = self.count_above(z, strict)
        end = self.starts[g]
        out = np.zeros(n_inputs)
        np.add.at(out, self.row_inputs[:end], self.row_mass[:end])
        return out

    def member_flags(self, mask: np.ndarray) -> np.ndarray:
        """Per-group flag: does the group contain a row of a masked input?"""
        hit = mask[self.row_inputs]
        return np.array(
            [hit[self.starts[g] : self.starts[g + 1]].any() for g in range(self.n_groups())]
        )


@dataclass
class View:
    n_inputs: int
    columns: list[ViewColumn]
    threshold: float
    log_threshold: float
    input_log_sizes: np.ndarray | None = None

    @property
    def n_outputs(self) -> int:
        return len(self.columns)


def build_column(log_size, values, log_values, inputs, mass, log_gamma) -> ViewColumn:
    """Sort entries by descending value, bucket near-equal values, merge inputs."""
    values = np.asarray(values, dtype=np.float64)
    log_values = np.asarray(log_values, dtype=np.float64)
    inputs = np.asarray(inputs, dtype=np.int64)
    mass = np.asarray(mass, dtype=np.float64)
    log_gamma = np.asarray(log_gamma, dtype=np.float64)
    order = np.lexsort((inputs, -log_values))
    values, log_values = values[order], log_values[order]
    inputs, mass, log_gamma = inputs[order], mass[order], log_gamma[order]

    g_values, g_logs, g_starts = [], [], [0]
    out_inputs, out_mass, out_lgamma = [], [], []
    i = 0
    n = len(values)
    while i < n:
        j = i
        lv = log_values[i]
        while j + 1 < n and (
            (lv == _NEG_INF and log_values[j + 1] == _NEG_INF)
            or (lv > _NEG_INF and lv - log_values[j + 1] <= _VALUE_GROUP_TOL)
        ):
            j += 1
        g_values.append(values[i])
        g_logs.append(log_values[i])
        k = i
        while k <= j:
            m = k
            while m + 1 <= j and inputs[m + 1] == inputs[k]:
                m += 1
            out_inputs.append(inputs[k])
            out_mass.append(mass[k : m + 1].sum())
            out_lgamma.append(_logsumexp(log_gamma[k : m + 1]))
            k = m + 1
        g_starts.append(len(out_inputs))
        i = j + 1
    return ViewColumn(
        log_size=float(log_size),
        values=np.array(g_values),
        log_values=np.array(g_logs),
        starts=np.array(g_starts, dtype=np.int64),
        row_inputs=np.array(out_inputs, dtype=np.int64),
        row_mass=np.array(out_mass),
        row_log_gamma=np.array(out_lgamma),
    )


def _logsumexp(a: np.ndarray) -> float:
    hi = np.max(a)
    if hi == _NEG_INF:
        return _NEG_INF
    return float(hi + np.log(np.exp(a - hi).sum()))


def plain_view(w: Channel, r: RatePoint) -> View:
    """One column per output symbol; entries (x, W(y|x)) with unit coefficients."""
    with np.errstate(divide="ignore"):
        logw = np.log(w.w)
    cols = []
    xs = np.arange(w.nx, dtype=np.int64)
    zeros = np.zeros(w.nx)
    for y in range(w.ny):
        cols.append(build_column(0.0, w.w[:, y], logw[:, y], xs, np.ones(w.nx), zeros))
    return View(
        n_inputs=w.nx,
        columns=cols,
        threshold=r.threshold,
        log_threshold=-r.rate,
        input_log_sizes=None,
    )


# ---------------------------------------------------------------------------
# Gamma, scores and the inner maximization
# ---------------------------------------------------------------------------


def optimal_z_view(view: View, q: np.ndarray, tol: TolerancePolicy) -> tuple[np.ndarray, np.ndarray]:
    """Canonical inner maximizer: per column, the largest value at which the
    cumulative weight of {value >= z} first reaches the threshold."""
    z = np.empty(view.n_outputs)
    logz = np.empty(view.n_outputs)
    for j, col in enumerate(view.columns):
        cum = np.cumsum(col.group_masses(q))
        g = int(np.searchsorted(cum, view.threshold - tol.tol_eq))
        g = min(g, col.n_groups() - 1)
        z[j] = col.values[g]
        logz[j] = col.log_values[g]
    return z, logz


def z_intervals(view: View, q: np.ndarray, tol: TolerancePolicy) -> list[tuple[float, float]]:
    """Per column, the closed interval of maximizing z values."""
    out = []
    for col in view.columns:
        cum = np.cumsum(col.group_masses(q))
        g = int(np.searchsorted(cum, view.threshold - tol.tol_eq))
        g = min(g, col.n_groups() - 1)
        hi = col.values[g]
        j = g
        while j < col.n_groups() and abs(cum[j] - view.threshold) <= tol.tol_eq:
            j += 1
        if j == g:
            lo = hi
        else:
            lo = col.values[j] if j < col.n_groups() else 0.0
        out.append((float(lo), float(hi)))
    return out


def b_vector(view: View, logz: np.ndarray) -> np.ndarray:
    """Per-input score mass b(x) = sum over entries of coef * min(value, z)."""
    b = np.zeros(view.n_inputs)
    for j, col in enumerate(view.columns):
        lv = np.minimum(col.log_values, logz[j])
        sizes = np.diff(col.starts)
        contrib = np.exp(col.row_log_gamma + np.repeat(lv, sizes))
        np.add.at(b, col.row_inputs, contrib)
    return b


def rate_term(view: View, logz: np.ndarray) -> float:
    total = 0.0
    for j, col in enumerate(view.columns):
        lz = logz[j]
        if lz > _NEG_INF:
            total += math.exp(view.log_threshold + col.log_size + lz)
    return total


def scores_view(view: View, logz: np.ndarray) -> np.ndarray:
    return b_vector(view, logz) - rate_term(view, logz)


def gamma_view(view: View, q: np.ndarray, logz: np.ndarray) -> float:
    return float(q @ b_vector(view, logz)) - rate_term(view, logz)


def upper_value(view: View, q: np.ndarray, tol: TolerancePolicy) -> float:
    _z, logz = optimal_z_view(view, q, tol)
    return gamma_view(view, q, logz)


def _safe_log(z: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        return np.log(z)


# ---------------------------------------------------------------------------
# Local weight optimization (linear program at fixed z)
# ---------------------------------------------------------------------------


def local_lp(view: View, q: np.ndarray, z: np.ndarray, logz: np.ndarray, tol: TolerancePolicy):
    """argmin of gamma(., z) under the threshold constraints keeping z optimal.

    Returns (q_new, gamma_new, improved).  The constraint right-hand sides are
    slackened by tol_eq/2 so the current q is always feasible.
    """
    n = view.n_inputs
    b = b_vector(view, logz)
    rows = []
    slack = 0.5 * tol.tol_eq
    for j, col in enumerate(view.columns):
        rows.append((col.coef_above(n, z[j], strict=True), lp.LE, view.threshold + slack))
        rows.append((col.coef_above(n, z[j], strict=False), lp.GE, view.threshold - slack))
    rows.append((np.ones(n), lp.EQ, 1.0))
    sol = lp.solve(lp.LpProblem(objective=b, rows=rows))
    if sol.status != "optimal":
        raise InfeasibleLocalLP(f"local LP status {sol.status}")
    q_new = np.clip(sol.primal, 0.0, None)
    q_new /= q_new.sum()
    gamma_old = float(q @ b) - rate_term(view, logz)
    gamma_new = float(q_new @ b) - rate_term(view, logz)
    if gamma_new < gamma_old - tol.tol_eq:
        return q_new, gamma_new, True
    return q, gamma_old, False


# ---------------------------------------------------------------------------
# Tightening and the directional-improvement system
# ---------------------------------------------------------------------------


def tighten(view: View, q: np.ndarray, z: np.ndarray, logz: np.ndarray, supp: np.ndarray, tol: TolerancePolicy):
    """Phase I/II replacement pair (z_tight, z_lower) for the improvement step.

    z_tight keeps the strict-mass inequality strictly slack for every column;
    z_lower drops to the next supported value below wherever the weak-mass
    inequality binds, so that {value > z_lower} and {value >= z_tight} agree
    on the support.
    """
    mask = np.zeros(view.n_inputs, dtype=bool)
    mask[supp] = True
    thr = view.threshold
    zt = z.copy()
    lzt = logz.copy()
    zl = z.copy()
    lzl = logz.copy()
    for j, col in enumerate(view.columns):
        ms = col.mass_above(q, zt[j], strict=True)
        if ms > thr + tol.tol_eq:
            raise ValueError("z does not satisfy the maximizer condition for q")
        if abs(ms - thr) <= tol.tol_eq:
            flags = col.member_flags(mask)
            above = np.nonzero((col.values > zt[j]) & flags)[0]
            if above.size:
                g = int(above[-1])  # smallest supported value above z
                zt[j] = col.values[g]
                lzt[j] = col.log_values[g]
        mg = col.mass_above(q, zt[j], strict=False)
        if mg < thr - tol.tol_eq:
            raise ValueError("z does not satisfy the maximizer condition for q")
        if abs(mg - thr) <= tol.tol_eq:
            flags = col.member_flags(mask)
            below = np.nonzero((col.values < zt[j]) & flags)[0]
            if below.size:
                g = int(below[0])  # largest supported value below z
                zl[j] = col.values[g]
                lzl[j] = col.log_values[g]
            else:
                zl[j] = zt[j]  # threshold = 1 edge: nothing below on support
                lzl[j] = lzt[j]
        else:
            zl[j] = zt[j]
            lzl[j] = lzt[j]
    return zt, lzt, zl, lzl


def direction_system(view: View, zt, lzt, zl, lzl, supp: np.ndarray) -> lp.FarkasSystem:
    """Farkas system (b, a_y, alpha_y) of the improvement problem on the support."""
    b = b_vector(view, lzt)[supp]
    a_list = []
    alpha = np.empty(view.n_outputs)
    for j, col in enumerate(view.columns):
        a_list.append(col.coef_above(view.n_inputs, zt[j], strict=False)[supp])
        diff = zt[j] - zl[j]
        if diff <= 0.0:
            alpha[j] = 0.0
        else:
            alpha[j] = math.exp(col.log_size + math.log(diff))
    return lp.FarkasSystem(b=b, a=a_list, alpha=alpha)


def z_switch(view: View, mu: np.ndarray, zt, lzt, zl, lzl):
    """z after a perturbation: drop to z_lower where the weak-mass rate is negative."""
    z = zt.copy()
    logz = lzt.copy()
    for j, col in enumerate(view.columns):
        a = col.coef_above(view.n_inputs, zt[j], strict=False)
        if float(mu @ a) < 0.0:
            z[j] = zl[j]
            logz[j] = lzl[j]
    return z, logz


def eta_direction_view(view: View, mu: np.ndarray, zt, lzt, zl, lzl, supp) -> float:
    system = direction_system(view, zt, lzt, zl, lzl, supp)
    return lp.eta_value(system, mu[supp])


def apply_step(view: View, q: np.ndarray, mu: np.ndarray, zt, lzt, zl, lzl, tol: TolerancePolicy):
    """Largest feasibility-preserving step along mu; returns (q', z', logz', delta).

    delta is capped by weight nonnegativity and by the first threshold
    constraint that would cross under the switched z.
    """
    thr = view.threshold
    delta = math.inf
    neg = np.nonzero(mu < -1e-15)[0]
    if neg.size:
        delta = float(np.min(q[neg] / -mu[neg]))
    switched = []
    for j, col in enumerate(view.columns):
        adot = float(mu @ col.coef_above(view.n_inputs, zt[j], strict=False))
        if adot >= 0.0:
            switched.append(False)
            udot = float(mu @ col.coef_above(view.n_inputs, zt[j], strict=True))
            if udot > 1e-15:
                slack = max(thr - col.mass_above(q, zt[j], strict=True), 0.0)
                delta = min(delta, slack / udot)
        else:
            switched.append(True)
            aldot = float(mu @ col.coef_above(view.n_inputs, zl[j], strict=False))
            if aldot < -1e-15:
                slack = max(col.mass_above(q, zl[j], strict=False) - thr, 0.0)
                delta = min(delta, slack / -aldot)
    if not math.isfinite(delta) or delta <= tol.tol_eq:
        raise ZeroStep(f"step size {delta:.3e} below tolerance")
    q_new = q + delta * mu
    q_new[q_new < 0.0] = 0.0
    z_new = np.where(switched, zl, zt)
    logz_new = np.where(switched, lzl, lzt)
    return q_new, z_new, logz_new, delta


# ---------------------------------------------------------------------------
# Zero-support recovery
# ---------------------------------------------------------------------------


def zero_fix_pass(view: View, q, z, logz, x1: int, supp: np.ndarray, eps_val: float, score_x1: float, tol: TolerancePolicy):
    """One recovery pass for an off-support input whose score sits below eps.

    Either returns an adjusted z that raises score(x1) while pinning support
    scores and the maximizer condition, or raises :class:`NoDecomposition`
    carrying a strictly improving direction through x1.
    """
    thr = view.threshold
    S = np.concatenate([supp, [x1]])
    S.sort()
    pos_x1 = int(np.searchsorted(S, x1))
    ns = S.shape[0]

    al, ar = [], []
    u_rows, v_rows = [], []
    for j, col in enumerate(view.columns):
        if abs(col.mass_above(q, z[j], strict=True) - thr) <= tol.tol_eq:
            al.append(j)
            u_rows.append(col.coef_above(view.n_inputs, z[j], strict=True)[S])
        if abs(col.mass_above(q, z[j], strict=False) - thr) <= tol.tol_eq:
            ar.append(j)
            v_rows.append(col.coef_above(view.n_inputs, z[j], strict=False)[S])

    rows = [(u, lp.LE, 0.0) for u in u_rows] + [(v, lp.GE, 0.0) for v in v_rows]
    rows.append((np.ones(ns), lp.EQ, 0.0))
    cap = np.zeros(ns)
    cap[pos_x1] = 1.0
    rows.append((cap, lp.LE, 1.0))
    obj = -cap
    bounds = [(None, None)] * ns
    bounds[pos_x1] = (0.0, None)
    sol = lp.solve(lp.LpProblem(objective=obj, rows=rows, bounds=bounds))
    if sol.status != "optimal":
        raise NoDecomposition(f"recovery LP status {sol.status}")

    if -sol.objective_value > 1e-9:
        mu = np.zeros(view.n_inputs)
        mu[S] = sol.primal
        raise NoDecomposition("improving direction through zero-weight input", direction=mu)

    # Bounded at zero: the duals decompose the unit vector at x1 over the
    # active constraint coefficients plus a multiple of the all-one vector.
    y = sol.dual
    y_l = y[: len(al)]
    y_r = y[len(al) : len(al) + len(ar)]
    tau = y[len(al) + len(ar)]
    d_vec = -(tau * np.ones(ns))
    for yk, u in zip(y_l, u_rows):
        d_vec -= yk * u
    for yk, v in zip(y_r, v_rows):
        d_vec -= yk * v
    scale = d_vec[pos_x1]
    if scale <= 1e-9:
        raise NoDecomposition("degenerate recovery duals")
    lam_l = -y_l / scale  # >= 0: raise these z entries
    lam_h = -y_r / scale  # <= 0: lower these z entries
    target = np.zeros(ns)
    target[pos_x1] = 1.0
    recon = (-tau / scale) * np.ones(ns)
    for lk, u in zip(lam_l, u_rows):
        recon += lk * u
    for lk, v in zip(lam_h, v_rows):
        recon += lk * v
    if np.max(np.abs(recon - target)) > 1e-7:
        raise NoDecomposition("recovery decomposition residual too large")

    move = np.zeros(view.n_outputs)
    for j, lk in zip(al, lam_l):
        move[j] += lk
    for j, lk in zip(ar, lam_h):
        move[j] += lk

    mask = np.zeros(view.n_inputs, dtype=bool)
    mask[S] = True
    t = eps_val - score_x1
    for j in np.nonzero(np.abs(move) > 1e-14)[0]:
        col = view.columns[j]
        dz_unit = move[j] * math.exp(-col.log_size)
        flags = col.member_flags(mask)
        if dz_unit > 0.0:
            above = np.nonzero((col.values > z[j]) & flags)[0]
            gap = (col.values[above[-1]] - z[j]) if above.size else (1.0 - z[j])
            t = min(t, gap / dz_unit)
        else:
            below = np.nonzero((col.values < z[j]) & flags)[0]
            gap = z[j] - (col.values[below[0]] if below.size else 0.0)
            t = min(t, gap / -dz_unit)
    if t <= 0.0:
        raise NoDecomposition("recovery step collapsed")

    z_new = z.copy()
    for j in np.nonzero(np.abs(move) > 1e-14)[0]:
        col = view.columns[j]
        z_new[j] = min(max(z_new[j] + t * move[j] * math.exp(-col.log_size), 0.0), 1.0)
    return z_new, _safe_log(z_new)


def zero_descent_step(view: View, q, z, mu: np.ndarray, tol: TolerancePolicy):
    """Step along a recovery direction at fixed z (support grows at x1)."""
    thr = view.threshold
    delta = math.inf
    neg = np.nonzero(mu < -1e-15)[0]
    if neg.size:
        delta = float(np.min(q[neg] / -mu[neg]))
    for j, col in enumerate(view.columns):
        udot = float(mu @ col.coef_above(view.n_inputs, z[j], strict=True))
        if udot > 1e-15:
            slack = max(thr - col.mass_above(q, z[j], strict=True), 0.0)
            delta = min(delta, slack / udot)
        vdot = float(mu @ col.coef_above(view.n_inputs, z[j], strict=False))
        if vdot < -1e-15:
            slack = max(col.mass_above(q, z[j], strict=False) - thr, 0.0)
            delta = min(delta, slack / -vdot)
    if not math.isfinite(delta) or delta <= tol.tol_eq:
        raise ZeroStep(f"recovery step size {delta:.3e} below tolerance")
    q_new = q + delta * mu
    q_new[q_new < 0.0] = 0.0
    return q_new, delta


# ---------------------------------------------------------------------------
# Main loop
# ---------------------------------------------------------------------------


@dataclass
class TraceStep:
    kind: str  # "LocalLP" | "Improvement" | "ZeroFix"
    upper_before: float
    upper_after: float
    min_score: float
    eta: float = 0.0
    delta: float = 0.0
    mu: np.ndarray | None = None


@dataclass
class SolveOutcome:
    q: np.ndarray
    z: np.ndarray
    epsilon: float
    min_score: float
    gap: float
    status: str  # "optimal" | "iteration-limit" | "stalled"
    iterations: int
    farkas: lp.FarkasCertificate | None
    trace: list[TraceStep] = field(default_factory=list)


def solve_view(view: View, tol: TolerancePolicy, q0: np.ndarray | None = None) -> SolveOutcome:
    n = view.n_inputs
    q = np.full(n, 1.0 / n) if q0 is None else np.asarray(q0, dtype=np.float64).copy()
    trace: list[TraceStep] = []
    farkas = None
    status = "iteration-limit"
    stall = 0
    prev_upper = math.inf
    z, logz = optimal_z_view(view, q, tol)
    iterations = 0
    zero_fix_cap = max(8, 2 * n * (view.n_outputs + 2))

    while iterations < tol.max_iter:
        iterations += 1
        z, logz = optimal_z_view(view, q, tol)
        upper = gamma_view(view, q, logz)
        if upper > prev_upper - tol.tol_eq and iterations > 1:
            stall += 1
            if stall > 3:
                status = "stalled"
                break
        else:
            stall = 0
        prev_upper = min(prev_upper, upper)

        q2, val2, improved = local_lp(view, q, z, logz, tol)
        if improved:
            trace.append(
                TraceStep("LocalLP", upper, val2, float(np.min(scores_view(view, logz))))
            )
            q = q2
            continue

        supp = np.nonzero(q > tol.tol_eq)[0]
        zt, lzt, zl, lzl = tighten(view, q, z, logz, supp, tol)
        system = direction_system(view, zt, lzt, zl, lzl, supp)
        sol = lp.solve(lp.build_perturbation_lp(system))

        if sol.status == "unbounded":
            mu = np.zeros(n)
            mu[supp] = sol.ray[: supp.size]
            mu[supp] -= mu[supp].mean()  # re-project exactly onto sum zero
            eta = lp.eta_value(system, mu[supp])
            if eta < -tol.tol_eq:
                try:
                    q, z_new, logz_new, delta = apply_step(view, q, mu, zt, lzt, zl, lzl, tol)
                except ZeroStep:
                    stall += 1
                    if stall > 3:
                        status = "stalled"
                        break
                    continue
                after = gamma_view(view, q, logz_new)
                trace.append(
                    TraceStep(
                        "Improvement",
                        upper,
                        after,
                        float(np.min(scores_view(view, logz_new))),
                        eta=eta,
                        delta=delta,
                        mu=mu,
                    )
                )
                continue
            stall += 1
            if stall > 3:
                status = "stalled"
                break
            continue

        cert = lp.farkas_certificate(system)
        if cert is None:  # racy unbounded/optimal disagreement; treat as stall
            stall += 1
            if stall > 3:
                status = "stalled"
                break
            continue
        farkas = cert

        # Shift z down by the certificate coefficients: support scores collapse
        # onto the common value tau - rate term, which equals gamma.
        z_fix = zt.copy()
        for j, col in enumerate(view.columns):
            if cert.lambda_y[j] > 0.0:
                z_fix[j] = min(max(zt[j] - cert.lambda_y[j] * math.exp(-col.log_size), zl[j]), zt[j])
        logz_fix = _safe_log(z_fix)

        restart = False
        for _ in range(zero_fix_cap):
            sc = scores_view(view, logz_fix)
            eps_val = gamma_view(view, q, logz_fix)
            off = np.ones(n, dtype=bool)
            off[supp] = False
            off_idx = np.nonzero(off)[0]
            if off_idx.size == 0:
                break
            worst = off_idx[int(np.argmin(sc[off_idx]))]
            if sc[worst] >= eps_val - tol.tol_eq:
                break
            before = gamma_view(view, q, logz_fix)
            try:
                z_fix, logz_fix = zero_fix_pass(
                    view, q, z_fix, logz_fix, int(worst), supp, eps_val, float(sc[worst]), tol
                )
            except NoDecomposition as nd:
                if nd.direction is None:
                    restart = True
                    stall += 1
                    break
                try:
                    q, delta = zero_descent_step(view, q, z_fix, nd.direction, tol)
                except ZeroStep:
                    restart = True
                    stall += 1
                    break
                after = gamma_view(view, q, logz_fix)
                trace.append(
                    TraceStep(
                        "ZeroFix",
                        before,
                        after,
                        float(np.min(scores_view(view, logz_fix))),
                        delta=delta,
                        mu=nd.direction,
                    )
                )
                restart = True
                break
            trace.append(
                TraceStep(
                    "ZeroFix",
                    before,
                    gamma_view(view, q, logz_fix),
                    float(np.min(scores_view(view, logz_fix))),
                )
            )
        if restart:
            if stall > 3:
                status = "stalled"
                break
            continue

        z, logz = z_fix, logz_fix
        status = "optimal"
        break

    sc = scores_view(view, logz)
    min_score = float(np.min(sc))
    gap = upper_value(view, q, tol) - min_score
    if status == "optimal" and gap > tol.tol_gap:
        status = "stalled"
    epsilon = min(max(min_score, 0.0), 1.0)
    return SolveOutcome(
        q=q,
        z=z,
        epsilon=epsilon,
        min_score=min_score,
        gap=gap,
        status=status,
        iterations=iterations,
        farkas=farkas,
        trace=trace,
    )
