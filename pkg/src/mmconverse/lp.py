"""Dense two-phase simplex for small LPs, with duals and Farkas certificates.

The solver is deliberately self-contained: Bland's anti-cycling rule
throughout (the saddle instances are degenerate by construction), dense
tableau, deterministic column layout.  Duals follow the convention

    minimize c'x,  row k:  a_k'x {>=,<=,=} b_k   -->   c = sum_k y_k a_k + reduced costs

so ``>=`` rows get y_k >= 0, ``<=`` rows y_k <= 0 and equalities are free.
On unbounded problems the extreme-ray direction is returned, normalized to
max-norm 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channel import DimensionMismatch

GE = ">="
LE = "<="
EQ = "="

_RELATIONS = (GE, LE, EQ)

_TOL_ENTER = 1e-11
_TOL_PIVOT = 1e-11
_FEAS_TOL = 1e-8


class NumericalFailure(RuntimeError):
    """The pivot budget was exhausted; with Bland's rule this signals a bug."""


@dataclass
class LpProblem:
    """minimize objective . x subject to rows and per-variable bounds.

    rows: list of (coefficients, relation, rhs) with relation in {>=, <=, =}.
    bounds: per-variable (lower, upper); None means unbounded on that side.
            Defaults to (0, None) for every variable.
    """

    objective: np.ndarray
    rows: list
    bounds: list | None = None

    def __post_init__(self):
        self.objective = np.asarray(self.objective, dtype=np.float64)
        n = self.objective.shape[0]
        norm_rows = []
        for a, rel, rhs in self.rows:
            a = np.asarray(a, dtype=np.float64)
            if a.shape != (n,):
                raise DimensionMismatch("constraint row length does not match objective")
            if rel not in _RELATIONS:
                raise ValueError(f"unknown relation {rel!r}")
            if not np.all(np.isfinite(a)) or not np.isfinite(rhs):
                raise ValueError("constraint coefficients must be finite")
            norm_rows.append((a, rel, float(rhs)))
        self.rows = norm_rows
        if self.bounds is None:
            self.bounds = [(0.0, None)] * n
        if len(self.bounds) != n:
            raise DimensionMismatch("bounds length does not match objective")

    @property
    def n_vars(self) -> int:
        return self.objective.shape[0]


@dataclass
class LpSolution:
    status: str  # "optimal" | "unbounded" | "infeasible"
    primal: np.ndarray | None = None
    objective_value: float | None = None
    dual: np.ndarray | None = None
    ray: np.ndarray | None = None
    pivots: int = 0


def _max_pivots(m: int, n: int) -> int:
    return 20000 + 400 * (m + n)


def solve(problem: LpProblem) -> LpSolution:
    """Solve a small dense LP.  Deterministic: fixed layout, Bland pivots."""
    n = problem.n_vars
    c = problem.objective

    # Variable transform: shift finite lower bounds to 0, split free variables.
    # cols: list of (orig_var, sign); shifts: per original var.
    cols: list[tuple[int, float]] = []
    shifts = np.zeros(n)
    for j, (lo, hi) in enumerate(problem.bounds):
        if lo is not None and hi is not None and hi < lo:
            return LpSolution(status="infeasible")
        if lo is None:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
        else:
            shifts[j] = lo
            cols.append((j, 1.0))
    nt = len(cols)

    ct = np.zeros(nt)
    for k, (j, sign) in enumerate(cols):
        ct[k] = c[j] * sign

    # Rows: the original constraints first, then upper-bound rows.
    rows_t = []  # (coeffs over transformed cols, relation, rhs)
    kinds = []  # "orig" | "ub"
    for a, rel, rhs in problem.rows:
        at = np.zeros(nt)
        for k, (j, sign) in enumerate(cols):
            at[k] = a[j] * sign
        rows_t.append((at, rel, rhs - float(a @ shifts)))
        kinds.append("orig")
    for j, (lo, hi) in enumerate(problem.bounds):
        if hi is None:
            continue
        at = np.zeros(nt)
        for k, (jj, sign) in enumerate(cols):
            if jj == j:
                at[k] = sign
        rows_t.append((at, LE, hi - shifts[j]))
        kinds.append("ub")

    m = len(rows_t)
    scales = np.ones(m)
    flips = np.zeros(m, dtype=bool)
    A = np.zeros((m, nt))
    b = np.zeros(m)
    rels = []
    for i, (at, rel, rhs) in enumerate(rows_t):
        s = np.max(np.abs(at)) if at.size else 0.0
        if s > 0.0:
            at = at / s
            rhs = rhs / s
            scales[i] = s
        if rhs < 0.0:
            at = -at
            rhs = -rhs
            flips[i] = True
            rel = {GE: LE, LE: GE, EQ: EQ}[rel]
        A[i] = at
        b[i] = rhs
        rels.append(rel)

    # Column layout: structural, slack/surplus, artificials (last).
    slack_col = np.full(m, -1, dtype=np.int64)
    art_col = np.full(m, -1, dtype=np.int64)
    n_slack = sum(1 for rel in rels if rel != EQ)
    n_art = sum(1 for rel in rels if rel != LE)
    ncols = nt + n_slack + n_art
    tab = np.zeros((m + 1, ncols + 1))
    tab[:m, :nt] = A
    tab[:m, ncols] = b
    pos = nt
    for i, rel in enumerate(rels):
        if rel != EQ:
            slack_col[i] = pos
            tab[i, pos] = 1.0 if rel == LE else -1.0
            pos += 1
    first_art = pos
    for i, rel in enumerate(rels):
        if rel != LE:
            art_col[i] = pos
            tab[i, pos] = 1.0
            pos += 1

    basis = np.empty(m, dtype=np.int64)
    for i, rel in enumerate(rels):
        basis[i] = slack_col[i] if rel == LE else art_col[i]

    total_pivots = 0
    budget = _max_pivots(m, ncols)

    if n_art:
        c1 = np.zeros(ncols)
        c1[first_art:] = 1.0
        _price_out(tab, basis, c1)
        status, _, piv = kernels.run_simplex(tab, basis, ncols, _TOL_ENTER, _TOL_PIVOT, budget)
        total_pivots += piv
        if status == kernels.PIVOT_LIMIT:
            raise NumericalFailure("phase-1 pivot budget exhausted")
        if -tab[m, ncols] > _FEAS_TOL:
            return LpSolution(status="infeasible", pivots=total_pivots)
        _drive_out_artificials(tab, basis, first_art)

    c2 = np.zeros(ncols)
    c2[:nt] = ct
    _price_out(tab, basis, c2)
    status, enter_j, piv = kernels.run_simplex(
        tab, basis, first_art, _TOL_ENTER, _TOL_PIVOT, budget
    )
    total_pivots += piv
    if status == kernels.PIVOT_LIMIT:
        raise NumericalFailure("phase-2 pivot budget exhausted")

    if status == kernels.UNBOUNDED:
        d = np.zeros(ncols)
        d[enter_j] = 1.0
        for i in range(m):
            d[basis[i]] = -tab[i, enter_j]
        ray = np.zeros(n)
        for k, (j, sign) in enumerate(cols):
            ray[j] += sign * d[k]
        norm = np.max(np.abs(ray))
        if norm > 0.0:
            ray = ray / norm
        return LpSolution(status="unbounded", ray=ray, pivots=total_pivots)

    xt = np.zeros(ncols)
    xt[basis] = tab[:m, ncols]
    x = shifts.copy()
    for k, (j, sign) in enumerate(cols):
        x[j] += sign * xt[k]

    obj_row = tab[m]
    dual = np.zeros(len(problem.rows))
    for i in range(m):
        if rels[i] == LE:
            y = -obj_row[slack_col[i]]
        elif rels[i] == GE:
            y = obj_row[slack_col[i]]
        else:
            y = -obj_row[art_col[i]]
        if flips[i]:
            y = -y
        y /= scales[i]
        if kinds[i] == "orig":
            dual[i] = y

    return LpSolution(
        status="optimal",
        primal=x,
        objective_value=float(c @ x),
        dual=dual,
        pivots=total_pivots,
    )


def _price_out(tab: np.ndarray, basis: np.ndarray, costs: np.ndarray) -> None:
    m = tab.shape[0] - 1
    tab[m, :-1] = costs
    tab[m, -1] = 0.0
    cb = costs[basis]
    nz = np.nonzero(cb != 0.0)[0]
    for i in nz:
        tab[m] -= cb[i] * tab[i]


def _drive_out_artificials(tab: np.ndarray, basis: np.ndarray, first_art: int) -> None:
    """Pivot zero-valued basic artificials onto structural columns when possible."""
    m = tab.shape[0] - 1
    for i in range(m):
        if basis[i] < first_art:
            continue
        row = tab[i, :first_art]
        cand = np.nonzero(np.abs(row) > _TOL_PIVOT)[0]
        if cand.size == 0:
            continue  # redundant row; artificial stays basic at zero
        j = int(cand[0])
        tab[i] /= tab[i, j]
        colv = tab[:, j].copy()
        colv[i] = 0.0
        nz = np.nonzero(colv != 0.0)[0]
        if nz.size:
            tab[nz] -= np.outer(colv[nz], tab[i])
        tab[:, j] = 0.0
        tab[i, j] = 1.0
        basis[i] = j


def verify_solution(problem: LpProblem, sol: LpSolution, tol: float = 1e-7) -> dict:
    """Residuals for KKT-style checks; used by the test suite."""
    out = {"feasibility": 0.0, "complementarity": 0.0, "duality_gap": 0.0}
    if sol.status != "optimal":
        return out
    x = sol.primal
    feas = 0.0
    comp = 0.0
    for (a, rel, rhs), y in zip(problem.rows, sol.dual):
        slack = float(a @ x) - rhs
        if rel == GE:
            feas = max(feas, -slack)
        elif rel == LE:
            feas = max(feas, slack)
        else:
            feas = max(feas, abs(slack))
        comp = max(comp, abs(y * slack))
    for xi, (lo, hi) in zip(x, problem.bounds):
        if lo is not None:
            feas = max(feas, lo - xi)
        if hi is not None:
            feas = max(feas, xi - hi)
    out["feasibility"] = feas
    out["complementarity"] = comp
    # Lagrangian stationarity restricted to strictly interior coordinates.
    g = problem.objective.copy()
    for (a, _rel, _rhs), y in zip(problem.rows, sol.dual):
        g = g - y * a
    interior = np.ones(problem.n_vars, dtype=bool)
    for j, (lo, hi) in enumerate(problem.bounds):
        if lo is not None and x[j] <= lo + tol:
            interior[j] = False
        if hi is not None and x[j] >= hi - tol:
            interior[j] = False
    out["stationarity"] = float(np.max(np.abs(g[interior]))) if interior.any() else 0.0
    return out


# ---------------------------------------------------------------------------
# Perturbation LP and generalized Farkas certificates
# ---------------------------------------------------------------------------


@dataclass
class FarkasSystem:
    """Data (b, a_y, alpha_y) of the directional-improvement problem.

    b is the per-input target vector, a_y are per-output coefficient vectors
    (0/1 indicators for plain channels, set-mass coefficients in [0, 1] for
    type-reduced problems) and alpha_y >= 0 are the switch weights.
    """

    b: np.ndarray
    a: list[np.ndarray]
    alpha: np.ndarray

    def __post_init__(self):
        self.b = np.asarray(self.b, dtype=np.float64)
        self.a = [np.asarray(v, dtype=np.float64) for v in self.a]
        self.alpha = np.asarray(self.alpha, dtype=np.float64)
        n = self.b.shape[0]
        for v in self.a:
            if v.shape != (n,):
                raise DimensionMismatch("indicator vector length mismatch")
            if np.any(v < -1e-12) or np.any(v > 1.0 + 1e-12):
                raise ValueError("indicator coefficients must lie in [0, 1]")
        if len(self.a) != self.alpha.shape[0]:
            raise DimensionMismatch("alpha length mismatch")
        if np.any(self.alpha < -1e-12):
            raise ValueError("alpha weights must be nonnegative")

    @property
    def n_inputs(self) -> int:
        return self.b.shape[0]

    @property
    def n_outputs(self) -> int:
        return len(self.a)


@dataclass(frozen=True)
class FarkasCertificate:
    """Coefficients proving b = sum_y lambda_y a_y + tau 1 with 0 <= lambda <= alpha."""

    lambda_y: np.ndarray
    tau: float

    def reconstruct(self, system: FarkasSystem) -> np.ndarray:
        out = np.full(system.n_inputs, self.tau)
        for lam, a in zip(self.lambda_y, system.a):
            out += lam * a
        return out


def eta_value(system: FarkasSystem, mu: np.ndarray) -> float:
    """Directional score change eta(mu) = mu.(b - sum_y alpha_y a_y 1{mu.a_y < 0})."""
    mu = np.asarray(mu, dtype=np.float64)
    val = float(mu @ system.b)
    for a, al in zip(system.a, system.alpha):
        dot = float(mu @ a)
        if dot < 0.0:
            val -= al * dot
    return val


def build_perturbation_lp(system: FarkasSystem) -> LpProblem:
    """LP whose minimum is 0 iff no zero-sum direction improves the score.

    Variables (mu, s): minimize mu.b + s.alpha subject to mu.a_y + s_y >= 0,
    s >= 0, mu.1 = 0, mu free.  Minimizing equals minimizing eta(mu) with
    s_y = max(0, -mu.a_y).
    """
    n, m = system.n_inputs, system.n_outputs
    nv = n + m
    obj = np.concatenate([system.b, system.alpha])
    rows = []
    for k, a in enumerate(system.a):
        coeff = np.zeros(nv)
        coeff[:n] = a
        coeff[n + k] = 1.0
        rows.append((coeff, GE, 0.0))
    ones = np.zeros(nv)
    ones[:n] = 1.0
    rows.append((ones, EQ, 0.0))
    bounds = [(None, None)] * n + [(0.0, None)] * m
    return LpProblem(objective=obj, rows=rows, bounds=bounds)


def farkas_certificate(system: FarkasSystem, tol: float = 1e-9) -> FarkasCertificate | None:
    """Extract (lambda_y, tau) from the perturbation LP duals, or None.

    None means the LP is unbounded below: an improving direction exists and no
    certificate can exist.
    """
    sol = solve(build_perturbation_lp(system))
    if sol.status == "unbounded":
        return None
    if sol.status != "optimal":
        raise NumericalFailure(f"perturbation LP ended with status {sol.status}")
    lam = np.clip(sol.dual[: system.n_outputs], 0.0, np.maximum(system.alpha, 0.0))
    tau = float(sol.dual[system.n_outputs])
    cert = FarkasCertificate(lambda_y=lam, tau=tau)
    resid = np.max(np.abs(cert.reconstruct(system) - system.b)) if system.n_inputs else 0.0
    if resid > tol:
        raise NumericalFailure(f"Farkas identity residual {resid:.3e} exceeds {tol:.1e}")
    return cert
