"""Independent brute-force references for validation.

beta_lp_oracle solves the hypothesis-testing problem directly as an LP over
randomized tests; maxmin_lp computes the whole saddle value as a single
max-min LP; grid_saddle_check scans a simplex grid of input distributions.
The saddle solver must agree with all of them.
"""

from __future__ import annotations

import itertools

import numpy as np

from . import lp
from .channel import (
    DEFAULT_TOL,
    Channel,
    DimensionMismatch,
    RatePoint,
    TolerancePolicy,
    TooLarge,
    ZVector,
    as_prob,
    as_rate,
)
from .gamma import max_over_z


def beta_lp_oracle(p, q, alpha: float, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """minimize sum_w Q(w) t_w  s.t.  sum_w P(w) t_w >= alpha, 0 <= t_w <= 1."""
    pv = as_prob(p, tol).p
    qv = as_prob(q, tol).p
    if pv.shape != qv.shape:
        raise DimensionMismatch("P and Q must share one finite alphabet")
    n = pv.shape[0]
    problem = lp.LpProblem(
        objective=qv,
        rows=[(pv, lp.GE, float(alpha))],
        bounds=[(0.0, 1.0)] * n,
    )
    sol = lp.solve(problem)
    if sol.status != "optimal":
        raise lp.NumericalFailure(f"beta LP status {sol.status}")
    return float(sol.objective_value)


def maxmin_lp(w: Channel, r, max_cells: int = 4096) -> tuple[float, ZVector]:
    """Exact saddle value as one LP:

        maximize t
        s.t. for all x:  t <= sum_y m_{x,y} - e^{-R} sum_y z_y
             m_{x,y} <= W(y|x),   m_{x,y} <= z_y,   0 <= z_y <= 1,  m free below.
    """
    r = as_rate(r)
    nx, ny = w.nx, w.ny
    if nx * ny > max_cells:
        raise TooLarge(f"{nx}x{ny} channel exceeds the LP size guard")
    # Variable layout: [t, z_0..z_{ny-1}, m_00, m_01, ..., m_{nx-1,ny-1}]
    nvar = 1 + ny + nx * ny
    mpos = lambda x, y: 1 + ny + x * ny + y

    def row(entries):
        a = np.zeros(nvar)
        for i, val in entries:
            a[i] = val
        return a

    rows = []
    thr = r.threshold
    for x in range(nx):
        entries = [(0, 1.0)] + [(1 + y, thr) for y in range(ny)]
        entries += [(mpos(x, y), -1.0) for y in range(ny)]
        rows.append((row(entries), lp.LE, 0.0))
    for x in range(nx):
        for y in range(ny):
            rows.append((row([(mpos(x, y), 1.0)]), lp.LE, float(w.w[x, y])))
            rows.append((row([(mpos(x, y), 1.0), (1 + y, -1.0)]), lp.LE, 0.0))
    obj = np.zeros(nvar)
    obj[0] = -1.0  # maximize t
    bounds = [(None, None)] + [(0.0, 1.0)] * ny + [(None, None)] * (nx * ny)
    sol = lp.solve(lp.LpProblem(objective=obj, rows=rows, bounds=bounds))
    if sol.status != "optimal":
        raise lp.NumericalFailure(f"maxmin LP status {sol.status}")
    z = np.clip(sol.primal[1 : 1 + ny], 0.0, 1.0)
    return -float(sol.objective_value), ZVector(z)


def grid_saddle_check(w: Channel, r, grid_steps: int, tol: TolerancePolicy = DEFAULT_TOL) -> float:
    """min over a simplex grid of input distributions of the inner maximum.

    Upper-bounds the saddle value; converges to it as the grid refines.
    Limited to at most three inputs.
    """
    if w.nx > 3:
        raise TooLarge("grid search is limited to channels with at most 3 inputs")
    r = as_rate(r)
    best = np.inf
    g = int(grid_steps)
    if g < 1:
        raise ValueError("grid_steps must be >= 1")
    if w.nx == 1:
        combos = [(g,)]
    elif w.nx == 2:
        combos = [(i, g - i) for i in range(g + 1)]
    else:
        combos = [(i, j, g - i - j) for i in range(g + 1) for j in range(g + 1 - i)]
    for counts in combos:
        q = np.array(counts, dtype=np.float64) / g
        val, _ = max_over_z(q, w, r, tol)
        best = min(best, val)
    return float(best)
