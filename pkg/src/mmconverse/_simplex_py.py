"""Pure-python twin of the compiled simplex pivot kernel.

Both backends run Bland's rule on a dense tableau and must stay bit-identical:
entering column is the first with a reduced cost below ``-tol_entering``,
leaving row is the minimum-ratio row with ties broken by the smallest basis
label, and the row elimination uses plain multiply-subtract (the compiled
twin is built with -ffp-contract=off so no FMA creeps in).
"""

import numpy as np

OPTIMAL = 0
UNBOUNDED = 1
PIVOT_LIMIT = 2


def run_simplex(tab, basis, n_enterable, tol_entering, tol_pivot, max_pivots):
    """Run Bland-rule pivots in place.  Returns (status, entering_col, pivots).

    ``tab`` holds the constraint rows plus a final reduced-cost row; the last
    column is the right-hand side.  ``basis`` maps rows to basic columns.
    """
    m = tab.shape[0] - 1
    rhs = tab.shape[1] - 1
    obj = tab[m]
    pivots = 0
    while pivots < max_pivots:
        neg = np.nonzero(obj[:n_enterable] < -tol_entering)[0]
        if neg.size == 0:
            return OPTIMAL, -1, pivots
        j = int(neg[0])
        col = tab[:m, j]
        elig = np.nonzero(col > tol_pivot)[0]
        if elig.size == 0:
            return UNBOUNDED, j, pivots
        ratios = tab[elig, rhs] / col[elig]
        rmin = ratios.min()
        ties = elig[ratios == rmin]
        r = int(ties[0]) if ties.size == 1 else int(ties[np.argmin(basis[ties])])
        tab[r] /= tab[r, j]
        colv = tab[:, j].copy()
        colv[r] = 0.0
        nz = np.nonzero(colv != 0.0)[0]
        if nz.size:
            tab[nz] -= np.outer(colv[nz], tab[r])
        tab[:, j] = 0.0
        tab[r, j] = 1.0
        basis[r] = j
        pivots += 1
    return PIVOT_LIMIT, -1, pivots
