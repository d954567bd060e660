# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled simplex pivot kernel; mirrors _simplex_py.run_simplex exactly.

Bit-identity with the numpy fallback relies on building with
-ffp-contract=off (see setup.py) so the multiply-subtract in the row
elimination is not fused.
"""

OPTIMAL = 0
UNBOUNDED = 1
PIVOT_LIMIT = 2


def run_simplex(double[:, ::1] tab, long[::1] basis, Py_ssize_t n_enterable,
                double tol_entering, double tol_pivot, long max_pivots):
    """Run Bland-rule pivots in place.  Returns (status, entering_col, pivots)."""
    cdef Py_ssize_t m = tab.shape[0] - 1
    cdef Py_ssize_t ncols = tab.shape[1]
    cdef Py_ssize_t rhs = ncols - 1
    cdef long pivots = 0
    cdef Py_ssize_t i, jj, j, r
    cdef double ratio, best_ratio, piv, f
    cdef long best_label
    cdef bint found

    while pivots < max_pivots:
        j = -1
        for jj in range(n_enterable):
            if tab[m, jj] < -tol_entering:
                j = jj
                break
        if j < 0:
            return OPTIMAL, -1, pivots

        r = -1
        best_ratio = 0.0
        best_label = 0
        found = False
        for i in range(m):
            if tab[i, j] > tol_pivot:
                ratio = tab[i, rhs] / tab[i, j]
                if (not found) or ratio < best_ratio or (ratio == best_ratio and basis[i] < best_label):
                    r = i
                    best_ratio = ratio
                    best_label = basis[i]
                    found = True
        if not found:
            return UNBOUNDED, j, pivots

        piv = tab[r, j]
        for jj in range(ncols):
            tab[r, jj] /= piv
        for i in range(m + 1):
            if i == r:
                continue
            f = tab[i, j]
            if f != 0.0:
                for jj in range(ncols):
                    tab[i, jj] -= f * tab[r, jj]
        for i in range(m + 1):
            tab[i, j] = 0.0
        tab[r, j] = 1.0
        basis[r] = j
        pivots += 1
    return PIVOT_LIMIT, -1, pivots
