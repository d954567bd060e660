"""Backend selection for the simplex pivot kernel.

The compiled extension is preferred when present; the numpy fallback is used
otherwise.  Set ``MMCONVERSE_PURE_PYTHON=1`` to force the fallback (useful for
the backend-parity tests and the benchmark).
"""

import os

from . import _simplex_py

OPTIMAL = _simplex_py.OPTIMAL
UNBOUNDED = _simplex_py.UNBOUNDED
PIVOT_LIMIT = _simplex_py.PIVOT_LIMIT

if os.environ.get("MMCONVERSE_PURE_PYTHON") == "1":
    BACKEND = "python"
    run_simplex = _simplex_py.run_simplex
else:
    try:
        from . import _simplex_cy

        BACKEND = "compiled"
        run_simplex = _simplex_cy.run_simplex
    except ImportError:
        BACKEND = "python"
        run_simplex = _simplex_py.run_simplex
