"""Numeric backend selection for the hot kernels.

The dynamics integrator dominates the runtime of every trial, so the
kernels in ``_kernels`` are compiled with numba when it is available.
Set ``AUVSIM_BACKEND=numpy`` to force the pure-numpy fallback (used by
``benchmarks/bench_backends.py`` to compare the two paths), or
``AUVSIM_BACKEND=numba`` to fail loudly if numba cannot be imported.
"""

import os

_choice = os.environ.get("AUVSIM_BACKEND", "auto").lower()
if _choice not in ("auto", "numba", "numpy"):
    raise ValueError(
        "AUVSIM_BACKEND must be 'auto', 'numba' or 'numpy', got %r" % _choice
    )

NUMBA_ENABLED = False
if _choice != "numpy":
    try:
        from numba import njit as _njit

        NUMBA_ENABLED = True
    except ImportError:
        if _choice == "numba":
            raise


if NUMBA_ENABLED:

    def jit(func):
        return _njit(cache=True)(func)

else:

    def jit(func):
        return func
