"""JIT selection layer.

Hot numerical kernels are written twice: a loop-oriented version compiled
with numba's @njit and a vectorized pure-numpy version.  The environment
variable CASPHERE_NUMBA selects between them ("0" forces the numpy path);
the numpy path is also used automatically when numba is not importable.
"""

import os

try:
    import numba
except ImportError:
    numba = None

USE_NUMBA = (numba is not None) and os.environ.get("CASPHERE_NUMBA", "1") != "0"


def maybe_njit(*args, **kwargs):
    """Return numba.njit when enabled, otherwise a do-nothing decorator."""
    if not USE_NUMBA:
        def passthrough(func):
            return func
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return passthrough
    if len(args) == 1 and callable(args[0]) and not kwargs:
        return numba.njit(cache=True)(args[0])
    kwargs.setdefault("cache", True)
    return numba.njit(*args, **kwargs)
