"""JIT toggle for the hot kernels.

Set ``CITEMETRICS_DISABLE_JIT=1`` to force the pure-numpy fallback path.
Kernels are selected per call through ``resolve_backend``.
"""
import os

try:
    import numba
    from numba import njit, prange
    HAS_NUMBA = True
    # skip probing an outdated system TBB; OpenMP or workqueue are fine
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func
        return wrap

    prange = range


def _env_disabled():
    return os.environ.get("CITEMETRICS_DISABLE_JIT", "").strip().lower() in ("1", "true", "yes", "on")


BACKENDS = ("numba", "numpy")


def default_backend():
    if HAS_NUMBA and not _env_disabled():
        return "numba"
    return "numpy"


def resolve_backend(backend=None):
    if backend is None:
        return default_backend()
    if backend not in BACKENDS:
        raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
    if backend == "numba" and not HAS_NUMBA:
        raise RuntimeError("numba backend requested but numba is not importable")
    return backend


def set_threads(n):
    """Cap the numba worker pool. Results never depend on ``n``."""
    if not HAS_NUMBA or n is None:
        return
    n = max(1, min(int(n), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(n)


JIT_OPTS = dict(cache=True, nogil=True)
PARALLEL_OPTS = dict(cache=True, nogil=True, parallel=True)
