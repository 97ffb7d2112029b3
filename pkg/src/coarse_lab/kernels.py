"""Kernel backend selection.

The compiled module is used when importable; set ``COARSE_LAB_PURE=1`` to
force the pure-Python fallback. Both backends return identical results.
"""
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if os.environ.get("COARSE_LAB_PURE") != "1":
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels

bfs_bounded = _impl.bfs_bounded
bfs_rows = _impl.bfs_rows
pair_hops = _impl.pair_hops
floyd_warshall = _impl.floyd_warshall
ball_pairs = _impl.ball_pairs

INF = 1 << 61


def backends():
    """Both implementations keyed by name, for benchmarks and cross-checks."""
    out = {"python": _pykernels}
    try:
        from . import _kernels

        out["cython"] = _kernels
    except ImportError:
        pass
    return out
