"""Kernel backend selection.

The compiled extension is preferred when importable; set ``HOMSPACE_PURE=1``
to force the pure-Python kernel. ``benchmarks/bench_kernels.py`` compares the
two backends.
"""

import os

if os.environ.get("HOMSPACE_PURE"):
    from . import _pure as _impl
else:
    try:
        from . import _cliquer as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _pure as _impl

BACKEND: str = _impl.BACKEND
max_clique = _impl.max_clique
