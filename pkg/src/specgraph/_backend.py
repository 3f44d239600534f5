"""Select the compiled kernels when available, else the pure-Python ones.

Set ``SPECGRAPH_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _pykernels

python_kernels = _pykernels

if os.environ.get("SPECGRAPH_PURE_PYTHON", "") not in ("", "0"):
    kernels = _pykernels
    compiled_kernels = None
else:
    try:
        from . import _ckernels as compiled_kernels
    except ImportError:  # extension not built
        compiled_kernels = None
    kernels = compiled_kernels if compiled_kernels is not None else _pykernels

BACKEND = "cython" if kernels is not _pykernels else "python"
