"""Backend selection for the modular-arithmetic kernels.

The compiled GMP extension is used when it imports; set
``SECUREHULL_PURE_PYTHON=1`` to force the pure-Python fallback.
"""

import os

if os.environ.get("SECUREHULL_PURE_PYTHON") == "1":
    from ._purekernels import BACKEND, FixedBaseTable, powmod, powmod_many
else:
    try:
        from ._kernels import BACKEND, FixedBaseTable, powmod, powmod_many
    except ImportError:  # extension not built
        from ._purekernels import BACKEND, FixedBaseTable, powmod, powmod_many

__all__ = ["BACKEND", "FixedBaseTable", "powmod", "powmod_many"]
