"""Backend selection for the mixture-evaluation kernel.

The compiled MPFR kernel is used when it was built; otherwise, or when the
environment variable ``CGQF_PURE_PYTHON`` is set to a non-empty value, the
gmpy2 implementation is used. Both produce identical results.
"""

import os

from . import _kernel_py

if os.environ.get("CGQF_PURE_PYTHON"):
    MixtureKernel = _kernel_py.MixtureKernel
    BACKEND = "python"
else:
    try:
        from ._kernel import MixtureKernel
        BACKEND = "compiled"
    except ImportError:
        MixtureKernel = _kernel_py.MixtureKernel
        BACKEND = "python"

PythonMixtureKernel = _kernel_py.MixtureKernel

__all__ = ["BACKEND", "MixtureKernel", "PythonMixtureKernel"]
