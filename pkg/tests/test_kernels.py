import os
import subprocess
import sys

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from cgqf import kernels
from cgqf.distribution import ClosedFormDistribution
from cgqf.kernels import MixtureKernel, PythonMixtureKernel
from cgqf.reduction import SpectralForm


def test_compiled_backend_is_built():
    # the editable install builds the extension; the fallback is tested below
    assert kernels.BACKEND == "compiled"


def test_env_var_forces_python_backend():
    env = dict(os.environ, CGQF_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import cgqf.kernels as k; print(k.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 3, 20]))
def test_backends_are_bit_identical(seed, m):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(1, 4))
    sf = SpectralForm(rng.uniform(0.3, 2.0, n) * rng.choice([-1, 1], n), rng.uniform(0, 5, n))
    d = ClosedFormDistribution.from_spectral(sf, m, 256)
    x = rng.uniform(-20, 40, 64)
    for idx, offset in ((1, 0.0), (2, 1.0)):
        groups = [(g[0], g[idx]) for g in d.groups]
        va, ma = MixtureKernel(groups, 256, offset).evaluate(x)
        vb, mb = PythonMixtureKernel(groups, 256, offset).evaluate(x)
        assert np.array_equal(va, vb)
        np.testing.assert_allclose(ma, mb, atol=1e-9)


def test_unit_exponential_kernel():
    d = ClosedFormDistribution.from_spectral(SpectralForm([1.0], [0.0]), 1)
    x = np.array([0.0, 0.5, 3.0])
    for cls in (MixtureKernel, PythonMixtureKernel):
        v, _ = cls([(d.groups[0][0], d.groups[0][2])], 512, 1.0).evaluate(x)
        np.testing.assert_allclose(v, -np.expm1(-x), rtol=1e-15, atol=1e-300)
