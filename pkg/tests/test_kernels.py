import os
import subprocess
import sys

import numpy as np
import pytest

from tanlift import _kernels
from tanlift import bundle as TB
from tanlift import connections as C
from tanlift import metrics as M

from conftest import family_specs, points_for

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "benchmarks"))
from bench_kernels import kernel_inputs  # noqa: E402

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


@needs_numba
@pytest.mark.parametrize("n", [2, 3, 4])
def test_backends_agree_on_random_inputs(n):
    rng = np.random.default_rng(n)
    for name, args in kernel_inputs(n, rng).items():
        a = _kernels.NUMPY_KERNELS[name](*args)
        b = _kernels.NUMBA_KERNELS[name](*args)
        assert np.allclose(a, b, rtol=1e-12, atol=1e-12), name


@needs_numba
def test_backends_agree_on_oracle_output():
    spec = family_specs(3)[3]
    u = points_for(spec, 1)[0]
    out = {}
    for name in ("numpy", "numba"):
        with _kernels.backend(name):
            assert _kernels.BACKEND == name
            lf = TB.local_frame(spec, u)
            out[name] = (C.koszul_from_frame(lf, M.hJ_field), lf.base.K,
                         M.exterior_from_frame(lf, M.omega_field("hQ")))
    for a, b in zip(out["numpy"], out["numba"]):
        assert np.abs(a - b).max() <= 1e-12


def test_backend_context_restores_previous():
    before = _kernels.BACKEND
    with _kernels.backend("numpy"):
        assert _kernels.BACKEND == "numpy"
    assert _kernels.BACKEND == before
    with pytest.raises(ValueError):
        _kernels.use_backend("fortran")


@pytest.mark.parametrize("flag, expected", [("0", "numpy"), ("off", "numpy"), ("1", None)])
def test_environment_flag_selects_backend(flag, expected):
    env = dict(os.environ, TANLIFT_NUMBA=flag)
    out = subprocess.run(
        [sys.executable, "-c", "from tanlift import _kernels; print(_kernels.BACKEND)"],
        env=env, capture_output=True, text=True, check=True,
    ).stdout.strip()
    assert out == (expected or ("numba" if _kernels.HAVE_NUMBA else "numpy"))
