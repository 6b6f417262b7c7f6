"""The two kernel paths (jitted and pure Python) must agree bit for bit."""

import os
import subprocess
import sys

import numpy as np
import pytest

from issueforecast import kernels
from issueforecast.kernels import (
    acf_kernel,
    adf_ols_kernel,
    ar_recursion_kernel,
    boxcox_llf_kernel,
    lag_ols_kernel,
    pure,
)

LAMBDAS = np.array([(k - 20) / 10.0 for k in range(41)])


def _random_series(seed: int, n: int = 40) -> np.ndarray:
    return np.random.default_rng(seed).normal(8.0, 3.0, size=n)


@pytest.mark.parametrize("seed", range(20))
def test_acf_kernel_paths_bit_identical(seed):
    y = _random_series(seed)
    assert np.array_equal(acf_kernel(y, 10), pure(acf_kernel)(y, 10))


@pytest.mark.parametrize("seed", range(20))
def test_boxcox_kernel_paths_bit_identical(seed):
    x = np.abs(_random_series(seed)) + 0.5
    assert np.array_equal(boxcox_llf_kernel(x, LAMBDAS), pure(boxcox_llf_kernel)(x, LAMBDAS))


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("p", [0, 1, 3])
def test_lag_ols_kernel_paths_bit_identical(seed, p):
    w = _random_series(seed)
    c1, s1, ok1 = lag_ols_kernel(w, p)
    c2, s2, ok2 = pure(lag_ols_kernel)(w, p)
    assert np.array_equal(c1, c2) and s1 == s2 and ok1 == ok2


@pytest.mark.parametrize("seed", range(20))
@pytest.mark.parametrize("lags", [0, 1, 2])
def test_adf_kernel_paths_bit_identical(seed, lags):
    y = np.cumsum(_random_series(seed, 60))
    out1 = adf_ols_kernel(y, lags)
    out2 = pure(adf_ols_kernel)(y, lags)
    assert out1 == out2


@pytest.mark.parametrize("seed", range(10))
def test_recursion_kernel_paths_bit_identical(seed):
    rng = np.random.default_rng(seed)
    phi = rng.uniform(-0.9, 0.9, size=3)
    seed_vals = rng.normal(size=3)
    out1 = ar_recursion_kernel(phi, 0.7, seed_vals, 8)
    out2 = pure(ar_recursion_kernel)(phi, 0.7, seed_vals, 8)
    assert np.array_equal(out1, out2)


def test_singular_designs_flagged_on_both_paths():
    const = np.full(20, 4.0)
    for fn in (lag_ols_kernel, pure(lag_ols_kernel)):
        _, _, ok = fn(const, 1)
        assert not ok
    for fn in (adf_ols_kernel, pure(adf_ols_kernel)):
        *_, ok = fn(const, 1)
        assert not ok


def test_env_flag_disables_numba():
    code = (
        "from issueforecast import kernels; "
        "print(kernels.NUMBA_ENABLED, hasattr(kernels.acf_kernel, 'py_func'))"
    )
    env = dict(os.environ, ISSUEFORECAST_DISABLE_NUMBA="1")
    out = subprocess.run(
        [sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True
    )
    assert out.stdout.split() == ["False", "False"]


def test_env_flag_pure_path_matches_default_path(tmp_path):
    y = _random_series(123, 50)
    np.save(tmp_path / "y.npy", y)
    code = (
        "import numpy as np; from issueforecast.kernels import acf_kernel, adf_ols_kernel; "
        f"y = np.load(r'{tmp_path / 'y.npy'}'); "
        f"np.save(r'{tmp_path / 'acf.npy'}', acf_kernel(y, 8)); "
        f"np.save(r'{tmp_path / 'adf.npy'}', np.array(adf_ols_kernel(y, 1), dtype=np.float64))"
    )
    env = dict(os.environ, ISSUEFORECAST_DISABLE_NUMBA="1")
    subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, check=True)
    assert np.array_equal(np.load(tmp_path / "acf.npy"), acf_kernel(y, 8))
    here = np.array(adf_ols_kernel(y, 1), dtype=np.float64)
    assert np.array_equal(np.load(tmp_path / "adf.npy"), here)


def test_warmup_idempotent():
    kernels.warmup()
    kernels.warmup()
