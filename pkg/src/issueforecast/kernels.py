"""Hot numeric kernels with a numba/pure-Python dual path.

Every kernel below is written as an explicit scalar loop so that the
numba-compiled version and the undecorated fallback execute the exact same
sequence of IEEE-754 operations: outputs are bit-identical on both paths.
That property is what lets the golden-file tests pass regardless of whether
numba is installed or disabled.

Set ``ISSUEFORECAST_DISABLE_NUMBA=1`` before import to force the pure path
(``benchmarks/bench_kernels.py`` compares both). When numba is active the
original Python function of each kernel remains reachable via ``.py_func``.
"""

import math
import os

import numpy as np

_ENV_FLAG = "ISSUEFORECAST_DISABLE_NUMBA"


def _numba_requested() -> bool:
    return os.environ.get(_ENV_FLAG, "").strip().lower() not in {"1", "true", "yes", "on"}


NUMBA_ENABLED = False
if _numba_requested():
    try:
        from numba import njit

        NUMBA_ENABLED = True
    except ImportError:
        pass

if not NUMBA_ENABLED:

    def njit(*args, **kwargs):
        if args and callable(args[0]):
            return args[0]

        def wrap(fn):
            return fn

        return wrap


# Pivot smaller than this times the matrix scale marks the design singular.
_PIVOT_RTOL = 1e-10


@njit(cache=True)
def acf_kernel(y, max_lag):
    """Sample autocorrelations r_0..r_max_lag with full-sample denominator.

    Caller guarantees nonzero variance and len(y) >= max_lag + 2.
    """
    n = y.shape[0]
    mean = 0.0
    for i in range(n):
        mean += y[i]
    mean /= n
    denom = 0.0
    for i in range(n):
        d = y[i] - mean
        denom += d * d
    r = np.empty(max_lag + 1)
    r[0] = 1.0
    for k in range(1, max_lag + 1):
        num = 0.0
        for t in range(n - k):
            num += (y[t] - mean) * (y[t + k] - mean)
        r[k] = num / denom
    return r


@njit(cache=True)
def boxcox_llf_kernel(x, lambdas):
    """Profile log-likelihood of the power transform at each candidate exponent.

    x must be strictly positive (shift already applied). A candidate whose
    transformed variance collapses to zero scores -inf.
    """
    n = x.shape[0]
    sum_log = 0.0
    for i in range(n):
        sum_log += math.log(x[i])
    out = np.empty(lambdas.shape[0])
    y = np.empty(n)
    for j in range(lambdas.shape[0]):
        lam = lambdas[j]
        if lam == 0.0:
            for i in range(n):
                y[i] = math.log(x[i])
        else:
            for i in range(n):
                y[i] = (x[i] ** lam - 1.0) / lam
        m = 0.0
        for i in range(n):
            m += y[i]
        m /= n
        var = 0.0
        for i in range(n):
            d = y[i] - m
            var += d * d
        var /= n
        if var <= 0.0:
            out[j] = -np.inf
        else:
            out[j] = (lam - 1.0) * sum_log - 0.5 * n * math.log(var)
    return out


@njit(cache=True)
def lag_ols_kernel(w, p):
    """Least squares of w_t on [1, w_{t-1}, ..., w_{t-p}] via normal equations.

    Returns (coefficients[p+1] with intercept first, sse, ok). ok is False
    when Gaussian elimination hits a negligible pivot (collinear design);
    coefficients are then meaningless.
    """
    n = w.shape[0]
    k = p + 1
    a = np.zeros((k, k))
    b = np.zeros(k)
    row = np.empty(k)
    for t in range(p, n):
        row[0] = 1.0
        for i in range(p):
            row[1 + i] = w[t - 1 - i]
        for i in range(k):
            b[i] += row[i] * w[t]
            for j in range(k):
                a[i, j] += row[i] * row[j]

    coefs = np.zeros(k)
    amax = 0.0
    for i in range(k):
        for j in range(k):
            v = abs(a[i, j])
            if v > amax:
                amax = v
    tol = _PIVOT_RTOL * amax
    ok = True
    # Gaussian elimination with partial pivoting on [a | b].
    for col in range(k):
        piv = col
        big = abs(a[col, col])
        for r2 in range(col + 1, k):
            v = abs(a[r2, col])
            if v > big:
                big = v
                piv = r2
        if big <= tol:
            ok = False
            break
        if piv != col:
            for j in range(k):
                tmp = a[col, j]
                a[col, j] = a[piv, j]
                a[piv, j] = tmp
            tmp = b[col]
            b[col] = b[piv]
            b[piv] = tmp
        for r2 in range(col + 1, k):
            f = a[r2, col] / a[col, col]
            for j in range(col, k):
                a[r2, j] -= f * a[col, j]
            b[r2] -= f * b[col]
    if ok:
        for i in range(k - 1, -1, -1):
            acc = b[i]
            for j in range(i + 1, k):
                acc -= a[i, j] * coefs[j]
            coefs[i] = acc / a[i, i]

    sse = 0.0
    if ok:
        for t in range(p, n):
            pred = coefs[0]
            for i in range(p):
                pred += coefs[1 + i] * w[t - 1 - i]
            resid = w[t] - pred
            sse += resid * resid
    return coefs, sse, ok


@njit(cache=True)
def adf_ols_kernel(y, lags):
    """Unit-root auxiliary regression for the Dickey-Fuller statistic.

    Fits dy_t = a + b*y_{t-1} + sum_i g_i*dy_{t-i} over t = lags+1 .. n-1 and
    returns (b, se_b, sse, centered_response_ss, ok). se_b uses the usual
    s^2 * [(X'X)^-1]_bb estimate; ok is False on a rank-deficient design.
    """
    n = y.shape[0]
    m = n - 1 - lags
    k = 2 + lags
    a = np.zeros((k, k))
    b = np.zeros(k)
    e = np.zeros(k)  # rhs selecting the y_{t-1} column of the inverse
    row = np.empty(k)
    resp_sum = 0.0
    resp_sq = 0.0
    for t in range(lags + 1, n):
        dy = y[t] - y[t - 1]
        resp_sum += dy
        resp_sq += dy * dy
        row[0] = 1.0
        row[1] = y[t - 1]
        for i in range(lags):
            row[2 + i] = y[t - 1 - i] - y[t - 2 - i]
        for i in range(k):
            b[i] += row[i] * dy
            for j in range(k):
                a[i, j] += row[i] * row[j]
    e[1] = 1.0
    resp_ss = resp_sq - resp_sum * resp_sum / m

    amax = 0.0
    for i in range(k):
        for j in range(k):
            v = abs(a[i, j])
            if v > amax:
                amax = v
    tol = _PIVOT_RTOL * amax
    coefs = np.zeros(k)
    zcol = np.zeros(k)
    ok = True
    # Eliminate on [a | b | e]; the second rhs yields the (1,1) inverse entry.
    for col in range(k):
        piv = col
        big = abs(a[col, col])
        for r2 in range(col + 1, k):
            v = abs(a[r2, col])
            if v > big:
                big = v
                piv = r2
        if big <= tol:
            ok = False
            break
        if piv != col:
            for j in range(k):
                tmp = a[col, j]
                a[col, j] = a[piv, j]
                a[piv, j] = tmp
            tmp = b[col]
            b[col] = b[piv]
            b[piv] = tmp
            tmp = e[col]
            e[col] = e[piv]
            e[piv] = tmp
        for r2 in range(col + 1, k):
            f = a[r2, col] / a[col, col]
            for j in range(col, k):
                a[r2, j] -= f * a[col, j]
            b[r2] -= f * b[col]
            e[r2] -= f * e[col]
    if not ok:
        return 0.0, 0.0, 0.0, resp_ss, False
    for i in range(k - 1, -1, -1):
        acc = b[i]
        acc2 = e[i]
        for j in range(i + 1, k):
            acc -= a[i, j] * coefs[j]
            acc2 -= a[i, j] * zcol[j]
        coefs[i] = acc / a[i, i]
        zcol[i] = acc2 / a[i, i]

    sse = 0.0
    for t in range(lags + 1, n):
        dy = y[t] - y[t - 1]
        pred = coefs[0] + coefs[1] * y[t - 1]
        for i in range(lags):
            pred += coefs[2 + i] * (y[t - 1 - i] - y[t - 2 - i])
        resid = dy - pred
        sse += resid * resid

    dof = m - k
    se = 0.0
    if dof > 0 and zcol[1] > 0.0:
        se = math.sqrt(sse / dof * zcol[1])
    return coefs[1], se, sse, resp_ss, True


@njit(cache=True)
def ar_recursion_kernel(phi, intercept, seed, horizon):
    """Iterate y_{t+h} = c + sum_i phi_i * y_{t+h-i}, feeding forecasts back in.

    seed holds the last len(phi) observed values, oldest first.
    """
    p = phi.shape[0]
    hist = np.empty(p + horizon)
    for i in range(p):
        hist[i] = seed[i]
    for h in range(horizon):
        acc = intercept
        for i in range(p):
            acc += phi[i] * hist[p + h - 1 - i]
        hist[p + h] = acc
    return hist[p:]


def pure(kernel):
    """Return the uncompiled Python implementation of a kernel."""
    return getattr(kernel, "py_func", kernel)


def warmup() -> None:
    """Trigger JIT compilation of every kernel on tiny inputs.

    Cheap no-op on the pure path; call once before timing anything.
    """
    y = np.array([1.0, 3.0, 2.0, 5.0, 4.0, 6.0, 3.0, 7.0, 5.0, 8.0, 6.0, 9.0, 7.0, 10.0])
    acf_kernel(y, 2)
    boxcox_llf_kernel(y + 1.0, np.array([0.0, 0.5, 1.0]))
    lag_ols_kernel(y, 1)
    adf_ols_kernel(y, 1)
    ar_recursion_kernel(np.array([0.5]), 1.0, np.array([2.0]), 3)
