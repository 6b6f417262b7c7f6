"""Weekly count series and the time-series primitives built on them.

Covers the preprocessing pipeline used before any autoregressive fit: the
power (Box-Cox) transform with its likelihood-based exponent search,
successive differencing with exact inversion, sample autocorrelations, the
augmented Dickey-Fuller stationarity test, and the rule that picks the
differencing order. All functions are pure and all types are immutable, so
everything here is safe to call from concurrent workers.
"""

from dataclasses import dataclass
from datetime import date, timedelta
from enum import Enum
from typing import NamedTuple, Sequence, Union

import numpy as np

from .errors import (
    DomainError,
    InsufficientLengthError,
    SingularRegressionError,
    ZeroVarianceError,
)
from .kernels import acf_kernel, adf_ols_kernel, boxcox_llf_kernel


class Attribute(Enum):
    ISSUES = "issues"
    BUGS = "bugs"
    ENHANCEMENTS = "enhancements"


@dataclass(frozen=True)
class WeeklySeries:
    """Contiguous weekly counts of one attribute for one project.

    Index i is the week starting at start_date + 7*i days; there are no gaps.
    """

    project_id: str
    attribute: Attribute
    start_date: date
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=np.int64)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("values must be a non-empty 1-D sequence")
        if (arr < 0).any():
            raise ValueError("weekly counts must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    def week_start(self, index: int) -> date:
        return self.start_date + timedelta(days=7 * index)


SeriesLike = Union[WeeklySeries, Sequence[float], np.ndarray]


def as_values(series: SeriesLike) -> np.ndarray:
    """Float view of a weekly series or any plain sequence."""
    if isinstance(series, WeeklySeries):
        return series.values.astype(np.float64)
    return np.asarray(series, dtype=np.float64)


@dataclass(frozen=True)
class TransformState:
    """Everything needed to undo the preprocessing of one fitting window.

    retained_heads holds the leading value of each successive difference
    level (d of them), which makes inverse_difference an exact inverse.
    """

    lam: float
    shift: float
    d: int
    retained_heads: tuple[float, ...]

    def __post_init__(self):
        if self.shift <= 0:
            raise ValueError("shift must be positive")
        if not 0 <= self.d <= 2:
            raise ValueError("differencing order must be in 0..2")
        if len(self.retained_heads) != self.d:
            raise ValueError("retained_heads must hold one value per difference level")


IDENTITY_LAM = 1.0
IDENTITY_SHIFT = 1.0  # ((v + 1)^1 - 1) / 1 == v, so lam=1, shift=1 is the identity


@dataclass(frozen=True)
class AcfResult:
    max_lag: int
    correlations: np.ndarray
    significance_band: float


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    critical_value_5pct: float
    is_stationary: bool
    regression_lags: int


class SelectDResult(NamedTuple):
    d: int
    at_cap: bool  # True when no candidate order passed the stationarity test


def acf(series: SeriesLike, max_lag: int) -> AcfResult:
    """Sample autocorrelation function r_0..r_max_lag.

    r_k = sum_t (y_t - mean)(y_{t+k} - mean) / sum_t (y_t - mean)^2, with the
    5% white-noise significance band 1.96/sqrt(n).
    """
    y = as_values(series)
    n = y.size
    if max_lag < 1:
        raise ValueError("max_lag must be >= 1")
    if n < max_lag + 2:
        raise InsufficientLengthError(f"need at least {max_lag + 2} points, got {n}")
    if np.ptp(y) == 0:
        raise ZeroVarianceError("autocorrelation is undefined for a constant series")
    corr = acf_kernel(y, max_lag)
    return AcfResult(max_lag=max_lag, correlations=corr, significance_band=1.96 / float(np.sqrt(n)))


# 5% critical values of the constant-only Dickey-Fuller t-distribution,
# interpolated linearly in 1/n (clamped outside the tabulated range).
_DF_INV_N = np.array([0.0, 1.0 / 100.0, 1.0 / 50.0, 1.0 / 25.0])
_DF_CRIT = np.array([-2.86, -2.89, -2.93, -3.00])


def df_critical_value(n: int) -> float:
    return float(np.interp(1.0 / n, _DF_INV_N, _DF_CRIT))


def adf_test(series: SeriesLike, regression_lags: int = 1) -> AdfResult:
    """Augmented Dickey-Fuller test, constant-only specification.

    Regresses dy_t on [1, y_{t-1}, dy_{t-1}, ..., dy_{t-L}] and compares the
    t-ratio of the lagged level against the 5% critical value for the sample
    size. When the augmentation terms make the design collinear, the lag
    order is reduced stepwise before giving up; the lags actually used are
    reported in the result.
    """
    y = as_values(series)
    n = y.size
    if regression_lags < 0:
        raise ValueError("regression_lags must be >= 0")
    if n < regression_lags + 10:
        raise InsufficientLengthError(
            f"need at least {regression_lags + 10} points for the auxiliary regression, got {n}"
        )
    if np.ptp(y) == 0:
        raise SingularRegressionError("constant series: level column is collinear with the intercept")

    for lags in range(regression_lags, -1, -1):
        beta, se, sse, resp_ss, ok = adf_ols_kernel(y, lags)
        if not ok:
            continue
        if sse <= 1e-12 * resp_ss:
            # Deterministic (exact-fit) series: the t-ratio degenerates and
            # only the sign of the level coefficient is informative.
            if beta < 0:
                stat = float("-inf")
            elif beta > 0:
                stat = float("inf")
            else:
                stat = 0.0
        elif se == 0.0:
            stat = 0.0
        else:
            stat = beta / se
        crit = df_critical_value(n)
        return AdfResult(
            statistic=stat,
            critical_value_5pct=crit,
            is_stationary=stat < crit,
            regression_lags=lags,
        )
    raise SingularRegressionError("design matrix is rank deficient at every lag order")


def box_cox_fit(values: SeriesLike) -> float:
    """Power-transform exponent maximizing the profile log-likelihood.

    Searches the grid -2.0, -1.9, ..., 2.0. Inputs must already be strictly
    positive (apply the shift first). Constant input has a flat likelihood
    and returns 1.0, the identity exponent.
    """
    x = as_values(values)
    if x.size < 4:
        raise InsufficientLengthError("need at least 4 points to estimate the exponent")
    if (x <= 0).any():
        raise DomainError("exponent search requires strictly positive inputs")
    if np.ptp(x) == 0:
        return 1.0
    lambdas = np.array([(k - 20) / 10.0 for k in range(41)])
    llf = boxcox_llf_kernel(x, lambdas)
    if not np.isfinite(llf).any():
        return 1.0
    return float(lambdas[int(np.argmax(llf))])


def box_cox_apply(values: SeriesLike, lam: float, shift: float) -> np.ndarray:
    """w = ((v + shift)^lam - 1)/lam, or ln(v + shift) when lam is 0."""
    v = as_values(values)
    x = v + shift
    if (x <= 0).any():
        raise DomainError("values + shift must be strictly positive")
    if lam == 0.0:
        return np.log(x)
    return (np.power(x, lam) - 1.0) / lam


def box_cox_invert(transformed: SeriesLike, lam: float, shift: float) -> tuple[np.ndarray, bool]:
    """Exact inverse of box_cox_apply, clamped to non-negative counts.

    Entries with lam*w + 1 <= 0 have no preimage and come back as 0; the
    returned flag is True whenever any entry was clamped (either for that
    reason or because the unshifted value dipped below zero).
    """
    w = np.asarray(transformed, dtype=np.float64)
    if lam == 0.0:
        raw = np.exp(w) - shift
        out_of_domain = np.zeros(w.shape, dtype=bool)
    else:
        base = lam * w + 1.0
        out_of_domain = base <= 0
        safe = np.where(out_of_domain, 1.0, base)
        raw = np.power(safe, 1.0 / lam) - shift
        raw = np.where(out_of_domain, 0.0, raw)
    negative = raw < 0
    clamped = bool(out_of_domain.any() or negative.any())
    return np.where(negative, 0.0, raw), clamped


def difference(values: SeriesLike, d: int) -> tuple[np.ndarray, tuple[float, ...]]:
    """Apply d successive first differences, keeping each level's head.

    The heads make inverse_difference an exact inverse via telescoping sums.
    """
    v = as_values(values)
    if not 0 <= d <= 2:
        raise ValueError("differencing order must be in 0..2")
    if v.size <= d:
        raise InsufficientLengthError(f"need more than {d} points to difference {d} times")
    heads = []
    cur = v
    for _ in range(d):
        heads.append(float(cur[0]))
        cur = np.diff(cur)
    return cur, tuple(heads)


def inverse_difference(differenced: SeriesLike, retained_heads: tuple[float, ...]) -> np.ndarray:
    """Rebuild the original sequence from its d-th differences and heads."""
    cur = np.asarray(differenced, dtype=np.float64)
    for head in reversed(retained_heads):
        cur = np.cumsum(np.concatenate(([head], cur)))
    return cur


def select_d(series: SeriesLike, regression_lags: int = 1, max_d: int = 2) -> SelectDResult:
    """Smallest differencing order whose result passes the stationarity test.

    A series that differences down to a constant counts as stationary at that
    order (the test itself is undefined there, but a constant trivially has a
    fixed mean). Orders whose differenced series is too short to test are
    skipped. If nothing passes, max_d is returned with at_cap set.
    """
    v = as_values(series)
    for d in range(max_d + 1):
        cur = np.diff(v, n=d) if d else v
        if cur.size and np.ptp(cur) == 0:
            return SelectDResult(d=d, at_cap=False)
        try:
            result = adf_test(cur, regression_lags)
        except InsufficientLengthError:
            continue
        if result.is_stationary:
            return SelectDResult(d=d, at_cap=False)
    return SelectDResult(d=max_d, at_cap=True)
