"""Autoregressive model selection, fitting, forecasting, and transfer.

The model family is AR(p) on the power-transformed, d-times-differenced
series (the moving-average order is declared but always zero here, because
weekly counts pulled from a tracker API carry no measurement error term to
model). Estimation is conditional least squares on the lag matrix; forecasts
iterate the fitted recursion, feeding predictions back in for unobserved
lags, then undo the differencing and the power transform and clamp at zero.

Cross-attribute transfer supports two readings: Coefficients (default) keeps
the dynamics learned on the source but re-anchors scale and recursion state
on the target window, so forecasts land in target units; Direct simply emits
the source model's own forecasts for comparison against target actuals.
"""

from dataclasses import dataclass, replace
from enum import Enum

import numpy as np

from .errors import (
    DomainError,
    HorizonError,
    InsufficientLengthError,
    SingularRegressionError,
    WindowMismatchError,
)
from .kernels import ar_recursion_kernel, lag_ols_kernel
from .timeseries import (
    SeriesLike,
    TransformState,
    acf,
    as_values,
    box_cox_apply,
    box_cox_fit,
    box_cox_invert,
    difference,
    select_d,
)


@dataclass(frozen=True)
class ArimaOrder:
    p: int
    d: int
    q: int = 0

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("autoregressive order must be >= 0")
        if not 0 <= self.d <= 2:
            raise ValueError("differencing order must be in 0..2")
        if self.q != 0:
            raise ValueError("moving-average terms are not estimated; q must be 0")


@dataclass(frozen=True)
class OrderSelection:
    order: ArimaOrder
    constant_window: bool = False
    d_at_cap: bool = False


@dataclass(frozen=True)
class ArimaModel:
    order: ArimaOrder
    ar_coefficients: tuple[float, ...]
    intercept: float
    transform: TransformState
    residual_variance: float
    fit_window_length: int
    ma_coefficients: tuple[float, ...] = ()

    def __post_init__(self):
        if len(self.ar_coefficients) != self.order.p:
            raise ValueError("coefficient count must match the autoregressive order")
        if len(self.ma_coefficients) != self.order.q:
            raise ValueError("ma_coefficients must match q (always empty here)")
        if self.residual_variance < 0:
            raise ValueError("residual variance cannot be negative")


@dataclass(frozen=True)
class Forecast:
    """Forecast values in original count scale, clamped at zero.

    origin_index is the week index of the last training observation; -1 when
    the caller did not anchor the forecast to an absolute position.
    """

    origin_index: int
    horizon: int
    values: np.ndarray
    clamped: bool = False

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.size != self.horizon:
            raise ValueError("forecast length must equal the horizon")
        if not np.isfinite(vals).all():
            raise ValueError("forecast values must be finite")
        if (vals < 0).any():
            raise ValueError("forecast values must be non-negative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)


class TransferMode(Enum):
    COEFFICIENTS = "coefficients"
    DIRECT = "direct"


_MAX_P = 3


def p_cap(n: int, d: int) -> int:
    """Largest autoregressive order a window of length n can support."""
    return min(_MAX_P, (n - d - 1) // 3)


def select_order(series: SeriesLike, regression_lags: int = 1) -> OrderSelection:
    """Pick (p, d, 0) for one fitting window.

    d comes from the stationarity ladder; p counts the leading consecutive
    lags of the differenced series whose autocorrelation clears the
    1.96/sqrt(n) band, capped by what the window length can support. A
    constant window short-circuits to (0, 0, 0).
    """
    v = as_values(series)
    n = v.size
    if n < 12:
        raise InsufficientLengthError(f"order selection needs at least 12 points, got {n}")
    if np.ptp(v) == 0:
        return OrderSelection(ArimaOrder(0, 0, 0), constant_window=True)

    d, at_cap = select_d(v, regression_lags)
    diffed = np.diff(v, n=d) if d else v
    p = 0
    if diffed.size and np.ptp(diffed) > 0:
        max_lag = min(p_cap(n, d), diffed.size - 2)
        if max_lag >= 1:
            result = acf(diffed, max_lag)
            for k in range(1, max_lag + 1):
                if abs(result.correlations[k]) > result.significance_band:
                    p += 1
                else:
                    break
    return OrderSelection(ArimaOrder(p, d, 0), d_at_cap=at_cap)


def _auto_transform(values: np.ndarray) -> tuple[float, float]:
    """Default (lam, shift): unit shift for counts, likelihood-chosen exponent.

    Inputs with negative entries (synthetic experiments) get a larger shift
    so the transform domain stays positive.
    """
    lo = float(values.min())
    shift = 1.0 if lo >= 0 else 1.0 - lo
    lam = box_cox_fit(values + shift)
    return lam, shift


def fit(
    series: SeriesLike,
    order: ArimaOrder,
    *,
    lam: float | None = None,
    shift: float | None = None,
) -> ArimaModel:
    """Conditional least squares fit of an AR(p) on the preprocessed window.

    Pipeline: add shift, power-transform, difference d times, then regress
    y_t on [1, y_{t-1}, ..., y_{t-p}]. lam/shift override the automatic
    transform estimation (lam=1, shift=1 is the identity). On a collinear lag
    matrix the order falls back to p-1 repeatedly; the model records the
    order actually fitted. p = 0 reduces to the window mean.
    """
    v = as_values(series)
    n = v.size
    p, d = order.p, order.d
    if p > p_cap(n, d):
        raise InsufficientLengthError(
            f"window of {n} points supports p <= {p_cap(n, d)} at d={d}, got p={p}"
        )
    if n < p + d + max(p, 1) + 2:
        raise InsufficientLengthError(
            f"need at least {p + d + max(p, 1) + 2} points to fit ({p},{d},0), got {n}"
        )

    if shift is None:
        lo = float(v.min())
        shift = 1.0 if lo >= 0 else 1.0 - lo
    if lam is None:
        lam = box_cox_fit(v + shift)
    w = box_cox_apply(v, lam, shift)
    diffed, heads = difference(w, d)

    while True:
        coefs, sse, ok = lag_ols_kernel(diffed, p)
        if ok:
            break
        if p == 0:
            raise SingularRegressionError("intercept-only design is degenerate")
        p -= 1

    rows = diffed.size - p
    dof = rows - p - 1
    residual_variance = float(sse / dof) if dof > 0 else 0.0
    return ArimaModel(
        order=ArimaOrder(p, d, 0),
        ar_coefficients=tuple(float(c) for c in coefs[1:]),
        intercept=float(coefs[0]),
        transform=TransformState(lam=lam, shift=shift, d=d, retained_heads=heads),
        residual_variance=max(residual_variance, 0.0),
        fit_window_length=n,
    )


def forecast(
    model: ArimaModel,
    training_tail: SeriesLike,
    horizon: int,
    origin_index: int = -1,
) -> Forecast:
    """Forecast `horizon` steps ahead from a transformed training tail.

    training_tail holds the last values of the transformed (pre-differencing)
    training window, at least p + d of them. The recursion runs on the
    differenced scale, then the differencing and power transform are undone
    and results are clamped at zero.
    """
    if horizon < 1:
        raise HorizonError("horizon must be at least 1")
    p, d = model.order.p, model.order.d
    tail = np.asarray(training_tail, dtype=np.float64)
    if tail.size < p + d:
        raise InsufficientLengthError(f"training tail must hold at least {p + d} transformed values")

    level_last = np.empty(d)
    cur = tail
    for level in range(d):
        level_last[level] = cur[-1]
        cur = np.diff(cur)
    seed = cur[-p:] if p else np.empty(0)

    vals = ar_recursion_kernel(np.asarray(model.ar_coefficients), model.intercept, seed, horizon)
    for level in range(d - 1, -1, -1):
        vals = level_last[level] + np.cumsum(vals)
    values, clamped = box_cox_invert(vals, model.transform.lam, model.transform.shift)
    if not np.isfinite(values).all():
        # Divergent recursion pushed the inversion past float range.
        raise DomainError("forecast left the invertible range of the transform")
    return Forecast(origin_index=origin_index, horizon=horizon, values=values, clamped=clamped)


def forecast_from_window(
    model: ArimaModel,
    window: SeriesLike,
    horizon: int,
    origin_index: int = -1,
) -> Forecast:
    """Transform a raw training window with the model's state and forecast."""
    w = box_cox_apply(window, model.transform.lam, model.transform.shift)
    return forecast(model, w, horizon, origin_index)


def fit_forecast(
    series: SeriesLike,
    horizon: int,
    order: ArimaOrder | None = None,
    origin_index: int = -1,
) -> tuple[ArimaModel, Forecast]:
    """Select (unless given), fit, and forecast in one step.

    A constant window skips fitting entirely and forecasts the constant,
    which is what the full pipeline would produce anyway.
    """
    if horizon < 1:
        raise HorizonError("horizon must be at least 1")
    v = as_values(series)
    if np.ptp(v) == 0:
        const = float(v[-1])
        model = ArimaModel(
            order=ArimaOrder(0, 0, 0),
            ar_coefficients=(),
            intercept=const,  # identity transform: transformed value equals the count
            transform=TransformState(lam=1.0, shift=1.0, d=0, retained_heads=()),
            residual_variance=0.0,
            fit_window_length=v.size,
        )
        fc = Forecast(
            origin_index=origin_index,
            horizon=horizon,
            values=np.full(horizon, const),
        )
        return model, fc
    if order is None:
        order = select_order(v).order
    model = fit(v, order)
    return model, forecast_from_window(model, v, horizon, origin_index)


def transfer_forecast(
    source_series: SeriesLike,
    target_series: SeriesLike,
    window: tuple[int, int] | None,
    horizon: int,
    mode: TransferMode = TransferMode.COEFFICIENTS,
    order: ArimaOrder | None = None,
) -> Forecast:
    """Forecast the target attribute from a model learned on the source.

    window is a (start, stop) index range both series must cover; None means
    the full (equal-length) history. Coefficients mode refits the transform
    state on the target window and seeds the recursion with the target's own
    transformed tail, so forecasts come out in target scale. Direct mode
    returns the source model's raw forecasts.
    """
    sv = as_values(source_series)
    tv = as_values(target_series)
    if window is None:
        if sv.size != tv.size:
            raise WindowMismatchError("full-history transfer needs equal-length series")
        start, stop = 0, sv.size
    else:
        start, stop = window
    if not (0 <= start < stop <= sv.size and stop <= tv.size):
        raise WindowMismatchError(f"window [{start}, {stop}) not covered by both series")
    if horizon < 1:
        raise HorizonError("horizon must be at least 1")

    s_win = sv[start:stop]
    t_win = tv[start:stop]
    origin = stop - 1

    if mode is TransferMode.DIRECT:
        _, fc = fit_forecast(s_win, horizon, order=order, origin_index=origin)
        return fc

    if order is None:
        order = select_order(s_win).order if np.ptp(s_win) > 0 else ArimaOrder(0, 0, 0)
    # One consistent transform state, refit on the target window: the source
    # fit estimates its dynamics in that state so the recursion, the target
    # tail that seeds it, and the final inversion all share target scale.
    lam_t, shift_t = _auto_transform(t_win)
    source_model = fit(s_win, order, lam=lam_t, shift=shift_t)
    wt = box_cox_apply(t_win, lam_t, shift_t)
    _, heads_t = difference(wt, source_model.order.d)
    target_model = replace(
        source_model,
        transform=TransformState(
            lam=lam_t, shift=shift_t, d=source_model.order.d, retained_heads=heads_t
        ),
    )
    return forecast(target_model, wt, horizon, origin_index=origin)
