import numpy as np
import pytest

import helpers
from issueforecast.arima import (
    ArimaModel,
    ArimaOrder,
    Forecast,
    TransferMode,
    fit,
    fit_forecast,
    forecast,
    forecast_from_window,
    select_order,
    transfer_forecast,
)
from issueforecast.errors import (
    HorizonError,
    InsufficientLengthError,
    WindowMismatchError,
)
from issueforecast.stats import mae
from issueforecast.timeseries import TransformState


class TestOrderTypes:
    def test_ma_terms_are_declared_but_fixed_to_zero(self):
        with pytest.raises(ValueError):
            ArimaOrder(1, 0, q=1)
        assert ArimaOrder(2, 1).q == 0

    def test_model_validates_coefficient_count(self):
        state = TransformState(1.0, 1.0, 0, ())
        with pytest.raises(ValueError):
            ArimaModel(ArimaOrder(2, 0), (0.5,), 0.0, state, 0.0, 20)

    def test_forecast_rejects_negative_or_nonfinite(self):
        with pytest.raises(ValueError):
            Forecast(0, 2, np.array([1.0, -0.5]))
        with pytest.raises(ValueError):
            Forecast(0, 1, np.array([np.inf]))


class TestSelectOrder:
    def test_white_noise_selects_zero_order(self):
        hits = sum(
            select_order(helpers.white_noise(120, seed=s) + 50.0).order == ArimaOrder(0, 0, 0)
            for s in range(40)
        )
        assert hits > 20

    def test_ar1_process_selects_positive_p(self):
        hits = 0
        for s in range(50):
            sel = select_order(helpers.ar1(200, phi=0.8, seed=s))
            if sel.order.p >= 1 and sel.order.d == 0:
                hits += 1
        assert hits >= 45

    def test_constant_window_flagged(self):
        sel = select_order(np.full(20, 6.0))
        assert sel.order == ArimaOrder(0, 0, 0)
        assert sel.constant_window

    def test_p_capped_by_window_length(self):
        # Strongly autocorrelated but only 13 points: cap = (13-0-1)//3 = 4 -> 3.
        sel = select_order(helpers.ar1(13, phi=0.95, seed=3))
        assert sel.order.p <= 3

    def test_too_short_raises(self):
        with pytest.raises(InsufficientLengthError):
            select_order(np.arange(11.0))


def lstsq_oracle(w: np.ndarray, p: int):
    """Independent least-squares fit of the same lag design via SVD."""
    rows = len(w) - p
    design = np.ones((rows, p + 1))
    for i in range(p):
        design[:, 1 + i] = w[p - 1 - i : len(w) - 1 - i]
    response = w[p:]
    coefs, *_ = np.linalg.lstsq(design, response, rcond=None)
    sse = float(np.sum((response - design @ coefs) ** 2))
    return coefs, sse


class TestFit:
    def test_recovers_ar1_coefficient_on_average(self):
        errors = []
        for s in range(50):
            y = helpers.ar1(200, phi=0.6, seed=s)
            model = fit(y, ArimaOrder(1, 0), lam=1.0)
            errors.append(abs(model.ar_coefficients[0] - 0.6))
        assert np.mean(errors) < 0.1

    def test_exact_recovery_without_noise(self):
        y = np.empty(30)
        y[0] = 9.0
        for t in range(1, 30):
            y[t] = 1.0 + 0.6 * y[t - 1]
        model = fit(y, ArimaOrder(1, 0), lam=1.0, shift=1.0)
        assert model.ar_coefficients[0] == pytest.approx(0.6, abs=1e-6)
        assert model.intercept == pytest.approx(1.0, abs=1e-6)
        assert model.residual_variance == pytest.approx(0.0, abs=1e-12)

    def test_exact_recovery_ar2(self):
        phi = (0.5, 0.3)
        y = np.empty(40)
        y[0], y[1] = 4.0, 6.0
        for t in range(2, 40):
            y[t] = 2.0 + phi[0] * y[t - 1] + phi[1] * y[t - 2]
        model = fit(y, ArimaOrder(2, 0), lam=1.0, shift=1.0)
        assert np.allclose(model.ar_coefficients, phi, atol=1e-6)

    def test_intercept_only_on_constant_series(self):
        model = fit(np.full(12, 3.0), ArimaOrder(0, 0), lam=1.0, shift=1.0)
        assert model.intercept == 3.0  # identity transform of the constant
        assert model.residual_variance == 0.0
        assert model.ar_coefficients == ()

    def test_p_above_window_cap_raises(self):
        # cap = (9 - 0 - 1) // 3 = 2, so p = 3 exceeds what the window supports
        with pytest.raises(InsufficientLengthError):
            fit(np.arange(9.0), ArimaOrder(3, 0))

    def test_window_too_short_raises(self):
        with pytest.raises(InsufficientLengthError):
            fit(np.array([1.0, 2.0, 3.0]), ArimaOrder(1, 0))

    @pytest.mark.parametrize("seed", range(10))
    @pytest.mark.parametrize("p", [1, 2, 3])
    def test_agrees_with_independent_least_squares_oracle(self, seed, p):
        w = np.random.default_rng(seed).normal(10.0, 2.0, size=60)
        model = fit(w, ArimaOrder(p, 0), lam=1.0, shift=1.0)
        oracle_coefs, oracle_sse = lstsq_oracle(w, p)
        assert model.intercept == pytest.approx(oracle_coefs[0], abs=1e-8)
        assert np.allclose(model.ar_coefficients, oracle_coefs[1:], atol=1e-8)
        rows = len(w) - p
        assert model.residual_variance == pytest.approx(
            oracle_sse / (rows - p - 1), rel=1e-8
        )

    def test_singular_lag_matrix_falls_back_to_smaller_p(self):
        # Constant window makes every lag column collinear with the intercept.
        model = fit(np.full(14, 5.0), ArimaOrder(2, 0), lam=1.0, shift=1.0)
        assert model.order.p == 0
        assert model.intercept == 5.0

    def test_auto_transform_keeps_domain_positive(self):
        y = helpers.ar1(60, phi=0.5, seed=2)  # crosses zero
        model = fit(y, ArimaOrder(1, 0))
        assert model.transform.shift > -y.min()


class TestForecast:
    def test_mean_model_forecasts_mean(self):
        state = TransformState(1.0, 1.0, 0, ())
        model = ArimaModel(ArimaOrder(0, 0), (), 4.25, state, 0.0, 20)
        fc = forecast(model, np.empty(0), 5)
        assert np.all(fc.values == 4.25)

    def test_random_walk_flat_forecast(self):
        state = TransformState(1.0, 1.0, 1, (5.0,))
        model = ArimaModel(ArimaOrder(0, 1), (), 0.0, state, 0.0, 20)
        fc = forecast(model, np.array([5.0, 7.0]), 4)
        assert fc.values.tolist() == [7.0, 7.0, 7.0, 7.0]

    def test_hand_computed_recursion(self):
        state = TransformState(1.0, 1.0, 0, ())
        model = ArimaModel(ArimaOrder(1, 0), (0.5,), 1.0, state, 0.0, 20)
        fc = forecast(model, np.array([3.0]), 3)
        assert fc.values.tolist() == [2.5, 2.25, 2.125]

    def test_zero_horizon_rejected(self):
        state = TransformState(1.0, 1.0, 0, ())
        model = ArimaModel(ArimaOrder(0, 0), (), 1.0, state, 0.0, 20)
        with pytest.raises(HorizonError):
            forecast(model, np.empty(0), 0)

    def test_horizon_split_matches_single_run(self):
        y = helpers.count_series(30, seed=4)
        model = fit(y, ArimaOrder(2, 1))
        full = forecast_from_window(model, y, 8)
        head = forecast_from_window(model, y, 3)
        assert np.array_equal(full.values[:3], head.values)

    def test_values_non_negative_and_finite(self):
        for s in range(20):
            y = helpers.count_series(24, seed=s)
            _, fc = fit_forecast(y, 6)
            assert np.isfinite(fc.values).all() and (fc.values >= 0).all()

    def test_negative_projection_clamps_and_flags(self):
        state = TransformState(1.0, 1.0, 0, ())
        model = ArimaModel(ArimaOrder(1, 0), (0.5,), -10.0, state, 0.0, 20)
        fc = forecast(model, np.array([1.0]), 3)
        assert fc.clamped and (fc.values == 0).any()

    def test_tail_shorter_than_order_rejected(self):
        state = TransformState(1.0, 1.0, 1, (2.0,))
        model = ArimaModel(ArimaOrder(1, 1), (0.5,), 0.0, state, 0.0, 20)
        with pytest.raises(InsufficientLengthError):
            forecast(model, np.array([1.0]), 2)


class TestFitForecast:
    def test_constant_window_forecasts_constant(self):
        model, fc = fit_forecast(np.full(20, 8.0), 4)
        assert fc.values.tolist() == [8.0] * 4
        assert model.order == ArimaOrder(0, 0, 0)


class TestTransfer:
    def test_self_transfer_matches_local_fit_exactly(self):
        y = helpers.count_series(36, seed=9)
        _, local = fit_forecast(y[:20], 4)
        for mode in TransferMode:
            transferred = transfer_forecast(y, y, (0, 20), 4, mode=mode)
            assert np.array_equal(local.values, transferred.values)

    def test_constant_offset_vanishes_under_differencing(self):
        # Source window begins and ends at the same count, so the fitted
        # drift is exactly zero and the target forecast sits at its own
        # last value regardless of the offset.
        src = np.array([5.0, 7.0, 6.0, 5.0, 8.0, 4.0, 6.0, 7.0, 3.0, 8.0, 6.0, 5.0, 7.0, 5.0])
        tgt = src + 11.0
        fc = transfer_forecast(src, tgt, None, 3, order=ArimaOrder(0, 1))
        assert np.allclose(fc.values, tgt[-1], atol=1e-9)

    def test_coefficients_mode_beats_direct_on_scaled_pairs(self):
        wins = 0
        for s in range(50):
            rng = np.random.default_rng(s)
            issues = helpers.count_series(40, seed=s, level=30.0)
            bugs = np.clip(
                np.rint(0.5 * issues + rng.normal(0, 1.0, size=40)), 0, issues
            )
            actual = bugs[20:24]
            coeff = transfer_forecast(issues, bugs, (0, 20), 4, TransferMode.COEFFICIENTS)
            direct = transfer_forecast(issues, bugs, (0, 20), 4, TransferMode.DIRECT)
            if mae(actual, coeff.values) < mae(actual, direct.values):
                wins += 1
        assert wins >= 40

    def test_window_must_be_covered(self):
        y = helpers.count_series(30, seed=1)
        with pytest.raises(WindowMismatchError):
            transfer_forecast(y, y[:25], (10, 28), 2)
        with pytest.raises(WindowMismatchError):
            transfer_forecast(y, y, (0, 31), 2)

    def test_full_history_window_requires_alignment(self):
        y = helpers.count_series(30, seed=1)
        with pytest.raises(WindowMismatchError):
            transfer_forecast(y, y[:29], None, 2)

    def test_horizon_validated(self):
        y = helpers.count_series(30, seed=1)
        with pytest.raises(HorizonError):
            transfer_forecast(y, y, (0, 20), 0)
