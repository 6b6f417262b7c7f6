"""Weekly issue-stream mining and autoregressive count forecasting."""

from .arima import (
    ArimaModel,
    ArimaOrder,
    Forecast,
    OrderSelection,
    TransferMode,
    fit,
    fit_forecast,
    forecast,
    forecast_from_window,
    select_order,
    transfer_forecast,
)
from .errors import IssueForecastError
from .evaluation import (
    ModelSource,
    RollingEvalResult,
    WindowConfig,
    pool_error_traces,
    rolling_eval,
    run_local_models,
    run_correlations,
    run_issue_transfer,
    run_error_comparison,
    window_positions,
)
from .filters import FilterOutcome, ProjectMeta, evaluate_filters
from .ingest import (
    IssueRecord,
    Kind,
    LabelPatterns,
    ProjectBundle,
    build_bundle,
    bucket_weekly,
    classify,
    fetch_issues,
    load_cache,
    save_cache,
)
from .stats import (
    CorrelationReport,
    CorrelationStrength,
    WelchResult,
    mae,
    spearman_rho,
    t_cdf,
    welch_t_test,
)
from .timeseries import (
    AcfResult,
    AdfResult,
    Attribute,
    TransformState,
    WeeklySeries,
    acf,
    adf_test,
    box_cox_apply,
    box_cox_fit,
    box_cox_invert,
    difference,
    inverse_difference,
    select_d,
)

__version__ = "0.1.0"
