"""Forecast-error and hypothesis-testing primitives.

Mean absolute error, Spearman's rank correlation with average-rank tie
handling, and Welch's unequal-variance t-test with a one-sided p-value. The
Student-t CDF needed for the p-value is evaluated through the regularized
incomplete beta function (continued fraction), so there is no runtime
dependency on a stats library.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    ConstantInputError,
    EmptyInputError,
    InsufficientLengthError,
    InvalidDfError,
    LengthMismatchError,
)


@dataclass(frozen=True)
class WelchResult:
    """Two-sample comparison with the alternative "first mean is greater".

    reject_at_5pct mirrors p_value < 0.05; degenerate is set when both
    samples had zero variance (t is then reported as 0 with p = 0.5).
    """

    t_statistic: float
    degrees_of_freedom: float
    p_value: float
    reject_at_5pct: bool
    degenerate: bool = False


class CorrelationStrength(Enum):
    NONE = "none"
    MODERATE_TO_STRONG = "moderate_to_strong"
    UNDEFINED = "undefined"


def correlation_strength(rho: float | None) -> CorrelationStrength:
    """Label a correlation using the 0.3 cutoff of the 0.3-0.7 band."""
    if rho is None or not math.isfinite(rho):
        return CorrelationStrength.UNDEFINED
    return (
        CorrelationStrength.MODERATE_TO_STRONG
        if abs(rho) >= 0.3
        else CorrelationStrength.NONE
    )


@dataclass(frozen=True)
class CorrelationReport:
    """Pairwise rank correlations of one project's three weekly series."""

    project_id: str
    rho_issues_bugs: float | None
    rho_issues_enhancements: float | None
    rho_bugs_enhancements: float | None

    @property
    def strengths(self) -> dict[str, CorrelationStrength]:
        return {
            "issues_bugs": correlation_strength(self.rho_issues_bugs),
            "issues_enhancements": correlation_strength(self.rho_issues_enhancements),
            "bugs_enhancements": correlation_strength(self.rho_bugs_enhancements),
        }


def mae(actual, predicted) -> float:
    """Mean absolute error between paired sequences.

    Weighting each unique (actual, predicted) pair by its empirical frequency
    gives exactly the plain mean of |error|, so that is what is computed.
    """
    a = np.asarray(actual, dtype=np.float64)
    p = np.asarray(predicted, dtype=np.float64)
    if a.shape != p.shape:
        raise LengthMismatchError(f"length {a.size} vs {p.size}")
    if a.size == 0:
        raise EmptyInputError("mae needs at least one pair")
    return float(np.mean(np.abs(p - a)))


def rank_with_ties(values) -> np.ndarray:
    """1-based ranks; tied values share the average of their positions."""
    v = np.asarray(values, dtype=np.float64)
    order = np.argsort(v, kind="stable")
    ranks = np.empty(v.size, dtype=np.float64)
    i = 0
    while i < v.size:
        j = i
        while j + 1 < v.size and v[order[j + 1]] == v[order[i]]:
            j += 1
        avg = 0.5 * (i + j) + 1.0
        for t in range(i, j + 1):
            ranks[order[t]] = avg
        i = j + 1
    return ranks


def spearman_rho(x, y) -> float:
    """Spearman's rank correlation: Pearson correlation of average ranks."""
    xv = np.asarray(x, dtype=np.float64)
    yv = np.asarray(y, dtype=np.float64)
    if xv.size != yv.size:
        raise LengthMismatchError(f"length {xv.size} vs {yv.size}")
    if xv.size < 3:
        raise InsufficientLengthError("rank correlation needs at least 3 pairs")
    if np.ptp(xv) == 0 or np.ptp(yv) == 0:
        raise ConstantInputError("rank correlation is undefined for constant input")
    rx = rank_with_ties(xv)
    ry = rank_with_ties(yv)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    return float(np.dot(dx, dy) / math.sqrt(np.dot(dx, dx) * np.dot(dy, dy)))


def welch_t_test(a, b) -> WelchResult:
    """Welch's unequal-variance t-test, one-sided (mean of a greater).

    Degrees of freedom follow Welch-Satterthwaite. When both samples are
    constant the statistic is undefined; the result carries t = 0, p = 0.5
    and the degenerate flag instead of failing.
    """
    av = np.asarray(a, dtype=np.float64)
    bv = np.asarray(b, dtype=np.float64)
    na, nb = av.size, bv.size
    if na < 2 or nb < 2:
        raise InsufficientLengthError("both samples need at least 2 observations")
    va = float(np.var(av, ddof=1))
    vb = float(np.var(bv, ddof=1))
    if va == 0.0 and vb == 0.0:
        return WelchResult(
            t_statistic=0.0,
            degrees_of_freedom=float(na + nb - 2),
            p_value=0.5,
            reject_at_5pct=False,
            degenerate=True,
        )
    sa = va / na
    sb = vb / nb
    t = (float(np.mean(av)) - float(np.mean(bv))) / math.sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa**2 / (na - 1) + sb**2 / (nb - 1))
    p = 1.0 - t_cdf(t, df)
    return WelchResult(
        t_statistic=t,
        degrees_of_freedom=df,
        p_value=p,
        reject_at_5pct=p < 0.05,
    )


_BETACF_MAX_ITER = 300
_BETACF_EPS = 3e-16
_FPMIN = 1e-300


def _betacf(a: float, b: float, x: float) -> float:
    # Continued fraction for the incomplete beta function, modified Lentz.
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _FPMIN:
        d = _FPMIN
    d = 1.0 / d
    h = d
    for m in range(1, _BETACF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _FPMIN:
            d = _FPMIN
        c = 1.0 + aa / c
        if abs(c) < _FPMIN:
            c = _FPMIN
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _BETACF_EPS:
            break
    return h


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) by continued fraction, absolute error within ~1e-14."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log(1.0 - x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_cdf(t: float, df: float) -> float:
    """Student-t cumulative distribution function.

    Uses P(T <= t) = 1 - I_x(df/2, 1/2)/2 for t >= 0 with x = df/(df + t^2).
    """
    if df <= 0:
        raise InvalidDfError("degrees of freedom must be positive")
    if t == 0.0:
        return 0.5
    x = df / (df + t * t)
    tail = 0.5 * regularized_incomplete_beta(0.5 * df, 0.5, x)
    return 1.0 - tail if t > 0 else tail
