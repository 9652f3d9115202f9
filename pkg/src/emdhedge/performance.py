"""Hedging-effectiveness criteria: variance reduction, empirical VaR, moments.

Evaluation returns are horizon-h log differences (stride 1), consistent with
the conventional estimators. The VaR quantile uses linear interpolation at
position (n-1)*alpha + 1 so outputs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import stats

from .errors import DataError, InsufficientDataError
from .series import DiffKind, PriceSeries, horizon_diff

__all__ = [
    "Criterion",
    "HedgedReturns",
    "Effectiveness",
    "Moments",
    "build_portfolio",
    "he_variance",
    "var_quantile",
    "he_var",
    "moments",
]

DEGENERACY_THRESHOLD = 1e-12


class Criterion(Enum):
    VARIANCE_REDUCTION = "variance_reduction"
    VAR = "var"


@dataclass(frozen=True)
class HedgedReturns:
    """Spot, futures and hedged-portfolio log returns at one horizon."""

    horizon: int
    ratio: float
    spot_returns: np.ndarray
    futures_returns: np.ndarray
    portfolio: np.ndarray  # spot - ratio * futures


@dataclass(frozen=True)
class Effectiveness:
    criterion: Criterion
    value: float
    n_obs: int
    alpha: float | None = None
    degenerate: bool = False
    sign_anomaly: bool = False


@dataclass(frozen=True)
class Moments:
    mean: float
    std: float
    skew: float
    kurt: float  # excess
    n_obs: int
    degenerate: bool = False


def build_portfolio(
    spot: PriceSeries | np.ndarray,
    fut: PriceSeries | np.ndarray,
    ratio: float,
    horizon: int,
) -> HedgedReturns:
    """Hedged portfolio returns p_t = d_h log S_t - ratio * d_h log F_t.

    Accepts aligned PriceSeries or precomputed log-return arrays.
    """
    if isinstance(spot, PriceSeries):
        if not isinstance(fut, PriceSeries) or len(spot) != len(fut):
            raise DataError("spot and futures series must be aligned")
        ds = horizon_diff(spot, horizon, DiffKind.LOG).values
        df = horizon_diff(fut, horizon, DiffKind.LOG).values
    else:
        ds = np.asarray(spot, dtype=float)
        df = np.asarray(fut, dtype=float)
        if len(ds) != len(df):
            raise DataError("spot and futures return arrays must be aligned")
    return HedgedReturns(
        horizon=horizon,
        ratio=float(ratio),
        spot_returns=ds,
        futures_returns=df,
        portfolio=ds - float(ratio) * df,
    )


def he_variance(spot_ret: np.ndarray, portfolio: np.ndarray) -> Effectiveness:
    """Variance reduction: 1 - var(portfolio)/var(spot), n-1 denominators."""
    spot_ret = np.asarray(spot_ret, dtype=float)
    portfolio = np.asarray(portfolio, dtype=float)
    if min(len(spot_ret), len(portfolio)) < 2:
        raise InsufficientDataError("need at least 2 observations per side")
    vs = float(np.var(spot_ret, ddof=1))
    vp = float(np.var(portfolio, ddof=1))
    # relative floor: a constant series can show O(eps^2) variance from
    # round-off in the mean subtraction
    floor = (DEGENERACY_THRESHOLD * max(1.0, float(np.max(np.abs(spot_ret))))) ** 2
    if vs <= floor:
        return Effectiveness(Criterion.VARIANCE_REDUCTION, float("nan"), len(portfolio), degenerate=True)
    return Effectiveness(Criterion.VARIANCE_REDUCTION, 1.0 - vp / vs, len(portfolio))


def var_quantile(returns: np.ndarray, alpha: float) -> float:
    """Empirical alpha-quantile, linear interpolation between order statistics
    at 1-based position (n-1)*alpha + 1."""
    returns = np.asarray(returns, dtype=float)
    if len(returns) < 20:
        raise InsufficientDataError(f"need >= 20 observations, got {len(returns)}")
    if not (0.0 < alpha <= 0.5):
        raise DataError("alpha must be in (0, 0.5]")
    return float(np.quantile(returns, alpha, method="linear"))


def he_var(spot_ret: np.ndarray, portfolio: np.ndarray, alpha: float = 0.05) -> Effectiveness:
    """VaR effectiveness: 1 - q_alpha(portfolio)/q_alpha(spot) on signed returns."""
    qs = var_quantile(spot_ret, alpha)
    qp = var_quantile(portfolio, alpha)
    if abs(qs) < DEGENERACY_THRESHOLD:
        return Effectiveness(Criterion.VAR, float("nan"), len(portfolio), alpha=alpha, degenerate=True)
    return Effectiveness(
        Criterion.VAR,
        1.0 - qp / qs,
        len(portfolio),
        alpha=alpha,
        sign_anomaly=qs > 0.0,
    )


def moments(values: np.ndarray) -> Moments:
    """Sample mean, std (n-1), moment skewness g1 and excess kurtosis g2
    (central moments with n denominator)."""
    values = np.asarray(values, dtype=float)
    n = len(values)
    if n < 4:
        raise InsufficientDataError("need at least 4 observations for moments")
    std = float(np.std(values, ddof=1))
    if std <= 0.0:
        return Moments(float(values.mean()), 0.0, float("nan"), float("nan"), n, degenerate=True)
    return Moments(
        mean=float(values.mean()),
        std=std,
        skew=float(stats.skew(values, bias=True)),
        kurt=float(stats.kurtosis(values, fisher=True, bias=True)),
        n_obs=n,
    )
