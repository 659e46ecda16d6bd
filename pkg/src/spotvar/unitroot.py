"""Dickey-Fuller unit-root tests, original (non-augmented) form.

Three regressions of the differenced series on its lag:
  (a) no constant       dY_t = delta * Y_{t-1} + e_t
  (b) constant          dY_t = c + delta * Y_{t-1} + e_t
  (c) constant + trend  dY_t = c + b*t + delta * Y_{t-1} + e_t

The tau statistic delta_hat / se(delta_hat) is compared one-sided against
the left-tail critical value; rejection on all three models is the
mean-reversion indicator.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientData, RankDeficient, SeriesTooShort, UnsupportedLevel


class DFModel(enum.Enum):
    NO_CONST = "a"
    CONST = "b"
    CONST_TREND = "c"


# 1% left-tail critical values for the tau statistic, transcribed from the
# standard Dickey-Fuller tables (Fuller 1976, Table 8.5.2; originally
# Dickey 1976). Keyed by sample-size bucket; lookup is conservative (next
# smaller bucket). The last row is the asymptotic value, applied from
# n = 10_000 up.
_CRITICAL_1PCT = {
    DFModel.NO_CONST: [(25, -2.66), (50, -2.62), (100, -2.60), (250, -2.58), (500, -2.58), (10_000, -2.58)],
    DFModel.CONST: [(25, -3.75), (50, -3.58), (100, -3.51), (250, -3.46), (500, -3.44), (10_000, -3.43)],
    DFModel.CONST_TREND: [(25, -4.38), (50, -4.15), (100, -4.04), (250, -3.99), (500, -3.98), (10_000, -3.96)],
}


@dataclass(frozen=True)
class DFResult:
    variant: DFModel
    delta_hat: float
    se_delta: float
    tau: float
    critical_value_1pct: float
    reject_null: bool
    n_used: int


def ols_fit(X, y):
    """OLS via the normal equations on a small design matrix.

    Returns (coefficients, coefficient standard errors, residual variance),
    with the unbiased residual-variance estimator. Raises RankDeficient on
    collinear regressors and InsufficientData when rows <= columns.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    n, k = X.shape
    if n < k + 1:
        raise InsufficientData(f"{n} rows for {k} regressors")
    if np.linalg.matrix_rank(X) < k:
        raise RankDeficient("regressor matrix is not full column rank")
    xtx = X.T @ X
    xty = X.T @ y
    beta = np.linalg.solve(xtx, xty)
    resid = y - X @ beta
    s2 = float(resid @ resid) / (n - k)
    se = np.sqrt(s2 * np.diag(np.linalg.inv(xtx)))
    return beta, se, s2


def critical_value(variant: DFModel, n, level=0.01):
    """Tabulated 1% tau critical value at the largest bucket <= n."""
    if level != 0.01:
        raise UnsupportedLevel(f"only the 1% level is tabulated, got {level}")
    table = _CRITICAL_1PCT[variant]
    chosen = table[0][1]
    for bucket, cv in table:
        if n >= bucket:
            chosen = cv
    return chosen


def df_test(series, variant: DFModel, alpha_level=0.01) -> DFResult:
    """Run one Dickey-Fuller regression and the 1% decision.

    `series` is a VariationSeries or a plain value sequence.
    """
    y = np.asarray(getattr(series, "values", series), dtype=np.float64)
    if len(y) < 25:
        raise SeriesTooShort(f"need >= 25 observations, got {len(y)}")
    dy = np.diff(y)
    lag = y[:-1]
    n = len(dy)

    cols = [lag]
    if variant in (DFModel.CONST, DFModel.CONST_TREND):
        cols.append(np.ones(n))
    if variant is DFModel.CONST_TREND:
        cols.append(np.arange(1, n + 1, dtype=np.float64))
    X = np.column_stack(cols)

    beta, se, _ = ols_fit(X, dy)
    delta_hat = float(beta[0])
    se_delta = float(se[0])
    tau = delta_hat / se_delta
    cv = critical_value(variant, n, alpha_level)
    return DFResult(
        variant=variant,
        delta_hat=delta_hat,
        se_delta=se_delta,
        tau=tau,
        critical_value_1pct=cv,
        reject_null=tau < cv,
        n_used=n,
    )
