"""Evaluation metrics, correlation analysis, and least-squares fitting."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import (
    AllZeroResiduals,
    ConstantInput,
    EmptyInput,
    LengthMismatch,
    RankDeficient,
    TooFewObservations,
)


def _as_1d(name: str, values) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class Metrics:
    """Point-forecast error summary.

    ``r2`` is None when the true values are constant (the score is
    undefined there); ``constant_target`` records that condition.
    """

    mae: float
    mse: float
    rmse: float
    r2: float | None
    n: int

    @property
    def constant_target(self) -> bool:
        return self.r2 is None


def metrics(y_true, y_pred) -> Metrics:
    """MAE, MSE, RMSE and coefficient of determination for one prediction set."""
    yt = _as_1d("y_true", y_true)
    yp = _as_1d("y_pred", y_pred)
    if len(yt) != len(yp):
        raise LengthMismatch(f"y_true has {len(yt)} rows, y_pred has {len(yp)}")
    if len(yt) == 0:
        raise EmptyInput("metrics needs at least one observation")
    err = yt - yp
    mae = float(np.mean(np.abs(err)))
    mse = float(np.mean(err * err))
    rmse = math.sqrt(mse)
    sst = float(np.sum((yt - yt.mean()) ** 2))
    if sst == 0.0:
        r2 = None
    else:
        r2 = 1.0 - float(np.sum(err * err)) / sst
    return Metrics(mae=mae, mse=mse, rmse=rmse, r2=r2, n=len(yt))


def pearson(x, y) -> float:
    """Sample Pearson correlation, clamped to [-1, 1].

    Raises ConstantInput when either series has zero variance.
    """
    xa = _as_1d("x", x)
    ya = _as_1d("y", y)
    if len(xa) != len(ya):
        raise LengthMismatch(f"x has {len(xa)} rows, y has {len(ya)}")
    if len(xa) < 2:
        raise TooFewObservations(f"need at least 2 observations, got {len(xa)}")
    xc = xa - xa.mean()
    yc = ya - ya.mean()
    sx = float(np.sqrt(np.sum(xc * xc) / (len(xa) - 1)))
    sy = float(np.sqrt(np.sum(yc * yc) / (len(ya) - 1)))
    if sx == 0.0 or sy == 0.0:
        which = "x" if sx == 0.0 else "y"
        raise ConstantInput(f"{which} is constant; correlation undefined")
    r = float(np.sum(xc * yc) / (len(xa) - 1)) / (sx * sy)
    return max(-1.0, min(1.0, r))


@dataclass(frozen=True)
class CorrelationRow:
    """Correlation of one variable with the target, per day-type scope.

    A None cell means the correlation was undefined on that scope
    (constant variable or constant target); the row is kept in place.
    """

    variable: str
    total: float | None
    workdays: float | None
    weekends: float | None


@dataclass(frozen=True)
class CorrelationTable:
    rows: tuple[CorrelationRow, ...]

    def __iter__(self):
        return iter(self.rows)

    def row(self, variable: str) -> CorrelationRow:
        for r in self.rows:
            if r.variable == variable:
                return r
        raise KeyError(variable)


def correlation_table(names, X, y, weekend_mask) -> CorrelationTable:
    """Per-variable correlation with the target over all/workday/weekend rows.

    Parameters
    ----------
    names : sequence of str
        Column names of X, in presentation order.
    X : ndarray of shape (n, p)
    y : ndarray of shape (n,)
    weekend_mask : boolean ndarray of shape (n,)
        True where the row belongs to a weekend day.
    """
    Xa = np.asarray(X, dtype=float)
    ya = _as_1d("y", y)
    wk = np.asarray(weekend_mask, dtype=bool)
    if Xa.ndim != 2:
        raise ValueError(f"X must be 2-dimensional, got shape {Xa.shape}")
    if Xa.shape[1] != len(names):
        raise LengthMismatch(f"{len(names)} names for {Xa.shape[1]} columns")
    if Xa.shape[0] != len(ya) or len(wk) != len(ya):
        raise LengthMismatch(f"X has {Xa.shape[0]} rows, y has {len(ya)}")

    scopes = {
        "total": np.ones(len(ya), dtype=bool),
        "workdays": ~wk,
        "weekends": wk,
    }
    rows = []
    for j, name in enumerate(names):
        cells = {}
        for scope, mask in scopes.items():
            try:
                cells[scope] = pearson(Xa[mask, j], ya[mask])
            except (ConstantInput, TooFewObservations):
                cells[scope] = None
        rows.append(CorrelationRow(variable=name, **cells))
    return CorrelationTable(rows=tuple(rows))


def durbin_watson(residuals) -> float:
    """Durbin-Watson statistic: sum of squared successive differences over SSE.

    Raises AllZeroResiduals when every residual is exactly zero.
    """
    e = _as_1d("residuals", residuals)
    if len(e) < 2:
        raise TooFewObservations(f"need at least 2 residuals, got {len(e)}")
    sse = float(np.sum(e * e))
    if sse == 0.0:
        raise AllZeroResiduals("all residuals are zero; statistic undefined")
    diff = np.diff(e)
    return float(np.sum(diff * diff) / sse)


@dataclass(frozen=True)
class OlsFit:
    """Ordinary-least-squares fit summary.

    ``coef`` puts the intercept first, then one slope per column of X.
    ``rmse`` is the residual standard error sqrt(SSE / (n - p - 1)).
    ``dw`` is None for an exact fit (all residuals zero).
    """

    coef: tuple[float, ...]
    r2: float
    r: float
    adj_r2: float
    rmse: float
    dw: float | None
    n_obs: int
    n_features: int

    def predict(self, X) -> np.ndarray:
        Xa = np.asarray(X, dtype=float)
        b = np.asarray(self.coef)
        return b[0] + Xa @ b[1:]


def ols_fit(X, y) -> OlsFit:
    """Fit y = b0 + X b by least squares with full diagnostics.

    Raises TooFewObservations unless n > p + 1, and RankDeficient when
    the intercept-augmented design is column-rank deficient (the error
    carries the offending design column indices, 0 = intercept).
    """
    Xa = np.asarray(X, dtype=float)
    ya = _as_1d("y", y)
    if Xa.ndim != 2:
        raise ValueError(f"X must be 2-dimensional, got shape {Xa.shape}")
    n, p = Xa.shape
    if n != len(ya):
        raise LengthMismatch(f"X has {n} rows, y has {len(ya)}")
    if n <= p + 1:
        raise TooFewObservations(f"need more than {p + 1} observations, got {n}")

    design = np.column_stack([np.ones(n), Xa])
    _, R, piv = scipy.linalg.qr(design, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    tol = diag[0] * max(n, p + 1) * np.finfo(float).eps if diag.size else 0.0
    rank = int(np.sum(diag > tol))
    if rank < p + 1:
        bad = tuple(sorted(int(c) for c in piv[rank:]))
        raise RankDeficient(bad)

    beta, _, _, _ = np.linalg.lstsq(design, ya, rcond=None)
    resid = ya - design @ beta
    sse = float(np.sum(resid * resid))
    sst = float(np.sum((ya - ya.mean()) ** 2))
    if sst == 0.0:
        raise ConstantInput("y is constant; r-squared undefined")
    r2 = 1.0 - sse / sst
    adj_r2 = 1.0 - (1.0 - r2) * (n - 1) / (n - p - 1)
    rmse = math.sqrt(sse / (n - p - 1))
    try:
        dw = durbin_watson(resid)
    except AllZeroResiduals:
        dw = None
    return OlsFit(
        coef=tuple(float(b) for b in beta),
        r2=float(r2),
        r=math.sqrt(max(r2, 0.0)),
        adj_r2=float(adj_r2),
        rmse=rmse,
        dw=dw,
        n_obs=n,
        n_features=p,
    )
