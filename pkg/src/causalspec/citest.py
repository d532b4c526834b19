"""Conditional-independence tests against sampled or recorded data.

Two methods are provided.  ``fisher_z`` handles real-valued variables via
partial correlation: regress x and y on the conditioning set, correlate
the residuals, and apply the variance-stabilizing z-transform with
effective sample size n - |Z| - 3.  ``g_test`` handles categorical
variables via the conditional likelihood-ratio statistic; continuous
conditioning variables are quantile-binned first (default 4 bins), a
documented approximation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import CiTestError
from .graph import Dag
from .implications import CiStatement, implied_independencies
from .scm import Dataset

DEFAULT_ALPHA = 0.01
DEFAULT_BINS = 4
_CATEGORICAL_MAX_LEVELS = 10


@dataclass(frozen=True)
class CiTestResult:
    statement: CiStatement
    statistic: float
    p_value: float
    rejected: bool
    method: str  # fisher_z | g_test
    alpha: float = DEFAULT_ALPHA
    n: int = 0

    def render(self) -> str:
        verdict = "rejected" if self.rejected else "not rejected"
        return (
            f"{self.statement.render()}: {self.method} stat={self.statistic:.3f} "
            f"p={self.p_value:.4f} -> {verdict} at alpha={self.alpha:g}"
        )


def _column(data: Dataset, name: str) -> np.ndarray:
    if name not in data.columns:
        raise CiTestError(f"dataset lacks column {name!r}")
    return np.asarray(data.columns[name], dtype=float)


def is_categorical(col: np.ndarray, max_levels: int = _CATEGORICAL_MAX_LEVELS) -> bool:
    """Integer-coded columns with few distinct values count as categorical."""
    arr = np.asarray(col)
    if np.issubdtype(arr.dtype, np.integer):
        return len(np.unique(arr)) <= max_levels
    vals = np.unique(arr)
    return len(vals) <= max_levels and np.all(vals == np.round(vals))


def _residualize(target: np.ndarray, given: np.ndarray | None) -> np.ndarray:
    if given is None or given.shape[1] == 0:
        return target - target.mean()
    design = np.column_stack([np.ones(len(target)), given])
    coef, *_ = np.linalg.lstsq(design, target, rcond=None)
    return target - design @ coef


def fisher_z(
    data: Dataset,
    statement: CiStatement,
    alpha: float = DEFAULT_ALPHA,
) -> CiTestResult:
    """Partial-correlation test for real-valued variables."""
    n = data.n
    k = len(statement.given)
    if n <= k + 3:
        raise CiTestError(f"need more than |given|+3 = {k + 3} samples, have {n}")
    x = _column(data, statement.x)
    y = _column(data, statement.y)
    if x.std() == 0.0 or y.std() == 0.0:
        raise CiTestError("zero-variance column in tested pair")
    given = None
    if k:
        given = np.column_stack([_column(data, z) for z in statement.given])
    rx = _residualize(x, given)
    ry = _residualize(y, given)
    denom = math.sqrt(float(rx @ rx) * float(ry @ ry))
    if denom == 0.0:
        raise CiTestError("zero residual variance after conditioning")
    r = float(rx @ ry) / denom
    r = min(1.0 - 1e-12, max(-1.0 + 1e-12, r))
    stat = math.sqrt(n - k - 3) * math.atanh(r)
    p = 2.0 * float(stats.norm.sf(abs(stat)))
    return CiTestResult(statement, stat, p, p < alpha, "fisher_z", alpha, n)


def _codes(col: np.ndarray, bins: int) -> np.ndarray:
    """Integer codes; continuous columns are quantile-binned."""
    if is_categorical(col):
        _, codes = np.unique(np.asarray(col), return_inverse=True)
        return codes
    qs = np.quantile(col, np.linspace(0, 1, bins + 1)[1:-1])
    return np.searchsorted(qs, col, side="right")


def g_test(
    data: Dataset,
    statement: CiStatement,
    alpha: float = DEFAULT_ALPHA,
    bins: int = DEFAULT_BINS,
) -> CiTestResult:
    """Conditional likelihood-ratio (G) test for categorical variables."""
    n = data.n
    if n <= len(statement.given) + 3:
        raise CiTestError(f"need more than {len(statement.given) + 3} samples, have {n}")
    for name in (statement.x, statement.y):
        if name not in data.columns:
            raise CiTestError(f"dataset lacks column {name!r}")
    xcol = np.asarray(data.columns[statement.x])
    ycol = np.asarray(data.columns[statement.y])
    if not is_categorical(xcol) or not is_categorical(ycol):
        raise CiTestError("g_test needs categorical x and y columns")
    if len(np.unique(xcol)) < 2 or len(np.unique(ycol)) < 2:
        raise CiTestError("zero-variance column in tested pair")
    x = _codes(xcol, bins)
    y = _codes(ycol, bins)
    if statement.given:
        strata_codes = [_codes(_column(data, z), bins) for z in statement.given]
        key = np.zeros(n, dtype=np.int64)
        for c in strata_codes:
            key = key * (int(c.max()) + 1) + c
    else:
        key = np.zeros(n, dtype=np.int64)

    stat = 0.0
    df = 0
    for s in np.unique(key):
        m = key == s
        xs, ys = x[m], y[m]
        xv, xi = np.unique(xs, return_inverse=True)
        yv, yi = np.unique(ys, return_inverse=True)
        if len(xv) < 2 or len(yv) < 2:
            continue
        counts = np.zeros((len(xv), len(yv)))
        np.add.at(counts, (xi, yi), 1.0)
        total = counts.sum()
        expected = np.outer(counts.sum(axis=1), counts.sum(axis=0)) / total
        nz = counts > 0
        stat += 2.0 * float((counts[nz] * np.log(counts[nz] / expected[nz])).sum())
        df += (len(xv) - 1) * (len(yv) - 1)
    if df == 0:
        p = 1.0
        stat = 0.0
    else:
        p = float(stats.chi2.sf(stat, df))
    return CiTestResult(statement, stat, p, p < alpha, "g_test", alpha, n)


def ci_test(
    data: Dataset,
    statement: CiStatement,
    alpha: float = DEFAULT_ALPHA,
    method: str = "auto",
) -> CiTestResult:
    """Run one test; ``auto`` picks g_test when both tested columns are categorical."""
    for name in (statement.x, statement.y, *statement.given):
        if name not in data.columns:
            raise CiTestError(f"dataset lacks column {name!r}")
    if method == "auto":
        both_cat = is_categorical(np.asarray(data.columns[statement.x])) and is_categorical(
            np.asarray(data.columns[statement.y])
        )
        method = "g_test" if both_cat else "fisher_z"
    if method == "fisher_z":
        return fisher_z(data, statement, alpha)
    if method == "g_test":
        return g_test(data, statement, alpha)
    raise CiTestError(f"unknown method {method!r}")


def validate_model(
    dag: Dag,
    data: Dataset,
    scope: list[str] | None = None,
    alpha: float = DEFAULT_ALPHA,
    max_given: int | None = None,
    method: str = "auto",
) -> list[CiTestResult]:
    """Test every implied independence over the scope against the data.

    The scope defaults to the observed variables present in the dataset.
    """
    if scope is None:
        scope = [n for n in dag.nodes if n in dag.observed and n in data.columns]
    if len(scope) < 2:
        return []
    statements = implied_independencies(dag, scope, max_given)
    return [ci_test(data, st, alpha, method) for st in statements]


def violation_count(results: list[CiTestResult]) -> int:
    return sum(1 for r in results if r.rejected)
