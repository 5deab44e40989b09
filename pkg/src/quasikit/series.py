"""Partial-sum reports with a declared truncation-aware trend verdict.

Divergence of an infinite series is undecidable from finitely many terms, so
the verdict is an explicit heuristic over the computed horizon:

* fit the partial sums against log k on the last quartile of the horizon;
  slope >= ``sigma_div`` means ``diverging_trend``;
* a final increment below ``eps_conv`` relative to the partial sum means
  ``converging_trend``;
* anything else is ``inconclusive``.

Reports carry the fitted slope so callers can re-threshold.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ValidationError

DIVERGING = "diverging_trend"
CONVERGING = "converging_trend"
INCONCLUSIVE = "inconclusive"

# Defaults for the verdict heuristic. sigma_div = 0.01 separates the slowest
# divergent catalog growth (double-log weights) from the Gevrey convergent
# ones at desk-scale horizons; eps_conv matches double-precision plateaus.
SIGMA_DIV = 0.01
EPS_CONV = 1e-6


@dataclass(frozen=True)
class SeriesReport:
    """First K terms of a nonnegative series plus a trend verdict."""

    terms: tuple[float, ...]
    partial_sums: tuple[float, ...]
    verdict: str
    slope_estimate: float

    def terms_array(self) -> np.ndarray:
        return np.asarray(self.terms, dtype=float)

    def partial_array(self) -> np.ndarray:
        return np.asarray(self.partial_sums, dtype=float)

    def to_json(self) -> dict:
        return {
            "terms": list(self.terms),
            "partial_sums": list(self.partial_sums),
            "verdict": self.verdict,
            "slope_estimate": self.slope_estimate,
        }


def _tail_slope(xs: np.ndarray, sums: np.ndarray) -> float:
    """Least-squares slope of sums against xs over the last quartile."""
    k = len(sums)
    start = (3 * (k - 1)) // 4
    if k - start < 2:
        start = max(0, k - 2)
    x = xs[start:]
    y = sums[start:]
    xbar = x.mean()
    ybar = y.mean()
    denom = float(((x - xbar) ** 2).sum())
    if denom == 0.0:
        return 0.0
    return float(((x - xbar) * (y - ybar)).sum() / denom)


def diagnose_series(
    terms: Sequence[float],
    xs: Sequence[float] | None = None,
    sigma_div: float = SIGMA_DIV,
    eps_conv: float = EPS_CONV,
) -> SeriesReport:
    """Build a SeriesReport from nonnegative terms.

    ``xs`` are the fit abscissae; by default log of the 1-based ordinal.
    """
    t = np.asarray(terms, dtype=float)
    if t.size < 2:
        raise ValidationError("diagnose_series needs at least 2 terms")
    if np.any(t < 0):
        raise ValidationError("series terms must be nonnegative")
    sums = np.cumsum(t)
    if xs is None:
        x = np.log(np.arange(1, t.size + 1, dtype=float))
    else:
        x = np.asarray(xs, dtype=float)
        if x.shape != t.shape:
            raise ValidationError("xs must match terms in length")

    slope = _tail_slope(x, sums)
    total = float(sums[-1])
    if slope >= sigma_div:
        verdict = DIVERGING
    elif total == 0.0 or float(t[-1]) < eps_conv * total:
        verdict = CONVERGING
    else:
        verdict = INCONCLUSIVE
    return SeriesReport(
        terms=tuple(float(v) for v in t),
        partial_sums=tuple(float(v) for v in sums),
        verdict=verdict,
        slope_estimate=slope,
    )
