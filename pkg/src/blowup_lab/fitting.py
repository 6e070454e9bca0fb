"""Ordinary least-squares line fits used for growth-exponent and scaling-law estimates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import FitError


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    r2: float
    n: int


def linear_fit(x, y) -> LinearFit:
    """Fit ``y = slope * x + intercept``.

    Raises FitError for fewer than two points, non-finite data or a
    zero-variance abscissa ("degenerate abscissa").
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise FitError("x and y must be 1-d arrays of equal length")
    if x.size < 2:
        raise FitError("need at least two points for a line fit")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise FitError("non-finite values in fit data")
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx <= 1e-300 or np.ptp(x) <= 1e-14 * max(1.0, float(np.max(np.abs(x)))):
        raise FitError("degenerate abscissa: all x values coincide")
    yc = y - y.mean()
    slope = float(xc @ yc) / sxx
    intercept = float(y.mean() - slope * x.mean())
    ss_res = float(np.sum((yc - slope * xc) ** 2))
    ss_tot = float(yc @ yc)
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return LinearFit(slope, intercept, r2, int(x.size))


def loglog_fit(x, y) -> LinearFit:
    """Power-law fit ``y ~ C x**slope`` by least squares on logarithms."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(x <= 0) or np.any(y <= 0):
        raise FitError("log-log fit needs strictly positive data")
    return linear_fit(np.log(x), np.log(y))
