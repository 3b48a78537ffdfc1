"""Log-log scaling fits for measured-vs-predicted sweep validation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFitError


@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    ratios: tuple              # measured / predicted per point
    ratio_spread: float        # max ratio / min ratio, >= 1


def fit_scaling(x_values, measured, predicted) -> FitResult:
    """Least-squares fit of ln(measured) against ln(x), plus per-point ratios.

    Needs at least 4 distinct positive x values and nonzero variance in ln(x).
    """
    x = np.asarray(x_values, dtype=float)
    y = np.asarray(measured, dtype=float)
    p = np.asarray(predicted, dtype=float)
    if len(x) != len(y) or len(x) != len(p):
        raise ValueError("x, measured, predicted must have equal length")
    if len(np.unique(x)) < 4:
        raise DegenerateFitError(f"need >= 4 distinct x values, got {len(np.unique(x))}")
    if np.any(x <= 0) or np.any(y <= 0) or np.any(p <= 0):
        raise DegenerateFitError("log-log fit needs strictly positive values")
    lx = np.log(x)
    ly = np.log(y)
    if math.isclose(float(lx.var()), 0.0):
        raise DegenerateFitError("zero variance in ln(x)")
    slope, intercept = np.polyfit(lx, ly, 1)
    ratios = y / p
    spread = float(ratios.max() / ratios.min())
    return FitResult(slope=float(slope), intercept=float(intercept),
                     ratios=tuple(ratios.tolist()), ratio_spread=spread)
