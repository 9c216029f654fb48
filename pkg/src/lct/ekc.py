"""Quadratic environmental-Kuznets diagnostic on index pairs.

Fits Q = a + b*E + c*E**2 by ordinary least squares, where E is the economy
index and Q the emission index, then reads the curve's shape off the
curvature sign and the turning point -b / (2c):

* c < -tol, turning point inside the observed E range  -> inverted_u
* c < -tol, turning point above the range              -> rising (pre-peak)
* c < -tol, turning point below the range              -> falling (post-peak)
* c > tol                                              -> u_shaped
* |c| <= tol                                           -> flat

The regression is a diagnostic, not an estimator with standard errors; it
formalizes the visual curve-reading step of the workflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RankDeficientError, TooFewPointsError

SHAPE_RISING = "rising"
SHAPE_FALLING = "falling"
SHAPE_INVERTED_U = "inverted_u"
SHAPE_U = "u_shaped"
SHAPE_FLAT = "flat"

DEFAULT_CURVATURE_TOL = 1e-8


@dataclass(frozen=True)
class EKCFit:
    """Quadratic fit summary.

    turning_point is NaN for flat fits. turning_point_in_range states
    whether it falls inside [min E, max E]; shape already accounts for it.
    """

    a: float
    b: float
    c: float
    r_squared: float
    turning_point: float
    turning_point_in_range: bool
    shape: str
    n_points: int


def fit_ekc(
    te_values,
    tcde_values,
    curvature_tol: float = DEFAULT_CURVATURE_TOL,
) -> EKCFit:
    """OLS quadratic of the emission index on the economy index.

    Needs at least three distinct E values to identify a parabola; a design
    matrix that is numerically rank-deficient beyond that (pathological
    spacing) is reported rather than silently regularized.
    """
    e = np.asarray(te_values, dtype=float).reshape(-1)
    q = np.asarray(tcde_values, dtype=float).reshape(-1)
    if e.size != q.size:
        raise TooFewPointsError(
            f"ekc: {e.size} economy values vs {q.size} emission values"
        )
    if not (np.all(np.isfinite(e)) and np.all(np.isfinite(q))):
        raise TooFewPointsError("ekc: inputs contain non-finite values")
    if np.unique(e).size < 3:
        raise TooFewPointsError(
            f"ekc: need at least 3 distinct economy-index values, got {np.unique(e).size}"
        )

    design = np.column_stack([np.ones_like(e), e, e * e])
    if np.linalg.matrix_rank(design) < 3:
        raise RankDeficientError(
            "ekc: quadratic design matrix is rank deficient; the economy index "
            "values do not identify a parabola"
        )
    coef, *_ = np.linalg.lstsq(design, q, rcond=None)
    a, b, c = (float(v) for v in coef)

    fitted = design @ coef
    residuals = q - fitted
    ss_res = float(residuals @ residuals)
    ss_tot = float(((q - q.mean()) ** 2).sum())
    # A constant series rarely yields ss_tot of exactly 0.0: the float mean
    # of n identical values can differ from them in the last bit.  Both
    # series live on index scales of order one, so an absolute cutoff works.
    if ss_tot <= 1e-24:
        r_squared = 1.0 if ss_res <= 1e-24 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    r_squared = min(1.0, max(0.0, r_squared))

    lo, hi = float(e.min()), float(e.max())
    if abs(c) <= curvature_tol:
        turning_point = float("nan")
        in_range = False
        shape = SHAPE_FLAT
    else:
        turning_point = -b / (2.0 * c)
        in_range = lo <= turning_point <= hi
        if c > 0.0:
            shape = SHAPE_U
        elif in_range:
            shape = SHAPE_INVERTED_U
        elif turning_point > hi:
            shape = SHAPE_RISING
        else:
            shape = SHAPE_FALLING

    return EKCFit(
        a=a,
        b=b,
        c=c,
        r_squared=r_squared,
        turning_point=turning_point,
        turning_point_in_range=in_range,
        shape=shape,
        n_points=int(e.size),
    )
