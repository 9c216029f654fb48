"""Coupling coordination between two subsystem indices on [0, 1].

For a tourism-economy index U1 and an emission index U2 the measures are

    C = sqrt((1 - |U1 - U2|) * U1 * U2) / max(U1, U2)
    T = alpha * U1 + beta * U2,  alpha = U2 / (U1 + U2), beta = U1 / (U1 + U2)
    D = sqrt(C * T)

C rewards balance between the two indices: it is exactly 1 when they are
equal and positive, and decays toward 0 as they diverge. The cross-weighted
contributions make T algebraically the harmonic mean 2 U1 U2 / (U1 + U2),
which is a useful identity for testing. D blends balance with overall level
and is banded into ten named grades:

    [0.0, 0.1) extreme   [0.1, 0.2) severe    [0.2, 0.3) moderate
    [0.3, 0.4) slight    [0.4, 0.5) imminent      -> imbalance
    [0.5, 0.6) barely    [0.6, 0.7) primary   [0.7, 0.8) mediocre
    [0.8, 0.9) good      [0.9, 1.0] super         -> coordination

Bands are closed on the left and open on the right, except the last which
also contains 1.0.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from .errors import (
    BothZeroError,
    OutOfRangeError,
    RegionMismatchError,
    YearMismatchError,
)
from .index import IndexSeries

#: (upper edge, level number, grade, condition); lower edge is the previous entry.
LEVELS = (
    (0.1, 1, "Extreme imbalance", "imbalance"),
    (0.2, 2, "Severe imbalance", "imbalance"),
    (0.3, 3, "Moderate imbalance", "imbalance"),
    (0.4, 4, "Slight imbalance", "imbalance"),
    (0.5, 5, "Imminent imbalance", "imbalance"),
    (0.6, 6, "Barely coordination", "coordination"),
    (0.7, 7, "Primary coordination", "coordination"),
    (0.8, 8, "Mediocre coordination", "coordination"),
    (0.9, 9, "Good coordination", "coordination"),
    (1.0, 10, "Super coordination", "coordination"),
)


@dataclass(frozen=True)
class CouplingResult:
    """All derived coupling quantities for one (U1, U2) pair.

    degenerate marks the U1 = U2 = 0 convention case, where C, T and D are
    defined as 0 and the contributions fall back to an even split.
    """

    u1: float
    u2: float
    c: float
    alpha: float
    beta: float
    t: float
    d: float
    level: int
    level_name: str
    condition: str
    degenerate: bool = False


def _check_unit_interval(name: str, v: float) -> float:
    v = float(v)
    if not math.isfinite(v) or v < 0.0 or v > 1.0:
        raise OutOfRangeError(f"coupling: {name} must lie in [0, 1], got {v!r}")
    return v


def coupling_degree(u1: float, u2: float) -> float:
    """Balance term C in [0, 1]; 1 exactly when u1 == u2 > 0.

    Both inputs zero has no defined balance; by convention C = 0 with a
    warning, so panel sweeps over sparse data do not abort.
    """
    u1 = _check_unit_interval("u1", u1)
    u2 = _check_unit_interval("u2", u2)
    if u1 == 0.0 and u2 == 0.0:
        warnings.warn(
            "coupling: both indices are zero; C defined as 0 by convention",
            RuntimeWarning,
            stacklevel=2,
        )
        return 0.0
    return math.sqrt((1.0 - abs(u1 - u2)) * u1 * u2) / max(u1, u2)


def contributions(u1: float, u2: float) -> tuple[float, float]:
    """Cross weights (alpha, beta) = (u2, u1) / (u1 + u2).

    Each subsystem is weighted by the other's level, so the lagging side
    drags the overall level T down harder.
    """
    u1 = _check_unit_interval("u1", u1)
    u2 = _check_unit_interval("u2", u2)
    total = u1 + u2
    if total == 0.0:
        raise BothZeroError("coupling: contributions undefined for u1 = u2 = 0")
    return u2 / total, u1 / total


def overall_level(u1: float, u2: float) -> float:
    """T = alpha*u1 + beta*u2, algebraically the harmonic mean of the pair."""
    alpha, beta = contributions(u1, u2)
    return alpha * u1 + beta * u2


def classify(d: float) -> tuple[int, str, str]:
    """Map a coordination degree to (level, grade name, condition).

    Comparisons run against the literal band edges rather than int(10 * d)
    so values like 0.3, whose float product 10 * 0.3 lands just below 3,
    still classify into the band their decimal spelling names.
    """
    d = _check_unit_interval("d", d)
    for upper, level, name, condition in LEVELS:
        if d < upper:
            return level, name, condition
    return LEVELS[-1][1:]  # d == 1.0 joins the top band


def ccd(u1: float, u2: float) -> CouplingResult:
    """Full coupling computation: C, contributions, T, D and the band.

    The degenerate pair (0, 0) yields C = T = D = 0 with an even alpha/beta
    split (the limit along u1 = u2 -> 0) and the result flagged degenerate.
    """
    u1 = _check_unit_interval("u1", u1)
    u2 = _check_unit_interval("u2", u2)
    if u1 == 0.0 and u2 == 0.0:
        level, name, condition = classify(0.0)
        return CouplingResult(
            u1=u1, u2=u2, c=0.0, alpha=0.5, beta=0.5, t=0.0, d=0.0,
            level=level, level_name=name, condition=condition, degenerate=True,
        )
    c = coupling_degree(u1, u2)
    alpha, beta = contributions(u1, u2)
    t = alpha * u1 + beta * u2
    d = math.sqrt(c * t)
    level, name, condition = classify(d)
    return CouplingResult(
        u1=u1, u2=u2, c=c, alpha=alpha, beta=beta, t=t, d=d,
        level=level, level_name=name, condition=condition,
    )


def ccd_series(te: IndexSeries, tcde: IndexSeries) -> list[CouplingResult]:
    """Pair two index series year by year and compute the coupling for each.

    The series must describe the same region over the same years; mixing
    regions or misaligned spans is a hard error rather than a silent join.
    """
    if te.region != tcde.region:
        raise RegionMismatchError(
            f"coupling: index series regions differ: {te.region!r} vs {tcde.region!r}"
        )
    if te.years != tcde.years:
        raise YearMismatchError(
            f"coupling: region {te.region!r}: year spans differ: "
            f"{list(te.years)} vs {list(tcde.years)}"
        )
    return [ccd(float(a), float(b)) for a, b in zip(te.values, tcde.values)]
