"""Entropy-weighted composite indices over a years x indicators matrix.

The weighting follows the usual information-entropy recipe on min-max
standardized data, shifted by a small offset alpha so logarithms stay
defined:

    X'_ij = (x_ij - min_j) / (max_j - min_j) + alpha        (positive)
    X'_ij = (max_j - x_ij) / (max_j - min_j) + alpha        (negative)
    R_ij  = X'_ij / sum_i X'_ij
    e_j   = -(1 / ln n) * sum_i R_ij ln R_ij
    w_j   = (1 - e_j) / sum_j (1 - e_j)

Two aggregation methods are supported. The classic score is sum_j w_j X'_ij.
The improved score replaces the standardization with

    X''_ij = x_ij / (max_j + min_j)

which for strictly positive data lands in the open interval (0, 1) and keeps
a year's score comparable across separately-normalized series: both the
floor and ceiling of the raw data move the denominator, so degenerate 0 and
1 scores cannot occur. Negative-attribute columns enter the improved score
as 1 - X''. Weights always come from the standardized matrix unless the
caller explicitly asks otherwise (a sensitivity switch).

Weights are computed per region: each region's matrix is standardized and
weighted on its own, never pooled.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AllMaxEntropyError,
    ConstantColumnError,
    NonPositiveOffsetError,
    NonPositiveValueError,
    SchemaMismatchError,
    SingleYearError,
)
from .panel import NEGATIVE, POSITIVE, PanelDataset

DEFAULT_OFFSET = 1e-5

METHOD_CLASSIC = "classic"
METHOD_IMPROVED = "improved"


@dataclass(frozen=True)
class StandardizedMatrix:
    """Min-max standardized values plus the bookkeeping entropy needs.

    values lie in [offset, 1 + offset]. constant_mask marks columns that had
    max == min and were only admitted in lenient mode; they carry no
    information and are forced to zero weight downstream.
    """

    values: np.ndarray
    offset: float
    attributes: tuple[str, ...]
    constant_mask: np.ndarray

    @property
    def n_years(self) -> int:
        return self.values.shape[0]

    @property
    def n_indicators(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class EntropyWeights:
    """Entropy e_j, weight w_j and the contribution matrix R_ij per column."""

    weights: np.ndarray
    entropies: np.ndarray
    contributions: np.ndarray


@dataclass(frozen=True)
class IndexSeries:
    """One region's composite index over years, with the weights used."""

    region: str
    years: tuple[int, ...]
    values: np.ndarray
    weights: EntropyWeights
    method: str


def _as_matrix(matrix) -> np.ndarray:
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.size == 0:
        raise SchemaMismatchError(
            f"index: expected a non-empty 2-D years x indicators matrix, got shape {m.shape}"
        )
    if not np.all(np.isfinite(m)):
        raise NonPositiveValueError("index: matrix contains non-finite values")
    return m


def _attribute_tags(n: int, attributes) -> tuple[str, ...]:
    if attributes is None:
        return tuple(POSITIVE for _ in range(n))
    tags = tuple(attributes)
    if len(tags) != n:
        raise SchemaMismatchError(
            f"index: {len(tags)} attribute tags for {n} indicator columns"
        )
    for t in tags:
        if t not in (POSITIVE, NEGATIVE):
            raise SchemaMismatchError(f"index: unknown attribute tag {t!r}")
    return tags


def standardize_minmax(
    matrix,
    attributes=None,
    offset: float = DEFAULT_OFFSET,
    strict: bool = True,
) -> StandardizedMatrix:
    """Min-max standardize each column, mirroring negative attributes.

    A column with max == min has no spread to standardize. In strict mode
    that is an error; in lenient mode the column is kept at the midpoint
    value 0.5 + offset and flagged so the entropy step assigns it e = 1 and
    weight 0.
    """
    m = _as_matrix(matrix)
    if not (offset > 0.0) or not math.isfinite(offset):
        raise NonPositiveOffsetError(f"index: offset must be > 0, got {offset!r}")
    tags = _attribute_tags(m.shape[1], attributes)

    lo = m.min(axis=0)
    hi = m.max(axis=0)
    spread = hi - lo
    constant = spread == 0.0
    if strict and constant.any():
        j = int(np.nonzero(constant)[0][0])
        raise ConstantColumnError(
            f"index: column {j} is constant at {lo[j]!r}; standardization is "
            "undefined (rerun in lenient mode to zero-weight it)"
        )

    safe = np.where(constant, 1.0, spread)
    out = np.empty_like(m)
    for j, tag in enumerate(tags):
        if tag == POSITIVE:
            out[:, j] = (m[:, j] - lo[j]) / safe[j]
        else:
            out[:, j] = (hi[j] - m[:, j]) / safe[j]
    out[:, constant] = 0.5
    out += offset
    return StandardizedMatrix(
        values=out, offset=offset, attributes=tags, constant_mask=constant
    )


def entropy_weights(std: StandardizedMatrix) -> EntropyWeights:
    """Information-entropy weights from a standardized matrix.

    Columns flagged constant get e = 1 and weight 0 outright. Entropies are
    clipped into [0, 1] to shed the last-ulp float excursions of x ln x
    sums; without the clip a uniform column can come out at 1 + 1e-16 and
    turn into a negative weight.
    """
    x = std.values
    n = x.shape[0]
    if n < 2:
        raise SingleYearError(
            "index: entropy weighting needs at least two years (ln n must be positive)"
        )
    totals = x.sum(axis=0)
    contributions = x / totals
    log_n = math.log(n)
    entropies = -(contributions * np.log(contributions)).sum(axis=0) / log_n
    entropies = np.clip(entropies, 0.0, 1.0)
    entropies[std.constant_mask] = 1.0
    information = 1.0 - entropies
    total_information = information.sum()
    if total_information <= 0.0:
        raise AllMaxEntropyError(
            "index: every column is at maximum entropy; weights are undefined"
        )
    weights = information / total_information
    return EntropyWeights(
        weights=weights, entropies=entropies, contributions=contributions
    )


def improved_normalize(matrix) -> np.ndarray:
    """Scale each column by max + min. Requires strictly positive data; the
    result then sits strictly inside (0, 1) and is invariant to a rescaling
    of the column's unit."""
    m = _as_matrix(matrix)
    if np.any(m <= 0.0):
        i, j = [int(ix[0]) for ix in np.nonzero(m <= 0.0)]
        raise NonPositiveValueError(
            f"index: improved normalization needs strictly positive data, got "
            f"{m[i, j]!r} at row {i} column {j}"
        )
    return m / (m.max(axis=0) + m.min(axis=0))


WEIGHTS_ON_STANDARDIZED = "standardized"
WEIGHTS_ON_IMPROVED = "improved"


def composite_index(
    matrix,
    attributes=None,
    offset: float = DEFAULT_OFFSET,
    method: str = METHOD_IMPROVED,
    strict: bool = True,
    weights_on: str = WEIGHTS_ON_STANDARDIZED,
    region: str = "",
    years: tuple[int, ...] | None = None,
) -> IndexSeries:
    """Composite index for one region's years x indicators matrix.

    method selects the aggregation basis: "classic" scores on X', "improved"
    on X'' (negative columns as 1 - X''). weights_on is a sensitivity switch
    for where the entropy weights are computed; the default follows the
    standardized matrix in both methods.
    """
    m = _as_matrix(matrix)
    tags = _attribute_tags(m.shape[1], attributes)
    std = standardize_minmax(m, tags, offset=offset, strict=strict)

    if method not in (METHOD_CLASSIC, METHOD_IMPROVED):
        raise SchemaMismatchError(f"index: unknown method {method!r}")
    if weights_on not in (WEIGHTS_ON_STANDARDIZED, WEIGHTS_ON_IMPROVED):
        raise SchemaMismatchError(f"index: unknown weights_on {weights_on!r}")

    if method == METHOD_IMPROVED or weights_on == WEIGHTS_ON_IMPROVED:
        scaled = improved_normalize(m)
        for j, tag in enumerate(tags):
            if tag == NEGATIVE:
                scaled[:, j] = 1.0 - scaled[:, j]
    else:
        scaled = None

    if weights_on == WEIGHTS_ON_IMPROVED:
        weight_base = StandardizedMatrix(
            values=scaled,
            offset=offset,
            attributes=tags,
            constant_mask=std.constant_mask,
        )
    else:
        weight_base = std
    ew = entropy_weights(weight_base)

    basis = std.values if method == METHOD_CLASSIC else scaled
    values = basis @ ew.weights
    if years is None:
        year_tuple = tuple(range(m.shape[0]))
    else:
        year_tuple = tuple(int(y) for y in years)
        if len(year_tuple) != m.shape[0]:
            raise SchemaMismatchError(
                f"index: {len(year_tuple)} years for {m.shape[0]} rows"
            )
    return IndexSeries(
        region=region, years=year_tuple, values=values, weights=ew, method=method
    )


def composite_series(
    panel: PanelDataset,
    indicators: tuple[str, ...] | None = None,
    offset: float = DEFAULT_OFFSET,
    method: str = METHOD_IMPROVED,
    strict: bool = True,
    weights_on: str = WEIGHTS_ON_STANDARDIZED,
) -> list[IndexSeries]:
    """Run composite_index region by region over selected panel indicators.

    Each region is standardized and weighted on its own matrix, so weights
    legitimately differ across regions.
    """
    if indicators is None:
        names = panel.indicators
    else:
        names = tuple(indicators)
    cols = [panel.indicator_index(n) for n in names]
    tags = tuple(panel.attributes[c] for c in cols)
    out = []
    for region in panel.regions:
        m = panel.slice_region(region)[:, cols]
        out.append(composite_index(
            m,
            attributes=tags,
            offset=offset,
            method=method,
            strict=strict,
            weights_on=weights_on,
            region=region,
            years=panel.years,
        ))
    return out


def tcde_index(emissions_panel: PanelDataset) -> list[IndexSeries]:
    """Dimensionless emission index per region from a single-Q panel.

    With one indicator the weight is 1 by construction, so the entropy
    machinery is bypassed: the score is just the improved normalization
    Q_i / (max Q + min Q), which stays defined even for a constant series
    (where it sits at 0.5). Entropies are still reported for the sidecar,
    computed leniently.
    """
    if len(emissions_panel.indicators) != 1:
        raise SchemaMismatchError(
            f"index: emission panel must carry exactly one indicator, got "
            f"{list(emissions_panel.indicators)}"
        )
    emissions_panel.require_positive()
    out = []
    for region in emissions_panel.regions:
        m = emissions_panel.slice_region(region)
        std = standardize_minmax(m, offset=DEFAULT_OFFSET, strict=False)
        if std.n_years < 2:
            raise SingleYearError(
                f"index: region {region!r} has a single year; an emission index "
                "over time is undefined"
            )
        entropies = -(std.values / std.values.sum(axis=0)
                      * np.log(std.values / std.values.sum(axis=0))).sum(axis=0)
        entropies = np.clip(entropies / math.log(std.n_years), 0.0, 1.0)
        entropies[std.constant_mask] = 1.0
        ew = EntropyWeights(
            weights=np.array([1.0]),
            entropies=entropies,
            contributions=std.values / std.values.sum(axis=0),
        )
        values = improved_normalize(m)[:, 0]
        out.append(IndexSeries(
            region=region,
            years=emissions_panel.years,
            values=values,
            weights=ew,
            method=METHOD_IMPROVED,
        ))
    return out
