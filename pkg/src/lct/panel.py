"""Panel-data container and CSV ingestion.

Every downstream stage (emissions accounting, composite indices, coupling
coordination, DEA productivity) consumes the same dense region x year x
indicator array. Ingestion is strict: each cell must be present and finite,
or the caller must opt into an explicit imputation rule (forward fill or
linear interpolation along years). Nothing is filled silently.

Loading is row-order independent: regions and indicator names are put in
lexicographic order and years ascending, so shuffled input files produce
identical datasets.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np
import pandas as pd

from .errors import (
    DuplicateCellError,
    MissingCellError,
    NonFiniteError,
    NonPositiveValueError,
    SchemaMismatchError,
    UnknownRegionError,
)

POSITIVE = "positive"
NEGATIVE = "negative"

IMPUTE_NONE = None
IMPUTE_FFILL = "ffill"
IMPUTE_LINEAR = "linear"


@dataclass(frozen=True)
class RegionYearKey:
    """Identifies one region-year cell in error messages and reports."""

    region: str
    year: int

    def __str__(self) -> str:
        return f"region={self.region!r} year={self.year}"


@dataclass(frozen=True)
class PanelSchema:
    """Column mapping for CSV ingestion.

    Long format (the default) expects one row per (region, year, indicator)
    with a value column. Wide format expects one row per (region, year) and
    one column per indicator; enable it by giving ``wide_columns``, a mapping
    from CSV column name to indicator name.
    """

    region: str = "region"
    year: str = "year"
    indicator: str = "indicator"
    value: str = "value"
    wide_columns: Mapping[str, str] | None = None


@dataclass(frozen=True)
class PanelDataset:
    """Dense panel: regions x years x indicators with no missing cells.

    ``values[i, j, k]`` is indicator k for region i in year j. Instances are
    immutable (the array is marked read-only), so every operation downstream
    is pure. ``attributes`` tags each indicator as ``positive`` (more is
    better) or ``negative`` (more is worse) for the standardization step.
    """

    regions: tuple[str, ...]
    years: tuple[int, ...]
    indicators: tuple[str, ...]
    values: np.ndarray
    attributes: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        regions = tuple(str(r) for r in self.regions)
        years = tuple(int(y) for y in self.years)
        indicators = tuple(str(i) for i in self.indicators)
        attributes = tuple(self.attributes) if self.attributes else tuple(
            POSITIVE for _ in indicators
        )
        if len(set(regions)) != len(regions):
            raise DuplicateCellError("panel: duplicate region names")
        if len(set(indicators)) != len(indicators):
            raise DuplicateCellError("panel: duplicate indicator names")
        if any(b <= a for a, b in zip(years, years[1:])):
            raise SchemaMismatchError("panel: years must be strictly increasing")
        if len(attributes) != len(indicators):
            raise SchemaMismatchError(
                "panel: attribute tags must match indicators one for one"
            )
        bad = [a for a in attributes if a not in (POSITIVE, NEGATIVE)]
        if bad:
            raise SchemaMismatchError(
                f"panel: unknown attribute tag {bad[0]!r} (use positive/negative)"
            )
        values = np.asarray(self.values, dtype=float)
        expected = (len(regions), len(years), len(indicators))
        if values.shape != expected:
            raise SchemaMismatchError(
                f"panel: values shape {values.shape} does not match "
                f"(regions, years, indicators) = {expected}"
            )
        if not np.all(np.isfinite(values)):
            i, j, k = [int(ix[0]) for ix in np.nonzero(~np.isfinite(values))]
            raise NonFiniteError(
                f"panel: non-finite value at {RegionYearKey(regions[i], years[j])} "
                f"indicator={indicators[k]!r}"
            )
        values = values.copy()
        values.setflags(write=False)
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "indicators", indicators)
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "values", values)

    # -- lookups -------------------------------------------------------

    def region_index(self, region: str) -> int:
        try:
            return self.regions.index(region)
        except ValueError:
            raise UnknownRegionError(
                f"panel: unknown region {region!r}; have {list(self.regions)}"
            ) from None

    def indicator_index(self, indicator: str) -> int:
        try:
            return self.indicators.index(indicator)
        except ValueError:
            raise MissingCellError(
                f"panel: unknown indicator {indicator!r}; have {list(self.indicators)}"
            ) from None

    def attribute_of(self, indicator: str) -> str:
        return self.attributes[self.indicator_index(indicator)]

    def slice_region(self, region: str) -> np.ndarray:
        """Return the years x indicators matrix for one region (read-only)."""
        return self.values[self.region_index(region)]

    def indicator_series(self, region: str, indicator: str) -> np.ndarray:
        """Return one indicator's values over years for one region."""
        return self.values[self.region_index(region), :, self.indicator_index(indicator)]

    def require_positive(self, indicators: tuple[str, ...] | None = None) -> None:
        """Raise unless every cell of the named indicators is > 0."""
        names = indicators if indicators is not None else self.indicators
        for name in names:
            k = self.indicator_index(name)
            col = self.values[:, :, k]
            if np.any(col <= 0.0):
                i, j = [int(ix[0]) for ix in np.nonzero(col <= 0.0)]
                raise NonPositiveValueError(
                    f"panel: indicator {name!r} must be strictly positive, got "
                    f"{col[i, j]!r} at {RegionYearKey(self.regions[i], self.years[j])}"
                )

    def to_long_frame(self) -> pd.DataFrame:
        """Flatten to the long CSV layout (region, year, indicator, value)."""
        rows = []
        for i, region in enumerate(self.regions):
            for j, year in enumerate(self.years):
                for k, ind in enumerate(self.indicators):
                    rows.append((region, year, ind, float(self.values[i, j, k])))
        return pd.DataFrame(rows, columns=["region", "year", "indicator", "value"])


def _impute_along_years(grid: np.ndarray, mode: str) -> np.ndarray:
    """Fill NaN holes along the year axis of a regions x years x indicators
    grid. Forward fill copies the last seen value; linear interpolation only
    fills interior gaps (no extrapolation). Cells that cannot be filled stay
    NaN and are reported by the caller."""
    out = grid.copy()
    n_regions, n_years, n_inds = out.shape
    for i in range(n_regions):
        for k in range(n_inds):
            col = out[i, :, k]
            known = np.isfinite(col)
            if known.all() or not known.any():
                continue
            if mode == IMPUTE_FFILL:
                last = np.nan
                for j in range(n_years):
                    if known[j]:
                        last = col[j]
                    elif np.isfinite(last):
                        col[j] = last
            elif mode == IMPUTE_LINEAR:
                jj = np.nonzero(known)[0]
                first, last = jj[0], jj[-1]
                inside = np.arange(first, last + 1)
                col[inside] = np.interp(inside, jj, col[known])
            else:
                raise SchemaMismatchError(
                    f"panel: unknown imputation mode {mode!r} (use ffill or linear)"
                )
    return out


def load_panel(
    path,
    schema: PanelSchema | None = None,
    attributes: Mapping[str, str] | None = None,
    impute: str | None = IMPUTE_NONE,
) -> PanelDataset:
    """Read a panel CSV into a dense, validated PanelDataset.

    ``attributes`` maps indicator names to ``positive`` / ``negative``; any
    indicator not mentioned defaults to positive. ``impute`` must be chosen
    explicitly to allow holes in the year coverage; with the default None a
    missing (region, year, indicator) cell is an error.
    """
    schema = schema or PanelSchema()
    frame = pd.read_csv(path)

    if schema.wide_columns is not None:
        needed = [schema.region, schema.year, *schema.wide_columns]
        missing = [c for c in needed if c not in frame.columns]
        if missing:
            raise SchemaMismatchError(f"panel: {path}: missing columns {missing}")
        frame = frame.melt(
            id_vars=[schema.region, schema.year],
            value_vars=list(schema.wide_columns),
            var_name=schema.indicator,
            value_name=schema.value,
        )
        frame[schema.indicator] = frame[schema.indicator].map(
            dict(schema.wide_columns)
        )
    else:
        needed = [schema.region, schema.year, schema.indicator, schema.value]
        missing = [c for c in needed if c not in frame.columns]
        if missing:
            raise SchemaMismatchError(f"panel: {path}: missing columns {missing}")

    region_col = frame[schema.region].astype(str)
    year_raw = pd.to_numeric(frame[schema.year], errors="coerce")
    if year_raw.isna().any() or not np.allclose(year_raw, year_raw.round()):
        bad = frame[schema.year][year_raw.isna() | (year_raw != year_raw.round())]
        raise SchemaMismatchError(
            f"panel: {path}: year column must hold integers, got {bad.iloc[0]!r}"
        )
    year_col = year_raw.astype(int)
    ind_col = frame[schema.indicator].astype(str)
    value_col = pd.to_numeric(frame[schema.value], errors="coerce")

    regions = tuple(sorted(region_col.unique()))
    years = tuple(sorted(year_col.unique()))
    if schema.wide_columns is not None:
        # Wide files fix the indicator order through the schema mapping.
        indicators = tuple(dict(schema.wide_columns).values())
    else:
        indicators = tuple(sorted(ind_col.unique()))

    attributes = dict(attributes or {})
    unknown = sorted(set(attributes) - set(indicators))
    if unknown:
        raise SchemaMismatchError(
            f"panel: attribute tags name unknown indicators {unknown}"
        )
    tags = tuple(attributes.get(ind, POSITIVE) for ind in indicators)

    r_ix = {r: i for i, r in enumerate(regions)}
    y_ix = {y: j for j, y in enumerate(years)}
    k_ix = {k: n for n, k in enumerate(indicators)}

    grid = np.full((len(regions), len(years), len(indicators)), np.nan)
    seen = np.zeros(grid.shape, dtype=bool)
    order = np.lexsort((year_col.values, ind_col.values, region_col.values))
    for row in order:
        r, y, k = region_col.iat[row], year_col.iat[row], ind_col.iat[row]
        i, j, n = r_ix[r], y_ix[y], k_ix[k]
        if seen[i, j, n]:
            raise DuplicateCellError(
                f"panel: {path}: duplicate cell {RegionYearKey(r, y)} indicator={k!r}"
            )
        seen[i, j, n] = True
        v = value_col.iat[row]
        if pd.isna(v) or not np.isfinite(v):
            try:
                shown = repr(float(v))
            except (TypeError, ValueError):
                shown = "missing"
            raise NonFiniteError(
                f"panel: {path}: non-finite value ({shown}) "
                f"at {RegionYearKey(r, y)} indicator={k!r}"
            )
        grid[i, j, n] = v

    if impute is not IMPUTE_NONE:
        grid = _impute_along_years(grid, impute)

    holes = ~np.isfinite(grid)
    if holes.any():
        i, j, n = [int(ix[0]) for ix in np.nonzero(holes)]
        hint = "" if impute else " (pass impute='ffill' or 'linear' to fill gaps)"
        raise MissingCellError(
            f"panel: {path}: missing cell {RegionYearKey(regions[i], years[j])} "
            f"indicator={indicators[n]!r}{hint}"
        )

    return PanelDataset(
        regions=regions,
        years=years,
        indicators=indicators,
        values=grid,
        attributes=tags,
    )
