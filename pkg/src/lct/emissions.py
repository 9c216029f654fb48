"""Bottom-up tourism carbon accounting.

Emissions are summed over three channels and reported in kg CO2:

* transport:      Q_T = sum_i alpha_i * N_i * D_i * P_ci
* accommodation:  Q_H = 365 * Y * R * P_e * P_cv * (44/12)
* activities:     Q_A = sum_j M * omega_j * P_cj

For accommodation the energy use per bed night P_e is in MJ and the carbon
coefficient P_cv in kg C per MJ, so 365*Y*R*P_e*P_cv is kg of carbon per
year; 44/12 converts carbon mass to CO2 mass. (A tonne-based write-up of the
same formula carries a 10^-3; we report kg, so that factor and the kg->tonne
conversion cancel.)

Physical quantities vary by region and year and normally come from panel
indicators; emission factors and shares live in a JSON coefficient file.
Any scalar field in that file may instead reference a panel indicator as
``{"indicator": "name"}``, which keeps the choice of what is measured and
what is assumed with the user.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
import pandas as pd

from .errors import (
    InvalidShareError,
    MissingCellError,
    MissingIndicatorError,
    NegativeQuantityError,
    OccupancyOutOfRangeError,
    SchemaMismatchError,
    SharesNotNormalizedError,
)
from .panel import PanelDataset

CO2_PER_CARBON = 44.0 / 12.0
SHARE_SUM_TOL = 1e-9


# -- per-cell input records --------------------------------------------------

@dataclass(frozen=True)
class TransportModeRecord:
    """One transport mode's inputs for one region-year.

    tourist_share is the fraction of passengers who are tourists (alpha),
    passengers the total carried (N), distance the average journey length in
    km (D), and emission_factor kg CO2 per passenger-km (P_c).
    """

    mode_name: str
    tourist_share: float
    passengers: float
    distance: float
    emission_factor: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.tourist_share <= 1.0:
            raise InvalidShareError(
                f"transport mode {self.mode_name!r}: tourist share "
                f"{self.tourist_share!r} outside [0, 1]"
            )
        for name, v in (
            ("passengers", self.passengers),
            ("distance", self.distance),
            ("emission_factor", self.emission_factor),
        ):
            if not math.isfinite(v) or v < 0.0:
                raise NegativeQuantityError(
                    f"transport mode {self.mode_name!r}: {name} must be a "
                    f"non-negative number, got {v!r}"
                )


@dataclass(frozen=True)
class AccommodationParams:
    """Bed stock Y, occupancy rate R, energy per bed night P_e (MJ) and
    carbon per unit energy P_cv (kg C per MJ) for one region-year."""

    beds: float
    occupancy: float
    energy_per_bed_night: float
    carbon_per_energy: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.occupancy <= 1.0:
            raise OccupancyOutOfRangeError(
                f"accommodation: occupancy {self.occupancy!r} outside [0, 1]"
            )
        for name, v in (
            ("beds", self.beds),
            ("energy_per_bed_night", self.energy_per_bed_night),
            ("carbon_per_energy", self.carbon_per_energy),
        ):
            if not math.isfinite(v) or v < 0.0:
                raise NegativeQuantityError(
                    f"accommodation: {name} must be a non-negative number, got {v!r}"
                )


@dataclass(frozen=True)
class ActivityMix:
    """Tourist count M plus the share and emission factor of each activity.

    shares are (activity name, omega) pairs; factors map activity name to
    kg CO2 per tourist. Share values must each lie in [0, 1]; whether their
    sum must hit 1 exactly is decided by the strictness mode of
    activity_emissions, not here.
    """

    tourists: float
    shares: tuple[tuple[str, float], ...]
    factors: dict[str, float]

    def __post_init__(self) -> None:
        if not math.isfinite(self.tourists) or self.tourists < 0.0:
            raise NegativeQuantityError(
                f"activities: tourists must be non-negative, got {self.tourists!r}"
            )
        object.__setattr__(self, "shares", tuple(
            (str(n), float(s)) for n, s in self.shares
        ))
        for name, share in self.shares:
            if not 0.0 <= share <= 1.0:
                raise InvalidShareError(
                    f"activity {name!r}: share {share!r} outside [0, 1]"
                )
        for name, _ in self.shares:
            if name not in self.factors:
                raise MissingIndicatorError(
                    f"activity {name!r}: no emission factor given"
                )
            f = self.factors[name]
            if not math.isfinite(f) or f < 0.0:
                raise NegativeQuantityError(
                    f"activity {name!r}: emission factor must be non-negative, got {f!r}"
                )


@dataclass(frozen=True)
class EmissionBreakdown:
    """Per-channel emissions in kg CO2; the total is derived, not stored."""

    transport: float
    accommodation: float
    activities: float

    def __post_init__(self) -> None:
        for name, v in (
            ("transport", self.transport),
            ("accommodation", self.accommodation),
            ("activities", self.activities),
        ):
            if not math.isfinite(v) or v < 0.0:
                raise NegativeQuantityError(
                    f"emissions: {name} channel must be non-negative, got {v!r}"
                )

    @property
    def total(self) -> float:
        return self.transport + self.accommodation + self.activities


# -- channel formulas --------------------------------------------------------

def transport_emissions(modes: Sequence[TransportModeRecord]) -> float:
    """Sum alpha * N * D * P_c over transport modes, in kg CO2."""
    return float(sum(
        m.tourist_share * m.passengers * m.distance * m.emission_factor
        for m in modes
    ))


def accommodation_emissions(params: AccommodationParams) -> float:
    """365 * Y * R * P_e * P_cv gives kg carbon per year; scale to kg CO2."""
    kg_carbon = (
        365.0
        * params.beds
        * params.occupancy
        * params.energy_per_bed_night
        * params.carbon_per_energy
    )
    return kg_carbon * CO2_PER_CARBON


def activity_emissions(mix: ActivityMix, renormalize: bool = False) -> float:
    """Sum M * omega_j * P_cj over activity types, in kg CO2.

    In strict mode (the default) the shares must sum to 1 within 1e-9; with
    renormalize=True they are scaled to sum to 1 instead, which tolerates
    rounded survey splits.
    """
    total_share = sum(s for _, s in mix.shares)
    if abs(total_share - 1.0) > SHARE_SUM_TOL:
        if not renormalize:
            raise SharesNotNormalizedError(
                f"activities: shares sum to {total_share!r}, expected 1 "
                f"within {SHARE_SUM_TOL} (or pass renormalize)"
            )
        if total_share <= 0.0:
            raise SharesNotNormalizedError(
                "activities: shares sum to zero, cannot renormalize"
            )
    scale = 1.0 / total_share if renormalize and total_share > 0.0 else 1.0
    return float(sum(
        mix.tourists * share * scale * mix.factors[name]
        for name, share in mix.shares
    ))


def total_emissions(
    transport: float, accommodation: float, activities: float
) -> EmissionBreakdown:
    """Bundle the three channel values; the total is their plain sum."""
    return EmissionBreakdown(
        transport=float(transport),
        accommodation=float(accommodation),
        activities=float(activities),
    )


# -- coefficient configuration -----------------------------------------------

@dataclass(frozen=True)
class IndicatorRef:
    """Marks a coefficient field that reads its value from the panel."""

    name: str


Scalar = "float | IndicatorRef"  # literal value or per-cell panel lookup


@dataclass(frozen=True)
class TransportCoefficients:
    mode: str
    tourist_share: Scalar
    passengers: Scalar
    distance_km: Scalar
    emission_factor_kg_per_pkm: Scalar


@dataclass(frozen=True)
class AccommodationCoefficients:
    beds: Scalar
    occupancy: Scalar
    energy_mj_per_bed_night: Scalar
    carbon_kg_per_mj: Scalar


@dataclass(frozen=True)
class ActivityTypeCoefficients:
    name: str
    share: Scalar
    emission_kg_per_tourist: Scalar


@dataclass(frozen=True)
class ActivityCoefficients:
    tourists: Scalar
    types: tuple[ActivityTypeCoefficients, ...]


@dataclass(frozen=True)
class CoefficientConfig:
    """Parsed coefficient file; omitted sections contribute zero."""

    transport_modes: tuple[TransportCoefficients, ...] = ()
    accommodation: AccommodationCoefficients | None = None
    activities: ActivityCoefficients | None = None


def _parse_scalar(raw, context: str):
    if isinstance(raw, dict):
        name = raw.get("indicator")
        if not isinstance(name, str) or set(raw) != {"indicator"}:
            raise SchemaMismatchError(
                f"coefficients: {context}: expected a number or "
                f'{{"indicator": "name"}}, got {raw!r}'
            )
        return IndicatorRef(name)
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise SchemaMismatchError(
            f"coefficients: {context}: expected a number, got {raw!r}"
        )
    return float(raw)


def load_coefficients(path) -> CoefficientConfig:
    """Parse the JSON coefficient file. A top-level "note" key is ignored so
    files can say where their figures came from."""
    with open(path) as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise SchemaMismatchError(f"coefficients: {path}: expected a JSON object")
    known = {"transport_modes", "accommodation", "activities", "note"}
    extra = sorted(set(raw) - known)
    if extra:
        raise SchemaMismatchError(f"coefficients: {path}: unknown sections {extra}")

    modes = []
    for n, m in enumerate(raw.get("transport_modes", [])):
        ctx = f"transport_modes[{n}]"
        if not isinstance(m, dict):
            raise SchemaMismatchError(f"coefficients: {ctx}: expected an object")
        name = m.get("mode", f"mode{n}")
        modes.append(TransportCoefficients(
            mode=str(name),
            tourist_share=_parse_scalar(m["tourist_share"], f"{ctx}.tourist_share"),
            passengers=_parse_scalar(m["passengers"], f"{ctx}.passengers"),
            distance_km=_parse_scalar(m["distance_km"], f"{ctx}.distance_km"),
            emission_factor_kg_per_pkm=_parse_scalar(
                m["emission_factor_kg_per_pkm"], f"{ctx}.emission_factor_kg_per_pkm"
            ),
        ))

    accommodation = None
    if "accommodation" in raw:
        a = raw["accommodation"]
        accommodation = AccommodationCoefficients(
            beds=_parse_scalar(a["beds"], "accommodation.beds"),
            occupancy=_parse_scalar(a["occupancy"], "accommodation.occupancy"),
            energy_mj_per_bed_night=_parse_scalar(
                a["energy_mj_per_bed_night"], "accommodation.energy_mj_per_bed_night"
            ),
            carbon_kg_per_mj=_parse_scalar(
                a["carbon_kg_per_mj"], "accommodation.carbon_kg_per_mj"
            ),
        )

    activities = None
    if "activities" in raw:
        a = raw["activities"]
        types = tuple(
            ActivityTypeCoefficients(
                name=str(t["name"]),
                share=_parse_scalar(t["share"], f"activities.types[{j}].share"),
                emission_kg_per_tourist=_parse_scalar(
                    t["emission_kg_per_tourist"],
                    f"activities.types[{j}].emission_kg_per_tourist",
                ),
            )
            for j, t in enumerate(a.get("types", []))
        )
        activities = ActivityCoefficients(
            tourists=_parse_scalar(a["tourists"], "activities.tourists"),
            types=types,
        )

    return CoefficientConfig(
        transport_modes=tuple(modes),
        accommodation=accommodation,
        activities=activities,
    )


def _resolve(value, panel: PanelDataset, i: int, j: int, context: str) -> float:
    """Turn a literal or IndicatorRef into the number for cell (i, j)."""
    if isinstance(value, IndicatorRef):
        if value.name not in panel.indicators:
            raise MissingIndicatorError(
                f"coefficients: {context}: panel has no indicator {value.name!r}"
            )
        k = panel.indicators.index(value.name)
        return float(panel.values[i, j, k])
    return float(value)


# -- panel-level series ------------------------------------------------------

EMISSION_COLUMNS = (
    "region",
    "year",
    "q_transport_kg",
    "q_accommodation_kg",
    "q_activities_kg",
    "q_total_kg",
)


def emissions_series(
    panel: PanelDataset,
    coeffs: CoefficientConfig,
    renormalize_shares: bool = False,
) -> pd.DataFrame:
    """Evaluate all three channels for every region-year.

    Returns a table with one row per region-year in canonical panel order
    and columns EMISSION_COLUMNS. Validation failures are re-raised with the
    offending region and year prepended.
    """
    rows = []
    for i, region in enumerate(panel.regions):
        for j, year in enumerate(panel.years):
            try:
                modes = [
                    TransportModeRecord(
                        mode_name=m.mode,
                        tourist_share=_resolve(m.tourist_share, panel, i, j, f"{m.mode}.tourist_share"),
                        passengers=_resolve(m.passengers, panel, i, j, f"{m.mode}.passengers"),
                        distance=_resolve(m.distance_km, panel, i, j, f"{m.mode}.distance_km"),
                        emission_factor=_resolve(
                            m.emission_factor_kg_per_pkm, panel, i, j,
                            f"{m.mode}.emission_factor_kg_per_pkm",
                        ),
                    )
                    for m in coeffs.transport_modes
                ]
                q_t = transport_emissions(modes)

                q_h = 0.0
                if coeffs.accommodation is not None:
                    a = coeffs.accommodation
                    q_h = accommodation_emissions(AccommodationParams(
                        beds=_resolve(a.beds, panel, i, j, "accommodation.beds"),
                        occupancy=_resolve(a.occupancy, panel, i, j, "accommodation.occupancy"),
                        energy_per_bed_night=_resolve(
                            a.energy_mj_per_bed_night, panel, i, j,
                            "accommodation.energy_mj_per_bed_night",
                        ),
                        carbon_per_energy=_resolve(
                            a.carbon_kg_per_mj, panel, i, j, "accommodation.carbon_kg_per_mj"
                        ),
                    ))

                q_a = 0.0
                if coeffs.activities is not None:
                    act = coeffs.activities
                    mix = ActivityMix(
                        tourists=_resolve(act.tourists, panel, i, j, "activities.tourists"),
                        shares=tuple(
                            (t.name, _resolve(t.share, panel, i, j, f"activities.{t.name}.share"))
                            for t in act.types
                        ),
                        factors={
                            t.name: _resolve(
                                t.emission_kg_per_tourist, panel, i, j,
                                f"activities.{t.name}.emission_kg_per_tourist",
                            )
                            for t in act.types
                        },
                    )
                    q_a = activity_emissions(mix, renormalize=renormalize_shares)
            except (ValueError, KeyError) as exc:
                raise SchemaMismatchError(
                    f"emissions: region={region!r} year={year}: {exc}"
                ) from exc
            except Exception as exc:
                exc.args = (f"emissions: region={region!r} year={year}: {exc}",)
                raise

            breakdown = total_emissions(q_t, q_h, q_a)
            rows.append((
                region, year,
                breakdown.transport, breakdown.accommodation,
                breakdown.activities, breakdown.total,
            ))
    return pd.DataFrame(rows, columns=list(EMISSION_COLUMNS))


TOTAL_INDICATOR = "q_total_kg"


def emissions_to_panel(table: pd.DataFrame) -> PanelDataset:
    """Repack an emissions table as a single-indicator panel of Q totals, so
    the index stage can consume it like any other dataset."""
    regions = tuple(sorted(table["region"].astype(str).unique()))
    years = tuple(sorted(int(y) for y in table["year"].unique()))
    values = np.full((len(regions), len(years), 1), np.nan)
    r_ix = {r: i for i, r in enumerate(regions)}
    y_ix = {y: j for j, y in enumerate(years)}
    for rec in table.itertuples(index=False):
        values[r_ix[str(rec.region)], y_ix[int(rec.year)], 0] = rec.q_total_kg
    if not np.all(np.isfinite(values)):
        raise MissingCellError("emissions: table does not cover every region-year")
    return PanelDataset(
        regions=regions,
        years=years,
        indicators=(TOTAL_INDICATOR,),
        values=values,
        attributes=("positive",),
    )
