"""Synthetic panel generator for demos and end-to-end checks.

The generated basin is deliberately simple: within each region every
emission driver grows linearly over the span while every economy indicator
grows super-linearly to the same total ratio, i.e. the economy accelerates
while emissions climb at a steady pace. Running the full pipeline on such a
panel gives a coordination series that improves year over year and a
quadratic economy-emissions fit whose vertex lies beyond the observed range,
which is exactly the regime the toolbox is meant to surface.

Shapes, with tau in [0, 1] the normalized year and r the per-region growth
ratio:

    driver(tau)  = 1 + (r - 1) * tau
    economy(tau) = 1 + (r - 1) * (0.5 * tau + 0.5 * tau ** p),  p > 1

Both run from 1 to r, so their normalized indices share endpoints and the
economy curve trails the driver in between. The 0.5/0.5 blend keeps the
coordination series monotone; a pure power curve dips mid-span. Growth
ratios are drawn from [6, 10] and exponents from [1.7, 2.4], ranges checked
to keep both pipeline shape properties comfortably away from their edges.

Coefficient values in the emitted JSON are round illustrative figures of
plausible magnitude (aviation near 0.14 kg/pkm, rail far lower, and so on);
they are demo inputs, not calibrated estimates.
"""
from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import ValidationError

# Spelled-out region names read better than r01..r09 in demo output.
_REGION_NAMES = (
    "alpha", "beta", "gamma", "delta", "epsilon",
    "zeta", "eta", "theta", "iota", "kappa",
    "lambda", "mu", "nu", "xi", "omicron",
)

# (indicator, profile, base level); levels set only the order of magnitude,
# per-region multipliers add spread. Profile "linear" follows driver(tau),
# "convex" follows economy(tau), "mean" the geometric mean of the two.
_INDICATORS = (
    ("passengers_plane", "linear", 4.0e5),
    ("passengers_train", "linear", 1.2e6),
    ("passengers_car", "linear", 3.0e6),
    ("hotel_beds", "linear", 3.0e4),
    ("tourist_trips", "linear", 2.0e6),
    ("tourism_energy", "mean", 8.0e5),
    ("tourist_arrivals", "convex", 2.0e6),
    ("tourism_revenue", "convex", 1.5e9),
    ("tourism_practitioners", "convex", 5.0e4),
    ("fixed_asset_investment", "mean", 2.0e9),
)

TE_INDICATORS = ("tourist_arrivals", "tourism_revenue", "tourism_practitioners")
# The efficiency inputs grow at the geometric-mean pace of emissions and
# economy. That pace keeps every cross-period program solvable: per step,
# the input growth factor must sit between the harmonic and arithmetic
# means of the bad and good growth factors, and the geometric mean always
# does. Inputs tracking the bad alone kill the early forward programs;
# inputs tracking the goods alone kill the late backward ones.
DEA_INPUTS = ("fixed_asset_investment", "tourism_energy")
DEA_GOOD_OUTPUTS = ("tourist_arrivals", "tourism_revenue")

_COEFFICIENTS = {
    "note": "Illustrative demo coefficients, not calibrated to any survey.",
    "transport_modes": [
        {
            "mode": "plane",
            "tourist_share": 0.65,
            "passengers": {"indicator": "passengers_plane"},
            "distance_km": 1100.0,
            "emission_factor_kg_per_pkm": 0.137,
        },
        {
            "mode": "train",
            "tourist_share": 0.35,
            "passengers": {"indicator": "passengers_train"},
            "distance_km": 350.0,
            "emission_factor_kg_per_pkm": 0.027,
        },
        {
            "mode": "car",
            "tourist_share": 0.2,
            "passengers": {"indicator": "passengers_car"},
            "distance_km": 140.0,
            "emission_factor_kg_per_pkm": 0.133,
        },
    ],
    "accommodation": {
        "beds": {"indicator": "hotel_beds"},
        "occupancy": 0.58,
        "energy_mj_per_bed_night": 155.0,
        "carbon_kg_per_mj": 0.0106,
    },
    "activities": {
        "tourists": {"indicator": "tourist_trips"},
        "types": [
            {"name": "sightseeing", "share": 0.309, "emission_kg_per_tourist": 0.417},
            {"name": "leisure", "share": 0.245, "emission_kg_per_tourist": 1.67},
            {"name": "business", "share": 0.258, "emission_kg_per_tourist": 0.786},
            {"name": "visiting", "share": 0.143, "emission_kg_per_tourist": 0.591},
            {"name": "other", "share": 0.045, "emission_kg_per_tourist": 0.172},
        ],
    },
}


def region_names(n_regions: int) -> tuple[str, ...]:
    """Greek-letter names for small panels, numbered ones past that."""
    if n_regions <= len(_REGION_NAMES):
        return _REGION_NAMES[:n_regions]
    extra = tuple(
        f"region{k + 1:02d}" for k in range(len(_REGION_NAMES), n_regions)
    )
    return _REGION_NAMES + extra


def generate_panel(
    seed: int = 42,
    n_regions: int = 2,
    n_years: int = 4,
    start_year: int = 2000,
) -> tuple[tuple[str, ...], tuple[int, ...], dict[tuple[str, str], np.ndarray]]:
    """Draw the synthetic series; returns (regions, years, series-by-cell).

    The mapping key is (region, indicator) and each value is the full year
    series. Kept separate from the CSV writer so tests can reach the raw
    numbers without a filesystem round trip.
    """
    if n_regions < 1 or n_years < 2:
        raise ValidationError(
            f"fixture: need at least 1 region and 2 years, got "
            f"{n_regions} regions and {n_years} years"
        )
    rng = np.random.default_rng(seed)
    regions = region_names(n_regions)
    years = tuple(range(start_year, start_year + n_years))
    tau = np.linspace(0.0, 1.0, n_years)

    series: dict[tuple[str, str], np.ndarray] = {}
    for region in regions:
        ratio = rng.uniform(6.0, 10.0)
        exponent = rng.uniform(1.7, 2.4)
        profiles = {
            "linear": 1.0 + (ratio - 1.0) * tau,
            "convex": 1.0 + (ratio - 1.0) * (0.5 * tau + 0.5 * tau ** exponent),
        }
        profiles["mean"] = np.sqrt(profiles["linear"] * profiles["convex"])
        for indicator, profile, base in _INDICATORS:
            level = base * rng.uniform(0.7, 1.4)
            series[(region, indicator)] = level * profiles[profile]
    return regions, years, series


def run_config(out_dir: str = "out") -> dict:
    """The default pipeline configuration matching the generated panel."""
    return {
        "panel": "panel.csv",
        "coefficients": "coeffs.json",
        "output_dir": out_dir,
        "method": "improved",
        "offset": 1e-05,
        "renormalize_shares": False,
        "impute": "none",
        "attributes": {name: "positive" for name, _, _ in _INDICATORS},
        "te_indicators": list(TE_INDICATORS),
        "dea": {
            "inputs": list(DEA_INPUTS),
            "good_outputs": list(DEA_GOOD_OUTPUTS),
        },
        "ekc_mode": "both",
    }


def write_fixture(
    out_dir,
    seed: int = 42,
    n_regions: int = 2,
    n_years: int = 4,
    start_year: int = 2000,
) -> dict[str, Path]:
    """Write panel.csv, coeffs.json and run_config.json into out_dir."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    regions, years, series = generate_panel(seed, n_regions, n_years, start_year)

    panel_path = out / "panel.csv"
    with open(panel_path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["region", "year", "indicator", "value"])
        for region in regions:
            for indicator, _, _ in _INDICATORS:
                values = series[(region, indicator)]
                for year, value in zip(years, values):
                    writer.writerow([region, year, indicator, repr(float(value))])
    coeffs_path = out / "coeffs.json"
    with open(coeffs_path, "w") as fh:
        json.dump(_COEFFICIENTS, fh, indent=2, sort_keys=True)
        fh.write("\n")

    config_path = out / "run_config.json"
    with open(config_path, "w") as fh:
        json.dump(run_config(), fh, indent=2, sort_keys=True)
        fh.write("\n")

    return {"panel": panel_path, "coefficients": coeffs_path, "config": config_path}
