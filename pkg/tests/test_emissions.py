"""Emission channel formulas, coefficient parsing and the panel-level table."""
import json

import numpy as np
import pytest

from oracles import (
    accommodation_reference,
    activities_reference,
    transport_reference,
)

from lct.emissions import (
    AccommodationParams,
    ActivityMix,
    CoefficientConfig,
    EmissionBreakdown,
    TransportModeRecord,
    accommodation_emissions,
    activity_emissions,
    emissions_series,
    emissions_to_panel,
    load_coefficients,
    total_emissions,
    transport_emissions,
)
from lct.errors import (
    InvalidShareError,
    MissingIndicatorError,
    NegativeQuantityError,
    OccupancyOutOfRangeError,
    SchemaMismatchError,
    SharesNotNormalizedError,
)
from lct.panel import PanelDataset


def mode(share=0.9, passengers=1_000_000.0, distance=500.0, factor=0.1, name="plane"):
    return TransportModeRecord(
        mode_name=name,
        tourist_share=share,
        passengers=passengers,
        distance=distance,
        emission_factor=factor,
    )


# -- transport -----------------------------------------------------------------

def test_transport_empty_mode_list_is_zero():
    assert transport_emissions([]) == 0.0


def test_transport_single_mode_frozen_value():
    assert transport_emissions([mode()]) == pytest.approx(45_000_000.0, rel=1e-12)


def test_transport_two_identical_modes_double():
    one = transport_emissions([mode()])
    two = transport_emissions([mode(), mode(name="plane2")])
    assert two == pytest.approx(2.0 * one, rel=1e-12)


def test_transport_share_out_of_range_rejected():
    with pytest.raises(InvalidShareError):
        mode(share=1.2)
    with pytest.raises(InvalidShareError):
        mode(share=-0.1)


def test_transport_negative_quantity_rejected():
    with pytest.raises(NegativeQuantityError):
        mode(distance=-5.0)
    with pytest.raises(NegativeQuantityError):
        mode(factor=float("nan"))


# -- accommodation ---------------------------------------------------------------

def test_accommodation_zero_beds_is_zero():
    p = AccommodationParams(beds=0.0, occupancy=0.6, energy_per_bed_night=100.0,
                            carbon_per_energy=0.01)
    assert accommodation_emissions(p) == 0.0


def test_accommodation_frozen_value():
    p = AccommodationParams(beds=100.0, occupancy=0.6, energy_per_bed_night=100.0,
                            carbon_per_energy=0.01)
    # 365*100*0.6*100*0.01 = 21,900 kg carbon, times 44/12 for CO2 mass.
    assert accommodation_emissions(p) == pytest.approx(80_300.0, rel=1e-12)


def test_accommodation_linear_in_beds():
    def q(beds):
        return accommodation_emissions(AccommodationParams(
            beds=beds, occupancy=0.55, energy_per_bed_night=120.0,
            carbon_per_energy=0.011,
        ))
    assert q(246.0) == pytest.approx(2.0 * q(123.0), rel=1e-12)


def test_accommodation_occupancy_out_of_range():
    with pytest.raises(OccupancyOutOfRangeError):
        AccommodationParams(beds=1.0, occupancy=1.2, energy_per_bed_night=1.0,
                            carbon_per_energy=1.0)


# -- activities ------------------------------------------------------------------

def test_activities_zero_tourists_is_zero():
    mix = ActivityMix(tourists=0.0, shares=(("a", 0.5), ("b", 0.5)),
                      factors={"a": 2.0, "b": 4.0})
    assert activity_emissions(mix) == 0.0


def test_activities_frozen_value():
    mix = ActivityMix(tourists=1000.0, shares=(("a", 0.5), ("b", 0.5)),
                      factors={"a": 2.0, "b": 4.0})
    assert activity_emissions(mix) == pytest.approx(3000.0, rel=1e-12)


def test_activities_equal_factors_collapse_to_m_times_f():
    mix = ActivityMix(
        tourists=777.0,
        shares=(("a", 0.3), ("b", 0.45), ("c", 0.25)),
        factors={"a": 1.7, "b": 1.7, "c": 1.7},
    )
    assert activity_emissions(mix) == pytest.approx(777.0 * 1.7, rel=1e-12)


def test_activities_strict_rejects_unnormalized_shares():
    mix = ActivityMix(tourists=10.0, shares=(("a", 0.6), ("b", 0.3)),
                      factors={"a": 1.0, "b": 1.0})
    with pytest.raises(SharesNotNormalizedError):
        activity_emissions(mix)


def test_activities_renormalize_scales_shares_to_one():
    mix = ActivityMix(tourists=10.0, shares=(("a", 0.6), ("b", 0.3)),
                      factors={"a": 1.0, "b": 2.0})
    value = activity_emissions(mix, renormalize=True)
    expected = 10.0 * ((0.6 / 0.9) * 1.0 + (0.3 / 0.9) * 2.0)
    assert value == pytest.approx(expected, rel=1e-12)


def test_activities_missing_factor_is_named():
    with pytest.raises(MissingIndicatorError, match="b"):
        ActivityMix(tourists=1.0, shares=(("a", 0.5), ("b", 0.5)),
                    factors={"a": 1.0})


# -- totals ----------------------------------------------------------------------

def test_total_zero_breakdown():
    assert total_emissions(0.0, 0.0, 0.0).total == 0.0


def test_total_frozen_value():
    breakdown = total_emissions(45e6, 80.3e3, 3e3)
    assert breakdown.total == pytest.approx(45_083_300.0, rel=1e-12)


def test_total_is_permutation_invariant():
    a = total_emissions(1.0, 2.0, 3.0)
    b = total_emissions(3.0, 1.0, 2.0)
    assert a.total == b.total
    assert (a.transport, b.transport) == (1.0, 3.0)


def test_breakdown_rejects_negative_channel():
    with pytest.raises(NegativeQuantityError):
        EmissionBreakdown(transport=-1.0, accommodation=0.0, activities=0.0)


# -- oracle agreement and homogeneity ---------------------------------------------

def test_channel_formulas_match_reference_on_random_inputs():
    rng = np.random.default_rng(7)
    for _ in range(200):
        modes = [
            (rng.uniform(0, 1), rng.uniform(0, 1e7), rng.uniform(0, 2000),
             rng.uniform(0, 0.5))
            for _ in range(rng.integers(1, 5))
        ]
        records = [mode(share=s, passengers=n, distance=d, factor=f, name=f"m{k}")
                   for k, (s, n, d, f) in enumerate(modes)]
        assert transport_emissions(records) == pytest.approx(
            transport_reference(modes), rel=1e-10)

        beds, occ = rng.uniform(0, 1e5), rng.uniform(0, 1)
        energy, carbon = rng.uniform(0, 500), rng.uniform(0, 0.1)
        assert accommodation_emissions(AccommodationParams(
            beds=beds, occupancy=occ, energy_per_bed_night=energy,
            carbon_per_energy=carbon,
        )) == pytest.approx(accommodation_reference(beds, occ, energy, carbon),
                            rel=1e-10)

        k = int(rng.integers(2, 6))
        split = rng.dirichlet(np.ones(k))
        factors = rng.uniform(0, 10, size=k)
        tourists = rng.uniform(0, 1e7)
        mix = ActivityMix(
            tourists=tourists,
            shares=tuple((f"t{j}", float(split[j])) for j in range(k)),
            factors={f"t{j}": float(factors[j]) for j in range(k)},
        )
        assert activity_emissions(mix, renormalize=True) == pytest.approx(
            activities_reference(tourists, zip(split, factors)), rel=1e-10)


def test_channels_are_degree_one_in_counts():
    rng = np.random.default_rng(11)
    for _ in range(50):
        scale = rng.uniform(0.1, 10.0)
        n = rng.uniform(1e3, 1e6)
        base = transport_emissions([mode(passengers=n)])
        scaled = transport_emissions([mode(passengers=scale * n)])
        assert scaled == pytest.approx(scale * base, rel=1e-10)


# -- coefficient files -------------------------------------------------------------

COEFFS = {
    "transport_modes": [
        {
            "mode": "plane",
            "tourist_share": 0.9,
            "passengers": {"indicator": "passengers_plane"},
            "distance_km": 500.0,
            "emission_factor_kg_per_pkm": 0.1,
        }
    ],
    "accommodation": {
        "beds": {"indicator": "beds"},
        "occupancy": 0.6,
        "energy_mj_per_bed_night": 100.0,
        "carbon_kg_per_mj": 0.01,
    },
    "activities": {
        "tourists": {"indicator": "trips"},
        "types": [
            {"name": "a", "share": 0.5, "emission_kg_per_tourist": 2.0},
            {"name": "b", "share": 0.5, "emission_kg_per_tourist": 4.0},
        ],
    },
}


def write_coeffs(tmp_path, payload=None, name="coeffs.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload if payload is not None else COEFFS))
    return path


def test_load_coefficients_round_trip(tmp_path):
    config = load_coefficients(write_coeffs(tmp_path))
    assert config.transport_modes[0].mode == "plane"
    assert config.transport_modes[0].passengers.name == "passengers_plane"
    assert config.accommodation.occupancy == 0.6
    assert config.activities.types[1].emission_kg_per_tourist == 4.0


def test_load_coefficients_allows_note_and_rejects_unknown(tmp_path):
    noted = dict(COEFFS, note="illustrative values only")
    load_coefficients(write_coeffs(tmp_path, noted))
    with pytest.raises(SchemaMismatchError, match="unknown"):
        load_coefficients(write_coeffs(tmp_path, dict(COEFFS, extra={})))


def test_load_coefficients_rejects_malformed_reference(tmp_path):
    bad = json.loads(json.dumps(COEFFS))
    bad["accommodation"]["beds"] = {"indicator": "beds", "typo": 1}
    with pytest.raises(SchemaMismatchError):
        load_coefficients(write_coeffs(tmp_path, bad))


# -- panel-level series -------------------------------------------------------------

def small_panel(values_by_indicator, regions=("r1", "r2"), years=(2000, 2001)):
    indicators = tuple(sorted(values_by_indicator))
    grid = np.empty((len(regions), len(years), len(indicators)))
    for k, name in enumerate(indicators):
        grid[:, :, k] = values_by_indicator[name]
    return PanelDataset(regions=regions, years=years, indicators=indicators,
                        values=grid)


def test_emissions_series_matches_per_cell_reference(tmp_path):
    rng = np.random.default_rng(3)
    panel = small_panel({
        "passengers_plane": rng.uniform(1e5, 1e6, size=(2, 2)),
        "beds": rng.uniform(1e3, 1e4, size=(2, 2)),
        "trips": rng.uniform(1e5, 1e6, size=(2, 2)),
    })
    config = load_coefficients(write_coeffs(tmp_path))
    table = emissions_series(panel, config)
    assert list(table.columns) == [
        "region", "year", "q_transport_kg", "q_accommodation_kg",
        "q_activities_kg", "q_total_kg",
    ]
    for row in table.itertuples(index=False):
        i = panel.regions.index(row.region)
        j = panel.years.index(row.year)
        q_t = transport_reference([
            (0.9, panel.values[i, j, list(panel.indicators).index("passengers_plane")],
             500.0, 0.1)
        ])
        q_h = accommodation_reference(
            panel.values[i, j, list(panel.indicators).index("beds")],
            0.6, 100.0, 0.01,
        )
        q_a = activities_reference(
            panel.values[i, j, list(panel.indicators).index("trips")],
            [(0.5, 2.0), (0.5, 4.0)],
        )
        assert row.q_transport_kg == pytest.approx(q_t, rel=1e-12)
        assert row.q_accommodation_kg == pytest.approx(q_h, rel=1e-12)
        assert row.q_activities_kg == pytest.approx(q_a, rel=1e-12)
        assert row.q_total_kg == (
            row.q_transport_kg + row.q_accommodation_kg + row.q_activities_kg
        )


def test_emissions_series_zero_panel_gives_zero_table(tmp_path):
    panel = small_panel({
        "passengers_plane": np.zeros((2, 2)),
        "beds": np.zeros((2, 2)),
        "trips": np.zeros((2, 2)),
    })
    table = emissions_series(panel, load_coefficients(write_coeffs(tmp_path)))
    assert (table[["q_transport_kg", "q_accommodation_kg", "q_activities_kg",
                   "q_total_kg"]].to_numpy() == 0.0).all()


def test_emissions_series_doubles_with_doubled_quantities(tmp_path):
    base = np.array([[2e5, 4e5]])
    panel = small_panel({
        "passengers_plane": base,
        "beds": np.array([[1e3, 2e3]]),
        "trips": np.array([[1e5, 2e5]]),
    }, regions=("solo",), years=(2000, 2001))
    table = emissions_series(panel, load_coefficients(write_coeffs(tmp_path)))
    q = table["q_total_kg"].to_numpy()
    assert q[1] == pytest.approx(2.0 * q[0], rel=1e-12)


def test_emissions_series_names_offending_cell(tmp_path):
    panel = small_panel({
        "passengers_plane": np.ones((2, 2)),
        "beds": np.ones((2, 2)),
        # No "trips" indicator: the activities channel cannot resolve it.
    })
    config = load_coefficients(write_coeffs(tmp_path))
    with pytest.raises(MissingIndicatorError) as err:
        emissions_series(panel, config)
    message = str(err.value)
    assert "trips" in message and "r1" in message and "2000" in message


def test_emissions_series_without_optional_sections(tmp_path):
    panel = small_panel({"passengers_plane": np.full((2, 2), 1e5)})
    config = load_coefficients(write_coeffs(tmp_path, {
        "transport_modes": COEFFS["transport_modes"],
    }))
    table = emissions_series(panel, config)
    assert (table["q_accommodation_kg"] == 0.0).all()
    assert (table["q_activities_kg"] == 0.0).all()
    assert (table["q_total_kg"] == table["q_transport_kg"]).all()


def test_emissions_to_panel_round_trip(tmp_path):
    rng = np.random.default_rng(5)
    panel = small_panel({
        "passengers_plane": rng.uniform(1e5, 1e6, size=(2, 2)),
        "beds": rng.uniform(1e3, 1e4, size=(2, 2)),
        "trips": rng.uniform(1e5, 1e6, size=(2, 2)),
    })
    table = emissions_series(panel, load_coefficients(write_coeffs(tmp_path)))
    q_panel = emissions_to_panel(table)
    assert q_panel.indicators == ("q_total_kg",)
    assert q_panel.regions == panel.regions
    assert q_panel.years == panel.years
    for row in table.itertuples(index=False):
        assert q_panel.indicator_series(row.region, "q_total_kg")[
            q_panel.years.index(row.year)
        ] == row.q_total_kg


def test_config_defaults_to_empty_sections():
    config = CoefficientConfig()
    assert config.transport_modes == ()
    assert config.accommodation is None
