import dataclasses
import json

import pytest
from hypothesis import given, strategies as st

from lowcarb import (
    BuildingSpec,
    EnvelopeGroup,
    GlazingOption,
    HvacSystem,
    LightingSystem,
    OpaqueConstruction,
    Orientation,
    SpecError,
    glazed_area,
    parse_building_spec,
    serialize_building_spec,
    validate_spec,
)
from lowcarb.model import (
    HeatingFuel,
    LightingTechnology,
    Roof,
    load_climate_profile,
    read_fixture,
)


# ---------------------------------------------------------------------------
# parse_building_spec
# ---------------------------------------------------------------------------

class TestParseBuildingSpec:
    def test_baseline_fixture_floor_area(self, baseline_spec):
        # 1,664.82 GJ / 3.6 MJ/kWh / 177 kWh/m2/yr pins the floor area
        assert baseline_spec.floor_area == pytest.approx(2612.7)

    def test_baseline_fixture_south_wwr(self, baseline_spec):
        assert baseline_spec.envelope("S").wwr == pytest.approx(0.24)

    def test_out_of_range_wwr_rejected(self, baseline_text):
        doc = json.loads(baseline_text)
        doc["orientations"][1]["wwr"] = 1.2
        with pytest.raises(SpecError) as err:
            parse_building_spec(json.dumps(doc))
        assert any("wwr" in v.field for v in err.value.violations)

    def test_syntax_error_reports_position(self):
        with pytest.raises(SpecError, match=r"syntax error at line 2"):
            parse_building_spec('{\n  "name": }')

    def test_missing_required_field(self, baseline_text):
        doc = json.loads(baseline_text)
        del doc["floor_area_m2"]
        with pytest.raises(SpecError, match="floor_area_m2"):
            parse_building_spec(json.dumps(doc))

    def test_unsupported_schema_version(self, baseline_text):
        doc = json.loads(baseline_text)
        doc["schema_version"] = 99
        with pytest.raises(SpecError, match="schema_version"):
            parse_building_spec(json.dumps(doc))

    def test_roundtrip_on_bundled_fixtures(self, baseline_spec, retrofit_spec):
        for spec in (baseline_spec, retrofit_spec):
            assert parse_building_spec(serialize_building_spec(spec)) == spec


# ---------------------------------------------------------------------------
# validate_spec
# ---------------------------------------------------------------------------

class TestValidateSpec:
    def test_baseline_fixture_is_clean(self, baseline_spec):
        assert validate_spec(baseline_spec) == []

    def test_negative_infiltration(self, baseline_spec):
        bad = dataclasses.replace(baseline_spec, infiltration=-1.0)
        violations = validate_spec(bad)
        assert len(violations) == 1
        assert violations[0].field == "infiltration"
        assert "nonnegative" in violations[0].rule

    def test_zero_storeys(self, baseline_spec):
        bad = dataclasses.replace(baseline_spec, storeys=0)
        violations = validate_spec(bad)
        assert [v.field for v in violations] == ["storeys"]

    def test_duplicate_orientation(self, baseline_spec):
        groups = list(baseline_spec.orientations)
        groups[0] = dataclasses.replace(groups[0], orientation=Orientation.S)
        bad = dataclasses.replace(baseline_spec, orientations=tuple(groups))
        assert any(v.field == "orientations" for v in validate_spec(bad))

    @given(
        infiltration=st.floats(-2, 5, allow_nan=False),
        occupancy=st.floats(-100, 9000, allow_nan=False),
        wwr=st.floats(-0.5, 1.5, allow_nan=False),
        offset=st.floats(-0.5, 1.5, allow_nan=False),
    )
    def test_emptiness_matches_invariants(self, infiltration, occupancy, wwr, offset):
        """validate_spec is empty exactly when every fuzzed field is in range."""
        spec = _make_spec(infiltration=infiltration, occupancy_hours=occupancy,
                          south_wwr=wwr, daylight_offset=offset)
        expected_ok = (infiltration >= 0 and 0 <= occupancy <= 8760
                       and 0 <= wwr <= 1 and 0 <= offset <= 1)
        assert (validate_spec(spec) == []) == expected_ok


# ---------------------------------------------------------------------------
# glazed_area
# ---------------------------------------------------------------------------

def _make_spec(infiltration=0.5, occupancy_hours=2000.0, south_wwr=0.4,
               south_area=100.0, daylight_offset=0.0) -> BuildingSpec:
    wall = OpaqueConstruction("w", 1.0)
    glazing = GlazingOption("g", 2.0, 0.5, 0.7)
    groups = tuple(
        EnvelopeGroup(Orientation(o), south_area if o == "S" else 50.0,
                      south_wwr if o == "S" else 0.2, wall, glazing, 0.0)
        for o in ("N", "S", "E", "W"))
    return BuildingSpec(
        name="synthetic", floor_area=200.0, conditioned_volume=600.0, storeys=2,
        orientations=groups, roof=Roof(OpaqueConstruction("r", 1.0), 100.0),
        infiltration=infiltration, occupancy_hours=occupancy_hours,
        equipment_power_density=5.0,
        lighting=LightingSystem(LightingTechnology.LED, 30.0, 10, 2000.0,
                                daylight_offset),
        hvac=HvacSystem(3.0, 0.9, HeatingFuel.GAS),
    )


class TestGlazedArea:
    def test_definition(self):
        spec = _make_spec(south_wwr=0.4, south_area=100.0)
        assert glazed_area(spec, "S") == pytest.approx(40.0)

    def test_zero_wwr(self):
        spec = _make_spec(south_wwr=0.0)
        assert glazed_area(spec, "S") == 0.0

    def test_quarter_wwr_product(self):
        spec = _make_spec(south_wwr=0.24, south_area=250.0)
        assert glazed_area(spec, "S") == pytest.approx(60.0)

    @given(wwr=st.floats(0, 1, allow_nan=False), area=st.floats(0, 1e4, allow_nan=False),
           scale=st.floats(0.1, 10, allow_nan=False))
    def test_linear_in_both_factors(self, wwr, area, scale):
        base = glazed_area(_make_spec(south_wwr=wwr, south_area=area), "S")
        assert glazed_area(_make_spec(south_wwr=wwr, south_area=area * scale), "S") \
            == pytest.approx(base * scale, rel=1e-9, abs=1e-12)

    def test_missing_orientation(self, baseline_spec):
        groups = tuple(g for g in baseline_spec.orientations
                       if g.orientation is not Orientation.E)
        spec = dataclasses.replace(baseline_spec, orientations=groups)
        with pytest.raises(ValueError, match="orientation E"):
            glazed_area(spec, "E")


# ---------------------------------------------------------------------------
# round-trip property
# ---------------------------------------------------------------------------

_positive = st.floats(min_value=1e-3, max_value=1e6, allow_nan=False,
                      allow_infinity=False)
_fraction = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


@st.composite
def building_specs(draw):
    wall = OpaqueConstruction(draw(st.text("abcw", min_size=1, max_size=6)),
                              draw(st.floats(0.05, 10.0)), draw(st.floats(0.1, 5.0)))
    glazing = GlazingOption(draw(st.text("defg", min_size=1, max_size=6)),
                            draw(st.floats(0.5, 7.0)), draw(_fraction),
                            draw(_fraction), draw(st.floats(0.1, 5.0)))
    groups = tuple(
        EnvelopeGroup(Orientation(o), draw(st.floats(0, 2000.0)), draw(_fraction),
                      wall, glazing, draw(st.floats(0, 2.0)))
        for o in ("N", "S", "E", "W"))
    return BuildingSpec(
        name=draw(st.text(min_size=1, max_size=12)),
        floor_area=draw(_positive),
        conditioned_volume=draw(_positive),
        storeys=draw(st.integers(1, 40)),
        orientations=groups,
        roof=Roof(OpaqueConstruction("roof", draw(st.floats(0.05, 10.0))),
                  draw(st.floats(0, 5000.0))),
        infiltration=draw(st.floats(0, 5.0)),
        occupancy_hours=draw(st.floats(0, 8760.0)),
        equipment_power_density=draw(st.floats(0, 50.0)),
        lighting=LightingSystem(draw(st.sampled_from(list(LightingTechnology))),
                                draw(st.floats(0, 200.0)), draw(st.integers(0, 5000)),
                                draw(st.floats(0, 8760.0)), draw(_fraction)),
        hvac=HvacSystem(draw(st.floats(0.5, 8.0)), draw(st.floats(0.3, 6.0)),
                        draw(st.sampled_from(list(HeatingFuel)))),
    )


@given(spec=building_specs())
def test_parse_serialize_roundtrip(spec):
    assert parse_building_spec(serialize_building_spec(spec)) == spec


# ---------------------------------------------------------------------------
# climate file
# ---------------------------------------------------------------------------

class TestClimateFile:
    def test_bundled_fixture(self, climate):
        assert climate.annual_cdd == pytest.approx(550.0)
        assert climate.annual_hdd == pytest.approx(176.2)
        assert climate.irradiation["S"] == pytest.approx(600.0)
        assert climate.summer_design_sun_altitude == pytest.approx(87.0)
        assert climate.winter_design_sun_altitude == pytest.approx(43.0)
        assert climate.pv_equivalent_full_sun_hours == pytest.approx(1200.0)

    def test_missing_month_rejected(self):
        text = read_fixture("gd_climate.csv")
        lines = [ln for ln in text.splitlines() if not ln.startswith("12,")]
        with pytest.raises(SpecError, match="12 months"):
            load_climate_profile("\n".join(lines))

    def test_missing_header_key_rejected(self):
        text = read_fixture("gd_climate.csv")
        lines = [ln for ln in text.splitlines() if "pv_full_sun_hours" not in ln]
        with pytest.raises(SpecError, match="pv_full_sun_hours"):
            load_climate_profile("\n".join(lines))

    def test_altitude_range_enforced(self):
        text = read_fixture("gd_climate.csv").replace(
            "summer_sun_altitude_deg=87", "summer_sun_altitude_deg=95")
        with pytest.raises(SpecError, match="altitude"):
            load_climate_profile(text)


class TestCatalogFile:
    def test_bundled_entries(self, catalog):
        assert catalog.glazings["dbl_loe"].u_value == pytest.approx(1.8)
        assert catalog.constructions["wall_sip_12in"].r_value == pytest.approx(2.0)
        assert catalog.hvac_systems["heat_pump"].heating_fuel is HeatingFuel.ELECTRIC
        assert catalog.lamp_powers["led"] == pytest.approx(30.0)

    def test_unknown_kind_rejected(self):
        text = "kind,id,r_value,cost_index\nwidget,x,1.0,1.0\n"
        with pytest.raises(SpecError, match="unknown catalog kind"):
            from lowcarb import load_catalog
            load_catalog(text)


class TestTariffAndFleetFiles:
    def test_tariff_values(self, tariff):
        assert tariff.electricity_price == pytest.approx(0.66)
        assert tariff.gas_price == pytest.approx(3.41)
        assert tariff.feed_in_price == pytest.approx(0.35)

    def test_nonpositive_price_rejected(self):
        from lowcarb import load_tariff
        with pytest.raises(SpecError, match="electricity_price"):
            load_tariff(json.dumps({
                "electricity_price_cny_kwh": 0, "gas_price_cny_m3": 1,
                "gas_energy_content_kwh_m3": 10, "feed_in_price_cny_kwh": 0.3}))

    def test_fleet_duty_cycle_range(self):
        from lowcarb import load_sensor_fleet
        with pytest.raises(SpecError, match="duty_cycle"):
            load_sensor_fleet(json.dumps({
                "entries": [{"kind": "x", "count": 1, "unit_power_w": 1.0,
                             "duty_cycle": 1.5}]}))
