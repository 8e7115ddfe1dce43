"""Domain model: buildings, climates, construction catalogs, tariffs, sensor fleets.

All types are frozen dataclasses and safe to share between threads. Parsing
is strict: spec files carry every thermal coefficient explicitly, and the
only defaulted fields are schedule-related (``daylight_offset``) plus the
geometric ``overhang_ratio`` and relative ``cost_index``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

SCHEMA_VERSION = 1

#: Canonical orientation order used everywhere loads are accumulated, so that
#: results do not depend on the order envelope groups appear in a spec file.
ORIENTATION_ORDER = ("N", "S", "E", "W")


class Orientation(str, Enum):
    N = "N"
    S = "S"
    E = "E"
    W = "W"


class LightingTechnology(str, Enum):
    INCANDESCENT = "incandescent"
    LED = "led"


class HeatingFuel(str, Enum):
    GAS = "gas"
    ELECTRIC = "electric"


class SpecError(ValueError):
    """A spec file could not be parsed into a valid domain object.

    Carries the list of violations when the failure is semantic rather
    than syntactic, so callers can report them one per line.
    """

    def __init__(self, message: str, violations: list["Violation"] | None = None):
        super().__init__(message)
        self.violations = violations or []


@dataclass(frozen=True)
class Violation:
    """One broken invariant: which field, the offending value, the rule."""

    field: str
    value: Any
    rule: str

    def __str__(self) -> str:
        return f"{self.field}={self.value!r} violates rule: {self.rule}"


@dataclass(frozen=True)
class OpaqueConstruction:
    id: str
    r_value: float  # (m2.K)/W
    cost_index: float = 1.0


@dataclass(frozen=True)
class GlazingOption:
    id: str
    u_value: float  # W/(m2.K)
    shgc: float
    visible_transmittance: float
    cost_index: float = 1.0


@dataclass(frozen=True)
class EnvelopeGroup:
    orientation: Orientation
    gross_wall_area: float  # m2
    wwr: float
    wall: OpaqueConstruction
    glazing: GlazingOption
    overhang_ratio: float = 0.0  # overhang depth / window height


@dataclass(frozen=True)
class Roof:
    construction: OpaqueConstruction
    area: float  # m2


@dataclass(frozen=True)
class LightingSystem:
    technology: LightingTechnology
    lamp_power: float  # W per lamp
    lamp_count: int
    annual_hours: float  # h/yr
    daylight_offset: float = 0.0  # fraction of hours covered by daylight


@dataclass(frozen=True)
class HvacSystem:
    cooling_cop: float
    heating_efficiency: float
    heating_fuel: HeatingFuel


@dataclass(frozen=True)
class BuildingSpec:
    name: str
    floor_area: float  # m2
    conditioned_volume: float  # m3
    storeys: int
    orientations: tuple[EnvelopeGroup, ...]
    roof: Roof
    infiltration: float  # air changes per hour
    occupancy_hours: float  # h/yr
    equipment_power_density: float  # W/m2
    lighting: LightingSystem
    hvac: HvacSystem

    def envelope(self, orientation: Orientation | str) -> EnvelopeGroup:
        key = Orientation(orientation)
        for group in self.orientations:
            if group.orientation is key:
                return group
        raise ValueError(f"orientation {key.value} not present in spec {self.name!r}")


@dataclass(frozen=True)
class ClimateProfile:
    """Monthly degree days plus the seasonal solar quantities the engine needs.

    Degree-day bases are a property of the data, not the engine; the bundled
    Guangdong fixture uses base 26 C for cooling and 18 C for heating.
    """

    cooling_degree_days: tuple[float, ...]  # K.day, 12 entries
    heating_degree_days: tuple[float, ...]  # K.day, 12 entries
    irradiation: Mapping[str, float]  # kWh/m2/yr incident per orientation
    summer_design_sun_altitude: float  # degrees
    winter_design_sun_altitude: float  # degrees
    pv_equivalent_full_sun_hours: float  # h/yr

    @property
    def annual_cdd(self) -> float:
        return sum(self.cooling_degree_days)

    @property
    def annual_hdd(self) -> float:
        return sum(self.heating_degree_days)


@dataclass(frozen=True)
class Tariff:
    electricity_price: float  # CNY/kWh
    gas_price: float  # CNY/m3
    gas_energy_content: float  # kWh/m3
    feed_in_price: float  # CNY/kWh


@dataclass(frozen=True)
class SensorEntry:
    kind: str
    count: int
    unit_power: float  # W
    duty_cycle: float


@dataclass(frozen=True)
class SensorFleet:
    entries: tuple[SensorEntry, ...]


@dataclass(frozen=True)
class Catalog:
    """Candidate materials and systems for the retrofit design space."""

    constructions: Mapping[str, OpaqueConstruction]
    glazings: Mapping[str, GlazingOption]
    hvac_systems: Mapping[str, HvacSystem]
    lamp_powers: Mapping[str, float]  # lighting technology id -> W per lamp
    cost_indices: Mapping[str, float]


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def validate_spec(spec: BuildingSpec) -> list[Violation]:
    """Check every type invariant; returns an empty list iff all hold."""
    out: list[Violation] = []

    def check(cond: bool, fieldname: str, value: Any, rule: str) -> None:
        if not cond:
            out.append(Violation(fieldname, value, rule))

    check(spec.floor_area > 0, "floor_area", spec.floor_area, "must be > 0")
    check(spec.conditioned_volume > 0, "conditioned_volume", spec.conditioned_volume, "must be > 0")
    check(spec.storeys >= 1, "storeys", spec.storeys, "must be >= 1")
    check(spec.infiltration >= 0, "infiltration", spec.infiltration, "must be nonnegative")
    check(0 <= spec.occupancy_hours <= 8760, "occupancy_hours", spec.occupancy_hours,
          "must be within [0, 8760]")
    check(spec.equipment_power_density >= 0, "equipment_power_density",
          spec.equipment_power_density, "must be nonnegative")

    seen = [g.orientation for g in spec.orientations]
    check(sorted(o.value for o in seen) == sorted(ORIENTATION_ORDER),
          "orientations", [o.value for o in seen],
          "exactly one envelope group per cardinal orientation")

    for g in spec.orientations:
        prefix = f"orientations[{g.orientation.value}]"
        check(g.gross_wall_area >= 0, f"{prefix}.gross_wall_area", g.gross_wall_area,
              "must be nonnegative")
        check(0 <= g.wwr <= 1, f"{prefix}.wwr", g.wwr, "must be within [0, 1]")
        check(g.overhang_ratio >= 0, f"{prefix}.overhang_ratio", g.overhang_ratio,
              "must be nonnegative")
        check(g.wall.r_value > 0, f"{prefix}.wall.r_value", g.wall.r_value, "must be > 0")
        check(g.glazing.u_value > 0, f"{prefix}.glazing.u_value", g.glazing.u_value,
              "must be > 0")
        check(0 <= g.glazing.shgc <= 1, f"{prefix}.glazing.shgc", g.glazing.shgc,
              "must be within [0, 1]")
        check(0 <= g.glazing.visible_transmittance <= 1,
              f"{prefix}.glazing.visible_transmittance",
              g.glazing.visible_transmittance, "must be within [0, 1]")

    check(spec.roof.construction.r_value > 0, "roof.construction.r_value",
          spec.roof.construction.r_value, "must be > 0")
    check(spec.roof.area >= 0, "roof.area", spec.roof.area, "must be nonnegative")

    check(spec.lighting.lamp_power >= 0, "lighting.lamp_power", spec.lighting.lamp_power,
          "must be nonnegative")
    check(spec.lighting.lamp_count >= 0, "lighting.lamp_count", spec.lighting.lamp_count,
          "must be nonnegative")
    check(spec.lighting.annual_hours >= 0, "lighting.annual_hours",
          spec.lighting.annual_hours, "must be nonnegative")
    check(0 <= spec.lighting.daylight_offset <= 1, "lighting.daylight_offset",
          spec.lighting.daylight_offset, "must be within [0, 1]")

    check(spec.hvac.cooling_cop > 0, "hvac.cooling_cop", spec.hvac.cooling_cop, "must be > 0")
    check(spec.hvac.heating_efficiency > 0, "hvac.heating_efficiency",
          spec.hvac.heating_efficiency, "must be > 0")

    return out


def glazed_area(spec: BuildingSpec, orientation: Orientation | str) -> float:
    """Glazed area (m2) for one orientation: gross wall area times WWR."""
    group = spec.envelope(orientation)
    return group.gross_wall_area * group.wwr


# ---------------------------------------------------------------------------
# building spec file (JSON)
# ---------------------------------------------------------------------------

def _require(doc: Mapping[str, Any], key: str, context: str) -> Any:
    if key not in doc:
        raise SpecError(f"missing required field {context}{key!r}")
    return doc[key]


def _construction_from_doc(doc: Mapping[str, Any], context: str) -> OpaqueConstruction:
    return OpaqueConstruction(
        id=str(_require(doc, "id", context)),
        r_value=float(_require(doc, "r_value", context)),
        cost_index=float(doc.get("cost_index", 1.0)),
    )


def _glazing_from_doc(doc: Mapping[str, Any], context: str) -> GlazingOption:
    return GlazingOption(
        id=str(_require(doc, "id", context)),
        u_value=float(_require(doc, "u_value", context)),
        shgc=float(_require(doc, "shgc", context)),
        visible_transmittance=float(_require(doc, "visible_transmittance", context)),
        cost_index=float(doc.get("cost_index", 1.0)),
    )


def parse_building_spec(text: str) -> BuildingSpec:
    """Parse a building spec document into a validated :class:`BuildingSpec`.

    Raises
    ------
    SpecError
        On JSON syntax errors (with position), missing required fields,
        unsupported schema versions, or invariant violations.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(
            f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc
    if not isinstance(doc, dict):
        raise SpecError("spec document must be a JSON object")

    version = _require(doc, "schema_version", "")
    if version != SCHEMA_VERSION:
        raise SpecError(f"unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")

    groups = []
    for i, gdoc in enumerate(_require(doc, "orientations", "")):
        ctx = f"orientations[{i}]."
        try:
            orientation = Orientation(_require(gdoc, "orientation", ctx))
        except ValueError as exc:
            raise SpecError(f"{ctx}orientation must be one of N, S, E, W") from exc
        groups.append(EnvelopeGroup(
            orientation=orientation,
            gross_wall_area=float(_require(gdoc, "gross_wall_area_m2", ctx)),
            wwr=float(_require(gdoc, "wwr", ctx)),
            wall=_construction_from_doc(_require(gdoc, "wall", ctx), ctx + "wall."),
            glazing=_glazing_from_doc(_require(gdoc, "glazing", ctx), ctx + "glazing."),
            overhang_ratio=float(gdoc.get("overhang_ratio", 0.0)),
        ))

    roof_doc = _require(doc, "roof", "")
    roof = Roof(
        construction=_construction_from_doc(
            _require(roof_doc, "construction", "roof."), "roof.construction."),
        area=float(_require(roof_doc, "area_m2", "roof.")),
    )

    light_doc = _require(doc, "lighting", "")
    try:
        technology = LightingTechnology(_require(light_doc, "technology", "lighting."))
    except ValueError as exc:
        raise SpecError("lighting.technology must be 'incandescent' or 'led'") from exc
    lighting = LightingSystem(
        technology=technology,
        lamp_power=float(_require(light_doc, "lamp_power_w", "lighting.")),
        lamp_count=int(_require(light_doc, "lamp_count", "lighting.")),
        annual_hours=float(_require(light_doc, "annual_hours", "lighting.")),
        daylight_offset=float(light_doc.get("daylight_offset", 0.0)),
    )

    hvac_doc = _require(doc, "hvac", "")
    try:
        fuel = HeatingFuel(_require(hvac_doc, "heating_fuel", "hvac."))
    except ValueError as exc:
        raise SpecError("hvac.heating_fuel must be 'gas' or 'electric'") from exc
    hvac = HvacSystem(
        cooling_cop=float(_require(hvac_doc, "cooling_cop", "hvac.")),
        heating_efficiency=float(_require(hvac_doc, "heating_efficiency", "hvac.")),
        heating_fuel=fuel,
    )

    spec = BuildingSpec(
        name=str(_require(doc, "name", "")),
        floor_area=float(_require(doc, "floor_area_m2", "")),
        conditioned_volume=float(_require(doc, "conditioned_volume_m3", "")),
        storeys=int(_require(doc, "storeys", "")),
        orientations=tuple(groups),
        roof=roof,
        infiltration=float(_require(doc, "infiltration_ach", "")),
        occupancy_hours=float(_require(doc, "occupancy_hours", "")),
        equipment_power_density=float(_require(doc, "equipment_power_density_w_m2", "")),
        lighting=lighting,
        hvac=hvac,
    )

    violations = validate_spec(spec)
    if violations:
        raise SpecError(
            "spec violates invariants:\n" + "\n".join(str(v) for v in violations),
            violations,
        )
    return spec


def serialize_building_spec(spec: BuildingSpec) -> str:
    """Inverse of :func:`parse_building_spec`; round-trips every valid spec."""
    doc = {
        "schema_version": SCHEMA_VERSION,
        "name": spec.name,
        "floor_area_m2": spec.floor_area,
        "conditioned_volume_m3": spec.conditioned_volume,
        "storeys": spec.storeys,
        "infiltration_ach": spec.infiltration,
        "occupancy_hours": spec.occupancy_hours,
        "equipment_power_density_w_m2": spec.equipment_power_density,
        "orientations": [
            {
                "orientation": g.orientation.value,
                "gross_wall_area_m2": g.gross_wall_area,
                "wwr": g.wwr,
                "overhang_ratio": g.overhang_ratio,
                "wall": {"id": g.wall.id, "r_value": g.wall.r_value,
                         "cost_index": g.wall.cost_index},
                "glazing": {"id": g.glazing.id, "u_value": g.glazing.u_value,
                            "shgc": g.glazing.shgc,
                            "visible_transmittance": g.glazing.visible_transmittance,
                            "cost_index": g.glazing.cost_index},
            }
            for g in spec.orientations
        ],
        "roof": {
            "area_m2": spec.roof.area,
            "construction": {"id": spec.roof.construction.id,
                             "r_value": spec.roof.construction.r_value,
                             "cost_index": spec.roof.construction.cost_index},
        },
        "lighting": {
            "technology": spec.lighting.technology.value,
            "lamp_power_w": spec.lighting.lamp_power,
            "lamp_count": spec.lighting.lamp_count,
            "annual_hours": spec.lighting.annual_hours,
            "daylight_offset": spec.lighting.daylight_offset,
        },
        "hvac": {
            "cooling_cop": spec.hvac.cooling_cop,
            "heating_efficiency": spec.hvac.heating_efficiency,
            "heating_fuel": spec.hvac.heating_fuel.value,
        },
    }
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------------------
# climate file (CSV with a '#' key=value header block)
# ---------------------------------------------------------------------------

def load_climate_profile(text: str) -> ClimateProfile:
    """Parse a climate file: '#' header block, then 12 rows of month,CDD,HDD."""
    header: dict[str, str] = {}
    rows: list[str] = []
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped:
            continue
        if stripped.startswith("#"):
            body = stripped.lstrip("#").strip()
            if "=" in body:
                key, _, value = body.partition("=")
                header[key.strip()] = value.strip()
        else:
            rows.append(stripped)

    reader = csv.DictReader(io.StringIO("\n".join(rows)))
    cdd = [0.0] * 12
    hdd = [0.0] * 12
    seen_months: set[int] = set()
    for row in reader:
        try:
            month = int(row["month"])
            c = float(row["cooling_degree_days_K_day"])
            h = float(row["heating_degree_days_K_day"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"malformed climate row: {row!r}") from exc
        if not 1 <= month <= 12 or month in seen_months:
            raise SpecError(f"invalid or duplicate month {month}")
        if c < 0 or h < 0:
            raise SpecError(f"degree days must be nonnegative (month {month})")
        seen_months.add(month)
        cdd[month - 1] = c
        hdd[month - 1] = h
    if len(seen_months) != 12:
        raise SpecError(f"climate file must supply all 12 months, got {len(seen_months)}")

    def head(key: str) -> float:
        if key not in header:
            raise SpecError(f"climate header missing {key!r}")
        return float(header[key])

    irradiation = {o: head(f"irradiation_kwh_m2_{o}") for o in ORIENTATION_ORDER}
    alt_summer = head("summer_sun_altitude_deg")
    alt_winter = head("winter_sun_altitude_deg")
    for name, alt in (("summer", alt_summer), ("winter", alt_winter)):
        if not 0 < alt < 90:
            raise SpecError(f"{name} sun altitude must lie in (0, 90), got {alt}")
    if any(v < 0 for v in irradiation.values()):
        raise SpecError("irradiation values must be nonnegative")
    sun_hours = head("pv_full_sun_hours")
    if sun_hours < 0:
        raise SpecError("pv_full_sun_hours must be nonnegative")

    return ClimateProfile(
        cooling_degree_days=tuple(cdd),
        heating_degree_days=tuple(hdd),
        irradiation=irradiation,
        summer_design_sun_altitude=alt_summer,
        winter_design_sun_altitude=alt_winter,
        pv_equivalent_full_sun_hours=sun_hours,
    )


# ---------------------------------------------------------------------------
# catalog file (CSV)
# ---------------------------------------------------------------------------

def load_catalog(text: str) -> Catalog:
    """Parse the material/system catalog CSV.

    Rows are typed by their ``kind`` column: construction, glazing, hvac or
    lighting. Unused cells stay empty.
    """
    constructions: dict[str, OpaqueConstruction] = {}
    glazings: dict[str, GlazingOption] = {}
    hvac_systems: dict[str, HvacSystem] = {}
    lamp_powers: dict[str, float] = {}
    cost_indices: dict[str, float] = {}

    reader = csv.DictReader(io.StringIO(text))
    for row in reader:
        kind = (row.get("kind") or "").strip()
        cid = (row.get("id") or "").strip()
        if not kind or not cid:
            raise SpecError(f"catalog row missing kind or id: {row!r}")
        cost = float(row.get("cost_index") or 1.0)
        cost_indices[cid] = cost
        try:
            if kind == "construction":
                constructions[cid] = OpaqueConstruction(cid, float(row["r_value"]), cost)
            elif kind == "glazing":
                glazings[cid] = GlazingOption(
                    cid, float(row["u_value"]), float(row["shgc"]),
                    float(row["visible_transmittance"]), cost)
            elif kind == "hvac":
                hvac_systems[cid] = HvacSystem(
                    float(row["cooling_cop"]), float(row["heating_efficiency"]),
                    HeatingFuel(row["heating_fuel"].strip()))
            elif kind == "lighting":
                lamp_powers[cid] = float(row["lamp_power_w"])
            else:
                raise SpecError(f"unknown catalog kind {kind!r}")
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, SpecError):
                raise
            raise SpecError(f"malformed catalog row for {cid!r}: {exc}") from exc

    return Catalog(constructions, glazings, hvac_systems, lamp_powers, cost_indices)


# ---------------------------------------------------------------------------
# tariff and sensor fleet files (JSON)
# ---------------------------------------------------------------------------

def load_tariff(text: str) -> Tariff:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"tariff file: syntax error at line {exc.lineno}: {exc.msg}") from exc
    tariff = Tariff(
        electricity_price=float(_require(doc, "electricity_price_cny_kwh", "tariff.")),
        gas_price=float(_require(doc, "gas_price_cny_m3", "tariff.")),
        gas_energy_content=float(_require(doc, "gas_energy_content_kwh_m3", "tariff.")),
        feed_in_price=float(_require(doc, "feed_in_price_cny_kwh", "tariff.")),
    )
    for name in ("electricity_price", "gas_price", "gas_energy_content", "feed_in_price"):
        if getattr(tariff, name) <= 0:
            raise SpecError(f"tariff.{name} must be > 0")
    return tariff


def load_sensor_fleet(text: str) -> SensorFleet:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SpecError(f"fleet file: syntax error at line {exc.lineno}: {exc.msg}") from exc
    entries = []
    for i, edoc in enumerate(_require(doc, "entries", "fleet.")):
        ctx = f"entries[{i}]."
        entry = SensorEntry(
            kind=str(_require(edoc, "kind", ctx)),
            count=int(_require(edoc, "count", ctx)),
            unit_power=float(_require(edoc, "unit_power_w", ctx)),
            duty_cycle=float(_require(edoc, "duty_cycle", ctx)),
        )
        if entry.count < 0:
            raise SpecError(f"{ctx}count must be nonnegative")
        if not 0 <= entry.duty_cycle <= 1:
            raise SpecError(f"{ctx}duty_cycle must be within [0, 1]")
        entries.append(entry)
    return SensorFleet(tuple(entries))


# ---------------------------------------------------------------------------
# bundled fixtures
# ---------------------------------------------------------------------------

def fixture_path(name: str) -> Path:
    """Path to a bundled data fixture, e.g. ``fixture_path('baseline_school.json')``."""
    ref = resources.files("lowcarb.data").joinpath(name)
    with resources.as_file(ref) as path:
        return Path(path)


def read_fixture(name: str) -> str:
    return resources.files("lowcarb.data").joinpath(name).read_text(encoding="utf-8")
