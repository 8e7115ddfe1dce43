"""Steady-state annual energy engine.

The model is a degree-day surrogate: conduction and infiltration scale with
annual cooling/heating degree days, solar gains through glazing are split
between the cooling and heating seasons by degree-day mass, and internal
gains (lighting + equipment, scaled by a calibrated multiplier) load the
cooling system while a small utilization factor credits them against
heating. Everything is a pure function of its arguments; identical inputs
give bit-identical reports.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .model import (
    ORIENTATION_ORDER,
    BuildingSpec,
    ClimateProfile,
    HeatingFuel,
    SpecError,
    Tariff,
    validate_spec,
)

#: Volumetric heat capacity of air, Wh/(m3.K).
AIR_HEAT_CAPACITY_WH_M3K = 0.335

#: Fraction of heating-season solar and internal gains that actually displace
#: heating. In a warm, cooling-dominated climate most winter gains arrive
#: when no heating runs, so utilization is low.
HEATING_GAIN_UTILIZATION = 0.05

#: Default fuel energy content used to express heating fuel as gas volume
#: when no tariff is at hand; the bundled tariff carries the same value.
DEFAULT_GAS_ENERGY_CONTENT_KWH_M3 = 10.0

MJ_PER_KWH = 3.6
KWH_PER_GJ = 1000.0 / MJ_PER_KWH


@dataclass(frozen=True)
class CalibrationParams:
    """Multipliers absorbing everything the surrogate does not model.

    ``internal_gain_multiplier`` rescales the internal gains seen by the
    thermal balance (ventilation, latent and occupant loads collapse into
    it, so calibrated values well above 1 are expected).
    ``schedule_multiplier`` rescales lighting energy and
    ``equipment_multiplier`` rescales equipment energy.
    """

    internal_gain_multiplier: float = 1.0
    schedule_multiplier: float = 1.0
    equipment_multiplier: float = 1.0


@dataclass(frozen=True)
class EnergyReport:
    """Annual end-use energy in GJ with fuel attribution."""

    lighting: float  # GJ/yr
    cooling: float  # GJ/yr
    heating: float  # GJ/yr
    equipment: float  # GJ/yr
    total: float  # GJ/yr, exact sum of the four components
    electricity: float  # kWh/yr
    gas: float  # m3/yr

    def to_dict(self) -> dict:
        return {
            "lighting_gj": self.lighting,
            "cooling_gj": self.cooling,
            "heating_gj": self.heating,
            "equipment_gj": self.equipment,
            "total_gj": self.total,
            "electricity_kwh": self.electricity,
            "gas_m3": self.gas,
        }

    def csv_rows(self, heating_fuel: HeatingFuel) -> list[tuple[str, float, float, str]]:
        """One row per end use: (name, GJ, kWh equivalent, fuel)."""
        return [
            ("lighting", self.lighting, self.lighting * KWH_PER_GJ, "electricity"),
            ("cooling", self.cooling, self.cooling * KWH_PER_GJ, "electricity"),
            ("heating", self.heating, self.heating * KWH_PER_GJ, heating_fuel.value),
            ("equipment", self.equipment, self.equipment * KWH_PER_GJ, "electricity"),
        ]


class CalibrationError(RuntimeError):
    """Calibration could not reach the target tolerance."""

    def __init__(self, message: str, best_residual: float):
        super().__init__(message)
        self.best_residual = best_residual


@dataclass(frozen=True)
class EndUseTargets:
    """Calibration targets, annual GJ per end use."""

    lighting_gj: float
    cooling_gj: float
    heating_gj: float
    equipment_gj: float

    @staticmethod
    def from_json(text: str) -> "EndUseTargets":
        doc = json.loads(text)
        return EndUseTargets(
            lighting_gj=float(doc["lighting_gj"]),
            cooling_gj=float(doc["cooling_gj"]),
            heating_gj=float(doc["heating_gj"]),
            equipment_gj=float(doc["equipment_gj"]),
        )


def shading_factor(overhang_ratio: float, sun_altitude: float) -> float:
    """Transmitted direct-sun fraction under a horizontal overhang.

    ``1 - min(1, overhang_ratio * tan(sun_altitude))``: a deeper overhang or
    a higher sun shades more of the window.

    Parameters
    ----------
    overhang_ratio : float
        Overhang depth divided by window height, >= 0.
    sun_altitude : float
        Design sun altitude in degrees, within (0, 90).
    """
    if overhang_ratio < 0:
        raise ValueError(f"overhang_ratio must be nonnegative, got {overhang_ratio}")
    if not 0.0 < sun_altitude < 90.0:
        raise ValueError(f"sun_altitude must lie in (0, 90) degrees, got {sun_altitude}")
    return 1.0 - min(1.0, overhang_ratio * math.tan(math.radians(sun_altitude)))


def _season_weights(climate: ClimateProfile) -> tuple[float, float]:
    """Cooling/heating shares of the year measured by degree-day mass."""
    cdd = climate.annual_cdd
    hdd = climate.annual_hdd
    total = cdd + hdd
    if total <= 0.0:
        return 0.0, 0.0
    return cdd / total, hdd / total


def _loads(spec: BuildingSpec, climate: ClimateProfile,
           calib: CalibrationParams) -> tuple[float, float, float, float]:
    """Thermal balance: (cooling load kWh, unclamped heating load kWh,
    lighting kWh, equipment kWh)."""
    cdd = climate.annual_cdd
    hdd = climate.annual_hdd
    t_cool = cdd * 24.0 / 1000.0  # kWh per W/K
    t_heat = hdd * 24.0 / 1000.0
    w_cool, w_heat = _season_weights(climate)

    h_envelope = spec.roof.area / spec.roof.construction.r_value
    solar_cool = 0.0
    solar_heat = 0.0
    for key in ORIENTATION_ORDER:
        g = spec.envelope(key)
        a_glazed = g.gross_wall_area * g.wwr
        a_wall = g.gross_wall_area - a_glazed
        h_envelope += a_wall / g.wall.r_value + a_glazed * g.glazing.u_value
        irr = climate.irradiation[key]
        solar_cool += g.glazing.shgc * a_glazed * irr * shading_factor(
            g.overhang_ratio, climate.summer_design_sun_altitude)
        solar_heat += g.glazing.shgc * a_glazed * irr * shading_factor(
            g.overhang_ratio, climate.winter_design_sun_altitude)

    h_infiltration = AIR_HEAT_CAPACITY_WH_M3K * spec.infiltration * spec.conditioned_volume
    h_total = h_envelope + h_infiltration

    lighting_kwh = (spec.lighting.lamp_count * spec.lighting.lamp_power
                    * spec.lighting.annual_hours
                    * (1.0 - spec.lighting.daylight_offset) / 1000.0
                    * calib.schedule_multiplier)
    equipment_kwh = (spec.equipment_power_density * spec.floor_area
                     * spec.occupancy_hours / 1000.0
                     * calib.equipment_multiplier)
    internal_gains = (lighting_kwh + equipment_kwh) * calib.internal_gain_multiplier

    cooling_load = h_total * t_cool + w_cool * (solar_cool + internal_gains)
    heating_load = (h_total * t_heat
                    - HEATING_GAIN_UTILIZATION * w_heat * (solar_heat + internal_gains))
    return cooling_load, heating_load, lighting_kwh, equipment_kwh


def annual_end_use(spec: BuildingSpec, climate: ClimateProfile,
                   calib: CalibrationParams = CalibrationParams(),
                   gas_energy_content: float = DEFAULT_GAS_ENERGY_CONTENT_KWH_M3,
                   ) -> EnergyReport:
    """Annual end-use energy for one building under one climate.

    Cooling is always served electrically at ``cooling_cop``; heating fuel
    follows ``hvac.heating_fuel`` at ``heating_efficiency``. The heating
    load is clamped at zero after gains are credited.

    Raises
    ------
    SpecError
        If the spec fails :func:`lowcarb.model.validate_spec`.
    """
    violations = validate_spec(spec)
    if violations:
        raise SpecError(
            "cannot evaluate an invalid spec:\n" + "\n".join(str(v) for v in violations),
            violations,
        )

    cooling_load, heating_load, lighting_kwh, equipment_kwh = _loads(spec, climate, calib)
    heating_load = max(0.0, heating_load)

    cooling_kwh = cooling_load / spec.hvac.cooling_cop
    heating_fuel_kwh = heating_load / spec.hvac.heating_efficiency

    lighting_gj = lighting_kwh * MJ_PER_KWH / 1000.0
    cooling_gj = cooling_kwh * MJ_PER_KWH / 1000.0
    heating_gj = heating_fuel_kwh * MJ_PER_KWH / 1000.0
    equipment_gj = equipment_kwh * MJ_PER_KWH / 1000.0

    electricity = lighting_kwh + equipment_kwh + cooling_kwh
    gas_m3 = 0.0
    if spec.hvac.heating_fuel is HeatingFuel.GAS:
        gas_m3 = heating_fuel_kwh / gas_energy_content
    else:
        electricity += heating_fuel_kwh

    return EnergyReport(
        lighting=lighting_gj,
        cooling=cooling_gj,
        heating=heating_gj,
        equipment=equipment_gj,
        total=lighting_gj + cooling_gj + heating_gj + equipment_gj,
        electricity=electricity,
        gas=gas_m3,
    )


def eui(report: EnergyReport, floor_area: float) -> float:
    """Energy use intensity, kWh/(m2.yr), with 1 kWh = 3.6 MJ."""
    if floor_area <= 0:
        raise ValueError(f"floor_area must be > 0, got {floor_area}")
    return report.total * KWH_PER_GJ / floor_area


def annual_cost(report: EnergyReport, tariff: Tariff, floor_area: float) -> float:
    """Annual energy cost per floor area, CNY/(m2.yr)."""
    if floor_area <= 0:
        raise ValueError(f"floor_area must be > 0, got {floor_area}")
    return (report.electricity * tariff.electricity_price
            + report.gas * tariff.gas_price) / floor_area


def calibrate(spec: BuildingSpec, climate: ClimateProfile, targets: EndUseTargets,
              tolerance: float = 0.005) -> CalibrationParams:
    """Find multipliers reproducing the target end-use split.

    Deterministic coordinate descent: the lighting and equipment targets fix
    their multipliers exactly (both are linear), then the internal-gain
    multiplier is the closed-form least-squares minimizer of the relative
    cooling and heating residuals, honoring the heating clamp.

    Raises
    ------
    ValueError
        If any target is not positive.
    CalibrationError
        If the best residual exceeds ``tolerance`` (default 0.5% relative).
    """
    for name in ("lighting_gj", "cooling_gj", "heating_gj", "equipment_gj"):
        if getattr(targets, name) <= 0:
            raise ValueError(f"calibration target {name} must be positive")
    violations = validate_spec(spec)
    if violations:
        raise SpecError("cannot calibrate an invalid spec", violations)

    base = annual_end_use(spec, climate, CalibrationParams())
    if base.lighting <= 0 or base.equipment <= 0:
        raise CalibrationError(
            "model lighting/equipment energy is zero; schedule targets unreachable",
            best_residual=math.inf)
    schedule_m = targets.lighting_gj / base.lighting
    equipment_m = targets.equipment_gj / base.equipment

    # Cooling is affine in the gain multiplier, heating is affine until the
    # clamp: probe the unclamped loads at 0 and 1 to recover both lines.
    target_cool_kwh = targets.cooling_gj * KWH_PER_GJ * spec.hvac.cooling_cop
    target_heat_kwh = targets.heating_gj * KWH_PER_GJ * spec.hvac.heating_efficiency

    def loads_at(igm: float) -> tuple[float, float]:
        params = CalibrationParams(igm, schedule_m, equipment_m)
        cool, heat_unclamped, _, _ = _loads(spec, climate, params)
        return cool, heat_unclamped

    cool0, heat0 = loads_at(0.0)
    cool1, heat1 = loads_at(1.0)
    cool_slope = cool1 - cool0
    heat_slope = heat0 - heat1  # heating decreases with gains

    def residuals(igm: float) -> tuple[float, float]:
        cool = cool0 + cool_slope * igm
        heat = max(0.0, heat0 - heat_slope * igm)
        return (cool - target_cool_kwh) / target_cool_kwh, \
               (heat - target_heat_kwh) / target_heat_kwh

    def objective(igm: float) -> float:
        rc, rh = residuals(igm)
        return rc * rc + rh * rh

    candidates = [0.0]
    # unclamped least squares
    denom = (cool_slope / target_cool_kwh) ** 2 + (heat_slope / target_heat_kwh) ** 2
    if denom > 0:
        num = ((target_cool_kwh - cool0) * cool_slope / target_cool_kwh ** 2
               + (heat0 - target_heat_kwh) * heat_slope / target_heat_kwh ** 2)
        candidates.append(max(0.0, num / denom))
    # clamp boundary and the cooling-only optimum in the clamped region
    if heat_slope > 0:
        candidates.append(max(0.0, heat0 / heat_slope))
    if cool_slope > 0:
        candidates.append(max(0.0, (target_cool_kwh - cool0) / cool_slope))

    gain_m = min(candidates, key=lambda x: (objective(x), x))

    params = CalibrationParams(gain_m, schedule_m, equipment_m)
    achieved = annual_end_use(spec, climate, params)
    worst = max(
        abs(achieved.lighting - targets.lighting_gj) / targets.lighting_gj,
        abs(achieved.cooling - targets.cooling_gj) / targets.cooling_gj,
        abs(achieved.heating - targets.heating_gj) / targets.heating_gj,
        abs(achieved.equipment - targets.equipment_gj) / targets.equipment_gj,
    )
    if worst > tolerance:
        raise CalibrationError(
            f"calibration residual {worst:.4%} exceeds tolerance {tolerance:.2%}",
            best_residual=worst)
    return params


def load_calibration(text: str) -> CalibrationParams:
    """Read a ``calibration`` block (or a bare calibration JSON object)."""
    doc = json.loads(text)
    block = doc.get("calibration", doc)
    return CalibrationParams(
        internal_gain_multiplier=float(block.get("internal_gain_multiplier", 1.0)),
        schedule_multiplier=float(block.get("schedule_multiplier", 1.0)),
        equipment_multiplier=float(block.get("equipment_multiplier", 1.0)),
    )
