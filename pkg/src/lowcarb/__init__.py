"""Building energy audit, retrofit optimization, PV economics and a
solar-powered monitoring-node simulator, with bundled case-study fixtures."""

__version__ = "0.1.0"

from .model import (  # noqa: F401
    BuildingSpec,
    Catalog,
    ClimateProfile,
    EnvelopeGroup,
    GlazingOption,
    HvacSystem,
    LightingSystem,
    OpaqueConstruction,
    Orientation,
    SensorFleet,
    SpecError,
    Tariff,
    Violation,
    fixture_path,
    glazed_area,
    load_catalog,
    load_climate_profile,
    load_sensor_fleet,
    load_tariff,
    parse_building_spec,
    read_fixture,
    serialize_building_spec,
    validate_spec,
)
from .energy import (  # noqa: F401
    CalibrationError,
    CalibrationParams,
    EndUseTargets,
    EnergyReport,
    annual_cost,
    annual_end_use,
    calibrate,
    eui,
    shading_factor,
)
from .lighting import (  # noqa: F401
    DaylightClass,
    Lamp,
    Room,
    annual_lighting_energy,
    daylight_class,
    luminaire_count,
)
from .optimize import (  # noqa: F401
    CodeLimits,
    DesignSpace,
    DesignVariables,
    NoFeasibleDesignError,
    apply_design,
    code_check,
    enumerate_designs,
    optimize,
)
from .pv import (  # noqa: F401
    PanelSpec,
    PvEconomicsReport,
    annual_generation,
    economics,
    panel_count,
)
from .node import (  # noqa: F401
    AlarmState,
    EnvSample,
    NodeConfig,
    NodeState,
    SimResult,
    alarm_transition,
    fleet_annual_energy,
    simulate,
    step,
)
