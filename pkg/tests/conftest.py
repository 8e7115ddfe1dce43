import pytest

from lowcarb import (
    DesignSpace,
    load_catalog,
    load_climate_profile,
    load_sensor_fleet,
    load_tariff,
    parse_building_spec,
    read_fixture,
)
from lowcarb.energy import EndUseTargets, load_calibration


@pytest.fixture(scope="session")
def baseline_text():
    return read_fixture("baseline_school.json")


@pytest.fixture(scope="session")
def baseline_spec(baseline_text):
    return parse_building_spec(baseline_text)


@pytest.fixture(scope="session")
def baseline_calibration(baseline_text):
    return load_calibration(baseline_text)


@pytest.fixture(scope="session")
def retrofit_text():
    return read_fixture("retrofit_package.json")


@pytest.fixture(scope="session")
def retrofit_spec(retrofit_text):
    return parse_building_spec(retrofit_text)


@pytest.fixture(scope="session")
def climate():
    return load_climate_profile(read_fixture("gd_climate.csv"))


@pytest.fixture(scope="session")
def catalog():
    return load_catalog(read_fixture("catalog.csv"))


@pytest.fixture(scope="session")
def tariff():
    return load_tariff(read_fixture("paper_tariff.json"))


@pytest.fixture(scope="session")
def fleet():
    return load_sensor_fleet(read_fixture("sensor_fleet.json"))


@pytest.fixture(scope="session")
def paper_space():
    return DesignSpace.from_json(read_fixture("paper_space.json"))


@pytest.fixture(scope="session")
def baseline_targets():
    return EndUseTargets.from_json(read_fixture("baseline_targets.json"))
