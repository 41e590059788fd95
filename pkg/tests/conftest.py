import pytest

from bestsim.conduction import Construction, Layer
from bestsim.harness import bundled_catalog
from bestsim.simulate import OpaqueSurface, Thermostat, ZoneModel
from bestsim.solar import SurfaceGeometry
from bestsim.weather import Site, WeatherRecord, WeatherSeries, synth_weather

DENVERISH = Site(39.8, -104.9, -105.0, 0.2)

_criteria: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line: criterion(name, passed, detail)."""
    def record(name: str, passed: bool, detail: str = "") -> None:
        _criteria.append((name, bool(passed), detail))
    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _criteria:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")


@pytest.fixture(scope="session")
def site():
    return DENVERISH


@pytest.fixture(scope="session")
def weather():
    return synth_weather(DENVERISH, mean_temp=9.7, daily_amp=7.0, seasonal_amp=12.0,
                         clearness=0.7, seed=1)


@pytest.fixture(scope="session")
def catalog():
    return bundled_catalog()


def constant_weather(t_out: float, hours: int = 8760, dni: float = 0.0, dhi: float = 0.0,
                     site: Site = DENVERISH) -> WeatherSeries:
    return WeatherSeries(site, tuple(WeatherRecord(h, t_out, dni, dhi) for h in range(hours)))


def massless_box(infiltration: float = 0.5, thermostat: Thermostat | None = None, **zone_kw) -> ZoneModel:
    """6 x 6 x 3 m box with insulation-only walls, no glazing."""
    wall = Construction((Layer(0.10, 0.04),), 0.6, 0.6)
    roof = Construction((Layer(0.15, 0.04),), 0.6, 0.6)
    surfaces = [
        OpaqueSurface(name, SurfaceGeometry(area, az, tilt), cons, h_in=8.0, h_out=25.0)
        for name, area, az, tilt, cons in [
            ("south", 18.0, 180, 90, wall), ("north", 18.0, 0, 90, wall),
            ("east", 18.0, 90, 90, wall), ("west", 18.0, 270, 90, wall),
            ("roof", 36.0, 180, 0, roof), ("floor", 36.0, 180, 180, roof),
        ]
    ]
    return ZoneModel(volume=108.0, surfaces=tuple(surfaces), infiltration_ach=infiltration,
                     thermostat=thermostat or Thermostat(), **zone_kw)
