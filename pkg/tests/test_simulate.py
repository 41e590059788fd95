import dataclasses
import math

import numpy as np
import pytest

from bestsim.conduction import DISCRETIZED, TWO_NODE, Construction, Layer
from bestsim.simulate import (
    AIR_VOLUMETRIC_HEAT,
    BACKWARD_EULER,
    EXACT,
    SCHEMES,
    OpaqueSurface,
    SingularSystem,
    Thermostat,
    Window,
    ZoneModel,
    ZoneSystem,
    annual_solar_gains,
    simulate_annual,
    solar_gains,
    step,
)
from bestsim.solar import Glazing, SunPosition, SurfaceGeometry, WindowGeometry, sun_position
from bestsim.weather import WeatherRecord

from conftest import constant_weather, massless_box

MODELS = (TWO_NODE, DISCRETIZED)
HEAVY = Construction((Layer(0.1, 1.4, 2000.0, 900.0), Layer(0.05, 0.04, 20.0, 1400.0)))


def box_ua():
    walls = 72.0 / (1 / 8.0 + 0.10 / 0.04 + 1 / 25.0)
    roof_floor = 72.0 / (1 / 8.0 + 0.15 / 0.04 + 1 / 25.0)
    return walls + roof_floor


def box_infiltration(ach=0.5):
    return AIR_VOLUMETRIC_HEAT * 108.0 * ach / 3600.0


def adiabatic_zone(initial=23.0):
    surfaces = tuple(
        OpaqueSurface(f"s{i}", SurfaceGeometry(area, az, tilt), HEAVY, boundary="adiabatic")
        for i, (area, az, tilt) in enumerate([(20, 180, 90), (20, 0, 90), (12, 90, 90), (30, 0, 0)])
    )
    return ZoneModel(volume=60.0, surfaces=surfaces, infiltration_ach=0.0, initial_temperature=initial)


def south_window(devices=()):
    surface = SurfaceGeometry(6.0, 180, 90)
    return Window("glass", Glazing(6.0, 0.75), WindowGeometry(surface, 3.0, 2.0), devices)


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("scheme", SCHEMES)
def test_adiabatic_closure(model, scheme):
    system = ZoneSystem(adiabatic_zone(), model, scheme)
    rng = np.random.default_rng(0)
    state = system.initial_state()
    zero = np.zeros(system.size)
    worst = 0.0
    for h in range(8760):
        state, heat, cool = system.step(state, float(rng.uniform(-30, 40)), zero, h % 24)
        assert heat == 0.0 and cool == 0.0
        worst = max(worst, float(np.max(np.abs(state - 23.0))))
    assert worst < 1e-9


def test_deadband_year_has_no_loads():
    result = simulate_annual(massless_box(), constant_weather(24.0))
    assert result.annual_heating == 0.0 and result.annual_cooling == 0.0
    assert np.allclose(result.air_temperature, 24.0, atol=1e-9)


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("scheme", SCHEMES)
def test_steady_heating_matches_hand_balance(model, scheme):
    result = simulate_annual(massless_box(), constant_weather(0.0), model, scheme=scheme)
    expected = (box_ua() + box_infiltration()) * 20.0
    assert np.max(np.abs(result.heating / expected - 1.0)) < 1e-6
    assert result.annual_cooling == 0.0
    hand_mwh = expected * 8760 * 3600 / 3.6e9
    assert result.annual_heating == pytest.approx(hand_mwh, rel=1e-9)


def test_steady_cooling_mirrors_heating():
    result = simulate_annual(massless_box(), constant_weather(37.0))
    expected = (box_ua() + box_infiltration()) * 10.0
    np.testing.assert_allclose(result.cooling, expected, rtol=1e-6)
    assert result.annual_heating == 0.0


def test_annual_totals_are_hourly_sums():
    result = simulate_annual(massless_box(internal_gains=300.0), constant_weather(5.0))
    assert result.annual_heating == math.fsum(result.heating) * 3600 / 3.6e9


def test_deterministic(catalog, weather):
    case = catalog.case("600")
    a = simulate_annual(case.zone, weather, TWO_NODE)
    b = simulate_annual(case.zone, weather, TWO_NODE)
    for field in ("air_temperature", "heating", "cooling"):
        assert np.array_equal(getattr(a, field), getattr(b, field))


@pytest.mark.parametrize("case_id", ["600", "650", "900"])
def test_thermostat_contract(catalog, weather, case_id):
    case = catalog.case(case_id)
    tstat = case.zone.thermostat
    r = simulate_annual(case.zone, weather, case.default_model)
    heating, cooling = r.heating > 0, r.cooling > 0
    assert not np.any(heating & cooling)
    assert np.all(np.abs(r.air_temperature[heating] - tstat.heat_setpoint) < 1e-6)
    assert np.all(np.abs(r.air_temperature[cooling] - tstat.cool_setpoint) < 1e-6)
    assert np.all(r.heating >= 0) and np.all(r.cooling >= 0)


def test_heating_disabled_gives_exact_zero(catalog, weather):
    case = catalog.case("650")
    assert not case.zone.thermostat.heating_enabled
    r = simulate_annual(case.zone, weather, case.default_model)
    assert r.annual_heating == 0.0
    assert r.annual_cooling > 0.0


def test_cooling_only_in_scheduled_hours(catalog, weather):
    case = catalog.case("650")
    r = simulate_annual(case.zone, weather, case.default_model)
    hours = np.arange(8760) % 24
    allowed = np.array(case.zone.thermostat.cooling_hours)[hours]
    assert np.all(r.cooling[~allowed] == 0.0)


@pytest.mark.parametrize("case_id", ["270", "280", "600", "610", "620", "630", "650", "900", "930"])
def test_substeps_change_loads_little(catalog, weather, case_id):
    case = catalog.case(case_id)
    hourly = simulate_annual(case.zone, weather, case.default_model, substeps=1)
    fine = simulate_annual(case.zone, weather, case.default_model, substeps=6)
    for q in ("annual_heating", "annual_cooling"):
        a, b = getattr(hourly, q), getattr(fine, q)
        assert abs(a - b) <= 0.01 * max(abs(a), abs(b)) or a == b == 0.0


def test_backward_euler_converges_toward_exact(catalog, weather):
    # first-order scheme: the gap to the exact step shrinks with the step
    zone = catalog.case("900").zone
    exact = simulate_annual(zone, weather, scheme=EXACT, substeps=6).annual_heating
    gaps = [abs(simulate_annual(zone, weather, scheme=BACKWARD_EULER, substeps=n).annual_heating - exact)
            for n in (1, 6)]
    assert gaps[1] < gaps[0]


def test_massless_walls_identical_across_models(weather):
    zone = massless_box(windows=(south_window(),), internal_gains=200.0, convective_fraction=0.4)
    a = simulate_annual(zone, weather, TWO_NODE)
    b = simulate_annual(zone, weather, DISCRETIZED)
    assert a.annual_heating == pytest.approx(b.annual_heating, rel=1e-9)
    assert a.annual_cooling == pytest.approx(b.annual_cooling, rel=1e-9)
    np.testing.assert_allclose(a.air_temperature, b.air_temperature, rtol=1e-9)


class TestSolarGains:
    def test_night_is_zero(self):
        zone = massless_box(windows=(south_window(),))
        g = solar_gains(zone, WeatherRecord(0, 0.0), SunPosition(-20.0, 0.0))
        assert np.all(g.exterior_absorbed == 0) and g.transmitted == 0

    def test_zero_exterior_absorptance(self):
        black = Construction((Layer(0.1, 0.04),), exterior_solar_absorptance=0.0)
        s = OpaqueSurface("roof", SurfaceGeometry(36.0, 180, 0), black)
        zone = ZoneModel(volume=108.0, surfaces=(s,))
        g = solar_gains(zone, WeatherRecord(12, 20.0, 900.0, 150.0), SunPosition(60.0, 180.0))
        assert g.exterior_absorbed[0] == 0.0

    def test_hand_product_chain(self):
        zone = massless_box(windows=(south_window(),))
        rec = WeatherRecord(12, 5.0, 800.0, 100.0)
        g = solar_gains(zone, rec, SunPosition(30.0, 180.0))
        c = math.cos(math.radians(30.0))
        ghi = 800.0 * 0.5 + 100.0
        beam_plane = 800.0 * c
        diffuse_plane = 100.0 / 2 + 0.2 * ghi / 2
        tau = 0.75 * (1 - (1 - c) ** 3)
        assert g.transmitted_beam == pytest.approx(6.0 * tau * beam_plane, rel=1e-12)
        assert g.transmitted_diffuse == pytest.approx(6.0 * 0.75 * 0.875 * diffuse_plane, rel=1e-12)
        names = [s.name for s in zone.surfaces]
        south = g.exterior_absorbed[names.index("south")]
        assert south == pytest.approx(0.6 * (beam_plane + diffuse_plane) * 18.0, rel=1e-12)
        roof = g.exterior_absorbed[names.index("roof")]
        assert roof == pytest.approx(0.6 * (800.0 * 0.5 + 100.0) * 36.0, rel=1e-12)
        assert g.exterior_absorbed[names.index("north")] == pytest.approx(0.6 * diffuse_plane * 18.0, rel=1e-12)

    @pytest.mark.parametrize("case_id", ["600", "610", "620", "630"])
    def test_vectorized_matches_scalar(self, catalog, weather, case_id):
        zone = catalog.case(case_id).zone
        suns = [sun_position(weather.site, r.hour_index) for r in weather.records]
        exterior, beam, diffuse = annual_solar_gains(zone, weather, suns)
        for i in range(0, 8760, 37):
            g = solar_gains(zone, weather.records[i], suns[i], weather.site.ground_reflectance)
            np.testing.assert_allclose(exterior[i], g.exterior_absorbed, rtol=1e-12, atol=1e-9)
            assert beam[i] == pytest.approx(g.transmitted_beam, rel=1e-12, abs=1e-9)
            assert diffuse[i] == pytest.approx(g.transmitted_diffuse, rel=1e-12, abs=1e-9)


class TestStepWrapper:
    def test_matches_system_step(self):
        zone = massless_box()
        system = ZoneSystem(zone)
        rec = WeatherRecord(30, -5.0)
        gains = solar_gains(zone, rec, SunPosition(-10.0, 0.0))
        state = system.initial_state()
        a = step(zone, state, rec, gains)
        b = system.step(state, -5.0, system.sources(gains), 6)
        assert np.array_equal(a[0], b[0]) and a[1:] == b[1:]
        assert a[1] > 0 and a[2] == 0

    def test_rejects_wrong_state_size(self):
        zone = massless_box()
        gains = solar_gains(zone, WeatherRecord(0, 0.0), SunPosition(-10.0, 0.0))
        with pytest.raises(ValueError):
            step(zone, np.zeros(3), WeatherRecord(0, 0.0), gains)

    def test_rejects_non_positive_dt(self):
        system = ZoneSystem(massless_box())
        with pytest.raises(ValueError):
            system.step(system.initial_state(), 0.0, np.zeros(system.size), 0, dt=0.0)

    @pytest.mark.parametrize("scheme", SCHEMES)
    def test_singular_system(self, scheme):
        bare = Construction((Layer(0.1, 0.04),))
        s = OpaqueSurface("only", SurfaceGeometry(10.0), bare, boundary="adiabatic")
        zone = ZoneModel(volume=10.0, surfaces=(s,), air_capacitance=0.0)
        system = ZoneSystem(zone, TWO_NODE, scheme)
        with pytest.raises(SingularSystem):
            system.step(system.initial_state(), 0.0, np.zeros(system.size), 0)

    def test_unknown_scheme(self):
        with pytest.raises(ValueError):
            ZoneSystem(massless_box(), TWO_NODE, "runge_kutta")


class TestValidation:
    def test_setpoint_order(self):
        with pytest.raises(ValueError):
            Thermostat(heat_setpoint=27.0, cool_setpoint=20.0)
        Thermostat(heat_setpoint=27.0, cool_setpoint=20.0, heating_enabled=False)

    @pytest.mark.parametrize("kwargs", [
        dict(infiltration_ach=-0.1), dict(convective_fraction=1.5), dict(volume=0.0),
        dict(infiltration_ach=(0.5,) * 23), dict(floor="attic"),
    ])
    def test_zone_rejects(self, kwargs):
        with pytest.raises(ValueError):
            dataclasses.replace(massless_box(), **kwargs)

    def test_film_coefficients_positive(self):
        with pytest.raises(ValueError):
            OpaqueSurface("x", SurfaceGeometry(1.0), HEAVY, h_in=0.0)

    def test_hourly_infiltration_and_venting(self):
        tstat = Thermostat(venting_schedule=(2.0,) * 12 + (0.0,) * 12)
        zone = massless_box(infiltration=tuple([0.5] * 24), thermostat=tstat)
        assert zone.air_changes(3) == 2.5 and zone.air_changes(15) == 0.5
