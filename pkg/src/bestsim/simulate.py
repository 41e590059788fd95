"""Single-zone heat balance with ideal heating and cooling.

Every opaque surface contributes its RC network (scaled by area) to one
linear system together with the zone air node. Exterior films couple node
0 of each wall to the outdoor air (or a fixed temperature), interior films
couple the last node to the zone air. Glazing is a massless U-value path
straight to the air node.

Two step schemes share one form, T(t + dt) = Phi T(t) + Gamma b, with b
the node sources held constant over the step:

* ``exact`` (default) integrates the linear system exactly for inputs held
  constant over the step (massless nodes are eliminated first), so an
  hourly step carries no truncation error from the weather forcing.
* ``backward_euler`` is the first-order implicit scheme.

Both are unconditionally stable.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm

from .conduction import TWO_NODE, Construction, RcNetwork, build_network
from .enclosure import EnclosureSurface, area_weights, distribute_interior_solar, view_factor_matrix
from .solar import (
    Glazing,
    ShadingDevice,
    SunPosition,
    SurfaceGeometry,
    WindowGeometry,
    incidence_cosine,
    plane_irradiance,
    shaded_fraction,
    sun_position,
)
from .weather import WeatherRecord, WeatherSeries

AIR_VOLUMETRIC_HEAT = 1.2 * 1005.0  # J/m3K
J_PER_MWH = 3.6e9
WARMUP_TOLERANCE = 1e-4
WARMUP_MAX_DAYS = 30

BOUNDARIES = ("outdoor", "adiabatic", "fixed")
EXACT, BACKWARD_EULER = "exact", "backward_euler"
SCHEMES = (EXACT, BACKWARD_EULER)
_COND_LIMIT = 1e13


class SingularSystem(ValueError):
    pass


@dataclass(frozen=True)
class Thermostat:
    """Ideal-loads thermostat.

    ``cooling_hours`` (24 flags, hour of day) restricts when cooling may run;
    ``venting_schedule`` (24 values) adds air changes per hour on top of
    infiltration.
    """

    heat_setpoint: float = 20.0
    cool_setpoint: float = 27.0
    heating_enabled: bool = True
    cooling_enabled: bool = True
    cooling_hours: tuple[bool, ...] | None = None
    venting_schedule: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.heating_enabled and self.cooling_enabled and not self.heat_setpoint < self.cool_setpoint:
            raise ValueError("heat setpoint must be below cool setpoint")
        if self.cooling_hours is not None:
            object.__setattr__(self, "cooling_hours", tuple(bool(x) for x in self.cooling_hours))
            if len(self.cooling_hours) != 24:
                raise ValueError("cooling_hours needs 24 entries")
        if self.venting_schedule is not None:
            object.__setattr__(self, "venting_schedule", tuple(float(x) for x in self.venting_schedule))
            if len(self.venting_schedule) != 24 or min(self.venting_schedule) < 0:
                raise ValueError("venting_schedule needs 24 non-negative entries")

    def cooling_available(self, hour_of_day: int) -> bool:
        if not self.cooling_enabled:
            return False
        return self.cooling_hours is None or self.cooling_hours[hour_of_day]

    def venting(self, hour_of_day: int) -> float:
        return 0.0 if self.venting_schedule is None else self.venting_schedule[hour_of_day]


@dataclass(frozen=True)
class OpaqueSurface:
    name: str
    geometry: SurfaceGeometry
    construction: Construction
    h_in: float = 8.29
    h_out: float = 29.3
    boundary: str = "outdoor"
    boundary_temperature: float = 10.0

    def __post_init__(self):
        if not (self.h_in > 0 and self.h_out > 0):
            raise ValueError(f"{self.name}: film coefficients must be positive")
        if self.boundary not in BOUNDARIES:
            raise ValueError(f"{self.name}: boundary must be one of {BOUNDARIES}")


@dataclass(frozen=True)
class Window:
    name: str
    glazing: Glazing
    geometry: WindowGeometry
    devices: tuple[ShadingDevice, ...] = ()
    interior_absorptance: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "devices", tuple(self.devices))
        if self.interior_absorptance + self.glazing.diffuse_transmittance > 1.0:
            raise ValueError(f"{self.name}: interior absorptance + transmittance exceeds 1")


@dataclass(frozen=True)
class ZoneModel:
    volume: float
    surfaces: tuple[OpaqueSurface, ...]
    windows: tuple[Window, ...] = ()
    thermostat: Thermostat = field(default_factory=Thermostat)
    infiltration_ach: float | tuple[float, ...] = 0.0
    internal_gains: float = 0.0
    convective_fraction: float = 1.0
    air_capacitance: float | None = None
    floor: str | None = None
    floor_beam_fraction: float = 0.0
    initial_temperature: float = 20.0

    def __post_init__(self):
        object.__setattr__(self, "surfaces", tuple(self.surfaces))
        object.__setattr__(self, "windows", tuple(self.windows))
        if not self.volume > 0:
            raise ValueError("zone volume must be positive")
        if not self.surfaces:
            raise ValueError("zone needs at least one opaque surface")
        names = [s.name for s in self.surfaces] + [w.name for w in self.windows]
        if len(set(names)) != len(names):
            raise ValueError("surface and window names must be unique")
        ach = self.infiltration_ach
        if isinstance(ach, (int, float)):
            if ach < 0:
                raise ValueError("infiltration must be non-negative")
        else:
            object.__setattr__(self, "infiltration_ach", tuple(float(x) for x in ach))
            if len(self.infiltration_ach) != 24 or min(self.infiltration_ach) < 0:
                raise ValueError("hourly infiltration needs 24 non-negative entries")
        if not 0.0 <= self.convective_fraction <= 1.0:
            raise ValueError("convective fraction must lie in [0, 1]")
        if self.floor is not None and self.floor not in {s.name for s in self.surfaces}:
            raise ValueError(f"floor surface {self.floor!r} not found")
        if not 0.0 <= self.floor_beam_fraction <= 1.0:
            raise ValueError("floor_beam_fraction must lie in [0, 1]")

    @property
    def air_heat_capacity(self) -> float:
        if self.air_capacitance is not None:
            return self.air_capacitance
        return AIR_VOLUMETRIC_HEAT * self.volume

    def air_changes(self, hour_of_day: int) -> float:
        ach = self.infiltration_ach
        base = ach if isinstance(ach, float) or isinstance(ach, int) else ach[hour_of_day]
        return float(base) + self.thermostat.venting(hour_of_day)


@dataclass(frozen=True)
class SolarGains:
    exterior_absorbed: np.ndarray
    transmitted_beam: float
    transmitted_diffuse: float

    @property
    def transmitted(self) -> float:
        return self.transmitted_beam + self.transmitted_diffuse


@dataclass
class SimulationResult:
    air_temperature: np.ndarray
    heating: np.ndarray
    cooling: np.ndarray
    model: str = TWO_NODE
    case_id: str | None = None

    @property
    def annual_heating(self) -> float:
        """MWh."""
        return math.fsum(self.heating) * 3600.0 / J_PER_MWH

    @property
    def annual_cooling(self) -> float:
        return math.fsum(self.cooling) * 3600.0 / J_PER_MWH

    @property
    def peak_heating(self) -> float:
        return float(np.max(self.heating, initial=0.0))

    @property
    def peak_cooling(self) -> float:
        return float(np.max(self.cooling, initial=0.0))


def solar_gains(zone: ZoneModel, record: WeatherRecord, sun: SunPosition,
                ground_reflectance: float = 0.2) -> SolarGains:
    """Exterior absorbed solar per opaque surface and solar transmitted by glazing, W."""
    absorbed = np.zeros(len(zone.surfaces))
    if sun.altitude <= 0 and record.diffuse_horizontal == 0 and record.direct_normal == 0:
        return SolarGains(absorbed, 0.0, 0.0)
    for i, s in enumerate(zone.surfaces):
        alpha = s.construction.exterior_solar_absorptance
        if s.boundary != "outdoor" or alpha == 0:
            continue
        plane = plane_irradiance(record, sun, s.geometry, ground_reflectance)
        absorbed[i] = alpha * plane.total * s.geometry.area
    beam = diffuse = 0.0
    for w in zone.windows:
        surf = w.geometry.surface
        plane = plane_irradiance(record, sun, surf, ground_reflectance)
        cos = incidence_cosine(sun, surf)
        unshaded = 1.0 - shaded_fraction(w.geometry, w.devices, sun) if plane.beam > 0 else 1.0
        unblocked = max(1.0 - sum(d.diffuse_blocking for d in w.devices), 0.0)
        g = w.glazing
        beam += g.area * g.transmittance(cos) * plane.beam * unshaded
        diffuse += g.area * g.diffuse_transmittance * plane.diffuse * unblocked
    return SolarGains(absorbed, beam, diffuse)


def _checked_inverse(a: np.ndarray) -> np.ndarray:
    if a.size and not np.linalg.cond(a) < _COND_LIMIT:
        raise SingularSystem("zone heat-balance matrix is singular")
    return np.linalg.inv(a)


def _exact_propagator(m: np.ndarray, cap: np.ndarray, dt: float):
    """Source matrix Gamma of the exact step for C dT/dt = -M T + b, b constant.

    Massless nodes are algebraic; they are eliminated by a Schur complement
    and recovered from the end-of-step dynamic temperatures.
    """
    n = len(cap)
    dyn = np.flatnonzero(cap > 0)
    sta = np.flatnonzero(cap == 0)
    eye = np.eye(n)
    gamma = np.zeros((n, n))
    if len(sta):
        m_ss_inv = _checked_inverse(m[np.ix_(sta, sta)])
        couple = m_ss_inv @ m[np.ix_(sta, dyn)]              # static <- dynamic
        reduce = eye[dyn] - m[np.ix_(dyn, sta)] @ m_ss_inv @ eye[sta]
        schur = m[np.ix_(dyn, dyn)] - m[np.ix_(dyn, sta)] @ couple
    else:
        reduce, schur = eye, m
    k = len(dyn)
    if k:
        aug = np.zeros((2 * k, 2 * k))
        aug[:k, :k] = -schur / cap[dyn][:, None] * dt
        aug[:k, k:] = np.eye(k) * dt
        ex = expm(aug)
        if not np.all(np.isfinite(ex)):
            raise SingularSystem("zone heat-balance propagator is not finite")
        gamma[dyn] = ex[:k, k:] @ (reduce / cap[dyn][:, None])
    if len(sta):
        gamma[sta] = m_ss_inv @ eye[sta] - couple @ gamma[dyn]
    return gamma


class ZoneSystem:
    """Assembled linear system for one zone and one conduction model."""

    def __init__(self, zone: ZoneModel, model: str = TWO_NODE, scheme: str = EXACT):
        if scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {scheme!r}")
        self.zone = zone
        self.model = model
        self.scheme = scheme
        self.networks: list[RcNetwork] = [build_network(s.construction, model) for s in zone.surfaces]
        offsets = np.cumsum([0] + [n.n_nodes for n in self.networks])
        self.ext_nodes = offsets[:-1].copy()
        self.int_nodes = offsets[1:] - 1
        self.air = int(offsets[-1])
        n = self.air + 1
        self.size = n

        k = np.zeros((n, n))
        cap = np.zeros(n)
        g_out = np.zeros(n)
        g_fix = np.zeros(n)
        t_fix = np.zeros(n)
        for s, net, off in zip(zone.surfaces, self.networks, self.ext_nodes):
            a = s.geometry.area
            sl = slice(off, off + net.n_nodes)
            k[sl, sl] += a * net.laplacian()
            cap[sl] += a * np.array(net.node_capacitances)
            ext, inn = off, off + net.n_nodes - 1
            if s.boundary == "outdoor":
                g_out[ext] += s.h_out * a
            elif s.boundary == "fixed":
                g_fix[ext] += s.h_out * a
                t_fix[ext] = s.boundary_temperature
            g = s.h_in * a
            k[inn, inn] += g
            k[self.air, self.air] += g
            k[inn, self.air] -= g
            k[self.air, inn] -= g
        cap[self.air] = zone.air_heat_capacity
        g_out[self.air] += sum(w.glazing.u_value * w.glazing.area for w in zone.windows)
        self.conductance = k
        self.capacitance = cap
        self.g_out = g_out
        self.fixed_source = g_fix * t_fix
        self.base_matrix = k + np.diag(g_out + g_fix)
        self._cache: dict[tuple[float, float], tuple] = {}

        self._setup_interior_split()
        areas = np.array([s.geometry.area for s in zone.surfaces])
        self.radiant_weights = areas / areas.sum()

    def _setup_interior_split(self) -> None:
        zone = self.zone
        encl = [EnclosureSurface(s.geometry.area, s.construction.interior_solar_absorptance)
                for s in zone.surfaces]
        encl += [EnclosureSurface(w.glazing.area, w.interior_absorptance, w.glazing.diffuse_transmittance)
                 for w in zone.windows]
        n_opaque = len(zone.surfaces)
        self.interior_beam = np.zeros(len(encl))
        self.interior_diffuse = np.zeros(len(encl))
        self.lost_beam = self.lost_diffuse = 0.0
        if len(encl) < 2 or not zone.windows:
            return
        f = view_factor_matrix(encl)
        receiving = [True] * n_opaque + [False] * len(zone.windows)
        w_diffuse = area_weights(encl, receiving)
        floor = None if zone.floor is None else [s.name for s in zone.surfaces].index(zone.floor)
        w_beam = area_weights(encl, receiving, floor, zone.floor_beam_fraction)
        beam = distribute_interior_solar(1.0, encl, f, w_beam)
        diffuse = distribute_interior_solar(1.0, encl, f, w_diffuse)
        self.interior_beam, self.lost_beam = beam.absorbed, beam.lost_out
        self.interior_diffuse, self.lost_diffuse = diffuse.absorbed, diffuse.lost_out

    def sources(self, gains: SolarGains) -> np.ndarray:
        """Heat injected at each node (W) for one hour's solar gains and internal gains."""
        zone = self.zone
        q = np.zeros(self.size)
        q[self.ext_nodes] += gains.exterior_absorbed
        inside = gains.transmitted_beam * self.interior_beam + gains.transmitted_diffuse * self.interior_diffuse
        n_opaque = len(zone.surfaces)
        q[self.int_nodes] += inside[:n_opaque]
        q[self.air] += inside[n_opaque:].sum()
        radiant = zone.internal_gains * (1.0 - zone.convective_fraction)
        q[self.int_nodes] += radiant * self.radiant_weights
        q[self.air] += zone.internal_gains * zone.convective_fraction
        return q

    def _factor(self, ach: float, dt: float):
        """Cached (Phi, Gamma, ventilation conductance, unit air response)."""
        key = (ach, dt)
        cached = self._cache.get(key)
        if cached is None:
            g_vent = AIR_VOLUMETRIC_HEAT * self.zone.volume * ach / 3600.0
            m = self.base_matrix.copy()
            m[self.air, self.air] += g_vent
            if self.scheme == EXACT:
                gamma = _exact_propagator(m, self.capacitance, dt)
            else:
                gamma = _checked_inverse(m + np.diag(self.capacitance / dt))
            # Phi + Gamma M = I holds for both schemes; building Phi from it
            # keeps every steady state (uniform isolated zones included) fixed
            # to rounding instead of letting matrix-exponential error drift.
            phi = np.eye(self.size) - gamma @ m
            response = gamma[:, self.air].copy()
            cached = (phi, gamma, g_vent, response)
            self._cache[key] = cached
        return cached

    def initial_state(self) -> np.ndarray:
        return np.full(self.size, float(self.zone.initial_temperature))

    def step(self, state: np.ndarray, t_out: float, sources: np.ndarray, hour_of_day: int,
             dt: float = 3600.0) -> tuple[np.ndarray, float, float]:
        """Advance one step; return (new state, heating W, cooling W)."""
        if dt <= 0:
            raise ValueError("dt must be positive")
        zone = self.zone
        tstat = zone.thermostat
        phi, gamma, g_vent, response = self._factor(zone.air_changes(hour_of_day), dt)
        b = self.g_out * t_out + self.fixed_source + sources
        b[self.air] += g_vent * t_out
        free = phi @ state + gamma @ b
        t_air = free[self.air]
        if tstat.heating_enabled and t_air < tstat.heat_setpoint:
            power = (tstat.heat_setpoint - t_air) / response[self.air]
            new = free + power * response
            new[self.air] = tstat.heat_setpoint
            return new, power, 0.0
        if tstat.cooling_available(hour_of_day) and t_air > tstat.cool_setpoint:
            power = (t_air - tstat.cool_setpoint) / response[self.air]
            new = free - power * response
            new[self.air] = tstat.cool_setpoint
            return new, 0.0, power
        return free, 0.0, 0.0


def step(zone: ZoneModel, state: np.ndarray, record: WeatherRecord, gains: SolarGains,
         dt: float = 3600.0, model: str = TWO_NODE, scheme: str = EXACT) -> tuple[np.ndarray, float, float]:
    """One step of ``zone`` from ``state`` under ``record``.

    Convenience wrapper assembling a fresh :class:`ZoneSystem`; loops should
    build the system once and call :meth:`ZoneSystem.step`.
    """
    system = ZoneSystem(zone, model, scheme)
    if len(state) != system.size:
        raise ValueError(f"state has {len(state)} entries, system has {system.size}")
    return system.step(np.asarray(state, float), record.dry_bulb, system.sources(gains),
                       record.hour_index % 24, dt)


def annual_solar_gains(zone: ZoneModel, weather: WeatherSeries,
                       suns: Sequence[SunPosition] | None = None) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Vectorized :func:`solar_gains` over a whole series.

    Returns (exterior absorbed, hours x surfaces), transmitted beam and
    transmitted diffuse (both per hour), all in W.
    """
    site = weather.site
    if suns is None:
        suns = [sun_position(site, r.hour_index) for r in weather.records]
    alt = np.radians([s.altitude for s in suns])
    az = np.radians([s.azimuth for s in suns])
    up = alt > 0
    sun_vec = np.stack([np.cos(alt) * np.sin(az), np.cos(alt) * np.cos(az), np.sin(alt)], axis=1)
    dni = weather.arrays["dni_Wm2"]
    dhi = weather.arrays["dhi_Wm2"]
    ghi = dni * np.maximum(np.sin(alt), 0.0) + dhi
    rho = site.ground_reflectance

    def plane(surface: SurfaceGeometry):
        cos_i = np.where(up, np.clip(sun_vec @ np.array(surface.normal), 0.0, 1.0), 0.0)
        cos_t = math.cos(math.radians(surface.tilt))
        sky = np.maximum(dhi * (1.0 + cos_t) / 2.0, 0.0)
        ground = np.maximum(ghi * rho * (1.0 - cos_t) / 2.0, 0.0)
        return cos_i, dni * cos_i, sky + ground

    exterior = np.zeros((len(suns), len(zone.surfaces)))
    for j, s in enumerate(zone.surfaces):
        alpha = s.construction.exterior_solar_absorptance
        if s.boundary != "outdoor" or alpha == 0:
            continue
        _, beam, diffuse = plane(s.geometry)
        exterior[:, j] = alpha * (beam + diffuse) * s.geometry.area

    beam_in = np.zeros(len(suns))
    diffuse_in = np.zeros(len(suns))
    for w in zone.windows:
        g = w.glazing
        cos_i, beam, diffuse = plane(w.geometry.surface)
        coeffs = np.array(g.angular_coefficients[::-1])
        ratio = np.polyval(coeffs, cos_i) / np.polyval(coeffs, 1.0)
        tau = np.clip(g.normal_transmittance * ratio, 0.0, 1.0)
        unshaded = np.ones(len(suns))
        if w.devices:
            for i in np.flatnonzero(beam > 0):
                unshaded[i] = 1.0 - shaded_fraction(w.geometry, w.devices, suns[i])
        unblocked = max(1.0 - sum(d.diffuse_blocking for d in w.devices), 0.0)
        beam_in += g.area * tau * beam * unshaded
        diffuse_in += g.area * g.diffuse_transmittance * diffuse * unblocked
    return exterior, beam_in, diffuse_in


def hourly_sources(system: ZoneSystem, weather: WeatherSeries,
                   suns: Sequence[SunPosition] | None = None) -> np.ndarray:
    """Node source vectors for every hour of ``weather`` (hours x nodes)."""
    zone = system.zone
    exterior, beam, diffuse = annual_solar_gains(zone, weather, suns)
    n_opaque = len(zone.surfaces)
    out = np.zeros((len(weather), system.size))
    out[:, system.ext_nodes] += exterior
    inside = np.outer(beam, system.interior_beam) + np.outer(diffuse, system.interior_diffuse)
    out[:, system.int_nodes] += inside[:, :n_opaque]
    out[:, system.air] += inside[:, n_opaque:].sum(axis=1)
    radiant = zone.internal_gains * (1.0 - zone.convective_fraction)
    out[:, system.int_nodes] += radiant * system.radiant_weights
    out[:, system.air] += zone.internal_gains * zone.convective_fraction
    return out


def simulate_annual(zone: ZoneModel, weather: WeatherSeries, model_choice: str = TWO_NODE,
                    substeps: int = 1, case_id: str | None = None,
                    suns: Sequence[SunPosition] | None = None, scheme: str = EXACT) -> SimulationResult:
    """Run a warm-up on the first day, then the whole weather series.

    Reported loads are hourly means over sub-steps; the reported air
    temperature is the end-of-hour value.
    """
    if not weather.is_annual:
        raise ValueError(f"annual simulation needs 8760 hourly records, got {len(weather)}")
    if substeps < 1:
        raise ValueError("substeps must be a positive integer")
    system = ZoneSystem(zone, model_choice, scheme)
    sources = hourly_sources(system, weather, suns)
    t_out = weather.arrays["dry_bulb_C"]
    hours = weather.arrays["hour"] % 24
    dt = 3600.0 / substeps

    def run_hour(state, i):
        heat = cool = 0.0
        for _ in range(substeps):
            state, h, c = system.step(state, t_out[i], sources[i], hours[i], dt)
            heat += h
            cool += c
        return state, heat / substeps, cool / substeps

    state = system.initial_state()
    for _ in range(WARMUP_MAX_DAYS):
        start = state
        for i in range(24):
            state, _, _ = run_hour(state, i)
        if np.max(np.abs(state - start)) < WARMUP_TOLERANCE:
            break

    n = len(weather)
    air = np.empty(n)
    heating = np.empty(n)
    cooling = np.empty(n)
    for i in range(n):
        state, heating[i], cooling[i] = run_hour(state, i)
        air[i] = state[system.air]
    return SimulationResult(air, heating, cooling, model=model_choice, case_id=case_id)
