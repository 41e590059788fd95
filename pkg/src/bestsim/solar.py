"""Sun position, irradiance on tilted planes, exterior shading, glazing.

Conventions: azimuths in degrees clockwise from north, tilt 0 is a
horizontal surface facing up and 90 a vertical wall. Hours are solar time
unless the equation-of-time correction is requested.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Sequence

from shapely.geometry import Polygon, box
from shapely.ops import unary_union

if TYPE_CHECKING:
    from .weather import Site, WeatherRecord

DEFAULT_ANGULAR_COEFFICIENTS = (0.0, 3.0, -3.0, 1.0)  # 1 - (1 - cos)^3


@dataclass(frozen=True)
class SunPosition:
    altitude: float
    azimuth: float

    @property
    def vector(self) -> tuple[float, float, float]:
        """Unit vector towards the sun as (east, north, up)."""
        alt = math.radians(self.altitude)
        az = math.radians(self.azimuth)
        return (math.cos(alt) * math.sin(az), math.cos(alt) * math.cos(az), math.sin(alt))


@dataclass(frozen=True)
class SurfaceGeometry:
    area: float
    azimuth: float = 180.0
    tilt: float = 90.0

    def __post_init__(self):
        if not self.area > 0:
            raise ValueError(f"surface area must be positive, got {self.area}")
        if not 0.0 <= self.tilt <= 180.0:
            raise ValueError(f"tilt must lie in [0, 180], got {self.tilt}")
        object.__setattr__(self, "azimuth", self.azimuth % 360.0)

    @property
    def normal(self) -> tuple[float, float, float]:
        tilt = math.radians(self.tilt)
        az = math.radians(self.azimuth)
        return (math.sin(tilt) * math.sin(az), math.sin(tilt) * math.cos(az), math.cos(tilt))


@dataclass(frozen=True)
class ShadingDevice:
    """Opaque plate projecting perpendicular from the window's wall.

    An overhang sits ``gap`` above the window head and overruns both jambs by
    ``extension``; a wingwall sits ``gap`` beside the window on ``side`` and
    overruns head and sill by ``extension``. ``math.inf`` extension means
    unbounded. ``diffuse_blocking`` is the fraction of diffuse irradiance the
    device removes (0 by default: beam-only shading).
    """

    kind: str
    depth: float
    gap: float = 0.0
    extension: float = math.inf
    side: str = "left"
    diffuse_blocking: float = 0.0

    def __post_init__(self):
        if self.kind not in ("overhang", "wingwall"):
            raise ValueError(f"unknown shading device kind {self.kind!r}")
        if self.side not in ("left", "right"):
            raise ValueError(f"wingwall side must be 'left' or 'right', got {self.side!r}")
        if self.depth < 0 or self.gap < 0 or self.extension < 0:
            raise ValueError("shading device dimensions must be non-negative")
        if not 0.0 <= self.diffuse_blocking <= 1.0:
            raise ValueError("diffuse_blocking must lie in [0, 1]")


@dataclass(frozen=True)
class WindowGeometry:
    surface: SurfaceGeometry
    width: float
    height: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError("window width and height must be positive")


@dataclass(frozen=True)
class Glazing:
    area: float
    normal_transmittance: float
    angular_coefficients: tuple[float, ...] = DEFAULT_ANGULAR_COEFFICIENTS
    diffuse_transmittance: float | None = None
    u_value: float = 3.0

    def __post_init__(self):
        if not self.area > 0:
            raise ValueError("glazing area must be positive")
        if not 0.0 <= self.normal_transmittance <= 1.0:
            raise ValueError("normal transmittance must lie in [0, 1]")
        if not self.u_value > 0:
            raise ValueError("u_value must be positive")
        coeffs = tuple(float(c) for c in self.angular_coefficients)
        if _polyval(coeffs, 1.0) == 0.0:
            raise ValueError("angular polynomial vanishes at normal incidence")
        object.__setattr__(self, "angular_coefficients", coeffs)
        if self.diffuse_transmittance is None:
            object.__setattr__(self, "diffuse_transmittance", self.transmittance(0.5))
        elif not 0.0 <= self.diffuse_transmittance <= 1.0:
            raise ValueError("diffuse transmittance must lie in [0, 1]")

    def transmittance(self, cos_incidence: float) -> float:
        """Beam transmittance at incidence cosine, clamped to [0, 1]."""
        c = min(max(cos_incidence, 0.0), 1.0)
        ratio = _polyval(self.angular_coefficients, c) / _polyval(self.angular_coefficients, 1.0)
        return min(max(self.normal_transmittance * ratio, 0.0), 1.0)


@dataclass(frozen=True)
class PlaneIrradiance:
    beam: float
    sky_diffuse: float
    ground_reflected: float

    @property
    def diffuse(self) -> float:
        return self.sky_diffuse + self.ground_reflected

    @property
    def total(self) -> float:
        return self.beam + self.sky_diffuse + self.ground_reflected


def _polyval(coeffs: Sequence[float], x: float) -> float:
    acc = 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def declination(day_of_year: int) -> float:
    """Cooper's declination, degrees (exactly 0 on day 81)."""
    return 23.45 * math.sin(2 * math.pi * (284 + day_of_year) / 365.0)


def equation_of_time(day_of_year: int) -> float:
    """Spencer's equation of time, minutes."""
    b = 2 * math.pi * (day_of_year - 1) / 365.0
    return 229.18 * (0.000075 + 0.001868 * math.cos(b) - 0.032077 * math.sin(b)
                     - 0.014615 * math.cos(2 * b) - 0.04089 * math.sin(2 * b))


def solar_position_at(latitude: float, day_of_year: int, solar_hour: float) -> SunPosition:
    """Sun altitude/azimuth at a solar-time hour of a given day."""
    phi = math.radians(latitude)
    delta = math.radians(declination(day_of_year))
    omega = math.radians(15.0 * (solar_hour - 12.0))
    east = -math.cos(delta) * math.sin(omega)
    north = math.cos(phi) * math.sin(delta) - math.sin(phi) * math.cos(delta) * math.cos(omega)
    up = math.sin(phi) * math.sin(delta) + math.cos(phi) * math.cos(delta) * math.cos(omega)
    altitude = math.degrees(math.asin(max(-1.0, min(1.0, up))))
    if abs(east) < 1e-15 and abs(north) < 1e-15:
        azimuth = 180.0
    else:
        azimuth = math.degrees(math.atan2(east, north)) % 360.0
    return SunPosition(altitude, azimuth)


def sun_position(site: Site, hour_index: int, equation_of_time_correction: bool = False) -> SunPosition:
    """Sun position at the midpoint of ``hour_index`` (hour 0 = Jan 1, 00:00-01:00)."""
    day = (hour_index // 24) % 365 + 1
    hour = hour_index % 24 + 0.5
    if equation_of_time_correction:
        hour += (4.0 * (site.longitude - site.timezone_meridian) + equation_of_time(day)) / 60.0
    return solar_position_at(site.latitude, day, hour)


def incidence_cosine(sun: SunPosition, surface: SurfaceGeometry) -> float:
    if sun.altitude <= 0:
        return 0.0
    s = sun.vector
    n = surface.normal
    cos = s[0] * n[0] + s[1] * n[1] + s[2] * n[2]
    return min(max(cos, 0.0), 1.0)


def plane_irradiance(
    record: WeatherRecord,
    sun: SunPosition,
    surface: SurfaceGeometry,
    ground_reflectance: float,
) -> PlaneIrradiance:
    """Isotropic-sky irradiance components on a tilted plane, W/m2."""
    dni = record.direct_normal
    dhi = record.diffuse_horizontal
    cos_tilt = math.cos(math.radians(surface.tilt))
    ghi = dni * max(math.sin(math.radians(sun.altitude)), 0.0) + dhi
    return PlaneIrradiance(
        beam=dni * incidence_cosine(sun, surface),
        sky_diffuse=max(dhi * (1.0 + cos_tilt) / 2.0, 0.0),
        ground_reflected=max(ghi * ground_reflectance * (1.0 - cos_tilt) / 2.0, 0.0),
    )


def _shadow_polygon(device: ShadingDevice, window: WindowGeometry,
                    du: float, dv: float, reach: float) -> Polygon | None:
    """Shadow of one device on the wall plane.

    Window-plane frame: u to the right as seen from outside, v up, window
    occupying [0, width] x [0, height]. (du, dv) is the shadow displacement
    per metre of distance from the wall.
    """
    w, h = window.width, window.height
    ext = min(device.extension, reach)
    if device.kind == "overhang":
        v0 = h + device.gap
        edge = [(-ext, v0), (w + ext, v0)]
    else:
        u0 = -device.gap if device.side == "left" else w + device.gap
        edge = [(u0, -ext), (u0, h + ext)]
    (a_u, a_v), (b_u, b_v) = edge
    d = device.depth
    pts = [(a_u, a_v), (b_u, b_v), (b_u + d * du, b_v + d * dv), (a_u + d * du, a_v + d * dv)]
    poly = Polygon(pts)
    if poly.area <= 0:
        return None
    return poly


def shaded_fraction(window: WindowGeometry, devices: Sequence[ShadingDevice], sun: SunPosition) -> float:
    """Fraction of a vertical window's area in the beam shadow of its devices."""
    return _shaded_fraction(window, tuple(devices), sun)


@lru_cache(maxsize=1 << 16)
def _shaded_fraction(window: WindowGeometry, devices: tuple[ShadingDevice, ...], sun: SunPosition) -> float:
    active = [d for d in devices if d.depth > 0]
    if not active or sun.altitude <= 0:
        return 0.0
    s = sun.vector
    n = window.surface.normal
    s_n = s[0] * n[0] + s[1] * n[1] + s[2] * n[2]
    if s_n <= 1e-12:
        return 0.0
    az = math.radians(window.surface.azimuth)
    # rightward axis of the facade seen from outside, horizontal
    u_axis = (-math.cos(az), math.sin(az), 0.0)
    s_u = s[0] * u_axis[0] + s[1] * u_axis[1]
    s_v = s[2]
    du, dv = -s_u / s_n, -s_v / s_n
    reach = window.width + window.height + max(d.depth for d in active) * (abs(du) + abs(dv)) + 1.0
    shadows = [p for d in active if (p := _shadow_polygon(d, window, du, dv, reach)) is not None]
    if not shadows:
        return 0.0
    pane = box(0.0, 0.0, window.width, window.height)
    covered = unary_union(shadows).intersection(pane).area
    return min(max(covered / pane.area, 0.0), 1.0)


def window_transmission(glazing: Glazing, plane: PlaneIrradiance, beam_unshaded: float,
                        incidence_cos: float, diffuse_unblocked: float = 1.0) -> float:
    """Solar power transmitted through a glazing, W."""
    beam = glazing.transmittance(incidence_cos) * plane.beam * beam_unshaded
    diffuse = glazing.diffuse_transmittance * plane.diffuse * diffuse_unblocked
    return glazing.area * (beam + diffuse)
