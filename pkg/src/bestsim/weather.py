"""Hourly weather series: CSV parsing/serialization and a synthetic generator.

Weather-CSV layout::

    #site,<lat>,<lon>,<tz_meridian>,<ground_refl>
    hour,dry_bulb_C,dni_Wm2,dhi_Wm2
    0,-3.2,0.0,0.0
    ...
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

HOURS_PER_YEAR = 8760
COLUMNS = ("hour", "dry_bulb_C", "dni_Wm2", "dhi_Wm2")


class WeatherError(ValueError):
    pass


class MalformedHeader(WeatherError):
    pass


class BadColumnCount(WeatherError):
    def __init__(self, row: int, found: int):
        super().__init__(f"row {row}: expected {len(COLUMNS)} columns, found {found}")
        self.row = row


class NonNumeric(WeatherError):
    def __init__(self, row: int, col: str, text: str):
        super().__init__(f"row {row}, column {col}: not a number: {text!r}")
        self.row = row
        self.col = col


class NegativeIrradiance(WeatherError):
    def __init__(self, row: int):
        super().__init__(f"row {row}: negative irradiance")
        self.row = row


class NonMonotonicHour(WeatherError):
    def __init__(self, row: int):
        super().__init__(f"row {row}: hour index not strictly increasing")
        self.row = row


class InvalidParameter(WeatherError):
    pass


@dataclass(frozen=True)
class Site:
    latitude: float
    longitude: float = 0.0
    timezone_meridian: float = 0.0
    ground_reflectance: float = 0.2

    def __post_init__(self):
        if not -90.0 <= self.latitude <= 90.0:
            raise InvalidParameter(f"latitude out of range: {self.latitude}")
        if not -180.0 <= self.longitude <= 180.0:
            raise InvalidParameter(f"longitude out of range: {self.longitude}")
        if not -180.0 <= self.timezone_meridian <= 180.0:
            raise InvalidParameter(f"timezone meridian out of range: {self.timezone_meridian}")
        if not 0.0 <= self.ground_reflectance <= 1.0:
            raise InvalidParameter(f"ground reflectance out of range: {self.ground_reflectance}")


@dataclass(frozen=True)
class WeatherRecord:
    hour_index: int
    dry_bulb: float
    direct_normal: float = 0.0
    diffuse_horizontal: float = 0.0

    def __post_init__(self):
        if self.hour_index < 0:
            raise InvalidParameter(f"negative hour index: {self.hour_index}")
        if self.direct_normal < 0 or self.diffuse_horizontal < 0:
            raise InvalidParameter(f"hour {self.hour_index}: negative irradiance")


@dataclass(frozen=True)
class WeatherSeries:
    site: Site
    records: tuple[WeatherRecord, ...] = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "records", tuple(self.records))
        n = len(self.records)
        if n == 0 or n % 24:
            raise InvalidParameter(f"record count must be a positive multiple of 24, got {n}")
        for prev, cur in zip(self.records, self.records[1:]):
            if cur.hour_index <= prev.hour_index:
                raise InvalidParameter(f"hour index not increasing at {cur.hour_index}")

    def __len__(self) -> int:
        return len(self.records)

    @property
    def is_annual(self) -> bool:
        return len(self.records) == HOURS_PER_YEAR

    @cached_property
    def arrays(self) -> dict[str, np.ndarray]:
        """Column arrays keyed like the CSV header (read-only)."""
        cols = {
            "hour": np.array([r.hour_index for r in self.records], dtype=int),
            "dry_bulb_C": np.array([r.dry_bulb for r in self.records]),
            "dni_Wm2": np.array([r.direct_normal for r in self.records]),
            "dhi_Wm2": np.array([r.diffuse_horizontal for r in self.records]),
        }
        for a in cols.values():
            a.flags.writeable = False
        return cols


def _number(text: str, row: int, col: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise NonNumeric(row, col, text) from None
    if not math.isfinite(value):
        raise NonNumeric(row, col, text)
    return value


def parse_weather(text: str) -> WeatherSeries:
    """Parse a weather-CSV document.

    Row numbers in errors are 1-based line numbers of the document.
    """
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if len(lines) < 2:
        raise MalformedHeader("document needs a site line and a column header")

    site_fields = lines[0].strip().split(",")
    if len(site_fields) != 5 or site_fields[0] != "#site":
        raise MalformedHeader(f"bad site line: {lines[0]!r}")
    try:
        lat, lon, tz, rho = (float(v) for v in site_fields[1:])
        site = Site(lat, lon, tz, rho)
    except ValueError as exc:
        raise MalformedHeader(f"bad site line: {lines[0]!r} ({exc})") from None

    if tuple(c.strip() for c in lines[1].split(",")) != COLUMNS:
        raise MalformedHeader(f"bad column header: {lines[1]!r}")

    records = []
    last_hour = -1
    for lineno, line in enumerate(lines[2:], start=3):
        cells = line.strip().split(",")
        if len(cells) != len(COLUMNS):
            raise BadColumnCount(lineno, len(cells))
        hour_f = _number(cells[0], lineno, COLUMNS[0])
        if hour_f != int(hour_f):
            raise NonNumeric(lineno, COLUMNS[0], cells[0])
        hour = int(hour_f)
        dry_bulb = _number(cells[1], lineno, COLUMNS[1])
        dni = _number(cells[2], lineno, COLUMNS[2])
        dhi = _number(cells[3], lineno, COLUMNS[3])
        if dni < 0 or dhi < 0:
            raise NegativeIrradiance(lineno)
        if hour <= last_hour:
            raise NonMonotonicHour(lineno)
        last_hour = hour
        records.append(WeatherRecord(hour, dry_bulb, dni, dhi))

    return WeatherSeries(site, tuple(records))


def _fmt(x: float) -> str:
    return repr(float(x))


def serialize_weather(series: WeatherSeries) -> str:
    """Render the canonical weather-CSV form (shortest round-trip floats)."""
    s = series.site
    out = [
        ",".join(["#site", _fmt(s.latitude), _fmt(s.longitude),
                  _fmt(s.timezone_meridian), _fmt(s.ground_reflectance)]),
        ",".join(COLUMNS),
    ]
    for r in series.records:
        out.append(f"{r.hour_index},{_fmt(r.dry_bulb)},{_fmt(r.direct_normal)},"
                   f"{_fmt(r.diffuse_horizontal)}")
    return "\n".join(out) + "\n"


def read_weather(path) -> WeatherSeries:
    with open(path, encoding="utf-8", newline="") as fh:
        return parse_weather(fh.read())


def write_weather(series: WeatherSeries, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_weather(series))


def clear_sky_horizontal(sin_altitude: np.ndarray) -> np.ndarray:
    """Haurwitz clear-sky global horizontal irradiance, W/m2."""
    s = np.asarray(sin_altitude, dtype=float)
    out = np.zeros_like(s)
    up = s > 0
    out[up] = 1098.0 * s[up] * np.exp(-0.057 / s[up])
    return out


def synth_weather(
    site: Site,
    mean_temp: float,
    daily_amp: float,
    seasonal_amp: float,
    clearness: float,
    seed: int = 0,
    perturbation: float = 0.0,
) -> WeatherSeries:
    """Deterministic synthetic year of hourly weather.

    Dry bulb is ``mean + seasonal + daily`` sinusoids, coldest in mid-January
    and at 03:00 solar time, plus optional Gaussian noise of standard
    deviation ``perturbation`` K drawn from ``seed``. Irradiance is a
    Haurwitz clear-sky envelope scaled by ``clearness``: 80 % of it arrives as
    beam (converted to direct normal), 20 % as diffuse horizontal.
    """
    from .solar import sun_position

    if daily_amp < 0 or seasonal_amp < 0:
        raise InvalidParameter("amplitudes must be non-negative")
    if not 0.0 <= clearness <= 1.0:
        raise InvalidParameter(f"clearness must lie in [0, 1], got {clearness}")
    if perturbation < 0:
        raise InvalidParameter("perturbation must be non-negative")

    hours = np.arange(HOURS_PER_YEAR)
    t_mid = hours + 0.5
    seasonal = -seasonal_amp * np.cos(2 * np.pi * (t_mid - 15 * 24) / HOURS_PER_YEAR)
    daily = -daily_amp * np.cos(2 * np.pi * (t_mid - 3.0) / 24.0)
    dry_bulb = mean_temp + seasonal + daily
    if perturbation > 0:
        rng = np.random.default_rng(seed)
        dry_bulb = dry_bulb + rng.normal(0.0, perturbation, HOURS_PER_YEAR)

    sin_alt = np.array([math.sin(math.radians(sun_position(site, int(h)).altitude))
                        for h in hours])
    envelope = clearness * clear_sky_horizontal(sin_alt)
    up = sin_alt > 0
    dni = np.zeros(HOURS_PER_YEAR)
    dni[up] = 0.8 * envelope[up] / sin_alt[up]
    dhi = np.where(up, 0.2 * envelope, 0.0)

    records = tuple(
        WeatherRecord(int(h), float(t), float(b), float(d))
        for h, t, b, d in zip(hours, dry_bulb, dni, dhi)
    )
    return WeatherSeries(site, records)
