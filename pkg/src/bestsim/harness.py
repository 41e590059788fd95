"""Comparative test suite: case catalog, reference envelopes, reports."""
from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from importlib import resources
from typing import Any, Iterable, Sequence

import jsonschema

from . import __version__
from .conduction import MODELS, Construction, Layer
from .simulate import EXACT, OpaqueSurface, SimulationResult, Thermostat, Window, ZoneModel, simulate_annual
from .solar import Glazing, ShadingDevice, SurfaceGeometry, WindowGeometry, sun_position
from .weather import WeatherSeries

QUANTITIES = ("heating", "cooling")
PASS, BELOW_MIN, ABOVE_MAX = "pass", "below_min", "above_max"
CSV_COLUMNS = (
    "case_id", "model", "status", "annual_heating_MWh", "annual_cooling_MWh",
    "heating_verdict", "heating_margin_MWh", "cooling_verdict", "cooling_margin_MWh",
)


class CatalogError(ValueError):
    pass


class ParseError(CatalogError):
    def __init__(self, location: str, message: str):
        super().__init__(f"{location}: {message}")
        self.location = location


class UnknownCaseRef(CatalogError):
    def __init__(self, case_id: str):
        super().__init__(f"reference to unknown case id {case_id!r}")
        self.case_id = case_id


class InvalidRange(CatalogError):
    def __init__(self, case_id: str, message: str):
        super().__init__(f"range for case {case_id!r}: {message}")
        self.case_id = case_id


@dataclass(frozen=True)
class CaseDefinition:
    id: str
    zone: ZoneModel
    description: str = ""
    default_model: str = "two_node"
    diagnostic_tags: tuple[str, ...] = ()
    provenance: str = ""


@dataclass(frozen=True)
class ReferenceRange:
    case_id: str
    heating_min: float | None = None
    heating_max: float | None = None
    cooling_min: float | None = None
    cooling_max: float | None = None
    per_program: tuple[tuple[str, float | None, float | None], ...] = ()
    provenance: str = ""

    def __post_init__(self):
        for q in QUANTITIES:
            lo, hi = getattr(self, f"{q}_min"), getattr(self, f"{q}_max")
            if (lo is None) != (hi is None):
                raise InvalidRange(self.case_id, f"{q} needs both bounds or neither")
            if lo is None:
                continue
            if not (math.isfinite(lo) and math.isfinite(hi)):
                raise InvalidRange(self.case_id, f"{q} bounds must be finite")
            if lo > hi:
                raise InvalidRange(self.case_id, f"{q}_min {lo} exceeds {q}_max {hi}")

    def bounds(self, quantity: str) -> tuple[float, float] | None:
        lo = getattr(self, f"{quantity}_min")
        return None if lo is None else (lo, getattr(self, f"{quantity}_max"))


@dataclass(frozen=True)
class DiagnosticPair:
    case_minuend: str
    case_subtrahend: str
    quantity: str
    expected_delta_range: tuple[float, float] | None = None

    @property
    def label(self) -> str:
        return f"{self.case_minuend}-{self.case_subtrahend}:{self.quantity}"


@dataclass(frozen=True)
class Catalog:
    cases: tuple[CaseDefinition, ...]
    ranges: tuple[ReferenceRange, ...] = ()
    pairs: tuple[DiagnosticPair, ...] = ()
    provenance: str = ""

    def case(self, case_id: str) -> CaseDefinition:
        for c in self.cases:
            if c.id == case_id:
                return c
        raise UnknownCaseRef(case_id)

    def range_for(self, case_id: str) -> ReferenceRange | None:
        return next((r for r in self.ranges if r.case_id == case_id), None)

    def subset(self, case_ids: Iterable[str]) -> Catalog:
        wanted = set(case_ids)
        for cid in wanted:
            self.case(cid)
        return Catalog(
            cases=tuple(c for c in self.cases if c.id in wanted),
            ranges=tuple(r for r in self.ranges if r.case_id in wanted),
            pairs=tuple(p for p in self.pairs
                        if p.case_minuend in wanted and p.case_subtrahend in wanted),
            provenance=self.provenance,
        )


@dataclass(frozen=True)
class Verdict:
    status: str
    margin: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == PASS


def check_range(value: float, lo: float, hi: float) -> Verdict:
    """Compare a value with a closed [lo, hi] envelope; margin is the distance to the violated bound."""
    if lo > hi:
        raise InvalidRange("?", f"min {lo} exceeds max {hi}")
    if value < lo:
        return Verdict(BELOW_MIN, lo - value)
    if value > hi:
        return Verdict(ABOVE_MAX, value - hi)
    return Verdict(PASS, 0.0)


def delta_diagnostic(result_a, result_b, quantity: str) -> float:
    """Signed difference a - b of the annual heating or cooling (MWh)."""
    if quantity not in QUANTITIES:
        raise ValueError(f"quantity must be one of {QUANTITIES}")
    return getattr(result_a, f"annual_{quantity}") - getattr(result_b, f"annual_{quantity}")


# --------------------------------------------------------------------------- catalog

_SCHEMA = None


def catalog_schema() -> dict:
    global _SCHEMA
    if _SCHEMA is None:
        _SCHEMA = json.loads(resources.files("bestsim.data").joinpath("catalog.schema.json")
                             .read_text(encoding="utf-8"))
    return _SCHEMA


def bundled_catalog_text() -> str:
    return resources.files("bestsim.data").joinpath("catalog.json").read_text(encoding="utf-8")


def _construction(spec: dict) -> Construction:
    layers = tuple(Layer(l["thickness"], l["conductivity"], l.get("density", 0.0),
                         l.get("specific_heat", 0.0)) for l in spec["layers"])
    return Construction(layers, spec.get("exterior_solar_absorptance", 0.6),
                        spec.get("interior_solar_absorptance", 0.6))


def _zone(block: dict, library: dict[str, dict], where: str) -> ZoneModel:
    surfaces = []
    for i, s in enumerate(block["surfaces"]):
        cons = s["construction"]
        if isinstance(cons, str):
            if cons not in library:
                raise ParseError(f"{where}.surfaces[{i}].construction", f"unknown construction {cons!r}")
            cons = library[cons]
        if "interior_solar_absorptance" in s:
            cons = dict(cons, interior_solar_absorptance=s["interior_solar_absorptance"])
        surfaces.append(OpaqueSurface(
            name=s["name"],
            geometry=SurfaceGeometry(s["area"], s.get("azimuth", 180.0), s.get("tilt", 90.0)),
            construction=_construction(cons),
            h_in=s.get("h_in", 8.29),
            h_out=s.get("h_out", 29.3),
            boundary=s.get("boundary", "outdoor"),
            boundary_temperature=s.get("boundary_temperature", 10.0),
        ))
    windows = []
    for w in block.get("windows", []):
        g = w["glazing"]
        area = w["width"] * w["height"]
        glazing = Glazing(
            area=area,
            normal_transmittance=g["normal_transmittance"],
            angular_coefficients=tuple(g.get("angular_coefficients", Glazing.angular_coefficients)),
            diffuse_transmittance=g.get("diffuse_transmittance"),
            u_value=g["u_value"],
        )
        devices = tuple(ShadingDevice(
            kind=d["kind"], depth=d["depth"], gap=d.get("gap", 0.0),
            extension=math.inf if d.get("extension") is None else d["extension"],
            side=d.get("side", "left"), diffuse_blocking=d.get("diffuse_blocking", 0.0),
        ) for d in w.get("devices", []))
        geometry = WindowGeometry(SurfaceGeometry(area, w.get("azimuth", 180.0), w.get("tilt", 90.0)),
                                  w["width"], w["height"])
        windows.append(Window(w["name"], glazing, geometry, devices, w.get("interior_absorptance", 0.0)))
    t = block.get("thermostat", {})
    thermostat = Thermostat(
        heat_setpoint=t.get("heat_setpoint", 20.0),
        cool_setpoint=t.get("cool_setpoint", 27.0),
        heating_enabled=t.get("heating_enabled", True),
        cooling_enabled=t.get("cooling_enabled", True),
        cooling_hours=t.get("cooling_hours"),
        venting_schedule=t.get("venting_schedule"),
    )
    ach = block.get("infiltration_ach", 0.0)
    return ZoneModel(
        volume=block["volume"],
        surfaces=tuple(surfaces),
        windows=tuple(windows),
        thermostat=thermostat,
        infiltration_ach=float(ach) if isinstance(ach, (int, float)) else tuple(ach),
        internal_gains=block.get("internal_gains", 0.0),
        convective_fraction=block.get("convective_fraction", 1.0),
        air_capacitance=block.get("air_capacitance"),
        floor=block.get("floor"),
        floor_beam_fraction=block.get("floor_beam_fraction", 0.0),
        initial_temperature=block.get("initial_temperature", 20.0),
    )


def load_catalog(text: str) -> Catalog:
    """Parse and validate a catalog document (JSON)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno}", exc.msg) from None
    try:
        jsonschema.validate(doc, catalog_schema())
    except jsonschema.ValidationError as exc:
        path = "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in exc.absolute_path)
        raise ParseError(path.lstrip(".") or "<document>", exc.message) from None

    library = doc.get("constructions", {})
    cases = []
    seen: set[str] = set()
    for i, c in enumerate(doc["cases"]):
        where = f"cases[{i}]"
        if c["id"] in seen:
            raise ParseError(f"{where}.id", f"duplicate case id {c['id']!r}")
        seen.add(c["id"])
        try:
            zone = _zone(c["zone"], library, f"{where}.zone")
        except CatalogError:
            raise
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"{where}.zone", str(exc)) from None
        cases.append(CaseDefinition(
            id=c["id"], zone=zone, description=c.get("description", ""),
            default_model=c.get("default_model", "two_node"),
            diagnostic_tags=tuple(c.get("diagnostic_tags", ())),
            provenance=c.get("provenance", doc.get("provenance", "")),
        ))

    ranges = []
    for r in doc["ranges"]:
        if r["case_id"] not in seen:
            raise UnknownCaseRef(r["case_id"])
        if any(x.case_id == r["case_id"] for x in ranges):
            raise InvalidRange(r["case_id"], "duplicate range")
        ranges.append(ReferenceRange(
            case_id=r["case_id"],
            heating_min=r.get("heating_min"), heating_max=r.get("heating_max"),
            cooling_min=r.get("cooling_min"), cooling_max=r.get("cooling_max"),
            per_program=tuple((p["program"], p.get("heating"), p.get("cooling"))
                              for p in r.get("per_program", [])),
            provenance=r.get("provenance", ""),
        ))

    pairs = []
    for p in doc["pairs"]:
        for cid in (p["case_minuend"], p["case_subtrahend"]):
            if cid not in seen:
                raise UnknownCaseRef(cid)
        expected = p.get("expected_delta_range")
        if expected is not None:
            if expected[0] > expected[1]:
                raise InvalidRange(p["case_minuend"], "expected delta range min exceeds max")
            expected = (float(expected[0]), float(expected[1]))
        pairs.append(DiagnosticPair(p["case_minuend"], p["case_subtrahend"], p["quantity"], expected))

    return Catalog(tuple(cases), tuple(ranges), tuple(pairs), doc.get("provenance", ""))


def load_catalog_file(path) -> Catalog:
    with open(path, encoding="utf-8") as fh:
        return load_catalog(fh.read())


def bundled_catalog() -> Catalog:
    return load_catalog(bundled_catalog_text())


# --------------------------------------------------------------------------- suite

def _sig6(x: float | None) -> float | None:
    return None if x is None else float(f"{x:.6g}")


@dataclass
class CaseReport:
    case_id: str
    model: str
    status: str = "ok"
    annual_heating: float | None = None
    annual_cooling: float | None = None
    heating_verdict: Verdict | None = None
    cooling_verdict: Verdict | None = None
    error: str | None = None

    @property
    def passed(self) -> bool:
        if self.status != "ok":
            return False
        return all(v is None or v.passed for v in (self.heating_verdict, self.cooling_verdict))


@dataclass
class PairReport:
    case_minuend: str
    case_subtrahend: str
    quantity: str
    delta: float | None = None
    expected_delta_range: tuple[float, float] | None = None
    within: bool | None = None

    @property
    def passed(self) -> bool:
        if self.expected_delta_range is None:
            return True
        return bool(self.within)


@dataclass
class SuiteReport:
    cases: list[CaseReport] = field(default_factory=list)
    pairs: list[PairReport] = field(default_factory=list)
    metadata: dict[str, Any] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.cases) and all(p.passed for p in self.pairs)

    def case(self, case_id: str) -> CaseReport:
        for c in self.cases:
            if c.case_id == case_id:
                return c
        raise KeyError(case_id)


def _run_case(args) -> tuple[str, str, SimulationResult | None, str | None]:
    case, weather, model, substeps, suns = args
    try:
        result = simulate_annual(case.zone, weather, model, substeps=substeps, case_id=case.id, suns=suns)
    except Exception as exc:  # recorded per case, the suite carries on
        return case.id, model, None, f"{type(exc).__name__}: {exc}"
    return case.id, model, result, None


def simulate_cases(catalog: Catalog, weather: WeatherSeries, model_override: str | None = None,
                   workers: int | None = None, substeps: int = 1) -> dict[str, tuple]:
    """Simulate every case; returns {case_id: (model, result or None, error or None)}."""
    if model_override is not None and model_override not in MODELS:
        raise ValueError(f"unknown model {model_override!r}")
    suns = [sun_position(weather.site, r.hour_index) for r in weather.records]
    jobs = [(c, weather, model_override or c.default_model, substeps, suns) for c in catalog.cases]
    if workers is None:
        workers = min(len(jobs), os.cpu_count() or 1)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_case, jobs))
    else:
        outcomes = [_run_case(j) for j in jobs]
    return {cid: (model, result, err) for cid, model, result, err in outcomes}


def build_report(catalog: Catalog, outcomes: dict[str, tuple], metadata: dict | None = None) -> SuiteReport:
    """Assemble a report in catalog order from per-case simulation outcomes."""
    report = SuiteReport(metadata=dict(metadata or {}))
    annual: dict[str, SimulationResult] = {}
    for case in catalog.cases:
        model, result, err = outcomes[case.id]
        if result is None:
            report.cases.append(CaseReport(case.id, model, status="error", error=err))
            continue
        annual[case.id] = result
        entry = CaseReport(case.id, model, annual_heating=_sig6(result.annual_heating),
                           annual_cooling=_sig6(result.annual_cooling))
        rng = catalog.range_for(case.id)
        if rng is not None:
            for q in QUANTITIES:
                bounds = rng.bounds(q)
                if bounds is not None:
                    v = check_range(getattr(result, f"annual_{q}"), *bounds)
                    setattr(entry, f"{q}_verdict", Verdict(v.status, _sig6(v.margin)))
        report.cases.append(entry)
    for pair in catalog.pairs:
        entry = PairReport(pair.case_minuend, pair.case_subtrahend, pair.quantity,
                           expected_delta_range=pair.expected_delta_range)
        a, b = annual.get(pair.case_minuend), annual.get(pair.case_subtrahend)
        if a is not None and b is not None:
            delta = delta_diagnostic(a, b, pair.quantity)
            entry.delta = _sig6(delta)
            if pair.expected_delta_range is not None:
                lo, hi = pair.expected_delta_range
                entry.within = lo <= delta <= hi
        elif pair.expected_delta_range is not None:
            entry.within = False
        report.pairs.append(entry)
    return report


def run_suite(catalog: Catalog, weather: WeatherSeries, model_override: str | None = None,
              workers: int | None = None, substeps: int = 1, timestamp: bool = True) -> SuiteReport:
    """Simulate every catalog case, check envelopes and evaluate diagnostic pairs.

    ``workers`` defaults to the available core count; case order in the
    report is always catalog order.
    """
    if not weather.is_annual:
        raise ValueError(f"suite needs an 8760-hour weather series, got {len(weather)}")
    outcomes = simulate_cases(catalog, weather, model_override, workers, substeps)
    metadata = {
        "tool": "bestsim",
        "version": __version__,
        "catalog_provenance": catalog.provenance,
        "model_override": model_override,
        "substeps": substeps,
        "scheme": EXACT,
        "site": asdict(weather.site),
    }
    if timestamp:
        metadata["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    return build_report(catalog, outcomes, metadata)


# --------------------------------------------------------------------------- reports

def report_to_dict(report: SuiteReport) -> dict:
    return {
        "metadata": report.metadata,
        "passed": report.passed,
        "cases": [asdict(c) | {"passed": c.passed} for c in report.cases],
        "pairs": [asdict(p) | {"passed": p.passed} for p in report.pairs],
    }


def report_from_dict(doc: dict) -> SuiteReport:
    def verdict(v):
        return None if v is None else Verdict(v["status"], v["margin"])

    cases = [CaseReport(c["case_id"], c["model"], c["status"], c["annual_heating"], c["annual_cooling"],
                        verdict(c["heating_verdict"]), verdict(c["cooling_verdict"]), c["error"])
             for c in doc["cases"]]
    pairs = [PairReport(p["case_minuend"], p["case_subtrahend"], p["quantity"], p["delta"],
                        None if p["expected_delta_range"] is None else tuple(p["expected_delta_range"]),
                        p["within"])
             for p in doc["pairs"]]
    return SuiteReport(cases, pairs, doc.get("metadata", {}))


def _csv_number(x: float | None) -> str:
    return "" if x is None else f"{x:.6g}"


def emit_report(report: SuiteReport, fmt: str = "json") -> str:
    """Render a report as JSON (full nesting) or CSV (one row per case)."""
    if fmt == "json":
        return json.dumps(report_to_dict(report), indent=2) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for c in report.cases:
        hv, cv = c.heating_verdict, c.cooling_verdict
        writer.writerow([
            c.case_id, c.model, c.status,
            _csv_number(c.annual_heating), _csv_number(c.annual_cooling),
            hv.status if hv else "", _csv_number(hv.margin) if hv else "",
            cv.status if cv else "", _csv_number(cv.margin) if cv else "",
        ])
    return buf.getvalue()


def parse_report(text: str) -> SuiteReport:
    return report_from_dict(json.loads(text))


def strip_timestamp(text: str) -> str:
    """JSON report text with the generation timestamp removed (for comparisons)."""
    doc = json.loads(text)
    doc.get("metadata", {}).pop("generated_at", None)
    return json.dumps(doc, indent=2) + "\n"


def pair_deltas(catalog: Catalog, weather: WeatherSeries, pairs: Sequence[DiagnosticPair],
                model_override: str | None = None, workers: int | None = None) -> list[PairReport]:
    """Simulate only the cases the pairs need and return their deltas."""
    needed = {cid for p in pairs for cid in (p.case_minuend, p.case_subtrahend)}
    sub = catalog.subset(needed)
    sub = Catalog(sub.cases, sub.ranges, tuple(pairs), sub.provenance)
    return run_suite(sub, weather, model_override, workers, timestamp=False).pairs
