"""Regenerate src/bestsim/data/catalog.json, the bundled desk-scale catalog.

The building blocks below are synthetic stand-ins shaped like the usual
single-zone test box (8 m x 6 m x 2.7 m, 12 m2 of glazing). They are not a
transcription of any published test-case input report.

    python scripts/build_catalog.py
"""
import copy
import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "bestsim" / "data" / "catalog.json"

CONSTRUCTIONS = {
    "light_wall": {
        "layers": [
            {"name": "wood siding", "thickness": 0.009, "conductivity": 0.14, "density": 530, "specific_heat": 900},
            {"name": "fiberglass", "thickness": 0.066, "conductivity": 0.04, "density": 12, "specific_heat": 840},
            {"name": "plasterboard", "thickness": 0.012, "conductivity": 0.16, "density": 950, "specific_heat": 840},
        ],
        "exterior_solar_absorptance": 0.6,
        "interior_solar_absorptance": 0.6,
    },
    "light_roof": {
        "layers": [
            {"name": "roof deck", "thickness": 0.019, "conductivity": 0.14, "density": 530, "specific_heat": 900},
            {"name": "fiberglass", "thickness": 0.1118, "conductivity": 0.04, "density": 12, "specific_heat": 840},
            {"name": "plasterboard", "thickness": 0.010, "conductivity": 0.16, "density": 950, "specific_heat": 840},
        ],
        "exterior_solar_absorptance": 0.6,
        "interior_solar_absorptance": 0.6,
    },
    "light_floor": {
        "layers": [
            {"name": "insulation", "thickness": 1.003, "conductivity": 0.04},
            {"name": "timber floor", "thickness": 0.025, "conductivity": 0.14, "density": 650, "specific_heat": 1200},
        ],
        "exterior_solar_absorptance": 0.0,
        "interior_solar_absorptance": 0.6,
    },
    "heavy_wall": {
        "layers": [
            {"name": "wood siding", "thickness": 0.009, "conductivity": 0.14, "density": 530, "specific_heat": 900},
            {"name": "foam insulation", "thickness": 0.0615, "conductivity": 0.04, "density": 10, "specific_heat": 1400},
            {"name": "concrete block", "thickness": 0.100, "conductivity": 0.51, "density": 1400, "specific_heat": 1000},
        ],
        "exterior_solar_absorptance": 0.6,
        "interior_solar_absorptance": 0.6,
    },
    "heavy_floor": {
        "layers": [
            {"name": "insulation", "thickness": 1.007, "conductivity": 0.04},
            {"name": "concrete slab", "thickness": 0.080, "conductivity": 1.13, "density": 1400, "specific_heat": 1000},
        ],
        "exterior_solar_absorptance": 0.0,
        "interior_solar_absorptance": 0.6,
    },
}

GLAZING = {"normal_transmittance": 0.75, "u_value": 3.0}
COOL_DAY = [7 <= h < 18 for h in range(24)]
NIGHT_VENT = [0.0 if 7 <= h < 18 else 13.14 for h in range(24)]


def surface(name, area, azimuth, tilt, construction, **extra):
    s = {"name": name, "area": area, "azimuth": azimuth, "tilt": tilt,
         "construction": construction, "h_in": 8.29, "h_out": 29.3, "boundary": "outdoor"}
    s.update(extra)
    return s


def window(name, azimuth, devices=()):
    return {"name": name, "width": 3.0, "height": 2.0, "azimuth": azimuth, "tilt": 90,
            "glazing": dict(GLAZING), "interior_absorptance": 0.0, "devices": list(devices)}


def zone(mass, glazed, devices=()):
    # both mass levels share the lightweight roof
    wall, roof, floor = f"{mass}_wall", "light_roof", f"{mass}_floor"
    south = 21.6 - (12.0 if glazed == "south" else 0.0)
    side = 16.2 - (6.0 if glazed == "east_west" else 0.0)
    if glazed == "south":
        windows = [window("south_window_1", 180, devices), window("south_window_2", 180, devices)]
    else:
        windows = [window("east_window", 90, devices), window("west_window", 270, devices)]
    return {
        "volume": 129.6,
        "infiltration_ach": 0.5,
        "internal_gains": 200.0,
        "convective_fraction": 0.4,
        "floor": "floor",
        "floor_beam_fraction": 0.0,
        "thermostat": {"heat_setpoint": 20.0, "cool_setpoint": 27.0,
                       "heating_enabled": True, "cooling_enabled": True},
        "surfaces": [
            surface("south_wall", south, 180, 90, wall),
            surface("north_wall", 21.6, 0, 90, wall),
            surface("east_wall", side, 90, 90, wall),
            surface("west_wall", side, 270, 90, wall),
            surface("roof", 48.0, 180, 0, roof),
            surface("floor", 48.0, 180, 180, floor),
        ],
        "windows": windows,
    }


def case(cid, description, z, tags=(), model="two_node"):
    return {"id": cid, "description": description, "provenance": "synthetic",
            "default_model": model, "diagnostic_tags": list(tags), "zone": z}


def with_interior_absorptance(z, alpha):
    z = copy.deepcopy(z)
    for s in z["surfaces"]:
        s["interior_solar_absorptance"] = alpha
    return z


def main():
    overhang_610 = {"kind": "overhang", "depth": 1.0, "gap": 0.5, "extension": 0.5}
    shade_630 = [
        {"kind": "overhang", "depth": 1.0, "gap": 0.0, "extension": 0.0},
        {"kind": "wingwall", "depth": 1.0, "gap": 0.0, "extension": 0.5, "side": "left"},
        {"kind": "wingwall", "depth": 1.0, "gap": 0.0, "extension": 0.5, "side": "right"},
    ]
    base = zone("light", "south")
    z650 = copy.deepcopy(base)
    z650["thermostat"].update(heating_enabled=False, cooling_hours=COOL_DAY, venting_schedule=NIGHT_VENT)

    cases = [
        case("270", "lightweight box, south glazing, interior solar absorptance 0.9",
             with_interior_absorptance(base, 0.9), ["cavity_albedo"]),
        case("280", "lightweight box, south glazing, interior solar absorptance 0.1",
             with_interior_absorptance(base, 0.1), ["cavity_albedo"]),
        case("600", "lightweight box, south glazing", base, ["base"]),
        case("610", "case 600 with a 1.0 m overhang over the south windows",
             zone("light", "south", [overhang_610]), ["shading"]),
        case("620", "case 600 with the glazing moved to the east and west walls",
             zone("light", "east_west"), ["orientation"]),
        case("630", "case 620 with overhang and wingwalls around each window",
             zone("light", "east_west", shade_630), ["shading", "orientation"]),
        case("650", "case 600 with night venting, daytime cooling only, no heating", z650, ["venting"]),
        case("900", "heavyweight box, south glazing", zone("heavy", "south"), ["thermal_mass"]),
        case("930", "heavyweight box, east/west glazing with overhang and wingwalls",
             zone("heavy", "east_west", shade_630), ["thermal_mass", "shading"]),
    ]

    table1 = [("ESP", 4.296, 6.137), ("BLAST", 4.773, 6.433), ("DOE2", 5.709, 7.079),
              ("SRES/SUN", 5.226, 7.278), ("SERIRES", 5.596, 7.964), ("S3PAS", 4.882, 6.492),
              ("TRNSYS", 4.872, 6.492), ("TASE", 5.362, 6.778)]
    table2 = [("ESP", 1.170, 2.132), ("BLAST", 1.610, 2.600), ("DOE2", 1.872, 2.455),
              ("SRES/SUN", 1.897, 3.165), ("SERIRES", 1.988, 3.415), ("S3PAS", 1.730, 2.572),
              ("TRNSYS", 1.655, 2.485), ("TASE", 2.041, 2.599)]

    def envelope(cid, rows):
        return {
            "case_id": cid,
            "provenance": "reference-program results, annual MWh",
            "heating_min": min(r[1] for r in rows), "heating_max": max(r[1] for r in rows),
            "cooling_min": min(r[2] for r in rows), "cooling_max": max(r[2] for r in rows),
            "per_program": [{"program": p, "heating": h, "cooling": c} for p, h, c in rows],
        }

    catalog = {
        "schema": "bestsim-catalog/1",
        "provenance": "synthetic",
        "description": ("Desk-scale stand-in buildings. Envelopes for cases 600 and 900 are the "
                        "published reference-program ranges; building inputs are synthetic, so "
                        "verdicts against them are illustrative only. The published absolute annual "
                        "loads are NOT reproducible from this catalog: the genuine building inputs "
                        "and weather file are not bundled. Transcribe them into a catalog with "
                        "provenance 'bestest-1995' to obtain genuine verdicts."),
        "constructions": CONSTRUCTIONS,
        "cases": cases,
        "ranges": [envelope("600", table1), envelope("900", table2)],
        "pairs": [
            {"case_minuend": "280", "case_subtrahend": "270", "quantity": "heating", "expected_delta_range": None},
            {"case_minuend": "280", "case_subtrahend": "270", "quantity": "cooling", "expected_delta_range": None},
            {"case_minuend": "610", "case_subtrahend": "600", "quantity": "cooling", "expected_delta_range": None},
            {"case_minuend": "900", "case_subtrahend": "600", "quantity": "heating", "expected_delta_range": None},
        ],
    }
    OUT.write_text(json.dumps(catalog, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {OUT}")


if __name__ == "__main__":
    main()
