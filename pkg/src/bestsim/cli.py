"""Command-line entry point.

Exit codes: 0 when everything ran and passed, 1 when the run completed
with failed checks, 2 on usage or input errors.
"""
from __future__ import annotations

import argparse
import sys

from .conduction import MODELS
from .harness import (
    CatalogError,
    DiagnosticPair,
    bundled_catalog,
    emit_report,
    load_catalog_file,
    pair_deltas,
    run_suite,
)
from .weather import Site, WeatherError, read_weather, synth_weather, write_weather

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2


def _model(text: str) -> str:
    name = text.replace("-", "_")
    if name not in MODELS:
        raise argparse.ArgumentTypeError(f"model must be one of two-node, discretized (got {text!r})")
    return name


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--catalog", help="catalog JSON (default: bundled desk-scale catalog)")
    p.add_argument("--weather", required=True, help="weather CSV with 8760 hourly rows")
    p.add_argument("--model", type=_model, help="override every case's conduction model: two-node|discretized")
    p.add_argument("--workers", type=int, default=None, help="parallel case jobs (default: core count)")
    p.add_argument("--substeps", type=int, default=1, help="sub-steps per hour")


def _add_output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="write the report here instead of stdout")
    p.add_argument("--format", choices=("json", "csv"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bestsim",
        description="Run single-zone test cases and compare annual loads with reference envelopes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate one case")
    run.add_argument("--case", required=True)
    _add_common(run)
    _add_output(run)

    suite = sub.add_parser("suite", help="simulate every case and check reference envelopes")
    _add_common(suite)
    _add_output(suite)

    diag = sub.add_parser("diag", help="annual-load delta between two cases (A minus B)")
    diag.add_argument("--pair", required=True, metavar="A:B")
    diag.add_argument("--quantity", choices=("heating", "cooling"), required=True)
    _add_common(diag)

    synth = sub.add_parser("synth-weather", help="write a synthetic weather year")
    synth.add_argument("--mean", type=float, required=True, help="annual mean dry bulb, C")
    synth.add_argument("--daily-amp", type=float, required=True, help="daily amplitude, K")
    synth.add_argument("--seasonal-amp", type=float, required=True, help="seasonal amplitude, K")
    synth.add_argument("--clearness", type=float, required=True, help="clear-sky scaling in [0, 1]")
    synth.add_argument("--seed", type=int, default=0)
    synth.add_argument("--perturbation", type=float, default=0.0, help="noise std dev, K")
    synth.add_argument("--latitude", type=float, default=39.8)
    synth.add_argument("--longitude", type=float, default=-104.9)
    synth.add_argument("--tz-meridian", type=float, default=-105.0)
    synth.add_argument("--ground-reflectance", type=float, default=0.2)
    synth.add_argument("--out", required=True)
    return parser


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _catalog(path: str | None):
    return bundled_catalog() if path is None else load_catalog_file(path)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "synth-weather":
            site = Site(args.latitude, args.longitude, args.tz_meridian, args.ground_reflectance)
            series = synth_weather(site, args.mean, args.daily_amp, args.seasonal_amp,
                                   args.clearness, args.seed, args.perturbation)
            write_weather(series, args.out)
            return EXIT_OK

        catalog = _catalog(args.catalog)
        weather = read_weather(args.weather)
        if not weather.is_annual:
            raise WeatherError(f"{args.weather}: need 8760 hourly rows, found {len(weather)}")

        if args.command == "diag":
            a, sep, b = args.pair.partition(":")
            if not sep or not a or not b:
                raise CatalogError(f"--pair must look like A:B, got {args.pair!r}")
            known = next((p for p in catalog.pairs
                          if (p.case_minuend, p.case_subtrahend, p.quantity) == (a, b, args.quantity)), None)
            pair = known or DiagnosticPair(a, b, args.quantity)
            (entry,) = pair_deltas(catalog, weather, [pair], args.model, args.workers)
            if entry.delta is None:
                print(f"{pair.label}: simulation failed", file=sys.stderr)
                return EXIT_FAILED
            print(f"{pair.label} {entry.delta:.6g} MWh")
            return EXIT_OK if entry.passed else EXIT_FAILED

        if args.command == "run":
            catalog = catalog.subset([args.case])
        report = run_suite(catalog, weather, args.model, args.workers, args.substeps)
        _write(emit_report(report, args.format), args.out)
        return EXIT_OK if report.passed else EXIT_FAILED
    except (CatalogError, WeatherError, OSError, ValueError) as exc:
        print(f"bestsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
