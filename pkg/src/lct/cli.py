"""Command-line front end.

One subcommand per pipeline stage plus `run` for the whole chain and
`gen-fixture` for a synthetic demo bundle. Stage subcommands read and write
the same CSV contracts the full run uses, so a stage can be rerun on its
own after tweaking its inputs.

Exit codes: 0 on success, 2 when inputs fail validation, 3 when the numbers
break down (ill-conditioned fit, solver breakdown). Set LCT_LOG=INFO or
DEBUG for progress logging on stderr.
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

import pandas as pd

from . import fixtures, pipeline
from .coupling import ccd_series
from .dea import aggregate, compute_mlpi
from .ekc import fit_ekc
from .emissions import emissions_series, emissions_to_panel, load_coefficients
from .errors import NumericalError, RegionMismatchError, ValidationError
from .index import METHOD_CLASSIC, METHOD_IMPROVED, composite_series
from .panel import NEGATIVE, load_panel
from .pipeline import (
    BASIN_LABEL,
    EKC_BASIN_MEAN,
    EKC_POOLED,
    VERSION,
    basin_coordination,
    dea_panel_from,
    load_run_config,
    read_index_csv,
    run_pipeline,
    write_ccd_basin_csv,
    write_ccd_csv,
    write_ekc_csv,
    write_emissions_csv,
    write_index_csv,
    write_mlpi_records_csv,
    write_productivity_tables,
    write_weights_csv,
)

logger = logging.getLogger(__name__)


def _split_names(text: str | None) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(part.strip() for part in text.split(",") if part.strip())


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _add_out(parser, default="out"):
    parser.add_argument("--out", default=default, help="output directory")
    parser.add_argument(
        "--full-precision", action="store_true",
        help="write full float precision instead of 6 significant digits",
    )


def _add_share_mode(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument(
        "--strict-shares", dest="renormalize_shares", action="store_false",
        help="require activity shares to sum to 1 (default)",
    )
    group.add_argument(
        "--renormalize-shares", dest="renormalize_shares", action="store_true",
        help="rescale activity shares to sum to 1",
    )
    parser.set_defaults(renormalize_shares=None)


def cmd_emissions(args) -> int:
    out = _out_dir(args)
    panel = load_panel(args.input, impute=args.impute)
    coeffs = load_coefficients(args.coeffs)
    table = emissions_series(
        panel, coeffs, renormalize_shares=bool(args.renormalize_shares)
    )
    write_emissions_csv(out / "emissions.csv", table, args.full_precision)
    print(f"wrote {out / 'emissions.csv'}")
    return 0


def cmd_index(args) -> int:
    out = _out_dir(args)
    negatives = _split_names(args.negative)
    attributes = {name: NEGATIVE for name in negatives}
    panel = load_panel(args.input, attributes=attributes, impute=args.impute)
    indicators = _split_names(args.indicators) or panel.indicators
    series = composite_series(
        panel, indicators, offset=args.offset, method=args.method,
    )
    write_index_csv(out / "index.csv", series, args.full_precision)
    write_weights_csv(out / "index_weights.csv", series, tuple(indicators),
                      args.full_precision)
    print(f"wrote {out / 'index.csv'} and {out / 'index_weights.csv'}")
    return 0


def cmd_ccd(args) -> int:
    out = _out_dir(args)
    te = read_index_csv(args.te)
    tcde = read_index_csv(args.tcde)
    te_regions = [s.region for s in te]
    if te_regions != [s.region for s in tcde]:
        raise RegionMismatchError(
            "ccd: the two index files cover different region sets"
        )
    coordination = {a.region: ccd_series(a, b) for a, b in zip(te, tcde)}
    years = te[0].years if te else ()
    write_ccd_csv(out / "ccd.csv", coordination, tuple(te_regions), years,
                  args.full_precision)
    basin_rows = basin_coordination(te, tcde, coordination)
    write_ccd_basin_csv(out / "ccd_basin.csv", basin_rows, args.full_precision)
    print(f"wrote {out / 'ccd.csv'} and {out / 'ccd_basin.csv'}")
    return 0


def cmd_mlpi(args) -> int:
    out = _out_dir(args)
    panel = load_panel(args.input, impute=args.impute)
    q_panel = emissions_to_panel(pd.read_csv(args.emissions))
    dea_panel = dea_panel_from(
        panel, q_panel, _split_names(args.inputs), _split_names(args.goods)
    )
    records = compute_mlpi(dea_panel)
    productivity = aggregate(records, basin_label=BASIN_LABEL)
    write_productivity_tables(out, productivity, records, args.full_precision)
    write_mlpi_records_csv(out / "mlpi_records.csv", records, args.full_precision)
    print(f"wrote mlpi/mlte/mltc tables and records to {out}")
    return 0


def cmd_ekc(args) -> int:
    out = _out_dir(args)
    te = read_index_csv(args.te)
    tcde = read_index_csv(args.tcde)
    mode = EKC_BASIN_MEAN if args.basin_mean else EKC_POOLED
    e_vals, q_vals = pipeline.ekc_inputs(te, tcde, mode)
    fit = fit_ekc(e_vals, q_vals)
    write_ekc_csv(out / "ekc.csv", {mode: fit}, args.full_precision)
    inside = "inside" if fit.turning_point_in_range else "beyond"
    print(
        f"{mode}: shape={fit.shape} r_squared={fit.r_squared:.4f} "
        f"turning_point={fit.turning_point:.6g} ({inside} observed range)"
    )
    return 0


def cmd_run(args) -> int:
    cfg = load_run_config(
        args.config,
        out_override=args.out,
        method_override=args.method,
        offset_override=args.offset,
        renormalize_override=args.renormalize_shares,
        full_precision=args.full_precision,
    )
    result = run_pipeline(cfg)
    n_regions = len(result.panel.regions)
    n_years = len(result.panel.years)
    print(
        f"run complete: {n_regions} regions x {n_years} years, "
        f"{len(result.paths)} files in {cfg.output_dir}"
    )
    for mode, fit in result.ekc.items():
        print(f"ekc {mode}: shape={fit.shape} r_squared={fit.r_squared:.4f}")
    return 0


def cmd_gen_fixture(args) -> int:
    written = fixtures.write_fixture(
        args.out, seed=args.seed, n_regions=args.regions,
        n_years=args.years, start_year=args.start_year,
    )
    for path in written.values():
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lct",
        description="Low-carbon tourism assessment pipeline.",
    )
    parser.add_argument("--version", action="version", version=f"lct {VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("emissions", help="bottom-up emission accounting")
    p.add_argument("--input", required=True, help="panel CSV")
    p.add_argument("--coeffs", required=True, help="coefficient JSON")
    p.add_argument("--impute", choices=["ffill", "linear"], default=None,
                   help="fill missing year cells before computing")
    _add_share_mode(p)
    _add_out(p)
    p.set_defaults(func=cmd_emissions)

    p = sub.add_parser("index", help="entropy-weighted composite index")
    p.add_argument("--input", required=True, help="panel CSV")
    p.add_argument("--indicators", default=None,
                   help="comma-separated indicator names (default: all)")
    p.add_argument("--negative", default=None,
                   help="comma-separated indicators to treat as costs")
    p.add_argument("--method", choices=[METHOD_CLASSIC, METHOD_IMPROVED],
                   default=METHOD_IMPROVED)
    p.add_argument("--offset", type=float, default=0.00001,
                   help="translation added after min-max standardization")
    p.add_argument("--impute", choices=["ffill", "linear"], default=None)
    _add_out(p)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("ccd", help="coupling coordination from two index files")
    p.add_argument("--te", required=True, help="economy index CSV")
    p.add_argument("--tcde", required=True, help="emission index CSV")
    _add_out(p)
    p.set_defaults(func=cmd_ccd)

    p = sub.add_parser("mlpi", help="productivity tables from panel + emissions")
    p.add_argument("--input", required=True, help="panel CSV")
    p.add_argument("--emissions", required=True, help="emissions CSV")
    p.add_argument("--inputs", required=True,
                   help="comma-separated input indicators")
    p.add_argument("--goods", required=True,
                   help="comma-separated good-output indicators")
    p.add_argument("--impute", choices=["ffill", "linear"], default=None)
    _add_out(p)
    p.set_defaults(func=cmd_mlpi)

    p = sub.add_parser("ekc", help="quadratic economy-emissions fit")
    p.add_argument("--te", required=True, help="economy index CSV")
    p.add_argument("--tcde", required=True, help="emission index CSV")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--pooled", action="store_true", default=True,
                       help="fit every region-year point (default)")
    group.add_argument("--basin-mean", dest="basin_mean", action="store_true",
                       help="fit cross-region yearly means")
    _add_out(p)
    p.set_defaults(func=cmd_ekc, basin_mean=False)

    p = sub.add_parser("run", help="full pipeline from a config file")
    p.add_argument("--config", required=True, help="run-config JSON")
    p.add_argument("--out", default=None, help="override the output directory")
    p.add_argument("--method", choices=[METHOD_CLASSIC, METHOD_IMPROVED],
                   default=None, help="override the index method")
    p.add_argument("--offset", type=float, default=None,
                   help="override the standardization offset")
    _add_share_mode(p)
    p.add_argument("--full-precision", action="store_true")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("gen-fixture", help="write a synthetic demo bundle")
    p.add_argument("--out", default="fixture", help="output directory")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--regions", type=int, default=2)
    p.add_argument("--years", type=int, default=4)
    p.add_argument("--start-year", type=int, default=2000)
    p.set_defaults(func=cmd_gen_fixture)

    return parser


def main(argv=None) -> int:
    level_name = os.environ.get("LCT_LOG", "").upper()
    if level_name:
        logging.basicConfig(
            level=getattr(logging, level_name, logging.INFO),
            format="%(levelname)s %(name)s: %(message)s",
        )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
