"""Full-run orchestration: wiring the stages and writing report files.

A run is described by a JSON config (paths, indicator roles, method
switches) and produces a directory of CSV tables plus a manifest. Every
number is formatted the same way on every run and rows follow the panel's
canonical region/year order, so two runs over identical inputs produce
byte-identical files; the manifest records SHA-256 digests of inputs and
outputs to make that checkable from the outside.

Stages, in order: panel load, emission accounting, economy index, emission
index, per-region and basin coordination, productivity tables, quadratic
economy-emissions fit. Each stage consumes the previous one's in-memory
objects; the CSV files are for people and plots, not for passing data
between stages. The writer functions at module level also serve the CLI
subcommands that rerun a single stage from earlier stages' CSVs.
"""
from __future__ import annotations

import csv
import functools
import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import pandas as pd

from .coupling import CouplingResult, ccd, ccd_series, classify
from .dea import (
    DEAPanel,
    MLPIRecord,
    ProductivityAggregate,
    aggregate,
    compute_mlpi,
    transition_label,
)
from .ekc import DEFAULT_CURVATURE_TOL, EKCFit, fit_ekc
from .emissions import (
    EMISSION_COLUMNS,
    emissions_series,
    emissions_to_panel,
    load_coefficients,
)
from .errors import RegionMismatchError, SchemaMismatchError
from .index import (
    DEFAULT_OFFSET,
    METHOD_CLASSIC,
    METHOD_IMPROVED,
    IndexSeries,
    composite_series,
    tcde_index,
)
from .lp import SolverTolerances
from .panel import IMPUTE_FFILL, IMPUTE_LINEAR, PanelDataset, load_panel

VERSION = "0.1.0"

logger = logging.getLogger(__name__)

EKC_POOLED = "pooled"
EKC_BASIN_MEAN = "basin_mean"
EKC_BOTH = "both"

# Basin coordination is reported under two aggregation rules; see ccd_basin.csv.
AGG_COORDINATION_OF_MEANS = "coordination_of_means"
AGG_MEAN_OF_COORDINATION = "mean_of_coordination"

BASIN_LABEL = "basin"

_IMPUTE_CHOICES = {"none": None, "ffill": IMPUTE_FFILL, "linear": IMPUTE_LINEAR}

OUTPUT_FILES = (
    "emissions.csv",
    "te_index.csv",
    "te_weights.csv",
    "tcde_index.csv",
    "ccd.csv",
    "ccd_basin.csv",
    "mlpi.csv",
    "mlte.csv",
    "mltc.csv",
    "mlpi_records.csv",
    "ekc.csv",
)

MANIFEST_FILE = "run_manifest.json"


@dataclass(frozen=True)
class RunConfig:
    """Everything a full run needs, resolved and validated."""

    panel: Path
    coefficients: Path
    output_dir: Path
    te_indicators: tuple[str, ...]
    dea_inputs: tuple[str, ...]
    dea_good_outputs: tuple[str, ...]
    attributes: dict[str, str] = field(default_factory=dict)
    method: str = METHOD_IMPROVED
    offset: float = DEFAULT_OFFSET
    renormalize_shares: bool = False
    impute: str | None = None
    strict_index: bool = True
    ekc_mode: str = EKC_BOTH
    curvature_tol: float = DEFAULT_CURVATURE_TOL
    tolerances: SolverTolerances = field(default_factory=SolverTolerances)
    full_precision: bool = False

    def __post_init__(self) -> None:
        if self.method not in (METHOD_CLASSIC, METHOD_IMPROVED):
            raise SchemaMismatchError(f"run config: unknown method {self.method!r}")
        if self.ekc_mode not in (EKC_POOLED, EKC_BASIN_MEAN, EKC_BOTH):
            raise SchemaMismatchError(f"run config: unknown ekc_mode {self.ekc_mode!r}")
        if self.impute not in _IMPUTE_CHOICES.values():
            raise SchemaMismatchError(f"run config: unknown impute mode {self.impute!r}")
        for name, v in (
            ("offset", self.offset),
            ("curvature_tol", self.curvature_tol),
            ("tolerances.feasibility", self.tolerances.feasibility),
            ("tolerances.optimality", self.tolerances.optimality),
            ("tolerances.pivot", self.tolerances.pivot),
        ):
            if not (isinstance(v, float) and math.isfinite(v) and v > 0.0):
                raise SchemaMismatchError(f"run config: {name} must be > 0, got {v!r}")
        if not self.te_indicators:
            raise SchemaMismatchError("run config: te_indicators must not be empty")
        if not self.dea_inputs or not self.dea_good_outputs:
            raise SchemaMismatchError(
                "run config: dea.inputs and dea.good_outputs must not be empty"
            )
        for p, label in ((self.panel, "panel"), (self.coefficients, "coefficients")):
            if not Path(p).is_file():
                raise SchemaMismatchError(f"run config: {label} file not found: {p}")

    def describe(self) -> dict:
        """The reproducibility-relevant settings, for the manifest."""
        return {
            "method": self.method,
            "offset": self.offset,
            "renormalize_shares": self.renormalize_shares,
            "impute": self.impute or "none",
            "strict_index": self.strict_index,
            "attributes": dict(sorted(self.attributes.items())),
            "te_indicators": list(self.te_indicators),
            "dea": {
                "inputs": list(self.dea_inputs),
                "good_outputs": list(self.dea_good_outputs),
            },
            "ekc_mode": self.ekc_mode,
            "curvature_tol": self.curvature_tol,
            "lp_tolerances": {
                "feasibility": self.tolerances.feasibility,
                "optimality": self.tolerances.optimality,
                "pivot": self.tolerances.pivot,
            },
            "full_precision": self.full_precision,
        }


_CONFIG_KEYS = {
    "panel", "coefficients", "output_dir", "te_indicators", "dea",
    "attributes", "method", "offset", "renormalize_shares", "impute",
    "strict_index", "ekc_mode", "curvature_tol", "lp_tolerances", "note",
}


def load_run_config(
    path,
    out_override=None,
    method_override: str | None = None,
    offset_override: float | None = None,
    renormalize_override: bool | None = None,
    full_precision: bool = False,
) -> RunConfig:
    """Parse a run-config JSON file; relative paths are taken against the
    config file's own directory so fixture bundles stay relocatable."""
    cfg_path = Path(path)
    try:
        with open(cfg_path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise SchemaMismatchError(f"run config: {cfg_path}: invalid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise SchemaMismatchError(f"run config: {cfg_path}: expected a JSON object")
    extra = sorted(set(raw) - _CONFIG_KEYS)
    if extra:
        raise SchemaMismatchError(f"run config: {cfg_path}: unknown keys {extra}")
    for key in ("panel", "coefficients", "te_indicators", "dea"):
        if key not in raw:
            raise SchemaMismatchError(f"run config: {cfg_path}: missing key {key!r}")

    base = cfg_path.parent

    def respath(value) -> Path:
        p = Path(value)
        return p if p.is_absolute() else base / p

    dea = raw["dea"]
    if not isinstance(dea, dict) or not {"inputs", "good_outputs"} <= set(dea):
        raise SchemaMismatchError(
            f"run config: {cfg_path}: dea must carry 'inputs' and 'good_outputs'"
        )

    impute_raw = raw.get("impute", "none") or "none"
    if impute_raw not in _IMPUTE_CHOICES:
        raise SchemaMismatchError(
            f"run config: {cfg_path}: impute must be one of "
            f"{sorted(_IMPUTE_CHOICES)}, got {impute_raw!r}"
        )

    tol_raw = raw.get("lp_tolerances", {})
    if not isinstance(tol_raw, dict):
        raise SchemaMismatchError(f"run config: {cfg_path}: lp_tolerances must be an object")
    tolerances = SolverTolerances(
        feasibility=float(tol_raw.get("feasibility", 1e-7)),
        optimality=float(tol_raw.get("optimality", 1e-9)),
        pivot=float(tol_raw.get("pivot", 1e-11)),
    )

    renormalize = bool(raw.get("renormalize_shares", False))
    if renormalize_override is not None:
        renormalize = renormalize_override

    return RunConfig(
        panel=respath(raw["panel"]),
        coefficients=respath(raw["coefficients"]),
        output_dir=Path(out_override) if out_override is not None
        else respath(raw.get("output_dir", "out")),
        te_indicators=tuple(raw["te_indicators"]),
        dea_inputs=tuple(dea["inputs"]),
        dea_good_outputs=tuple(dea["good_outputs"]),
        attributes=dict(raw.get("attributes", {})),
        method=method_override or raw.get("method", METHOD_IMPROVED),
        offset=float(offset_override if offset_override is not None
                     else raw.get("offset", DEFAULT_OFFSET)),
        renormalize_shares=renormalize,
        impute=_IMPUTE_CHOICES[impute_raw],
        strict_index=bool(raw.get("strict_index", True)),
        ekc_mode=raw.get("ekc_mode", EKC_BOTH),
        curvature_tol=float(raw.get("curvature_tol", DEFAULT_CURVATURE_TOL)),
        tolerances=tolerances,
        full_precision=full_precision,
    )


# -- formatting and file primitives -------------------------------------------

def format_number(value, full_precision: bool = False) -> str:
    """Canonical cell text: 6 significant digits unless full precision."""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    return repr(v) if full_precision else f"{v:.6g}"


def write_rows(path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return "sha256:" + digest.hexdigest()


# -- per-table writers, shared by run_pipeline and the stage subcommands ------

def write_emissions_csv(path, table: pd.DataFrame, full_precision: bool = False) -> None:
    write_rows(
        path, EMISSION_COLUMNS,
        (
            (rec.region, rec.year,
             format_number(rec.q_transport_kg, full_precision),
             format_number(rec.q_accommodation_kg, full_precision),
             format_number(rec.q_activities_kg, full_precision),
             format_number(rec.q_total_kg, full_precision))
            for rec in table.itertuples(index=False)
        ),
    )


def write_index_csv(path, series: list[IndexSeries], full_precision: bool = False) -> None:
    write_rows(
        path, ("region", "year", "value"),
        (
            (s.region, year, format_number(v, full_precision))
            for s in series for year, v in zip(s.years, s.values)
        ),
    )


def write_weights_csv(
    path, series: list[IndexSeries], indicator_names: tuple[str, ...],
    full_precision: bool = False,
) -> None:
    write_rows(
        path, ("region", "indicator", "weight", "entropy"),
        (
            (s.region, name,
             format_number(w, full_precision), format_number(e, full_precision))
            for s in series
            for name, w, e in zip(indicator_names, s.weights.weights, s.weights.entropies)
        ),
    )


def read_index_csv(path) -> list[IndexSeries]:
    """Rebuild index series from the region/year/value CSV contract.

    Weights are not round-tripped; series read this way carry None there,
    which is fine for the coordination and curve-fit stages that only look
    at values.
    """
    frame = pd.read_csv(path)
    expected = ["region", "year", "value"]
    if list(frame.columns) != expected:
        raise SchemaMismatchError(
            f"index csv: {path}: expected columns {expected}, got {list(frame.columns)}"
        )
    out = []
    for region, chunk in frame.groupby("region", sort=True):
        chunk = chunk.sort_values("year")
        out.append(IndexSeries(
            region=str(region),
            years=tuple(int(y) for y in chunk["year"]),
            values=chunk["value"].to_numpy(dtype=float),
            weights=None,
            method="unspecified",
        ))
    return out


def write_ccd_csv(
    path, coordination: dict[str, list[CouplingResult]],
    regions: tuple[str, ...], years: tuple[int, ...],
    full_precision: bool = False,
) -> None:
    fmt = functools.partial(format_number, full_precision=full_precision)
    write_rows(
        path,
        ("region", "year", "te", "tcde", "c", "alpha", "beta", "t", "d",
         "level", "level_name", "condition", "degenerate"),
        (
            (region, year, fmt(r.u1), fmt(r.u2), fmt(r.c), fmt(r.alpha), fmt(r.beta),
             fmt(r.t), fmt(r.d), r.level, r.level_name, r.condition, fmt(r.degenerate))
            for region in regions
            for year, r in zip(years, coordination[region])
        ),
    )


def basin_coordination(
    te: list[IndexSeries], tcde: list[IndexSeries],
    per_region: dict[str, list[CouplingResult]],
) -> list[dict]:
    """Two defensible basin readings, kept side by side and labeled.

    coordination_of_means runs the coupling on cross-region mean indices;
    mean_of_coordination averages the finished per-region C/T/D instead and
    grades the averaged D. They agree only when regions move in lockstep, so
    publishing one silently would hide a real modeling choice.
    """
    years = te[0].years
    te_grid = np.array([s.values for s in te])
    tcde_grid = np.array([s.values for s in tcde])
    rows = []
    for j, year in enumerate(years):
        u1 = float(te_grid[:, j].mean())
        u2 = float(tcde_grid[:, j].mean())
        r = ccd(u1, u2)
        rows.append({
            "year": year, "aggregation": AGG_COORDINATION_OF_MEANS,
            "te": u1, "tcde": u2, "c": r.c, "t": r.t, "d": r.d,
            "level": r.level, "level_name": r.level_name,
        })
    for j, year in enumerate(years):
        cs = [per_region[s.region][j] for s in te]
        c = float(np.mean([r.c for r in cs]))
        t = float(np.mean([r.t for r in cs]))
        d = float(np.mean([r.d for r in cs]))
        level, level_name, _ = classify(d)
        rows.append({
            "year": year, "aggregation": AGG_MEAN_OF_COORDINATION,
            "te": float(te_grid[:, j].mean()), "tcde": float(tcde_grid[:, j].mean()),
            "c": c, "t": t, "d": d, "level": level, "level_name": level_name,
        })
    return rows


def write_ccd_basin_csv(path, basin_rows: list[dict], full_precision: bool = False) -> None:
    fmt = functools.partial(format_number, full_precision=full_precision)
    write_rows(
        path,
        ("year", "aggregation", "te", "tcde", "c", "t", "d", "level", "level_name"),
        (
            (row["year"], row["aggregation"], fmt(row["te"]), fmt(row["tcde"]),
             fmt(row["c"]), fmt(row["t"]), fmt(row["d"]), row["level"], row["level_name"])
            for row in basin_rows
        ),
    )


def write_productivity_tables(
    out_dir, productivity: ProductivityAggregate, records: list[MLPIRecord],
    full_precision: bool = False,
) -> dict[str, Path]:
    """Write the wide mlpi/mlte/mltc tables.

    A trailing ``*`` marks cells whose value was completed by the
    geometric-mean rule rather than solved directly; the basin row and the
    average column mix direct and completed cells, so they carry no marker.
    """
    out = Path(out_dir)
    rec_index = {(r.dmu, (r.from_period, r.to_period)): r for r in records}
    cols = [transition_label(*tr) for tr in productivity.transitions]
    paths = {}
    for attr, frame in (
        ("mlpi", productivity.mlpi),
        ("mlte", productivity.mlte),
        ("mltc", productivity.mltc),
    ):
        def rows():
            for dmu in productivity.dmus:
                cells = []
                for tr, col in zip(productivity.transitions, cols):
                    text = format_number(frame.at[dmu, col], full_precision)
                    if attr in rec_index[(dmu, tr)].imputed:
                        text += "*"
                    cells.append(text)
                avg = format_number(frame.at[dmu, "average"], full_precision)
                yield (dmu, *cells, avg)
            basin = productivity.basin_label
            yield (
                basin,
                *(format_number(frame.at[basin, c], full_precision) for c in cols),
                format_number(frame.at[basin, "average"], full_precision),
            )

        path = out / f"{attr}.csv"
        write_rows(path, ("region", *cols, "average"), rows())
        paths[f"{attr}.csv"] = path
    return paths


def write_mlpi_records_csv(path, records: list[MLPIRecord], full_precision: bool = False) -> None:
    fmt = functools.partial(format_number, full_precision=full_precision)
    write_rows(
        path,
        ("region", "from_period", "to_period", "d_tt", "d_t1t1", "d_t_t1", "d_t1_t",
         "mlpi", "mlte", "mltc", "imputed"),
        (
            (r.dmu, r.from_period, r.to_period, fmt(r.d_tt), fmt(r.d_t1t1),
             fmt(r.d_t_t1), fmt(r.d_t1_t), fmt(r.mlpi), fmt(r.mlte), fmt(r.mltc),
             ";".join(sorted(r.imputed)))
            for r in records
        ),
    )


def write_ekc_csv(path, fits: dict[str, EKCFit], full_precision: bool = False) -> None:
    fmt = functools.partial(format_number, full_precision=full_precision)
    write_rows(
        path,
        ("mode", "a", "b", "c", "r_squared", "turning_point",
         "turning_point_in_range", "shape", "n_points"),
        (
            (mode, fmt(f.a), fmt(f.b), fmt(f.c), fmt(f.r_squared),
             fmt(f.turning_point), fmt(f.turning_point_in_range), f.shape, f.n_points)
            for mode, f in fits.items()
        ),
    )


# -- the run itself ------------------------------------------------------------

@dataclass(frozen=True)
class RunResult:
    """In-memory view of one pipeline run, alongside the files it wrote."""

    panel: PanelDataset
    emissions: pd.DataFrame
    te: list[IndexSeries]
    tcde: list[IndexSeries]
    coordination: dict[str, list[CouplingResult]]
    basin_rows: list[dict]
    records: list[MLPIRecord]
    productivity: ProductivityAggregate
    ekc: dict[str, EKCFit]
    manifest: dict
    paths: dict[str, Path]


def dea_panel_from(
    panel: PanelDataset, q_panel: PanelDataset,
    inputs: tuple[str, ...], good_outputs: tuple[str, ...],
) -> DEAPanel:
    """Assemble the efficiency panel: chosen indicators as inputs and good
    outputs, the accounted emission total as the sole bad output."""
    if q_panel.regions != panel.regions or q_panel.years != panel.years:
        raise RegionMismatchError(
            "pipeline: emission totals do not align with the input panel"
        )

    def stack(names: tuple[str, ...]) -> np.ndarray:
        cols = [panel.indicator_index(n) for n in names]
        return panel.values[:, :, cols]

    return DEAPanel(
        dmus=panel.regions,
        periods=panel.years,
        inputs=stack(tuple(inputs)),
        good_outputs=stack(tuple(good_outputs)),
        bad_outputs=q_panel.values.copy(),
    )


def ekc_inputs(te: list[IndexSeries], tcde: list[IndexSeries], mode: str):
    """Pooled: every region-year pair. Basin-mean: cross-region means."""
    te_grid = np.array([s.values for s in te])
    tcde_grid = np.array([s.values for s in tcde])
    if mode == EKC_POOLED:
        return te_grid.ravel(), tcde_grid.ravel()
    if mode == EKC_BASIN_MEAN:
        return te_grid.mean(axis=0), tcde_grid.mean(axis=0)
    raise SchemaMismatchError(f"ekc: unknown mode {mode!r}")


def run_pipeline(cfg: RunConfig, trace=None) -> RunResult:
    """Execute every stage and write the report directory."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    full = cfg.full_precision

    logger.info("loading panel from %s", cfg.panel)
    panel = load_panel(cfg.panel, attributes=cfg.attributes, impute=cfg.impute)
    coeffs = load_coefficients(cfg.coefficients)

    logger.info("accounting emissions for %d regions x %d years",
                len(panel.regions), len(panel.years))
    emissions = emissions_series(panel, coeffs, renormalize_shares=cfg.renormalize_shares)
    q_panel = emissions_to_panel(emissions)

    logger.info("building economy and emission indices (%s)", cfg.method)
    te = composite_series(
        panel, cfg.te_indicators,
        offset=cfg.offset, method=cfg.method, strict=cfg.strict_index,
    )
    tcde = tcde_index(q_panel)

    coordination = {a.region: ccd_series(a, b) for a, b in zip(te, tcde)}
    basin_rows = basin_coordination(te, tcde, coordination)

    logger.info("solving productivity programs")
    dea_panel = dea_panel_from(panel, q_panel, cfg.dea_inputs, cfg.dea_good_outputs)
    records = compute_mlpi(dea_panel, impute=True, tolerances=cfg.tolerances, trace=trace)
    productivity = aggregate(records, basin_label=BASIN_LABEL)

    modes = [cfg.ekc_mode] if cfg.ekc_mode != EKC_BOTH else [EKC_POOLED, EKC_BASIN_MEAN]
    ekc = {}
    for mode in modes:
        e_vals, q_vals = ekc_inputs(te, tcde, mode)
        ekc[mode] = fit_ekc(e_vals, q_vals, curvature_tol=cfg.curvature_tol)

    paths = {name: out / name for name in OUTPUT_FILES}
    write_emissions_csv(paths["emissions.csv"], emissions, full)
    write_index_csv(paths["te_index.csv"], te, full)
    write_weights_csv(paths["te_weights.csv"], te, cfg.te_indicators, full)
    write_index_csv(paths["tcde_index.csv"], tcde, full)
    write_ccd_csv(paths["ccd.csv"], coordination, panel.regions, panel.years, full)
    write_ccd_basin_csv(paths["ccd_basin.csv"], basin_rows, full)
    write_productivity_tables(out, productivity, records, full)
    write_mlpi_records_csv(paths["mlpi_records.csv"], records, full)
    write_ekc_csv(paths["ekc.csv"], ekc, full)

    manifest = {
        "tool": "lct",
        "version": VERSION,
        "config": cfg.describe(),
        "inputs": {
            Path(cfg.panel).name: _sha256(cfg.panel),
            Path(cfg.coefficients).name: _sha256(cfg.coefficients),
        },
        "outputs": {name: _sha256(paths[name]) for name in OUTPUT_FILES},
    }
    manifest_path = out / MANIFEST_FILE
    with open(manifest_path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    paths[MANIFEST_FILE] = manifest_path
    logger.info("wrote %d files to %s", len(paths), out)

    return RunResult(
        panel=panel,
        emissions=emissions,
        te=te,
        tcde=tcde,
        coordination=coordination,
        basin_rows=basin_rows,
        records=records,
        productivity=productivity,
        ekc=ekc,
        manifest=manifest,
        paths=paths,
    )
