"""Low-carbon tourism assessment toolbox.

The package walks a regional panel from raw yearbook-style indicators to a
set of diagnostic tables: bottom-up CO2 accounting, entropy-weighted
composite indices for the tourism economy and its emissions, the coupling
coordination between the two, frontier-based productivity change with an
undesirable output, and a quadratic economy-emissions curve fit. Each stage
is usable on its own; `lct.pipeline.run_pipeline` chains them and the `lct`
console script exposes everything on the command line.
"""
from .coupling import CouplingResult, ccd, ccd_series, classify, coupling_degree
from .dea import (
    DEAPanel,
    DDFResult,
    MLPIRecord,
    ProductivityAggregate,
    aggregate,
    compute_mlpi,
    ddf,
    impute_infeasible,
)
from .ekc import EKCFit, fit_ekc
from .emissions import (
    AccommodationParams,
    ActivityMix,
    CoefficientConfig,
    EmissionBreakdown,
    TransportModeRecord,
    accommodation_emissions,
    activity_emissions,
    emissions_series,
    emissions_to_panel,
    load_coefficients,
    total_emissions,
    transport_emissions,
)
from .errors import LctError, NumericalError, ValidationError
from .index import (
    EntropyWeights,
    IndexSeries,
    StandardizedMatrix,
    composite_index,
    composite_series,
    entropy_weights,
    improved_normalize,
    standardize_minmax,
    tcde_index,
)
from .lp import LinearProgram, LPSolution, SolverTolerances, solve
from .panel import NEGATIVE, POSITIVE, PanelDataset, PanelSchema, load_panel
from .pipeline import VERSION, RunConfig, RunResult, load_run_config, run_pipeline

__version__ = VERSION

__all__ = [
    "AccommodationParams",
    "ActivityMix",
    "CoefficientConfig",
    "CouplingResult",
    "DDFResult",
    "DEAPanel",
    "EKCFit",
    "EmissionBreakdown",
    "EntropyWeights",
    "IndexSeries",
    "LPSolution",
    "LctError",
    "LinearProgram",
    "MLPIRecord",
    "NEGATIVE",
    "NumericalError",
    "POSITIVE",
    "PanelDataset",
    "PanelSchema",
    "ProductivityAggregate",
    "RunConfig",
    "RunResult",
    "SolverTolerances",
    "StandardizedMatrix",
    "TransportModeRecord",
    "ValidationError",
    "VERSION",
    "accommodation_emissions",
    "activity_emissions",
    "aggregate",
    "ccd",
    "ccd_series",
    "classify",
    "composite_index",
    "composite_series",
    "compute_mlpi",
    "coupling_degree",
    "ddf",
    "emissions_series",
    "emissions_to_panel",
    "entropy_weights",
    "fit_ekc",
    "improved_normalize",
    "impute_infeasible",
    "load_coefficients",
    "load_panel",
    "load_run_config",
    "run_pipeline",
    "solve",
    "standardize_minmax",
    "tcde_index",
    "total_emissions",
    "transport_emissions",
]
