"""Directional-distance DEA and the Malmquist-Luenberger productivity index.

Each decision-making unit (DMU; a region in a period) is scored by how far
its good outputs could expand and its bad output contract, proportionally,
while staying inside the technology spanned by the reference period's
observations. With direction g = (y_o, -b_o) the program is

    max beta
    s.t.  sum_k lambda_k y_km >= (1 + beta) y_om      (good outputs)
          sum_k lambda_k b_ki  = (1 - beta) b_oi      (bad outputs, weak
                                                       disposability)
          sum_k lambda_k x_kn <= x_on                 (inputs)
          lambda_k >= 0                               (constant returns)

over the DMUs k observed in the reference period. beta >= 0 against a DMU's
own period; cross-period programs may be infeasible or give beta < 0, and we
cap beta at -1 from below because the index uses 1 + beta.

The productivity index between adjacent periods t and t+1 combines the four
programs D^s(r) (technology period s, observation period r):

    MLPI = sqrt( [(1 + D^t(t)) (1 + D^{t+1}(t))] /
                 [(1 + D^t(t+1)) (1 + D^{t+1}(t+1))] )
    MLTE = (1 + D^t(t)) / (1 + D^{t+1}(t+1))
    MLTC = MLPI / MLTE

MLPI > 1 reads as productivity growth. Infeasible cross-period programs are
recorded, never silently filled at this layer; impute_infeasible completes
them with the geometric mean of the feasible DMUs for the same transition
(the component values by the same rule, then MLTC rescaled to keep
MLPI = MLTE * MLTC exact). Aggregation is arithmetic across DMUs within a
transition and geometric across transitions within a DMU.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
import pandas as pd

from .errors import (
    AllInfeasibleError,
    DimensionMismatchError,
    EmptyTableError,
    LPFailureError,
    NonPositiveValueError,
    UnknownRegionError,
    ValidationError,
)
from .lp import (
    EQUAL,
    GREATER_EQUAL,
    LESS_EQUAL,
    STATUS_INFEASIBLE,
    STATUS_OPTIMAL,
    LinearProgram,
    SolverTolerances,
    solve,
)
from .panel import PanelDataset


@dataclass(frozen=True)
class DEAPanel:
    """Inputs, good outputs and bad outputs per DMU and period.

    Arrays are dmu x period x dimension. All values must be strictly
    positive: zero rows make the CRS technology degenerate and zero bads
    break the proportional direction.
    """

    dmus: tuple[str, ...]
    periods: tuple[int, ...]
    inputs: np.ndarray
    good_outputs: np.ndarray
    bad_outputs: np.ndarray

    def __post_init__(self) -> None:
        dmus = tuple(str(d) for d in self.dmus)
        periods = tuple(int(p) for p in self.periods)
        arrays = {}
        for name in ("inputs", "good_outputs", "bad_outputs"):
            a = np.asarray(getattr(self, name), dtype=float)
            if a.ndim != 3 or a.shape[0] != len(dmus) or a.shape[1] != len(periods):
                raise DimensionMismatchError(
                    f"dea: {name} must be dmu x period x dim, got shape {a.shape} "
                    f"for {len(dmus)} DMUs and {len(periods)} periods"
                )
            if a.shape[2] == 0:
                raise DimensionMismatchError(f"dea: {name} needs at least one dimension")
            if not np.all(np.isfinite(a)) or np.any(a <= 0.0):
                k, p, d = [int(ix[0]) for ix in np.nonzero(~(np.isfinite(a) & (a > 0.0)))]
                raise NonPositiveValueError(
                    f"dea: {name} must be strictly positive and finite, got "
                    f"{a[k, p, d]!r} for dmu={dmus[k]!r} period={periods[p]}"
                )
            a = a.copy()
            a.setflags(write=False)
            arrays[name] = a
        if len(set(dmus)) != len(dmus) or len(set(periods)) != len(periods):
            raise DimensionMismatchError("dea: duplicate DMU or period labels")
        object.__setattr__(self, "dmus", dmus)
        object.__setattr__(self, "periods", periods)
        for name, a in arrays.items():
            object.__setattr__(self, name, a)

    @classmethod
    def from_panel(
        cls,
        panel: PanelDataset,
        inputs: tuple[str, ...],
        good_outputs: tuple[str, ...],
        bad_outputs: tuple[str, ...],
    ) -> "DEAPanel":
        """Select indicator columns from a PanelDataset into the three roles."""
        def block(names):
            cols = [panel.indicator_index(n) for n in names]
            return panel.values[:, :, cols]

        return cls(
            dmus=panel.regions,
            periods=panel.years,
            inputs=block(inputs),
            good_outputs=block(good_outputs),
            bad_outputs=block(bad_outputs),
        )

    def dmu_index(self, dmu: str) -> int:
        try:
            return self.dmus.index(dmu)
        except ValueError:
            raise UnknownRegionError(f"dea: unknown DMU {dmu!r}") from None

    def period_index(self, period: int) -> int:
        try:
            return self.periods.index(int(period))
        except ValueError:
            raise UnknownRegionError(f"dea: unknown period {period!r}") from None


@dataclass(frozen=True)
class DDFResult:
    """One directional-distance solve; beta is NaN when infeasible."""

    dmu: str
    obs_period: int
    tech_period: int
    beta: float
    feasible: bool


@dataclass(frozen=True)
class MLPIRecord:
    """Productivity record for one DMU over one adjacent-period transition.

    The four betas are named d_<technology>_<observation>; cross-period
    entries are NaN when their program was infeasible, and then mlpi/mltc
    stay NaN until imputation. imputed lists which of the three index values
    were completed from peers rather than computed.
    """

    dmu: str
    from_period: int
    to_period: int
    d_tt: float
    d_t1t1: float
    d_t_t1: float
    d_t1_t: float
    mlpi: float
    mlte: float
    mltc: float
    imputed: frozenset[str] = frozenset()

    @property
    def feasible(self) -> bool:
        return all(math.isfinite(v) for v in (self.d_tt, self.d_t1t1, self.d_t_t1, self.d_t1_t))


def ddf(
    panel: DEAPanel,
    dmu: str,
    obs_period: int,
    tech_period: int,
    tolerances: SolverTolerances | None = None,
    trace=None,
) -> DDFResult:
    """Solve one directional-distance program (see module docstring).

    Infeasibility of a cross-period program is a recorded outcome, not an
    exception: the caller decides whether to impute. Own-period programs are
    feasible by construction, so an infeasible answer there, an unbounded
    answer anywhere, or an optimum pinned at beta = -1 raises LPFailureError.
    """
    k_obs = panel.dmu_index(dmu)
    p_obs = panel.period_index(obs_period)
    p_tech = panel.period_index(tech_period)

    x_o = panel.inputs[k_obs, p_obs]
    y_o = panel.good_outputs[k_obs, p_obs]
    b_o = panel.bad_outputs[k_obs, p_obs]
    X = panel.inputs[:, p_tech]
    Y = panel.good_outputs[:, p_tech]
    B = panel.bad_outputs[:, p_tech]

    n_dmu = len(panel.dmus)
    constraints = []
    # variables: [beta, lambda_1 .. lambda_K]
    for m in range(Y.shape[1]):
        constraints.append((
            np.concatenate(([-y_o[m]], Y[:, m])), GREATER_EQUAL, y_o[m],
        ))
    for i in range(B.shape[1]):
        constraints.append((
            np.concatenate(([b_o[i]], B[:, i])), EQUAL, b_o[i],
        ))
    for nn in range(X.shape[1]):
        constraints.append((
            np.concatenate(([0.0], X[:, nn])), LESS_EQUAL, x_o[nn],
        ))
    lp = LinearProgram(
        objective=np.concatenate(([1.0], np.zeros(n_dmu))),
        constraints=constraints,
        bounds=[(-1.0, None)] + [(0.0, None)] * n_dmu,
    )
    solution = solve(lp, tolerances, trace=trace)

    own_period = p_obs == p_tech
    if solution.status == STATUS_INFEASIBLE:
        if own_period:
            raise LPFailureError(
                f"dea: own-period program for dmu={dmu!r} period={obs_period} "
                f"reported infeasible ({solution.certificate}); the panel data "
                "violates the feasibility guarantee"
            )
        return DDFResult(
            dmu=dmu, obs_period=int(obs_period), tech_period=int(tech_period),
            beta=float("nan"), feasible=False,
        )
    if solution.status != STATUS_OPTIMAL:
        raise LPFailureError(
            f"dea: program for dmu={dmu!r} obs={obs_period} tech={tech_period} "
            f"came back {solution.status} ({solution.certificate}); the bad-output "
            "equality should cap beta at 1"
        )
    beta = float(solution.objective_value)
    if own_period and beta < -1e-9:
        raise LPFailureError(
            f"dea: own-period beta {beta!r} is negative for dmu={dmu!r} "
            f"period={obs_period}"
        )
    if own_period:
        beta = max(beta, 0.0)
    if beta <= -1.0:
        raise LPFailureError(
            f"dea: beta = {beta!r} for dmu={dmu!r} obs={obs_period} "
            f"tech={tech_period}; 1 + beta must stay positive"
        )
    return DDFResult(
        dmu=dmu, obs_period=int(obs_period), tech_period=int(tech_period),
        beta=beta, feasible=True,
    )


def mlpi_transition(
    panel: DEAPanel,
    dmu: str,
    t: int,
    t_next: int,
    tolerances: SolverTolerances | None = None,
    trace=None,
) -> MLPIRecord:
    """Four DDF solves for one DMU across adjacent periods t -> t_next.

    MLTE only needs the two own-period programs, so it is always present.
    MLPI and MLTC are NaN if either cross-period program was infeasible; the
    infeasibility is carried in the record for impute_infeasible.
    """
    pt = panel.period_index(t)
    pn = panel.period_index(t_next)
    if pn != pt + 1:
        raise DimensionMismatchError(
            f"dea: transition {t}->{t_next} is not adjacent in periods {list(panel.periods)}"
        )

    d_tt = ddf(panel, dmu, t, t, tolerances, trace)
    d_t1t1 = ddf(panel, dmu, t_next, t_next, tolerances, trace)
    d_t_t1 = ddf(panel, dmu, t_next, t, tolerances, trace)       # tech t, obs t+1
    d_t1_t = ddf(panel, dmu, t, t_next, tolerances, trace)       # tech t+1, obs t

    for r in (d_tt, d_t1t1, d_t_t1, d_t1_t):
        if r.feasible and 1.0 + r.beta <= 0.0:
            raise LPFailureError(
                f"dea: 1 + beta vanished for dmu={dmu!r} obs={r.obs_period} "
                f"tech={r.tech_period}"
            )

    mlte = (1.0 + d_tt.beta) / (1.0 + d_t1t1.beta)
    if d_t_t1.feasible and d_t1_t.feasible:
        mlpi = math.sqrt(
            ((1.0 + d_tt.beta) * (1.0 + d_t1_t.beta))
            / ((1.0 + d_t_t1.beta) * (1.0 + d_t1t1.beta))
        )
        mltc = mlpi / mlte
    else:
        mlpi = float("nan")
        mltc = float("nan")

    return MLPIRecord(
        dmu=dmu,
        from_period=int(t),
        to_period=int(t_next),
        d_tt=d_tt.beta,
        d_t1t1=d_t1t1.beta,
        d_t_t1=d_t_t1.beta,
        d_t1_t=d_t1_t.beta,
        mlpi=mlpi,
        mlte=mlte,
        mltc=mltc,
    )


def _geometric_mean(values) -> float:
    logs = [math.log(v) for v in values]
    return math.exp(sum(logs) / len(logs))


def impute_infeasible(records: list[MLPIRecord]) -> list[MLPIRecord]:
    """Complete one transition's records by geometric-mean substitution.

    Every record must describe the same from/to periods. Each NaN component
    is replaced by the geometric mean of the peers' finite values for that
    component; MLTC is then re-derived as mlpi / mlte so the decomposition
    identity survives. Emits a warning when more than half the DMUs needed
    imputation, since the completion rule is only trustworthy for a few
    holes.
    """
    if not records:
        raise EmptyTableError("dea: no records to impute")
    transitions = {(r.from_period, r.to_period) for r in records}
    if len(transitions) != 1:
        raise ValidationError(
            f"dea: impute_infeasible expects one transition, got {sorted(transitions)}"
        )

    infeasible = [r for r in records if not math.isfinite(r.mlpi)]
    if not infeasible:
        return list(records)

    feasible_mlpi = [r.mlpi for r in records if math.isfinite(r.mlpi)]
    if not feasible_mlpi:
        t, t1 = next(iter(transitions))
        raise AllInfeasibleError(
            f"dea: every DMU is infeasible for transition {t}->{t1}; "
            "geometric-mean completion is impossible"
        )
    if len(infeasible) * 2 > len(records):
        t, t1 = next(iter(transitions))
        warnings.warn(
            f"dea: {len(infeasible)} of {len(records)} DMUs infeasible for "
            f"transition {t}->{t1}; imputed values dominate this column",
            RuntimeWarning,
            stacklevel=2,
        )

    mlpi_fill = _geometric_mean(feasible_mlpi)
    feasible_mlte = [r.mlte for r in records if math.isfinite(r.mlte)]

    out = []
    for r in records:
        if math.isfinite(r.mlpi):
            out.append(r)
            continue
        imputed = {"mlpi", "mltc"}
        mlte = r.mlte
        if not math.isfinite(mlte):
            mlte = _geometric_mean(feasible_mlte)
            imputed.add("mlte")
        out.append(replace(
            r,
            mlpi=mlpi_fill,
            mlte=mlte,
            mltc=mlpi_fill / mlte,
            imputed=frozenset(imputed),
        ))
    return out


def compute_mlpi(
    panel: DEAPanel,
    impute: bool = True,
    tolerances: SolverTolerances | None = None,
    trace=None,
) -> list[MLPIRecord]:
    """All DMUs over all adjacent transitions, optionally completed.

    Records come back ordered by transition then DMU, matching the panel
    orders, so downstream output is deterministic.
    """
    if len(panel.periods) < 2:
        raise EmptyTableError("dea: need at least two periods for a productivity index")
    out = []
    for t, t_next in zip(panel.periods, panel.periods[1:]):
        batch = [
            mlpi_transition(panel, dmu, t, t_next, tolerances, trace)
            for dmu in panel.dmus
        ]
        if impute:
            batch = impute_infeasible(batch)
        out.extend(batch)
    return out


def transition_label(from_period: int, to_period: int) -> str:
    return f"{from_period}-{to_period}"


AVERAGE_COLUMN = "average"


@dataclass(frozen=True)
class ProductivityAggregate:
    """Table-shaped aggregates for each of the three index components.

    Each frame has one row per DMU plus a basin row, one column per
    transition plus an average column. Row rule: arithmetic mean across
    DMUs. Column rule: geometric mean across transitions. The corner cell
    applies the row rule to the per-DMU averages. imputed marks which
    DMU x transition cells carry completed values.
    """

    dmus: tuple[str, ...]
    transitions: tuple[tuple[int, int], ...]
    basin_label: str
    mlpi: pd.DataFrame
    mlte: pd.DataFrame
    mltc: pd.DataFrame
    imputed: pd.DataFrame


def aggregate(records: list[MLPIRecord], basin_label: str = "all") -> ProductivityAggregate:
    """Arrange completed records into the report layout described above."""
    if not records:
        raise EmptyTableError("dea: no records to aggregate")
    for r in records:
        values = (r.mlpi, r.mlte, r.mltc)
        if not all(math.isfinite(v) and v > 0.0 for v in values):
            raise ValidationError(
                f"dea: aggregate needs completed positive records; dmu={r.dmu!r} "
                f"transition {r.from_period}->{r.to_period} holds {values} "
                "(run impute_infeasible first)"
            )

    dmus = tuple(dict.fromkeys(r.dmu for r in records))
    transitions = tuple(dict.fromkeys((r.from_period, r.to_period) for r in records))
    if basin_label in dmus:
        raise ValidationError(f"dea: basin label {basin_label!r} collides with a DMU name")
    index = {(r.dmu, (r.from_period, r.to_period)): r for r in records}
    if len(index) != len(records):
        raise ValidationError("dea: duplicate (dmu, transition) records")
    missing = [
        (d, tr) for d in dmus for tr in transitions if (d, tr) not in index
    ]
    if missing:
        raise ValidationError(
            f"dea: records do not cover the full dmu x transition grid; first "
            f"hole {missing[0]}"
        )

    cols = [transition_label(*tr) for tr in transitions]

    def table(attr: str) -> pd.DataFrame:
        grid = np.array([
            [getattr(index[(d, tr)], attr) for tr in transitions] for d in dmus
        ])
        frame = pd.DataFrame(grid, index=list(dmus), columns=cols)
        frame[AVERAGE_COLUMN] = np.exp(np.log(grid).mean(axis=1))
        frame.loc[basin_label] = frame.mean(axis=0)
        return frame

    imputed_grid = pd.DataFrame(
        [["mlpi" in index[(d, tr)].imputed for tr in transitions] for d in dmus],
        index=list(dmus),
        columns=cols,
    )

    return ProductivityAggregate(
        dmus=dmus,
        transitions=transitions,
        basin_label=basin_label,
        mlpi=table("mlpi"),
        mlte=table("mlte"),
        mltc=table("mltc"),
        imputed=imputed_grid,
    )
