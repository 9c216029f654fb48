"""Dense two-phase primal simplex for the small LPs of the DEA stage.

The directional-distance programs solved here are dense, tiny (tens of rows)
and need trustworthy infeasibility answers, because the productivity index
imputes exactly the cross-period programs that come back infeasible. That
rules out treating a generic solver's failure modes as a black box, so the
solver is written out in full:

* phase 1 drives artificial variables out of equality and >= rows (no big-M,
  so the phase-1 objective doubles as a clean infeasibility certificate);
* phase 2 optimizes the real objective with Dantzig pricing, switching to
  Bland's rule after 2*(m+n) consecutive degenerate pivots so cycling is
  impossible;
* rows are max-norm scaled up front, and a solution is only reported optimal
  after an explicit re-check of every original constraint.

Everything is deterministic: ties break toward the lowest index, there is no
randomization, and identical inputs give identical pivots.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, NumericalBreakdownError

LESS_EQUAL = "<="
EQUAL = "="
GREATER_EQUAL = ">="
_RELATIONS = (LESS_EQUAL, EQUAL, GREATER_EQUAL)

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class SolverTolerances:
    """Numeric knobs, applied after row scaling.

    feasibility bounds the allowed absolute constraint violation of an
    optimal answer, optimality the reduced-cost threshold for entering
    columns, pivot the smallest acceptable pivot element. max_iterations of
    0 picks an automatic cap from the problem size.
    """

    feasibility: float = 1e-7
    optimality: float = 1e-9
    pivot: float = 1e-11
    max_iterations: int = 0

    def __post_init__(self) -> None:
        for name in ("feasibility", "optimality", "pivot"):
            v = getattr(self, name)
            if not (v > 0.0) or not math.isfinite(v):
                raise DimensionMismatchError(
                    f"lp: tolerance {name} must be positive, got {v!r}"
                )


@dataclass(frozen=True)
class LinearProgram:
    """max objective @ x subject to rows (coefficients, relation, rhs).

    Variables default to x >= 0; per-variable (lower, upper) bounds may be
    supplied, with upper = None meaning unbounded above. Lower bounds must
    be finite (the DEA programs only ever need a shifted floor).
    """

    objective: np.ndarray
    constraints: tuple
    bounds: tuple | None = None

    def __post_init__(self) -> None:
        c = np.asarray(self.objective, dtype=float).reshape(-1)
        if c.size == 0 or not np.all(np.isfinite(c)):
            raise DimensionMismatchError("lp: objective must be a finite vector")
        n = c.size
        rows = []
        for idx, con in enumerate(self.constraints):
            try:
                coeffs, rel, rhs = con
            except (TypeError, ValueError):
                raise DimensionMismatchError(
                    f"lp: constraint {idx} must be (coefficients, relation, rhs)"
                ) from None
            a = np.asarray(coeffs, dtype=float).reshape(-1)
            if a.size != n:
                raise DimensionMismatchError(
                    f"lp: constraint {idx} has {a.size} coefficients for {n} variables"
                )
            if rel not in _RELATIONS:
                raise DimensionMismatchError(
                    f"lp: constraint {idx}: unknown relation {rel!r}"
                )
            rhs = float(rhs)
            if not math.isfinite(rhs) or not np.all(np.isfinite(a)):
                raise DimensionMismatchError(f"lp: constraint {idx} is not finite")
            rows.append((a, rel, rhs))
        if self.bounds is None:
            bounds = tuple((0.0, None) for _ in range(n))
        else:
            if len(self.bounds) != n:
                raise DimensionMismatchError(
                    f"lp: {len(self.bounds)} bounds for {n} variables"
                )
            bounds = []
            for j, (lo, hi) in enumerate(self.bounds):
                lo = float(lo)
                if not math.isfinite(lo):
                    raise DimensionMismatchError(
                        f"lp: variable {j}: lower bound must be finite"
                    )
                hi = None if hi is None or hi == math.inf else float(hi)
                if hi is not None and not math.isfinite(hi):
                    raise DimensionMismatchError(
                        f"lp: variable {j}: bad upper bound {hi!r}"
                    )
                bounds.append((lo, hi))
            bounds = tuple(bounds)
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints", tuple(rows))
        object.__setattr__(self, "bounds", bounds)

    @property
    def n_variables(self) -> int:
        return self.objective.size


@dataclass(frozen=True)
class LPSolution:
    """Solver verdict. variable_values and objective_value are only present
    for optimal status; certificate carries the phase-1 objective of an
    infeasible instance or the direction column of an unbounded one. duals
    (one per constraint, maximization convention) are provided when the
    final basis allows reading them off; they certify optimality via
    b @ duals == objective_value."""

    status: str
    objective_value: float | None = None
    variable_values: np.ndarray | None = None
    certificate: str | None = None
    duals: np.ndarray | None = None
    iterations: int = 0


class _Breakdown(Exception):
    """Internal: pivot search failed; converted to NumericalBreakdownError."""


def _simplex_min(T, basis, cost, tol, banned, trace, phase, cap):
    """Minimize cost over the tableau in place. Returns (status, info,
    iterations) where status is 'optimal' or 'unbounded' and info is the
    entering column for unbounded instances."""
    m, width = T.shape
    n_cols = width - 1
    z_row = cost - cost[basis] @ T[:, :n_cols] if m else cost.astype(float).copy()
    z_val = float(cost[basis] @ T[:, n_cols]) if m else 0.0

    eps = tol.optimality * max(1.0, float(np.abs(cost).max(initial=0.0)))
    bland = False
    degenerate_run = 0
    iterations = 0
    bland_after = 2 * (m + n_cols)

    while True:
        candidates = np.nonzero(z_row < -eps)[0]
        candidates = candidates[~np.isin(candidates, banned)] if len(banned) else candidates
        if candidates.size == 0:
            return STATUS_OPTIMAL, None, iterations
        if bland:
            order = candidates  # lowest index first
        else:
            order = candidates[np.argsort(z_row[candidates], kind="stable")]

        pivoted = False
        for col in order:
            column = T[:m, col]
            rhs = T[:m, n_cols]
            eligible = column > tol.pivot
            if not eligible.any():
                if (column > 0.0).any():
                    continue  # pivots exist but are below tolerance; try another column
                return STATUS_UNBOUNDED, int(col), iterations
            ratios = np.where(eligible, np.maximum(rhs, 0.0) / np.where(eligible, column, 1.0), np.inf)
            best = ratios.min()
            tie_rows = np.nonzero(ratios <= best * (1.0 + 1e-12) + 1e-300)[0]
            if bland:
                row = int(tie_rows[np.argmin(basis[tie_rows])])
            else:
                row = int(tie_rows[0])

            pivot_value = T[row, col]
            T[row] /= pivot_value
            delta = z_row[col]
            others = np.arange(m) != row
            T[others] -= np.outer(T[others, col], T[row])
            # objective moves by reduced cost times the entering step length,
            # which is the pivot row's rhs after normalization
            improvement = delta * T[row, n_cols]
            z_val += improvement
            z_row = z_row - delta * T[row, :n_cols]
            T[:m, col] = 0.0
            T[row, col] = 1.0
            z_row[col] = 0.0
            basis[row] = col

            if trace is not None:
                trace.write(
                    f"phase {phase} iter {iterations}: enter {col} leave row {row} "
                    f"objective {z_val:.12g}\n"
                )

            if abs(improvement) <= 1e-15 * max(1.0, abs(z_val)):
                degenerate_run += 1
                if degenerate_run > bland_after:
                    bland = True
            else:
                degenerate_run = 0
            iterations += 1
            pivoted = True
            break

        if not pivoted:
            raise _Breakdown(
                f"phase {phase}: all pivot candidates below {tol.pivot} "
                f"with no alternative column"
            )
        if iterations > cap:
            raise _Breakdown(f"phase {phase}: iteration cap {cap} exceeded")


def solve(lp: LinearProgram, tol: SolverTolerances | None = None, trace=None) -> LPSolution:
    """Two-phase simplex over a dense tableau. See the module docstring for
    the algorithmic choices; `trace` takes a writable text file for a pivot
    log when debugging degenerate instances."""
    tol = tol or SolverTolerances()
    n = lp.n_variables
    c = lp.objective
    lb = np.array([b[0] for b in lp.bounds])
    ub = [b[1] for b in lp.bounds]

    for j, hi in enumerate(ub):
        if hi is not None and hi < lb[j]:
            return LPSolution(
                status=STATUS_INFEASIBLE,
                certificate=f"variable {j}: empty bound range [{lb[j]}, {hi}]",
            )

    # Shift x = lb + u (u >= 0) and append finite upper bounds as rows.
    raw_rows = []
    for a, rel, rhs in lp.constraints:
        raw_rows.append((a.copy(), rel, rhs - float(a @ lb)))
    for j, hi in enumerate(ub):
        if hi is not None:
            e = np.zeros(n)
            e[j] = 1.0
            raw_rows.append((e, LESS_EQUAL, hi - lb[j]))
    n_original = len(lp.constraints)

    # Max-norm row scaling; trivially satisfied zero rows are dropped here,
    # contradictory ones settle the whole instance immediately.
    rows = []
    row_origin = []  # index into raw_rows, for dual mapping
    flips = []
    scales = []
    for idx, (a, rel, rhs) in enumerate(raw_rows):
        norm = float(np.abs(a).max())
        if norm == 0.0:
            ok = (
                (rel == LESS_EQUAL and rhs >= -tol.feasibility)
                or (rel == EQUAL and abs(rhs) <= tol.feasibility)
                or (rel == GREATER_EQUAL and rhs <= tol.feasibility)
            )
            if ok:
                continue
            return LPSolution(
                status=STATUS_INFEASIBLE,
                certificate=f"constraint {idx}: zero row requires 0 {rel} {rhs}",
            )
        a = a / norm
        rhs = rhs / norm
        flip = 1.0
        if rhs < 0.0:
            a, rhs, flip = -a, -rhs, -1.0
            rel = {LESS_EQUAL: GREATER_EQUAL, GREATER_EQUAL: LESS_EQUAL, EQUAL: EQUAL}[rel]
        rows.append((a, rel, rhs))
        row_origin.append(idx)
        flips.append(flip)
        scales.append(norm)

    m = len(rows)
    n_slackish = sum(1 for _, rel, _ in rows if rel != EQUAL)
    n_art = sum(1 for _, rel, _ in rows if rel != LESS_EQUAL)
    n_cols = n + n_slackish + n_art
    T = np.zeros((m, n_cols + 1))
    basis = np.empty(m, dtype=int)
    unit_col = np.empty(m, dtype=int)  # the +-1 column that reads off row i's dual
    unit_sign = np.empty(m)

    next_slack = n
    next_art = n + n_slackish
    art_cols = []
    for i, (a, rel, rhs) in enumerate(rows):
        T[i, :n] = a
        T[i, n_cols] = rhs
        if rel == LESS_EQUAL:
            T[i, next_slack] = 1.0
            basis[i] = next_slack
            unit_col[i], unit_sign[i] = next_slack, 1.0
            next_slack += 1
        elif rel == GREATER_EQUAL:
            T[i, next_slack] = -1.0
            unit_col[i], unit_sign[i] = next_slack, -1.0
            next_slack += 1
            T[i, next_art] = 1.0
            basis[i] = next_art
            art_cols.append(next_art)
            next_art += 1
        else:
            T[i, next_art] = 1.0
            basis[i] = next_art
            unit_col[i], unit_sign[i] = next_art, 1.0
            art_cols.append(next_art)
            next_art += 1

    art_cols = np.array(art_cols, dtype=int)
    cap = tol.max_iterations or (500 + 100 * (m + n_cols))
    iterations = 0

    try:
        if art_cols.size:
            cost1 = np.zeros(n_cols)
            cost1[art_cols] = 1.0
            status, _, it1 = _simplex_min(
                T, basis, cost1, tol, banned=np.empty(0, dtype=int),
                trace=trace, phase=1, cap=cap,
            )
            iterations += it1
            if status == STATUS_UNBOUNDED:
                raise _Breakdown("phase 1 reported unbounded; objective is bounded below by 0")
            phase1_value = float(cost1[basis] @ T[:, n_cols])
            if phase1_value > tol.feasibility:
                return LPSolution(
                    status=STATUS_INFEASIBLE,
                    certificate=f"phase-1 objective {phase1_value:.6e}",
                    iterations=iterations,
                )
            # Pivot leftover artificials out of the basis; rows where no
            # non-artificial pivot exists are redundant and get dropped.
            keep = np.ones(m, dtype=bool)
            non_art = np.setdiff1d(np.arange(n_cols), art_cols)
            for i in range(m):
                if basis[i] not in art_cols:
                    continue
                row_vals = np.abs(T[i, non_art])
                j_local = int(np.argmax(row_vals))
                if row_vals[j_local] > tol.pivot:
                    col = int(non_art[j_local])
                    pivot_value = T[i, col]
                    T[i] /= pivot_value
                    others = np.arange(m) != i
                    T[others] -= np.outer(T[others, col], T[i])
                    T[:, col] = 0.0
                    T[i, col] = 1.0
                    basis[i] = col
                else:
                    keep[i] = False
            if not keep.all():
                T = T[keep]
                basis = basis[keep]
                kept = np.nonzero(keep)[0]
                row_origin = [row_origin[i] for i in kept]
                flips = [flips[i] for i in kept]
                scales = [scales[i] for i in kept]
                unit_col = unit_col[keep]
                unit_sign = unit_sign[keep]
                m = T.shape[0]

        cost2 = np.zeros(n_cols)
        cost2[:n] = -c  # maximize c @ x == minimize -c @ u (+ constant c @ lb)
        status, info, it2 = _simplex_min(
            T, basis, cost2, tol, banned=art_cols, trace=trace, phase=2, cap=cap,
        )
        iterations += it2
    except _Breakdown as exc:
        raise NumericalBreakdownError(f"lp: {exc}") from None

    if status == STATUS_UNBOUNDED:
        return LPSolution(
            status=STATUS_UNBOUNDED,
            certificate=f"unbounded direction via column {info}",
            iterations=iterations,
        )

    u = np.zeros(n_cols)
    u[basis] = T[:, n_cols]
    x = lb + u[:n]
    objective_value = float(c @ x)

    # Re-verify against the original constraints, measured on the scaled rows.
    worst = 0.0
    for idx, (a, rel, rhs) in enumerate(raw_rows):
        norm = float(np.abs(a).max())
        if norm == 0.0:
            residual = -rhs
        else:
            residual = float(a @ (x - lb) - rhs) / norm
        if rel == LESS_EQUAL:
            violation = max(residual, 0.0)
        elif rel == GREATER_EQUAL:
            violation = max(-residual, 0.0)
        else:
            violation = abs(residual)
        worst = max(worst, violation)
    if worst > tol.feasibility:
        raise NumericalBreakdownError(
            f"lp: optimal basis violates a constraint by {worst:.3e} "
            f"(feasibility tolerance {tol.feasibility})"
        )

    # Duals for the original constraints, maximization convention, read off
    # the unit columns each surviving row kept through both phases.
    z_row = cost2 - cost2[basis] @ T[:, :n_cols] if m else cost2.copy()
    duals = np.zeros(n_original)
    for i in range(m):
        if row_origin[i] >= n_original:
            continue  # synthetic upper-bound row
        y_min = -z_row[unit_col[i]] * unit_sign[i]
        duals[row_origin[i]] = -y_min * flips[i] / scales[i]

    return LPSolution(
        status=STATUS_OPTIMAL,
        objective_value=objective_value,
        variable_values=x,
        certificate=None,
        duals=duals if n_original else None,
        iterations=iterations,
    )
