"""Independent reference evaluations used by the test suite.

Each function here recomputes a library quantity with the plainest
arithmetic available: explicit loops, scalar math, no code shared with the
package under test. Agreement between the two is then meaningful evidence;
a shared bug would have to be written twice, independently, in different
styles.

The LP reference enumerates basic solutions outright, which is exponential
in the variable count and only sensible for the tiny instances the tests
generate. Every test instance carries a full finite box, so when the
feasible set is nonempty the optimum sits on a vertex and enumeration finds
it.
"""
from __future__ import annotations

import itertools
import math

import numpy as np


# -- emission formulas --------------------------------------------------------

def transport_reference(modes):
    """modes: iterable of (tourist_share, passengers, distance_km, factor)."""
    total = 0.0
    for share, passengers, distance, factor in modes:
        total += share * passengers * distance * factor
    return total


def accommodation_reference(beds, occupancy, energy_per_bed_night, carbon_per_energy):
    kg_carbon = 365.0 * beds * occupancy * energy_per_bed_night * carbon_per_energy
    return kg_carbon * (44.0 / 12.0)


def activities_reference(tourists, pairs):
    """pairs: iterable of (share, factor)."""
    total = 0.0
    for share, factor in pairs:
        total += tourists * share * factor
    return total


# -- entropy weighting chain --------------------------------------------------

def entropy_chain_reference(matrix, attributes=None, offset=1e-5):
    """Hand evaluation of the whole weighting chain on a list-of-lists
    matrix (rows are years, columns indicators). Returns every intermediate
    so tests can compare step by step:

    standardized  min-max scaled plus offset (mirrored for negative columns)
    contributions column-normalized standardized values
    entropies     Shannon entropy of each column's contributions over ln n
    weights       normalized information content 1 - e
    classic       weighted sum of standardized values per row
    improved_values  x / (max + min) per column (1 - that for negative)
    improved      weighted sum of improved_values per row
    """
    rows = [[float(v) for v in row] for row in matrix]
    n = len(rows)
    m = len(rows[0])
    tags = list(attributes) if attributes is not None else ["positive"] * m

    columns = [[rows[i][j] for i in range(n)] for j in range(m)]
    standardized = [[0.0] * m for _ in range(n)]
    for j in range(m):
        lo, hi = min(columns[j]), max(columns[j])
        for i in range(n):
            if tags[j] == "positive":
                z = (rows[i][j] - lo) / (hi - lo)
            else:
                z = (hi - rows[i][j]) / (hi - lo)
            standardized[i][j] = z + offset

    contributions = [[0.0] * m for _ in range(n)]
    entropies = []
    information = []
    for j in range(m):
        total = sum(standardized[i][j] for i in range(n))
        entropy = 0.0
        for i in range(n):
            share = standardized[i][j] / total
            contributions[i][j] = share
            entropy -= share * math.log(share)
        entropy /= math.log(n)
        entropy = min(1.0, max(0.0, entropy))
        entropies.append(entropy)
        information.append(1.0 - entropy)
    total_information = sum(information)
    weights = [v / total_information for v in information]

    classic = [
        sum(weights[j] * standardized[i][j] for j in range(m)) for i in range(n)
    ]

    improved_values = [[0.0] * m for _ in range(n)]
    for j in range(m):
        lo, hi = min(columns[j]), max(columns[j])
        for i in range(n):
            z = rows[i][j] / (hi + lo)
            improved_values[i][j] = 1.0 - z if tags[j] == "negative" else z
    improved = [
        sum(weights[j] * improved_values[i][j] for j in range(m)) for i in range(n)
    ]

    return {
        "standardized": standardized,
        "contributions": contributions,
        "entropies": entropies,
        "weights": weights,
        "classic": classic,
        "improved_values": improved_values,
        "improved": improved,
    }


# -- coupling coordination ----------------------------------------------------

def coupling_reference(u1, u2):
    """All coupling quantities for a non-degenerate pair (not both zero)."""
    c = math.sqrt((1.0 - abs(u1 - u2)) * u1 * u2) / max(u1, u2)
    alpha = u2 / (u1 + u2)
    beta = u1 / (u1 + u2)
    t = alpha * u1 + beta * u2
    d = math.sqrt(c * t)
    return {"c": c, "alpha": alpha, "beta": beta, "t": t, "d": d}


# -- productivity composition -------------------------------------------------

def mlpi_reference(d_tech_t_obs_t, d_tech_t_obs_next, d_tech_next_obs_t,
                   d_tech_next_obs_next):
    """(mlpi, mlte, mltc) from the four distance values; each argument name
    spells out which period's technology evaluates which observation."""
    numerator = (1.0 + d_tech_t_obs_t) * (1.0 + d_tech_next_obs_t)
    denominator = (1.0 + d_tech_t_obs_next) * (1.0 + d_tech_next_obs_next)
    mlpi = math.sqrt(numerator / denominator)
    mlte = (1.0 + d_tech_t_obs_t) / (1.0 + d_tech_next_obs_next)
    return mlpi, mlte, mlpi / mlte


# -- quadratic least squares --------------------------------------------------

def quadratic_fit_reference(e_values, q_values):
    """(a, b, c) of the least-squares parabola via the 3x3 normal equations,
    solved with Cramer's rule. Fine for well-scaled test data; not meant for
    ill-conditioned designs."""
    e = [float(v) for v in e_values]
    q = [float(v) for v in q_values]
    power_sums = [sum(v ** k for v in e) for k in range(5)]
    moments = [
        sum(qv for qv in q),
        sum(qv * ev for qv, ev in zip(q, e)),
        sum(qv * ev * ev for qv, ev in zip(q, e)),
    ]
    normal = [
        [power_sums[0], power_sums[1], power_sums[2]],
        [power_sums[1], power_sums[2], power_sums[3]],
        [power_sums[2], power_sums[3], power_sums[4]],
    ]

    def det3(m):
        return (
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        )

    denominator = det3(normal)
    coefficients = []
    for j in range(3):
        patched = [row[:] for row in normal]
        for i in range(3):
            patched[i][j] = moments[i]
        coefficients.append(det3(patched) / denominator)
    return tuple(coefficients)


# -- linear programming by vertex enumeration ----------------------------------

def vertex_lp_reference(objective, constraints, bounds,
                        singular_tol=1e-10, feasibility_tol=1e-9):
    """Maximize objective @ x over small instances by brute force.

    constraints are (coefficients, relation, rhs) triples with relation in
    {"<=", "=", ">="}; bounds are per-variable (lower, upper) with upper
    None meaning unbounded above. Equality rows join every candidate active
    set; the remaining active rows are chosen from the inequalities (bounds
    included). Returns ("optimal", value, x) or ("infeasible", None, None).
    """
    c = np.asarray(objective, dtype=float)
    n = c.size

    ineq_rows, ineq_rhs = [], []
    eq_rows, eq_rhs = [], []
    for coeffs, relation, rhs in constraints:
        a = np.asarray(coeffs, dtype=float)
        if relation == "=":
            eq_rows.append(a)
            eq_rhs.append(float(rhs))
        elif relation == "<=":
            ineq_rows.append(a)
            ineq_rhs.append(float(rhs))
        elif relation == ">=":
            ineq_rows.append(-a)
            ineq_rhs.append(-float(rhs))
        else:
            raise ValueError(f"unknown relation {relation!r}")
    for j, (lo, hi) in enumerate(bounds):
        unit = np.zeros(n)
        unit[j] = 1.0
        ineq_rows.append(-unit)
        ineq_rhs.append(-float(lo))
        if hi is not None:
            ineq_rows.append(unit)
            ineq_rhs.append(float(hi))

    A = np.array(ineq_rows)
    b = np.array(ineq_rhs)
    E = np.array(eq_rows, dtype=float).reshape(len(eq_rows), n)
    f = np.array(eq_rhs, dtype=float)

    active_needed = n - E.shape[0]
    if active_needed < 0:
        raise ValueError("more equality rows than variables")
    combos = np.array(
        list(itertools.combinations(range(A.shape[0]), active_needed)),
        dtype=int,
    ).reshape(-1, active_needed)

    systems = np.empty((combos.shape[0], n, n))
    targets = np.empty((combos.shape[0], n))
    systems[:, : E.shape[0], :] = E
    targets[:, : E.shape[0]] = f
    systems[:, E.shape[0]:, :] = A[combos]
    targets[:, E.shape[0]:] = b[combos]

    with np.errstate(all="ignore"):
        determinants = np.linalg.det(systems)
    solvable = np.abs(determinants) > singular_tol
    if not solvable.any():
        return "infeasible", None, None
    points = np.linalg.solve(systems[solvable], targets[solvable][..., None])[..., 0]

    feasible = np.all(points @ A.T <= b[None, :] + feasibility_tol, axis=1)
    if E.shape[0]:
        feasible &= np.all(
            np.abs(points @ E.T - f[None, :]) <= feasibility_tol, axis=1
        )
    if not feasible.any():
        return "infeasible", None, None
    candidates = points[feasible]
    values = candidates @ c
    best = int(np.argmax(values))
    return "optimal", float(values[best]), candidates[best]
