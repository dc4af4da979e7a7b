"""
fairdispatch - Benchmark linear programs
Profit LP, max-min fairness LP and a dense bounded-variable primal simplex
"""

import itertools
import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .exceptions import EnumerationBoundsError, InvalidParameterError, LpDimensionError, LpSolveError
from .instance import Instance, require_valid
from .settings import FEASIBILITY_TOL, OPTIMALITY_TOL, PIVOT_TOL

logger = logging.getLogger(__name__)

ETA_LABEL = "eta_aux"

# Vertex enumeration guard
MAX_ENUM_VARIABLES = 8
MAX_ENUM_BASES = 500_000


class Relation(str, Enum):
    LE = "<="
    EQ = "="
    GE = ">="


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


# ============================================================================
# MODEL TYPES
# ============================================================================

def _frozen(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class LpModel:
    """max objective @ x  s.t.  matrix[i] @ x (relation[i]) rhs[i],  lower <= x <= upper."""

    objective: np.ndarray
    matrix: np.ndarray
    relations: Tuple[Relation, ...]
    rhs: np.ndarray
    lower: np.ndarray
    upper: np.ndarray
    labels: Tuple[str, ...]
    row_labels: Tuple[str, ...] = ()
    name: str = "lp"

    def __post_init__(self):
        objective = _frozen(self.objective)
        n = objective.shape[0] if objective.ndim == 1 else -1
        matrix = np.array(self.matrix, dtype=float)
        if matrix.size == 0:
            matrix = matrix.reshape(len(self.relations), max(n, 0))
        matrix.setflags(write=False)
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "relations", tuple(Relation(r) for r in self.relations))
        object.__setattr__(self, "rhs", _frozen(self.rhs))
        object.__setattr__(self, "lower", _frozen(self.lower))
        object.__setattr__(self, "upper", _frozen(self.upper))
        object.__setattr__(self, "labels", tuple(self.labels))
        row_labels = tuple(self.row_labels) or tuple(f"r{i}" for i in range(len(self.relations)))
        object.__setattr__(self, "row_labels", row_labels)

        m = len(self.relations)
        if objective.ndim != 1:
            raise LpDimensionError("objective must be a vector")
        if matrix.shape != (m, n):
            raise LpDimensionError(f"matrix shape {matrix.shape} does not match ({m}, {n})")
        for name, arr, size in (("rhs", self.rhs, m), ("lower", self.lower, n), ("upper", self.upper, n)):
            if arr.shape != (size,):
                raise LpDimensionError(f"{name} has shape {arr.shape}, expected ({size},)")
        if len(self.labels) != n or len(row_labels) != m:
            raise LpDimensionError("label counts do not match the model dimensions")
        if np.any(self.lower > self.upper):
            bad = int(np.flatnonzero(self.lower > self.upper)[0])
            raise LpDimensionError(f"variable {self.labels[bad]} has lower bound above upper bound")

    @property
    def num_variables(self) -> int:
        return len(self.labels)

    @property
    def num_constraints(self) -> int:
        return len(self.relations)

    @property
    def constraints(self) -> List[Tuple[np.ndarray, Relation, float]]:
        return [(self.matrix[i], self.relations[i], float(self.rhs[i])) for i in range(self.num_constraints)]

    @property
    def variable_bounds(self) -> List[Tuple[float, float]]:
        return list(zip(self.lower.tolist(), self.upper.tolist()))

    def column(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True)
class LpSolution:
    status: SolveStatus
    objective_value: float
    values: Dict[str, float] = field(default_factory=dict)
    iterations: int = 0

    @property
    def optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL

    def vector(self, model: LpModel) -> np.ndarray:
        return np.array([self.values.get(label, 0.0) for label in model.labels])


@dataclass(frozen=True)
class ScaledSolution:
    """Per rider, edge id -> x*_f / r_v clamped to [0,1]."""

    per_rider: Dict[str, Dict[str, float]]

    def for_rider(self, rider_id: str) -> Dict[str, float]:
        return self.per_rider[rider_id]


@dataclass(frozen=True)
class ConstraintViolation:
    name: str
    kind: str
    amount: float

    def __str__(self) -> str:
        return f"{self.kind} {self.name} violated by {self.amount:.3g}"


@dataclass(frozen=True)
class Benchmarks:
    profit: LpSolution
    fairness: LpSolution

    @property
    def profit_opt(self) -> float:
        return self.profit.objective_value

    @property
    def fairness_opt(self) -> float:
        return self.fairness.objective_value


# ============================================================================
# LP BUILDERS
# ============================================================================

def _shared_rows(instance: Instance, n_cols: int):
    """Capacity, patience and arrival rows over the first |E| columns, plus one
    joint r_v row per edge that was split into unit-capacity copies."""
    p = np.array([e.accept_prob for e in instance.edges])
    rows, relations, rhs, names = [], [], [], []

    for u, (d, incident) in enumerate(zip(instance.drivers, instance.edges_of_driver)):
        row = np.zeros(n_cols)
        row[list(incident)] = p[list(incident)]
        rows.append(row)
        relations.append(Relation.LE)
        rhs.append(float(d.capacity))
        names.append(f"capacity:{d.id}")

    for r, incident in zip(instance.riders, instance.edges_of_rider):
        row = np.zeros(n_cols)
        row[list(incident)] = 1.0
        rows.append(row)
        relations.append(Relation.LE)
        rhs.append(r.patience * r.arrival_rate)
        names.append(f"patience:{r.id}")

        row = np.zeros(n_cols)
        row[list(incident)] = p[list(incident)]
        rows.append(row)
        relations.append(Relation.LE)
        rhs.append(r.arrival_rate)
        names.append(f"arrival:{r.id}")

    copies: Dict[str, List[int]] = {}
    for j, e in enumerate(instance.edges):
        if e.origin is not None:
            copies.setdefault(e.origin, []).append(j)
    for origin, cols in copies.items():
        if len(cols) < 2:
            continue
        row = np.zeros(n_cols)
        row[cols] = 1.0
        rows.append(row)
        relations.append(Relation.LE)
        rhs.append(instance.riders[instance.edge_rider[cols[0]]].arrival_rate)
        names.append(f"copies:{origin}")
    return rows, relations, rhs, names


def _edge_upper(instance: Instance) -> List[float]:
    return [instance.riders[v].arrival_rate for v in instance.edge_rider]


def build_profit_lp(instance: Instance) -> LpModel:
    """max sum w p x  over the shared constraint system, 0 <= x_f <= r_v."""
    require_valid(instance)
    n = len(instance.edges)
    rows, relations, rhs, names = _shared_rows(instance, n)
    return LpModel(
        objective=[e.weight * e.accept_prob for e in instance.edges],
        matrix=np.array(rows).reshape(len(rows), n),
        relations=relations,
        rhs=rhs,
        lower=np.zeros(n),
        upper=_edge_upper(instance),
        labels=[e.id for e in instance.edges],
        row_labels=names,
        name="profit",
    )


def build_fairness_lp(instance: Instance) -> LpModel:
    """max eta  s.t. eta <= sum_{E_u} x p / B_u for every driver, plus the shared system.

    eta is bounded above by 1, which every capacity row already implies.
    """
    require_valid(instance)
    n = len(instance.edges)
    rows, relations, rhs, names = _shared_rows(instance, n + 1)

    p = np.array([e.accept_prob for e in instance.edges])
    for d, incident in zip(instance.drivers, instance.edges_of_driver):
        row = np.zeros(n + 1)
        row[list(incident)] = -p[list(incident)] / d.capacity
        row[n] = 1.0
        rows.append(row)
        relations.append(Relation.LE)
        rhs.append(0.0)
        names.append(f"fairness:{d.id}")

    objective = np.zeros(n + 1)
    objective[n] = 1.0
    return LpModel(
        objective=objective,
        matrix=np.array(rows).reshape(len(rows), n + 1),
        relations=relations,
        rhs=rhs,
        lower=np.zeros(n + 1),
        upper=_edge_upper(instance) + [1.0],
        labels=[e.id for e in instance.edges] + [ETA_LABEL],
        row_labels=names,
        name="fairness",
    )


# ============================================================================
# SIMPLEX
# ============================================================================

class _Tableau:
    """Bounded-variable tableau: every column lives in [0, ub]; nonbasic columns sit at 0 or ub."""

    def __init__(self, matrix: np.ndarray, rhs: np.ndarray, ub: np.ndarray, basis: List[int]):
        self.original = matrix
        self.rhs = rhs
        self.M = matrix.copy()
        self.beta = rhs.copy()
        self.ub = ub
        self.basis = list(basis)
        self.at_upper = np.zeros(matrix.shape[1], dtype=bool)
        self.eligible = np.ones(matrix.shape[1], dtype=bool)
        self.d = np.zeros(matrix.shape[1])
        self.iterations = 0

    def price(self, cost: np.ndarray) -> None:
        self.d = cost - cost[self.basis] @ self.M

    def pivot(self, r: int, j: int) -> None:
        self.M[r] /= self.M[r, j]
        col = self.M[:, j].copy()
        col[r] = 0.0
        self.M -= np.outer(col, self.M[r])
        self.d -= self.d[j] * self.M[r]
        self.d[j] = 0.0
        self.basis[r] = j

    def run(self, max_iterations: int) -> SolveStatus:
        """Primal simplex with Bland's rule on entering and leaving choices."""
        is_basic = np.zeros(self.M.shape[1], dtype=bool)
        while True:
            is_basic[:] = False
            is_basic[self.basis] = True
            improving = np.where(self.at_upper, self.d < -OPTIMALITY_TOL, self.d > OPTIMALITY_TOL)
            candidates = np.flatnonzero(improving & self.eligible & ~is_basic & (self.ub > 0))
            if candidates.size == 0:
                return SolveStatus.OPTIMAL

            self.iterations += 1
            if self.iterations > max_iterations:
                raise LpSolveError(f"simplex exceeded {max_iterations} iterations")

            j = int(candidates[0])
            direction = -1.0 if self.at_upper[j] else 1.0
            alpha = direction * self.M[:, j]

            ratios = np.full(alpha.shape, np.inf)
            dec = alpha > PIVOT_TOL
            ratios[dec] = self.beta[dec] / alpha[dec]
            basic_ub = self.ub[self.basis]
            inc = (alpha < -PIVOT_TOL) & np.isfinite(basic_ub)
            ratios[inc] = (basic_ub[inc] - self.beta[inc]) / -alpha[inc]
            np.maximum(ratios, 0.0, out=ratios)

            theta_row = ratios.min() if ratios.size else np.inf
            theta_flip = self.ub[j]
            if not np.isfinite(theta_row) and not np.isfinite(theta_flip):
                return SolveStatus.UNBOUNDED

            if theta_flip <= theta_row:
                self.beta -= theta_flip * alpha
                self.at_upper[j] = not self.at_upper[j]
                continue

            ties = np.flatnonzero(ratios <= theta_row + 1e-12)
            r = int(min(ties, key=lambda i: self.basis[i]))
            leaving = self.basis[r]
            self.beta -= theta_row * alpha
            self.beta[r] = theta_row if direction > 0 else self.ub[j] - theta_row
            self.at_upper[leaving] = bool(alpha[r] < 0)
            self.at_upper[j] = False
            self.pivot(r, j)

    def primal(self) -> np.ndarray:
        """Column values, with basic values re-solved against the original columns."""
        x = np.where(self.at_upper, self.ub, 0.0)
        x[~np.isfinite(x)] = 0.0
        x[self.basis] = 0.0
        residual = self.rhs - self.original @ x
        try:
            basic = np.linalg.solve(self.original[:, self.basis], residual)
        except np.linalg.LinAlgError:
            basic = self.beta
        x[self.basis] = basic
        return x


def solve(model: LpModel, max_iterations: Optional[int] = None) -> LpSolution:
    """Two-phase bounded-variable primal simplex (Bland's rule)."""
    n, m = model.num_variables, model.num_constraints
    if not np.all(np.isfinite(model.lower)):
        raise LpDimensionError("every variable needs a finite lower bound")

    if n == 0:
        feasible = all(_holds(0.0, rel, b) for rel, b in zip(model.relations, model.rhs))
        status = SolveStatus.OPTIMAL if feasible else SolveStatus.INFEASIBLE
        return LpSolution(status, 0.0 if feasible else math.nan, {})

    span = model.upper - model.lower
    rhs = model.rhs - model.matrix @ model.lower

    slack_rows = [i for i, rel in enumerate(model.relations) if rel is not Relation.EQ]
    slacks = np.zeros((m, len(slack_rows)))
    for k, i in enumerate(slack_rows):
        slacks[i, k] = 1.0 if model.relations[i] is Relation.LE else -1.0
    A = np.hstack([model.matrix, slacks])
    negative = rhs < 0
    A[negative] *= -1.0
    rhs = np.where(negative, -rhs, rhs)

    slack_of_row = {i: n + k for k, i in enumerate(slack_rows)}
    basis, artificial_rows = [], []
    for i in range(m):
        col = slack_of_row.get(i)
        if col is not None and A[i, col] == 1.0:
            basis.append(col)
        else:
            basis.append(-1)
            artificial_rows.append(i)
    n_struct = A.shape[1]
    artificials = np.zeros((m, len(artificial_rows)))
    for k, i in enumerate(artificial_rows):
        artificials[i, k] = 1.0
        basis[i] = n_struct + k
    A = np.hstack([A, artificials])
    ub = np.concatenate([span, np.full(n_struct - n + len(artificial_rows), np.inf)])

    cap = max_iterations or 50 * (m + A.shape[1]) + 100
    tableau = _Tableau(A, rhs, ub, basis)

    if artificial_rows:
        cost = np.zeros(A.shape[1])
        cost[n_struct:] = -1.0
        tableau.price(cost)
        tableau.run(cap)
        infeasibility = float(np.sum(tableau.primal()[n_struct:]))
        if infeasibility > FEASIBILITY_TOL * max(1.0, float(np.abs(rhs).max(initial=0.0))):
            logger.info("LP %s infeasible (phase I residual %.3g)", model.name, infeasibility)
            return LpSolution(SolveStatus.INFEASIBLE, math.nan, {}, tableau.iterations)
        tableau.ub = ub.copy()
        tableau.ub[n_struct:] = 0.0
        tableau.eligible[n_struct:] = False

    cost = np.zeros(A.shape[1])
    cost[:n] = model.objective
    tableau.price(cost)
    status = tableau.run(cap)
    if status is SolveStatus.UNBOUNDED:
        logger.info("LP %s unbounded", model.name)
        return LpSolution(SolveStatus.UNBOUNDED, math.inf, {}, tableau.iterations)

    x = model.lower + np.clip(tableau.primal()[:n], 0.0, span)
    value = float(model.objective @ x)
    logger.debug("LP %s solved in %d iterations, objective %.10g", model.name, tableau.iterations, value)
    return LpSolution(SolveStatus.OPTIMAL, value, dict(zip(model.labels, x.tolist())), tableau.iterations)


def _holds(lhs: float, relation: Relation, rhs: float, tol: float = FEASIBILITY_TOL) -> bool:
    if relation is Relation.LE:
        return lhs <= rhs + tol
    if relation is Relation.GE:
        return lhs >= rhs - tol
    return abs(lhs - rhs) <= tol


def check_feasibility(model: LpModel, solution: LpSolution) -> List[ConstraintViolation]:
    """Every row or bound violated beyond the feasibility tolerance."""
    x = solution.vector(model)
    report: List[ConstraintViolation] = []
    lhs = model.matrix @ x if model.num_variables else np.zeros(model.num_constraints)
    for i, (rel, b) in enumerate(zip(model.relations, model.rhs)):
        if not _holds(float(lhs[i]), rel, float(b)):
            report.append(ConstraintViolation(model.row_labels[i], "constraint", abs(float(lhs[i] - b))))
    for j, label in enumerate(model.labels):
        if x[j] < model.lower[j] - FEASIBILITY_TOL:
            report.append(ConstraintViolation(label, "lower bound", float(model.lower[j] - x[j])))
        if x[j] > model.upper[j] + FEASIBILITY_TOL:
            report.append(ConstraintViolation(label, "upper bound", float(x[j] - model.upper[j])))
    return report


def solve_benchmarks(instance: Instance) -> Benchmarks:
    """Solve both benchmark LPs; anything but optimal is an error."""
    results = []
    for builder in (build_profit_lp, build_fairness_lp):
        model = builder(instance)
        solution = solve(model)
        if not solution.optimal:
            raise LpSolveError(f"{model.name} LP is {solution.status.value}")
        logger.info("%s LP optimum %.6f (%d iterations)", model.name, solution.objective_value, solution.iterations)
        results.append(solution)
    return Benchmarks(*results)


# ============================================================================
# PER-ARRIVAL SCALING
# ============================================================================

def scale_per_arrival(instance: Instance, solution: LpSolution) -> ScaledSolution:
    """x^v = {x*_f / r_v : f in E_v}, clamped to [0,1]."""
    per_rider: Dict[str, Dict[str, float]] = {}
    for rider, incident in zip(instance.riders, instance.edges_of_rider):
        values = {instance.edges[f].id: solution.values.get(instance.edges[f].id, 0.0) for f in incident}
        if rider.arrival_rate <= 0.0:
            mass = sum(max(v, 0.0) for v in values.values())
            if mass > FEASIBILITY_TOL:
                raise InvalidParameterError(f"rider {rider.id} has zero arrival rate but LP mass {mass:.3g}")
            per_rider[rider.id] = {}
            continue
        scaled = {eid: min(1.0, max(0.0, v / rider.arrival_rate)) for eid, v in values.items()}
        if sum(scaled.values()) > rider.patience + FEASIBILITY_TOL:
            raise InvalidParameterError(f"rider {rider.id}: scaled mass exceeds patience {rider.patience}")
        per_rider[rider.id] = scaled
    return ScaledSolution(per_rider)


# ============================================================================
# LP TEXT FORMAT
# ============================================================================

def _safe(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_]", "_", name)


def _terms(coefficients: np.ndarray) -> str:
    parts = [f"{'-' if c < 0 else '+'} {abs(float(c))!r} x{j}" for j, c in enumerate(coefficients) if c != 0.0]
    return " ".join(parts) if parts else "0"


def dump_lp_text(model: LpModel) -> str:
    """CPLEX-style LP text; columns are written as x0..x{n-1} with label comments."""
    lines = [f"\\ model {model.name}"]
    lines += [f"\\ var x{j} {label}" for j, label in enumerate(model.labels)]
    lines += ["maximize", f" obj: {_terms(model.objective)}", "st"]
    for i, (rel, b) in enumerate(zip(model.relations, model.rhs)):
        lines.append(f" {_safe(model.row_labels[i])}: {_terms(model.matrix[i])} {rel.value} {float(b)!r}")
    lines.append("bounds")
    for j in range(model.num_variables):
        lo, up = float(model.lower[j]), float(model.upper[j])
        lines.append(f" {lo!r} <= x{j} <= {up!r}" if math.isfinite(up) else f" x{j} >= {lo!r}")
    lines.append("end")
    return "\n".join(lines) + "\n"


def _parse_terms(text: str, n: int) -> np.ndarray:
    coefficients = np.zeros(n)
    tokens = text.split()
    sign, k = 1.0, 0
    while k < len(tokens):
        tok = tokens[k]
        if tok in "+-":
            sign = -1.0 if tok == "-" else 1.0
            k += 1
            continue
        if tok == "0" and k == len(tokens) - 1:
            break
        coef = float(tok)
        var = tokens[k + 1]
        coefficients[int(var[1:])] += sign * coef
        sign, k = 1.0, k + 2
    return coefficients


def read_lp_text(text: str) -> LpModel:
    """Parse the output of dump_lp_text back into a model."""
    labels: Dict[int, str] = {}
    name = "lp"
    section = None
    objective_text, rows, bounds = "", [], {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("\\"):
            parts = line[1:].split()
            if parts[:1] == ["var"]:
                labels[int(parts[1][1:])] = parts[2]
            elif parts[:1] == ["model"]:
                name = parts[1]
            continue
        if line in ("maximize", "st", "bounds", "end"):
            section = line
            continue
        if section == "maximize":
            objective_text = line.split(":", 1)[1]
        elif section == "st":
            row_name, body = line.split(":", 1)
            match = re.match(r"(.*)\s(<=|>=|=)\s(\S+)$", body.strip())
            if not match:
                raise LpDimensionError(f"cannot parse constraint line: {line}")
            rows.append((row_name.strip(), match.group(1), Relation(match.group(2)), float(match.group(3))))
        elif section == "bounds":
            parts = line.split()
            if len(parts) == 5:
                bounds[int(parts[2][1:])] = (float(parts[0]), float(parts[4]))
            else:
                bounds[int(parts[0][1:])] = (float(parts[2]), math.inf)

    n = len(labels)
    return LpModel(
        objective=_parse_terms(objective_text, n),
        matrix=np.array([_parse_terms(body, n) for _, body, _, _ in rows]).reshape(len(rows), n),
        relations=[rel for _, _, rel, _ in rows],
        rhs=[b for _, _, _, b in rows],
        lower=[bounds.get(j, (0.0, math.inf))[0] for j in range(n)],
        upper=[bounds.get(j, (0.0, math.inf))[1] for j in range(n)],
        labels=[labels[j] for j in range(n)],
        row_labels=[name_ for name_, _, _, _ in rows],
        name=name,
    )


# ============================================================================
# CROSS-CHECK ORACLES
# ============================================================================

def restrict_model(model: LpModel, keep: Iterable[str]) -> LpModel:
    """Model with every column outside ``keep`` fixed at its lower bound and removed.

    Rows left without coefficients are dropped.
    """
    keep = set(keep)
    cols = [j for j, label in enumerate(model.labels) if label in keep]
    dropped = [j for j in range(model.num_variables) if j not in set(cols)]
    shift = model.matrix[:, dropped] @ model.lower[dropped] if dropped else np.zeros(model.num_constraints)
    sub = model.matrix[:, cols]
    rows = [i for i in range(model.num_constraints) if np.any(sub[i] != 0.0)]
    return LpModel(
        objective=model.objective[cols],
        matrix=sub[rows].reshape(len(rows), len(cols)),
        relations=[model.relations[i] for i in rows],
        rhs=[float(model.rhs[i] - shift[i]) for i in rows],
        lower=model.lower[cols],
        upper=model.upper[cols],
        labels=[model.labels[j] for j in cols],
        row_labels=[model.row_labels[i] for i in rows],
        name=f"{model.name}-restricted",
    )


def solve_by_enumeration(model: LpModel) -> LpSolution:
    """Best basic feasible point by brute force over active-constraint sets.

    Assumes the model is bounded; meant for models with a handful of columns.
    """
    n = model.num_variables
    if n > MAX_ENUM_VARIABLES:
        raise EnumerationBoundsError(f"{n} variables exceeds the enumeration limit of {MAX_ENUM_VARIABLES}")
    if n == 0:
        return solve(model)

    G, h = [], []
    for row, rel, b in model.constraints:
        if rel in (Relation.LE, Relation.EQ):
            G.append(row)
            h.append(b)
        if rel in (Relation.GE, Relation.EQ):
            G.append(-row)
            h.append(-b)
    eye = np.eye(n)
    for j in range(n):
        G.append(-eye[j])
        h.append(-float(model.lower[j]))
        if math.isfinite(model.upper[j]):
            G.append(eye[j])
            h.append(float(model.upper[j]))
    G, h = np.array(G), np.array(h)
    if math.comb(len(h), n) > MAX_ENUM_BASES:
        raise EnumerationBoundsError(f"C({len(h)}, {n}) active sets exceeds {MAX_ENUM_BASES}")

    best, best_x = -math.inf, None
    for active in itertools.combinations(range(len(h)), n):
        sub = G[list(active)]
        if abs(np.linalg.det(sub)) < 1e-12:
            continue
        x = np.linalg.solve(sub, h[list(active)])
        if np.all(G @ x <= h + FEASIBILITY_TOL):
            value = float(model.objective @ x)
            if value > best + 1e-12:
                best, best_x = value, x
    if best_x is None:
        return LpSolution(SolveStatus.INFEASIBLE, math.nan, {})
    return LpSolution(SolveStatus.OPTIMAL, best, dict(zip(model.labels, best_x.tolist())))
