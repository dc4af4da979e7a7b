"""
fairdispatch - Online dispatch policies
SR probing, WarmUp and AttenAlg LP-based policies, and the Greedy-P / Greedy-F baselines
"""

import logging
import math
from abc import ABC, abstractmethod
from bisect import bisect_right
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from itertools import permutations
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from tqdm import tqdm

from .exceptions import CalibrationError, InvalidParameterError
from .instance import Instance
from .lp import Benchmarks, ScaledSolution, scale_per_arrival, solve_benchmarks
from .rng import SeededRNG, stream
from .rounding import FractionalVector, round_values, rounding_distribution

logger = logging.getLogger(__name__)

# ============================================================================
# ENUMS AND CONFIG
# ============================================================================

class PolicyKind(str, Enum):
    WARMUP = "warmup"
    ATTENALG = "attenalg"
    GREEDY_P = "greedy_p"
    GREEDY_F = "greedy_f"


LP_KINDS = (PolicyKind.WARMUP, PolicyKind.ATTENALG)
GREEDY_KINDS = (PolicyKind.GREEDY_P, PolicyKind.GREEDY_F)

X_BRANCH, Y_BRANCH = 0, 1


class PolicyConfig(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    kind: PolicyKind = PolicyKind.WARMUP
    alpha: float = Field(0.5, ge=0.0)
    beta: float = Field(0.5, ge=0.0)
    attenuation_samples: int = Field(1000, gt=0)
    seed: int = Field(0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def check_mix(self) -> "PolicyConfig":
        if self.kind in LP_KINDS and self.alpha + self.beta > 1.0 + 1e-12:
            raise ValueError(f"alpha + beta must not exceed 1, got {self.alpha} + {self.beta}")
        return self

    @property
    def label(self) -> str:
        if self.kind in LP_KINDS:
            return f"{self.kind.value}(alpha={self.alpha:g},beta={self.beta:g})"
        return self.kind.value


# ============================================================================
# SCHEDULE
# ============================================================================

@dataclass(frozen=True)
class Schedule:
    gamma: Tuple[float, ...]
    mu: Tuple[float, ...]

    @property
    def horizon(self) -> int:
        return len(self.gamma)

    def average_gain(self) -> float:
        """(1/T) sum_t mu_t gamma_t"""
        return math.fsum(m * g for m, g in zip(self.mu, self.gamma)) / self.horizon


def make_schedule(T: int) -> Schedule:
    """gamma_1 = 1, mu_t = 1 - gamma_t/2, gamma_{t+1} = gamma_t (1 - mu_t/T)."""
    if not (isinstance(T, (int, np.integer)) and T >= 1):
        raise InvalidParameterError(f"horizon must be a positive integer, got {T!r}")
    gamma, mu = [1.0], []
    for t in range(T):
        mu.append(1.0 - gamma[t] / 2.0)
        if t + 1 < T:
            gamma.append(gamma[t] * (1.0 - mu[t] / T))
    return Schedule(tuple(gamma), tuple(mu))


# ============================================================================
# PLANS AND PER-TRIAL STATE
# ============================================================================

@dataclass(frozen=True)
class ProbePlan:
    """Edge positions (into instance.edges) in probing order, or a rejection."""

    edges: Tuple[int, ...] = ()
    rejected: bool = False

    def ids(self, instance: Instance) -> List[str]:
        return [instance.edges[f].id for f in self.edges]

    def __len__(self) -> int:
        return len(self.edges)


REJECT = ProbePlan((), True)


@dataclass
class DispatchState:
    remaining: List[int]
    matched: List[int]
    t: int = 0

    @classmethod
    def start(cls, instance: Instance) -> "DispatchState":
        return cls([d.capacity for d in instance.drivers], [0] * len(instance.drivers))

    def copy(self) -> "DispatchState":
        return DispatchState(list(self.remaining), list(self.matched), self.t)


def execute_plan(
    plan: ProbePlan,
    instance: Instance,
    state: DispatchState,
    draw,
) -> Tuple[List[Tuple[int, bool]], Optional[int]]:
    """Probe in order, skipping drivers with no capacity left; stop at the first acceptance."""
    outcomes: List[Tuple[int, bool]] = []
    edge_driver = instance.edge_driver
    edges = instance.edges
    for f in plan.edges:
        u = edge_driver[f]
        if state.remaining[u] <= 0:
            continue
        accepted = draw() < edges[f].accept_prob
        outcomes.append((f, accepted))
        if accepted:
            state.remaining[u] -= 1
            state.matched[u] += 1
            return outcomes, f
    return outcomes, None


# ============================================================================
# SR SUBROUTINE
# ============================================================================

def _sr(
    positions: Sequence[int],
    values: Sequence[float],
    edge_driver: Sequence[int],
    remaining: Sequence[int],
    rng: SeededRNG,
    blocked: Optional[Set[int]] = None,
) -> List[int]:
    bits = round_values(values, rng.random)
    chosen = [positions[k] for k, bit in enumerate(bits) if bit]
    # Shuffling only the selected edges gives the same order law as permuting all of E_v.
    if len(chosen) > 1:
        rng.shuffle(chosen)
    return [
        f
        for f in chosen
        if remaining[edge_driver[f]] > 0 and (not blocked or edge_driver[f] not in blocked)
    ]


def _rider_pos(instance: Instance, rider: Union[int, str]) -> int:
    if isinstance(rider, str):
        return instance.rider_index[rider]
    return int(rider)


def sr_probe(
    instance: Instance,
    rider: Union[int, str],
    z: Union[FractionalVector, Mapping[str, float]],
    remaining: Sequence[int],
    rng: SeededRNG,
    blocked: Optional[Set[int]] = None,
) -> ProbePlan:
    """Dependent rounding of z, then the selected edges in uniformly random order.

    Edges whose driver has no remaining capacity (or is blocked) are dropped.
    """
    v = _rider_pos(instance, rider)
    if not isinstance(z, FractionalVector):
        z = FractionalVector.from_mapping(z)
    incident = {instance.edges[f].id: f for f in instance.edges_of_rider[v]}
    stray = [key for key in z.keys if key not in incident]
    if stray:
        raise InvalidParameterError(f"edges {stray} are not incident to rider {instance.riders[v].id}")
    patience = instance.riders[v].patience
    if z.total > patience + 1e-9:
        raise InvalidParameterError(f"fractional mass {z.total:.6g} exceeds patience {patience}")
    positions = [incident[key] for key in z.keys]
    return ProbePlan(tuple(_sr(positions, z.values, instance.edge_driver, remaining, rng, blocked)))


# ============================================================================
# POLICIES
# ============================================================================

@dataclass(frozen=True)
class RiderVectors:
    """Compiled per-rider scaled solution: positive entries only, as edge positions."""

    positions: Tuple[Tuple[int, ...], ...]
    values: Tuple[Tuple[float, ...], ...]

    @classmethod
    def compile(cls, instance: Instance, scaled: ScaledSolution) -> "RiderVectors":
        positions, values = [], []
        for v, rider in enumerate(instance.riders):
            entries = scaled.per_rider.get(rider.id)
            if entries is None:
                raise InvalidParameterError(f"missing scaled solution for rider {rider.id}")
            pos, val = [], []
            for eid, value in entries.items():
                f = instance.edge_index.get(eid)
                if f is None or instance.edge_rider[f] != v:
                    raise InvalidParameterError(f"edge {eid} is not incident to rider {rider.id}")
                if value > 0.0:
                    pos.append(f)
                    val.append(value)
            positions.append(tuple(pos))
            values.append(tuple(val))
        return cls(tuple(positions), tuple(values))


def _branch(rng: SeededRNG, alpha: float, beta: float) -> Optional[int]:
    draw = rng.random()
    if draw < alpha:
        return X_BRANCH
    if draw < alpha + beta:
        return Y_BRANCH
    return None


class Policy(ABC):
    """Shared interface consumed by the simulator."""

    def __init__(self, instance: Instance, config: PolicyConfig):
        self.instance = instance
        self.config = config

    @property
    def label(self) -> str:
        return self.config.label

    def ensure_ready(self) -> None:
        pass

    @abstractmethod
    def plan(self, rider: int, t: int, state: DispatchState, rng: SeededRNG) -> ProbePlan:
        ...


class WarmUpPolicy(Policy):
    """With probability alpha run SR(x^v), with beta run SR(y^v), otherwise reject."""

    def __init__(self, instance: Instance, config: PolicyConfig, scaled_x: ScaledSolution, scaled_y: ScaledSolution):
        super().__init__(instance, config)
        if scaled_x is None or scaled_y is None:
            raise InvalidParameterError("WarmUp needs both scaled LP solutions")
        self.vectors = (RiderVectors.compile(instance, scaled_x), RiderVectors.compile(instance, scaled_y))

    def plan(self, rider: int, t: int, state: DispatchState, rng: SeededRNG) -> ProbePlan:
        branch = _branch(rng, self.config.alpha, self.config.beta)
        if branch is None:
            return REJECT
        vec = self.vectors[branch]
        return ProbePlan(
            tuple(_sr(vec.positions[rider], vec.values[rider], self.instance.edge_driver, state.remaining, rng))
        )


class GreedyPolicy(Policy):
    """Greedy-P: highest w*p first. Greedy-F: lowest current match rate first. Ties by edge id."""

    def __init__(self, instance: Instance, config: PolicyConfig):
        super().__init__(instance, config)
        if config.kind not in GREEDY_KINDS:
            raise InvalidParameterError(f"not a greedy kind: {config.kind.value}")
        edges = instance.edges
        self._profit_order = tuple(
            tuple(sorted(incident, key=lambda f: (-edges[f].weight * edges[f].accept_prob, edges[f].id)))
            for incident in instance.edges_of_rider
        )

    def plan(self, rider: int, t: int, state: DispatchState, rng: Optional[SeededRNG] = None) -> ProbePlan:
        instance = self.instance
        edge_driver = instance.edge_driver
        if self.config.kind is PolicyKind.GREEDY_P:
            ordered = self._profit_order[rider]
        else:
            # Match counts only change on an accepted probe, which ends the round, so one sort is exact.
            edges, drivers = instance.edges, instance.drivers
            ordered = sorted(
                instance.edges_of_rider[rider],
                key=lambda f: (state.matched[edge_driver[f]] / drivers[edge_driver[f]].capacity, edges[f].id),
            )
        chosen = [f for f in ordered if state.remaining[edge_driver[f]] > 0][: instance.riders[rider].patience]
        return ProbePlan(tuple(chosen)) if chosen else REJECT


# ============================================================================
# ATTENUATION
# ============================================================================

ATTENUATION_COLUMNS = ["kind", "id", "t", "estimate", "stderr", "keep_factor"]
_EDGE_KINDS = ("edge_x", "edge_y")

# Fixed-point passes for edge keep-factors within one round
MAX_KEEP_ITERATIONS = 100
KEEP_TOL = 1e-10


@dataclass(eq=False)
class AttenuationTable:
    """Per-round estimates and keep-factors; row t-1 holds round t.

    vertex_*: (T, U) arrays. edge_*: (2, T, E) arrays, branch x first.
    Missing estimates are NaN with keep-factor 1.
    """

    driver_ids: Tuple[str, ...]
    edge_ids: Tuple[str, ...]
    vertex_estimate: np.ndarray
    vertex_stderr: np.ndarray
    vertex_keep: np.ndarray
    edge_estimate: np.ndarray
    edge_stderr: np.ndarray
    edge_keep: np.ndarray

    @property
    def horizon(self) -> int:
        return self.vertex_keep.shape[0]

    @classmethod
    def empty(cls, instance: Instance) -> "AttenuationTable":
        T, U, E = instance.horizon, len(instance.drivers), len(instance.edges)
        return cls(
            tuple(d.id for d in instance.drivers),
            tuple(e.id for e in instance.edges),
            np.full((T, U), np.nan),
            np.full((T, U), np.nan),
            np.ones((T, U)),
            np.full((2, T, E), np.nan),
            np.full((2, T, E), np.nan),
            np.ones((2, T, E)),
        )

    def check(self, instance: Instance) -> None:
        if self.driver_ids != tuple(d.id for d in instance.drivers) or self.edge_ids != tuple(
            e.id for e in instance.edges
        ):
            raise CalibrationError("attenuation table was built for a different instance")
        if self.horizon < instance.horizon:
            raise CalibrationError(f"attenuation table covers {self.horizon} rounds, horizon is {instance.horizon}")

    def to_frame(self) -> pd.DataFrame:
        T = self.horizon
        parts = []
        rounds = np.repeat(np.arange(1, T + 1), len(self.driver_ids))
        parts.append(
            pd.DataFrame(
                {
                    "kind": "vertex",
                    "id": np.tile(self.driver_ids, T) if self.driver_ids else [],
                    "t": rounds,
                    "estimate": self.vertex_estimate.ravel(),
                    "stderr": self.vertex_stderr.ravel(),
                    "keep_factor": self.vertex_keep.ravel(),
                }
            )
        )
        rounds = np.repeat(np.arange(1, T + 1), len(self.edge_ids))
        for b, kind in enumerate(_EDGE_KINDS):
            parts.append(
                pd.DataFrame(
                    {
                        "kind": kind,
                        "id": np.tile(self.edge_ids, T) if self.edge_ids else [],
                        "t": rounds,
                        "estimate": self.edge_estimate[b].ravel(),
                        "stderr": self.edge_stderr[b].ravel(),
                        "keep_factor": self.edge_keep[b].ravel(),
                    }
                )
            )
        return pd.concat(parts, ignore_index=True)[ATTENUATION_COLUMNS]

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, instance: Instance) -> "AttenuationTable":
        table = cls.empty(instance)
        d_pos = instance.driver_index
        e_pos = instance.edge_index
        for rec in frame.itertuples(index=False):
            t = int(rec.t) - 1
            if not 0 <= t < table.horizon:
                raise CalibrationError(f"round {rec.t} outside horizon {table.horizon}")
            if rec.kind == "vertex":
                u = d_pos[rec.id]
                table.vertex_estimate[t, u], table.vertex_stderr[t, u] = rec.estimate, rec.stderr
                table.vertex_keep[t, u] = rec.keep_factor
            elif rec.kind in _EDGE_KINDS:
                b, f = _EDGE_KINDS.index(rec.kind), e_pos[rec.id]
                table.edge_estimate[b, t, f], table.edge_stderr[b, t, f] = rec.estimate, rec.stderr
                table.edge_keep[b, t, f] = rec.keep_factor
            else:
                raise CalibrationError(f"unknown attenuation row kind {rec.kind!r}")
        return table

    def save_csv(self, path: Union[str, Path]) -> None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path, index=False)

    @classmethod
    def load_csv(cls, path: Union[str, Path], instance: Instance) -> "AttenuationTable":
        return cls.from_frame(pd.read_csv(path, dtype={"id": str}), instance)


class AttenAlgPolicy(Policy):
    """WarmUp after vertex and edge attenuation; needs a unit-capacity instance and a calibrated table."""

    def __init__(
        self,
        instance: Instance,
        config: PolicyConfig,
        scaled_x: ScaledSolution,
        scaled_y: ScaledSolution,
        schedule: Optional[Schedule] = None,
        table: Optional[AttenuationTable] = None,
    ):
        super().__init__(instance, config)
        if not instance.is_unit_capacity:
            raise CalibrationError("AttenAlg runs on unit-capacity instances; apply to_unit_capacity first")
        if scaled_x is None or scaled_y is None:
            raise InvalidParameterError("AttenAlg needs both scaled LP solutions")
        self.vectors = (RiderVectors.compile(instance, scaled_x), RiderVectors.compile(instance, scaled_y))
        self.schedule = schedule or make_schedule(instance.horizon)
        self.table: Optional[AttenuationTable] = None
        self._vkeep: List[List[float]] = []
        self._ekeep: Tuple[List[List[float]], List[List[float]]] = ([], [])
        if table is not None:
            self.install(table)

    def install(self, table: AttenuationTable) -> None:
        table.check(self.instance)
        self.table = table
        self._vkeep = table.vertex_keep.tolist()
        self._ekeep = (table.edge_keep[X_BRANCH].tolist(), table.edge_keep[Y_BRANCH].tolist())

    def calibrate(self, progress: bool = False) -> AttenuationTable:
        table = calibrate_attenuation(self.instance, self, progress=progress)
        self.install(table)
        return table

    def ensure_ready(self) -> None:
        if self.table is None:
            raise CalibrationError("AttenAlg policy used before calibration")

    def plan(self, rider: int, t: int, state: DispatchState, rng: SeededRNG) -> ProbePlan:
        if t > len(self._vkeep):
            raise CalibrationError(f"no attenuation rows for round {t}")
        edge_driver = self.instance.edge_driver
        remaining = state.remaining

        vkeep = self._vkeep[t - 1]
        blocked: Set[int] = set()
        seen: Set[int] = set()
        for f in self.instance.edges_of_rider[rider]:
            u = edge_driver[f]
            if u in seen or remaining[u] <= 0:
                continue
            seen.add(u)
            keep = vkeep[u]
            if keep < 1.0 and rng.random() >= keep:
                blocked.add(u)

        branch = _branch(rng, self.config.alpha, self.config.beta)
        if branch is None:
            return REJECT
        vec = self.vectors[branch]
        emitted = _sr(vec.positions[rider], vec.values[rider], edge_driver, remaining, rng, blocked)
        ekeep = self._ekeep[branch][t - 1]
        kept = [f for f in emitted if ekeep[f] >= 1.0 or rng.random() < ekeep[f]]
        return ProbePlan(tuple(kept))


def calibrate_attenuation(
    instance: Instance,
    policy: AttenAlgPolicy,
    progress: bool = False,
) -> AttenuationTable:
    """Fill keep-factors round by round from simulated prefixes of the policy itself.

    For round t, S = attenuation_samples trajectories advanced with the rows
    already fixed for rounds < t give the availability estimate a(u,t) and,
    per branch, the probability p(f,t) that probing reaches edge f given its
    driver is open (unmatched and not blocked). Reaching f depends on the keep
    coins of the edges ahead of it, so the edge keep-factors min(1, mu_t z_f / p)
    are iterated to a fixed point over the tallied SR orders of the round.
    Vertex keep-factors are min(1, gamma_t / a); an estimate of 0 keeps everything.
    """
    if not instance.is_unit_capacity:
        raise CalibrationError("calibration needs a unit-capacity instance")
    config, schedule = policy.config, policy.schedule
    S, T = config.attenuation_samples, instance.horizon
    U, E = len(instance.drivers), len(instance.edges)
    edge_driver = np.array(instance.edge_driver, dtype=int)
    accept = [e.accept_prob for e in instance.edges]
    active_riders = [v for v, r in enumerate(instance.riders) if r.arrival_rate > 0]
    targets = np.zeros((2, E))
    for b, vec in enumerate(policy.vectors):
        for pos, val in zip(vec.positions, vec.values):
            targets[b, list(pos)] = val

    rng = stream(config.seed, 0, "calibration")
    table = AttenuationTable.empty(instance)
    policy._vkeep, policy._ekeep = [], ([], [])
    states = [DispatchState.start(instance) for _ in range(S)]
    cumulative = instance.cumulative_rates
    total_rate = cumulative[-1] if cumulative else 0.0

    rounds = tqdm(range(1, T + 1), desc="calibrate", disable=not progress)
    for t in rounds:
        open_now = np.array([[st.remaining[u] > 0 for u in range(U)] for st in states], dtype=bool).reshape(S, U)
        a_hat = open_now.mean(axis=0)
        gamma = schedule.gamma[t - 1]
        vkeep = np.where(a_hat > 0, np.minimum(1.0, gamma / np.where(a_hat > 0, a_hat, 1.0)), 1.0)
        table.vertex_estimate[t - 1] = a_hat
        table.vertex_stderr[t - 1] = np.sqrt(a_hat * (1.0 - a_hat) / S)
        table.vertex_keep[t - 1] = vkeep
        policy._vkeep.append(vkeep.tolist())

        tallies: Tuple[Counter, Counter] = (Counter(), Counter())
        counts = np.zeros(E)
        for st in states:
            blocked = {u for u in range(U) if st.remaining[u] > 0 and vkeep[u] < 1.0 and rng.random() >= vkeep[u]}
            open_mask = np.array([st.remaining[u] > 0 and u not in blocked for u in range(U)], dtype=bool)
            if E:
                counts += open_mask[edge_driver]
            for v in active_riders:
                for b, vec in enumerate(policy.vectors):
                    if not vec.positions[v]:
                        continue
                    order = tuple(_sr(vec.positions[v], vec.values[v], instance.edge_driver, st.remaining, rng, blocked))
                    if order:
                        tallies[b][order] += 1

        target = schedule.mu[t - 1] * targets
        ekeep = np.ones((2, E))
        for _ in range(MAX_KEEP_ITERATIONS):
            p_hat, stderr = _reach_estimates(tallies, ekeep, accept, counts)
            with np.errstate(invalid="ignore", divide="ignore"):
                updated = np.where(p_hat > 0, np.minimum(1.0, target / p_hat), 1.0)
            updated = np.nan_to_num(updated, nan=1.0)
            converged = bool(np.all(np.abs(updated - ekeep) <= KEEP_TOL))
            ekeep = updated
            if converged:
                break
        else:
            logger.warning("edge keep-factors for round %d did not settle in %d passes", t, MAX_KEEP_ITERATIONS)
        table.edge_estimate[:, t - 1] = p_hat
        table.edge_stderr[:, t - 1] = stderr
        table.edge_keep[:, t - 1] = ekeep
        policy._ekeep[X_BRANCH].append(ekeep[X_BRANCH].tolist())
        policy._ekeep[Y_BRANCH].append(ekeep[Y_BRANCH].tolist())

        if t < T and total_rate > 0:
            for st in states:
                rider = _sample_rider(cumulative, total_rate, rng.random())
                plan = policy.plan(rider, t, st, rng)
                execute_plan(plan, instance, st, rng.random)
        logger.debug("calibrated round %d/%d", t, T)

    logger.info("Calibrated attenuation over %d rounds with %d samples", T, S)
    return table


def _reach_estimates(
    tallies: Tuple[Counter, Counter],
    keep: np.ndarray,
    accept: Sequence[float],
    counts: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """Mean and stderr, per branch and edge, of the chance that probing reaches f.

    An earlier edge g in the SR order stops the plan with probability
    keep_g * p_g. Means are over trajectories with f's driver open; NaN where
    there are none.
    """
    sums = np.zeros(keep.shape)
    squares = np.zeros(keep.shape)
    for b, tally in enumerate(tallies):
        for order, n in tally.items():
            reach = 1.0
            for f in order:
                sums[b, f] += n * reach
                squares[b, f] += n * reach * reach
                reach *= 1.0 - keep[b, f] * accept[f]
    safe = np.where(counts > 0, counts, 1.0)
    mean = np.where(counts > 0, sums / safe, np.nan)
    second = np.where(counts > 0, squares / safe, np.nan)
    stderr = np.sqrt(np.maximum(second - mean**2, 0.0) / safe)
    return mean, stderr


def _sample_rider(cumulative: Sequence[float], total: float, u: float) -> int:
    k = bisect_right(cumulative, u * total)
    return min(k, len(cumulative) - 1)


# ============================================================================
# OPERATION ENTRY POINTS
# ============================================================================

def warmup_step(
    instance: Instance,
    rider: Union[int, str],
    scaled_x: ScaledSolution,
    scaled_y: ScaledSolution,
    config: PolicyConfig,
    state: DispatchState,
    rng: SeededRNG,
) -> ProbePlan:
    if config.kind is not PolicyKind.WARMUP:
        raise InvalidParameterError(f"warmup_step needs kind warmup, got {config.kind.value}")
    return WarmUpPolicy(instance, config, scaled_x, scaled_y).plan(_rider_pos(instance, rider), state.t, state, rng)


def attenalg_step(
    instance: Instance,
    rider: Union[int, str],
    t: int,
    scaled_x: ScaledSolution,
    scaled_y: ScaledSolution,
    config: PolicyConfig,
    schedule: Schedule,
    table: Optional[AttenuationTable],
    state: DispatchState,
    rng: SeededRNG,
) -> ProbePlan:
    if table is None:
        raise CalibrationError("attenalg_step needs a calibrated attenuation table")
    policy = AttenAlgPolicy(instance, config, scaled_x, scaled_y, schedule, table)
    return policy.plan(_rider_pos(instance, rider), t, state, rng)


def greedy_step(instance: Instance, rider: Union[int, str], kind: PolicyKind, state: DispatchState) -> ProbePlan:
    return GreedyPolicy(instance, PolicyConfig(kind=kind)).plan(_rider_pos(instance, rider), state.t, state)


def build_policy(
    instance: Instance,
    config: PolicyConfig,
    benchmarks: Optional[Benchmarks] = None,
    *,
    table: Optional[AttenuationTable] = None,
    progress: bool = False,
) -> Policy:
    """Policy for ``config`` on ``instance``, solving LPs and calibrating when needed."""
    if config.kind in GREEDY_KINDS:
        return GreedyPolicy(instance, config)

    benchmarks = benchmarks or solve_benchmarks(instance)
    scaled_x = scale_per_arrival(instance, benchmarks.profit)
    scaled_y = scale_per_arrival(instance, benchmarks.fairness)
    if config.kind is PolicyKind.WARMUP:
        return WarmUpPolicy(instance, config, scaled_x, scaled_y)

    policy = AttenAlgPolicy(instance, config, scaled_x, scaled_y, table=table)
    if table is None:
        policy.calibrate(progress=progress)
    return policy


def enumerate_plans(policy: Policy, rider: int, t: int, state: DispatchState) -> List[Tuple[ProbePlan, float]]:
    """Exact distribution of the plan issued for ``rider`` in ``state``."""
    if isinstance(policy, GreedyPolicy):
        return [(policy.plan(rider, t, state), 1.0)]
    if not isinstance(policy, WarmUpPolicy):
        raise InvalidParameterError(f"no exact plan enumeration for {policy.label}")

    edge_driver = policy.instance.edge_driver
    merged: Dict[ProbePlan, float] = {}
    alpha, beta = policy.config.alpha, policy.config.beta
    for weight, vec in ((alpha, policy.vectors[X_BRANCH]), (beta, policy.vectors[Y_BRANCH])):
        if weight <= 0.0:
            continue
        positions = vec.positions[rider]
        z = FractionalVector(tuple(zip(positions, vec.values[rider])))
        for outcome, p in rounding_distribution(z):
            chosen = outcome.ones
            orders = list(permutations(chosen)) or [()]
            share = weight * p / len(orders)
            for order in orders:
                plan = ProbePlan(tuple(f for f in order if state.remaining[edge_driver[f]] > 0))
                merged[plan] = merged.get(plan, 0.0) + share
    residual = 1.0 - alpha - beta
    if residual > 1e-15:
        merged[REJECT] = merged.get(REJECT, 0.0) + residual
    return sorted(merged.items(), key=lambda item: (item[0].rejected, item[0].edges))
