"""
fairdispatch - Monte Carlo simulator
Online KIID arrivals, sequential probing with acceptance coins, metrics and an exact-expectation oracle
"""

import json
import logging
import math
from bisect import bisect_right
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

from .exceptions import EnumerationBoundsError, InvalidParameterError, SimulationInvariantError
from .instance import Instance, to_unit_capacity
from .lp import Benchmarks, solve_benchmarks
from .policies import (
    DispatchState,
    Policy,
    PolicyConfig,
    PolicyKind,
    ProbePlan,
    build_policy,
    enumerate_plans,
    execute_plan,
)
from .rng import stream
from .settings import TRIAL_BLOCK

logger = logging.getLogger(__name__)

METRICS_COLUMNS = [
    "policy",
    "alpha",
    "beta",
    "B",
    "n_trials",
    "profit_mean",
    "profit_stderr",
    "profit_ratio",
    "fairness",
    "fairness_stderr",
    "fairness_ratio",
    "seed",
]
EXTRA_COLUMNS = ["profit_ratio_stderr", "fairness_ratio_stderr", "min_rate_mean"]

EXACT_MAX_HORIZON = 6
EXACT_MAX_RIDERS = 3
EXACT_MAX_DEGREE = 3


# ============================================================================
# RECORDS
# ============================================================================

@dataclass(frozen=True)
class RoundLog:
    t: int
    rider: str
    probes: Tuple[str, ...]
    accepted: Tuple[bool, ...]
    match: Optional[str]


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    matched: Tuple[int, ...]
    profit: float
    edge_matches: Tuple[int, ...]
    rounds: Tuple[RoundLog, ...] = ()
    availability: Optional[Tuple[Tuple[bool, ...], ...]] = None

    def to_dict(self, instance: Instance) -> Dict[str, Any]:
        return {
            "trial": self.trial_index,
            "profit": self.profit,
            "matched": {d.id: m for d, m in zip(instance.drivers, self.matched)},
            "rounds": [asdict(r) for r in self.rounds],
        }


@dataclass(frozen=True)
class DriverGroups:
    """Original driver types as groups of simulated drivers (identity unless reduced to unit capacity)."""

    ids: Tuple[str, ...]
    capacity: Tuple[int, ...]
    members: Tuple[Tuple[int, ...], ...]

    @classmethod
    def identity(cls, instance: Instance) -> "DriverGroups":
        return cls(
            tuple(d.id for d in instance.drivers),
            tuple(d.capacity for d in instance.drivers),
            tuple((k,) for k in range(len(instance.drivers))),
        )

    @classmethod
    def from_reduction(cls, original: Instance, expanded: Instance, mapping: Mapping[str, str]) -> "DriverGroups":
        members: Dict[str, List[int]] = {d.id: [] for d in original.drivers}
        for k, d in enumerate(expanded.drivers):
            members[mapping[d.id]].append(k)
        return cls(
            tuple(d.id for d in original.drivers),
            tuple(d.capacity for d in original.drivers),
            tuple(tuple(members[d.id]) for d in original.drivers),
        )

    def fold(self, matched: np.ndarray) -> np.ndarray:
        """(n, U_sim) counts -> (n, U_orig) counts."""
        if not self.ids:
            return np.zeros((matched.shape[0], 0))
        return np.stack([matched[:, list(m)].sum(axis=1) if m else np.zeros(matched.shape[0]) for m in self.members], axis=1)


# ============================================================================
# SINGLE TRIAL
# ============================================================================

def _sample_rider(cumulative: Sequence[float], draw: float) -> int:
    k = bisect_right(cumulative, draw * cumulative[-1])
    return min(k, len(cumulative) - 1)


def _check_plan(instance: Instance, rider: int, plan: ProbePlan) -> None:
    patience = instance.riders[rider].patience
    if len(plan.edges) > patience:
        raise SimulationInvariantError(f"plan for {instance.riders[rider].id} has {len(plan.edges)} probes > {patience}")
    if len(set(plan.edges)) != len(plan.edges):
        raise SimulationInvariantError(f"plan for {instance.riders[rider].id} repeats an edge")
    for f in plan.edges:
        if instance.edge_rider[f] != rider:
            raise SimulationInvariantError(f"edge {instance.edges[f].id} is not incident to {instance.riders[rider].id}")


def run_trial(
    instance: Instance,
    policy: Policy,
    master_seed: int,
    trial_index: int,
    *,
    common_arrivals: bool = False,
    record_rounds: bool = True,
    track_availability: bool = False,
) -> TrialRecord:
    """One pass over rounds 1..T with separate arrival, policy and acceptance streams."""
    policy.ensure_ready()
    label = policy.label
    arrivals = stream(master_seed, trial_index, "arrivals" if common_arrivals else f"arrivals/{label}")
    policy_rng = stream(master_seed, trial_index, f"policy/{label}")
    coins = stream(master_seed, trial_index, f"acceptance/{label}")

    state = DispatchState.start(instance)
    cumulative = instance.cumulative_rates
    edges = instance.edges
    profit = 0.0
    matches: List[int] = []
    rounds: List[RoundLog] = []
    availability: List[Tuple[bool, ...]] = []

    for t in range(1, instance.horizon + 1):
        state.t = t
        if track_availability:
            availability.append(tuple(r > 0 for r in state.remaining))
        if not cumulative or cumulative[-1] <= 0:
            continue
        v = _sample_rider(cumulative, arrivals.random())
        plan = policy.plan(v, t, state, policy_rng)
        _check_plan(instance, v, plan)
        outcomes, matched = execute_plan(plan, instance, state, coins.random)
        if matched is not None:
            profit += edges[matched].weight
            matches.append(matched)
        if record_rounds:
            rounds.append(
                RoundLog(
                    t,
                    instance.riders[v].id,
                    tuple(edges[f].id for f, _ in outcomes),
                    tuple(ok for _, ok in outcomes),
                    edges[matched].id if matched is not None else None,
                )
            )

    for d, m, r in zip(instance.drivers, state.matched, state.remaining):
        if m > d.capacity or r < 0:
            raise SimulationInvariantError(f"driver {d.id} matched {m} times with capacity {d.capacity}")
    if not math.isclose(profit, math.fsum(edges[f].weight for f in matches), abs_tol=1e-9):
        raise SimulationInvariantError("realized profit differs from the matched edge weights")

    return TrialRecord(
        trial_index,
        tuple(state.matched),
        profit,
        tuple(matches),
        tuple(rounds),
        tuple(availability) if track_availability else None,
    )


# ============================================================================
# METRICS
# ============================================================================

@dataclass(frozen=True)
class Metrics:
    label: str
    kind: str
    alpha: float
    beta: float
    n_trials: int
    seed: int
    profit_mean: float
    profit_stderr: float
    profit_ratio: float
    profit_ratio_stderr: float
    fairness: float
    fairness_stderr: float
    fairness_ratio: float
    fairness_ratio_stderr: float
    fairness_driver: Optional[str]
    min_rate_mean: float
    driver_rates: Dict[str, float] = field(default_factory=dict)
    driver_rate_stderr: Dict[str, float] = field(default_factory=dict)
    driver_matches: Dict[str, float] = field(default_factory=dict)
    driver_match_stderr: Dict[str, float] = field(default_factory=dict)
    edge_matches: Dict[str, float] = field(default_factory=dict)
    availability: Optional[np.ndarray] = None
    availability_stderr: Optional[np.ndarray] = None

    def as_row(self, B: Optional[int] = None) -> Dict[str, Any]:
        return {
            "policy": self.kind,
            "alpha": self.alpha,
            "beta": self.beta,
            "B": B,
            "n_trials": self.n_trials,
            "profit_mean": self.profit_mean,
            "profit_stderr": self.profit_stderr,
            "profit_ratio": self.profit_ratio,
            "fairness": self.fairness,
            "fairness_stderr": self.fairness_stderr,
            "fairness_ratio": self.fairness_ratio,
            "seed": self.seed,
            "profit_ratio_stderr": self.profit_ratio_stderr,
            "fairness_ratio_stderr": self.fairness_ratio_stderr,
            "min_rate_mean": self.min_rate_mean,
        }


def _mean_stderr(samples: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n = samples.shape[0]
    mean = samples.mean(axis=0)
    if n < 2:
        return mean, np.zeros_like(mean, dtype=float)
    return mean, samples.std(axis=0, ddof=1) / math.sqrt(n)


def _ratio(value: float, stderr: float, opt: float, name: str) -> Tuple[float, float]:
    if opt > 0:
        return value / opt, stderr / opt
    if value > 0:
        logger.warning("%s ratio undefined: LP optimum is 0 but achieved %.6g", name, value)
        return math.nan, math.nan
    return 0.0, 0.0


@dataclass
class _Block:
    profits: np.ndarray
    matched: np.ndarray
    edge_counts: np.ndarray
    availability: Optional[np.ndarray]


def _run_block(args) -> _Block:
    instance, policy, master_seed, start, stop, common_arrivals, track_availability = args
    n, U, E = stop - start, len(instance.drivers), len(instance.edges)
    profits = np.zeros(n)
    matched = np.zeros((n, U), dtype=np.int64)
    edge_counts = np.zeros(E, dtype=np.int64)
    availability = np.zeros((instance.horizon, U), dtype=np.int64) if track_availability else None
    for k, trial in enumerate(range(start, stop)):
        record = run_trial(
            instance,
            policy,
            master_seed,
            trial,
            common_arrivals=common_arrivals,
            record_rounds=False,
            track_availability=track_availability,
        )
        profits[k] = record.profit
        matched[k] = record.matched
        for f in record.edge_matches:
            edge_counts[f] += 1
        if availability is not None:
            availability += np.array(record.availability, dtype=np.int64).reshape(instance.horizon, U)
    return _Block(profits, matched, edge_counts, availability)


def monte_carlo(
    instance: Instance,
    policy: Policy,
    n_trials: int,
    master_seed: int,
    lp_profit_opt: float,
    lp_fairness_opt: float,
    *,
    jobs: int = 1,
    driver_groups: Optional[DriverGroups] = None,
    common_arrivals: bool = False,
    track_availability: bool = False,
    progress: bool = False,
) -> Metrics:
    """Aggregate n_trials independent trials.

    Trials run in blocks; blocks are folded in index order so serial and
    parallel runs give identical Metrics.
    """
    if n_trials < 1:
        raise InvalidParameterError(f"n_trials must be positive, got {n_trials}")
    policy.ensure_ready()
    groups = driver_groups or DriverGroups.identity(instance)
    tasks = [
        (instance, policy, master_seed, start, min(start + TRIAL_BLOCK, n_trials), common_arrivals, track_availability)
        for start in range(0, n_trials, TRIAL_BLOCK)
    ]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            blocks = list(tqdm(pool.map(_run_block, tasks), total=len(tasks), desc=policy.label, disable=not progress))
    else:
        blocks = [_run_block(task) for task in tqdm(tasks, desc=policy.label, disable=not progress)]
    logger.debug("%s: %d blocks finished", policy.label, len(blocks))

    profits = np.concatenate([b.profits for b in blocks])
    matched = groups.fold(np.concatenate([b.matched for b in blocks]).astype(float))
    capacity = np.array(groups.capacity, dtype=float)
    rates = matched / capacity if capacity.size else matched

    profit_mean, profit_stderr = _mean_stderr(profits)
    match_mean, match_stderr = _mean_stderr(matched)
    rate_mean, rate_stderr = _mean_stderr(rates)
    if rate_mean.size:
        worst = int(np.argmin(rate_mean))
        fairness, fairness_stderr, fairness_driver = float(rate_mean[worst]), float(rate_stderr[worst]), groups.ids[worst]
        min_rate_mean = float(rates.min(axis=1).mean())
    else:
        fairness, fairness_stderr, fairness_driver, min_rate_mean = 0.0, 0.0, None, 0.0

    profit_ratio, profit_ratio_stderr = _ratio(float(profit_mean), float(profit_stderr), lp_profit_opt, "profit")
    fairness_ratio, fairness_ratio_stderr = _ratio(fairness, fairness_stderr, lp_fairness_opt, "fairness")

    edge_counts = np.sum([b.edge_counts for b in blocks], axis=0)
    avail_mean = avail_stderr = None
    if track_availability:
        counts = np.sum([b.availability for b in blocks], axis=0)
        avail_mean = counts / n_trials
        avail_stderr = np.sqrt(avail_mean * (1.0 - avail_mean) / max(n_trials - 1, 1))

    config = policy.config
    metrics = Metrics(
        label=policy.label,
        kind=config.kind.value,
        alpha=config.alpha if config.kind in (PolicyKind.WARMUP, PolicyKind.ATTENALG) else math.nan,
        beta=config.beta if config.kind in (PolicyKind.WARMUP, PolicyKind.ATTENALG) else math.nan,
        n_trials=n_trials,
        seed=master_seed,
        profit_mean=float(profit_mean),
        profit_stderr=float(profit_stderr),
        profit_ratio=profit_ratio,
        profit_ratio_stderr=profit_ratio_stderr,
        fairness=fairness,
        fairness_stderr=fairness_stderr,
        fairness_ratio=fairness_ratio,
        fairness_ratio_stderr=fairness_ratio_stderr,
        fairness_driver=fairness_driver,
        min_rate_mean=min_rate_mean,
        driver_rates=dict(zip(groups.ids, rate_mean.tolist())),
        driver_rate_stderr=dict(zip(groups.ids, rate_stderr.tolist())),
        driver_matches=dict(zip(groups.ids, match_mean.tolist())),
        driver_match_stderr=dict(zip(groups.ids, match_stderr.tolist())),
        edge_matches={e.id: c / n_trials for e, c in zip(instance.edges, np.asarray(edge_counts).tolist())},
        availability=avail_mean,
        availability_stderr=avail_stderr,
    )
    logger.info(
        "%s: profit %.4f (ratio %.4f), fairness %.4f (ratio %.4f) over %d trials",
        policy.label,
        metrics.profit_mean,
        metrics.profit_ratio,
        metrics.fairness,
        metrics.fairness_ratio,
        n_trials,
    )
    return metrics


def evaluate_policy(
    instance: Instance,
    config: PolicyConfig,
    n_trials: int,
    master_seed: int,
    *,
    benchmarks: Optional[Benchmarks] = None,
    table=None,
    jobs: int = 1,
    common_arrivals: bool = False,
    track_availability: bool = False,
    progress: bool = False,
) -> Metrics:
    """Solve, build (reducing to unit capacity for AttenAlg) and simulate one policy.

    Ratios are taken against the optima of the instance the policy runs on.
    """
    benchmarks = benchmarks or solve_benchmarks(instance)
    target, groups, policy_benchmarks = instance, None, benchmarks
    if config.kind is PolicyKind.ATTENALG and not instance.is_unit_capacity:
        target, mapping = to_unit_capacity(instance)
        groups = DriverGroups.from_reduction(instance, target, mapping)
        policy_benchmarks = solve_benchmarks(target)
        logger.debug(
            "Reduced optima %.6f/%.6f vs original %.6f/%.6f",
            policy_benchmarks.profit_opt,
            policy_benchmarks.fairness_opt,
            benchmarks.profit_opt,
            benchmarks.fairness_opt,
        )
    policy = build_policy(target, config, policy_benchmarks, table=table, progress=progress)
    return monte_carlo(
        target,
        policy,
        n_trials,
        master_seed,
        policy_benchmarks.profit_opt,
        policy_benchmarks.fairness_opt,
        jobs=jobs,
        driver_groups=groups,
        common_arrivals=common_arrivals,
        track_availability=track_availability,
        progress=progress,
    )


# ============================================================================
# EXACT ORACLE
# ============================================================================

@dataclass(frozen=True)
class ExactResult:
    profit: float
    driver_matches: Dict[str, float]
    driver_rates: Dict[str, float]

    @property
    def fairness(self) -> float:
        return min(self.driver_rates.values(), default=0.0)


def _check_bounds(instance: Instance) -> None:
    if instance.horizon > EXACT_MAX_HORIZON:
        raise EnumerationBoundsError(f"horizon {instance.horizon} > {EXACT_MAX_HORIZON}")
    if len(instance.riders) > EXACT_MAX_RIDERS:
        raise EnumerationBoundsError(f"{len(instance.riders)} rider types > {EXACT_MAX_RIDERS}")
    widest = max((len(e) for e in instance.edges_of_rider), default=0)
    if widest > EXACT_MAX_DEGREE:
        raise EnumerationBoundsError(f"a rider has {widest} edges > {EXACT_MAX_DEGREE}")


def exact_eval(instance: Instance, config: PolicyConfig, benchmarks: Optional[Benchmarks] = None) -> ExactResult:
    """Exact expectations by enumerating arrivals, plans and acceptance coins.

    Memoized on (round, remaining capacities); match counts are implied by
    the capacities, so that is the whole policy-relevant state.
    """
    _check_bounds(instance)
    if config.kind is PolicyKind.ATTENALG:
        raise InvalidParameterError("exact_eval supports warmup, greedy_p and greedy_f")
    policy = build_policy(instance, config, benchmarks)
    T, U = instance.horizon, len(instance.drivers)
    capacity = tuple(d.capacity for d in instance.drivers)
    arrivals = [(v, instance.arrival_prob(v)) for v in range(len(instance.riders)) if instance.riders[v].arrival_rate > 0]
    edges, edge_driver = instance.edges, instance.edge_driver

    @lru_cache(maxsize=None)
    def expect(t: int, remaining: Tuple[int, ...]) -> Tuple[float, Tuple[float, ...]]:
        if t > T:
            return 0.0, (0.0,) * U
        profit = 0.0
        counts = np.zeros(U)
        for v, q in arrivals:
            state = DispatchState(list(remaining), [b - r for b, r in zip(capacity, remaining)], t)
            for plan, p_plan in enumerate_plans(policy, v, t, state):
                reach = q * p_plan
                for f in plan.edges:
                    u = edge_driver[f]
                    accept = edges[f].accept_prob
                    if remaining[u] <= 0 or reach == 0.0:
                        continue
                    after = list(remaining)
                    after[u] -= 1
                    future_profit, future_counts = expect(t + 1, tuple(after))
                    weight = reach * accept
                    profit += weight * (edges[f].weight + future_profit)
                    counts += weight * np.asarray(future_counts)
                    counts[u] += weight
                    reach *= 1.0 - accept
                if reach > 0.0:
                    future_profit, future_counts = expect(t + 1, remaining)
                    profit += reach * future_profit
                    counts += reach * np.asarray(future_counts)
        return profit, tuple(counts.tolist())

    profit, counts = expect(1, capacity)
    matches = {d.id: c for d, c in zip(instance.drivers, counts)}
    return ExactResult(
        profit=profit,
        driver_matches=matches,
        driver_rates={d.id: matches[d.id] / d.capacity for d in instance.drivers},
    )


# ============================================================================
# EXPORTS
# ============================================================================

def metrics_frame(rows: Iterable[Union[Metrics, Mapping[str, Any]]], B: Optional[int] = None) -> pd.DataFrame:
    records = [r.as_row(B) if isinstance(r, Metrics) else dict(r) for r in rows]
    return pd.DataFrame.from_records(records, columns=METRICS_COLUMNS + EXTRA_COLUMNS)


def write_metrics_csv(rows: Iterable[Union[Metrics, Mapping[str, Any]]], path: Union[str, Path], B: Optional[int] = None) -> pd.DataFrame:
    frame = metrics_frame(rows, B)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False)
    logger.info("Wrote %d metrics rows to %s", len(frame), path)
    return frame


def write_trial_log(records: Iterable[TrialRecord], instance: Instance, path: Union[str, Path]) -> int:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in records:
            handle.write(json.dumps(record.to_dict(instance)) + "\n")
            count += 1
    return count
