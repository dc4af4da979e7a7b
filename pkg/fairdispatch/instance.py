"""
fairdispatch - Instance model
Driver types, rider types, compatibility edges and the generators that build them
"""

import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from itertools import accumulate
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .exceptions import IngestError, InvalidInstanceError, InvalidParameterError
from .settings import RATE_SUM_TOL

logger = logging.getLogger(__name__)

# ============================================================================
# ENUMS AND CONSTANTS
# ============================================================================

ADVANTAGED = "A"
DISADVANTAGED = "D"
GROUP_PAIRS = ("AA", "AD", "DA", "DD")

# Study area used for trip records
LONGITUDE_RANGE = (-75.0, -73.0)
LATITUDE_RANGE = (40.4, 40.95)

TRIP_COLUMNS = (
    "pickup_datetime",
    "trip_distance",
    "pickup_longitude",
    "pickup_latitude",
    "dropoff_longitude",
    "dropoff_latitude",
)


class Rule(str, Enum):
    UNIQUE_ID = "ids unique"
    CAPACITY = "capacity >= 1"
    ARRIVAL_RATE = "arrival_rate >= 0"
    PATIENCE = "patience >= 1"
    ACCEPT_PROB = "accept_prob in (0,1]"
    WEIGHT = "weight >= 0"
    ENDPOINT = "edge endpoints exist"
    HORIZON = "horizon >= 1"
    RATE_SUM = "sum(arrival_rate) == horizon"
    HAS_EDGES = "rider with positive rate has edges"


# ============================================================================
# DOMAIN TYPES
# ============================================================================

@dataclass(frozen=True)
class DriverType:
    id: str
    capacity: int
    attributes: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class RiderType:
    id: str
    arrival_rate: float
    patience: int
    attributes: Dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class Edge:
    id: str
    driver: str
    rider: str
    accept_prob: float
    weight: float
    # set on unit-capacity copies; copies of one edge share the r_v cap
    origin: Optional[str] = None


@dataclass(frozen=True)
class Violation:
    rule: Rule
    offending_id: str
    message: str

    def __str__(self) -> str:
        return f"[{self.rule.value}] {self.offending_id}: {self.message}"


@dataclass(frozen=True)
class Instance:
    """Compatibility graph plus horizon.

    Index structures are positional and cached; ids are resolved once.
    """

    drivers: Tuple[DriverType, ...]
    riders: Tuple[RiderType, ...]
    edges: Tuple[Edge, ...]
    horizon: int

    def __post_init__(self):
        object.__setattr__(self, "drivers", tuple(self.drivers))
        object.__setattr__(self, "riders", tuple(self.riders))
        object.__setattr__(self, "edges", tuple(self.edges))

    @cached_property
    def driver_index(self) -> Dict[str, int]:
        return {d.id: k for k, d in enumerate(self.drivers)}

    @cached_property
    def rider_index(self) -> Dict[str, int]:
        return {r.id: k for k, r in enumerate(self.riders)}

    @cached_property
    def edge_index(self) -> Dict[str, int]:
        return {e.id: k for k, e in enumerate(self.edges)}

    @cached_property
    def edge_driver(self) -> Tuple[int, ...]:
        return tuple(self.driver_index[e.driver] for e in self.edges)

    @cached_property
    def edge_rider(self) -> Tuple[int, ...]:
        return tuple(self.rider_index[e.rider] for e in self.edges)

    @cached_property
    def edges_of_driver(self) -> Tuple[Tuple[int, ...], ...]:
        buckets: List[List[int]] = [[] for _ in self.drivers]
        for k, u in enumerate(self.edge_driver):
            buckets[u].append(k)
        return tuple(tuple(b) for b in buckets)

    @cached_property
    def edges_of_rider(self) -> Tuple[Tuple[int, ...], ...]:
        buckets: List[List[int]] = [[] for _ in self.riders]
        for k, v in enumerate(self.edge_rider):
            buckets[v].append(k)
        return tuple(tuple(b) for b in buckets)

    @cached_property
    def cumulative_rates(self) -> Tuple[float, ...]:
        return tuple(accumulate(r.arrival_rate for r in self.riders))

    @property
    def total_capacity(self) -> int:
        return sum(d.capacity for d in self.drivers)

    @property
    def is_unit_capacity(self) -> bool:
        return all(d.capacity == 1 for d in self.drivers)

    def arrival_prob(self, rider: int) -> float:
        """q_v = r_v / T"""
        return self.riders[rider].arrival_rate / self.horizon

    def summary(self) -> str:
        return f"|U|={len(self.drivers)} |V|={len(self.riders)} |E|={len(self.edges)} T={self.horizon}"


class GeneratorParams(BaseModel):
    """Parameters shared by the synthetic generator and trip-record ingestion."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    num_driver_types: int = Field(57, gt=0)
    num_rider_types: int = Field(134, gt=0)
    capacity_bound: int = Field(10, gt=0)
    base_accept_probs: Dict[str, float] = Field(
        default_factory=lambda: {"AA": 0.6, "AD": 0.1, "DA": 0.1, "DD": 0.3}
    )
    scale_eta: float = Field(0.5, ge=0.0, le=1.0)
    patience_choices: List[int] = Field(default_factory=lambda: [1, 2])
    rate_mean: float = 5.0
    rate_stddev: float = Field(1.0, ge=0.0)
    grid_rows: int = Field(40, gt=0)
    grid_cols: int = Field(11, gt=0)
    edge_distance_threshold: int = Field(1, ge=0)
    seed: int = Field(2021, ge=0, lt=2**64)
    window_start: str = "16:00"
    window_end: str = "17:00"
    delimiter: str = ","
    ingest_downsample: bool = False

    @field_validator("base_accept_probs")
    @classmethod
    def check_probs(cls, v: Dict[str, float]) -> Dict[str, float]:
        if set(v) != set(GROUP_PAIRS):
            raise ValueError(f"keys must be exactly {list(GROUP_PAIRS)}")
        for key, p in v.items():
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"probability for {key} must lie in [0,1], got {p}")
        return v

    @field_validator("patience_choices")
    @classmethod
    def check_patience(cls, v: List[int]) -> List[int]:
        if not v or any(p < 1 for p in v):
            raise ValueError("patience choices must be a nonempty set of integers >= 1")
        return sorted(set(v))

    @field_validator("window_start", "window_end")
    @classmethod
    def check_clock(cls, v: str) -> str:
        _minutes_of_day(v)
        return v

    def accept_prob(self, driver_group: str, rider_group: str) -> float:
        """p_f = eta + (1 - eta) * base"""
        base = self.base_accept_probs[driver_group + rider_group]
        return self.scale_eta + (1.0 - self.scale_eta) * base


def _minutes_of_day(clock: str) -> int:
    try:
        hours, minutes = clock.split(":")
        h, m = int(hours), int(minutes)
    except ValueError:
        raise ValueError(f"expected HH:MM, got {clock!r}")
    if not (0 <= h <= 24 and 0 <= m < 60) or h * 60 + m > 24 * 60:
        raise ValueError(f"expected HH:MM, got {clock!r}")
    return h * 60 + m


# ============================================================================
# VALIDATION
# ============================================================================

def validate(instance: Instance) -> List[Violation]:
    """Every broken invariant, one entry per offending id. Empty means valid."""
    report: List[Violation] = []

    for kind, items in (("driver", instance.drivers), ("rider", instance.riders), ("edge", instance.edges)):
        seen = set()
        for item in items:
            if item.id in seen:
                report.append(Violation(Rule.UNIQUE_ID, item.id, f"duplicate {kind} id"))
            seen.add(item.id)

    for d in instance.drivers:
        if not (isinstance(d.capacity, (int, np.integer)) and d.capacity >= 1):
            report.append(Violation(Rule.CAPACITY, d.id, f"capacity {d.capacity!r}"))

    for r in instance.riders:
        if not (r.arrival_rate >= 0.0 and math.isfinite(r.arrival_rate)):
            report.append(Violation(Rule.ARRIVAL_RATE, r.id, f"arrival_rate {r.arrival_rate!r}"))
        if not (isinstance(r.patience, (int, np.integer)) and r.patience >= 1):
            report.append(Violation(Rule.PATIENCE, r.id, f"patience {r.patience!r}"))

    driver_ids = {d.id for d in instance.drivers}
    rider_ids = {r.id for r in instance.riders}
    for e in instance.edges:
        if not 0.0 < e.accept_prob <= 1.0:
            report.append(Violation(Rule.ACCEPT_PROB, e.id, f"accept_prob {e.accept_prob!r}"))
        if not (e.weight >= 0.0 and math.isfinite(e.weight)):
            report.append(Violation(Rule.WEIGHT, e.id, f"weight {e.weight!r}"))
        if e.driver not in driver_ids:
            report.append(Violation(Rule.ENDPOINT, e.id, f"unknown driver {e.driver!r}"))
        if e.rider not in rider_ids:
            report.append(Violation(Rule.ENDPOINT, e.id, f"unknown rider {e.rider!r}"))

    if not (isinstance(instance.horizon, (int, np.integer)) and instance.horizon >= 1):
        report.append(Violation(Rule.HORIZON, "horizon", f"horizon {instance.horizon!r}"))
    else:
        total = math.fsum(r.arrival_rate for r in instance.riders)
        if not abs(total - instance.horizon) <= RATE_SUM_TOL:
            report.append(
                Violation(Rule.RATE_SUM, "horizon", f"rates sum to {total!r}, horizon is {instance.horizon}")
            )
    return report


def require_valid(instance: Instance) -> None:
    violations = validate(instance)
    if violations:
        raise InvalidInstanceError(violations)


def isolated_riders(instance: Instance) -> List[str]:
    """Riders with positive rate and no incident edge."""
    return [
        r.id
        for r, incident in zip(instance.riders, instance.edges_of_rider)
        if r.arrival_rate > 0 and not incident
    ]


# ============================================================================
# UNIT-CAPACITY REDUCTION
# ============================================================================

def to_unit_capacity(instance: Instance) -> Tuple[Instance, Dict[str, str]]:
    """Replace each driver type by B_u unit-capacity copies.

    Copy k of driver u is ``u#k``; copy k of edge f is ``f#k`` with
    ``origin`` set to f, so the LP builders cap the copies jointly at r_v and
    both optima carry over. Returns the expanded instance and the
    copy -> original driver id mapping.
    """
    require_valid(instance)
    drivers: List[DriverType] = []
    mapping: Dict[str, str] = {}
    for d in instance.drivers:
        for k in range(d.capacity):
            copy_id = f"{d.id}#{k}"
            drivers.append(DriverType(copy_id, 1, dict(d.attributes)))
            mapping[copy_id] = d.id

    capacity = {d.id: d.capacity for d in instance.drivers}
    edges: List[Edge] = []
    for e in instance.edges:
        for k in range(capacity[e.driver]):
            edges.append(
                Edge(f"{e.id}#{k}", f"{e.driver}#{k}", e.rider, e.accept_prob, e.weight, e.origin or e.id)
            )

    expanded = Instance(tuple(drivers), instance.riders, tuple(edges), instance.horizon)
    logger.debug("Unit-capacity reduction: %s -> %s", instance.summary(), expanded.summary())
    return expanded, mapping


def fold_driver_counts(counts: Mapping[str, float], mapping: Mapping[str, str]) -> Dict[str, float]:
    """Sum per-copy quantities back onto original driver types."""
    folded: Dict[str, float] = {}
    for copy_id, value in counts.items():
        original = mapping.get(copy_id, copy_id)
        folded[original] = folded.get(original, 0.0) + value
    return folded


# ============================================================================
# GENERATORS
# ============================================================================

def gen_hardness(n: int, eps: float) -> Instance:
    """n identical stars: rider v_i with edges to u_i^a (p=1) and u_i^b (p=eps)."""
    if not (isinstance(n, (int, np.integer)) and n >= 1):
        raise InvalidParameterError(f"n must be a positive integer, got {n!r}")
    if not 0.0 < eps < 1.0:
        raise InvalidParameterError(f"eps must lie in (0,1), got {eps!r}")

    drivers, riders, edges = [], [], []
    for i in range(1, n + 1):
        drivers.append(DriverType(f"u{i}a", 1, {"unit": i, "role": "a"}))
        drivers.append(DriverType(f"u{i}b", 1, {"unit": i, "role": "b"}))
        riders.append(RiderType(f"v{i}", 1.0, 1, {"unit": i}))
        edges.append(Edge(f"f{i}a", f"u{i}a", f"v{i}", 1.0, 1.0))
        edges.append(Edge(f"f{i}b", f"u{i}b", f"v{i}", float(eps), 1.0))
    return Instance(tuple(drivers), tuple(riders), tuple(edges), int(n))


def assign_groups(count: int, rng: np.random.Generator) -> List[str]:
    """Exact 1:2 disadvantaged:advantaged labels in seeded-shuffled order."""
    n_disadvantaged = count // 3
    labels = np.array([DISADVANTAGED] * n_disadvantaged + [ADVANTAGED] * (count - n_disadvantaged))
    return [str(g) for g in rng.permutation(labels)]


def record_groups(count: int, seed: int) -> Tuple[List[str], List[str]]:
    """(driver groups, rider groups) for trip records, one label per record."""
    driver_groups = assign_groups(count, np.random.default_rng([seed, 1]))
    rider_groups = assign_groups(count, np.random.default_rng([seed, 2]))
    return driver_groups, rider_groups


def _draw_rates(count: int, params: GeneratorParams, rng: np.random.Generator) -> Tuple[List[float], int]:
    raw = np.maximum(rng.normal(params.rate_mean, params.rate_stddev, size=count), 0.1)
    total = math.fsum(raw)
    horizon = max(1, int(math.floor(total + 0.5)))
    rates = [float(r) * horizon / total for r in raw]
    return rates, horizon


def _draw_capacities(count: int, params: GeneratorParams, rng: np.random.Generator) -> List[int]:
    return [int(b) for b in rng.integers(1, params.capacity_bound + 1, size=count)]


def _draw_patience(count: int, params: GeneratorParams, rng: np.random.Generator) -> List[int]:
    choices = np.array(params.patience_choices)
    return [int(c) for c in rng.choice(choices, size=count)]


def _manhattan(a: Sequence[int], b: Sequence[int]) -> int:
    return abs(a[0] - b[0]) + abs(a[1] - b[1])


def _connect(
    drivers: Sequence[DriverType],
    riders: Sequence[RiderType],
    params: GeneratorParams,
) -> List[Edge]:
    edges = []
    for r in riders:
        origin = (r.attributes["origin_row"], r.attributes["origin_col"])
        for d in drivers:
            cell = (d.attributes["row"], d.attributes["col"])
            if _manhattan(cell, origin) <= params.edge_distance_threshold:
                p = params.accept_prob(d.attributes["group"], r.attributes["group"])
                edges.append(Edge(f"{d.id}-{r.id}", d.id, r.id, p, r.attributes["weight"]))
    return edges


def _finish(drivers, riders, edges, horizon, source: str) -> Instance:
    instance = Instance(tuple(drivers), tuple(riders), tuple(edges), horizon)
    isolated = isolated_riders(instance)
    if isolated:
        raise InvalidInstanceError(
            [Violation(Rule.HAS_EDGES, rid, "no compatible driver") for rid in isolated],
            f"{source}: {len(isolated)} rider(s) with positive rate have no edges; try another seed",
        )
    require_valid(instance)
    logger.info("Built %s instance: %s", source, instance.summary())
    return instance


def gen_synthetic(params: GeneratorParams) -> Instance:
    """Grid instance mimicking the trip-record pipeline, deterministic in params.seed.

    Each rider origin is drawn within the edge threshold of a random driver
    cell, so every rider has at least one compatible driver.
    """
    rng = np.random.default_rng(params.seed)
    n_u, n_v = params.num_driver_types, params.num_rider_types
    thr = params.edge_distance_threshold

    cells = [(int(rng.integers(params.grid_rows)), int(rng.integers(params.grid_cols))) for _ in range(n_u)]
    driver_groups = assign_groups(n_u, rng)
    capacities = _draw_capacities(n_u, params, rng)
    drivers = [
        DriverType(f"u{k}", capacities[k], {"row": cells[k][0], "col": cells[k][1], "group": driver_groups[k]})
        for k in range(n_u)
    ]

    origins, destinations = [], []
    for _ in range(n_v):
        anchor = cells[int(rng.integers(n_u))]
        near = [
            (anchor[0] + dr, anchor[1] + dc)
            for dr in range(-thr, thr + 1)
            for dc in range(-thr, thr + 1)
            if abs(dr) + abs(dc) <= thr
            and 0 <= anchor[0] + dr < params.grid_rows
            and 0 <= anchor[1] + dc < params.grid_cols
        ]
        origins.append(near[int(rng.integers(len(near)))])
        destinations.append((int(rng.integers(params.grid_rows)), int(rng.integers(params.grid_cols))))

    rider_groups = assign_groups(n_v, rng)
    patience = _draw_patience(n_v, params, rng)
    rates, horizon = _draw_rates(n_v, params, rng)
    lengths = [_manhattan(o, d) for o, d in zip(origins, destinations)]
    longest = max(max(lengths), 1)

    riders = [
        RiderType(
            f"v{k}",
            rates[k],
            patience[k],
            {
                "origin_row": origins[k][0],
                "origin_col": origins[k][1],
                "dest_row": destinations[k][0],
                "dest_col": destinations[k][1],
                "group": rider_groups[k],
                "trip_length": float(lengths[k]),
                "weight": lengths[k] / longest,
            },
        )
        for k in range(n_v)
    ]
    return _finish(drivers, riders, _connect(drivers, riders, params), horizon, "synthetic")


# ============================================================================
# TRIP-RECORD INGESTION
# ============================================================================

@dataclass
class IngestReport:
    total_rows: int = 0
    malformed_rows: int = 0
    outside_window: int = 0
    outside_bbox: int = 0
    kept_rows: int = 0

    def to_dict(self) -> Dict[str, int]:
        return dict(self.__dict__)


def _grid_cell(lon: pd.Series, lat: pd.Series, params: GeneratorParams) -> Tuple[pd.Series, pd.Series]:
    lon_span = (LONGITUDE_RANGE[1] - LONGITUDE_RANGE[0]) / params.grid_rows
    lat_span = (LATITUDE_RANGE[1] - LATITUDE_RANGE[0]) / params.grid_cols
    rows = np.floor((lon - LONGITUDE_RANGE[0]) / lon_span).clip(0, params.grid_rows - 1).astype(int)
    cols = np.floor((lat - LATITUDE_RANGE[0]) / lat_span).clip(0, params.grid_cols - 1).astype(int)
    return rows, cols


def load_trip_records(path: Union[str, Path], params: GeneratorParams) -> Tuple[pd.DataFrame, IngestReport]:
    """Read, clean and filter trip records; adds grid-cell columns."""
    report = IngestReport()
    bad_lines: List[List[str]] = []

    def _skip(line: List[str]) -> None:
        bad_lines.append(line)
        return None

    try:
        raw = pd.read_csv(
            path,
            sep=params.delimiter,
            dtype=str,
            engine="python",
            on_bad_lines=_skip,
            skipinitialspace=True,
        )
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise IngestError(f"cannot read trip records from {path}: {e}") from e

    missing = [c for c in TRIP_COLUMNS if c not in raw.columns]
    if missing:
        raise IngestError(f"{path}: missing required columns {missing}")

    report.total_rows = len(raw) + len(bad_lines)
    frame = pd.DataFrame(
        {c: pd.to_numeric(raw[c], errors="coerce") for c in TRIP_COLUMNS if c != "pickup_datetime"}
    )
    frame["pickup_datetime"] = pd.to_datetime(raw["pickup_datetime"], errors="coerce", format="%Y-%m-%d %H:%M:%S")

    malformed = frame[list(TRIP_COLUMNS)].isna().any(axis=1) | (frame["trip_distance"] < 0)
    report.malformed_rows = int(malformed.sum()) + len(bad_lines)
    frame = frame[~malformed]
    if report.malformed_rows:
        logger.warning("Skipped %d malformed trip record(s) in %s", report.malformed_rows, path)

    minute = frame["pickup_datetime"].dt.hour * 60 + frame["pickup_datetime"].dt.minute
    start, end = _minutes_of_day(params.window_start), _minutes_of_day(params.window_end)
    in_window = (minute >= start) & (minute < end)
    report.outside_window = int((~in_window).sum())
    frame = frame[in_window]

    in_box = pd.Series(True, index=frame.index)
    for lon_col, lat_col in (("pickup_longitude", "pickup_latitude"), ("dropoff_longitude", "dropoff_latitude")):
        in_box &= frame[lon_col].gt(LONGITUDE_RANGE[0]) & frame[lon_col].lt(LONGITUDE_RANGE[1])
        in_box &= frame[lat_col].gt(LATITUDE_RANGE[0]) & frame[lat_col].lt(LATITUDE_RANGE[1])
    report.outside_bbox = int((~in_box).sum())
    frame = frame[in_box].reset_index(drop=True)

    report.kept_rows = len(frame)
    if frame.empty:
        raise IngestError(f"{path}: no trip records survive the window and bounding-box filters")

    frame["pickup_row"], frame["pickup_col"] = _grid_cell(frame["pickup_longitude"], frame["pickup_latitude"], params)
    frame["dropoff_row"], frame["dropoff_col"] = _grid_cell(
        frame["dropoff_longitude"], frame["dropoff_latitude"], params
    )
    logger.info("Loaded %d of %d trip records from %s", report.kept_rows, report.total_rows, path)
    return frame, report


def build_instance_from_records(frame: pd.DataFrame, params: GeneratorParams) -> Instance:
    """Types from filtered records.

    Driver type = (pickup cell, driver group). Rider type = (origin cell,
    destination cell, rider group); its trip length is the longest record of
    the type, and weights divide by the longest record overall.
    """
    frame = frame.copy()
    frame["driver_group"], frame["rider_group"] = record_groups(len(frame), params.seed)
    rng = np.random.default_rng([params.seed, 3])

    driver_keys = sorted(set(zip(frame["pickup_row"], frame["pickup_col"], frame["driver_group"])))
    rider_frame = (
        frame.groupby(["pickup_row", "pickup_col", "dropoff_row", "dropoff_col", "rider_group"], sort=True)[
            "trip_distance"
        ]
        .max()
        .reset_index()
    )
    longest = float(frame["trip_distance"].max())

    if params.ingest_downsample:
        driver_keys, rider_frame = _downsample(driver_keys, rider_frame, params, rng)

    capacities = _draw_capacities(len(driver_keys), params, rng)
    drivers = [
        DriverType(f"u{k}", capacities[k], {"row": int(row), "col": int(col), "group": str(group)})
        for k, (row, col, group) in enumerate(driver_keys)
    ]

    n_v = len(rider_frame)
    patience = _draw_patience(n_v, params, rng)
    rates, horizon = _draw_rates(n_v, params, rng)
    riders = []
    for k, rec in enumerate(rider_frame.itertuples(index=False)):
        riders.append(
            RiderType(
                f"v{k}",
                rates[k],
                patience[k],
                {
                    "origin_row": int(rec.pickup_row),
                    "origin_col": int(rec.pickup_col),
                    "dest_row": int(rec.dropoff_row),
                    "dest_col": int(rec.dropoff_col),
                    "group": str(rec.rider_group),
                    "trip_length": float(rec.trip_distance),
                    "weight": float(rec.trip_distance) / longest if longest > 0 else 0.0,
                },
            )
        )
    return _finish(drivers, riders, _connect(drivers, riders, params), horizon, "trip-record")


def _downsample(driver_keys, rider_frame: pd.DataFrame, params: GeneratorParams, rng: np.random.Generator):
    if len(driver_keys) > params.num_driver_types:
        picked = sorted(rng.choice(len(driver_keys), size=params.num_driver_types, replace=False))
        driver_keys = [driver_keys[i] for i in picked]
    cells = [(row, col) for row, col, _ in driver_keys]
    reachable = rider_frame.apply(
        lambda rec: any(
            _manhattan(c, (rec.pickup_row, rec.pickup_col)) <= params.edge_distance_threshold for c in cells
        ),
        axis=1,
    )
    rider_frame = rider_frame[reachable].reset_index(drop=True)
    if len(rider_frame) > params.num_rider_types:
        picked = sorted(rng.choice(len(rider_frame), size=params.num_rider_types, replace=False))
        rider_frame = rider_frame.iloc[picked].reset_index(drop=True)
    return driver_keys, rider_frame


def ingest_trip_records(path: Union[str, Path], params: GeneratorParams) -> Instance:
    frame, _ = load_trip_records(path, params)
    return build_instance_from_records(frame, params)


# ============================================================================
# SERIALIZATION
# ============================================================================

def instance_to_dict(instance: Instance) -> Dict[str, Any]:
    return {
        "drivers": [{"id": d.id, "capacity": d.capacity, "attributes": d.attributes} for d in instance.drivers],
        "riders": [
            {"id": r.id, "arrival_rate": r.arrival_rate, "patience": r.patience, "attributes": r.attributes}
            for r in instance.riders
        ],
        "edges": [
            {"id": e.id, "driver": e.driver, "rider": e.rider, "accept_prob": e.accept_prob, "weight": e.weight}
            | ({"origin": e.origin} if e.origin is not None else {})
            for e in instance.edges
        ],
        "horizon": instance.horizon,
    }


def instance_from_dict(data: Mapping[str, Any]) -> Instance:
    try:
        return Instance(
            tuple(DriverType(d["id"], int(d["capacity"]), dict(d.get("attributes", {}))) for d in data["drivers"]),
            tuple(
                RiderType(r["id"], float(r["arrival_rate"]), int(r["patience"]), dict(r.get("attributes", {})))
                for r in data["riders"]
            ),
            tuple(
                Edge(
                    e["id"], e["driver"], e["rider"], float(e["accept_prob"]), float(e["weight"]), e.get("origin")
                )
                for e in data["edges"]
            ),
            int(data["horizon"]),
        )
    except (KeyError, TypeError, ValueError) as e:
        raise InvalidParameterError(f"malformed instance document: {e}") from e


def save_instance(instance: Instance, path: Union[str, Path]) -> None:
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(instance), fh, indent=2)
        fh.write("\n")


def load_instance(path: Union[str, Path]) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))
