# fairdispatch - Fair online dispatch under KIID arrivals
"""
fairdispatch Package
Benchmark LPs, dependent rounding, WarmUp / AttenAlg / greedy dispatch policies
and the Monte Carlo harness that measures their profit and fairness ratios
"""

__version__ = "0.1.0"
__author__ = "fairdispatch developers"

from . import exceptions
from .exceptions import *
from .instance import (
    DriverType,
    Edge,
    GeneratorParams,
    Instance,
    RiderType,
    Violation,
    fold_driver_counts,
    gen_hardness,
    gen_synthetic,
    ingest_trip_records,
    load_instance,
    load_trip_records,
    save_instance,
    to_unit_capacity,
    validate,
)
from .lp import (
    Benchmarks,
    LpModel,
    LpSolution,
    ScaledSolution,
    build_fairness_lp,
    build_profit_lp,
    dump_lp_text,
    read_lp_text,
    scale_per_arrival,
    solve,
    solve_benchmarks,
    solve_by_enumeration,
)
from .rounding import BinaryVector, FractionalVector, dependent_round, rounding_distribution
from .policies import (
    AttenAlgPolicy,
    AttenuationTable,
    GreedyPolicy,
    PolicyConfig,
    PolicyKind,
    ProbePlan,
    Schedule,
    WarmUpPolicy,
    attenalg_step,
    build_policy,
    calibrate_attenuation,
    enumerate_plans,
    greedy_step,
    make_schedule,
    sr_probe,
    warmup_step,
)
from .simulator import Metrics, TrialRecord, evaluate_policy, exact_eval, monte_carlo, run_trial
from .rng import SeededRNG, stream

__all__ = [
    # Instance
    "DriverType",
    "RiderType",
    "Edge",
    "Instance",
    "Violation",
    "GeneratorParams",
    "validate",
    "to_unit_capacity",
    "fold_driver_counts",
    "gen_hardness",
    "gen_synthetic",
    "load_trip_records",
    "ingest_trip_records",
    "save_instance",
    "load_instance",

    # LP
    "LpModel",
    "LpSolution",
    "ScaledSolution",
    "Benchmarks",
    "build_profit_lp",
    "build_fairness_lp",
    "solve",
    "solve_benchmarks",
    "solve_by_enumeration",
    "scale_per_arrival",
    "dump_lp_text",
    "read_lp_text",

    # Rounding
    "FractionalVector",
    "BinaryVector",
    "dependent_round",
    "rounding_distribution",

    # Policies
    "PolicyKind",
    "PolicyConfig",
    "Schedule",
    "ProbePlan",
    "AttenuationTable",
    "WarmUpPolicy",
    "AttenAlgPolicy",
    "GreedyPolicy",
    "make_schedule",
    "sr_probe",
    "warmup_step",
    "attenalg_step",
    "greedy_step",
    "calibrate_attenuation",
    "build_policy",
    "enumerate_plans",

    # Simulator
    "TrialRecord",
    "Metrics",
    "run_trial",
    "monte_carlo",
    "evaluate_policy",
    "exact_eval",

    # Randomness
    "SeededRNG",
    "stream",

    # Errors
    *exceptions.__all__,
]
