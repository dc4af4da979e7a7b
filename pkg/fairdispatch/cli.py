#!/usr/bin/env python3
"""
fairdispatch - Command-line front end
generate | ingest | solve | calibrate | simulate | sweep | verify-hardness | report
"""

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from . import settings
from .exceptions import (
    ConfigFileError,
    EnumerationBoundsError,
    FairDispatchError,
    InvalidParameterError,
    LpSolveError,
)
from .instance import (
    GeneratorParams,
    Instance,
    build_instance_from_records,
    gen_hardness,
    gen_synthetic,
    load_instance,
    load_trip_records,
    save_instance,
    to_unit_capacity,
)
from .lp import (
    LpModel,
    LpSolution,
    build_fairness_lp,
    build_profit_lp,
    dump_lp_text,
    read_lp_text,
    restrict_model,
    solve,
    solve_benchmarks,
    solve_by_enumeration,
)
from .policies import AttenuationTable, PolicyConfig, PolicyKind, build_policy
from .reporting import bound_curves, check_trends, load_metrics, plot_data, summarize, write_plot_script
from .settings import STDERR_MARGIN, configure_logging
from .simulator import DriverGroups, evaluate_policy, run_trial, write_metrics_csv, write_trial_log

logger = logging.getLogger(__name__)

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2

# ============================================================================
# RUN CONFIGURATION
# ============================================================================

# Config-file keys that differ from model field names
CONFIG_ALIASES = {
    "B": "capacity_bound",
    "eta": "scale_eta",
    "num_drivers": "num_driver_types",
    "num_riders": "num_rider_types",
    "samples": "attenuation_samples",
    "downsample": "ingest_downsample",
    "B_grid": "b_grid",
}

FLAG_NAMES = {
    "capacity_bound": "--B",
    "scale_eta": "--eta",
    "num_driver_types": "--num-drivers",
    "num_rider_types": "--num-riders",
    "attenuation_samples": "--samples",
    "ingest_downsample": "--downsample",
    "b_grid": "--B-grid",
    "alpha_grid": "--alpha-grid",
    "out_dir": "--out-dir",
    "log_level": "--log-level",
    "trial_log": "--trial-log",
    "window_start": "--window-start",
    "window_end": "--window-end",
}


class RunConfig(BaseModel):
    """Command parameters after merging environment, config file and flags."""

    model_config = ConfigDict(extra="forbid")

    seed: int = Field(default_factory=lambda: settings.SEED, ge=0, lt=2**64)
    jobs: int = Field(default_factory=lambda: settings.JOBS, ge=1)
    out_dir: Path = Field(default_factory=lambda: Path(settings.OUT_DIR))
    trials: int = Field(default_factory=lambda: settings.TRIALS, ge=1)
    log_level: str = Field(default_factory=lambda: settings.LOG_LEVEL)
    instance: Optional[Path] = None
    table: Optional[Path] = None
    output: Optional[Path] = None
    policy: PolicyKind = PolicyKind.WARMUP
    policies: List[PolicyKind] = Field(
        default_factory=lambda: [PolicyKind.WARMUP, PolicyKind.GREEDY_P, PolicyKind.GREEDY_F]
    )
    alpha: float = Field(0.5, ge=0.0, le=1.0)
    beta: float = Field(0.5, ge=0.0, le=1.0)
    alpha_grid: List[float] = Field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    b_grid: List[int] = Field(default_factory=lambda: [10, 15, 20, 25])
    attenuation_samples: int = Field(1000, gt=0)
    hardness: bool = False
    n: int = Field(5, ge=1)
    eps: float = Field(0.1, gt=0.0, lt=1.0)
    dump_lp: bool = False
    cross_check: bool = False
    trial_log: int = Field(0, ge=0)
    trips: Optional[Path] = None
    metrics: List[Path] = Field(default_factory=list)
    progress: bool = False

    @field_validator("alpha_grid")
    @classmethod
    def check_alpha_grid(cls, v: List[float]) -> List[float]:
        if not v or any(not 0.0 <= a <= 1.0 for a in v):
            raise ValueError("alpha grid values must lie in [0,1]")
        return v

    @field_validator("b_grid")
    @classmethod
    def check_b_grid(cls, v: List[int]) -> List[int]:
        if not v or any(b < 1 for b in v):
            raise ValueError("capacity bounds must be positive")
        return v

    @field_validator("instance", "table", "trips")
    @classmethod
    def check_exists(cls, v: Optional[Path]) -> Optional[Path]:
        if v is not None and not v.exists():
            raise ValueError(f"file not found: {v}")
        return v

    def path(self, name: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir / name


def _csv(cast: Callable[[str], Any]) -> Callable[[str], List[Any]]:
    def parse(raw: str) -> List[Any]:
        return [cast(part.strip()) for part in raw.split(",") if part.strip()]

    return parse


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="Master seed")
    common.add_argument("--jobs", type=int, default=None, help="Worker processes for simulation")
    common.add_argument("--out-dir", dest="out_dir", default=None, help="Output directory")
    common.add_argument("--config", default=None, help="JSON file mirroring flag names")
    common.add_argument("--log-level", dest="log_level", default=None)
    common.add_argument("--progress", action="store_true", default=None, help="Show progress bars")

    parser = argparse.ArgumentParser(prog="fairdispatch", description="Fair online dispatch experiments")
    sub = parser.add_subparsers(dest="command", required=True)

    def generator_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--B", dest="capacity_bound", type=int, default=None, help="Driver capacity upper bound")
        p.add_argument("--eta", "--scale-eta", dest="scale_eta", type=float, default=None)
        p.add_argument("--num-drivers", dest="num_driver_types", type=int, default=None)
        p.add_argument("--num-riders", dest="num_rider_types", type=int, default=None)

    p = sub.add_parser("generate", parents=[common], help="Write a synthetic or hardness instance")
    generator_flags(p)
    p.add_argument("--hardness", action="store_true", default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("ingest", parents=[common], help="Build an instance from trip records")
    p.add_argument("trips")
    generator_flags(p)
    p.add_argument("--window-start", dest="window_start", default=None)
    p.add_argument("--window-end", dest="window_end", default=None)
    p.add_argument("--delimiter", default=None)
    p.add_argument("--downsample", dest="ingest_downsample", action="store_true", default=None)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("solve", parents=[common], help="Solve both benchmark LPs")
    p.add_argument("--instance", required=True)
    p.add_argument("--dump-lp", dest="dump_lp", action="store_true", default=None)
    p.add_argument("--cross-check", dest="cross_check", action="store_true", default=None)

    p = sub.add_parser("calibrate", parents=[common], help="Estimate AttenAlg keep-factors")
    p.add_argument("--instance", required=True)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--samples", dest="attenuation_samples", type=int, default=None)
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo evaluation of one policy")
    p.add_argument("--instance", required=True)
    p.add_argument("--policy", default=None, choices=[k.value for k in PolicyKind])
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--samples", dest="attenuation_samples", type=int, default=None)
    p.add_argument("--table", default=None, help="Attenuation table CSV from calibrate")
    p.add_argument("--trial-log", dest="trial_log", type=int, default=None, help="Write the first N trials as JSONL")
    p.add_argument("-o", "--output", default=None)

    p = sub.add_parser("sweep", parents=[common], help="Policies x alpha grid (x B grid)")
    p.add_argument("--instance", default=None)
    p.add_argument("--B-grid", dest="b_grid", type=_csv(int), default=None)
    p.add_argument("--alpha-grid", dest="alpha_grid", type=_csv(float), default=None)
    p.add_argument("--policies", type=_csv(str), default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--samples", dest="attenuation_samples", type=int, default=None)
    generator_flags(p)

    p = sub.add_parser("verify-hardness", parents=[common], help="Check the hardness family")
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--eps", type=float, default=None)
    p.add_argument("--policies", type=_csv(str), default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--beta", type=float, default=None)
    p.add_argument("--trials", type=int, default=None)
    p.add_argument("--samples", dest="attenuation_samples", type=int, default=None)

    p = sub.add_parser("report", parents=[common], help="Summarize metrics CSV files")
    p.add_argument("metrics", nargs="+")
    return parser


def _read_config_file(path: Optional[str]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as handle:
            raw = json.load(handle)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigFileError(f"cannot read config file {path}: {e}") from e
    if not isinstance(raw, dict):
        raise ConfigFileError(f"config file {path} must hold a JSON object")
    merged = {}
    for key, value in raw.items():
        key = key.lstrip("-").replace("-", "_")
        merged[CONFIG_ALIASES.get(key, key)] = value
    return merged


def resolve_config(args: argparse.Namespace) -> Tuple[RunConfig, GeneratorParams]:
    """Environment defaults < config file < explicit flags."""
    values = _read_config_file(getattr(args, "config", None))
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        values[key] = value

    generator_fields = set(GeneratorParams.model_fields)
    run_fields = set(RunConfig.model_fields)
    unknown = sorted(k for k in values if k not in generator_fields | run_fields)
    if unknown:
        raise ConfigFileError(f"unknown config keys: {', '.join(unknown)}")

    generator = GeneratorParams(**{k: v for k, v in values.items() if k in generator_fields})
    run = RunConfig(**{k: v for k, v in values.items() if k in run_fields})
    return run, generator


def _describe_validation(error: ValidationError) -> str:
    parts = []
    for item in error.errors():
        field = str(item["loc"][0]) if item["loc"] else "?"
        flag = FLAG_NAMES.get(field, "--" + field.replace("_", "-"))
        parts.append(f"invalid value for {flag}: {item['msg']}")
    return "; ".join(parts)


# ============================================================================
# HELPERS
# ============================================================================

def _write_json(path: Path, payload: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, sort_keys=False)


def _solution_payload(solution: LpSolution) -> Dict[str, Any]:
    return {"status": solution.status.value, "objective": solution.objective_value, "values": solution.values}


def _policy_config(run: RunConfig, kind: PolicyKind, alpha: Optional[float] = None) -> PolicyConfig:
    a = run.alpha if alpha is None else alpha
    b = run.beta if alpha is None else 1.0 - alpha
    return PolicyConfig(kind=kind, alpha=a, beta=b, attenuation_samples=run.attenuation_samples, seed=run.seed)


def _parse_policies(raw: Sequence[Any]) -> List[PolicyKind]:
    try:
        return [PolicyKind(p) for p in raw]
    except ValueError as e:
        raise InvalidParameterError(f"--policies: {e}") from e


def cross_check(model: LpModel, solution: LpSolution, limit: int = 8) -> Dict[str, Any]:
    """Re-solve the model from its LP text, then compare simplex and vertex enumeration on a reduced copy.

    The reduced copy keeps the largest optimal columns; it is as large as
    enumeration allows, up to ``limit`` columns.
    """
    reparsed = read_lp_text(dump_lp_text(model))
    resolved = solve(reparsed)
    ranked = sorted(solution.values.items(), key=lambda item: (-item[1], item[0]))
    support = [label for label, value in ranked if value > 1e-9]
    result: Dict[str, Any] = {
        "objective": solution.objective_value,
        "reparsed_objective": resolved.objective_value,
        "reparsed_ok": bool(resolved.optimal and abs(resolved.objective_value - solution.objective_value) <= 1e-6),
    }
    for size in range(min(limit, len(support)), 0, -1):
        reduced = restrict_model(reparsed, support[:size])
        try:
            enumerated = solve_by_enumeration(reduced)
        except EnumerationBoundsError:
            continue
        simplex = solve(reduced)
        result.update(
            reduced_columns=size,
            full_support=size == len(support),
            reduced_simplex=simplex.objective_value,
            reduced_enumeration=enumerated.objective_value,
            reduced_ok=bool(abs(simplex.objective_value - enumerated.objective_value) <= 1e-6),
        )
        if size == len(support):
            result["full_ok"] = bool(abs(enumerated.objective_value - solution.objective_value) <= 1e-6)
        break
    return result


# ============================================================================
# COMMANDS
# ============================================================================

def cmd_generate(run: RunConfig, params: GeneratorParams) -> int:
    instance = gen_hardness(run.n, run.eps) if run.hardness else gen_synthetic(params.model_copy(update={"seed": run.seed}))
    target = run.output or run.path("instance.json")
    save_instance(instance, target)
    print(f"{instance.summary()} -> {target}")
    return EXIT_OK


def cmd_ingest(run: RunConfig, params: GeneratorParams) -> int:
    params = params.model_copy(update={"seed": run.seed})
    frame, report = load_trip_records(run.trips, params)
    instance = build_instance_from_records(frame, params)
    target = run.output or run.path("instance.json")
    save_instance(instance, target)
    _write_json(run.path("ingest_report.json"), report.to_dict())
    print(f"kept {report.kept_rows}/{report.total_rows} rows; {instance.summary()} -> {target}")
    return EXIT_OK


def cmd_solve(run: RunConfig, params: GeneratorParams) -> int:
    instance = load_instance(run.instance)
    checks_ok = True
    for name, builder in (("profit", build_profit_lp), ("fairness", build_fairness_lp)):
        model = builder(instance)
        solution = solve(model)
        if not solution.optimal:
            raise LpSolveError(f"{name} LP is {solution.status.value}")
        label = "OPT-P" if name == "profit" else "OPT-F"
        print(f"{label} = {solution.objective_value:.6f}")
        _write_json(run.path(f"{name}_solution.json"), _solution_payload(solution))
        if run.dump_lp:
            run.path(f"{name}.lp").write_text(dump_lp_text(model), encoding="utf-8")
        if run.cross_check:
            report = cross_check(model, solution)
            _write_json(run.path(f"{name}_cross_check.json"), report)
            ok = report["reparsed_ok"] and report.get("reduced_ok", True) and report.get("full_ok", True)
            print(f"{name} cross-check: {'ok' if ok else 'MISMATCH'} {report}")
            checks_ok = checks_ok and ok
    return EXIT_OK if checks_ok else EXIT_RUNTIME


def _unit_target(instance: Instance) -> Tuple[Instance, Optional[DriverGroups]]:
    if instance.is_unit_capacity:
        return instance, None
    unit, mapping = to_unit_capacity(instance)
    return unit, DriverGroups.from_reduction(instance, unit, mapping)


def cmd_calibrate(run: RunConfig, params: GeneratorParams) -> int:
    instance, _ = _unit_target(load_instance(run.instance))
    config = _policy_config(run, PolicyKind.ATTENALG)
    policy = build_policy(instance, config, progress=run.progress)
    target = run.output or run.path("attenuation.csv")
    policy.table.save_csv(target)
    print(f"attenuation table for {instance.summary()} -> {target}")
    return EXIT_OK


def cmd_simulate(run: RunConfig, params: GeneratorParams) -> int:
    instance = load_instance(run.instance)
    config = _policy_config(run, run.policy)
    benchmarks = solve_benchmarks(instance)
    table = None
    if run.table is not None and config.kind is PolicyKind.ATTENALG:
        table = AttenuationTable.load_csv(run.table, _unit_target(instance)[0])
    metrics = evaluate_policy(
        instance,
        config,
        run.trials,
        run.seed,
        benchmarks=benchmarks,
        table=table,
        jobs=run.jobs,
        progress=run.progress,
    )
    target = run.output or run.path(f"metrics_{config.kind.value}.csv")
    write_metrics_csv([metrics], target)
    if run.trial_log:
        sim_instance, _ = _unit_target(instance) if config.kind is PolicyKind.ATTENALG else (instance, None)
        sim_benchmarks = benchmarks if sim_instance is instance else solve_benchmarks(sim_instance)
        policy = build_policy(sim_instance, config, sim_benchmarks, table=table)
        records = (run_trial(sim_instance, policy, run.seed, k) for k in range(min(run.trial_log, run.trials)))
        count = write_trial_log(records, sim_instance, run.path("trials.jsonl"))
        logger.info("Wrote %d trial logs", count)
    print(
        f"{metrics.label}: profit ratio {metrics.profit_ratio:.4f} ± {metrics.profit_ratio_stderr:.4f}, "
        f"fairness ratio {metrics.fairness_ratio:.4f} ± {metrics.fairness_ratio_stderr:.4f}"
    )
    return EXIT_OK


def _sweep_instance(instance: Instance, run: RunConfig, B: Optional[int]) -> List[Dict[str, Any]]:
    benchmarks = solve_benchmarks(instance)
    rows = []
    for kind in _parse_policies(run.policies):
        grid = run.alpha_grid if kind in (PolicyKind.WARMUP, PolicyKind.ATTENALG) else [None]
        for alpha in grid:
            config = _policy_config(run, kind, alpha)
            metrics = evaluate_policy(
                instance, config, run.trials, run.seed, benchmarks=benchmarks, jobs=run.jobs, progress=run.progress
            )
            rows.append(metrics.as_row(B))
            logger.info("sweep point %s B=%s done", metrics.label, B)
    return rows


def cmd_sweep(run: RunConfig, params: GeneratorParams) -> int:
    rows: List[Dict[str, Any]] = []
    if run.instance is not None:
        instance = load_instance(run.instance)
        rows += _sweep_instance(instance, run, max((d.capacity for d in instance.drivers), default=None))
    else:
        for B in run.b_grid:
            instance = gen_synthetic(params.model_copy(update={"capacity_bound": B, "seed": run.seed}))
            rows += _sweep_instance(instance, run, B)
    frame = write_metrics_csv(rows, run.path("sweep.csv"))
    plot_data(frame).to_csv(run.path("plot_data.csv"), index=False)
    bound_curves(run.alpha_grid).to_csv(run.path("bounds.csv"), index=False)
    write_plot_script(run.path("plot_ratios.py"), run.path("plot_data.csv"))
    _write_json(run.path("trends.json"), check_trends(frame))
    print(summarize(frame))
    return EXIT_OK


def cmd_verify_hardness(run: RunConfig, params: GeneratorParams) -> int:
    instance = gen_hardness(run.n, run.eps)
    benchmarks = solve_benchmarks(instance)
    expected_f = run.eps / (1.0 + run.eps)
    report: Dict[str, Any] = {
        "n": run.n,
        "eps": run.eps,
        "opt_p": benchmarks.profit_opt,
        "opt_f": benchmarks.fairness_opt,
        "opt_p_ok": abs(benchmarks.profit_opt - run.n) <= 1e-6,
        "opt_f_ok": abs(benchmarks.fairness_opt - expected_f) <= 1e-6,
        "policies": [],
    }
    print(f"OPT-P = {benchmarks.profit_opt:.6f} (expected {run.n}) {'ok' if report['opt_p_ok'] else 'FAIL'}")
    print(f"OPT-F = {benchmarks.fairness_opt:.6f} (expected {expected_f:.6f}) {'ok' if report['opt_f_ok'] else 'FAIL'}")
    passed = report["opt_p_ok"] and report["opt_f_ok"]

    policies = run.policies if "policies" in run.model_fields_set else list(PolicyKind)
    for kind in _parse_policies(policies):
        metrics = evaluate_policy(
            instance, _policy_config(run, kind), run.trials, run.seed, benchmarks=benchmarks, jobs=run.jobs
        )
        total = metrics.profit_ratio + metrics.fairness_ratio
        total_se = metrics.profit_ratio_stderr + metrics.fairness_ratio_stderr
        sum_ok = total <= 1.0 + 2.0 * run.eps + STDERR_MARGIN * total_se + 1e-9
        ceiling = 1.0 - 1.0 / math.e + run.eps
        profit_ok = metrics.profit_ratio <= ceiling + STDERR_MARGIN * metrics.profit_ratio_stderr + 1e-9
        passed = passed and sum_ok and profit_ok
        report["policies"].append(
            {
                "policy": metrics.label,
                "profit_ratio": metrics.profit_ratio,
                "fairness_ratio": metrics.fairness_ratio,
                "ratio_sum": total,
                "sum_ok": sum_ok,
                "profit_ceiling_ok": profit_ok,
            }
        )
        print(
            f"{metrics.label}: profit {metrics.profit_ratio:.4f} + fairness {metrics.fairness_ratio:.4f} = {total:.4f}"
            f" {'ok' if sum_ok and profit_ok else 'FAIL'}"
        )
    report["passed"] = passed
    _write_json(run.path("hardness_report.json"), report)
    return EXIT_OK if passed else EXIT_RUNTIME


def cmd_report(run: RunConfig, params: GeneratorParams) -> int:
    frame = load_metrics(run.metrics)
    if frame.empty:
        raise InvalidParameterError("no metrics rows to report")
    print(summarize(frame))
    plot_data(frame).to_csv(run.path("plot_data.csv"), index=False)
    write_plot_script(run.path("plot_ratios.py"), run.path("plot_data.csv"))
    return EXIT_OK


COMMANDS: Dict[str, Callable[[RunConfig, GeneratorParams], int]] = {
    "generate": cmd_generate,
    "ingest": cmd_ingest,
    "solve": cmd_solve,
    "calibrate": cmd_calibrate,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "verify-hardness": cmd_verify_hardness,
    "report": cmd_report,
}


# ============================================================================
# MAIN
# ============================================================================

def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run, params = resolve_config(args)
    except ValidationError as e:
        print(f"error: {_describe_validation(e)}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigFileError, InvalidParameterError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    configure_logging(run.log_level)
    try:
        return COMMANDS[args.command](run, params)
    except ValidationError as e:
        print(f"error: {_describe_validation(e)}", file=sys.stderr)
        return EXIT_USAGE
    except InvalidParameterError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (FairDispatchError, OSError) as e:
        logger.error("%s failed: %s", args.command, e)
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
