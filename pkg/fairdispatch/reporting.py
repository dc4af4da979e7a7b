"""
fairdispatch - Reporting
Theoretical bound curves, plot data, plotting-script template and trend checks over sweep results
"""

import logging
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Sequence, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

WARMUP_FACTOR = (1.0 - 1.0 / math.e) / 2.0
ATTENALG_FACTOR = 0.46
TREND_THRESHOLD = 0.9


def bound_curves(alpha_grid: Sequence[float]) -> pd.DataFrame:
    """Lower bounds along beta = 1 - alpha."""
    alpha = np.asarray(list(alpha_grid), dtype=float)
    beta = 1.0 - alpha
    return pd.DataFrame(
        {
            "alpha": alpha,
            "beta": beta,
            "warmup_profit_bound": alpha * WARMUP_FACTOR,
            "warmup_fairness_bound": beta * WARMUP_FACTOR,
            "attenalg_profit_bound": alpha * ATTENALG_FACTOR,
            "attenalg_fairness_bound": beta * ATTENALG_FACTOR,
        }
    )


def plot_data(metrics: pd.DataFrame) -> pd.DataFrame:
    """Measured ratios joined with the bound columns of the matching alpha."""
    frame = metrics.copy()
    lp_rows = frame["alpha"].notna()
    bounds = bound_curves(frame.loc[lp_rows, "alpha"].unique())
    merged = frame.merge(bounds.drop(columns="beta"), on="alpha", how="left")
    columns = ["policy", "B", "alpha", "beta", "profit_ratio", "fairness_ratio"]
    columns += [c for c in bounds.columns if c not in ("alpha", "beta")]
    return merged[columns].sort_values(["policy", "B", "alpha"], na_position="last").reset_index(drop=True)


PLOT_SCRIPT = '''#!/usr/bin/env python3
"""Plot competitive ratios against alpha and the greedy profit comparison."""

import sys

import matplotlib.pyplot as plt
import pandas as pd
import seaborn as sns

data = pd.read_csv(sys.argv[1] if len(sys.argv) > 1 else "{data_file}")
sns.set_theme(style="whitegrid")

lp = data[data["alpha"].notna()]
for (policy, B), group in lp.groupby(["policy", "B"], dropna=False):
    group = group.sort_values("alpha")
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(group["alpha"], group["profit_ratio"], "o-", label="profit ratio")
    ax.plot(group["alpha"], group["fairness_ratio"], "s-", label="fairness ratio")
    prefix = "attenalg" if policy == "attenalg" else "warmup"
    ax.plot(group["alpha"], group[prefix + "_profit_bound"], "--", label="profit bound")
    ax.plot(group["alpha"], group[prefix + "_fairness_bound"], ":", label="fairness bound")
    ax.set_xlabel("alpha (beta = 1 - alpha)")
    ax.set_ylabel("competitive ratio")
    ax.set_title(f"{{policy}} B={{B}}")
    ax.legend()
    fig.tight_layout()
    fig.savefig(f"ratios_{{policy}}_B{{B}}.png", dpi=150)
    plt.close(fig)

greedy = data[data["policy"].isin(["greedy_p", "greedy_f"])]
if not greedy.empty:
    melted = greedy.melt(id_vars=["policy", "B"], value_vars=["profit_ratio", "fairness_ratio"])
    grid = sns.catplot(data=melted, x="B", y="value", hue="policy", col="variable", kind="bar", height=4)
    grid.savefig("greedy_comparison.png", dpi=150)
'''


def write_plot_script(path: Union[str, Path], data_file: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(PLOT_SCRIPT.format(data_file=Path(data_file).name), encoding="utf-8")
    path.chmod(0o755)
    return path


def _spearman(x: pd.Series, y: pd.Series) -> float:
    if len(x) < 2 or x.nunique() < 2 or y.nunique() < 2:
        return math.nan
    return float(x.rank().corr(y.rank()))


def check_trends(frame: pd.DataFrame, threshold: float = TREND_THRESHOLD) -> Dict[str, Any]:
    """Per B: WarmUp ratio monotonicity along alpha/beta and Greedy-P vs Greedy-F profit."""
    checks: Dict[str, Any] = {}
    b_values = frame["B"].unique() if "B" in frame else [None]
    for B in b_values:
        rows = frame if B is None or (isinstance(B, float) and math.isnan(B)) else frame[frame["B"] == B]
        key = "all" if B is None or (isinstance(B, float) and math.isnan(B)) else str(int(B))
        entry: Dict[str, Any] = {}
        warm = rows[rows["policy"] == "warmup"].sort_values("alpha")
        if len(warm) >= 2:
            entry["profit_vs_alpha"] = _spearman(warm["alpha"], warm["profit_ratio"])
            entry["fairness_vs_beta"] = _spearman(warm["beta"], warm["fairness_ratio"])
            entry["warmup_trend_ok"] = bool(
                entry["profit_vs_alpha"] > threshold and entry["fairness_vs_beta"] > threshold
            )
        greedy_p = rows.loc[rows["policy"] == "greedy_p", "profit_mean"]
        greedy_f = rows.loc[rows["policy"] == "greedy_f", "profit_mean"]
        if len(greedy_p) and len(greedy_f):
            entry["greedy_p_profit"] = float(greedy_p.iloc[0])
            entry["greedy_f_profit"] = float(greedy_f.iloc[0])
            entry["greedy_profit_ok"] = bool(entry["greedy_p_profit"] >= entry["greedy_f_profit"])
        checks[key] = entry
    return checks


def summarize(frame: pd.DataFrame) -> str:
    lines: List[str] = []
    for _, row in frame.iterrows():
        mix = "" if pd.isna(row["alpha"]) else f" alpha={row['alpha']:.2f} beta={row['beta']:.2f}"
        b = "" if pd.isna(row.get("B")) else f" B={int(row['B'])}"
        lines.append(
            f"{row['policy']}{mix}{b}: profit {row['profit_mean']:.4f} ± {row['profit_stderr']:.4f}"
            f" (ratio {row['profit_ratio']:.4f}), fairness {row['fairness']:.4f} ± {row['fairness_stderr']:.4f}"
            f" (ratio {row['fairness_ratio']:.4f}), n={int(row['n_trials'])}"
        )
    for key, entry in check_trends(frame).items():
        for name, value in entry.items():
            lines.append(f"[B={key}] {name}: {value}")
    return "\n".join(lines)


def load_metrics(paths: Iterable[Union[str, Path]]) -> pd.DataFrame:
    frames = [pd.read_csv(p) for p in paths]
    if not frames:
        return pd.DataFrame()
    return pd.concat(frames, ignore_index=True)
