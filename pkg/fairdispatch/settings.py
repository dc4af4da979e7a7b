"""
fairdispatch - Settings
Process-wide defaults read from the environment (and an optional .env file)
"""

import logging
import os

from dotenv import load_dotenv

# ============================================================================
# CONFIGURATION & SETUP
# ============================================================================

load_dotenv()

LOG_LEVEL = os.getenv("FAIRDISPATCH_LOG_LEVEL", "INFO")
OUT_DIR = os.getenv("FAIRDISPATCH_OUT_DIR", "results")
JOBS = int(os.getenv("FAIRDISPATCH_JOBS", "1"))
TRIALS = int(os.getenv("FAIRDISPATCH_TRIALS", "1000"))
SEED = int(os.getenv("FAIRDISPATCH_SEED", "2021"))

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

# ============================================================================
# NUMERICAL CONSTANTS
# ============================================================================

# Simplex margins
FEASIBILITY_TOL = 1e-8
OPTIMALITY_TOL = 1e-9
PIVOT_TOL = 1e-11

# Rounding snaps values this close to 0 or 1
SNAP_TOL = 1e-12

# Absolute tolerance on sum(arrival_rate) == horizon
RATE_SUM_TOL = 1e-9

# Trials per Monte Carlo work unit
TRIAL_BLOCK = 1000

# Statistical margin used by every bound check
STDERR_MARGIN = 4.0


def configure_logging(level: str | int | None = None) -> None:
    """Configure root logging once for CLI runs."""
    resolved = level if level is not None else LOG_LEVEL
    if isinstance(resolved, str):
        resolved = getattr(logging, resolved.upper(), logging.INFO)
    logging.basicConfig(level=resolved, format=LOG_FORMAT)
    logging.getLogger().setLevel(resolved)
