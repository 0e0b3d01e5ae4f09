import os

from dotenv import load_dotenv

load_dotenv()


def _env_bool(name: str, default: str = "0") -> bool:
    return str(os.environ.get(name, default)).lower() in ["1", "true", "yes"]


# --- Runtime ---
THREADS = int(os.environ.get("RIDESHARE_THREADS", 1))
OUTPUT_DIR = os.environ.get("RIDESHARE_OUTPUT_DIR", "out")
DEBUG = _env_bool("RIDESHARE_DEBUG")
SIOUX_FALLS_DIR = os.environ.get("SIOUX_FALLS_DIR", "data/SiouxFalls")

# --- Convergence ---
EPSILON_M = float(os.environ.get("RIDESHARE_EPSILON_M", 1e-2))
EPSILON_N = float(os.environ.get("RIDESHARE_EPSILON_N", 1e-2))
EPSILON_3 = float(os.environ.get("RIDESHARE_EPSILON_3", 5e-3))
MAX_INNER_ITERATIONS = int(os.environ.get("RIDESHARE_MAX_INNER", 5000))
MAX_OUTER_ITERATIONS = int(os.environ.get("RIDESHARE_MAX_OUTER", 20))

# --- Augmented Lagrangian / step sizes ---
SIGMA_1 = 2.0
SIGMA_2 = 0.25
GAMMA_LARGE = 1.9
GAMMA_SMALL = 0.1
PROXIMAL_WEIGHT = 1e-3
RHO_FLOOR = 1e-2

# --- Reporting ---
PT_PCE = float(os.environ.get("RIDESHARE_PT_PCE", 3.0))

# --- Oracle limits ---
ORACLE_MAX_NODES = 20
ORACLE_MAX_SEQUENCES = 3
ORACLE_ROUTE_BUDGET = int(os.environ.get("RIDESHARE_ORACLE_ROUTE_BUDGET", 200000))
