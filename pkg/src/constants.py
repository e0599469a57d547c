# Copyright 2024 Canonical Ltd.
# See LICENSE file for licensing details.

"""File containing all constants."""

from pathlib import Path

# Tool constants
TOOL_NAME = "sperner-lab"
TOOL_VERSION = "0.1.0"
ROOT_DIR_PATH = Path(__file__).resolve().parent.parent
FAMILY_SCHEMA_PATH = Path(__file__).resolve().parent / "family.schema.json"
REPORT_TEMPLATE_PATH = ROOT_DIR_PATH / "templates" / "report.txt.j2"
LOG_LEVELS = ["debug", "info", "warning", "error"]
DEFAULT_LOG_LEVEL = "warning"

# Model constants
MAX_GROUND_SET = 64
FAMILY_KINDS = ("subsets", "compositions", "pairs")

# Coefficient scopes
SCOPE_EXACT = "exact"
SCOPE_AT_MOST = "at-most"
SCOPES = (SCOPE_EXACT, SCOPE_AT_MOST)

# Chain constants
MAX_ALL_CHAINS_N = 8
DEFAULT_CHAIN_SAMPLES = 1000

# Search constants
SEARCH_UNIVERSES = ("subsets", "compositions", "partial", "pairs")
SEARCH_CONSTRAINTS = ("antichain", "chain-free", "meshalkin", "e-m", "rfamily", "unifying", "eg")
PROOF_EXHAUSTED = "exhausted"
PROOF_BUDGET_EXCEEDED = "budget-exceeded"
PROOF_BELOW_CUTOFF = "below-cutoff"
HEREDITARY_SPOT_CHECKS = 8
MAX_SYMMETRY_N = 7
MAX_SEARCH_UNIVERSE = 10000
BUDGET_CHECK_INTERVAL = 256

# Theorems known to the bound, lym and check commands
BOUND_THEOREMS = (
    "sperner",
    "erdos",
    "meshalkin",
    "gst",
    "unifying",
    "e-m",
    "e-g",
    "m-g",
    "rfamily",
)
LYM_THEOREMS = ("sperner", "erdos", "meshalkin", "gst", "unifying", "e-m", "e-g", "m-g")
CHECK_THEOREMS = BOUND_THEOREMS

# Attainability sweep defaults
SWEEP_R_RANGE = range(2, 6)
SWEEP_LSTAR_PREFIX = 6

# CLI exit codes
EXIT_OK = 0
EXIT_VIOLATED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
