SEED_ENVVAR = "FACELATTICE_SEED"
COP_LIMIT_ENVVAR = "FACELATTICE_COP_LIMIT"
DEBUG_ENVVAR = "FACELATTICE_DEBUG"

DEFAULT_SEED = 0
# 2^n supports are enumerated by the copositivity oracle
DEFAULT_COP_LIMIT = 8
DEFAULT_RAY_COUNT = 32
DEFAULT_CLI_SAMPLES = 200

# CP^n = DNN^n and SPN^n = COP^n only hold up to this order
SMALL_ORDER_LIMIT = 4

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2

REPORT_SCHEMA_VERSION = 1
