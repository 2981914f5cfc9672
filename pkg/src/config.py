from decouple import config

LOG_LEVEL = config("LOG_LEVEL", default="WARN")

DEFAULT_SEED = config("DEFAULT_SEED", default=42, cast=int)
MC_PATHS = config("MC_PATHS", default=100_000, cast=int)
MC_STEP = config("MC_STEP", default=1 / 50, cast=float)
MC_BLOCK_SIZE = config("MC_BLOCK_SIZE", default=8192, cast=int)
MC_WORKERS = config("MC_WORKERS", default=1, cast=int)
MAX_REJECTION_RATE = config("MAX_REJECTION_RATE", default=0.001, cast=float)
Z_THRESHOLD = config("Z_THRESHOLD", default=3.0, cast=float)
# sigma * eta * |rho| * T above which the closed forms are flagged as outside their accuracy range
FROZEN_DRIFT_REGIME = config("FROZEN_DRIFT_REGIME", default=0.5, cast=float)

SOLVER_TOLERANCE = config("SOLVER_TOLERANCE", default=1e-10, cast=float)
SOLVER_XTOL = config("SOLVER_XTOL", default=1e-15, cast=float)
SOLVER_MAX_ITER = config("SOLVER_MAX_ITER", default=200, cast=int)

DEFAULT_DISPLACEMENT = config("DEFAULT_DISPLACEMENT", default=0.01, cast=float)
CCS_FREQUENCY_MONTHS = config("CCS_FREQUENCY_MONTHS", default=3, cast=int)
