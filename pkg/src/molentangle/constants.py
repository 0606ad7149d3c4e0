# src/molentangle/constants.py
"""Central constants used across the project."""

import math


# --- env keys ---
DEFAULT_ENV_LOG_LEVEL: str = "LOG_LEVEL"

# --- program defaults ---
DEFAULT_LOG_LEVEL: str = "info"
DEFAULT_WORKERS: int = 1

# --- config defaults ---
DEFAULT_STRICT_CONFIG: bool = True
DEFAULT_OUT_DIR: str = "out"
DEFAULT_SEED: int = 0
MAX_SEED: int = 2**64 - 1

# --- exit codes ---
EXIT_OK: int = 0
EXIT_FAILURE: int = 1
EXIT_CONFIG_ERROR: int = 2
EXIT_BUDGET_EXHAUSTED: int = 3
EXIT_NUMERIC_ERROR: int = 4

# --- state space ---
DEFAULT_N_MAX: int = 8
MIN_N_MAX: int = 3
NORM_TOLERANCE: float = 1e-12
BOUNDARY_TOLERANCE: float = 1e-6  # population allowed on n = n_max - 1
OVERFLOW_TOLERANCE: float = 1e-12  # population a sideband may push past n_max
DUMP_CUTOFF: float = 1e-12
# quanta a trial can climb above its sampled Fock number (herald pump + QLS)
MOTION_HEADROOM: int = 2

# --- noise defaults ---
DEFAULT_NBAR_M: float = 0.05
DEFAULT_ATOM_COHERENCE_US: float = 1000.0
DEFAULT_COMB_COHERENCE_US: float = 3000.0
DEFAULT_PREP_ERROR: float = 0.0
DEFAULT_LEAK_PER_PULSE: float = 0.0
DEFAULT_LEAK_PER_TRIAL: float = 0.0
DEFAULT_DETECT_BRIGHT_MEAN: float = 20.0
DEFAULT_DETECT_DARK_MEAN: float = 0.4
DEFAULT_DETECT_THRESHOLD: int = 6
# P(-3/2), P(-5/2), P(leaked) of a molecule before heralding
DEFAULT_HERALD_PRIOR: tuple[float, float, float] = (0.5, 0.5, 0.0)
INFINITE_COHERENCE: float = math.inf

# --- pulse durations (µs, for a pi rotation) ---
ATOM_SIDEBAND_PI_US: float = 45.0
ATOM_CARRIER_PI_US: float = 10.0
MOL_RAMAN_PLATEAU_US: float = 162.5
MOL_RAMAN_EDGE_US: float = 300.0
MOL_RAMAN_PULSE_US: float = MOL_RAMAN_PLATEAU_US + 2 * MOL_RAMAN_EDGE_US
COMB_CARRIER_PI_US: float = 50.0

# --- herald / campaign ---
DEFAULT_MAX_HERALD_ATTEMPTS: int = 50
DEFAULT_HERALD_CONFIRMATIONS: int = 1
DEFAULT_HERALD_SCHEDULE: tuple[str, ...] = ("minus52", "minus32")
DEFAULT_BUDGET_FACTOR: int = 10
DEFAULT_POPULATION_TRIALS: int = 200

# --- analysis ---
DEFAULT_BOOTSTRAP_RESAMPLES: int = 1000
MIN_BOOTSTRAP_RESAMPLES: int = 100
MIN_FRINGE_POINTS: int = 3
# variance of a uniformly distributed phase on (-pi, pi]
UNIFORM_PHASE_VARIANCE: float = math.pi**2 / 3

# --- comb ---
DEFAULT_COMB_SIGN: int = -1
DEFAULT_N_TOLERANCE: float = 0.1
DEFAULT_ROTATIONAL_TOLERANCE: float = 0.01
DEFAULT_ROTATIONAL_CONSTANT_HZ: int = 142_500_000_000
DEFAULT_SCAN_SHOTS: int = 1000
DEFAULT_DELTA_F_REP_HZ: int = 10_000
DEFAULT_SCAN_POINTS: int = 41
