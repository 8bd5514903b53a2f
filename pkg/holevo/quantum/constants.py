from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

# Operator validation
HERMITICITY_REJECT_TOL = 1e-8  # asymmetry above this is an input error
DENSITY_EIGENVALUE_TOL = 1e-10  # eigenvalues in [-tol, 0] are clamped to 0
TRACE_TOL = 1e-10
NORM_TOL = 1e-10
PSD_REJECT_TOL = 1e-8  # pinv_sqrt rejects eigenvalues below -tol
ENTROPY_ZERO_CUTOFF = 1e-12  # eigenvalues below this contribute 0 * log 0
DEGENERACY_TOL = 1e-12  # eigenvalues closer than this are treated as one level

# Channel model
PRIOR_SUM_TOL = 1e-10
POVM_PSD_TOL = 1e-9
POVM_SUM_TOL = 1e-8
PURE_STATE_TOL = 1e-9
STOCHASTIC_TOL = 1e-10

# Decision rules
GRAM_RANK_TOL = 1e-12  # Gram eigenvalues below tol * trace are treated as 0
RULE_PSD_TOL = 1e-8
RULE_SUM_TOL = 1e-8

# Optimizers
OPTIMIZER_TOL = 1e-7  # bits
GRADIENT_TOL = 1e-8
MAX_ITERATIONS = 10_000
INITIAL_STEP = 1.0
ACCESSIBLE_RESTARTS = 8
ACCESSIBLE_ROUNDS = 25
BISECTION_STEPS = 80

# Exponents
S_CAP = 100.0
S_GRID_STEP = 1e-3
S_REFINE_TOL = 1e-8
THEOREM1_S_GRID = 101

# Simulation
CONSTRAINED_MIN_ACCEPTANCE = 1e-6
INVARIANT_SAMPLE_EVERY = 100  # re-assert coding invariants on 1% of trials
TRIAL_BLOCK_SIZE = 256

# Defaults used when Django settings are not configured
DEFAULT_DIMENSION_CAP = 4096
DEFAULT_ENUMERATION_CAP = 1_000_000
DEFAULT_MAX_THREADS = 8


def _setting(name: str, default: int) -> int:
    try:
        return int(getattr(settings, name, default))
    except ImproperlyConfigured:
        return default


def dimension_cap() -> int:
    """Largest dense Hilbert-space dimension the toolkit will materialize."""
    return _setting("HOLEVO_DIMENSION_CAP", DEFAULT_DIMENSION_CAP)


def enumeration_cap() -> int:
    """Largest number of words or multi-indices enumerated exhaustively."""
    return _setting("HOLEVO_ENUMERATION_CAP", DEFAULT_ENUMERATION_CAP)


def max_threads() -> int:
    return _setting("HOLEVO_MAX_THREADS", DEFAULT_MAX_THREADS)
