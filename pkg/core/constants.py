"""
Application-wide constants for KPP Front Lab

This module centralizes all magic numbers and numerical tolerances
so that solvers, verifiers and the CLI agree on them.
"""

# =============================================================================
# MODEL PARAMETERS
# =============================================================================

# Minimal admissible wave speed
MIN_WAVE_SPEED = 2.0

# Delay interval on which the bounding functions are defined: (TAU_LOWER, TAU_UPPER]
TAU_LOWER = 1.0
TAU_UPPER = 1.5

# Delay fixed for R, D and F
TAU_FIXED = 1.5


# =============================================================================
# QUADRATURE
# =============================================================================

# Default absolute / relative tolerance for adaptive Gauss-Legendre
QUAD_ABS_TOL = 1e-12
QUAD_REL_TOL = 1e-10

# Maximum number of panel bisections
QUAD_MAX_SUBDIVISIONS = 64

# Nodes per Gauss-Legendre panel
QUAD_PANEL_NODES = 15


# =============================================================================
# BOUNDING FUNCTIONS
# =============================================================================

# Radius around 0 where A_+-, B and D switch to their quadratic Taylor model
TAYLOR_RADIUS = 1e-4

# Beyond this abscissa derivatives of rho are not evaluated
RHO_DERIV_MAX_X = 50.0

# Tolerance of the F(x) < x consistency assertion
F_CONSISTENCY_TOL = 1e-9

# Finite differences: base step (scaled by max(1, |x|)) with one Richardson level
FD_BASE_STEP = 1e-2

# Step of the derivative cross-check oracle on rho''
FD_ORACLE_STEP = 1e-5

# |f'| below this makes a Schwarzian degenerate
SCHWARZIAN_MIN_DERIV = 1e-12

# Iterates of F below this are treated as converged to 0
F_ITERATION_FLOOR = 1e-12

# Slack of the bounding-function invariant suite
BOUNDS_CHECK_TOL = 1e-9


# =============================================================================
# PROFILE SOLVER
# =============================================================================

# Left Dirichlet amplitude phi(-L1)
LEFT_AMPLITUDE = 1e-6

# Left end of the profile domain
LEFT_DOMAIN_LENGTH = 60.0

# Right end of the domain, in units of max(1, h) * c / RIGHT_DOMAIN_REFERENCE_SPEED
RIGHT_DOMAIN_PER_DELAY = 160.0

# Speed at which the right end sits RIGHT_DOMAIN_PER_DELAY delays out
RIGHT_DOMAIN_REFERENCE_SPEED = 2.0

# Grid nodes per delay h
NODES_PER_DELAY = 64

# Grid step used when the delay vanishes
ZERO_DELAY_STEP = 0.05

# Newton iteration
NEWTON_TOL = 1e-10
NEWTON_MAX_ITER = 50
NEWTON_MAX_HALVINGS = 12

# Rungs of the delay continuation ladder (must divide NODES_PER_DELAY)
CONTINUATION_RUNGS = 8


# =============================================================================
# PDE SIMULATOR
# =============================================================================

# Minimal spatial domain length
PDE_MIN_DOMAIN = 400.0

# Default spatial domain, mesh width and simulated time
PDE_DOMAIN = 800.0
PDE_DX = 0.2
PDE_FINAL_TIME = 300.0

# Initial step position x0
PDE_STEP_POSITION = 20.0

# Explicit diffusion limit dt <= PDE_STABILITY_FACTOR * dx^2
PDE_STABILITY_FACTOR = 0.4

# Time between front-position samples
PDE_SAMPLE_INTERVAL = 1.0

# Level tracked as the front
FRONT_LEVEL = 0.5

# Minimal samples in the fitted window for the speed estimate
SPEED_MIN_SAMPLES = 10

# Largest aligned distance between the PDE and the boundary-value profile
PROFILE_MATCH_TOL = 1e-2


# =============================================================================
# OSCILLATION ANALYSIS
# =============================================================================

# Oscillations with smaller amplitude are discarded
NOISE_FLOOR = 1e-9

# Slack for strict inequalities
CHECK_TOL = 1e-6

# Minimal number of extrema for a tail estimate
MIN_TAIL_EXTREMA = 4

# Tail limits below this count as convergence to the equilibrium
LIMIT_THRESHOLD = 1e-3

# F-iteration certificate length
F_CERTIFICATE_STEPS = 50

# Oscillations closer than this many delays max(1, h) to the right end are ignored
RIGHT_BOUNDARY_LAYER = 2.0


# =============================================================================
# SPECTRAL
# =============================================================================

# Minimal |chi| on a contour before it is inflated
CONTOUR_MIN_MODULUS = 1e-8
CONTOUR_INFLATION = 1e-3
CONTOUR_MAX_RETRIES = 5

# Winding must be this close to an integer
WINDING_TOLERANCE = 0.25

# Largest phase increment between consecutive contour samples (radians)
MAX_PHASE_STEP = 0.3

# Contour refinement passes
CONTOUR_MAX_REFINEMENTS = 30

# Delay bracket and resolution of the root-count bisection
BISECT_TAU_LOW = 1.5
BISECT_TAU_HIGH = 2.5
BISECT_WIDTH = 1e-4

# Allowed gap between the bisected and the closed-form crossing delay
CROSSING_MATCH_TOL = 1e-4

# Root polishing
ROOT_RESIDUAL_TOL = 1e-10
ROOT_NEWTON_MAX_ITER = 60
ROOT_SPLIT_MAX_DEPTH = 16


# =============================================================================
# OUTPUT
# =============================================================================

# Significant digits of floats in CSV output
CSV_FLOAT_DIGITS = 17

# Sampling of the bounds table
BOUNDS_X_MIN = -5.0
BOUNDS_X_MAX = 10.0
BOUNDS_X_POINTS = 401


# =============================================================================
# LOGGING
# =============================================================================

# Log level
LOG_LEVEL = "INFO"

# Log format
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
