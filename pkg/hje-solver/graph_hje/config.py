"""Configuration and constants for the graph Hamilton-Jacobi solver.

This module provides centralized default values and numerical tolerances used
throughout the solver library and the experiment harness.
"""

from __future__ import annotations

# Tolerances
SIMPLEX_SUM_TOLERANCE = 1e-12
SIMPLEX_MEMBERSHIP_TOLERANCE = 1e-12
LEVEL_INTEGRALITY_TOLERANCE = 1e-9
STEP_INTEGRALITY_TOLERANCE = 1e-9
UNIFORM_BOUND_SLACK = 1e-10

# Implicit scheme defaults (fixed iteration budget and tolerance)
DEFAULT_IMPLICIT_MAX_ITERS = 10
DEFAULT_IMPLICIT_TOL = 1e-6
LOCAL_SOLVE_BISECTIONS = 60

# A run aborts once sup|U| exceeds this factor times (||U0||_inf + 1)
BLOWUP_FACTOR = 1e6

# Sampling budgets for the Lipschitz and dissipation estimators
CFL_SAMPLE_POINTS = 200
CFL_SAMPLE_MOMENTA = 20
LF_GAMMA_SAMPLE_MOMENTA = 64
FINITE_DIFFERENCE_STEP = 1e-6

# Default graph: the complete graph on three vertices with unit weights
DEFAULT_VERTEX_COUNT = 3
DEFAULT_EDGE_WEIGHT = 1.0

# Output formatting
CSV_FLOAT_FORMAT = "%.17g"
CSV_LINE_TERMINATOR = "\n"
MANIFEST_FILENAME = "manifest.json"
