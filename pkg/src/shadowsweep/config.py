"""Central numeric tolerances and default planner parameters.

All geometric comparisons in the package go through these constants so that
the tolerance model can be tuned in one place.
"""

# Incidence tolerance for point/segment containment tests, in meters.
EPS_GEOM = 1e-9

# Coordinate grid for snapped boolean operations, in meters. Keeping all
# region booleans on a fixed grid avoids GEOS robustness failures.
PRECISION_GRID = 1e-9

# Area tolerance for region comparisons, in square meters.
EPS_AREA = 1e-6

# Uncovered-area fraction (relative to area(E)) at which web construction
# declares the environment covered.
EPS_COVER_FRAC = 1e-4

# Shadow-event sweeps subdivide a motion into per-pursuer steps no longer
# than diam(E) / SWEEP_STEPS.
SWEEP_STEPS = 500

# Graph connection radius, as a fraction of diam(E), scaled by sqrt(n) for
# the joint metric on E^n.
CONNECT_RADIUS_FRAC = 0.35

# Redundancy factor: a new edge u-v is skipped when the existing graph
# distance between u and v is at most BETA times their joint distance.
BETA = 2.0

# Angular offset (radians) for the auxiliary rays cast on either side of
# each polygon vertex during visibility queries.
RAY_OFFSET = 1e-7

# Relative inward nudge (fraction of diam(E)) applied to query points that
# sit exactly on the boundary, so ray casting starts from the interior.
NUDGE_FRAC = 1e-9

# Refinement: shortcut length decays geometrically by this factor per level,
# down to CUT_MIN_FRAC of the initial path length; the shortcut start point
# advances in steps of the current cut length over CUT_START_DIVISOR.
CUT_DECAY = 0.95
CUT_MIN_FRAC = 1.0 / 200.0
CUT_START_DIVISOR = 10.0

# Minimum accepted length improvement, relative to the initial path length.
EPS_LEN_FRAC = 1e-6

# Stalled-progress criterion: required relative improvement of the best
# contamination within a window of M samples.
SP_IMPROVEMENT = 0.05
