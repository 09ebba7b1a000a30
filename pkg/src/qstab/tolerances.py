"""Named numerical tolerances shared across the package.

All analysis routines work in double precision on dense matrices of
desk-scale dimension (d below a few tens), where the quantities of
interest are separated by physical rates far above these thresholds.
"""

# Relative singular-value cutoff for numerical rank decisions.
RANK_RTOL = 1e-10

# Absolute singular-value floor, used when a matrix is numerically zero.
RANK_ATOL = 1e-12

# Orthonormality / subspace-equality tolerance (on projector Frobenius
# distance, scaled by the ambient dimension).
ORTH_TOL = 1e-10

# Hermiticity tolerance.
HERM_TOL = 1e-9

# Trace-preservation residual per unit dimension: a channel on C^d is
# accepted as TP when ||sum_k M_k^dag M_k - I||_F <= TP_TOL_PER_DIM * d.
TP_TOL_PER_DIM = 1e-9

# Invariance residual, relative to the largest Kraus-operator norm.
INV_TOL = 1e-10

# Spectral-radius gap deciding sigma < 1 (and strict decrease of radii).
SPEC_TOL = 1e-9
