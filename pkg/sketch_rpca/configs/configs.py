# Rank determination
RANK_TOL_COHERENCE = 1e-9  # singular values below this fraction of sigma_1 are zero (coherence estimation)
RANK_TOL_BASIS = 1e-8  # same, for the inlier block when learning the basis
LSTSQ_RCOND = 1e-10  # cutoff for the rank-revealing least-squares solve of the residual test
QR_UPDATE_COND_LIMIT = 1e8  # diagonal ratio of the column-deleted R above which the residual test refactorizes

# Outlier detection
REL_THRESHOLD = 1e-6  # relative residual above which a sketched column is an outlier (noiseless)
DETECTION_THRESHOLD = 1e-6  # relative projection residual above which a data column is an outlier
COLUMN_NORM_TOL = 1e-4  # relative column norm of C above which a sketched column is an outlier (convex path)

# Norm-constrained least squares (noisy residual test)
NOISY_MAX_ITERS = 10000  # iteration cap of the accelerated projected gradient
NOISY_TOL = 1e-8  # tolerance on the constrained objective

# ADMM for the nuclear + l1,2 program
PRIMAL_TOL = 1e-7  # relative primal residual
DUAL_TOL = 1e-7  # relative dual residual
MAX_ITERS = 5000
PENALTY = 1.0  # initial augmented Lagrangian penalty
PENALTY_ADAPT = True  # residual balancing
PENALTY_MU = 10.0  # residual ratio that triggers an update
PENALTY_TAU = 2.0  # multiplicative update of the penalty

# Bound constants
C1 = 10.0  # numerical constant of the row sampling bound
C2 = 10.0  # numerical constant of the row sampling bound
F_HALF = 1 / 24  # f(1/2) for the Gaussian exponent f(e) = e^2/4 - e^3/6
DELTA = 0.05  # default failure probability
C_CONCENTRATION = 2.0  # default c > 1 of the outlier-count concentration term

# Experiments
SUCCESS_TOL = 1e-6  # subspace error below which recovery is exact
TRIALS = 20  # Monte-Carlo trials per grid cell
OUTLIER_SIGMA = 20.0  # standard deviation of outlier entries
BASELINE_TIMEOUT = 600  # seconds; full-data baseline solves above this are censored
N_JOBS = -1  # joblib workers for grids
