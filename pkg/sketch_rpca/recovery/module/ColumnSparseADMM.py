"""
Class for decomposing a matrix into a low-rank and a column-sparse part,
	min ||L||_* + lambda ||C||_{1,2}  s.t.  L + C = D  (or ||L + C - D||_F <= epsilon),
with the alternating direction method of multipliers, and the subspace recovery built on it.
"""
import numpy as np
import time

from dataclasses import replace
from loguru import logger
from typing import (
	Callable,
	Optional,
	Tuple
)

from sketch_rpca.configs.configs import (
	COLUMN_NORM_TOL,
	DETECTION_THRESHOLD,
	PENALTY_MU,
	PENALTY_TAU,
	RANK_TOL_BASIS
)
from sketch_rpca.custom_types.data_types import (
	DataInstance,
	DenseMatrix
)
from sketch_rpca.custom_types.recovery_types import (
	ConvexSolveConfig,
	Decomposition,
	DetectionSpace,
	OutlierReport,
	SubspaceBasis
)
from sketch_rpca.custom_types.sketch_types import (
	Sketch,
	SketchPlan
)
from sketch_rpca.exceptions import (
	ConvergenceError,
	InvalidParameterError,
	RecoveryFailure,
	SolverTimeout
)
from sketch_rpca.metrics.module.Metrics import detect_outliers_full
from sketch_rpca.recovery.helpers.linalg_helpers import (
	column_soft_threshold,
	l12_norm,
	nuclear_norm,
	project_l2_ball,
	svd_threshold
)
from sketch_rpca.recovery.module.IndependentOutliers import learn_basis
from sketch_rpca.sketching.module.Sketching import build_sketch

NOISE_BLOCK_ITERS = 50  # alternating passes for the joint (C, E) update of the noisy program
NOISE_BLOCK_TOL = 1e-12

IterationCallback = Callable[[int, np.ndarray, np.ndarray, np.ndarray, float], None]


class ColumnSparseADMM:
	def __init__(self, matrix: DenseMatrix, config: ConvexSolveConfig, callback: Optional[IterationCallback] = None):
		# Data
		self._d = np.asarray(matrix, dtype=np.float64)  # matrix to decompose
		self._d_norm = float(np.linalg.norm(self._d))  # Frobenius norm of D
		self._lam = config.lam  # weight of the l1,2 term
		self._epsilon = config.noise_epsilon or 0.0  # radius of the Frobenius ball (0 for the exact constraint)
		# Solver settings
		self.max_iters = config.max_iters
		self.primal_tol = config.primal_tol  # relative primal residual ||D - L - C - E||_F / ||D||_F
		self.dual_tol = config.dual_tol  # relative dual residual rho ||dC||_F / ||Y||_F
		self.penalty_adapt = config.penalty_adapt  # residual balancing of the penalty
		self.time_limit = config.time_limit  # seconds
		self.callback = callback  # called after every iteration with (k, L, C, Y, rho)
		# Iterates
		self.rho = config.penalty  # augmented Lagrangian penalty
		self.low_rank = np.zeros_like(self._d)  # L
		self.column_sparse = np.zeros_like(self._d)  # C
		self.noise_part = np.zeros_like(self._d)  # E (stays zero for the exact constraint)
		self.dual = np.zeros_like(self._d)  # Y, multiplier of L + C + E = D
		# Status
		self.iterations = 0
		self.primal_residual = np.inf
		self.dual_residual = np.inf
		self.merit_history = []  # rho ||dC||^2 + ||dY||^2 / rho per iteration; non-increasing at fixed rho
		self.status = None  # "Converged", "Trivial", "MaxIters" or "Timeout"
		self._nuclear = 0.0  # nuclear norm of the last L, from its thresholded singular values

	def __update_noise_block(self, target: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
		"""
		Minimizes lambda ||C||_{1,2} + I(||E||_F <= epsilon) + rho/2 ||target - C - E||^2 jointly in (C, E).
		"""
		tau = self._lam / self.rho
		if self._epsilon == 0:
			return column_soft_threshold(target, tau), self.noise_part

		c, e = self.column_sparse, self.noise_part
		for _ in range(NOISE_BLOCK_ITERS):
			c_new = column_soft_threshold(target - e, tau)
			e_new = project_l2_ball(target - c_new, self._epsilon)
			change = np.linalg.norm(c_new - c) + np.linalg.norm(e_new - e)
			c, e = c_new, e_new
			if change <= NOISE_BLOCK_TOL * max(self._d_norm, 1.0):
				break
		return c, e

	def solve(self):
		"""
		Runs the ADMM iterations until both relative residuals fall below their tolerances.
		"""
		logger.debug(f'-- decomposing a {self._d.shape[0]}x{self._d.shape[1]} matrix (lambda={self._lam:.4g})...')

		if self._d_norm == 0 or self._epsilon >= self._d_norm:
			# zero is feasible and optimal
			self.noise_part = self._d.copy()
			self.primal_residual = self.dual_residual = 0.0
			self.status = 'Trivial'
			logger.debug('-- decomposing... DONE! (trivial solution)')
			return

		start = time.perf_counter()
		for k in range(1, self.max_iters + 1):
			inv_rho = 1.0 / self.rho
			self.low_rank, self._nuclear = svd_threshold(
				self._d - self.column_sparse - self.noise_part + inv_rho * self.dual, inv_rho)
			c_new, e_new = self.__update_noise_block(self._d - self.low_rank + inv_rho * self.dual)

			gap = self._d - self.low_rank - c_new - e_new
			delta_y = self.rho * gap
			delta_ce = (c_new - self.column_sparse) + (e_new - self.noise_part)
			self.dual = self.dual + delta_y
			self.column_sparse, self.noise_part = c_new, e_new
			self.iterations = k

			self.merit_history.append(
				float(self.rho * np.sum(delta_ce ** 2) + np.sum(delta_y ** 2) / self.rho))
			self.primal_residual = float(np.linalg.norm(gap) / self._d_norm)
			self.dual_residual = float(
				self.rho * np.linalg.norm(delta_ce) / max(np.linalg.norm(self.dual), np.finfo(float).eps))

			if self.callback is not None:
				self.callback(k, self.low_rank, self.column_sparse, self.dual, self.rho)

			if self.primal_residual < self.primal_tol and self.dual_residual < self.dual_tol:
				self.status = 'Converged'
				break

			if self.time_limit is not None and time.perf_counter() - start > self.time_limit:
				self.status = 'Timeout'
				logger.warning(f'ADMM stopped by its time limit of {self.time_limit} s after {k} iterations')
				raise SolverTimeout(
					f'ADMM exceeded its time limit of {self.time_limit} s',
					partial=self.generate_outputs(),
					primal_residual=self.primal_residual,
					dual_residual=self.dual_residual)

			if self.penalty_adapt:
				if self.primal_residual > PENALTY_MU * self.dual_residual:
					self.rho *= PENALTY_TAU
				elif self.dual_residual > PENALTY_MU * self.primal_residual:
					self.rho /= PENALTY_TAU
		else:
			self.status = 'MaxIters'
			raise ConvergenceError(
				f'ADMM did not converge in {self.max_iters} iterations '
				f'(primal={self.primal_residual:.3g}, dual={self.dual_residual:.3g})',
				partial=self.generate_outputs(),
				primal_residual=self.primal_residual,
				dual_residual=self.dual_residual)

		logger.debug(f'-- decomposing... DONE! ({self.iterations} iterations)')

	def generate_outputs(self) -> Decomposition:
		"""
		Packs the current iterate, with the objective evaluated at L and C.
		"""
		return Decomposition(
			low_rank=self.low_rank,
			column_sparse=self.column_sparse,
			iterations=self.iterations,
			final_primal_residual=self.primal_residual,
			final_dual_residual=self.dual_residual,
			objective=self._nuclear + self._lam * l12_norm(self.column_sparse),
			lam=self._lam,
			dual_variable=self.dual,
			noise_part=self.noise_part if self._epsilon > 0 else None
		)


def default_lambda(k_estimate: int) -> float:
	"""
	lambda = 3 / (7 sqrt(K)). Without the true outlier count K, the number of sketched columns is used instead.
	:param k_estimate: outlier count (or its estimate), >= 1
	:return: the weight of the l1,2 term
	"""
	if k_estimate < 1:
		raise InvalidParameterError(f'k_estimate = {k_estimate} must be >= 1')
	return 3 / (7 * np.sqrt(k_estimate))


def decompose(matrix: DenseMatrix, config: ConvexSolveConfig,
              callback: Optional[IterationCallback] = None) -> Decomposition:
	"""
	Solves min ||L||_* + lambda ||C||_{1,2} s.t. L + C = D.
	:param matrix: D
	:param config: solver configuration; its noise_epsilon is ignored
	:param callback: optional per-iteration hook (k, L, C, Y, rho)
	:return: the decomposition
	"""
	if config.noise_epsilon:
		config = replace(config, noise_epsilon=None)
	solver = ColumnSparseADMM(matrix, config, callback)
	solver.solve()
	return solver.generate_outputs()


def decompose_noisy(matrix: DenseMatrix, config: ConvexSolveConfig,
                    callback: Optional[IterationCallback] = None) -> Decomposition:
	"""
	Solves min ||L||_* + lambda ||C||_{1,2} s.t. ||L + C - D||_F <= epsilon, with epsilon = config.noise_epsilon.
	epsilon = 0 is the exact program; epsilon >= ||D||_F gives L = C = 0.
	"""
	if config.noise_epsilon is None:
		raise InvalidParameterError('decompose_noisy needs config.noise_epsilon')
	solver = ColumnSparseADMM(matrix, config, callback)
	solver.solve()
	return solver.generate_outputs()


def duality_gap(matrix: DenseMatrix, decomposition: Decomposition) -> float:
	"""
	Relative gap between the primal objective at the feasible point (L, D - L) and the dual objective <Y, D> at the
	multiplier rescaled into the dual feasible set {||Y||_2 <= 1, max_j ||Y_j||_2 <= lambda}.
	"""
	d = np.asarray(matrix, dtype=np.float64)
	y = np.asarray(decomposition.dual_variable)
	lam = decomposition.lam
	primal = nuclear_norm(decomposition.low_rank) + lam * l12_norm(d - decomposition.low_rank)
	spectral = np.linalg.norm(y, 2) if y.size else 0.0
	column = np.linalg.norm(y, axis=0).max() / lam if y.size else 0.0
	dual = float(np.sum(y * d) / max(1.0, spectral, column))
	return (primal - dual) / max(abs(primal), np.finfo(float).eps)


def optimality_certificate(decomposition: Decomposition, rank_tol: float = 1e-8) -> dict:
	"""
	Residuals of the subdifferential conditions at the returned point, with Y the final multiplier:
	 - Y = U V^T + W with U^T W = 0, W V = 0 and ||W||_2 <= 1 (U, V singular vectors of L)
	 - Y_j = lambda C_j / ||C_j|| on nonzero columns of C and ||Y_j|| <= lambda on zero columns
	:return: {'tangent': ||U^T Y V - I||_2, 'cross': norm of the mixed projections of Y,
		'w_norm': ||W||_2, 'support': largest deviation on nonzero columns,
		'off_support': max ||Y_j|| / lambda on zero columns}
	"""
	y = np.asarray(decomposition.dual_variable)
	lam = decomposition.lam
	u, s, vt = np.linalg.svd(decomposition.low_rank, full_matrices=False)
	r = int(np.sum(s > rank_tol * s[0])) if s.size and s[0] > 0 else 0
	u, v = u[:, :r], vt[:r, :].T

	proj_u = np.eye(y.shape[0]) - u @ u.T
	proj_v = np.eye(y.shape[1]) - v @ v.T
	w = proj_u @ y @ proj_v
	tangent = np.linalg.norm(u.T @ y @ v - np.eye(r), 2) if r else 0.0
	cross = max(
		np.linalg.norm(proj_u @ y @ v, 2) if r else 0.0,
		np.linalg.norm(u @ (u.T @ y) @ proj_v, 2) if r else 0.0)

	c_norms = np.linalg.norm(decomposition.column_sparse, axis=0)
	y_norms = np.linalg.norm(y, axis=0)
	on = c_norms > 0
	support = 0.0
	if on.any():
		expected = lam * decomposition.column_sparse[:, on] / c_norms[on]
		support = float(np.abs(y[:, on] - expected).max())
	off_support = float(y_norms[~on].max() / lam) if (~on).any() else 0.0

	return {
		'tangent': float(tangent),
		'cross': float(cross),
		'w_norm': float(np.linalg.norm(w, 2)) if w.size else 0.0,
		'support': support,
		'off_support': off_support
	}


def recover_subspace_alg2(instance: DataInstance, plan: SketchPlan, config: Optional[ConvexSolveConfig] = None,
                          column_norm_tol: float = COLUMN_NORM_TOL, rank_tol: float = RANK_TOL_BASIS,
                          detection_space: DetectionSpace = 'full_data',
                          detection_threshold: float = DETECTION_THRESHOLD,
                          sketch: Optional[Sketch] = None) -> Tuple[SubspaceBasis, OutlierReport]:
	"""
	Sketch, convex decomposition of the compressed sketch, basis selection among the columns where C vanishes and
	outlier detection on all N2 columns.
	:param instance: data instance
	:param plan: sketch plan
	:param config: solver configuration (lambda = 3 / (7 sqrt(m1')) when omitted)
	:param column_norm_tol: columns of C whose norm relative to the sketch column exceeds it are outliers
	:param rank_tol: rank cutoff used to learn the basis
	:param detection_space: "full_data" or "compressed"
	:param detection_threshold: threshold on the relative projection residual of each data column
	:param sketch: prebuilt sketch of the instance (built from the plan when omitted)
	:return: (subspace basis, outlier report over the N2 columns)
	"""
	if sketch is None:
		sketch = build_sketch(instance, plan)
	if config is None:
		config = ConvexSolveConfig(lam=default_lambda(sketch.effective_m1))

	if config.noise_epsilon is None:
		decomposition = decompose(sketch.compressed, config)
	else:
		decomposition = decompose_noisy(sketch.compressed, config)

	outliers = decomposition.outlier_columns(sketch.compressed, column_norm_tol)
	if outliers.all():
		raise RecoveryFailure(f'every one of the {sketch.effective_m1} sketched columns was flagged as an outlier')
	logger.debug(f'-- {int(outliers.sum())} outliers in the sketch')

	basis = learn_basis(sketch, ~outliers, rank_tol)
	row_operator = sketch.row_operator if detection_space == 'compressed' else None
	report = detect_outliers_full(instance.observed, basis, row_operator, detection_threshold)
	return basis, report
