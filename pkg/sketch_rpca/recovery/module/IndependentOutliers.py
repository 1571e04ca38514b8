"""
Subspace recovery under the independent outlier model.
Every column of the sketch is regressed on all the other columns: inliers are linear combinations of other inliers
(zero residual), while independent outliers are not. A basis is then picked among the sketched inliers and the
corresponding unsketched columns span the recovered subspace.
"""
import numpy as np

from joblib import Parallel, delayed
from loguru import logger
from scipy import linalg
from typing import (
	Optional,
	Tuple
)

from sketch_rpca.configs.configs import (
	DETECTION_THRESHOLD,
	LSTSQ_RCOND,
	NOISY_MAX_ITERS,
	NOISY_TOL,
	QR_UPDATE_COND_LIMIT,
	RANK_TOL_BASIS,
	REL_THRESHOLD
)
from sketch_rpca.custom_types.data_types import DataInstance
from sketch_rpca.custom_types.recovery_types import (
	DetectionSpace,
	OutlierReport,
	PNorm,
	ResidualProfile,
	SubspaceBasis
)
from sketch_rpca.custom_types.sketch_types import (
	Sketch,
	SketchPlan
)
from sketch_rpca.exceptions import (
	ConvergenceError,
	InconsistentBasisError,
	InvalidParameterError,
	RecoveryFailure
)
from sketch_rpca.metrics.module.Metrics import detect_outliers_full
from sketch_rpca.recovery.helpers.linalg_helpers import (
	numerical_rank,
	orthonormalize,
	project_l1_ball,
	project_l2_ball
)
from sketch_rpca.sketching.module.Sketching import build_sketch


def _split_column(sketch: Sketch, column_index: int) -> Tuple[np.ndarray, np.ndarray]:
	if not 0 <= column_index < sketch.effective_m1:
		raise InvalidParameterError(f'column_index = {column_index} outside [0, {sketch.effective_m1})')
	d = sketch.compressed[:, column_index]
	others = np.delete(sketch.compressed, column_index, axis=1)
	return d, others


def factorize_sketch(sketch: Sketch) -> Optional[Tuple[np.ndarray, np.ndarray]]:
	"""
	Full QR factorization of the compressed sketch, reused by every residual test through a column deletion.
	Only returned when removing any one column leaves a full column rank matrix (m1' - 1 <= m2); None otherwise.
	"""
	m2, m1 = sketch.compressed.shape
	if m1 < 2 or m1 - 1 > m2:
		return None
	return linalg.qr(sketch.compressed)


def _residual_from_factorization(factorization: Tuple[np.ndarray, np.ndarray], d: np.ndarray,
                                 column_index: int) -> Optional[float]:
	q, r = factorization
	q_del, r_del = linalg.qr_delete(q, r, column_index, 1, which='col')
	k = r_del.shape[1]
	diagonal = np.abs(np.diag(r_del[:k, :k]))
	if diagonal.min() * QR_UPDATE_COND_LIMIT <= diagonal.max():
		return None
	return float(np.linalg.norm(q_del[:, k:].T @ d))


def residual_test(sketch: Sketch, column_index: int,
                  factorization: Optional[Tuple[np.ndarray, np.ndarray]] = None) -> float:
	"""
	Minimum l2 residual of regressing column i of the compressed sketch on all its other columns,
	min_z || d_i - Q_i z ||_2, solved with a rank-revealing (complete orthogonal) least-squares factorization.
	With a factorization of the whole sketch, the QR of the other columns is obtained by deleting column i; the
	solve falls back to the rank-revealing one when the updated triangle is too ill-conditioned.
	:param sketch: data sketch
	:param column_index: position of the column in the sketch
	:param factorization: (Q, R) of the compressed sketch, from factorize_sketch (optional)
	:return: the minimum residual
	"""
	d, others = _split_column(sketch, column_index)
	if others.shape[1] == 0:
		logger.warning('sketch holds a single column; it is trivially an outlier candidate')
		return float(np.linalg.norm(d))
	if not np.any(d):
		return 0.0
	if factorization is not None:
		residual = _residual_from_factorization(factorization, d, column_index)
		if residual is not None:
			return residual
	z, _, _, _ = linalg.lstsq(others, d, cond=LSTSQ_RCOND, lapack_driver='gelsy')
	return float(np.linalg.norm(d - others @ z))


def residual_test_noisy(sketch: Sketch, column_index: int, omega: float, p_norm: PNorm = 2,
                        max_iters: int = NOISY_MAX_ITERS, tol: float = NOISY_TOL) -> float:
	"""
	Norm-constrained version of the residual test, min_z || d_i - Q_i z ||_2 s.t. ||z||_p <= omega.
	Solved by accelerated projected gradient with adaptive restart on f(z) = 0.5 || d_i - Q_i z ||^2.
	:param sketch: data sketch
	:param column_index: position of the column in the sketch
	:param omega: radius of the constraint (adjusted to the noise level)
	:param p_norm: 1 or 2
	:param max_iters: iteration cap
	:param tol: tolerance on the projected gradient, relative to ||Q_i^T d_i||
	:return: the minimum residual
	"""
	if omega < 0:
		raise InvalidParameterError(f'omega = {omega} must be >= 0')
	if p_norm not in (1, 2):
		raise InvalidParameterError(f'p_norm = {p_norm} must be 1 or 2')
	d, others = _split_column(sketch, column_index)
	if omega == 0 or others.shape[1] == 0 or not np.any(d):
		return float(np.linalg.norm(d))

	project = project_l2_ball if p_norm == 2 else project_l1_ball
	norm = (lambda z: np.linalg.norm(z)) if p_norm == 2 else (lambda z: np.abs(z).sum())

	# Inactive constraint
	z_ls, _, _, _ = linalg.lstsq(others, d, cond=LSTSQ_RCOND, lapack_driver='gelsy')
	if norm(z_ls) <= omega:
		return float(np.linalg.norm(d - others @ z_ls))

	lipschitz = linalg.norm(others, 2) ** 2
	gram = others.T @ others
	qtd = others.T @ d
	scale = max(1.0, float(np.linalg.norm(qtd)))

	z = project(np.zeros(others.shape[1]), omega)
	y = z.copy()
	t = 1.0
	for _ in range(max_iters):
		z_new = project(y - (gram @ y - qtd) / lipschitz, omega)
		step = y - z_new
		if lipschitz * np.linalg.norm(step) <= tol * scale:
			return float(np.linalg.norm(d - others @ z_new))
		if np.dot(step, z_new - z) > 0:
			# restart the momentum
			t = 1.0
			y = z_new.copy()
		else:
			t_new = (1 + np.sqrt(1 + 4 * t ** 2)) / 2
			y = z_new + ((t - 1) / t_new) * (z_new - z)
			t = t_new
		z = z_new

	residual = float(np.linalg.norm(d - others @ z))
	raise ConvergenceError(
		f'norm-constrained regression of column {column_index} did not converge in {max_iters} iterations',
		partial=residual)


def detect_outliers_alg1(sketch: Sketch, rel_threshold: float = REL_THRESHOLD, omega: Optional[float] = None,
                         p_norm: PNorm = 2, n_jobs: int = 1) -> Tuple[OutlierReport, ResidualProfile]:
	"""
	Flags column i of the sketch as an outlier iff its relative residual exceeds "rel_threshold".
	:param sketch: data sketch
	:param rel_threshold: threshold on residual / column norm, in [0, 1)
	:param omega: when given, the norm-constrained (noisy) residual test is used with this radius
	:param p_norm: norm of the constraint of the noisy test
	:param n_jobs: joblib workers for the per-column tests
	:return: (sketch-local outlier report, residual profile)
	"""
	if not 0 <= rel_threshold < 1:
		raise InvalidParameterError(f'rel_threshold = {rel_threshold} must lie in [0, 1)')
	m1 = sketch.effective_m1
	logger.debug(f'-- running the residual test on {m1} sketched columns...')

	if omega is None:
		factorization = factorize_sketch(sketch)
		residuals = Parallel(n_jobs=n_jobs)(delayed(residual_test)(sketch, i, factorization) for i in range(m1))
	else:
		residuals = Parallel(n_jobs=n_jobs)(
			delayed(residual_test_noisy)(sketch, i, omega, p_norm) for i in range(m1))
	residuals = np.asarray(residuals, dtype=float)

	norms = np.linalg.norm(sketch.compressed, axis=0)
	relative = np.divide(residuals, norms, out=np.zeros_like(residuals), where=norms > 0)
	profile = ResidualProfile(residuals=residuals, relative=relative, threshold_used=rel_threshold)
	report = OutlierReport(
		scores=relative,
		mask=relative > rel_threshold,
		threshold=rel_threshold,
		detection_space='compressed'
	)

	logger.debug(f'-- running the residual test... DONE! ({int(report.mask.sum())} outliers in the sketch)')
	return report, profile


def learn_basis(sketch: Sketch, inlier_mask: np.ndarray, rank_tol: float = RANK_TOL_BASIS) -> SubspaceBasis:
	"""
	Picks r_hat linearly independent inlier columns of the compressed sketch (column-pivoted QR order), with r_hat
	the numerical rank of the inlier block, and returns the corresponding unsketched columns as the basis T.
	:param sketch: data sketch
	:param inlier_mask: boolean mask over the sketch columns
	:param rank_tol: singular values below rank_tol * sigma_1 of the inlier block are treated as zero
	:return: the subspace basis
	"""
	inlier_mask = np.asarray(inlier_mask, dtype=bool)
	if inlier_mask.shape != (sketch.effective_m1,):
		raise InvalidParameterError(f'inlier_mask must have length {sketch.effective_m1}')
	positions = np.flatnonzero(inlier_mask)
	if positions.size == 0:
		raise InvalidParameterError('learn_basis needs at least one inlier')

	block = sketch.compressed[:, positions]
	est_rank = numerical_rank(block, rank_tol)
	if est_rank == 0:
		raise InconsistentBasisError('the inlier block of the sketch is numerically zero')

	_, pivots = linalg.qr(block, mode='r', pivoting=True)
	selected = positions[pivots[:est_rank]]
	if numerical_rank(sketch.compressed[:, selected], rank_tol) != est_rank:
		raise InconsistentBasisError(f'the {est_rank} pivoted inlier columns do not have rank {est_rank}')

	basis = sketch.sampled_columns[:, selected]
	return SubspaceBasis(
		basis=basis,
		orthonormal=orthonormalize(basis),
		est_rank=est_rank,
		source_indices=sketch.column_indices[selected]
	)


def recover_subspace_alg1(instance: DataInstance, plan: SketchPlan, rel_threshold: float = REL_THRESHOLD,
                          rank_tol: float = RANK_TOL_BASIS, omega: Optional[float] = None, p_norm: PNorm = 2,
                          detection_space: DetectionSpace = 'full_data',
                          detection_threshold: float = DETECTION_THRESHOLD, n_jobs: int = 1,
                          sketch: Optional[Sketch] = None) -> Tuple[SubspaceBasis, OutlierReport]:
	"""
	Sketch, residual test, basis selection and outlier detection on all N2 columns.
	:param instance: data instance
	:param plan: sketch plan
	:param rel_threshold: threshold of the residual test
	:param rank_tol: rank cutoff used to learn the basis
	:param omega: radius of the noisy residual test (None for noiseless data)
	:param p_norm: norm of the noisy test constraint
	:param detection_space: "full_data" projects D on span(T); "compressed" projects Phi D on span(Phi T)
	:param detection_threshold: threshold on the relative projection residual of each data column
	:param n_jobs: joblib workers for the residual tests
	:param sketch: prebuilt sketch of the instance (built from the plan when omitted)
	:return: (subspace basis, outlier report over the N2 columns)
	"""
	if sketch is None:
		sketch = build_sketch(instance, plan)
	sketch_report, profile = detect_outliers_alg1(sketch, rel_threshold, omega, p_norm, n_jobs)

	inliers = ~sketch_report.mask
	if not inliers.any():
		raise RecoveryFailure(f'no inlier detected among the {sketch.effective_m1} sketched columns', profile)

	basis = learn_basis(sketch, inliers, rank_tol)
	row_operator = sketch.row_operator if detection_space == 'compressed' else None
	report = detect_outliers_full(instance.observed, basis, row_operator, detection_threshold)
	return basis, report
