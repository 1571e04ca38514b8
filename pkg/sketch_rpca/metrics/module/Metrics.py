"""
Evaluation primitives: outlier detection on the full data, subspace distance, numerical rank and the classification
of a recovery against the ground truth.
"""
import numpy as np

from scipy import linalg
from typing import Optional

from sketch_rpca.configs.configs import (
	DETECTION_THRESHOLD,
	RANK_TOL_COHERENCE,
	SUCCESS_TOL
)
from sketch_rpca.custom_types.data_types import (
	DataInstance,
	DenseMatrix
)
from sketch_rpca.custom_types.recovery_types import (
	OutlierReport,
	RecoveryVerdict,
	SubspaceBasis
)
from sketch_rpca.custom_types.sketch_types import RowOperator
from sketch_rpca.exceptions import InvalidParameterError
from sketch_rpca.matstore.module.Coherence import compact_svd
from sketch_rpca.recovery.helpers import linalg_helpers

FULL_RANK_TOL = 1e-10  # relative cutoff under which a basis is considered rank deficient


def projection_scores(data: DenseMatrix, orthonormal: np.ndarray) -> np.ndarray:
	"""
	|| (I - Q Q^T) d_i ||_2 / || d_i ||_2 for every column d_i (0 for zero columns).
	"""
	residual = data - orthonormal @ (orthonormal.T @ data)
	res_norms = np.linalg.norm(residual, axis=0)
	col_norms = np.linalg.norm(data, axis=0)
	return np.divide(res_norms, col_norms, out=np.zeros_like(res_norms), where=col_norms > 0)


def detect_outliers_full(data: DenseMatrix, basis: SubspaceBasis, row_operator: Optional[RowOperator] = None,
                         threshold: float = DETECTION_THRESHOLD) -> OutlierReport:
	"""
	Scores every column of D by its relative residual after projection onto the recovered subspace.
	Without a row operator the projection uses span(T) on D; with one, it uses span(Phi T) on Phi D.
	:param data: N1 x N2 data matrix
	:param basis: recovered subspace basis
	:param row_operator: row compression of the sketch (optional)
	:param threshold: columns scoring above it are outliers
	:return: outlier report over the N2 columns
	"""
	if basis.est_rank == 0 or basis.orthonormal.shape[1] == 0:
		raise InvalidParameterError('cannot detect outliers with a rank 0 basis')

	if row_operator is None:
		scores = projection_scores(data, basis.orthonormal)
		space = 'full_data'
	else:
		compressed_basis = linalg.orth(row_operator.apply(basis.basis))
		if compressed_basis.shape[1] == 0:
			raise InvalidParameterError('the compressed basis has rank 0')
		scores = projection_scores(row_operator.apply(data), compressed_basis)
		space = 'compressed'

	return OutlierReport(scores=scores, mask=scores > threshold, threshold=threshold, detection_space=space)


def numerical_rank(m: DenseMatrix, rank_tol: float = RANK_TOL_COHERENCE) -> int:
	"""
	Number of singular values >= rank_tol * sigma_1 (0 for a zero matrix).
	"""
	return linalg_helpers.numerical_rank(np.asarray(m, dtype=np.float64), rank_tol)


def _orthonormal_basis(matrix: DenseMatrix, name: str) -> np.ndarray:
	matrix = np.asarray(matrix, dtype=np.float64)
	if matrix.ndim == 1:
		matrix = matrix[:, None]
	if numerical_rank(matrix, FULL_RANK_TOL) != matrix.shape[1]:
		raise InvalidParameterError(f'basis {name} is not numerically full column rank')
	return linalg_helpers.orthonormalize(matrix)


def subspace_distance(a: DenseMatrix, b: DenseMatrix) -> float:
	"""
	Sine of the largest principal angle between span(a) and span(b), evaluated as || Q_b - Q_a Q_a^T Q_b ||_2.
	Spans of different dimensions are at distance 1.
	:param a: basis (columns) of the first subspace
	:param b: basis (columns) of the second subspace
	:return: distance in [0, 1]
	"""
	q_a = _orthonormal_basis(a, 'a')
	q_b = _orthonormal_basis(b, 'b')
	if q_a.shape[0] != q_b.shape[0]:
		raise InvalidParameterError(f'bases live in R^{q_a.shape[0]} and R^{q_b.shape[0]}')
	if q_a.shape[1] != q_b.shape[1]:
		return 1.0
	# the larger side keeps the measure symmetric in floating point
	sine_ab = linalg.norm(q_b - q_a @ (q_a.T @ q_b), 2)
	sine_ba = linalg.norm(q_a - q_b @ (q_b.T @ q_a), 2)
	return float(np.clip(max(sine_ab, sine_ba), 0.0, 1.0))


def classify_recovery(instance: DataInstance, basis: SubspaceBasis, report: OutlierReport,
                      tol: float = SUCCESS_TOL) -> RecoveryVerdict:
	"""
	Compares a recovery with the ground truth of a synthetic instance.
	:param instance: instance with truth_low_rank and outlier_indices
	:param basis: recovered basis
	:param report: outlier report over the N2 columns
	:param tol: subspace error under which the recovery is exact
	:return: recovery verdict
	"""
	if not instance.has_truth:
		raise InvalidParameterError('classify_recovery needs an instance with ground truth')
	truth_u, _, _ = compact_svd(instance.truth_low_rank, RANK_TOL_COHERENCE)
	if truth_u.shape[1] == 0:
		raise InvalidParameterError('the ground truth low-rank matrix is zero')

	error = subspace_distance(truth_u, basis.orthonormal)

	truth_mask = instance.outlier_mask()
	predicted = np.asarray(report.mask, dtype=bool)
	true_positives = int(np.sum(predicted & truth_mask))
	precision = true_positives / predicted.sum() if predicted.any() else 1.0
	recall = true_positives / truth_mask.sum() if truth_mask.any() else 1.0

	return RecoveryVerdict(
		subspace_error=error,
		outlier_precision=float(precision),
		outlier_recall=float(recall),
		exact=bool(error < tol and precision == 1.0 and recall == 1.0)
	)
