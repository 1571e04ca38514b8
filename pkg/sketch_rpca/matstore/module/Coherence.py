"""
Incoherence parameters of a low-rank matrix, evaluated tightly (each bound is attained by some row).
"""
import numpy as np

from scipy import linalg

from sketch_rpca.configs.configs import RANK_TOL_COHERENCE
from sketch_rpca.custom_types.data_types import (
	CoherenceStats,
	DenseMatrix
)
from sketch_rpca.exceptions import DegenerateInputError


def compact_svd(matrix: DenseMatrix, rank_tol: float = RANK_TOL_COHERENCE):
	"""
	Compact SVD keeping the singular values >= rank_tol * sigma_1.
	:param matrix: dense matrix
	:param rank_tol: relative singular value cutoff
	:return: (U, s, V) with U (N1 x r), s (r,), V (N2 x r)
	"""
	u, s, vt = linalg.svd(matrix, full_matrices=False)
	if s.size == 0 or s[0] == 0:
		return u[:, :0], s[:0], vt[:0, :].T
	r = int(np.sum(s >= rank_tol * s[0]))
	return u[:, :r], s[:r], vt[:r, :].T


def leverage_scores(basis: np.ndarray) -> np.ndarray:
	"""
	Squared row norms of an orthonormal basis.
	"""
	return np.sum(basis ** 2, axis=1)


def estimate_coherence(low_rank: DenseMatrix, rank_tol: float = RANK_TOL_COHERENCE) -> CoherenceStats:
	"""
	Computes the incoherence parameters of L from its compact SVD L = U S V^T:
	 - mu_v = (N2/r) max_i ||V^T e_i||^2, mu_u = (N1/r) max_i ||U^T e_i||^2
	 - eta_v = sqrt(N2) max |V(i, j)|, eta_u = sqrt(N1) max |U(i, j)|
	 - gamma = (N2'/r) max over the nonzero columns i of ||V^T e_i||^2
	 - mu_v_prime: row space coherence of L', the submatrix of nonzero columns of L
	:param low_rank: the low-rank matrix L (N1 x N2)
	:param rank_tol: singular values below rank_tol * sigma_1 are treated as zero
	:return: coherence statistics
	"""
	low_rank = np.asarray(low_rank, dtype=np.float64)
	if not np.any(low_rank):
		raise DegenerateInputError('coherence is undefined for a zero matrix')
	n1, n2 = low_rank.shape

	u, _, v = compact_svd(low_rank, rank_tol)
	r = u.shape[1]
	row_leverage = leverage_scores(v)
	col_leverage = leverage_scores(u)

	nonzero = np.any(low_rank != 0, axis=0)
	n2_prime = int(nonzero.sum())
	_, _, v_prime = compact_svd(low_rank[:, nonzero], rank_tol)
	r_prime = v_prime.shape[1]

	return CoherenceStats(
		mu_v=float(n2 / r * row_leverage.max()),
		mu_v_prime=float(n2_prime / r_prime * leverage_scores(v_prime).max()),
		mu_u=float(n1 / r * col_leverage.max()),
		eta_v=float(np.sqrt(n2) * np.abs(v).max()),
		eta_u=float(np.sqrt(n1) * np.abs(u).max()),
		gamma=float(n2_prime / r * row_leverage[nonzero].max()),
		rank_used=r
	)
