import numpy as np

from scipy import linalg
from typing import Tuple


def numerical_rank(matrix: np.ndarray, rank_tol: float) -> int:
	"""
	Number of singular values >= rank_tol * sigma_1 (0 for a zero or empty matrix).
	:param matrix: dense matrix
	:param rank_tol: relative singular value cutoff
	:return: numerical rank
	"""
	if matrix.size == 0:
		return 0
	s = linalg.svd(matrix, compute_uv=False)
	if s[0] == 0:
		return 0
	return int(np.sum(s >= rank_tol * s[0]))


def orthonormalize(basis: np.ndarray) -> np.ndarray:
	"""
	Orthonormal basis of the span of the given (full column rank) columns, via economic QR.
	"""
	q, _ = linalg.qr(basis, mode='economic')
	return q


def svd_threshold(matrix: np.ndarray, tau: float) -> Tuple[np.ndarray, float]:
	"""
	Singular value soft thresholding, the proximal map of tau * ||.||_*.
	:param matrix: dense matrix
	:param tau: threshold
	:return: (thresholded matrix, its nuclear norm)
	"""
	u, s, vt = linalg.svd(matrix, full_matrices=False, lapack_driver='gesdd')
	s = np.maximum(s - tau, 0.0)
	keep = s > 0
	return (u[:, keep] * s[keep]) @ vt[keep, :], float(s.sum())


def column_soft_threshold(matrix: np.ndarray, tau: float) -> np.ndarray:
	"""
	Column-wise l2 (block) soft thresholding, the proximal map of tau * ||.||_{1,2} (sum of column l2 norms).
	"""
	norms = np.linalg.norm(matrix, axis=0)
	scale = np.divide(np.maximum(norms - tau, 0.0), norms, out=np.zeros_like(norms), where=norms > 0)
	return matrix * scale


def l12_norm(matrix: np.ndarray) -> float:
	"""
	Sum of the column l2 norms.
	"""
	return float(np.linalg.norm(matrix, axis=0).sum())


def nuclear_norm(matrix: np.ndarray) -> float:
	return float(linalg.svd(matrix, compute_uv=False).sum()) if matrix.size else 0.0


def project_l2_ball(vector: np.ndarray, radius: float) -> np.ndarray:
	"""
	Euclidean projection onto {z : ||z||_2 <= radius}; also used with Frobenius norms of matrices.
	"""
	norm = np.linalg.norm(vector)
	if norm <= radius:
		return vector
	return vector * (radius / norm)


def project_l1_ball(vector: np.ndarray, radius: float) -> np.ndarray:
	"""
	Euclidean projection onto {z : ||z||_1 <= radius} by sorting the magnitudes.
	"""
	if np.abs(vector).sum() <= radius:
		return vector
	if radius <= 0:
		return np.zeros_like(vector)
	mags = np.sort(np.abs(vector))[::-1]
	cumsum = np.cumsum(mags)
	ks = np.arange(1, len(mags) + 1)
	rho = np.nonzero(mags * ks > cumsum - radius)[0][-1]
	theta = (cumsum[rho] - radius) / (rho + 1)
	return np.sign(vector) * np.maximum(np.abs(vector) - theta, 0.0)
