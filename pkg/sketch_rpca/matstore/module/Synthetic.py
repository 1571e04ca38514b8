"""
Synthetic data following the experimental protocol: a Gaussian low-rank part L = U V^T whose outlying columns are
zeroed and replaced by i.i.d. Gaussian outliers, plus a clustered-row construction with a non-uniform row distribution.
"""
import numpy as np

from loguru import logger
from typing import (
	List,
	Optional
)

from sketch_rpca.configs.configs import (
	OUTLIER_SIGMA,
	RANK_TOL_COHERENCE
)
from sketch_rpca.custom_types.data_types import (
	DataInstance,
	DenseMatrix
)
from sketch_rpca.exceptions import InvalidParameterError
from sketch_rpca.recovery.helpers.linalg_helpers import numerical_rank


def generate_synthetic(n1: int, n2: int, rank: int, outlier_prob: float, outlier_sigma: float = OUTLIER_SIGMA,
                       noise_sigma: float = 0.0, seed: int = 0, fixed_outlier_count: Optional[int] = None,
                       low_rank: Optional[DenseMatrix] = None) -> DataInstance:
	"""
	Generates D = L + C (+ N).
	Each column is an outlier independently with probability "outlier_prob" (or, when "fixed_outlier_count" is given,
	exactly that many columns are drawn uniformly without replacement).
	:param n1: number of rows N1
	:param n2: number of columns N2
	:param rank: rank r of L
	:param outlier_prob: probability that a column is an outlier, in [0, 1)
	:param outlier_sigma: standard deviation of the outlier entries
	:param noise_sigma: standard deviation of the additive noise (0 for noiseless data)
	:param seed: seed of the random generator
	:param fixed_outlier_count: exact number of outlying columns K (optional)
	:param low_rank: a precomputed n1 x n2 low-rank matrix to use instead of U V^T (optional); its numerical
		rank must equal "rank"
	:return: data instance with full ground truth
	"""
	if rank < 1 or rank > min(n1, n2):
		raise InvalidParameterError(f'rank = {rank} must lie in [1, min(n1, n2) = {min(n1, n2)}]')
	if not 0 <= outlier_prob < 1:
		raise InvalidParameterError(f'outlier_prob = {outlier_prob} must lie in [0, 1)')
	if fixed_outlier_count is not None and not 0 <= fixed_outlier_count < n2:
		raise InvalidParameterError(f'fixed_outlier_count = {fixed_outlier_count} must lie in [0, n2)')
	if noise_sigma < 0 or outlier_sigma < 0:
		raise InvalidParameterError('noise_sigma and outlier_sigma must be >= 0')

	rng = np.random.default_rng(seed)
	if low_rank is None:
		u = rng.standard_normal((n1, rank))
		v = rng.standard_normal((n2, rank))
		low_rank = u @ v.T
	elif low_rank.shape != (n1, n2):
		raise InvalidParameterError(f'low_rank has shape {low_rank.shape}; expected {(n1, n2)}')
	else:
		low_rank = np.array(low_rank, dtype=np.float64)
		measured = numerical_rank(low_rank, RANK_TOL_COHERENCE)
		if measured != rank:
			raise InvalidParameterError(f'low_rank has numerical rank {measured}; expected rank = {rank}')

	if fixed_outlier_count is None:
		outlier_indices = np.flatnonzero(rng.random(n2) < outlier_prob)
	else:
		outlier_indices = np.sort(rng.choice(n2, size=fixed_outlier_count, replace=False))

	low_rank[:, outlier_indices] = 0.0
	outliers = np.zeros((n1, n2))
	outliers[:, outlier_indices] = outlier_sigma * rng.standard_normal((n1, len(outlier_indices)))

	noise = None
	observed = low_rank + outliers
	if noise_sigma > 0:
		noise = noise_sigma * rng.standard_normal((n1, n2))
		observed = observed + noise

	logger.debug(f'-- generated a {n1}x{n2} instance with rank {rank} and {len(outlier_indices)} outliers')

	return DataInstance(
		observed=observed,
		truth_low_rank=low_rank,
		truth_outliers=outliers,
		truth_noise=noise,
		outlier_indices=outlier_indices,
		true_rank=rank
	)


def paper_block_sizes(n_clusters: int, total: int) -> List[int]:
	"""
	Block widths of the two-regime clustered construction: the first half of the clusters get five times the
	number of columns of the second half (100r/n vs 20r/n), scaled to sum to "total" by largest-remainder rounding.
	:param n_clusters: number of clusters n
	:param total: number of rows of the resulting L (sum of the block widths)
	:return: list of block widths
	"""
	if n_clusters < 1 or total < n_clusters:
		raise InvalidParameterError(f'need 1 <= n_clusters <= total; got n_clusters={n_clusters}, total={total}')
	first_half = (n_clusters + 1) // 2
	weights = np.array([5.0] * first_half + [1.0] * (n_clusters - first_half))
	exact = total * weights / weights.sum()
	sizes = np.floor(exact).astype(int)
	remainder = total - sizes.sum()
	order = np.argsort(-(exact - sizes), kind='stable')
	sizes[order[:remainder]] += 1
	return sizes.tolist()


def generate_clustered_rows(n_clusters: int, per_cluster_dims: int, sizes: List[int], ambient: int,
                            seed: int = 0) -> DenseMatrix:
	"""
	Builds L = G^T with G = [G_1 ... G_n], G_i = U_i Q_i, U_i (ambient x per_cluster_dims) and
	Q_i (per_cluster_dims x sizes[i]) with i.i.d. standard normal entries.
	The rows of L (sum(sizes) of them, each with "ambient" entries) are clustered in n independent subspaces,
	so uniform row sampling sees the small clusters rarely.
	:param n_clusters: number of clusters n
	:param per_cluster_dims: dimension r/n of each cluster
	:param sizes: number of columns of each G_i (rows of L in each cluster)
	:param ambient: number of columns of L
	:param seed: seed of the random generator
	:return: L, of shape sum(sizes) x ambient and rank n * per_cluster_dims
	"""
	if len(sizes) != n_clusters:
		raise InvalidParameterError(f'{len(sizes)} block sizes given for {n_clusters} clusters')
	if per_cluster_dims < 1 or any(s < per_cluster_dims for s in sizes):
		raise InvalidParameterError(f'every block needs at least per_cluster_dims = {per_cluster_dims} columns')
	rank = n_clusters * per_cluster_dims
	if rank > ambient or rank > sum(sizes):
		raise InvalidParameterError(f'rank {rank} exceeds the dimensions {sum(sizes)}x{ambient}')

	rng = np.random.default_rng(seed)
	blocks = [
		rng.standard_normal((ambient, per_cluster_dims)) @ rng.standard_normal((per_cluster_dims, size))
		for size in sizes
	]
	return np.hstack(blocks).T
