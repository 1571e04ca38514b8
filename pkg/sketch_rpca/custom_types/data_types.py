import numpy as np

from dataclasses import dataclass
from sketch_rpca.exceptions import InvalidParameterError
from typing import (
	List,
	Optional,
	TypeAlias,
	TypedDict
)

# Dense, finite, 2-D float64 numpy array; validated by matstore.module.MatrixIO.as_dense
DenseMatrix: TypeAlias = np.ndarray


def frozen(matrix: Optional[np.ndarray]) -> Optional[np.ndarray]:
	"""
	Returns a read-only copy of the given array (None passes through).
	Arrays that are already read-only are returned as they are.
	:param matrix: numpy array or None
	:return: read-only numpy array or None
	"""
	if matrix is None:
		return None
	if isinstance(matrix, np.ndarray) and not matrix.flags.writeable:
		return matrix
	copy = np.array(matrix, copy=True)
	copy.flags.writeable = False
	return copy


# -- INPUTS ------------------------------------------------------------------------------------------------------------
class SyntheticParamsDict(TypedDict, total=False):
	n1: int
	n2: int
	rank: int
	outlier_prob: float
	outlier_sigma: float
	noise_sigma: float
	fixed_outlier_count: Optional[int]


# -- DOMAIN VALUES -----------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class DataInstance:
	"""
	Observed matrix D (N1 x N2) with optional ground truth D = L + C (+ N) for synthetic experiments.
	"""
	observed: DenseMatrix
	truth_low_rank: Optional[DenseMatrix] = None
	truth_outliers: Optional[DenseMatrix] = None
	truth_noise: Optional[DenseMatrix] = None
	outlier_indices: Optional[np.ndarray] = None
	true_rank: Optional[int] = None

	def __post_init__(self):
		for name in ('observed', 'truth_low_rank', 'truth_outliers', 'truth_noise'):
			value = getattr(self, name)
			if value is None:
				continue
			if value.ndim != 2 or not np.all(np.isfinite(value)):
				raise InvalidParameterError(f'{name} must be a finite 2-D matrix')
			if value.shape != self.observed.shape:
				raise InvalidParameterError(f'{name} has shape {value.shape}; expected {self.observed.shape}')
			object.__setattr__(self, name, frozen(value))

		if self.outlier_indices is not None:
			idx = np.asarray(self.outlier_indices, dtype=np.int64)
			if idx.size and (idx.min() < 0 or idx.max() >= self.n2 or np.any(np.diff(idx) <= 0)):
				raise InvalidParameterError('outlier_indices must be sorted, unique and within [0, n2)')
			object.__setattr__(self, 'outlier_indices', frozen(idx))

		if self.truth_low_rank is not None and self.truth_outliers is not None:
			total = self.truth_low_rank + self.truth_outliers
			if self.truth_noise is not None:
				total = total + self.truth_noise
			scale = max(np.linalg.norm(self.observed), 1.0)
			if np.linalg.norm(self.observed - total) > 1e-12 * scale:
				raise InvalidParameterError('observed != truth_low_rank + truth_outliers (+ truth_noise)')
			if self.outlier_indices is not None and np.any(self.truth_low_rank[:, self.outlier_indices] != 0):
				raise InvalidParameterError('low-rank component must be zero at the outlier columns')

	@property
	def n1(self) -> int:
		return self.observed.shape[0]

	@property
	def n2(self) -> int:
		return self.observed.shape[1]

	@property
	def has_truth(self) -> bool:
		return self.truth_low_rank is not None and self.outlier_indices is not None

	@property
	def nr_outliers(self) -> Optional[int]:
		return None if self.outlier_indices is None else len(self.outlier_indices)

	def outlier_mask(self) -> np.ndarray:
		mask = np.zeros(self.n2, dtype=bool)
		if self.outlier_indices is not None:
			mask[self.outlier_indices] = True
		return mask


@dataclass(frozen=True)
class CoherenceStats:
	mu_v: float  # row space coherence, (N2/r) max_i ||V^T e_i||^2
	mu_v_prime: float  # row space coherence of L' (nonzero columns only)
	mu_u: float  # column space coherence, (N1/r) max_i ||U^T e_i||^2
	eta_v: float  # sqrt(N2) max |V(i, j)|
	eta_u: float  # sqrt(N1) max |U(i, j)|
	gamma: float  # (N2'/r) max over the nonzero columns of ||V^T e_i||^2
	rank_used: int


# -- OUTPUTS -----------------------------------------------------------------------------------------------------------
class InstanceMetadataDict(TypedDict):
	n1: int
	n2: int
	true_rank: Optional[int]
	nr_outliers: Optional[int]
	has_noise: bool
	files: List[str]
