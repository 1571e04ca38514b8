import numpy as np

from dataclasses import dataclass
from typing import (
	List,
	Literal,
	Optional,
	TypeAlias,
	TypedDict
)

from sketch_rpca.configs.configs import (
	DUAL_TOL,
	MAX_ITERS,
	PENALTY,
	PENALTY_ADAPT,
	PRIMAL_TOL
)
from sketch_rpca.custom_types.data_types import (
	DenseMatrix,
	frozen
)
from sketch_rpca.exceptions import InvalidParameterError

Algorithm: TypeAlias = Literal['alg1', 'alg2']
DetectionSpace: TypeAlias = Literal['full_data', 'compressed']
PNorm: TypeAlias = Literal[1, 2]


# -- INPUTS ------------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class ConvexSolveConfig:
	lam: float  # weight of the l1,2 term
	max_iters: int = MAX_ITERS
	primal_tol: float = PRIMAL_TOL
	dual_tol: float = DUAL_TOL
	penalty: float = PENALTY  # augmented Lagrangian penalty rho
	penalty_adapt: bool = PENALTY_ADAPT
	noise_epsilon: Optional[float] = None  # radius of the Frobenius ball of the noisy program
	time_limit: Optional[float] = None  # seconds

	def __post_init__(self):
		if not self.lam > 0:
			raise InvalidParameterError(f'lambda = {self.lam} must be > 0')
		if not (self.primal_tol > 0 and self.dual_tol > 0):
			raise InvalidParameterError('primal_tol and dual_tol must be > 0')
		if not self.penalty > 0:
			raise InvalidParameterError(f'penalty = {self.penalty} must be > 0')
		if self.max_iters < 1:
			raise InvalidParameterError(f'max_iters = {self.max_iters} must be >= 1')
		if self.noise_epsilon is not None and self.noise_epsilon < 0:
			raise InvalidParameterError(f'noise_epsilon = {self.noise_epsilon} must be >= 0')


# -- OUTPUTS -----------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class ResidualProfile:
	residuals: np.ndarray  # minimum least-squares residual per sketched column
	relative: np.ndarray  # residual / column norm
	threshold_used: float

	def __post_init__(self):
		object.__setattr__(self, 'residuals', frozen(self.residuals))
		object.__setattr__(self, 'relative', frozen(self.relative))


@dataclass(frozen=True)
class SubspaceBasis:
	basis: DenseMatrix  # T, N1 x r_hat, columns of D_s
	orthonormal: DenseMatrix  # orthonormalized T
	est_rank: int
	source_indices: np.ndarray  # indices of T's columns in D

	def __post_init__(self):
		object.__setattr__(self, 'basis', frozen(self.basis))
		object.__setattr__(self, 'orthonormal', frozen(self.orthonormal))
		object.__setattr__(self, 'source_indices', frozen(np.asarray(self.source_indices, dtype=np.int64)))


@dataclass(frozen=True)
class Decomposition:
	low_rank: DenseMatrix
	column_sparse: DenseMatrix
	iterations: int
	final_primal_residual: float
	final_dual_residual: float
	objective: float
	lam: float
	dual_variable: Optional[DenseMatrix] = None  # Lagrange multiplier of the equality constraint
	noise_part: Optional[DenseMatrix] = None  # E of the noisy program, L + C + E = D

	def __post_init__(self):
		for name in ('low_rank', 'column_sparse', 'dual_variable', 'noise_part'):
			object.__setattr__(self, name, frozen(getattr(self, name)))

	def outlier_columns(self, reference: DenseMatrix, column_norm_tol: float) -> np.ndarray:
		"""
		Mask of columns of C whose l2 norm relative to the corresponding column of the reference exceeds the tolerance.
		"""
		c_norms = np.linalg.norm(self.column_sparse, axis=0)
		ref_norms = np.linalg.norm(reference, axis=0)
		rel = np.divide(c_norms, ref_norms, out=np.zeros_like(c_norms), where=ref_norms > 0)
		return rel > column_norm_tol


@dataclass(frozen=True)
class OutlierReport:
	scores: np.ndarray  # relative residual norms, one per column
	mask: np.ndarray  # scores > threshold
	threshold: float
	detection_space: DetectionSpace = 'full_data'

	def __post_init__(self):
		object.__setattr__(self, 'scores', frozen(np.asarray(self.scores, dtype=float)))
		object.__setattr__(self, 'mask', frozen(np.asarray(self.mask, dtype=bool)))

	@property
	def outlier_indices(self) -> np.ndarray:
		return np.flatnonzero(self.mask)


@dataclass(frozen=True)
class RecoveryVerdict:
	subspace_error: float  # sine of the largest principal angle
	outlier_precision: float
	outlier_recall: float
	exact: bool

	def to_dict(self) -> dict:
		return {
			'subspace_error': float(self.subspace_error),
			'outlier_precision': float(self.outlier_precision),
			'outlier_recall': float(self.outlier_recall),
			'exact': bool(self.exact)
		}


# -- BACKPACKS ---------------------------------------------------------------------------------------------------------
class BackpackRecoveryDict(TypedDict, total=False):
	algorithm: Algorithm
	design: Literal['red', 'rrd']
	m1: int
	m2: int
	seed: int
	column_replacement: bool
	dedupe: bool
	rel_threshold: float
	rank_tol: float
	omega: Optional[float]
	p_norm: PNorm
	lam: Optional[float]
	noise_epsilon: Optional[float]
	column_norm_tol: float
	detection_space: DetectionSpace
	detection_threshold: float
	success_tol: float


class OutputsRecoveryDict(TypedDict):
	est_rank: int
	basis_indices: List[int]
	outlier_indices: List[int]
	scores: List[float]
	sketch_outlier_indices: List[int]
	verdict: Optional[dict]
	runtime_seconds: float
