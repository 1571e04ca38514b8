import numpy as np

from dataclasses import (
	dataclass,
	field
)
from typing import (
	Literal,
	Optional,
	TypeAlias
)

from sketch_rpca.custom_types.data_types import (
	DenseMatrix,
	frozen
)
from sketch_rpca.exceptions import InvalidParameterError

Design: TypeAlias = Literal['red', 'rrd']


def gaussian_f_epsilon(epsilon: float) -> float:
	"""
	Concentration exponent f(e) = e^2/4 - e^3/6 of a Gaussian embedding with N(0, 1/m2) entries.
	:param epsilon: distortion level in (0, 1)
	:return: f(epsilon)
	"""
	return epsilon ** 2 / 4 - epsilon ** 3 / 6


# -- INPUTS ------------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class SketchPlan:
	m1: int  # number of sampled columns
	m2: int  # number of compressed rows
	design: Design = 'red'
	column_replacement: bool = True  # sample columns with replacement
	dedupe: bool = True  # remove repeated columns after sampling with replacement
	seed: int = 0

	def __post_init__(self):
		if self.design not in ('red', 'rrd'):
			raise InvalidParameterError(f'design = {self.design} not recognized; use "red" or "rrd"')


# -- OUTPUTS -----------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class RowOperator:
	"""
	Row compression of a sketch: a stored Gaussian matrix (RED) or a sorted list of sampled rows (RRD).
	"""
	design: Design
	matrix: Optional[DenseMatrix] = None  # Phi, m2 x N1 (RED)
	indices: Optional[np.ndarray] = None  # sampled rows, ascending (RRD)

	def __post_init__(self):
		object.__setattr__(self, 'matrix', frozen(self.matrix))
		object.__setattr__(self, 'indices', frozen(self.indices))

	@property
	def m2(self) -> int:
		return self.matrix.shape[0] if self.design == 'red' else len(self.indices)

	def apply(self, data: DenseMatrix) -> DenseMatrix:
		"""
		Compresses the rows of any matrix with N1 rows.
		"""
		if self.design == 'red':
			return self.matrix @ data
		return data[self.indices, :]


@dataclass(frozen=True)
class Sketch:
	sampled_columns: DenseMatrix  # D_s, N1 x m1'
	compressed: DenseMatrix  # D_s^phi, m2 x m1'
	column_indices: np.ndarray  # indices into the columns of D
	row_operator: RowOperator
	plan: Optional[SketchPlan] = field(default=None, compare=False)

	def __post_init__(self):
		object.__setattr__(self, 'sampled_columns', frozen(self.sampled_columns))
		object.__setattr__(self, 'compressed', frozen(self.compressed))
		object.__setattr__(self, 'column_indices', frozen(np.asarray(self.column_indices, dtype=np.int64)))

	@property
	def effective_m1(self) -> int:
		return self.compressed.shape[1]
