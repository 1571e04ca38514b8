from dataclasses import (
	dataclass,
	field
)
from typing import (
	Dict,
	Literal,
	Optional,
	TypeAlias
)

from sketch_rpca.configs.configs import (
	C1,
	C2,
	C_CONCENTRATION,
	DELTA,
	F_HALF
)
from sketch_rpca.custom_types.data_types import CoherenceStats
from sketch_rpca.exceptions import InvalidParameterError

OutlierModel: TypeAlias = Literal['independent', 'column_sparse']


# -- INPUTS ------------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class BoundInputs:
	r: int
	n1: int
	n2: int
	n2_prime: int  # number of inlier columns
	k: int  # number of outlier columns
	coherence: CoherenceStats
	delta: float = DELTA
	c: float = C_CONCENTRATION
	g: Optional[float] = None  # None -> 2 (N2'/N2)(1 + 6 r mu_v 121/9)
	c1: float = C1
	c2: float = C2
	f_epsilon_at_half: float = F_HALF

	def __post_init__(self):
		if self.r < 1:
			raise InvalidParameterError(f'r = {self.r} must be >= 1')
		if self.k < 0 or self.n2_prime < 1:
			raise InvalidParameterError(f'k = {self.k} and n2_prime = {self.n2_prime} must be >= 0 and >= 1')
		if self.k + self.n2_prime != self.n2:
			raise InvalidParameterError(f'k + n2_prime = {self.k + self.n2_prime} != n2 = {self.n2}')
		if not 0 < self.delta < 0.2:
			raise InvalidParameterError(f'delta = {self.delta} must lie in (0, 0.2)')
		if not self.c > 1:
			raise InvalidParameterError(f'c = {self.c} must be > 1')
		if self.g is not None and not self.g > 1:
			raise InvalidParameterError(f'g = {self.g} must be > 1')
		if not self.f_epsilon_at_half > 0:
			raise InvalidParameterError('f(1/2) must be > 0')


# -- OUTPUTS -----------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class BoundResult:
	alpha: Optional[float]  # Algorithm 1 only
	beta: Optional[float]  # Algorithm 1 only
	q_bound: Optional[float]  # bound on the number of sampled outliers (Algorithm 1 only)
	m1_sufficient: int
	m2_sufficient: int
	design: Literal['red', 'rrd']
	algorithm: Literal['alg1', 'alg2']
	k_admissible: Optional[float] = None  # Algorithm 2 only: largest admissible K/N2'
	zeta: Optional[float] = None  # Algorithm 2 only
	g: Optional[float] = None  # Algorithm 2 only
	feasible: bool = True
	branches: Dict[str, float] = field(default_factory=dict)
	metadata: Dict[str, str] = field(default_factory=dict)

	def to_dict(self) -> dict:
		return {
			'algorithm': self.algorithm,
			'design': self.design,
			'alpha': self.alpha,
			'beta': self.beta,
			'q_bound': self.q_bound,
			'zeta': self.zeta,
			'g': self.g,
			'k_admissible': self.k_admissible,
			'feasible': self.feasible,
			'm1_sufficient': self.m1_sufficient,
			'm2_sufficient': self.m2_sufficient,
			'branches': dict(self.branches),
			'metadata': dict(self.metadata)
		}
