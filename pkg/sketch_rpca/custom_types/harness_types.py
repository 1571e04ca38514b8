import numpy as np

from dataclasses import (
	dataclass,
	field
)
from typing import (
	List,
	Literal,
	Optional,
	TypedDict
)

from sketch_rpca.configs.configs import TRIALS
from sketch_rpca.custom_types.data_types import (
	SyntheticParamsDict,
	frozen
)
from sketch_rpca.exceptions import InvalidParameterError


# -- INPUTS ------------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class GridSpec:
	m1_values: List[int]
	m2_values: List[int]
	instance_params: SyntheticParamsDict
	algorithm: Literal['alg1', 'alg2'] = 'alg1'
	design: Literal['red', 'rrd'] = 'red'
	trials: int = TRIALS
	base_seed: int = 0
	lam: Optional[float] = None  # None -> 3 / (7 sqrt(K_s)) with the true sampled-outlier count
	clustered: Optional[dict] = None  # n_clusters / per_cluster_dims for a clustered-row low-rank part

	def __post_init__(self):
		if self.trials < 1:
			raise InvalidParameterError(f'trials = {self.trials} must be >= 1')
		for name in ('m1_values', 'm2_values'):
			values = list(getattr(self, name))
			if not values:
				raise InvalidParameterError(f'{name} must be non-empty')
			if any(b <= a for a, b in zip(values, values[1:])):
				raise InvalidParameterError(f'{name} must be strictly increasing')
			object.__setattr__(self, name, values)


# -- OUTPUTS -----------------------------------------------------------------------------------------------------------
@dataclass(frozen=True)
class GridResult:
	success_rate: np.ndarray  # |m1| x |m2|
	mean_subspace_error: np.ndarray
	mean_runtime_seconds: np.ndarray  # not deterministic
	metadata: dict = field(default_factory=dict)

	def __post_init__(self):
		for name in ('success_rate', 'mean_subspace_error', 'mean_runtime_seconds'):
			object.__setattr__(self, name, frozen(getattr(self, name)))


class TrialOutcomeDict(TypedDict):
	i: int
	j: int
	trial: int
	exact: bool
	subspace_error: float
	runtime: float
	failed: bool


class BaselineRowDict(TypedDict):
	n: int
	randomized_median_seconds: float
	baseline_median_seconds: Optional[float]
	speedup: Optional[float]
	censored: bool
	randomized_success_rate: float
