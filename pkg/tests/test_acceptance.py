"""
Monte-Carlo checks at desk scale. Trial counts are kept at 20 (100 for the rank-preservation check, 10 for the size
comparison).
"""
import numpy as np

from sketch_rpca.custom_types.harness_types import GridSpec
from sketch_rpca.harness.module.Benchmark import run_baseline_comparison
from sketch_rpca.harness.module.PhaseTransition import (
	derive_seed,
	run_phase_transition
)
from sketch_rpca.matstore.module.Synthetic import (
	generate_clustered_rows,
	paper_block_sizes
)
from sketch_rpca.metrics.module.Metrics import numerical_rank
from sketch_rpca.sketching.module.Sketching import (
	embed_rows_gaussian,
	sample_rows
)

DESK = {'n1': 500, 'n2': 1000, 'rank': 5, 'outlier_sigma': 20.0}


def single_cell(m1: int, m2: int, outlier_prob: float, algorithm: str = 'alg1', design: str = 'red') -> float:
	spec = GridSpec(m1_values=[m1], m2_values=[m2], instance_params={**DESK, 'outlier_prob': outlier_prob},
	                algorithm=algorithm, design=design, trials=20, base_seed=1)
	return float(run_phase_transition(spec).success_rate[0, 0])


def test_independent_outliers_red_and_rrd():
	red = single_cell(100, 50, 0.2, design='red')
	rrd = single_cell(100, 50, 0.2, design='rrd')
	# assert exact recovery in at least 19 of 20 trials with a Gaussian embedding
	assert red >= 19 / 20
	# assert row sampling does about as well on incoherent data
	assert abs(red - rrd) <= 0.1


def test_clustered_rows_separate_embedding_from_row_sampling():
	n_clusters, n1, n2 = 20, 300, 450
	m2 = n_clusters + 2
	sizes = paper_block_sizes(n_clusters, n1)
	red_kept, rrd_kept = 0, 0
	for trial in range(100):
		low_rank = generate_clustered_rows(n_clusters, 1, sizes, n2, derive_seed(7, trial))
		embedded, _ = embed_rows_gaussian(low_rank, m2, seed=derive_seed(7, trial, 1))
		sampled, _ = sample_rows(low_rank, m2, seed=derive_seed(7, trial, 2))
		red_kept += numerical_rank(embedded) == n_clusters
		rrd_kept += numerical_rank(sampled) == n_clusters
	# assert the embedding keeps the rank and row sampling mostly loses the small clusters
	assert red_kept / 100 >= 0.95
	assert rrd_kept / 100 <= 0.5


def test_convex_recovery_success_and_failure():
	# assert success with few outliers
	assert single_cell(150, 50, 0.01, algorithm='alg2') >= 19 / 20
	# assert failure once the outliers are a fifth of the columns
	assert single_cell(150, 50, 0.2, algorithm='alg2') <= 4 / 20


def test_success_rate_does_not_depend_on_the_data_size():
	rates = []
	for n1, n2 in ((500, 1000), (1000, 4000)):
		spec = GridSpec(m1_values=[200], m2_values=[40, 100], trials=10, base_seed=3,
		                instance_params={'n1': n1, 'n2': n2, 'rank': 20, 'outlier_prob': 0.2, 'outlier_sigma': 20.0})
		rates.append(run_phase_transition(spec).success_rate)
	# assert the same sketch sizes give the same success rates on a larger matrix
	assert np.all(np.abs(rates[0] - rates[1]) < 0.1)
	# assert the grid spans failure and success
	assert rates[0][0, 0] <= 0.1 and rates[0][0, 1] >= 0.9


def test_randomized_convex_recovery_beats_the_full_decomposition():
	rows = run_baseline_comparison([2000], rank=20, outlier_prob=0.01, m1=400, m2=100, trials=1, timeout=120.0)
	# assert at least a fivefold speedup, a lower bound when the baseline is censored
	assert rows[0]['speedup'] >= 5


if __name__ == '__main__':
	test_clustered_rows_separate_embedding_from_row_sampling()
