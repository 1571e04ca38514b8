import numpy as np
import pytest

from sketch_rpca.custom_types.data_types import DataInstance
from sketch_rpca.exceptions import (
	DegenerateInputError,
	InvalidParameterError
)
from sketch_rpca.matstore.module.Coherence import (
	compact_svd,
	estimate_coherence
)
from sketch_rpca.matstore.module.MatrixIO import (
	as_dense,
	read_instance,
	read_matrix,
	read_matrix_csv,
	write_instance,
	write_matrix,
	write_matrix_csv,
	write_sketch
)
from sketch_rpca.matstore.module.Synthetic import (
	generate_clustered_rows,
	generate_synthetic,
	paper_block_sizes
)
from sketch_rpca.custom_types.sketch_types import SketchPlan
from sketch_rpca.metrics.module.Metrics import numerical_rank
from sketch_rpca.sketching.module.Sketching import build_sketch


def test_binary_matrix_file(tmp_path):
	matrix = np.arange(12, dtype=float).reshape(3, 4) / 7
	path = tmp_path / 'm.rmat'
	write_matrix(matrix, path)
	raw = path.read_bytes()
	# assert the magic, the header and the payload size
	assert raw[:5] == b'RMAT1'
	assert int.from_bytes(raw[5:13], 'little') == 3 and int.from_bytes(raw[13:21], 'little') == 4
	assert len(raw) == 21 + 12 * 8
	# assert the values are restored bit for bit
	assert np.array_equal(read_matrix(path), matrix)


def test_binary_matrix_file_errors(tmp_path):
	bad_magic = tmp_path / 'bad.rmat'
	bad_magic.write_bytes(b'XMAT1' + bytes(16))
	# assert a wrong magic is rejected
	with pytest.raises(InvalidParameterError):
		read_matrix(bad_magic)

	truncated = tmp_path / 'short.rmat'
	write_matrix(np.ones((2, 2)), truncated)
	truncated.write_bytes(truncated.read_bytes()[:-8])
	# assert a payload shorter than rows x cols is rejected
	with pytest.raises(InvalidParameterError):
		read_matrix(truncated)


def test_csv_matrix_file(tmp_path):
	matrix = np.array([[0.1, -2.5e-7, 3.0], [1 / 3, 1e10, -0.0]])
	path = tmp_path / 'm.csv'
	write_matrix_csv(matrix, path)
	# assert the "rows,cols" header line
	assert path.read_text().splitlines()[0] == '2,3'
	# assert the values survive the text format
	assert np.array_equal(read_matrix_csv(path), matrix)

	path.write_text('2,2\n1,2\n')
	# assert a header that disagrees with the data is rejected
	with pytest.raises(InvalidParameterError):
		read_matrix_csv(path)


def test_as_dense_rejects_invalid_input():
	# assert non-finite, empty and non 2-D inputs are rejected
	with pytest.raises(InvalidParameterError):
		as_dense([[1.0, np.nan]])
	with pytest.raises(InvalidParameterError):
		as_dense(np.zeros((0, 3)))
	with pytest.raises(InvalidParameterError):
		as_dense(np.zeros(3))


def test_generate_synthetic():
	instance = generate_synthetic(40, 60, 3, 0.2, seed=7)
	mask = instance.outlier_mask()
	# assert the low-rank part has the requested rank and vanishes on the outlier columns
	assert np.linalg.matrix_rank(instance.truth_low_rank) == 3
	assert not np.any(instance.truth_low_rank[:, mask])
	# assert the outlier part only lives on the outlier columns
	assert not np.any(instance.truth_outliers[:, ~mask])
	assert np.all(np.linalg.norm(instance.truth_outliers[:, mask], axis=0) > 0)
	# assert D = L + C and no noise was added
	assert np.array_equal(instance.observed, instance.truth_low_rank + instance.truth_outliers)
	assert instance.truth_noise is None
	# assert the instance is read-only
	assert not instance.observed.flags.writeable
	# assert the same seed gives the same instance
	assert np.array_equal(generate_synthetic(40, 60, 3, 0.2, seed=7).observed, instance.observed)


def test_generate_synthetic_fixed_count_and_noise():
	instance = generate_synthetic(30, 50, 2, 0.0, noise_sigma=0.01, seed=1, fixed_outlier_count=4)
	# assert exactly K outliers are drawn
	assert instance.nr_outliers == 4
	assert instance.truth_noise is not None
	# assert the noisy observation still decomposes exactly
	total = instance.truth_low_rank + instance.truth_outliers + instance.truth_noise
	assert np.allclose(instance.observed, total, atol=1e-12)

	# assert invalid generator parameters are rejected
	with pytest.raises(InvalidParameterError):
		generate_synthetic(10, 10, 11, 0.1)
	with pytest.raises(InvalidParameterError):
		generate_synthetic(10, 10, 2, 1.0)
	with pytest.raises(InvalidParameterError):
		generate_synthetic(10, 10, 2, 0.1, fixed_outlier_count=10)


def test_data_instance_validation():
	low_rank = np.outer(np.ones(4), np.arange(1.0, 6.0))
	outliers = np.zeros((4, 5))
	# assert a low-rank part that does not vanish at the outlier columns is rejected
	with pytest.raises(InvalidParameterError):
		DataInstance(observed=low_rank + outliers, truth_low_rank=low_rank, truth_outliers=outliers,
		             outlier_indices=np.array([1]))
	# assert an observation that is not L + C is rejected
	with pytest.raises(InvalidParameterError):
		DataInstance(observed=low_rank + 1.0, truth_low_rank=low_rank, truth_outliers=outliers)
	# assert unsorted outlier indices are rejected
	with pytest.raises(InvalidParameterError):
		DataInstance(observed=low_rank, outlier_indices=np.array([3, 1]))
	# assert an observation alone carries no truth
	assert not DataInstance(observed=low_rank).has_truth


def test_instance_folder(tmp_path):
	instance = generate_synthetic(20, 30, 2, 0.1, seed=3)
	metadata = write_instance(instance, tmp_path / 'inst')
	# assert the metadata and the files written
	assert metadata['n1'] == 20 and metadata['n2'] == 30 and metadata['true_rank'] == 2
	assert (tmp_path / 'inst' / 'instance.json').exists()
	assert 'outlier_indices.txt' in metadata['files']

	restored = read_instance(tmp_path / 'inst')
	# assert the instance is restored with its ground truth
	assert np.array_equal(restored.observed, instance.observed)
	assert np.array_equal(restored.outlier_indices, instance.outlier_indices)
	assert restored.true_rank == 2 and restored.has_truth

	# assert a folder without observed.rmat is rejected
	with pytest.raises(InvalidParameterError):
		read_instance(tmp_path)


def test_write_sketch(tmp_path):
	instance = generate_synthetic(20, 30, 2, 0.1, seed=3)
	write_sketch(build_sketch(instance, SketchPlan(m1=10, m2=5, design='red')), tmp_path / 'red')
	write_sketch(build_sketch(instance, SketchPlan(m1=10, m2=5, design='rrd')), tmp_path / 'rrd')
	# assert the row operator sidecar depends on the design
	assert (tmp_path / 'red' / 'phi.rmat').exists() and not (tmp_path / 'red' / 'row_indices.txt').exists()
	assert (tmp_path / 'rrd' / 'row_indices.txt').exists() and not (tmp_path / 'rrd' / 'phi.rmat').exists()
	assert read_matrix(tmp_path / 'red' / 'compressed.rmat').shape[0] == 5


def test_paper_block_sizes():
	sizes = paper_block_sizes(4, 300)
	# assert the first half gets five times the columns of the second half
	assert sizes == [125, 125, 25, 25]
	# assert the sizes always add up to the total
	assert sum(paper_block_sizes(20, 300)) == 300
	assert sum(paper_block_sizes(7, 101)) == 101
	with pytest.raises(InvalidParameterError):
		paper_block_sizes(5, 3)


def test_generate_clustered_rows():
	sizes = paper_block_sizes(4, 60)
	low_rank = generate_clustered_rows(4, 2, sizes, 40, seed=5)
	# assert the shape and rank of L
	assert low_rank.shape == (60, 40)
	assert np.linalg.matrix_rank(low_rank) == 8
	# assert each row block has the rank of one cluster
	start = 0
	for size in sizes:
		assert np.linalg.matrix_rank(low_rank[start:start + size]) == 2
		start += size


def test_coherence_of_flat_and_spiky_matrices():
	stats = estimate_coherence(np.ones((8, 10)))
	# assert a constant matrix is maximally incoherent
	assert stats.rank_used == 1
	assert stats.mu_v == pytest.approx(1.0) and stats.mu_u == pytest.approx(1.0)
	assert stats.eta_u == pytest.approx(1.0) and stats.eta_v == pytest.approx(1.0)

	spiky = np.zeros((8, 10))
	spiky[2, 3] = 5.0
	stats = estimate_coherence(spiky)
	# assert a single nonzero entry is maximally coherent
	assert stats.mu_v == pytest.approx(10.0) and stats.mu_u == pytest.approx(8.0)
	# assert mu_v' only looks at the nonzero columns
	assert stats.mu_v_prime == pytest.approx(1.0)

	# assert the coherence of a zero matrix is undefined
	with pytest.raises(DegenerateInputError):
		estimate_coherence(np.zeros((3, 3)))


def test_coherence_ignores_outlier_columns():
	instance = generate_synthetic(30, 40, 3, 0.25, seed=11)
	stats = estimate_coherence(instance.truth_low_rank)
	u, s, v = compact_svd(instance.truth_low_rank)
	# assert the rank and the range of the parameters
	assert stats.rank_used == 3 and len(s) == 3
	assert 1.0 <= stats.mu_v <= 40 / 3
	assert stats.mu_v_prime <= stats.mu_v * (40 - instance.nr_outliers) / 40 + 1e-9


def check_instance(instance: DataInstance):
	n1, n2 = instance.observed.shape
	mask = instance.outlier_mask()
	total = instance.truth_low_rank + instance.truth_outliers
	if instance.truth_noise is not None:
		total = total + instance.truth_noise
	# assert D = L + C (+ N) with sorted, distinct outlier indices inside [0, N2)
	assert np.allclose(instance.observed, total, atol=1e-12)
	assert np.all(np.diff(instance.outlier_indices) > 0)
	assert np.all((0 <= instance.outlier_indices) & (instance.outlier_indices < n2))
	# assert L vanishes on the outlier columns and C lives only there
	assert not np.any(instance.truth_low_rank[:, mask])
	assert not np.any(instance.truth_outliers[:, ~mask])
	assert np.all(np.linalg.norm(instance.truth_outliers[:, mask], axis=0) > 0)
	# assert the recorded rank is the rank of L
	assert numerical_rank(instance.truth_low_rank) == instance.true_rank


def test_every_generator_keeps_the_instance_invariants():
	sizes = paper_block_sizes(4, 60)
	clustered = generate_clustered_rows(4, 2, sizes, 40, seed=5)
	for seed in range(5):
		check_instance(generate_synthetic(40, 60, 3, 0.2, seed=seed))
		check_instance(generate_synthetic(30, 50, 2, 0.0, seed=seed, fixed_outlier_count=4))
		check_instance(generate_synthetic(30, 50, 2, 0.1, noise_sigma=0.01, seed=seed))
		check_instance(generate_synthetic(60, 40, 8, 0.1, seed=seed, low_rank=clustered))


def test_generate_synthetic_rejects_low_rank_of_wrong_rank():
	low_rank = generate_clustered_rows(4, 2, paper_block_sizes(4, 60), 40, seed=5)
	# assert a supplied L must have the declared rank
	with pytest.raises(InvalidParameterError):
		generate_synthetic(60, 40, 4, 0.1, low_rank=low_rank)
	# assert a supplied L of the right rank is recorded as such
	assert generate_synthetic(60, 40, 8, 0.1, low_rank=low_rank).true_rank == 8


def test_bernoulli_outlier_fraction():
	fractions = [generate_synthetic(5, 1000, 1, 0.2, seed=seed).nr_outliers / 1000 for seed in range(50)]
	# assert each column is an outlier with probability rho
	assert abs(np.mean(fractions) - 0.2) <= 0.01


def test_matrix_files_over_random_shapes(tmp_path):
	rng = np.random.default_rng(8)
	for k in range(10):
		rows, cols = rng.integers(1, 30, size=2)
		matrix = rng.standard_normal((rows, cols)) * 10.0 ** rng.integers(-8, 8)
		write_matrix(matrix, tmp_path / f'{k}.rmat')
		write_matrix_csv(matrix, tmp_path / f'{k}.csv')
		# assert both formats restore the exact values and shape
		assert np.array_equal(read_matrix(tmp_path / f'{k}.rmat'), matrix)
		assert np.array_equal(read_matrix_csv(tmp_path / f'{k}.csv'), matrix)


if __name__ == '__main__':
	test_as_dense_rejects_invalid_input()
	test_generate_synthetic()
	test_generate_synthetic_fixed_count_and_noise()
	test_data_instance_validation()
	test_paper_block_sizes()
	test_generate_clustered_rows()
	test_coherence_of_flat_and_spiky_matrices()
	test_coherence_ignores_outlier_columns()
	test_every_generator_keeps_the_instance_invariants()
	test_generate_synthetic_rejects_low_rank_of_wrong_rank()
	test_bernoulli_outlier_fraction()
