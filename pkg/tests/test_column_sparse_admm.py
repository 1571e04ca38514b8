import numpy as np
import pytest

from sketch_rpca.custom_types.recovery_types import ConvexSolveConfig
from sketch_rpca.custom_types.sketch_types import SketchPlan
from sketch_rpca.exceptions import (
	ConvergenceError,
	InvalidParameterError
)
from sketch_rpca.harness.module.PhaseTransition import sampled_outlier_lambda
from sketch_rpca.matstore.module.Coherence import compact_svd
from sketch_rpca.matstore.module.Synthetic import generate_synthetic
from sketch_rpca.metrics.module.Metrics import (
	classify_recovery,
	subspace_distance
)
from sketch_rpca.recovery.helpers.linalg_helpers import (
	column_soft_threshold,
	project_l1_ball,
	svd_threshold
)
from sketch_rpca.recovery.module.ColumnSparseADMM import (
	ColumnSparseADMM,
	decompose,
	decompose_noisy,
	default_lambda,
	duality_gap,
	optimality_certificate,
	recover_subspace_alg2
)
from sketch_rpca.sketching.module.Sketching import build_sketch


def small_instance():
	return generate_synthetic(40, 200, 2, 0.0, seed=3, fixed_outlier_count=2)


def test_default_lambda():
	# assert lambda = 3 / (7 sqrt(K))
	assert default_lambda(4) == pytest.approx(3 / 14)
	with pytest.raises(InvalidParameterError):
		default_lambda(0)


def test_proximal_maps():
	rng = np.random.default_rng(0)
	matrix = rng.standard_normal((6, 5))
	thresholded, nuclear = svd_threshold(matrix, 0.5)
	s = np.linalg.svd(matrix, compute_uv=False)
	# assert the singular values are shrunk by tau
	assert np.allclose(np.linalg.svd(thresholded, compute_uv=False), np.maximum(s - 0.5, 0))
	assert nuclear == pytest.approx(np.maximum(s - 0.5, 0).sum())

	shrunk = column_soft_threshold(matrix, 1.0)
	norms = np.linalg.norm(matrix, axis=0)
	# assert every column norm is shrunk by tau and directions are kept
	assert np.allclose(np.linalg.norm(shrunk, axis=0), np.maximum(norms - 1.0, 0))
	assert np.allclose(shrunk[:, 0] * norms[0], matrix[:, 0] * np.linalg.norm(shrunk[:, 0]))

	projected = project_l1_ball(np.array([3.0, -1.0, 0.5]), 2.0)
	# assert the l1 projection lands on the sphere and keeps signs
	assert np.abs(projected).sum() == pytest.approx(2.0)
	assert projected.tolist() == pytest.approx([2.0, 0.0, 0.0])


def test_trivial_inputs():
	config = ConvexSolveConfig(lam=0.3)
	zero = decompose(np.zeros((4, 5)), config)
	# assert a zero matrix decomposes into zeros without iterating
	assert zero.iterations == 0
	assert not np.any(zero.low_rank) and not np.any(zero.column_sparse)

	matrix = np.random.default_rng(1).standard_normal((4, 5))
	wide = decompose_noisy(matrix, ConvexSolveConfig(lam=0.3, noise_epsilon=np.linalg.norm(matrix) * 1.01))
	# assert a ball containing D makes L = C = 0 optimal
	assert not np.any(wide.low_rank) and not np.any(wide.column_sparse)
	assert np.allclose(wide.noise_part, matrix)
	with pytest.raises(InvalidParameterError):
		decompose_noisy(matrix, config)


def test_decompose_separates_low_rank_and_outliers():
	instance = small_instance()
	lam = default_lambda(2)
	decomposition = decompose(instance.observed, ConvexSolveConfig(lam=lam))
	# assert the column space of L and the outlier columns are recovered
	u = np.linalg.svd(decomposition.low_rank)[0][:, :2]
	assert subspace_distance(u, compact_svd(instance.truth_low_rank)[0]) < 1e-4
	flagged = decomposition.outlier_columns(instance.observed, 1e-4)
	assert np.flatnonzero(flagged).tolist() == instance.outlier_indices.tolist()
	# assert the returned point is optimal
	assert abs(duality_gap(instance.observed, decomposition)) < 1e-3

	certificate = optimality_certificate(decomposition)
	# assert Y_j = lambda C_j / ||C_j|| on the support and ||Y_j|| <= lambda elsewhere
	assert certificate['support'] < 1e-8
	assert certificate['off_support'] <= 1 + 1e-8
	# assert the spectral part of Y is a subgradient of the nuclear norm at L
	assert certificate['tangent'] < 1e-3
	assert certificate['w_norm'] <= 1 + 1e-3


def test_merit_is_non_increasing_at_fixed_penalty():
	instance = small_instance()
	config = ConvexSolveConfig(lam=default_lambda(2), max_iters=200, primal_tol=1e-14, dual_tol=1e-14,
	                           penalty_adapt=False)
	solver = ColumnSparseADMM(instance.observed, config)
	# assert the iteration cap is reported with the last iterate
	with pytest.raises(ConvergenceError) as error:
		solver.solve()
	assert error.value.partial.iterations == 200
	merit = np.array(solver.merit_history)
	# assert rho ||dC||^2 + ||dY||^2 / rho never increases
	assert np.all(np.diff(merit) <= 1e-9 * merit[0])


def test_callback_sees_every_iteration():
	instance = small_instance()
	seen = []
	decompose(instance.observed, ConvexSolveConfig(lam=default_lambda(2), max_iters=5000),
	          callback=lambda k, low_rank, column_sparse, dual, rho: seen.append(k))
	# assert the hook is called once per iteration, in order
	assert seen == list(range(1, len(seen) + 1))


def test_noisy_decomposition_stays_in_the_ball():
	instance = generate_synthetic(40, 200, 2, 0.0, noise_sigma=0.01, seed=3, fixed_outlier_count=2)
	epsilon = 1.2 * np.linalg.norm(instance.truth_noise)
	config = ConvexSolveConfig(lam=default_lambda(2), noise_epsilon=epsilon, primal_tol=1e-5, dual_tol=1e-5)
	decomposition = decompose_noisy(instance.observed, config)
	# assert ||L + C - D|| <= epsilon up to the solver tolerance
	residual = np.linalg.norm(decomposition.low_rank + decomposition.column_sparse - instance.observed)
	assert residual <= epsilon * (1 + 1e-9) + 1e-4 * np.linalg.norm(instance.observed)
	assert np.linalg.norm(decomposition.noise_part) <= epsilon * (1 + 1e-9)
	# assert the outliers still dominate C
	flagged = decomposition.outlier_columns(instance.observed, 0.5)
	assert np.flatnonzero(flagged).tolist() == instance.outlier_indices.tolist()


def test_recover_subspace_alg2_end_to_end():
	instance = generate_synthetic(100, 200, 2, 0.0, seed=8, fixed_outlier_count=2)
	plan = SketchPlan(m1=100, m2=30, design='red', dedupe=False, seed=1)
	sketch = build_sketch(instance, plan)
	config = ConvexSolveConfig(lam=sampled_outlier_lambda(instance, sketch))
	basis, report = recover_subspace_alg2(instance, plan, config, sketch=sketch)
	verdict = classify_recovery(instance, basis, report)
	# assert exact recovery from the sketch
	assert verdict.exact
	assert basis.est_rank == 2


def test_low_rank_input_is_kept_whole():
	instance = generate_synthetic(15, 20, 2, 0.0, seed=0, fixed_outlier_count=0)
	decomposition = decompose(instance.observed, ConvexSolveConfig(lam=1.0))
	scale = np.linalg.norm(instance.observed)
	# assert a rank 2 matrix with lambda = 1 is all low rank
	assert np.linalg.norm(decomposition.low_rank - instance.observed) <= 1e-7 * scale
	assert np.linalg.norm(decomposition.column_sparse) <= 1e-7 * scale


def test_single_column_is_all_column_sparse():
	column = np.random.default_rng(2).standard_normal((15, 1))
	decomposition = decompose(column, ConvexSolveConfig(lam=0.5))
	scale = np.linalg.norm(column)
	# assert lambda < 1 moves a lone column entirely into C
	assert np.linalg.norm(decomposition.low_rank) <= 1e-7 * scale
	assert np.linalg.norm(decomposition.column_sparse - column) <= 1e-7 * scale


def test_optimality_over_random_instances():
	for seed in range(20):
		instance = generate_synthetic(15, 20, 2, 0.2, seed=seed)
		lam = default_lambda(max(instance.outlier_indices.size, 1))
		decomposition = decompose(instance.observed, ConvexSolveConfig(lam=lam))
		# assert the relative duality gap closes
		assert abs(duality_gap(instance.observed, decomposition)) <= 1e-6
		certificate = optimality_certificate(decomposition)
		# assert the multiplier certifies the returned point
		assert certificate['support'] < 1e-4
		assert certificate['off_support'] <= 1 + 1e-4
		assert certificate['tangent'] < 1e-3
		assert certificate['w_norm'] <= 1 + 1e-3


def test_noisy_decomposition_without_noise_matches_noiseless():
	instance = small_instance()
	lam = default_lambda(2)
	exact = decompose(instance.observed, ConvexSolveConfig(lam=lam))
	noisy = decompose_noisy(instance.observed, ConvexSolveConfig(lam=lam, noise_epsilon=0.0))
	# assert a zero radius ball gives the noiseless solution
	assert np.allclose(noisy.low_rank, exact.low_rank)
	assert np.allclose(noisy.column_sparse, exact.column_sparse)
	assert noisy.noise_part is None


def test_merit_is_non_increasing_over_seeds():
	for seed in range(5):
		instance = generate_synthetic(30, 60, 2, 0.1, seed=seed)
		config = ConvexSolveConfig(lam=default_lambda(max(instance.outlier_indices.size, 1)), max_iters=100,
		                           primal_tol=1e-14, dual_tol=1e-14, penalty_adapt=False)
		solver = ColumnSparseADMM(instance.observed, config)
		with pytest.raises(ConvergenceError):
			solver.solve()
		merit = np.array(solver.merit_history)
		# assert the merit sequence never increases
		assert np.all(np.diff(merit) <= 1e-9 * merit[0])


if __name__ == '__main__':
	test_default_lambda()
	test_proximal_maps()
	test_trivial_inputs()
	test_decompose_separates_low_rank_and_outliers()
	test_merit_is_non_increasing_at_fixed_penalty()
	test_callback_sees_every_iteration()
	test_noisy_decomposition_stays_in_the_ball()
	test_recover_subspace_alg2_end_to_end()
	test_low_rank_input_is_kept_whole()
	test_single_column_is_all_column_sparse()
	test_optimality_over_random_instances()
	test_noisy_decomposition_without_noise_matches_noiseless()
	test_merit_is_non_increasing_over_seeds()
