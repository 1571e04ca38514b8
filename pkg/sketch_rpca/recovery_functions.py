import numpy as np
import time

from loguru import logger

from sketch_rpca.bounds.module.Bounds import compute_bound
from sketch_rpca.configs.configs import (
	COLUMN_NORM_TOL,
	DETECTION_THRESHOLD,
	RANK_TOL_BASIS,
	REL_THRESHOLD,
	SUCCESS_TOL
)
from sketch_rpca.custom_types.bounds_types import (
	BoundInputs,
	BoundResult
)
from sketch_rpca.custom_types.data_types import DataInstance
from sketch_rpca.custom_types.recovery_types import (
	BackpackRecoveryDict,
	ConvexSolveConfig,
	OutputsRecoveryDict
)
from sketch_rpca.custom_types.sketch_types import SketchPlan
from sketch_rpca.exceptions import InvalidParameterError
from sketch_rpca.metrics.module.Metrics import classify_recovery
from sketch_rpca.recovery.module.ColumnSparseADMM import (
	default_lambda,
	recover_subspace_alg2
)
from sketch_rpca.recovery.module.IndependentOutliers import recover_subspace_alg1
from sketch_rpca.sketching.module.Sketching import build_sketch


def run_recovery(
		instance: DataInstance,
		backpack: BackpackRecoveryDict) \
		-> OutputsRecoveryDict:
	"""
	Use this function to recover the column subspace of the low-rank part of a data matrix D = L + C (+ N) from a
	random sketch of D, and to flag its outlying columns.
	Two recovery algorithms are available: "alg1" assumes the outlying columns are independent of each other and of
	the column space of L, and tests every sketched column with a least-squares residual against the others; "alg2"
	assumes the outlying columns are few and solves a nuclear-norm plus l1,2-norm decomposition of the sketch.
	The sketch samples m1 columns of D uniformly at random with replacement and compresses their rows to m2, either
	with a Gaussian embedding ("red") or with uniform row sampling ("rrd").

	:param instance: data instance; when it carries its ground truth, the recovery is also classified
	:param backpack: {
		'algorithm': "alg1" or "alg2"
		'design': "red" or "rrd", the row compression of the sketch
		'm1': int with the number of sampled columns
		'm2': int with the number of compressed rows
		'seed': int (optional) with the seed of the sketch; defaults to 0
		'column_replacement': boolean (optional) indicating if columns are sampled with replacement; defaults to True
		'dedupe': boolean (optional) indicating if repeated sampled columns are dropped; defaults to True for "alg1" and
			to False for "alg2"
		'rel_threshold': float (optional, "alg1") with the relative residual above which a sketched column is an
			outlier; values <= 0 revert to the default 1e-6, with a warning
		'rank_tol': float (optional) with the relative singular value cutoff used to learn the basis
		'omega': float (optional, "alg1") with the radius of the norm ball of the noisy residual test; when omitted,
			the noiseless test is used
		'p_norm': 1 or 2 (optional, "alg1") with the norm of that ball; defaults to 2
		'lam': float (optional, "alg2") with the weight of the l1,2 term; defaults to 3 / (7 sqrt(m1')), m1' being the
			number of sketched columns
		'noise_epsilon': float (optional, "alg2") with the radius of the Frobenius ball of the noisy decomposition
		'column_norm_tol': float (optional, "alg2") with the relative column norm of C above which a sketched column
			is an outlier
		'detection_space': "full_data" (default) or "compressed", the space where all N2 columns are scored
		'detection_threshold': float (optional) with the relative projection residual above which a column of D is an
			outlier
		'success_tol': float (optional) with the subspace error under which the recovery is deemed exact
	}

	:return: {
		'est_rank': int with the estimated rank of L
		'basis_indices': list of int with the indices of the columns of D spanning the recovered subspace
		'outlier_indices': list of int with the indices of the columns of D flagged as outliers
		'scores': list of float with the relative projection residual of every column of D
		'sketch_outlier_indices': list of int with the indices (in D) of the sketched columns flagged as outliers
		'verdict': dict (or None without ground truth) with the keys "subspace_error", "outlier_precision",
			"outlier_recall" and "exact"
		'runtime_seconds': float with the wall-clock time of the recovery
	}
	"""
	logger.info('Running subspace recovery...')

	algorithm = backpack.get('algorithm', 'alg1')
	if algorithm not in ('alg1', 'alg2'):
		raise InvalidParameterError(f'algorithm = {algorithm} not recognized')

	rel_threshold = backpack.get('rel_threshold', REL_THRESHOLD)
	if rel_threshold <= 0:
		logger.warning(f'rel_threshold <= 0; reverting to default {REL_THRESHOLD}')
		rel_threshold = REL_THRESHOLD

	detection_threshold = backpack.get('detection_threshold', DETECTION_THRESHOLD)
	if detection_threshold <= 0:
		logger.warning(f'detection_threshold <= 0; reverting to default {DETECTION_THRESHOLD}')
		detection_threshold = DETECTION_THRESHOLD

	column_norm_tol = backpack.get('column_norm_tol', COLUMN_NORM_TOL)
	if column_norm_tol <= 0:
		logger.warning(f'column_norm_tol <= 0; reverting to default {COLUMN_NORM_TOL}')
		column_norm_tol = COLUMN_NORM_TOL

	plan = SketchPlan(
		m1=backpack['m1'],
		m2=backpack['m2'],
		design=backpack.get('design', 'red'),
		column_replacement=backpack.get('column_replacement', True),
		dedupe=backpack.get('dedupe', algorithm == 'alg1'),
		seed=backpack.get('seed', 0)
	)
	rank_tol = backpack.get('rank_tol', RANK_TOL_BASIS)
	detection_space = backpack.get('detection_space', 'full_data')

	start = time.perf_counter()
	sketch = build_sketch(instance, plan)
	logger.info(f' - sketch of {sketch.effective_m1} columns and {sketch.row_operator.m2} rows -')
	if algorithm == 'alg1':
		basis, report = recover_subspace_alg1(
			instance, plan,
			rel_threshold=rel_threshold,
			rank_tol=rank_tol,
			omega=backpack.get('omega'),
			p_norm=backpack.get('p_norm', 2),
			detection_space=detection_space,
			detection_threshold=detection_threshold,
			sketch=sketch
		)
	else:
		lam = backpack.get('lam')
		if lam is not None and lam <= 0:
			logger.warning('lam <= 0; reverting to default 3 / (7 sqrt(m1))')
			lam = None
		config = ConvexSolveConfig(
			lam=lam if lam is not None else default_lambda(sketch.effective_m1),
			noise_epsilon=backpack.get('noise_epsilon')
		)
		basis, report = recover_subspace_alg2(
			instance, plan, config,
			column_norm_tol=column_norm_tol,
			rank_tol=rank_tol,
			detection_space=detection_space,
			detection_threshold=detection_threshold,
			sketch=sketch
		)
	runtime = time.perf_counter() - start
	logger.info(f' - estimated rank {basis.est_rank}, {len(report.outlier_indices)} outliers -')

	verdict = None
	if instance.has_truth:
		verdict = classify_recovery(instance, basis, report, backpack.get('success_tol', SUCCESS_TOL)).to_dict()

	sketch_outliers = sorted(set(idx for idx in sketch.column_indices.tolist() if report.mask[idx]))

	logger.info('Running subspace recovery... DONE!')

	return {
		'est_rank': int(basis.est_rank),
		'basis_indices': basis.source_indices.tolist(),
		'outlier_indices': report.outlier_indices.tolist(),
		'scores': np.asarray(report.scores).tolist(),
		'sketch_outlier_indices': sketch_outliers,
		'verdict': verdict,
		'runtime_seconds': runtime
	}


def run_bounds(
		inputs: BoundInputs,
		algorithm: str = 'alg1',
		design: str = 'red') \
		-> BoundResult:
	"""
	Use this function to compute the sufficient sketch sizes (m1, m2) of a recovery algorithm and row compression
	design, for a given rank, number of columns, number of outliers and coherence of the low-rank part.
	Every intermediate quantity (concentration factors, bound on the sampled outliers, individual row terms) is kept in
	the returned result for auditing.

	:param inputs: rank, sizes, outlier count, coherence statistics, failure probability and constants
	:param algorithm: "alg1" (independent outliers) or "alg2" (column-sparse outliers)
	:param design: "red" (Gaussian embedding) or "rrd" (uniform row sampling)
	:return: the bound, with the flag "feasible" set to False when the outlier fraction is not admissible
	"""
	logger.info(f'Computing the sufficient sketch sizes of {algorithm}/{design.upper()}...')

	result = compute_bound(inputs, algorithm, design)
	if not result.feasible:
		logger.warning(f'K/N2\' = {inputs.k / inputs.n2_prime:.4f} is not admissible for {algorithm}/{design.upper()}')

	logger.info(f'Computing the sufficient sketch sizes of {algorithm}/{design.upper()}... DONE!')

	return result
