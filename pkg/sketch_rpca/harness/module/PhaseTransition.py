"""
Monte-Carlo phase transitions over (m1, m2) grids and the check of the sufficient sketch sizes against the empirical
success rate.
"""
import json
import numpy as np
import pandas as pd
import time

from dataclasses import asdict
from joblib import Parallel, delayed
from loguru import logger
from pathlib import Path
from typing import (
	List,
	Optional
)

from sketch_rpca.bounds.module.Bounds import (
	bound_alg1_red,
	compute_bound
)
from sketch_rpca.configs.configs import (
	C_CONCENTRATION,
	N_JOBS,
	SUCCESS_TOL
)
from sketch_rpca.custom_types.bounds_types import BoundInputs
from sketch_rpca.custom_types.data_types import DataInstance
from sketch_rpca.custom_types.harness_types import (
	GridResult,
	GridSpec,
	TrialOutcomeDict
)
from sketch_rpca.custom_types.recovery_types import ConvexSolveConfig
from sketch_rpca.custom_types.sketch_types import (
	Sketch,
	SketchPlan
)
from sketch_rpca.matstore.module.Coherence import estimate_coherence
from sketch_rpca.matstore.module.Synthetic import (
	generate_clustered_rows,
	generate_synthetic,
	paper_block_sizes
)
from sketch_rpca.metrics.module.Metrics import classify_recovery
from sketch_rpca.recovery.module.ColumnSparseADMM import (
	default_lambda,
	recover_subspace_alg2
)
from sketch_rpca.recovery.module.IndependentOutliers import recover_subspace_alg1
from sketch_rpca.sketching.module.Sketching import build_sketch

GRID_CSV_COLUMNS = ['m1', 'm2', 'success_rate', 'mean_error', 'mean_runtime']


def derive_seed(*keys: int) -> int:
	"""
	Seed derived from a tuple of non-negative integer keys (base seed, trial, cell indices, ...).
	The key count leads the entropy: tuples of different lengths never collide through zero padding.
	"""
	return int(np.random.SeedSequence([len(keys), *(int(k) for k in keys)]).generate_state(1)[0])


def make_instance(spec: GridSpec, trial: int) -> DataInstance:
	"""
	Instance of a trial; it only depends on (base_seed, trial) so every cell of a trial sees the same data.
	"""
	params = dict(spec.instance_params)
	seed = derive_seed(spec.base_seed, trial)
	low_rank = None
	if spec.clustered is not None:
		n_clusters = spec.clustered['n_clusters']
		per_cluster_dims = spec.clustered['per_cluster_dims']
		low_rank = generate_clustered_rows(
			n_clusters, per_cluster_dims, paper_block_sizes(n_clusters, params['n1']), params['n2'],
			derive_seed(spec.base_seed, trial, 1))
		params['rank'] = n_clusters * per_cluster_dims
	return generate_synthetic(seed=seed, low_rank=low_rank, **params)


def sampled_outlier_lambda(instance: DataInstance, sketch: Sketch) -> float:
	"""
	3 / (7 sqrt(K_s)) with K_s the true number of outliers among the sketched columns (at least 1).
	"""
	sampled_outliers = int(instance.outlier_mask()[sketch.column_indices].sum())
	return default_lambda(max(sampled_outliers, 1))


def run_cell(spec: GridSpec, instance: DataInstance, i: int, j: int, trial: int) -> TrialOutcomeDict:
	"""
	One (m1, m2) cell of one trial: sketch, recover and classify. Any error counts as a failed trial.
	"""
	m1, m2 = spec.m1_values[i], spec.m2_values[j]
	plan = SketchPlan(
		m1=m1,
		m2=m2,
		design=spec.design,
		column_replacement=True,
		dedupe=spec.algorithm == 'alg1',
		seed=derive_seed(spec.base_seed, trial, i, j)
	)
	start = time.perf_counter()
	try:
		sketch = build_sketch(instance, plan)
		if spec.algorithm == 'alg1':
			basis, report = recover_subspace_alg1(instance, plan, sketch=sketch)
		else:
			lam = spec.lam if spec.lam is not None else sampled_outlier_lambda(instance, sketch)
			basis, report = recover_subspace_alg2(instance, plan, ConvexSolveConfig(lam=lam), sketch=sketch)
		runtime = time.perf_counter() - start
		verdict = classify_recovery(instance, basis, report, SUCCESS_TOL)
		return {'i': i, 'j': j, 'trial': trial, 'exact': verdict.exact, 'subspace_error': verdict.subspace_error,
		        'runtime': runtime, 'failed': False}
	except Exception as e:
		logger.warning(f'trial {trial} at (m1={m1}, m2={m2}) failed: {e}')
		return {'i': i, 'j': j, 'trial': trial, 'exact': False, 'subspace_error': 1.0,
		        'runtime': time.perf_counter() - start, 'failed': True}


def run_trial(spec: GridSpec, trial: int) -> List[TrialOutcomeDict]:
	instance = make_instance(spec, trial)
	return [
		run_cell(spec, instance, i, j, trial)
		for i in range(len(spec.m1_values))
		for j in range(len(spec.m2_values))
	]


def bound_overlay(spec: GridSpec) -> Optional[dict]:
	"""
	Sufficient (m1, m2) of the grid's algorithm and design for the trial-0 instance, for shading plots.
	"""
	instance = make_instance(spec, 0)
	try:
		coherence = estimate_coherence(instance.truth_low_rank)
		k = instance.nr_outliers
		inputs = BoundInputs(
			r=coherence.rank_used, n1=instance.n1, n2=instance.n2, n2_prime=instance.n2 - k, k=k,
			coherence=coherence)
		return compute_bound(inputs, spec.algorithm, spec.design).to_dict()
	except Exception as e:
		logger.warning(f'no bound overlay for this grid: {e}')
		return None


def run_phase_transition(spec: GridSpec, n_jobs: int = N_JOBS) -> GridResult:
	"""
	Empirical probability of exact recovery over the (m1, m2) grid.
	Each trial draws a fresh instance (seeded by base_seed and the trial); each cell of that trial uses a sketch seeded
	by base_seed, the trial and the cell indices, so the grid is reproducible and its cells independent.
	:param spec: grid specification
	:param n_jobs: joblib workers (trials run in parallel)
	:return: success rate, mean subspace error and mean runtime per cell, with provenance metadata
	"""
	logger.info(f'Running a {spec.algorithm}/{spec.design.upper()} phase transition '
	            f'({len(spec.m1_values)}x{len(spec.m2_values)} cells, {spec.trials} trials)...')

	outcomes = Parallel(n_jobs=n_jobs)(delayed(run_trial)(spec, trial) for trial in range(spec.trials))

	shape = (len(spec.m1_values), len(spec.m2_values))
	successes = np.zeros(shape)
	errors = np.zeros(shape)
	runtimes = np.zeros(shape)
	failures = 0
	for outcome in (o for trial_outcomes in outcomes for o in trial_outcomes):
		i, j = outcome['i'], outcome['j']
		successes[i, j] += outcome['exact']
		errors[i, j] += outcome['subspace_error']
		runtimes[i, j] += outcome['runtime']
		failures += outcome['failed']

	metadata = {
		'spec': asdict(spec),
		'seed_schedule': 'instance seed = SeedSequence([2, base_seed, trial]); '
		                 'sketch seed = SeedSequence([4, base_seed, trial, i, j])',
		'success_tol': SUCCESS_TOL,
		'failed_trials': failures,
		'bound_overlay': bound_overlay(spec),
		'runtime_note': 'mean_runtime is wall-clock and not deterministic'
	}

	logger.info(f'Running a {spec.algorithm}/{spec.design.upper()} phase transition... DONE!')
	return GridResult(
		success_rate=successes / spec.trials,
		mean_subspace_error=errors / spec.trials,
		mean_runtime_seconds=runtimes / spec.trials,
		metadata=metadata
	)


def grid_to_frame(spec: GridSpec, result: GridResult) -> pd.DataFrame:
	"""
	Long format table with one row per (m1, m2) cell and the columns m1,m2,success_rate,mean_error,mean_runtime.
	"""
	m1_grid, m2_grid = np.meshgrid(spec.m1_values, spec.m2_values, indexing='ij')
	return pd.DataFrame({
		'm1': m1_grid.ravel(),
		'm2': m2_grid.ravel(),
		'success_rate': result.success_rate.ravel(),
		'mean_error': result.mean_subspace_error.ravel(),
		'mean_runtime': result.mean_runtime_seconds.ravel()
	}, columns=GRID_CSV_COLUMNS)


def write_with_provenance(frame: pd.DataFrame, path, metadata: dict):
	"""
	Writes a table as CSV next to a <file>.meta.json sidecar holding the metadata needed to re-run it.
	"""
	path = Path(path)
	frame.to_csv(path, index=False, float_format='%.10g', lineterminator='\n')
	with open(path.with_name(path.name + '.meta.json'), 'w') as f:
		json.dump(metadata, f, indent=2, sort_keys=True, default=str)


def run_bound_coupling(n1: int, n2: int, rank: int, outlier_count: int, trials: int, delta: float,
                       c: float = C_CONCENTRATION, base_seed: int = 0, n_jobs: int = N_JOBS) -> dict:
	"""
	Runs the independent-outlier recovery with a Gaussian embedding at exactly its sufficient (m1, m2), computed with
	the coherence measured on a pilot instance, over matched instances with the same number of outliers.
	:param n1: number of rows
	:param n2: number of columns
	:param rank: rank of L
	:param outlier_count: number of outlying columns K of every instance
	:param trials: number of instances
	:param delta: failure probability of the bound (success expected w.p. >= 1 - 5 delta)
	:param c: concentration constant c > 1 of the bound
	:param base_seed: seed of the pilot and of the trial schedule
	:param n_jobs: joblib workers
	:return: {'m1', 'm2', 'bound', 'success_rate', 'trials', 'target'}
	"""
	logger.info('Running the sufficient sketch size check...')
	pilot = generate_synthetic(n1, n2, rank, 0.0, seed=derive_seed(base_seed, 0),
	                           fixed_outlier_count=outlier_count)
	coherence = estimate_coherence(pilot.truth_low_rank)
	inputs = BoundInputs(
		r=rank, n1=n1, n2=n2, n2_prime=n2 - outlier_count, k=outlier_count, coherence=coherence, delta=delta, c=c)
	bound = bound_alg1_red(inputs)
	logger.info(f' - sufficient m1={bound.m1_sufficient}, m2={bound.m2_sufficient} -')

	def one_trial(trial: int) -> bool:
		instance = generate_synthetic(n1, n2, rank, 0.0, seed=derive_seed(base_seed, 1, trial),
		                              fixed_outlier_count=outlier_count)
		plan = SketchPlan(m1=bound.m1_sufficient, m2=bound.m2_sufficient, design='red',
		                  seed=derive_seed(base_seed, 2, trial))
		try:
			basis, report = recover_subspace_alg1(instance, plan)
			return classify_recovery(instance, basis, report).exact
		except Exception as e:
			logger.warning(f'trial {trial} failed: {e}')
			return False

	exact = Parallel(n_jobs=n_jobs)(delayed(one_trial)(t) for t in range(trials))

	logger.info('Running the sufficient sketch size check... DONE!')
	return {
		'm1': bound.m1_sufficient,
		'm2': bound.m2_sufficient,
		'bound': bound.to_dict(),
		'success_rate': float(np.mean(exact)),
		'trials': trials,
		'target': 1 - 5 * delta
	}
