"""
Runtime of the randomized convex recovery against the same convex program solved on the full data matrix.
"""
import numpy as np
import pandas as pd
import time

from loguru import logger
from typing import (
	List,
	Literal
)

from sketch_rpca.configs.configs import (
	BASELINE_TIMEOUT,
	COLUMN_NORM_TOL,
	SUCCESS_TOL
)
from sketch_rpca.custom_types.harness_types import BaselineRowDict
from sketch_rpca.custom_types.recovery_types import ConvexSolveConfig
from sketch_rpca.custom_types.sketch_types import SketchPlan
from sketch_rpca.exceptions import (
	ConvergenceError,
	SolverTimeout
)
from sketch_rpca.harness.module.PhaseTransition import (
	derive_seed,
	sampled_outlier_lambda
)
from sketch_rpca.matstore.module.Synthetic import generate_synthetic
from sketch_rpca.metrics.module.Metrics import classify_recovery
from sketch_rpca.recovery.module.ColumnSparseADMM import (
	decompose,
	default_lambda,
	recover_subspace_alg2
)
from sketch_rpca.sketching.module.Sketching import build_sketch

BASELINE_CSV_COLUMNS = ['n', 'randomized_median_seconds', 'baseline_median_seconds', 'speedup', 'censored',
                        'randomized_success_rate']


def time_baseline(data: np.ndarray, outlier_count: int, timeout: float) -> float:
	"""
	Wall-clock seconds of the full-data convex decomposition with lambda = 3 / (7 sqrt(K)), followed by column-norm
	outlier detection. Raises SolverTimeout past the time limit; a run stopped by the iteration cap is timed as it is.
	"""
	config = ConvexSolveConfig(lam=default_lambda(max(outlier_count, 1)), time_limit=timeout)
	start = time.perf_counter()
	try:
		decomposition = decompose(data, config)
	except SolverTimeout:
		raise
	except ConvergenceError as e:
		logger.warning(f'baseline stopped at its iteration cap: {e}')
		decomposition = e.partial
	decomposition.outlier_columns(data, COLUMN_NORM_TOL)
	return time.perf_counter() - start


def run_baseline_comparison(sizes: List[int], rank: int, outlier_prob: float, m1: int, m2: int, trials: int,
                            design: Literal['red', 'rrd'] = 'red', timeout: float = BASELINE_TIMEOUT,
                            base_seed: int = 0) -> List[BaselineRowDict]:
	"""
	For square N x N instances, median runtimes of the randomized convex recovery (sketch, decomposition of the
	sketch, basis and detection on all columns) and of the full-data decomposition.
	Runs are serial so timings are comparable; a baseline run exceeding the timeout is censored and the speedup of that
	size is then a lower bound computed with the timeout.
	:param sizes: values of N = N1 = N2
	:param rank: rank of L
	:param outlier_prob: column outlier probability
	:param m1: sketched columns
	:param m2: compressed rows
	:param trials: instances per size
	:param design: row compression design
	:param timeout: wall-clock limit of each baseline solve, in seconds
	:param base_seed: seed of the instance schedule
	:return: one row per size
	"""
	logger.info('Running the randomized vs. full-data runtime comparison...')

	rows = []
	for n in sizes:
		logger.info(f' - N = {n} -')
		randomized_times, baseline_times, successes = [], [], []
		censored = False
		for trial in range(trials):
			instance = generate_synthetic(n, n, rank, outlier_prob, seed=derive_seed(base_seed, n, trial))
			plan = SketchPlan(m1=m1, m2=m2, design=design, dedupe=False, seed=derive_seed(base_seed, n, trial, 1))

			start = time.perf_counter()
			try:
				sketch = build_sketch(instance, plan)
				config = ConvexSolveConfig(lam=sampled_outlier_lambda(instance, sketch))
				basis, report = recover_subspace_alg2(instance, plan, config, sketch=sketch)
				randomized_times.append(time.perf_counter() - start)
				successes.append(classify_recovery(instance, basis, report, SUCCESS_TOL).exact)
			except Exception as e:
				logger.warning(f'randomized recovery failed at N = {n}, trial {trial}: {e}')
				randomized_times.append(time.perf_counter() - start)
				successes.append(False)

			if censored:
				continue
			try:
				baseline_times.append(time_baseline(instance.observed, instance.nr_outliers, timeout))
			except SolverTimeout:
				logger.warning(f'baseline exceeded {timeout}s at N = {n}; censoring this size')
				censored = True

		randomized_median = float(np.median(randomized_times))
		baseline_median = float(timeout) if censored or not baseline_times else float(np.median(baseline_times))
		rows.append({
			'n': n,
			'randomized_median_seconds': randomized_median,
			'baseline_median_seconds': baseline_median,
			'speedup': baseline_median / randomized_median if randomized_median > 0 else None,
			'censored': censored,
			'randomized_success_rate': float(np.mean(successes))
		})

	logger.info('Running the randomized vs. full-data runtime comparison... DONE!')
	return rows


def baseline_to_frame(rows: List[BaselineRowDict]) -> pd.DataFrame:
	return pd.DataFrame(rows, columns=BASELINE_CSV_COLUMNS)
