"""
Two-stage data sketch: random column sampling followed by row compression, either with a random Gaussian embedding
(RED) or with uniform row sampling (RRD).
"""
import numpy as np
import warnings

from loguru import logger
from sklearn.exceptions import DataDimensionalityWarning
from sklearn.random_projection import GaussianRandomProjection
from typing import Tuple

from sketch_rpca.custom_types.data_types import (
	DataInstance,
	DenseMatrix
)
from sketch_rpca.custom_types.sketch_types import (
	RowOperator,
	Sketch,
	SketchPlan
)
from sketch_rpca.exceptions import InvalidParameterError


def sample_columns(data: DenseMatrix, m1: int, replacement: bool = True, dedupe: bool = True, seed: int = 0) \
		-> Tuple[DenseMatrix, np.ndarray]:
	"""
	Uniform random column sampling.
	With replacement and dedupe, repeated columns are removed keeping the order of first occurrence.
	:param data: N1 x N2 matrix
	:param m1: number of draws
	:param replacement: sample with replacement
	:param dedupe: remove repeated columns (only relevant with replacement)
	:param seed: seed of the random generator
	:return: (sampled columns D_s, their indices in D)
	"""
	n2 = data.shape[1]
	if m1 < 1:
		raise InvalidParameterError(f'm1 = {m1} must be >= 1')
	if not replacement and m1 > n2:
		raise InvalidParameterError(f'm1 = {m1} > N2 = {n2} is not possible without replacement')

	rng = np.random.default_rng(seed)
	if replacement:
		indices = rng.integers(0, n2, size=m1)
		if dedupe:
			_, first = np.unique(indices, return_index=True)
			indices = indices[np.sort(first)]
	else:
		indices = rng.choice(n2, size=m1, replace=False)

	return data[:, indices], indices.astype(np.int64)


def embed_rows_gaussian(columns: DenseMatrix, m2: int, seed: int = 0) -> Tuple[DenseMatrix, DenseMatrix]:
	"""
	Random Gaussian embedding of the rows: Phi has i.i.d. N(0, 1/m2) entries.
	:param columns: N1 x m1' matrix
	:param m2: embedding dimension
	:param seed: seed of the random generator
	:return: (Phi @ columns, Phi)
	"""
	if m2 < 1:
		raise InvalidParameterError(f'm2 = {m2} must be >= 1')
	projection = GaussianRandomProjection(n_components=m2, random_state=seed)
	with warnings.catch_warnings():
		# m2 larger than N1 is allowed
		warnings.simplefilter('ignore', DataDimensionalityWarning)
		projection.fit(np.zeros((1, columns.shape[0])))
	phi = np.asarray(projection.components_, dtype=np.float64)
	return phi @ columns, phi


def sample_rows(columns: DenseMatrix, m2: int, seed: int = 0) -> Tuple[DenseMatrix, np.ndarray]:
	"""
	Uniform row sampling without replacement; indices are returned in ascending order.
	:param columns: N1 x m1' matrix
	:param m2: number of rows to keep
	:param seed: seed of the random generator
	:return: (sampled rows, their indices)
	"""
	n1 = columns.shape[0]
	if m2 < 1 or m2 > n1:
		raise InvalidParameterError(f'm2 = {m2} must lie in [1, N1 = {n1}]')
	rng = np.random.default_rng(seed)
	indices = np.sort(rng.choice(n1, size=m2, replace=False)).astype(np.int64)
	return columns[indices, :], indices


def sketch_seeds(seed: int) -> Tuple[int, int]:
	"""
	Independent seeds for the column and the row stage of a sketch.
	"""
	column_seed, row_seed = np.random.SeedSequence(seed).generate_state(2)
	return int(column_seed), int(row_seed)


def build_sketch(instance: DataInstance, plan: SketchPlan) -> Sketch:
	"""
	Column sampling followed by the row compression selected in the plan.
	:param instance: data instance holding D
	:param plan: sketch plan
	:return: the sketch, with the sampled columns, the compressed matrix, the column indices and the row operator
	"""
	if plan.design == 'rrd' and plan.m2 > instance.n1:
		raise InvalidParameterError(f'm2 = {plan.m2} > N1 = {instance.n1} is not possible with row sampling')
	logger.debug(f'-- building a {plan.design.upper()} sketch with m1={plan.m1}, m2={plan.m2}...')

	column_seed, row_seed = sketch_seeds(plan.seed)
	sampled, column_indices = sample_columns(
		instance.observed, plan.m1, plan.column_replacement, plan.dedupe, column_seed)

	if plan.design == 'red':
		compressed, phi = embed_rows_gaussian(sampled, plan.m2, row_seed)
		operator = RowOperator(design='red', matrix=phi)
	else:
		compressed, row_indices = sample_rows(sampled, plan.m2, row_seed)
		operator = RowOperator(design='rrd', indices=row_indices)

	logger.debug(f'-- building a {plan.design.upper()} sketch... DONE! ({compressed.shape[0]}x{compressed.shape[1]})')
	return Sketch(
		sampled_columns=sampled,
		compressed=compressed,
		column_indices=column_indices,
		row_operator=operator,
		plan=plan
	)
