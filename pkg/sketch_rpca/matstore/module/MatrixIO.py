"""
Dense matrix storage: a binary format (magic "RMAT1", two little-endian uint64 dimensions, row-major little-endian
float64 values), a CSV format with a "rows,cols" header line, and directory layouts for data instances and sketches.
"""
import json
import numpy as np
import os
import pandas as pd
import struct

from loguru import logger
from pathlib import Path
from typing import Union

from sketch_rpca.custom_types.data_types import (
	DataInstance,
	DenseMatrix,
	InstanceMetadataDict
)
from sketch_rpca.custom_types.sketch_types import Sketch
from sketch_rpca.exceptions import InvalidParameterError

MAGIC = b'RMAT1'
HEADER = struct.Struct('<QQ')

PathLike = Union[str, os.PathLike]


def as_dense(data) -> DenseMatrix:
	"""
	Validates and converts the input into a finite, 2-D, float64 matrix with at least one row and one column.
	:param data: array-like
	:return: numpy array of dtype float64
	"""
	matrix = np.asarray(data, dtype=np.float64)
	if matrix.ndim != 2:
		raise InvalidParameterError(f'expected a 2-D matrix; got {matrix.ndim} dimension(s)')
	if matrix.shape[0] < 1 or matrix.shape[1] < 1:
		raise InvalidParameterError(f'matrix must have rows >= 1 and cols >= 1; got {matrix.shape}')
	if not np.all(np.isfinite(matrix)):
		raise InvalidParameterError('matrix has NaN or Inf entries')
	return matrix


def write_matrix(matrix: DenseMatrix, path: PathLike):
	"""
	Writes a matrix in the binary format.
	:param matrix: dense matrix
	:param path: destination file
	"""
	matrix = as_dense(matrix)
	rows, cols = matrix.shape
	with open(path, 'wb') as f:
		f.write(MAGIC)
		f.write(HEADER.pack(rows, cols))
		f.write(np.ascontiguousarray(matrix, dtype='<f8').tobytes(order='C'))


def read_matrix(path: PathLike) -> DenseMatrix:
	"""
	Reads a matrix written by write_matrix.
	:param path: source file
	:return: dense matrix
	"""
	with open(path, 'rb') as f:
		raw = f.read()
	if raw[:len(MAGIC)] != MAGIC:
		raise InvalidParameterError(f'{path} is not a RMAT1 file')
	offset = len(MAGIC) + HEADER.size
	if len(raw) < offset:
		raise InvalidParameterError(f'{path} has a truncated header')
	rows, cols = HEADER.unpack(raw[len(MAGIC):offset])
	expected = rows * cols * 8
	if len(raw) - offset != expected:
		raise InvalidParameterError(f'{path} holds {len(raw) - offset} data bytes; expected {expected}')
	data = np.frombuffer(raw, dtype='<f8', offset=offset).astype(np.float64).reshape(rows, cols)
	return as_dense(data)


def write_matrix_csv(matrix: DenseMatrix, path: PathLike):
	"""
	Writes a matrix as CSV with the header line "rows,cols" followed by one line per row.
	:param matrix: dense matrix
	:param path: destination file
	"""
	matrix = as_dense(matrix)
	with open(path, 'w', newline='') as f:
		f.write(f'{matrix.shape[0]},{matrix.shape[1]}\n')
		pd.DataFrame(matrix).to_csv(f, header=False, index=False, float_format='%.17g')


def read_matrix_csv(path: PathLike) -> DenseMatrix:
	"""
	Reads a matrix written by write_matrix_csv.
	:param path: source file
	:return: dense matrix
	"""
	with open(path, 'r') as f:
		header = f.readline().strip()
		try:
			rows, cols = (int(v) for v in header.split(','))
		except ValueError:
			raise InvalidParameterError(f'{path} has an invalid header "{header}"; expected "rows,cols"')
	data = pd.read_csv(path, skiprows=1, header=None, dtype=np.float64, float_precision='round_trip').to_numpy()
	if data.shape != (rows, cols):
		raise InvalidParameterError(f'{path} holds a {data.shape} matrix; header says {(rows, cols)}')
	return as_dense(data)


def write_indices(indices, path: PathLike):
	"""
	Writes an index list, one decimal index per line.
	"""
	with open(path, 'w') as f:
		f.writelines(f'{int(i)}\n' for i in indices)


def read_indices(path: PathLike) -> np.ndarray:
	with open(path, 'r') as f:
		return np.array([int(line) for line in f if line.strip()], dtype=np.int64)


def write_instance(instance: DataInstance, folder: PathLike) -> InstanceMetadataDict:
	"""
	Stores a data instance in a folder: observed.rmat, the ground truth matrices that are present,
	outlier_indices.txt and an instance.json metadata file.
	:param instance: the instance to store
	:param folder: destination folder (created if missing)
	:return: the metadata written to instance.json
	"""
	folder = Path(folder)
	folder.mkdir(parents=True, exist_ok=True)
	logger.debug(f'-- writing instance to {folder}...')

	files = []
	for name in ('observed', 'truth_low_rank', 'truth_outliers', 'truth_noise'):
		matrix = getattr(instance, name)
		if matrix is not None:
			write_matrix(matrix, folder / f'{name}.rmat')
			files.append(f'{name}.rmat')
	if instance.outlier_indices is not None:
		write_indices(instance.outlier_indices, folder / 'outlier_indices.txt')
		files.append('outlier_indices.txt')

	metadata: InstanceMetadataDict = {
		'n1': instance.n1,
		'n2': instance.n2,
		'true_rank': instance.true_rank,
		'nr_outliers': instance.nr_outliers,
		'has_noise': instance.truth_noise is not None,
		'files': files
	}
	with open(folder / 'instance.json', 'w') as f:
		json.dump(metadata, f, indent=2)

	logger.debug(f'-- writing instance to {folder}... DONE!')
	return metadata


def read_instance(folder: PathLike) -> DataInstance:
	"""
	Loads a data instance stored by write_instance. A folder holding only observed.rmat is also accepted.
	:param folder: source folder
	:return: the data instance
	"""
	folder = Path(folder)
	observed_path = folder / 'observed.rmat'
	if not observed_path.exists():
		raise InvalidParameterError(f'{folder} does not hold an observed.rmat file')

	true_rank = None
	if (folder / 'instance.json').exists():
		with open(folder / 'instance.json', 'r') as f:
			true_rank = json.load(f).get('true_rank')

	def optional_matrix(name):
		path = folder / f'{name}.rmat'
		return read_matrix(path) if path.exists() else None

	indices_path = folder / 'outlier_indices.txt'
	return DataInstance(
		observed=read_matrix(observed_path),
		truth_low_rank=optional_matrix('truth_low_rank'),
		truth_outliers=optional_matrix('truth_outliers'),
		truth_noise=optional_matrix('truth_noise'),
		outlier_indices=read_indices(indices_path) if indices_path.exists() else None,
		true_rank=true_rank
	)


def write_sketch(sketch: Sketch, folder: PathLike):
	"""
	Stores a sketch: compressed.rmat, column_indices.txt and, depending on the design, phi.rmat (RED) or
	row_indices.txt (RRD).
	:param sketch: the sketch to store
	:param folder: destination folder (created if missing)
	"""
	folder = Path(folder)
	folder.mkdir(parents=True, exist_ok=True)
	write_matrix(sketch.compressed, folder / 'compressed.rmat')
	write_indices(sketch.column_indices, folder / 'column_indices.txt')
	if sketch.row_operator.design == 'red':
		write_matrix(sketch.row_operator.matrix, folder / 'phi.rmat')
	else:
		write_indices(sketch.row_operator.indices, folder / 'row_indices.txt')
