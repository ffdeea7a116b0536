from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .exceptions import InsufficientDataError, NonInvertibleScatterError, ShapeError

UNIT_NORM_TOLERANCE = 1e-12
SINGULAR_RELATIVE_TOLERANCE = 1e-12


def _readonly(array: np.ndarray) -> np.ndarray:
	array.setflags(write=False)
	return array


@dataclass(frozen=True, eq=False)
class DataMatrix:
	"""Muestra n×d de observaciones reales finitas, inmutable."""

	values: np.ndarray
	labels: tuple[str, ...] = field(default=())

	def __post_init__(self):
		array = np.array(self.values, dtype=float, copy=True)
		if array.ndim != 2:
			raise ShapeError(f"Expected a two-dimensional table, got {array.ndim} dimension(s)")
		if array.shape[0] < 1 or array.shape[1] < 1:
			raise ShapeError(f"Data matrix needs n >= 1 and d >= 1, got shape {array.shape}")
		if not np.all(np.isfinite(array)):
			row, column = np.argwhere(~np.isfinite(array))[0]
			raise ShapeError(f"Non-finite entry at row {row}, column {column}")
		labels = tuple(self.labels)
		if labels and len(labels) != array.shape[1]:
			raise ShapeError(f"Got {len(labels)} column labels for {array.shape[1]} columns")
		object.__setattr__(self, "values", _readonly(array))
		object.__setattr__(self, "labels", labels)

	@classmethod
	def from_rows(cls, rows: Iterable[Sequence[float]], labels: Sequence[str] = ()) -> DataMatrix:
		return cls(np.asarray([list(row) for row in rows], dtype=float), tuple(labels))

	@property
	def n(self) -> int:
		return self.values.shape[0]

	@property
	def d(self) -> int:
		return self.values.shape[1]

	def row(self, index: int) -> np.ndarray:
		if not 0 <= index < self.n:
			raise IndexError(f"Row {index} out of range for {self.n} rows")
		return self.values[index]

	def stack(self, other: DataMatrix) -> DataMatrix:
		if other.d != self.d:
			raise ShapeError(f"Cannot stack d={self.d} with d={other.d}")
		return DataMatrix(np.vstack([self.values, other.values]), self.labels)

	def __len__(self) -> int:
		return self.n

	def __eq__(self, other) -> bool:
		if not isinstance(other, DataMatrix):
			return NotImplemented
		return self.labels == other.labels and np.array_equal(self.values, other.values)

	__hash__ = None


@dataclass(frozen=True, eq=False)
class DirectionSet:
	"""Conjunto de M direcciones unitarias en R^d."""

	directions: np.ndarray

	def __post_init__(self):
		array = np.array(self.directions, dtype=float, copy=True)
		if array.ndim != 2 or array.shape[0] < 1 or array.shape[1] < 1:
			raise ShapeError(f"Direction set needs shape (M, d) with M, d >= 1, got {array.shape}")
		norms = np.linalg.norm(array, axis=1)
		if np.any(np.abs(norms - 1.0) > UNIT_NORM_TOLERANCE):
			raise ShapeError("Every direction must have unit Euclidean norm")
		object.__setattr__(self, "directions", _readonly(array))

	@classmethod
	def normalized(cls, vectors) -> DirectionSet:
		array = np.asarray(vectors, dtype=float)
		norms = np.linalg.norm(array, axis=1, keepdims=True)
		if np.any(norms == 0):
			raise ShapeError("Cannot normalise a zero vector into a direction")
		return cls(array / norms)

	@property
	def M(self) -> int:
		return self.directions.shape[0]

	@property
	def d(self) -> int:
		return self.directions.shape[1]

	def union(self, other: DirectionSet) -> DirectionSet:
		if other.d != self.d:
			raise ShapeError(f"Cannot join direction sets of dimension {self.d} and {other.d}")
		return DirectionSet(np.vstack([self.directions, other.directions]))


@dataclass(frozen=True, eq=False)
class StandardizationParams:
	mean: np.ndarray
	covariance: np.ndarray
	whitener: np.ndarray
	cholesky: np.ndarray

	def apply(self, x: DataMatrix) -> DataMatrix:
		if x.d != self.mean.shape[0]:
			raise ShapeError(f"Standardization fitted on d={self.mean.shape[0]}, got d={x.d}")
		centered = x.values - self.mean
		return DataMatrix(solve_triangular(self.cholesky, centered.T, lower=True).T, x.labels)

	def restore(self, points: np.ndarray) -> np.ndarray:
		"""Lleva puntos del espacio estandarizado a las coordenadas originales."""

		return self.mean + np.asarray(points, dtype=float) @ self.cholesky.T


def as_points(points, d: int | None = None) -> np.ndarray:
	"""Convierte a una matriz (k, d) admitiendo k = 0; usado por las grillas de evaluación."""

	if isinstance(points, DataMatrix):
		array = points.values
	else:
		array = np.asarray(points, dtype=float)
		if array.ndim == 1:
			array = array.reshape(1, -1) if d is None or array.size == d else array.reshape(-1, d)
	if array.ndim != 2:
		raise ShapeError(f"Expected points of shape (k, d), got {array.shape}")
	if d is not None and array.shape[0] and array.shape[1] != d:
		raise ShapeError(f"Points have dimension {array.shape[1]}, expected {d}")
	if array.shape[0] == 0 and d is not None:
		array = array.reshape(0, d)
	return array


def column_mean(x: DataMatrix) -> np.ndarray:
	return x.values.mean(axis=0)


def sample_covariance(x: DataMatrix) -> np.ndarray:
	if x.n < 2:
		raise InsufficientDataError(f"Sample covariance needs at least 2 rows, got {x.n}")
	centered = x.values - column_mean(x)
	covariance = centered.T @ centered / (x.n - 1)
	upper = np.triu(covariance)
	return upper + np.triu(covariance, 1).T


def standardize(x: DataMatrix) -> tuple[DataMatrix, StandardizationParams]:
	mean = column_mean(x)
	covariance = sample_covariance(x)
	try:
		cholesky = np.linalg.cholesky(covariance)
	except np.linalg.LinAlgError as exc:
		raise NonInvertibleScatterError(float(np.linalg.eigvalsh(covariance).min())) from exc
	# pivotes casi nulos: rango deficiente que Cholesky dejó pasar por redondeo
	if np.min(np.diag(cholesky)) ** 2 <= SINGULAR_RELATIVE_TOLERANCE * np.max(np.diag(covariance)):
		raise NonInvertibleScatterError(float(np.linalg.eigvalsh(covariance).min()))
	whitener = solve_triangular(cholesky, np.eye(x.d), lower=True)
	params = StandardizationParams(
		mean=_readonly(mean),
		covariance=_readonly(covariance),
		whitener=_readonly(whitener),
		cholesky=_readonly(cholesky),
	)
	return params.apply(x), params
