"""Motores de profundidad de Tukey (semiespacio cerrado).

Todos los motores cuentan puntos en semiespacios cerrados; las filas iguales al
punto de consulta cuentan en todos ellos.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from core.conf import get_default
from core.distributions import sample_unit_sphere
from core.exceptions import ParameterError, ShapeError, UnsupportedDimensionError
from core.matrix import DataMatrix, DirectionSet, as_points
from core.parallel import ordered_map
from core.rng import Rng, Stream

logger = logging.getLogger(__name__)

DepthValue = float

CHUNK_ELEMENTS = 2_000_000
PROJECTION_TOLERANCE = 1e-12
METHOD_KINDS = ("auto", "exact", "approx")


def _count_below(sorted_rows: np.ndarray, thresholds: np.ndarray) -> np.ndarray:
	"""Por fila, cuántos elementos de sorted_rows son estrictamente menores que cada umbral."""

	width = thresholds.shape[1]
	combined = np.concatenate([thresholds, sorted_rows], axis=1)
	# orden estable: un umbral precede a los datos iguales
	order = np.argsort(combined, axis=1, kind="stable")
	is_data = order >= width
	data_before = np.cumsum(is_data, axis=1) - is_data
	positions = np.empty_like(order)
	np.put_along_axis(positions, order, np.broadcast_to(np.arange(combined.shape[1]), order.shape), axis=1)
	return np.take_along_axis(data_before, positions[:, :width], axis=1)


def _chunks(total: int, per_item: int) -> list[slice]:
	size = max(1, CHUNK_ELEMENTS // max(per_item, 1))
	return [slice(start, min(start + size, total)) for start in range(0, total, size)]


def _canonical(vectors: np.ndarray) -> np.ndarray:
	"""Escala cada vector por su mayor |coordenada|: vectores colineales quedan idénticos."""

	scale = np.max(np.abs(vectors), axis=-1, keepdims=True)
	scale = np.where(scale == 0, 1.0, scale)
	return vectors / scale + 0.0


# -- d = 1 --------------------------------------------------------------------

def _univariate_counts(values: np.ndarray, queries: np.ndarray) -> np.ndarray:
	ordered = np.sort(values)
	at_or_below = np.searchsorted(ordered, queries, side="right")
	at_or_above = ordered.size - np.searchsorted(ordered, queries, side="left")
	return np.minimum(at_or_below, at_or_above)


def depth_univariate(sample: DataMatrix, x: float) -> DepthValue:
	if sample.d != 1:
		raise ShapeError(f"Univariate depth needs d=1, got d={sample.d}")
	count = _univariate_counts(sample.values[:, 0], np.asarray([float(np.ravel(x)[0])]))[0]
	return int(count) / sample.n


# -- d = 2, enumeración O(n^2) -------------------------------------------------

def _enumeration_count(points: np.ndarray, x: np.ndarray) -> int:
	offsets = points - x
	nonzero = np.any(offsets != 0, axis=1)
	ties = int(points.shape[0] - nonzero.sum())
	vectors = offsets[nonzero]
	if vectors.shape[0] == 0:
		return ties
	normals = np.vstack(
		[
			np.column_stack([-vectors[:, 1], vectors[:, 0]]),
			np.column_stack([vectors[:, 1], -vectors[:, 0]]),
		]
	)
	canonical = _canonical(normals)
	angles = np.unique(np.arctan2(canonical[:, 1], canonical[:, 0]))
	following = np.append(angles[1:], angles[0] + 2 * math.pi)
	middles = (angles + following) / 2
	candidates = np.vstack([normals, np.column_stack([np.cos(middles), np.sin(middles)])])
	# productos elemento a elemento: sin FMA, u·v es exactamente 0 sobre la propia normal
	dots = candidates[:, 0, None] * vectors[None, :, 0] + candidates[:, 1, None] * vectors[None, :, 1]
	return ties + int((dots <= 0).sum(axis=1).min())


def candidate_directions_2d(sample: DataMatrix, x) -> DirectionSet:
	"""Direcciones candidatas de la enumeración exacta (normales y puntos medios)."""

	x = as_points(x, 2)[0]
	vectors = sample.values - x
	vectors = vectors[np.any(vectors != 0, axis=1)]
	if vectors.shape[0] == 0:
		return DirectionSet(np.array([[1.0, 0.0]]))
	normals = np.vstack(
		[
			np.column_stack([-vectors[:, 1], vectors[:, 0]]),
			np.column_stack([vectors[:, 1], -vectors[:, 0]]),
		]
	)
	canonical = _canonical(normals)
	angles = np.unique(np.arctan2(canonical[:, 1], canonical[:, 0]))
	following = np.append(angles[1:], angles[0] + 2 * math.pi)
	middles = (angles + following) / 2
	return DirectionSet.normalized(
		np.vstack([normals, np.column_stack([np.cos(middles), np.sin(middles)])])
	)


def depth_exact_2d(sample: DataMatrix, x) -> DepthValue:
	if sample.d != 2:
		raise ShapeError(f"Planar depth needs d=2, got d={sample.d}")
	return _enumeration_count(sample.values, as_points(x, 2)[0]) / sample.n


# -- d = 2, barrido angular O(n log n) -----------------------------------------

def _sweep_counts(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
	n = points.shape[0]
	offsets = points[None, :, :] - queries[:, None, :]
	zero = np.all(offsets == 0, axis=2)
	canonical = _canonical(offsets)
	theta = np.arctan2(canonical[..., 1], canonical[..., 0])
	opposite = -canonical + 0.0
	theta_opposite = np.arctan2(opposite[..., 1], opposite[..., 0])
	theta = np.where(zero, np.inf, theta)
	theta_opposite = np.where(zero, np.inf, theta_opposite)

	ordered = np.sort(theta, axis=1)
	below = _count_below(ordered, np.concatenate([theta, theta_opposite], axis=1))
	start, stop = below[:, :n], below[:, n:]
	nonzero = (~zero).sum(axis=1, keepdims=True)
	# semicírculo semiabierto [θj, θj + π) en orden circular
	open_counts = np.where(theta_opposite > theta, stop - start, nonzero - start + stop)
	open_counts = np.where(zero, 0, open_counts)
	return n - open_counts.max(axis=1)


def sweep_counts(points: np.ndarray, queries: np.ndarray) -> np.ndarray:
	counts = np.empty(queries.shape[0], dtype=np.int64)
	for part in _chunks(queries.shape[0], 3 * points.shape[0]):
		counts[part] = _sweep_counts(points, queries[part])
	return counts


def depth_sweep_2d(sample: DataMatrix, x) -> DepthValue:
	if sample.d != 2:
		raise ShapeError(f"Planar depth needs d=2, got d={sample.d}")
	return int(sweep_counts(sample.values, as_points(x, 2))[0]) / sample.n


# -- cualquier d, direcciones aleatorias ---------------------------------------

def _project(block: np.ndarray, rows: np.ndarray) -> np.ndarray:
	"""block @ rows.T con sumas en orden fijo: el resultado no depende de la forma de los bloques."""

	result = block[:, :1] * rows[:, 0]
	for axis in range(1, block.shape[1]):
		result += block[:, axis : axis + 1] * rows[:, axis]
	return result


def approx_counts(points: np.ndarray, queries: np.ndarray, dirs: DirectionSet) -> np.ndarray:
	if dirs.d != points.shape[1] or (queries.shape[0] and queries.shape[1] != dirs.d):
		raise ShapeError(f"Directions of dimension {dirs.d} do not match data of dimension {points.shape[1]}")
	counts = np.full(queries.shape[0], points.shape[0], dtype=np.int64)
	if queries.shape[0] == 0:
		return counts
	for part in _chunks(dirs.M, points.shape[0] + queries.shape[0]):
		block = dirs.directions[part]
		projected = np.sort(_project(block, points), axis=1)
		thresholds = _project(block, queries)
		slack = PROJECTION_TOLERANCE * (1.0 + np.abs(projected).max(axis=1, keepdims=True))
		counts = np.minimum(counts, _count_below(projected, thresholds + slack).min(axis=0))
	return counts


def depth_approx(sample: DataMatrix, x, dirs: DirectionSet) -> DepthValue:
	if dirs.d != sample.d:
		raise ShapeError(f"Directions of dimension {dirs.d} do not match data of dimension {sample.d}")
	return int(approx_counts(sample.values, as_points(x, sample.d), dirs)[0]) / sample.n


# -- despacho ------------------------------------------------------------------

@dataclass(frozen=True)
class DepthMethod:
	kind: str = "auto"
	directions: int | None = None

	def __post_init__(self):
		if self.kind not in METHOD_KINDS:
			raise ParameterError(f"Unknown depth method '{self.kind}'")
		if self.directions is not None and self.directions < 1:
			raise ParameterError(f"Direction count must be positive, got {self.directions}")

	@classmethod
	def parse(cls, text: str | DepthMethod | None, directions: int | None = None) -> DepthMethod:
		if isinstance(text, DepthMethod):
			return text
		label = (text or "auto").strip().lower()
		if ":" in label:
			label, _, raw = label.partition(":")
			try:
				directions = int(raw)
			except ValueError as exc:
				raise ParameterError(f"Could not parse direction count from '{text}'") from exc
		return cls(label, directions)

	@property
	def direction_count(self) -> int:
		return self.directions or get_default("DIRECTIONS")

	def __str__(self) -> str:
		return f"approx:{self.direction_count}" if self.kind == "approx" else self.kind


class DepthEngine:
	"""Motor resuelto para una dimensión; el DirectionSet se sortea una sola vez."""

	def __init__(self, method: DepthMethod, d: int, directions: DirectionSet | None = None):
		self.method = method
		self.d = d
		self.directions = directions
		if method.kind == "exact" and d > 2:
			raise UnsupportedDimensionError(f"Exact depth is only available for d <= 2, got d={d}")
		if d == 1 and method.kind != "approx":
			self.route = "univariate"
		elif d == 2 and method.kind != "approx":
			self.route = "sweep"
		else:
			self.route = "approx"
			if directions is None:
				raise ParameterError("The approximate engine needs a direction set")
			if directions.d != d:
				raise ShapeError(f"Directions of dimension {directions.d} do not match d={d}")

	@classmethod
	def build(cls, method, d: int, rng: Rng | None) -> DepthEngine:
		method = DepthMethod.parse(method)
		needs_directions = method.kind == "approx" or (method.kind == "auto" and d > 2)
		if not needs_directions:
			return cls(method, d)
		if method.kind == "exact":
			raise UnsupportedDimensionError(f"Exact depth is only available for d <= 2, got d={d}")
		if rng is None:
			raise ParameterError("Approximate depth needs an Rng to draw directions")
		directions = sample_unit_sphere(d, method.direction_count, rng.spawn(Stream.DIRECTIONS))
		return cls(method, d, directions)

	def counts(self, points: np.ndarray, queries: np.ndarray) -> np.ndarray:
		if self.route == "univariate":
			return _univariate_counts(points[:, 0], queries[:, 0]).astype(np.int64)
		if self.route == "sweep":
			return sweep_counts(points, queries)
		return approx_counts(points, queries, self.directions)

	def values(self, sample, queries, threads: int | None = None) -> np.ndarray:
		points = sample.values if isinstance(sample, DataMatrix) else np.asarray(sample, dtype=float)
		if points.shape[1] != self.d:
			raise ShapeError(f"Sample dimension {points.shape[1]} does not match engine dimension {self.d}")
		queries = as_points(queries, self.d)
		if queries.shape[0] == 0:
			return np.zeros(0)
		workers = max(1, threads or 1)
		size = math.ceil(queries.shape[0] / workers)
		parts = [slice(start, min(start + size, queries.shape[0])) for start in range(0, queries.shape[0], size)]
		pieces = ordered_map(lambda part: self.counts(points, queries[part]), parts, threads)
		return np.concatenate(pieces) / points.shape[0]


def depth(sample: DataMatrix, x, method="auto", rng: Rng | None = None) -> DepthValue:
	engine = DepthEngine.build(method, sample.d, rng)
	return float(engine.values(sample, as_points(x, sample.d))[0])


def depth_profile(sample: DataMatrix, eval_points, method="auto", rng: Rng | None = None, threads: int | None = None) -> np.ndarray:
	engine = DepthEngine.build(method, sample.d, rng)
	return engine.values(sample, eval_points, threads)
