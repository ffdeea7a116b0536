from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from core.conf import default_reference_size
from core.distributions import Empirical, ReferenceDistribution
from core.exceptions import InsufficientDataError, ParameterError, ShapeError
from core.matrix import DataMatrix, as_points
from core.rng import Rng, Stream
from depth.halfspace import DepthEngine

logger = logging.getLogger(__name__)

BAND_KINDS = ("two-sigma", "bootstrap")


@dataclass(frozen=True)
class DddRecord:
	"""Un punto de evaluación del gráfico DDD."""

	index: int
	point: tuple[float, ...]
	depth_a: float
	depth_b: float
	band_halfwidth: float
	ddd: float = field(init=False)
	outside: bool = field(init=False)

	def __post_init__(self):
		if self.band_halfwidth < 0:
			raise ParameterError(f"Band halfwidth must be nonnegative, got {self.band_halfwidth}")
		object.__setattr__(self, "point", tuple(float(value) for value in self.point))
		difference = self.depth_a - self.depth_b
		object.__setattr__(self, "ddd", difference)
		object.__setattr__(self, "outside", bool(abs(difference) > self.band_halfwidth))


def two_sigma_band(depth_ref: float, n: int, m: int | None = None) -> float:
	if n < 1 or (m is not None and m < 1):
		raise ParameterError(f"Band sample sizes must be positive, got n={n}, m={m}")
	spread = min(max(depth_ref, 0.0), 1.0)
	variance = spread * (1.0 - spread)
	scale = 1.0 / n if m is None else 1.0 / n + 1.0 / m
	return 2.0 * math.sqrt(variance * scale)


def _two_sigma_array(depths: np.ndarray, n: int, m: int | None = None) -> np.ndarray:
	return np.array([two_sigma_band(float(value), n, m) for value in depths])


def reference_sample(f0: ReferenceDistribution, n_ref: int, rng: Rng) -> DataMatrix:
	"""Muestra grande de F0; una F0 empírica se usa tal cual, sin remuestrear."""

	if isinstance(f0, Empirical):
		return f0.data
	if n_ref < 1:
		raise ParameterError(f"Reference sample size must be at least 1, got {n_ref}")
	return f0.sample(n_ref, rng.spawn(Stream.REFERENCE))


def _as_sample(x, name: str) -> DataMatrix:
	if isinstance(x, DataMatrix):
		return x
	points = as_points(x)
	if points.shape[0] == 0:
		raise InsufficientDataError(f"Sample '{name}' is empty")
	return DataMatrix(points)


def bootstrap_band(
	x: DataMatrix,
	engine: DepthEngine,
	points: np.ndarray,
	baseline,
	rng: Rng,
	resamples: int,
	y: DataMatrix | None = None,
	threads: int | None = None,
) -> np.ndarray:
	"""Semiancho 2·sd puntual de la DDD bajo remuestreo de x (y de y si se da)."""

	if resamples < 2:
		raise ParameterError(f"Bootstrap band needs at least 2 resamples, got {resamples}")
	draws = np.empty((resamples, points.shape[0]))
	for b in range(resamples):
		gen = rng.spawn(Stream.BAND, b).generator()
		x_star = x.values[gen.integers(0, x.n, size=x.n)]
		if y is None:
			draws[b] = engine.values(x_star, points, threads) - baseline
		else:
			y_star = y.values[gen.integers(0, y.n, size=y.n)]
			draws[b] = engine.values(x_star, points, threads) - engine.values(y_star, points, threads)
	return 2.0 * draws.std(axis=0, ddof=1)


def ddd_gof(
	x,
	f0: ReferenceDistribution,
	n_ref: int | None = None,
	method="auto",
	rng: Rng | None = None,
	*,
	band: str = "two-sigma",
	band_resamples: int = 200,
	threads: int | None = None,
) -> list[DddRecord]:
	x = _as_sample(x, "x")
	if f0.dim != x.d:
		raise ShapeError(f"Null distribution has dimension {f0.dim}, data has d={x.d}")
	if band not in BAND_KINDS:
		raise ParameterError(f"Unknown band kind '{band}'")
	rng = rng or Rng.entropy()
	n_ref = default_reference_size(x.n) if n_ref is None else n_ref
	reference = reference_sample(f0, n_ref, rng)
	engine = DepthEngine.build(method, x.d, rng)
	depth_a = engine.values(x, x.values, threads)
	depth_b = engine.values(reference, x.values, threads)
	if band == "bootstrap":
		halfwidths = bootstrap_band(x, engine, x.values, depth_b, rng, band_resamples, threads=threads)
	else:
		halfwidths = _two_sigma_array(depth_b, x.n)
	logger.info("DDD goodness-of-fit records for n=%d, n_ref=%d, method=%s", x.n, reference.n, engine.method)
	return [
		DddRecord(index, tuple(x.values[index]), float(depth_a[index]), float(depth_b[index]), float(halfwidths[index]))
		for index in range(x.n)
	]


def ddd_twosample(
	x,
	y,
	method="auto",
	rng: Rng | None = None,
	*,
	band: str = "two-sigma",
	band_resamples: int = 200,
	threads: int | None = None,
) -> list[DddRecord]:
	x = _as_sample(x, "x")
	y = _as_sample(y, "y")
	if x.d != y.d:
		raise ShapeError(f"Samples disagree on dimension: d={x.d} and d={y.d}")
	if band not in BAND_KINDS:
		raise ParameterError(f"Unknown band kind '{band}'")
	rng = rng or Rng.entropy()
	engine = DepthEngine.build(method, x.d, rng)
	pooled = np.vstack([x.values, y.values])
	depth_a = engine.values(x, pooled, threads)
	depth_b = engine.values(y, pooled, threads)
	if band == "bootstrap":
		halfwidths = bootstrap_band(x, engine, pooled, None, rng, band_resamples, y=y, threads=threads)
	else:
		halfwidths = _two_sigma_array((depth_a + depth_b) / 2, x.n, y.n)
	logger.info("DDD two-sample records for n=%d, m=%d, method=%s", x.n, y.n, engine.method)
	return [
		DddRecord(index, tuple(pooled[index]), float(depth_a[index]), float(depth_b[index]), float(halfwidths[index]))
		for index in range(pooled.shape[0])
	]
