"""Estadísticos KS y CvM basados en profundidad (una y dos muestras)."""

from __future__ import annotations

import math

import numpy as np

from core.exceptions import ShapeError
from core.matrix import DataMatrix, DirectionSet, as_points
from core.rng import Rng
from depth.halfspace import DepthEngine


def grid_points(grid, d: int) -> np.ndarray:
	if isinstance(grid, DirectionSet):
		points = grid.directions
	else:
		points = as_points(grid, d)
	if points.shape[0] == 0:
		raise ShapeError("Evaluation grid is empty (M must be at least 1)")
	if points.shape[1] != d:
		raise ShapeError(f"Evaluation grid has dimension {points.shape[1]}, data has d={d}")
	return points


def ks_from_depths(scale_size: int, depth_a: np.ndarray, depth_b: np.ndarray) -> float:
	return math.sqrt(scale_size) * float(np.max(np.abs(depth_a - depth_b)))


def sum_of_squares(depth_a: np.ndarray, depth_b: np.ndarray) -> float:
	return math.fsum(((depth_a - depth_b) ** 2).tolist())


def _check_same_dimension(x: DataMatrix, other: DataMatrix, name: str) -> None:
	if x.d != other.d:
		raise ShapeError(f"Sample '{name}' has dimension {other.d}, expected {x.d}")


def gof_statistic_ks(x: DataMatrix, f0, u1, ref_sample: DataMatrix, method="auto", rng: Rng | None = None) -> float:
	_check_same_dimension(x, ref_sample, "ref_sample")
	if f0 is not None and f0.dim != x.d:
		raise ShapeError(f"Null distribution has dimension {f0.dim}, data has d={x.d}")
	points = grid_points(u1, x.d)
	engine = DepthEngine.build(method, x.d, rng)
	return ks_from_depths(x.n, engine.values(x, points), engine.values(ref_sample, points))


def gof_statistic_cvm(x: DataMatrix, f0, u2, ref_sample: DataMatrix, method="auto", rng: Rng | None = None) -> float:
	_check_same_dimension(x, ref_sample, "ref_sample")
	if f0 is not None and f0.dim != x.d:
		raise ShapeError(f"Null distribution has dimension {f0.dim}, data has d={x.d}")
	points = grid_points(u2, x.d)
	engine = DepthEngine.build(method, x.d, rng)
	squares = sum_of_squares(engine.values(x, points), engine.values(ref_sample, points))
	return x.n * squares / points.shape[0]


def ts_statistic_ks(x: DataMatrix, y: DataMatrix, u1, method="auto", rng: Rng | None = None) -> float:
	_check_same_dimension(x, y, "y")
	points = grid_points(u1, x.d)
	engine = DepthEngine.build(method, x.d, rng)
	return ks_from_depths(x.n + y.n, engine.values(x, points), engine.values(y, points))


def ts_statistic_cvm(x: DataMatrix, y: DataMatrix, method="auto", rng: Rng | None = None) -> float:
	_check_same_dimension(x, y, "y")
	engine = DepthEngine.build(method, x.d, rng)
	pooled = np.vstack([x.values, y.values])
	return sum_of_squares(engine.values(x, pooled), engine.values(y, pooled))
