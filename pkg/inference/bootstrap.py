"""Pruebas de bondad de ajuste y de dos muestras con p-valor bootstrap."""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from core.conf import default_reference_size, get_default
from core.distributions import ReferenceDistribution, sample_unit_sphere
from core.exceptions import BootstrapError, DepthToolkitError, ParameterError, ShapeError
from core.matrix import DataMatrix, standardize
from core.parallel import ordered_map
from core.rng import Rng, Stream
from depth.halfspace import DepthEngine, DepthMethod
from discrepancy.records import reference_sample

from .choices import EvalGrid, Statistic
from .statistics import ks_from_depths, sum_of_squares

logger = logging.getLogger(__name__)


def p_value(observed: float, replicates, corrected: bool = False) -> float:
	values = np.asarray(replicates, dtype=float)
	if values.size == 0:
		raise ParameterError("At least one bootstrap replicate is required")
	exceed = int(np.count_nonzero(values > observed))
	if corrected:
		return (1 + exceed) / (1 + values.size)
	return exceed / values.size


def _check_common(statistic, M: int, B: int, eval_grid) -> None:
	if statistic not in Statistic.values:
		raise ParameterError(f"Unknown statistic '{statistic}'")
	if eval_grid not in EvalGrid.values:
		raise ParameterError(f"Unknown evaluation grid '{eval_grid}'")
	if M < 1 or B < 1:
		raise ParameterError(f"M and B must be at least 1, got M={M}, B={B}")


@dataclass(frozen=True)
class GofSpec:
	f0: ReferenceDistribution
	statistic: str = Statistic.KS
	M: int = field(default_factory=lambda: get_default("EVAL_POINTS"))
	B: int = field(default_factory=lambda: get_default("BOOTSTRAP"))
	n_ref: int | None = None
	method: DepthMethod = field(default_factory=DepthMethod)
	seed: int | None = None
	eval_grid: str = field(default_factory=lambda: get_default("EVAL_GRID"))
	corrected: bool = False

	def __post_init__(self):
		_check_common(self.statistic, self.M, self.B, self.eval_grid)
		if self.n_ref is not None and self.n_ref < 1:
			raise ParameterError(f"Reference size must be at least 1, got {self.n_ref}")
		object.__setattr__(self, "statistic", Statistic(self.statistic))
		object.__setattr__(self, "eval_grid", EvalGrid(self.eval_grid))
		object.__setattr__(self, "method", DepthMethod.parse(self.method))
		if self.seed is None:
			object.__setattr__(self, "seed", Rng.entropy().seed)

	def echo(self) -> dict:
		return {
			"test": "goodness-of-fit",
			"f0": self.f0.describe(),
			"statistic": str(self.statistic.value),
			"M": self.M,
			"B": self.B,
			"n_ref": self.n_ref,
			"method": str(self.method),
			"seed": self.seed,
			"eval_grid": str(self.eval_grid.value),
			"corrected": self.corrected,
		}


@dataclass(frozen=True)
class TwoSampleSpec:
	statistic: str = Statistic.KS
	M: int = field(default_factory=lambda: get_default("EVAL_POINTS"))
	B: int = field(default_factory=lambda: get_default("BOOTSTRAP"))
	method: DepthMethod = field(default_factory=DepthMethod)
	seed: int | None = None
	eval_grid: str = field(default_factory=lambda: get_default("EVAL_GRID"))
	corrected: bool = False

	def __post_init__(self):
		_check_common(self.statistic, self.M, self.B, self.eval_grid)
		object.__setattr__(self, "statistic", Statistic(self.statistic))
		object.__setattr__(self, "eval_grid", EvalGrid(self.eval_grid))
		object.__setattr__(self, "method", DepthMethod.parse(self.method))
		if self.seed is None:
			object.__setattr__(self, "seed", Rng.entropy().seed)

	def echo(self) -> dict:
		return {
			"test": "two-sample",
			"statistic": str(self.statistic.value),
			"M": self.M,
			"B": self.B,
			"method": str(self.method),
			"seed": self.seed,
			"eval_grid": str(self.eval_grid.value),
			"corrected": self.corrected,
		}


@dataclass(frozen=True)
class TestResult:
	statistic: str
	statistic_value: float
	p_value: float
	replicates: tuple[float, ...]
	spec: dict
	provenance: dict

	def to_payload(self) -> dict:
		return {
			"kind": "test-result",
			"statistic": self.statistic,
			"statistic_value": self.statistic_value,
			"p_value": self.p_value,
			"replicates": list(self.replicates),
			"spec": self.spec,
			"provenance": self.provenance,
		}

	@classmethod
	def from_payload(cls, payload: dict) -> TestResult:
		return cls(
			statistic=payload["statistic"],
			statistic_value=payload["statistic_value"],
			p_value=payload["p_value"],
			replicates=tuple(payload["replicates"]),
			spec=payload["spec"],
			provenance=payload["provenance"],
		)


def _results(observed: dict, replicates: list[dict], statistics, echo: dict, rng: Rng, corrected: bool) -> dict:
	results = {}
	for statistic in statistics:
		values = tuple(float(draw[statistic]) for draw in replicates)
		results[statistic] = TestResult(
			statistic=str(statistic),
			statistic_value=float(observed[statistic]),
			p_value=p_value(observed[statistic], values, corrected),
			replicates=values,
			spec={**echo, "statistic": str(statistic)},
			provenance=rng.provenance(),
		)
	return results


def _statistics(requested, default) -> tuple[Statistic, ...]:
	chosen = tuple(Statistic(value) for value in (requested or (default,)))
	if not chosen:
		raise ParameterError("At least one statistic must be requested")
	return chosen


# -- bondad de ajuste ----------------------------------------------------------

@dataclass(frozen=True, eq=False)
class GofFrame:
	"""Entradas fijas de la prueba: grillas U1/U2, muestra de referencia y sus profundidades."""

	engine: DepthEngine
	reference: DataMatrix
	sphere: np.ndarray
	null_grid: np.ndarray
	reference_sphere: np.ndarray
	reference_null: np.ndarray
	eval_grid: str

	def ks_grid(self, observed: np.ndarray, threads: int | None = None) -> tuple[np.ndarray, np.ndarray]:
		if self.eval_grid == EvalGrid.SPHERE:
			return self.sphere, self.reference_sphere
		points = np.vstack([observed, self.null_grid])
		depths = np.concatenate([self.engine.values(self.reference, observed, threads), self.reference_null])
		return points, depths


def prepare_gof_frame(spec: GofSpec, d: int, n: int, rng: Rng, threads: int | None = None) -> GofFrame:
	if spec.f0.dim != d:
		raise ShapeError(f"Null distribution has dimension {spec.f0.dim}, data has d={d}")
	n_ref = spec.n_ref or default_reference_size(n)
	reference = reference_sample(spec.f0, n_ref, rng)
	engine = DepthEngine.build(spec.method, d, rng)
	sphere = sample_unit_sphere(d, spec.M, rng.spawn(Stream.SPHERE_GRID)).directions
	null_grid = spec.f0.sample(spec.M, rng.spawn(Stream.NULL_GRID)).values
	return GofFrame(
		engine=engine,
		reference=reference,
		sphere=sphere,
		null_grid=null_grid,
		reference_sphere=engine.values(reference, sphere, threads),
		reference_null=engine.values(reference, null_grid, threads),
		eval_grid=spec.eval_grid,
	)


def _gof_values(frame: GofFrame, sample: np.ndarray, ks_points, ks_reference, statistics) -> dict:
	n = sample.shape[0]
	values = {}
	if Statistic.KS in statistics:
		values[Statistic.KS] = ks_from_depths(n, frame.engine.values(sample, ks_points), ks_reference)
	if Statistic.CVM in statistics:
		squares = sum_of_squares(frame.engine.values(sample, frame.null_grid), frame.reference_null)
		values[Statistic.CVM] = n * squares / frame.null_grid.shape[0]
	return values


def run_gof(
	x: DataMatrix,
	spec: GofSpec,
	*,
	statistics=None,
	rng: Rng | None = None,
	frame: GofFrame | None = None,
	threads: int | None = None,
) -> dict[Statistic, TestResult]:
	statistics = _statistics(statistics, spec.statistic)
	rng = rng or Rng(spec.seed)
	started = time.perf_counter()
	frame = frame or prepare_gof_frame(spec, x.d, x.n, rng, threads)
	ks_points, ks_reference = frame.ks_grid(x.values, threads)
	observed = _gof_values(frame, x.values, ks_points, ks_reference, statistics)

	def replicate(b: int) -> dict:
		try:
			draw = spec.f0.sample(x.n, rng.spawn(Stream.BOOTSTRAP, b))
			return _gof_values(frame, draw.values, ks_points, ks_reference, statistics)
		except DepthToolkitError as exc:
			raise BootstrapError(b, exc) from exc

	replicates = ordered_map(replicate, range(spec.B), threads)
	logger.debug("Goodness-of-fit bootstrap (B=%d, n=%d) took %.2fs", spec.B, x.n, time.perf_counter() - started)
	return _results(observed, replicates, statistics, spec.echo(), rng, spec.corrected)


def gof_test(x: DataMatrix, spec: GofSpec, threads: int | None = None) -> TestResult:
	return run_gof(x, spec, threads=threads)[spec.statistic]


# -- dos muestras --------------------------------------------------------------

def twosample_grid(pooled: np.ndarray, spec: TwoSampleSpec, rng: Rng) -> np.ndarray:
	"""Grilla KS: la muestra combinada, o la esfera unidad en el marco estandarizado de ella."""

	if spec.eval_grid == EvalGrid.POOLED:
		return pooled
	sphere = sample_unit_sphere(pooled.shape[1], spec.M, rng.spawn(Stream.SPHERE_GRID)).directions
	try:
		_, params = standardize(DataMatrix(pooled))
	except DepthToolkitError as exc:
		logger.warning("Pooled sample cannot be standardized (%s); using the raw unit sphere", exc)
		return sphere
	return params.restore(sphere)


def _twosample_values(engine: DepthEngine, first: np.ndarray, second: np.ndarray, grid: np.ndarray, statistics) -> dict:
	values = {}
	if Statistic.KS in statistics:
		values[Statistic.KS] = ks_from_depths(
			first.shape[0] + second.shape[0], engine.values(first, grid), engine.values(second, grid)
		)
	if Statistic.CVM in statistics:
		pooled = np.vstack([first, second])
		values[Statistic.CVM] = sum_of_squares(engine.values(first, pooled), engine.values(second, pooled))
	return values


def run_twosample(
	x: DataMatrix,
	y: DataMatrix,
	spec: TwoSampleSpec,
	*,
	statistics=None,
	rng: Rng | None = None,
	threads: int | None = None,
) -> dict[Statistic, TestResult]:
	if x.d != y.d:
		raise ShapeError(f"Samples disagree on dimension: d={x.d} and d={y.d}")
	statistics = _statistics(statistics, spec.statistic)
	rng = rng or Rng(spec.seed)
	started = time.perf_counter()
	engine = DepthEngine.build(spec.method, x.d, rng)
	pooled = np.vstack([x.values, y.values])
	grid = twosample_grid(pooled, spec, rng)
	observed = _twosample_values(engine, x.values, y.values, grid, statistics)
	total = pooled.shape[0]

	def replicate(b: int) -> dict:
		try:
			rows = pooled[rng.spawn(Stream.BOOTSTRAP, b).generator().integers(0, total, size=total)]
			return _twosample_values(engine, rows[: x.n], rows[x.n :], grid, statistics)
		except DepthToolkitError as exc:
			raise BootstrapError(b, exc) from exc

	replicates = ordered_map(replicate, range(spec.B), threads)
	logger.debug("Two-sample bootstrap (B=%d, n=%d, m=%d) took %.2fs", spec.B, x.n, y.n, time.perf_counter() - started)
	return _results(observed, replicates, statistics, spec.echo(), rng, spec.corrected)


def twosample_test(x: DataMatrix, y: DataMatrix, spec: TwoSampleSpec, threads: int | None = None) -> TestResult:
	return run_twosample(x, y, spec, threads=threads)[spec.statistic]
