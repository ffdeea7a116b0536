"""Celdas Monte Carlo de tamaño y potencia, curvas de potencia local y estudios ROC."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from core.conf import get_default
from core.distributions import contiguous_mixture, standard_normal
from core.exceptions import ParameterError
from core.nullspec import parse_distribution
from core.parallel import ordered_map
from core.rng import Rng, Stream
from depth.halfspace import DepthMethod
from inference.bootstrap import GofSpec, TwoSampleSpec, prepare_gof_frame, run_gof, run_twosample
from inference.choices import EvalGrid, Statistic

from .scenarios import GOF_MODELS, Model, model_distribution, second_sample_size

logger = logging.getLogger(__name__)

DEFAULT_ROC_ALPHAS = tuple(round(0.01 * step, 2) for step in range(1, 21))


@dataclass(frozen=True)
class ExperimentSpec:
	model: str
	d: int
	n: int
	m: int | None = None
	lam: float | None = None
	mu: float = 0.0
	gamma: float = 0.0
	f0: str = "standard-normal"
	h: str = "laplace"
	two_sample: bool = False
	statistics: tuple[str, ...] = (Statistic.KS, Statistic.CVM)
	alpha: float = field(default_factory=lambda: get_default("ALPHA"))
	reps: int = field(default_factory=lambda: get_default("REPS"))
	B: int = field(default_factory=lambda: get_default("BOOTSTRAP"))
	M: int = field(default_factory=lambda: get_default("EVAL_POINTS"))
	n_ref: int | None = None
	method: DepthMethod = field(default_factory=DepthMethod)
	eval_grid: str = field(default_factory=lambda: get_default("EVAL_GRID"))
	seed: int | None = None

	def __post_init__(self):
		if self.model not in Model.values:
			raise ParameterError(f"Unknown model '{self.model}'")
		object.__setattr__(self, "model", Model(self.model))
		if self.d < 1 or self.n < 1:
			raise ParameterError(f"Dimension and sample size must be positive, got d={self.d}, n={self.n}")
		if not 0 < self.alpha < 1:
			raise ParameterError(f"Level must lie in (0, 1), got {self.alpha}")
		if self.reps < 1:
			raise ParameterError(f"Monte Carlo repeats must be at least 1, got {self.reps}")
		if self.gamma < 0:
			raise ParameterError(f"Gamma must be nonnegative, got {self.gamma}")
		if self.model == Model.B:
			object.__setattr__(self, "two_sample", True)
		elif self.model != Model.CONTIGUOUS:
			object.__setattr__(self, "two_sample", False)
		if self.two_sample and self.m is None:
			if self.lam is None:
				raise ParameterError("Two-sample cells need either m or lam")
			object.__setattr__(self, "m", second_sample_size(self.n, self.lam))
		if self.two_sample and self.m < 1:
			raise ParameterError(f"Second sample size must be at least 1, got {self.m}")
		if not self.two_sample:
			object.__setattr__(self, "m", None)
		statistics = tuple(dict.fromkeys(Statistic(value) for value in self.statistics))
		if not statistics:
			raise ParameterError("At least one statistic must be requested")
		object.__setattr__(self, "statistics", statistics)
		object.__setattr__(self, "method", DepthMethod.parse(self.method))
		object.__setattr__(self, "eval_grid", EvalGrid(self.eval_grid))
		if self.seed is None:
			object.__setattr__(self, "seed", Rng.entropy().seed)

	@property
	def n_total(self) -> int:
		return self.n + (self.m or 0)

	def key(self) -> tuple:
		return (str(self.model), self.d, self.n, self.m or 0, self.mu, self.gamma, self.f0, self.h)

	def echo(self) -> dict:
		return {
			"model": str(self.model),
			"d": self.d,
			"n": self.n,
			"m": self.m,
			"lam": self.lam,
			"mu": self.mu,
			"gamma": self.gamma,
			"f0": self.f0,
			"h": self.h,
			"two_sample": self.two_sample,
			"statistics": [str(value) for value in self.statistics],
			"alpha": self.alpha,
			"reps": self.reps,
			"B": self.B,
			"M": self.M,
			"n_ref": self.n_ref,
			"method": str(self.method),
			"eval_grid": str(self.eval_grid),
			"seed": self.seed,
		}


@dataclass(frozen=True)
class PowerEstimate:
	statistic: str
	rejection_rate: float
	mc_std_error: float
	reps: int
	rejections: int
	spec: dict

	@classmethod
	def from_rejections(cls, statistic: str, rejections: int, reps: int, spec: dict) -> PowerEstimate:
		rate = rejections / reps
		return cls(str(statistic), rate, math.sqrt(rate * (1 - rate) / reps), reps, rejections, spec)

	def to_payload(self) -> dict:
		return {
			"kind": "power-estimate",
			"statistic": self.statistic,
			"rejection_rate": self.rejection_rate,
			"mc_std_error": self.mc_std_error,
			"reps": self.reps,
			"rejections": self.rejections,
			"spec": self.spec,
		}

	@classmethod
	def from_payload(cls, payload: dict) -> PowerEstimate:
		return cls(
			statistic=payload["statistic"],
			rejection_rate=payload["rejection_rate"],
			mc_std_error=payload["mc_std_error"],
			reps=payload["reps"],
			rejections=payload["rejections"],
			spec=payload["spec"],
		)


@dataclass(frozen=True)
class CellOutcome:
	spec: ExperimentSpec
	p_values: dict
	estimates: tuple[PowerEstimate, ...]


def _null_and_data(spec: ExperimentSpec):
	"""(F0, distribución de los datos) para una celda de bondad de ajuste."""

	if spec.model in GOF_MODELS:
		return standard_normal(spec.d), model_distribution(spec.model, spec.d)
	f0 = parse_distribution(spec.f0, spec.d)
	h = parse_distribution(spec.h, spec.d)
	return f0, contiguous_mixture(f0, h, spec.gamma, spec.n)


def _twosample_pair(spec: ExperimentSpec):
	if spec.model == Model.B:
		return standard_normal(spec.d), model_distribution(Model.B, spec.d, spec.mu)
	f = parse_distribution(spec.f0, spec.d)
	h = parse_distribution(spec.h, spec.d)
	return f, contiguous_mixture(f, h, spec.gamma, spec.n_total)


def _outcome(spec: ExperimentSpec, p_values: dict) -> CellOutcome:
	echo = spec.echo()
	estimates = tuple(
		PowerEstimate.from_rejections(
			statistic,
			int(np.count_nonzero(np.asarray(p_values[statistic]) <= spec.alpha)),
			spec.reps,
			echo,
		)
		for statistic in spec.statistics
	)
	return CellOutcome(spec, {str(key): tuple(values) for key, values in p_values.items()}, estimates)


def _collect(repeats: list[dict], statistics) -> dict:
	p_values = {statistic: [] for statistic in statistics}
	for results in repeats:
		for statistic, result in results.items():
			p_values[statistic].append(result.p_value)
	return p_values


def run_gof_outcome(spec: ExperimentSpec, threads: int | None = None) -> CellOutcome:
	if spec.two_sample:
		raise ParameterError(f"Model '{spec.model}' is a two-sample cell")
	f0, data_distribution = _null_and_data(spec)
	test_spec = GofSpec(
		f0=f0,
		statistic=spec.statistics[0],
		M=spec.M,
		B=spec.B,
		n_ref=spec.n_ref,
		method=spec.method,
		seed=spec.seed,
		eval_grid=spec.eval_grid,
	)
	root = Rng(spec.seed)
	started = time.perf_counter()
	frame = prepare_gof_frame(test_spec, spec.d, spec.n, root, threads)

	def one_repeat(r: int) -> dict:
		repeat = root.spawn(Stream.REPEAT, r)
		x = data_distribution.sample(spec.n, repeat.spawn(Stream.DATA))
		return run_gof(x, test_spec, statistics=spec.statistics, rng=repeat, frame=frame, threads=1)

	p_values = _collect(ordered_map(one_repeat, range(spec.reps), threads), spec.statistics)
	logger.info("Cell %s d=%d n=%d finished in %.1fs", spec.model, spec.d, spec.n, time.perf_counter() - started)
	return _outcome(spec, p_values)


def run_twosample_outcome(spec: ExperimentSpec, threads: int | None = None) -> CellOutcome:
	if not spec.two_sample:
		raise ParameterError(f"Model '{spec.model}' is not a two-sample cell")
	first, second = _twosample_pair(spec)
	test_spec = TwoSampleSpec(
		statistic=spec.statistics[0],
		M=spec.M,
		B=spec.B,
		method=spec.method,
		seed=spec.seed,
		eval_grid=spec.eval_grid,
	)
	root = Rng(spec.seed)
	started = time.perf_counter()

	def one_repeat(r: int) -> dict:
		repeat = root.spawn(Stream.REPEAT, r)
		x = first.sample(spec.n, repeat.spawn(Stream.DATA))
		y = second.sample(spec.m, repeat.spawn(Stream.SECOND_SAMPLE))
		return run_twosample(x, y, test_spec, statistics=spec.statistics, rng=repeat, threads=1)

	p_values = _collect(ordered_map(one_repeat, range(spec.reps), threads), spec.statistics)
	logger.info(
		"Cell %s d=%d n=%d m=%d finished in %.1fs", spec.model, spec.d, spec.n, spec.m, time.perf_counter() - started
	)
	return _outcome(spec, p_values)


def run_cell(spec: ExperimentSpec, threads: int | None = None) -> CellOutcome:
	if spec.two_sample:
		return run_twosample_outcome(spec, threads)
	return run_gof_outcome(spec, threads)


def run_gof_cell(spec: ExperimentSpec, threads: int | None = None) -> list[PowerEstimate]:
	return list(run_gof_outcome(spec, threads).estimates)


def run_twosample_cell(spec: ExperimentSpec, threads: int | None = None) -> list[PowerEstimate]:
	return list(run_twosample_outcome(spec, threads).estimates)


def run_local_power_curve(
	gammas: Sequence[float],
	f0: str = "standard-normal",
	h: str = "laplace",
	n: int = 100,
	m: int | None = None,
	*,
	d: int = 2,
	threads: int | None = None,
	**options,
) -> list[tuple[float, tuple[PowerEstimate, ...]]]:
	"""Potencia frente a gamma con la misma escalera de semillas en cada punto."""

	two_sample = m is not None
	n_total = n + (m or 0)
	null = parse_distribution(f0, d)
	alternative = parse_distribution(h, d)
	for gamma in gammas:
		contiguous_mixture(null, alternative, gamma, n_total)
	base = ExperimentSpec(model=Model.CONTIGUOUS, d=d, n=n, m=m, f0=f0, h=h, two_sample=two_sample, **options)
	curve = []
	for gamma in gammas:
		outcome = run_cell(replace(base, gamma=float(gamma)), threads)
		curve.append((float(gamma), outcome.estimates))
	return curve


@dataclass(frozen=True)
class RocPoint:
	alpha: float
	size: float
	power: float


def roc_curve(null_pvalues: Iterable[float], alt_pvalues: Iterable[float], alphas: Sequence[float] = DEFAULT_ROC_ALPHAS) -> list[RocPoint]:
	null = np.asarray(list(null_pvalues), dtype=float)
	alternative = np.asarray(list(alt_pvalues), dtype=float)
	if null.size == 0 or alternative.size == 0:
		raise ParameterError("ROC curves need p-values under both hypotheses")
	return [
		RocPoint(float(alpha), float(np.mean(null <= alpha)), float(np.mean(alternative <= alpha)))
		for alpha in sorted(alphas)
	]


def null_counterpart(spec: ExperimentSpec) -> ExperimentSpec:
	"""La celda bajo H0 que acompaña a una alternativa: A.1, B con mu=0 o gamma=0."""

	if spec.model in GOF_MODELS:
		return replace(spec, model=Model.A1)
	if spec.model == Model.B:
		return replace(spec, mu=0.0)
	return replace(spec, gamma=0.0)


def run_roc_study(
	null_spec: ExperimentSpec,
	alt_spec: ExperimentSpec,
	alphas: Sequence[float] = DEFAULT_ROC_ALPHAS,
	threads: int | None = None,
) -> dict[str, list[RocPoint]]:
	if null_spec.two_sample != alt_spec.two_sample:
		raise ParameterError("ROC study needs two cells of the same kind")
	null = run_cell(null_spec, threads)
	alternative = run_cell(alt_spec, threads)
	shared = [str(value) for value in null_spec.statistics if value in alt_spec.statistics]
	return {statistic: roc_curve(null.p_values[statistic], alternative.p_values[statistic], alphas) for statistic in shared}
