"""Conjuntos de datos de los ejemplos ilustrados del gráfico DDD."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from core.distributions import Cauchy, Normal, ReferenceDistribution, SkewNormal, standard_normal
from core.exceptions import ParameterError
from core.matrix import DataMatrix, standardize
from core.rng import Rng, Stream
from discrepancy.records import DddRecord, ddd_gof, ddd_twosample

from .scenarios import Model, model_distribution

logger = logging.getLogger(__name__)

GOF_SAMPLE_SIZE = 100
TWOSAMPLE_SIZES = (100, 50)
HIGHDIM_SAMPLE_SIZE = 10
HIGHDIM_RANGE = (15, 60)
SKEW_LAMBDA = 0.9
CORRELATED_SCATTER = np.array(
	[
		[1.0, 0.9, 0.2],
		[0.9, 1.0, 0.5],
		[0.2, 0.5, 1.0],
	]
)

GOF_SOURCES = {
	"gof-normal": Model.A1,
	"gof-t3": Model.A4,
	"gof-cauchy": Model.A5,
	"gof-laplace": Model.A6,
}
TWOSAMPLE_NAMES = ("twosample-correlated", "twosample-skew", "highdim-cauchy")
ILLUSTRATIONS = tuple(GOF_SOURCES) + TWOSAMPLE_NAMES


@dataclass(frozen=True, eq=False)
class Illustration:
	name: str
	x: DataMatrix
	y: DataMatrix | None = None
	f0: ReferenceDistribution | None = None
	method: str = "auto"

	@property
	def two_sample(self) -> bool:
		return self.y is not None


def _pair(first: ReferenceDistribution, second: ReferenceDistribution, sizes, rng: Rng) -> tuple[DataMatrix, DataMatrix]:
	n, m = sizes
	return first.sample(n, rng.spawn(Stream.DATA)), second.sample(m, rng.spawn(Stream.SECOND_SAMPLE))


def build_illustration(name: str, rng: Rng, d: int | None = None) -> Illustration:
	if name in GOF_SOURCES:
		dimension = d or 2
		raw = model_distribution(GOF_SOURCES[name], dimension).sample(GOF_SAMPLE_SIZE, rng.spawn(Stream.DATA))
		standardized, _ = standardize(raw)
		return Illustration(name, standardized, f0=standard_normal(dimension))
	if name == "twosample-correlated":
		x, y = _pair(Normal(np.zeros(3), CORRELATED_SCATTER), standard_normal(3), TWOSAMPLE_SIZES, rng)
		return Illustration(name, x, y)
	if name == "twosample-skew":
		x, y = _pair(standard_normal(3), SkewNormal([SKEW_LAMBDA] * 3, np.eye(3)), TWOSAMPLE_SIZES, rng)
		return Illustration(name, x, y)
	if name == "highdim-cauchy":
		dimension = d or HIGHDIM_RANGE[0]
		low, high = HIGHDIM_RANGE
		if not low <= dimension <= high:
			raise ParameterError(f"High-dimensional display needs {low} <= d <= {high}, got d={dimension}")
		sizes = (HIGHDIM_SAMPLE_SIZE, HIGHDIM_SAMPLE_SIZE)
		x, y = _pair(standard_normal(dimension), Cauchy(np.zeros(dimension), np.eye(dimension)), sizes, rng)
		return Illustration(name, x, y, method="approx")
	raise ParameterError(f"Unknown illustration '{name}'; choose one of {', '.join(ILLUSTRATIONS)}")


def run_illustration(
	name: str,
	rng: Rng,
	d: int | None = None,
	*,
	method=None,
	band: str = "two-sigma",
	threads: int | None = None,
) -> list[DddRecord]:
	illustration = build_illustration(name, rng, d)
	method = method or illustration.method
	logger.info("Illustration %s with n=%d, d=%d", name, illustration.x.n, illustration.x.d)
	if illustration.two_sample:
		return ddd_twosample(illustration.x, illustration.y, method, rng, band=band, threads=threads)
	return ddd_gof(illustration.x, illustration.f0, method=method, rng=rng, band=band, threads=threads)
