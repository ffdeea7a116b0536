"""Mini-lenguaje de distribuciones para `--null` y para F0/H de los experimentos.

	standard-normal | normal:<media-csv>:<cov-csv> | t:<nu> | cauchy | laplace
	skew-normal:<lambda-csv> | mixture:<w>*<spec>+<w>*<spec>...
"""

from __future__ import annotations

import re

import numpy as np

from .distributions import (
	Cauchy,
	Mixture,
	Normal,
	ReferenceDistribution,
	SkewNormal,
	StandardLaplace,
	StudentT,
	standard_normal,
)
from .exceptions import ParameterError

WEIGHTED_COMPONENT = re.compile(r"^\s*([0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)\s*\*\s*(.+?)\s*$")
COMPONENT_SEPARATOR = re.compile(r"(?<![0-9][eE])\+")


def _floats(text: str, what: str) -> list[float]:
	try:
		return [float(part) for part in text.split(",") if part.strip()]
	except ValueError as exc:
		raise ParameterError(f"Could not parse {what} from '{text}'") from exc


def parse_distribution(text: str, d: int) -> ReferenceDistribution:
	if d < 1:
		raise ParameterError(f"Dimension must be at least 1, got {d}")
	spec = (text or "").strip()
	family, _, rest = spec.partition(":")
	family = family.lower()

	if family == "standard-normal" and not rest:
		return standard_normal(d)
	if family == "cauchy" and not rest:
		return Cauchy(np.zeros(d), np.eye(d))
	if family == "laplace" and not rest:
		return StandardLaplace(d)
	if family == "t":
		values = _floats(rest, "degrees of freedom")
		if len(values) != 1:
			raise ParameterError(f"Expected 't:<nu>', got '{spec}'")
		return StudentT(np.zeros(d), np.eye(d), values[0])
	if family == "normal":
		mean_text, _, cov_text = rest.partition(":")
		mean = _floats(mean_text, "mean vector")
		cov = _floats(cov_text, "covariance matrix")
		if len(mean) != d or len(cov) != d * d:
			raise ParameterError(f"Normal null needs {d} mean entries and {d * d} covariance entries, got '{spec}'")
		return Normal(mean, np.asarray(cov).reshape(d, d))
	if family == "skew-normal":
		lam = _floats(rest, "skewness parameters")
		if len(lam) != d:
			raise ParameterError(f"Skew-normal null needs {d} skewness parameters, got '{spec}'")
		return SkewNormal(lam, np.eye(d))
	if family == "mixture":
		weights: list[float] = []
		components: list[ReferenceDistribution] = []
		for chunk in COMPONENT_SEPARATOR.split(rest):
			match = WEIGHTED_COMPONENT.match(chunk)
			if match is None:
				raise ParameterError(f"Expected '<weight>*<distribution>' in mixture, got '{chunk}'")
			weights.append(float(match.group(1)))
			components.append(parse_distribution(match.group(2), d))
		return Mixture(weights, components)
	raise ParameterError(f"Unknown distribution specification '{spec}'")
