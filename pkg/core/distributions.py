from __future__ import annotations

import logging
import math
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np
from scipy import stats

from .exceptions import ParameterError, ShapeError
from .matrix import DataMatrix, DirectionSet
from .rng import Rng, Stream

logger = logging.getLogger(__name__)

WEIGHT_TOLERANCE = 1e-12
CORRELATION_TOLERANCE = 1e-12


def _spd_cholesky(matrix, name: str) -> np.ndarray:
	array = np.asarray(matrix, dtype=float)
	if array.ndim != 2 or array.shape[0] != array.shape[1]:
		raise ParameterError(f"{name} must be a square matrix, got shape {array.shape}")
	if not np.allclose(array, array.T, rtol=0.0, atol=CORRELATION_TOLERANCE):
		raise ParameterError(f"{name} must be symmetric")
	try:
		return np.linalg.cholesky(array)
	except np.linalg.LinAlgError as exc:
		raise ParameterError(f"{name} must be positive definite") from exc


def _unit_vectors(gen: np.random.Generator, count: int, d: int) -> np.ndarray:
	raw = gen.standard_normal((count, d))
	norms = np.linalg.norm(raw, axis=1, keepdims=True)
	# Probabilidad cero, pero un vector nulo rompería la normalización.
	while np.any(norms == 0):
		zero = norms[:, 0] == 0
		raw[zero] = gen.standard_normal((int(zero.sum()), d))
		norms = np.linalg.norm(raw, axis=1, keepdims=True)
	return raw / norms


class ReferenceDistribution(ABC):
	"""Distribución muestreable que hace de F0, F, G o H."""

	dim: int

	def sample(self, n: int, rng: Rng) -> DataMatrix:
		if n < 1:
			raise ParameterError(f"Sample size must be at least 1, got {n}")
		return DataMatrix(self.draw(n, rng.generator(), rng))

	@abstractmethod
	def draw(self, n: int, gen: np.random.Generator, rng: Rng) -> np.ndarray:
		"""Genera n filas con gen; rng sólo se usa para derivar sub-flujos."""

	@abstractmethod
	def describe(self) -> dict:
		pass


class Normal(ReferenceDistribution):
	def __init__(self, mean, scatter):
		self.mean = np.asarray(mean, dtype=float).reshape(-1)
		self.scatter = np.asarray(scatter, dtype=float)
		self.dim = self.mean.shape[0]
		if self.scatter.shape != (self.dim, self.dim):
			raise ParameterError(f"Scatter shape {self.scatter.shape} does not match mean of length {self.dim}")
		self._cholesky = _spd_cholesky(self.scatter, "scatter")

	def draw(self, n, gen, rng):
		return self.mean + gen.standard_normal((n, self.dim)) @ self._cholesky.T

	def describe(self):
		return {"family": "normal", "mean": self.mean.tolist(), "scatter": self.scatter.tolist()}


class StudentT(ReferenceDistribution):
	def __init__(self, mean, scatter, dof: float):
		if not dof > 0:
			raise ParameterError(f"Degrees of freedom must be positive, got {dof}")
		self.dof = float(dof)
		self._normal = Normal(mean, scatter)
		self.mean = self._normal.mean
		self.scatter = self._normal.scatter
		self.dim = self._normal.dim

	def draw(self, n, gen, rng):
		gaussian = gen.standard_normal((n, self.dim)) @ self._normal._cholesky.T
		scale = np.sqrt(gen.chisquare(self.dof, size=n) / self.dof)
		return self.mean + gaussian / scale[:, None]

	def describe(self):
		return {"family": "t", "dof": self.dof, "mean": self.mean.tolist(), "scatter": self.scatter.tolist()}


class Cauchy(StudentT):
	def __init__(self, mean, scatter):
		super().__init__(mean, scatter, 1.0)


class StandardLaplace(ReferenceDistribution):
	"""Densidad proporcional a exp(-||x||): radio Gamma(d, 1) por dirección uniforme."""

	def __init__(self, d: int):
		if d < 1:
			raise ParameterError(f"Dimension must be at least 1, got {d}")
		self.dim = int(d)

	def draw(self, n, gen, rng):
		radius = gen.gamma(self.dim, 1.0, size=n)
		return radius[:, None] * _unit_vectors(gen, n, self.dim)

	def describe(self):
		return {"family": "laplace", "d": self.dim}


def skew_normal_params(lam: Sequence[float], psi) -> tuple[np.ndarray, np.ndarray]:
	lam = np.asarray(lam, dtype=float).reshape(-1)
	psi = np.asarray(psi, dtype=float)
	if psi.shape != (lam.size, lam.size):
		raise ParameterError(f"Psi must be {lam.size}x{lam.size}, got {psi.shape}")
	if np.any(np.abs(lam) >= 1):
		raise ParameterError(f"Every skewness parameter must lie in (-1, 1), got {lam.tolist()}")
	if not np.allclose(np.diag(psi), 1.0, rtol=0.0, atol=CORRELATION_TOLERANCE):
		raise ParameterError("Psi must be a correlation matrix (unit diagonal)")
	_spd_cholesky(psi, "Psi")

	spread = np.sqrt(1.0 - lam**2)
	delta_matrix = np.diag(spread)
	lam_vector = lam / spread
	psi_inverse = np.linalg.inv(psi)
	omega = delta_matrix @ (psi + np.outer(lam_vector, lam_vector)) @ delta_matrix
	omega = (omega + omega.T) / 2
	alpha = (lam_vector @ psi_inverse @ np.diag(1.0 / spread)) / math.sqrt(1.0 + lam_vector @ psi_inverse @ lam_vector)
	return alpha, omega


class SkewNormal(ReferenceDistribution):
	def __init__(self, lam: Sequence[float], psi):
		self.lam = np.asarray(lam, dtype=float).reshape(-1)
		self.psi = np.asarray(psi, dtype=float)
		self.alpha, self.omega = skew_normal_params(self.lam, self.psi)
		self.dim = self.lam.size
		self.delta = self.omega @ self.alpha / math.sqrt(1.0 + self.alpha @ self.omega @ self.alpha)
		joint = np.empty((self.dim + 1, self.dim + 1))
		joint[0, 0] = 1.0
		joint[0, 1:] = self.delta
		joint[1:, 0] = self.delta
		joint[1:, 1:] = self.omega
		self._joint_cholesky = _spd_cholesky(joint, "selection covariance")

	def draw(self, n, gen, rng):
		joint = gen.standard_normal((n, self.dim + 1)) @ self._joint_cholesky.T
		selector = joint[:, :1]
		body = joint[:, 1:]
		return np.where(selector > 0, body, -body)

	def expected_mean(self) -> np.ndarray:
		return self.delta * math.sqrt(2.0 / math.pi)

	def pdf(self, points) -> np.ndarray:
		points = np.atleast_2d(np.asarray(points, dtype=float))
		gaussian = stats.multivariate_normal(mean=np.zeros(self.dim), cov=self.omega).pdf(points)
		return 2.0 * np.atleast_1d(gaussian) * stats.norm.cdf(points @ self.alpha)

	def describe(self):
		return {"family": "skew-normal", "lambda": self.lam.tolist(), "psi": self.psi.tolist()}


class Mixture(ReferenceDistribution):
	def __init__(self, weights: Sequence[float], components: Sequence[ReferenceDistribution]):
		self.weights = np.asarray(weights, dtype=float).reshape(-1)
		self.components = tuple(components)
		if not self.components or self.weights.size != len(self.components):
			raise ParameterError(f"Got {self.weights.size} weights for {len(self.components)} components")
		if np.any(self.weights < 0) or np.any(self.weights > 1):
			raise ParameterError(f"Mixture weights must lie in [0, 1], got {self.weights.tolist()}")
		if abs(self.weights.sum() - 1.0) > WEIGHT_TOLERANCE:
			raise ParameterError(f"Mixture weights must sum to 1, got {self.weights.sum()!r}")
		dims = {component.dim for component in self.components}
		if len(dims) != 1:
			raise ShapeError(f"Mixture components disagree on dimension: {sorted(dims)}")
		self.dim = dims.pop()

	def draw(self, n, gen, rng):
		labels = rng.spawn(Stream.LABELS).generator().choice(
			len(self.components), size=n, p=self.weights / self.weights.sum()
		)
		rows = np.empty((n, self.dim))
		for index, component in enumerate(self.components):
			chosen = labels == index
			count = int(chosen.sum())
			if count:
				rows[chosen] = component.draw(count, gen, rng.spawn(Stream.COMPONENT, index))
		return rows

	def describe(self):
		return {
			"family": "mixture",
			"weights": self.weights.tolist(),
			"components": [component.describe() for component in self.components],
		}


class Empirical(ReferenceDistribution):
	def __init__(self, data: DataMatrix):
		self.data = data
		self.dim = data.d

	def draw(self, n, gen, rng):
		return self.data.values[gen.integers(0, self.data.n, size=n)]

	def describe(self):
		return {"family": "empirical", "n": self.data.n, "d": self.dim}


def standard_normal(d: int) -> Normal:
	return Normal(np.zeros(d), np.eye(d))


def sample(dist: ReferenceDistribution, n: int, rng: Rng) -> DataMatrix:
	return dist.sample(n, rng)


def sample_unit_sphere(d: int, M: int, rng: Rng) -> DirectionSet:
	if d < 1 or M < 1:
		raise ParameterError(f"Sphere sampling needs d >= 1 and M >= 1, got d={d}, M={M}")
	return DirectionSet(_unit_vectors(rng.generator(), M, d))


def contiguous_mixture(f0: ReferenceDistribution, h: ReferenceDistribution, gamma: float, n_total: int) -> Mixture:
	if gamma < 0:
		raise ParameterError(f"Gamma must be nonnegative, got {gamma}")
	if n_total < 1:
		raise ParameterError(f"Total sample size must be at least 1, got {n_total}")
	weight = gamma / math.sqrt(n_total)
	if weight > 1:
		raise ParameterError(f"Contamination weight {weight:.6g} exceeds 1 (gamma={gamma}, n={n_total})")
	logger.debug("Contiguous mixture weight %.6g for gamma=%s, n=%d", weight, gamma, n_total)
	return Mixture((1.0 - weight, weight), (f0, h))
