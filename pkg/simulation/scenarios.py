import math

import numpy as np
from django.db import models

from core.distributions import (
	Cauchy,
	Mixture,
	Normal,
	ReferenceDistribution,
	StandardLaplace,
	StudentT,
	standard_normal,
)
from core.exceptions import ParameterError

OUTLIER_SHIFT = 5.0  # media de la componente contaminante del Modelo A.2
CONTAMINATION = 0.2
COMPOUND_CORRELATION = 0.5


class Model(models.TextChoices):
	A1 = "A1", "Model A.1 (normal)"
	A2 = "A2", "Model A.2 (location mixture)"
	A3 = "A3", "Model A.3 (scale mixture)"
	A4 = "A4", "Model A.4 (t, 3 df)"
	A5 = "A5", "Model A.5 (Cauchy)"
	A6 = "A6", "Model A.6 (Laplace)"
	B = "B", "Model B (location shift)"
	CONTIGUOUS = "contiguous", "Contiguous mixture"


GOF_MODELS = {Model.A1, Model.A2, Model.A3, Model.A4, Model.A5, Model.A6}


def compound_symmetric(d: int, rho: float = COMPOUND_CORRELATION) -> np.ndarray:
	return np.full((d, d), rho) + (1.0 - rho) * np.eye(d)


def model_distribution(model: str, d: int, mu: float = 0.0) -> ReferenceDistribution:
	"""Distribución que genera los datos bajo cada modelo de simulación."""

	zeros = np.zeros(d)
	identity = np.eye(d)
	if model == Model.A1:
		return standard_normal(d)
	if model == Model.A2:
		return Mixture(
			(1 - CONTAMINATION, CONTAMINATION),
			(standard_normal(d), Normal(np.full(d, OUTLIER_SHIFT), identity)),
		)
	if model == Model.A3:
		return Mixture(
			(1 - CONTAMINATION, CONTAMINATION),
			(standard_normal(d), Normal(zeros, compound_symmetric(d))),
		)
	if model == Model.A4:
		return StudentT(zeros, identity, 3.0)
	if model == Model.A5:
		return Cauchy(zeros, identity)
	if model == Model.A6:
		return StandardLaplace(d)
	if model == Model.B:
		return Normal(np.full(d, float(mu)), identity)
	raise ParameterError(f"Model '{model}' has no fixed data distribution")


def second_sample_size(n: int, lam: float) -> int:
	"""m tal que n/(n+m) se acerque a lam, redondeando hacia arriba (117 para n=50, lam=0.3)."""

	if not 0 < lam < 1:
		raise ParameterError(f"Sample ratio must lie in (0, 1), got {lam}")
	return max(1, math.ceil(n * (1 - lam) / lam - 1e-9))
