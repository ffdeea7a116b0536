from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .exceptions import ParameterError

SEED_LIMIT = 2**64


class Stream(IntEnum):
	"""Etiquetas de sub-flujo; forman la ruta (seed, etiqueta, índice, ...)."""

	DATA = 1
	SECOND_SAMPLE = 2
	SPHERE_GRID = 3
	NULL_GRID = 4
	REFERENCE = 5
	DIRECTIONS = 6
	BOOTSTRAP = 7
	REPEAT = 8
	LABELS = 9
	COMPONENT = 10
	BAND = 11


@dataclass(frozen=True)
class Rng:
	"""Flujo contador (Philox) determinado por (seed, stream)."""

	seed: int
	stream: tuple[int, ...] = ()

	def __post_init__(self):
		if not 0 <= int(self.seed) < SEED_LIMIT:
			raise ParameterError(f"Seed must be an unsigned 64-bit integer, got {self.seed}")
		stream = tuple(int(key) for key in self.stream)
		if any(key < 0 or key >= SEED_LIMIT for key in stream):
			raise ParameterError(f"Stream keys must be unsigned 64-bit integers, got {stream}")
		object.__setattr__(self, "seed", int(self.seed))
		object.__setattr__(self, "stream", stream)

	@classmethod
	def entropy(cls) -> Rng:
		seed = int(np.random.SeedSequence().entropy) % 2**63
		return cls(seed)

	def spawn(self, *keys: int) -> Rng:
		return Rng(self.seed, self.stream + tuple(int(key) for key in keys))

	def generator(self) -> np.random.Generator:
		sequence = np.random.SeedSequence(self.seed, spawn_key=self.stream)
		return np.random.Generator(np.random.Philox(sequence))

	def provenance(self) -> dict:
		return {"seed": self.seed, "stream": list(self.stream), "bit_generator": "Philox"}
