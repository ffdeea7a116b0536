from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

from core.exceptions import ParameterError

SCHEMA_VERSION = "1"


class ResultEncoder(DjangoJSONEncoder):
	def default(self, o):
		if isinstance(o, np.generic):
			return o.item()
		if isinstance(o, np.ndarray):
			return o.tolist()
		return super().default(o)


@dataclass(frozen=True)
class ResultDocument:
	"""Documento JSON versionado que envuelve un resultado de prueba o una tabla de potencia."""

	command: dict
	seed: int | None
	payload: dict
	timing: dict = field(default_factory=dict)
	schema_version: str = SCHEMA_VERSION

	def to_dict(self, include_timing: bool = True) -> dict:
		document = asdict(self)
		if not include_timing:
			document.pop("timing")
		return document

	def to_json(self, include_timing: bool = True) -> str:
		return json.dumps(self.to_dict(include_timing), cls=ResultEncoder, sort_keys=True, indent=2) + "\n"

	@classmethod
	def from_json(cls, text: str) -> ResultDocument:
		try:
			raw = json.loads(text)
		except json.JSONDecodeError as exc:
			raise ParameterError(f"Result document is not valid JSON: {exc}") from exc
		version = raw.get("schema_version")
		if version != SCHEMA_VERSION:
			raise ParameterError(f"Unsupported result schema version '{version}'")
		return cls(
			command=raw["command"],
			seed=raw["seed"],
			payload=raw["payload"],
			timing=raw.get("timing", {}),
			schema_version=version,
		)
