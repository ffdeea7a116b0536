from django.conf import settings
from django.core.exceptions import ImproperlyConfigured

BUILTIN_DEFAULTS = {
	"DIRECTIONS": 5000,
	"EVAL_POINTS": 2000,
	"BOOTSTRAP": 200,
	"REPS": 200,
	"ALPHA": 0.05,
	"REF_FLOOR": 5000,
	"REF_FACTOR": 10,
	"THREADS": 1,
	"EVAL_GRID": "sphere",
}


def get_default(name: str):
	"""Devuelve el valor configurado en DDD_DEFAULTS o el valor de fábrica."""

	if name not in BUILTIN_DEFAULTS:
		raise KeyError(f"Unknown toolkit setting '{name}'")
	try:
		configured = getattr(settings, "DDD_DEFAULTS", {})
	except ImproperlyConfigured:
		configured = {}
	return configured.get(name, BUILTIN_DEFAULTS[name])


def default_reference_size(n: int) -> int:
	return max(get_default("REF_FACTOR") * n, get_default("REF_FLOOR"))
