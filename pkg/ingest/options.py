"""Opciones y utilidades comunes a los comandos de gestión."""

from __future__ import annotations

import csv
import io
import time
from contextlib import contextmanager
from pathlib import Path

from django.core.management.base import CommandError

from core.conf import get_default
from core.exceptions import DepthToolkitError
from core.matrix import DataMatrix, standardize
from core.rng import Rng
from depth.halfspace import DepthMethod
from inference.choices import EvalGrid, Statistic

from .documents import ResultDocument
from .readers import read_csv

BASE_OPTIONS = {"verbosity", "settings", "pythonpath", "traceback", "no_color", "force_color", "skip_checks"}
NOT_ECHOED = BASE_OPTIONS | {"threads", "out", "svg"}
STATISTIC_CHOICES = ("ks", "cvm", "both")


def add_seed_arguments(parser) -> None:
	parser.add_argument("--seed", type=int, help="Semilla u64; sin ella se usa una semilla de entropía que se informa en la salida")
	parser.add_argument("--method", default="auto", choices=["auto", "exact", "approx"], help="Motor de profundidad")
	parser.add_argument("--directions", type=int, help="Direcciones del motor aproximado")
	parser.add_argument("--threads", type=int, default=get_default("THREADS"), help="Hilos de trabajo")
	parser.add_argument("--header", action="store_true", help="Los CSV tienen fila de encabezado")


def add_output_arguments(parser, formats=("json", "csv")) -> None:
	parser.add_argument("--out", help="Archivo de salida (por defecto, stdout)")
	parser.add_argument("--format", default=formats[0], choices=list(formats), help="Formato de salida")


def add_test_arguments(parser) -> None:
	parser.add_argument("--bootstrap", type=int, default=get_default("BOOTSTRAP"), help="Réplicas bootstrap B")
	parser.add_argument("--eval-points", type=int, default=get_default("EVAL_POINTS"), help="Puntos de evaluación M")
	parser.add_argument("--eval-grid", default=get_default("EVAL_GRID"), choices=EvalGrid.values, help="Grilla del supremo KS")
	parser.add_argument("--statistic", default="both", choices=STATISTIC_CHOICES, help="Estadístico a informar")
	parser.add_argument("--alpha", type=float, default=get_default("ALPHA"), help="Nivel de la prueba")
	parser.add_argument("--corrected-p", action="store_true", help="Usa el p-valor (1+c)/(1+B)")


def seed_rng(options) -> Rng:
	if options.get("seed") is None:
		return Rng.entropy()
	return Rng(options["seed"])


def depth_method(options) -> DepthMethod:
	return DepthMethod.parse(options.get("method"), options.get("directions"))


def statistics(options) -> tuple[Statistic, ...]:
	if options["statistic"] == "both":
		return (Statistic.KS, Statistic.CVM)
	return (Statistic(options["statistic"]),)


def load_sample(path: str, options, standardized: bool = False) -> DataMatrix:
	sample = read_csv(path, options.get("header", False))
	if standardized:
		sample, _ = standardize(sample)
	return sample


def command_echo(name: str, options) -> dict:
	echoed = {key: value for key, value in options.items() if key not in NOT_ECHOED}
	return {"name": name, "options": dict(sorted(echoed.items()))}


@contextmanager
def domain_errors():
	"""Traduce fallas de dominio y de E/S a CommandError (código de salida 1)."""

	try:
		yield
	except DepthToolkitError as exc:
		raise CommandError(f"{exc.__class__.__name__}: {exc}") from exc
	except OSError as exc:
		raise CommandError(f"Could not access '{exc.filename}': {exc.strerror}") from exc


class Stopwatch:
	def __init__(self):
		self.started = time.perf_counter()

	def timing(self) -> dict:
		return {"elapsed_seconds": round(time.perf_counter() - self.started, 6)}


def emit(command, content: str | bytes, out: str | None) -> None:
	if out:
		target = Path(out)
		if isinstance(content, bytes):
			target.write_bytes(content)
		else:
			target.write_text(content, encoding="utf-8")
		return
	if isinstance(content, bytes):
		try:
			content = content.decode("utf-8")
		except UnicodeDecodeError as exc:
			raise CommandError("Binary output needs --out <path>") from exc
	command.stdout.write(content, ending="")


def emit_document(command, name: str, options, rng: Rng, payload: dict, stopwatch: Stopwatch) -> None:
	document = ResultDocument(
		command=command_echo(name, options),
		seed=rng.seed,
		payload=payload,
		timing=stopwatch.timing(),
	)
	emit(command, document.to_json(), options.get("out"))


def results_payload(results: dict, alpha: float) -> dict:
	return {
		"kind": "test-results",
		"alpha": alpha,
		"results": [{**result.to_payload(), "reject": result.p_value <= alpha} for result in results.values()],
	}


def results_csv(results: dict) -> str:
	buffer = io.StringIO()
	writer = csv.writer(buffer, lineterminator="\n")
	writer.writerow(["statistic", "statistic_value", "p_value", "B", "seed"])
	for result in results.values():
		writer.writerow(
			[
				result.statistic,
				format(result.statistic_value, ".17g"),
				format(result.p_value, ".17g"),
				len(result.replicates),
				result.spec["seed"],
			]
		)
	return buffer.getvalue()


def emit_results(command, name: str, options, rng: Rng, results: dict, stopwatch: Stopwatch) -> None:
	if options["format"] == "csv":
		emit(command, results_csv(results), options.get("out"))
		return
	emit_document(command, name, options, rng, results_payload(results, options["alpha"]), stopwatch)
