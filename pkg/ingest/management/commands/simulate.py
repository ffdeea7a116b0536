import json
import logging
from dataclasses import replace
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.rng import Rng
from inference.choices import EvalGrid
from simulation.experiments import null_counterpart, run_cell, run_local_power_curve, run_roc_study
from simulation.forms import ExperimentForm
from simulation.scenarios import Model
from simulation.tables import render_table

from ingest.options import STATISTIC_CHOICES, Stopwatch, domain_errors, emit, emit_document

logger = logging.getLogger(__name__)

# opción de línea de comandos -> campo de ExperimentForm
FLAG_FIELDS = {
	"model": "model",
	"d": "d",
	"n": "n",
	"m": "m",
	"lam": "lam",
	"mu": "mu",
	"f0": "f0",
	"h": "h",
	"alpha": "alpha",
	"reps": "reps",
	"bootstrap": "B",
	"eval_points": "M",
	"ref_size": "n_ref",
	"method": "method",
	"directions": "directions",
	"eval_grid": "eval_grid",
	"seed": "seed",
}


def _gammas(text: str) -> list[float]:
	try:
		return [float(part) for part in text.split(",") if part.strip()]
	except ValueError as exc:
		raise CommandError(f"Could not parse gamma grid '{text}'") from exc


class Command(BaseCommand):
	help = "Estudio Monte Carlo de tamaño y potencia; emite una tabla de potencia."
	requires_system_checks = []

	def add_arguments(self, parser):
		parser.add_argument("--config", help="Archivo JSON con los campos del experimento")
		parser.add_argument("--model", choices=Model.values)
		parser.add_argument("--d", type=int)
		parser.add_argument("--n", type=int)
		parser.add_argument("--m", type=int)
		parser.add_argument("--lam", type=float, help="Razón n/(n+m) para fijar m")
		parser.add_argument("--mu", type=float, help="Desplazamiento del Modelo B")
		parser.add_argument("--gamma", help="Uno o varios gamma separados por comas (mezcla contigua)")
		parser.add_argument("--f0", help="F0 de la mezcla contigua")
		parser.add_argument("--h", help="H de la mezcla contigua")
		parser.add_argument("--two-sample", action="store_true", help="Mezcla contigua en versión de dos muestras")
		parser.add_argument("--statistic", choices=STATISTIC_CHOICES)
		parser.add_argument("--alpha", type=float)
		parser.add_argument("--reps", type=int)
		parser.add_argument("--bootstrap", type=int)
		parser.add_argument("--eval-points", type=int)
		parser.add_argument("--ref-size", type=int)
		parser.add_argument("--method", choices=["auto", "exact", "approx"])
		parser.add_argument("--directions", type=int)
		parser.add_argument("--eval-grid", choices=EvalGrid.values)
		parser.add_argument("--seed", type=int)
		parser.add_argument("--threads", type=int)
		parser.add_argument("--roc", action="store_true", help="Curva ROC frente a la celda nula correspondiente")
		parser.add_argument("--out", help="Archivo de salida (obligatorio para xlsx)")
		parser.add_argument("--format", default="json", choices=["json", "csv", "xlsx"])

	def _form_data(self, options) -> tuple[dict, list | None]:
		data = {}
		if options["config"]:
			try:
				data = json.loads(Path(options["config"]).read_text(encoding="utf-8"))
			except OSError as exc:
				raise CommandError(f"Could not read config '{options['config']}': {exc.strerror}") from exc
			except json.JSONDecodeError as exc:
				raise CommandError(f"Config '{options['config']}' is not valid JSON: {exc}") from exc
			if not isinstance(data, dict):
				raise CommandError("Experiment config must be a JSON object")
		for flag, name in FLAG_FIELDS.items():
			if options[flag] is not None:
				data[name] = options[flag]
		if options["two_sample"]:
			data["two_sample"] = True
		if options["statistic"]:
			data["statistics"] = ["ks", "cvm"] if options["statistic"] == "both" else [options["statistic"]]
		if options["gamma"] is not None:
			data["gamma"] = _gammas(options["gamma"])
		gammas = data.get("gamma")
		if isinstance(gammas, list):
			data["gamma"] = gammas[0] if gammas else None
		if data.get("seed") is None:
			data["seed"] = Rng.entropy().seed
		return data, gammas if isinstance(gammas, list) else None

	def handle(self, *args, **options):
		if options["format"] == "xlsx" and options["roc"]:
			raise CommandError("ROC curves are written as json or csv", returncode=2)
		if options["format"] == "xlsx" and not options["out"]:
			raise CommandError("xlsx output needs --out <path>", returncode=2)
		stopwatch = Stopwatch()
		data, gammas = self._form_data(options)
		form = ExperimentForm(data)
		if not form.is_valid():
			raise CommandError(f"Invalid experiment:\n{form.errors.as_text()}")
		threads = options["threads"]
		with domain_errors():
			spec = form.to_spec()
			logger.info("Simulation cell %s (seed=%d)", spec.key(), spec.seed)
			if options["roc"]:
				curves = run_roc_study(null_counterpart(spec), spec, threads=threads)
				self._emit_roc(options, spec, curves, stopwatch)
				return
			if gammas and len(gammas) > 1:
				if spec.model != Model.CONTIGUOUS:
					raise CommandError("A gamma grid needs --model contiguous")
				curve = run_local_power_curve(
					gammas,
					spec.f0,
					spec.h,
					spec.n,
					spec.m,
					d=spec.d,
					threads=threads,
					statistics=spec.statistics,
					alpha=spec.alpha,
					reps=spec.reps,
					B=spec.B,
					M=spec.M,
					n_ref=spec.n_ref,
					method=spec.method,
					eval_grid=spec.eval_grid,
					seed=spec.seed,
				)
				cells = [(replace(spec, gamma=gamma), estimates) for gamma, estimates in curve]
			else:
				cells = [(spec, run_cell(spec, threads).estimates)]
			table = render_table(cells)

		if options["format"] == "csv":
			emit(self, table.to_csv(), options["out"])
		elif options["format"] == "xlsx":
			emit(self, table.to_xlsx(), options["out"])
		else:
			payload = {
				**table.to_payload(),
				"estimates": [estimate.to_payload() for _, estimates in cells for estimate in estimates],
			}
			emit_document(self, "simulate", options, Rng(spec.seed), payload, stopwatch)

	def _emit_roc(self, options, spec, curves, stopwatch):
		if options["format"] == "json":
			payload = {
				"kind": "roc",
				"spec": spec.echo(),
				"curves": {
					statistic: [{"alpha": p.alpha, "size": p.size, "power": p.power} for p in points]
					for statistic, points in curves.items()
				},
			}
			emit_document(self, "simulate", options, Rng(spec.seed), payload, stopwatch)
			return
		lines = ["statistic,alpha,size,power"]
		for statistic, points in curves.items():
			lines.extend(f"{statistic},{p.alpha!r},{p.size!r},{p.power!r}" for p in points)
		emit(self, "\n".join(lines) + "\n", options["out"])
