import csv
import io

from django.core.management.base import BaseCommand, CommandError

from core.matrix import as_points
from depth.halfspace import DepthEngine

from ingest.options import (
	Stopwatch,
	add_output_arguments,
	add_seed_arguments,
	depth_method,
	domain_errors,
	emit,
	emit_document,
	load_sample,
	seed_rng,
)


class Command(BaseCommand):
	help = "Profundidad de Tukey de uno o varios puntos respecto de una muestra CSV."
	requires_system_checks = []

	def add_arguments(self, parser):
		parser.add_argument("sample", help="CSV con la muestra (o bundled:iris-<especie>)")
		target = parser.add_mutually_exclusive_group(required=True)
		target.add_argument("--point", help="Punto de consulta, coordenadas separadas por comas")
		target.add_argument("--queries", help="CSV con puntos de consulta")
		add_seed_arguments(parser)
		add_output_arguments(parser)

	def handle(self, *args, **options):
		stopwatch = Stopwatch()
		with domain_errors():
			rng = seed_rng(options)
			sample = load_sample(options["sample"], options)
			if options["point"] is not None:
				try:
					coordinates = [float(value) for value in options["point"].split(",")]
				except ValueError as exc:
					raise CommandError(f"Could not parse query point '{options['point']}'") from exc
				if len(coordinates) != sample.d:
					raise CommandError(f"Query point has {len(coordinates)} coordinates, sample has d={sample.d}")
				queries = as_points(coordinates, sample.d)
			else:
				queries = load_sample(options["queries"], options).values
			engine = DepthEngine.build(depth_method(options), sample.d, rng)
			values = engine.values(sample, queries, options["threads"])

		if options["format"] == "csv":
			buffer = io.StringIO()
			writer = csv.writer(buffer, lineterminator="\n")
			writer.writerow(["index", "depth"])
			for index, value in enumerate(values):
				writer.writerow([index, format(float(value), ".17g")])
			emit(self, buffer.getvalue(), options["out"])
			return
		payload = {
			"kind": "depth-values",
			"method": str(engine.method),
			"n": sample.n,
			"d": sample.d,
			"depths": [float(value) for value in values],
		}
		emit_document(self, "depth", options, rng, payload, stopwatch)
