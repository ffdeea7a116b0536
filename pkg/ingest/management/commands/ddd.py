import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError

from core.nullspec import parse_distribution
from discrepancy.records import BAND_KINDS, ddd_gof, ddd_twosample
from simulation.illustrations import ILLUSTRATIONS, run_illustration

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
from ingest.writers import write_ddd_csv, write_ddd_svg

logger = logging.getLogger(__name__)

ARITY = {"gof": 1, "twosample": 2, "illustrate": 1}


class Command(BaseCommand):
	help = "Gráfico DDD: CSV de discrepancias y, opcionalmente, un SVG."
	requires_system_checks = []

	def add_arguments(self, parser):
		parser.add_argument("mode", choices=list(ARITY), help="gof, twosample o illustrate")
		parser.add_argument("inputs", nargs="+", help="CSV de datos, dos CSV, o el nombre de la ilustración")
		parser.add_argument("--null", default="standard-normal", help="Distribución F0 para el modo gof")
		parser.add_argument("--standardize", action="store_true", help="Estandariza los datos en el modo gof")
		parser.add_argument("--ref-size", type=int, help="Tamaño de la muestra de referencia de F0")
		parser.add_argument("--band", default="two-sigma", choices=BAND_KINDS, help="Banda de referencia")
		parser.add_argument("--band-resamples", type=int, default=200, help="Remuestreos de la banda bootstrap")
		parser.add_argument("--d", type=int, help="Dimensión de la ilustración")
		parser.add_argument("--svg", help="Ruta del SVG a generar")
		parser.add_argument("--width", type=int, default=640)
		parser.add_argument("--height", type=int, default=400)
		add_seed_arguments(parser)
		add_output_arguments(parser, formats=("csv", "json"))

	def handle(self, *args, **options):
		mode = options["mode"]
		inputs = options["inputs"]
		if len(inputs) != ARITY[mode]:
			raise CommandError(f"'ddd {mode}' takes {ARITY[mode]} positional argument(s), got {len(inputs)}", returncode=2)
		if mode == "illustrate" and inputs[0] not in ILLUSTRATIONS:
			raise CommandError(f"Unknown illustration '{inputs[0]}'; choose one of {', '.join(ILLUSTRATIONS)}", returncode=2)
		stopwatch = Stopwatch()
		band = {"band": options["band"], "threads": options["threads"]}
		with domain_errors():
			rng = seed_rng(options)
			method = depth_method(options) if options["method"] != "auto" or options["directions"] else None
			if mode == "gof":
				x = load_sample(inputs[0], options, standardized=options["standardize"])
				f0 = parse_distribution(options["null"], x.d)
				records = ddd_gof(
					x, f0, options["ref_size"], method or "auto", rng, band_resamples=options["band_resamples"], **band
				)
			elif mode == "twosample":
				x = load_sample(inputs[0], options)
				y = load_sample(inputs[1], options)
				records = ddd_twosample(x, y, method or "auto", rng, band_resamples=options["band_resamples"], **band)
			else:
				records = run_illustration(inputs[0], rng, options["d"], method=method, **band)
			if options["svg"]:
				Path(options["svg"]).write_bytes(write_ddd_svg(records, options["width"], options["height"]))
		logger.info("DDD %s: %d records, %d outside the band", mode, len(records), sum(r.outside for r in records))

		if options["format"] == "csv":
			emit(self, write_ddd_csv(records), options["out"])
			return
		payload = {
			"kind": "ddd-records",
			"records": [
				{
					"index": record.index,
					"point": list(record.point),
					"depth_a": record.depth_a,
					"depth_b": record.depth_b,
					"ddd": record.ddd,
					"band": record.band_halfwidth,
					"outside": record.outside,
				}
				for record in records
			],
		}
		emit_document(self, "ddd", options, rng, payload, stopwatch)
