import logging

from django.core.management.base import BaseCommand

from core.nullspec import parse_distribution
from inference.bootstrap import GofSpec, run_gof

from ingest.options import (
	Stopwatch,
	add_output_arguments,
	add_seed_arguments,
	add_test_arguments,
	depth_method,
	domain_errors,
	emit_results,
	load_sample,
	seed_rng,
	statistics,
)

logger = logging.getLogger(__name__)


class Command(BaseCommand):
	help = "Prueba de bondad de ajuste basada en profundidad con p-valor bootstrap."
	requires_system_checks = []

	def add_arguments(self, parser):
		parser.add_argument("data", help="CSV con la muestra (o bundled:iris-<especie>)")
		parser.add_argument("--null", default="standard-normal", help="Distribución F0, p. ej. standard-normal, t:3, mixture:0.8*standard-normal+0.2*laplace")
		parser.add_argument("--standardize", action="store_true", help="Estandariza los datos antes de la prueba")
		parser.add_argument("--ref-size", type=int, help="Tamaño de la muestra de referencia de F0")
		add_seed_arguments(parser)
		add_test_arguments(parser)
		add_output_arguments(parser)

	def handle(self, *args, **options):
		stopwatch = Stopwatch()
		with domain_errors():
			rng = seed_rng(options)
			x = load_sample(options["data"], options, standardized=options["standardize"])
			spec = GofSpec(
				f0=parse_distribution(options["null"], x.d),
				statistic=statistics(options)[0],
				M=options["eval_points"],
				B=options["bootstrap"],
				n_ref=options["ref_size"],
				method=depth_method(options),
				seed=rng.seed,
				eval_grid=options["eval_grid"],
				corrected=options["corrected_p"],
			)
			logger.info("Goodness-of-fit test on %s (n=%d, d=%d, seed=%d)", options["data"], x.n, x.d, rng.seed)
			results = run_gof(x, spec, statistics=statistics(options), rng=rng, threads=options["threads"])
		emit_results(self, "gof", options, rng, results, stopwatch)
