import logging

from django.core.management.base import BaseCommand

from inference.bootstrap import TwoSampleSpec, run_twosample

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
	help = "Prueba de dos muestras basada en profundidad con p-valor bootstrap."
	requires_system_checks = []

	def add_arguments(self, parser):
		parser.add_argument("first", help="CSV con la primera muestra")
		parser.add_argument("second", help="CSV con la segunda muestra")
		add_seed_arguments(parser)
		add_test_arguments(parser)
		add_output_arguments(parser)

	def handle(self, *args, **options):
		stopwatch = Stopwatch()
		with domain_errors():
			rng = seed_rng(options)
			x = load_sample(options["first"], options)
			y = load_sample(options["second"], options)
			spec = TwoSampleSpec(
				statistic=statistics(options)[0],
				M=options["eval_points"],
				B=options["bootstrap"],
				method=depth_method(options),
				seed=rng.seed,
				eval_grid=options["eval_grid"],
				corrected=options["corrected_p"],
			)
			logger.info("Two-sample test (n=%d, m=%d, d=%d, seed=%d)", x.n, y.n, x.d, rng.seed)
			results = run_twosample(x, y, spec, statistics=statistics(options), rng=rng, threads=options["threads"])
		emit_results(self, "twosample", options, rng, results, stopwatch)
