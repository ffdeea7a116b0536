import io
import math
import os
import unittest

import numpy as np
from django.test import SimpleTestCase
from openpyxl import load_workbook

from core.exceptions import DuplicateRowError, ParameterError
from core.rng import Rng

from .experiments import (
	DEFAULT_ROC_ALPHAS,
	ExperimentSpec,
	PowerEstimate,
	null_counterpart,
	roc_curve,
	run_cell,
	run_gof_cell,
	run_local_power_curve,
	run_roc_study,
	run_twosample_cell,
)
from .forms import ExperimentForm
from .illustrations import ILLUSTRATIONS, build_illustration, run_illustration
from .scenarios import Model, compound_symmetric, model_distribution, second_sample_size
from .tables import KEY_COLUMNS, render_table

SLOW = os.getenv("DDD_SLOW_TESTS") == "1"

SMALL = {"B": 10, "M": 20, "n_ref": 200}


def _estimates(spec: ExperimentSpec, rejections: int) -> list[PowerEstimate]:
	echo = spec.echo()
	return [PowerEstimate.from_rejections(statistic, rejections, spec.reps, echo) for statistic in spec.statistics]


class ScenarioTests(SimpleTestCase):
	def test_second_sample_size(self):
		self.assertEqual(second_sample_size(50, 0.3), 117)
		self.assertEqual(second_sample_size(50, 0.5), 50)
		self.assertEqual(second_sample_size(100, 0.8), 25)

	def test_second_sample_ratio_bounds(self):
		for lam in (0, 1, 1.5):
			with self.assertRaises(ParameterError):
				second_sample_size(50, lam)

	def test_compound_symmetric(self):
		np.testing.assert_array_equal(compound_symmetric(2), [[1.0, 0.5], [0.5, 1.0]])

	def test_model_dimensions(self):
		for model in (Model.A1, Model.A2, Model.A3, Model.A4, Model.A5, Model.A6, Model.B):
			self.assertEqual(model_distribution(model, 3, 1.0).dim, 3)

	def test_contiguous_has_no_fixed_distribution(self):
		with self.assertRaises(ParameterError):
			model_distribution(Model.CONTIGUOUS, 2)


class ExperimentSpecTests(SimpleTestCase):
	def test_model_b_is_two_sample(self):
		spec = ExperimentSpec(model="B", d=2, n=50, lam=0.3, mu=0.5, seed=1)
		self.assertTrue(spec.two_sample)
		self.assertEqual(spec.m, 117)
		self.assertEqual(spec.n_total, 167)

	def test_two_sample_needs_second_size(self):
		with self.assertRaises(ParameterError):
			ExperimentSpec(model="B", d=2, n=50)

	def test_gof_cells_drop_second_size(self):
		spec = ExperimentSpec(model="A3", d=2, n=50, m=20, two_sample=True, seed=1)
		self.assertFalse(spec.two_sample)
		self.assertIsNone(spec.m)
		self.assertEqual(spec.key(), ("A3", 2, 50, 0, 0.0, 0.0, "standard-normal", "laplace"))

	def test_statistics_are_deduplicated(self):
		spec = ExperimentSpec(model="A1", d=2, n=10, statistics=("cvm", "cvm", "ks"), seed=1)
		self.assertEqual([str(value) for value in spec.statistics], ["cvm", "ks"])

	def test_invalid_values(self):
		for overrides in ({"model": "C"}, {"alpha": 1.0}, {"reps": 0}, {"gamma": -1.0}, {"d": 0}, {"statistics": ()}):
			options = {"model": "A1", "d": 2, "n": 10, "seed": 1, **overrides}
			with self.subTest(overrides=overrides), self.assertRaises(ParameterError):
				ExperimentSpec(**options)

	def test_seed_is_always_set(self):
		self.assertIsInstance(ExperimentSpec(model="A1", d=2, n=10).seed, int)

	def test_estimate_standard_error(self):
		estimate = PowerEstimate.from_rejections("ks", 10, 200, {})
		self.assertEqual(estimate.rejection_rate, 0.05)
		self.assertAlmostEqual(estimate.mc_std_error, math.sqrt(0.05 * 0.95 / 200))
		self.assertEqual(PowerEstimate.from_payload(estimate.to_payload()), estimate)


class CellTests(SimpleTestCase):
	def test_single_repeat_gives_zero_or_one(self):
		spec = ExperimentSpec(model="A1", d=2, n=15, reps=1, seed=3, **SMALL)
		for estimate in run_gof_cell(spec):
			self.assertIn(estimate.rejection_rate, (0.0, 1.0))
			self.assertEqual(estimate.mc_std_error, 0.0)
			self.assertEqual(estimate.spec["seed"], 3)

	def test_cells_are_reproducible(self):
		spec = ExperimentSpec(model="A6", d=2, n=15, reps=3, seed=4, **SMALL)
		first = run_cell(spec, threads=1)
		second = run_cell(spec, threads=3)
		self.assertEqual(first.p_values, second.p_values)
		self.assertEqual(first.estimates, second.estimates)

	def test_repeats_are_spread_over_threads(self):
		spec = ExperimentSpec(model="B", d=2, n=10, m=12, mu=0.5, reps=4, seed=6, **SMALL)
		with self.assertLogs("core.parallel", "DEBUG") as logs:
			threaded = run_cell(spec, threads=4)
		self.assertIn("Dispatching 4 tasks over 4 threads", "\n".join(logs.output))
		serial = run_cell(spec, threads=1)
		self.assertEqual(threaded.p_values, serial.p_values)
		self.assertEqual(len(threaded.p_values["ks"]), 4)

	def test_two_sample_cell(self):
		spec = ExperimentSpec(model="B", d=2, n=12, m=10, mu=3.0, reps=2, seed=5, **SMALL)
		estimates = run_twosample_cell(spec)
		self.assertEqual([e.statistic for e in estimates], ["ks", "cvm"])
		self.assertEqual(estimates[1].rejection_rate, 1.0)

	def test_cell_kind_is_checked(self):
		gof = ExperimentSpec(model="A1", d=2, n=10, reps=1, seed=1, **SMALL)
		with self.assertRaises(ParameterError):
			run_twosample_cell(gof)

	def test_contiguous_two_sample_cell(self):
		spec = ExperimentSpec(
			model="contiguous", d=2, n=10, m=10, gamma=1.0, two_sample=True, reps=2, seed=6, **SMALL
		)
		self.assertEqual(len(run_cell(spec).p_values["ks"]), 2)


class LocalPowerTests(SimpleTestCase):
	def test_curve_points(self):
		curve = run_local_power_curve([0.0, 2.0], n=20, reps=2, seed=7, **SMALL)
		self.assertEqual([gamma for gamma, _ in curve], [0.0, 2.0])
		self.assertTrue(all(len(estimates) == 2 for _, estimates in curve))
		self.assertEqual(curve[1][1][0].spec["gamma"], 2.0)

	def test_gamma_above_limit_fails_before_running(self):
		with self.assertRaises(ParameterError):
			run_local_power_curve([0.0, 20.0], n=100, reps=1, seed=1, **SMALL)

	def test_two_sample_curve(self):
		curve = run_local_power_curve([1.0], n=10, m=10, reps=1, seed=8, **SMALL)
		self.assertEqual(curve[0][1][0].spec["m"], 10)


class RocTests(SimpleTestCase):
	def test_curve_values(self):
		points = roc_curve([0.01, 0.2, 0.5, 0.04], [0.001, 0.02, 0.03, 0.9], alphas=(0.05, 0.01))
		self.assertEqual([(p.alpha, p.size, p.power) for p in points], [(0.01, 0.25, 0.25), (0.05, 0.5, 0.75)])

	def test_default_levels(self):
		self.assertEqual(DEFAULT_ROC_ALPHAS[0], 0.01)
		self.assertEqual(DEFAULT_ROC_ALPHAS[-1], 0.2)
		self.assertEqual(len(DEFAULT_ROC_ALPHAS), 20)

	def test_needs_both_hypotheses(self):
		with self.assertRaises(ParameterError):
			roc_curve([], [0.5])

	def test_null_counterparts(self):
		self.assertEqual(null_counterpart(ExperimentSpec(model="A5", d=2, n=10, seed=1)).model, Model.A1)
		self.assertEqual(null_counterpart(ExperimentSpec(model="B", d=2, n=10, m=5, mu=2.0, seed=1)).mu, 0.0)
		self.assertEqual(null_counterpart(ExperimentSpec(model="contiguous", d=2, n=10, gamma=3.0, seed=1)).gamma, 0.0)

	def test_study(self):
		alternative = ExperimentSpec(model="A2", d=2, n=15, reps=3, seed=9, **SMALL)
		curves = run_roc_study(null_counterpart(alternative), alternative)
		self.assertEqual(sorted(curves), ["cvm", "ks"])
		self.assertEqual(len(curves["ks"]), 20)

	def test_study_needs_matching_cells(self):
		gof = ExperimentSpec(model="A1", d=2, n=10, reps=1, seed=1, **SMALL)
		two_sample = ExperimentSpec(model="B", d=2, n=10, m=10, reps=1, seed=1, **SMALL)
		with self.assertRaises(ParameterError):
			run_roc_study(gof, two_sample)


class PowerTableTests(SimpleTestCase):
	def _cells(self):
		specs = [
			ExperimentSpec(model="A5", d=2, n=100, reps=200, seed=1),
			ExperimentSpec(model="A1", d=5, n=100, reps=200, seed=1),
			ExperimentSpec(model="A1", d=2, n=100, reps=200, seed=1),
		]
		return [(spec, _estimates(spec, rejections)) for spec, rejections in zip(specs, (150, 11, 9))]

	def test_rows_follow_sorted_keys(self):
		table = render_table(self._cells())
		self.assertEqual([row.key[:2] for row in table.rows], [("A1", 2), ("A1", 5), ("A5", 2)])
		self.assertEqual(table.rows[0].rates["ks"], 0.045)

	def test_csv(self):
		lines = render_table(self._cells()).to_csv().splitlines()
		self.assertEqual(lines[0], "model,d,n,m,mu,gamma,f0,h,KS.depth,KS.depth se,CvM.depth,CvM.depth se")
		self.assertTrue(lines[1].startswith("A1,2,100,,0.0,0.0,standard-normal,laplace,0.045,"))
		self.assertEqual(len(lines), 4)

	def test_empty_table(self):
		table = render_table([])
		self.assertEqual(table.rows, ())
		self.assertEqual(table.to_csv(), ",".join(KEY_COLUMNS) + "\n")

	def test_duplicate_rows(self):
		cells = self._cells()
		with self.assertRaises(DuplicateRowError):
			render_table(cells + cells[:1])

	def test_xlsx(self):
		workbook = load_workbook(io.BytesIO(render_table(self._cells()).to_xlsx()))
		sheet = workbook["power"]
		self.assertEqual(sheet.max_row, 4)
		self.assertEqual(sheet.cell(row=1, column=9).value, "KS.depth")
		self.assertEqual(sheet.cell(row=4, column=1).value, "A5")
		self.assertEqual(sheet.freeze_panes, "A2")

	def test_payload(self):
		payload = render_table(self._cells()).to_payload()
		self.assertEqual(payload["kind"], "power-table")
		self.assertEqual(payload["rows"][2]["model"], "A5")
		self.assertEqual(payload["rows"][2]["rates"]["cvm"], 0.75)


class ExperimentFormTests(SimpleTestCase):
	def test_valid_form(self):
		form = ExperimentForm(
			{"model": "B", "d": 3, "n": 50, "lam": 0.3, "mu": 0.2, "method": "approx", "directions": 300, "seed": 4}
		)
		self.assertTrue(form.is_valid(), form.errors)
		spec = form.to_spec()
		self.assertEqual(spec.m, 117)
		self.assertEqual(str(spec.method), "approx:300")
		self.assertEqual(spec.seed, 4)

	def test_statistics_choice(self):
		form = ExperimentForm({"model": "A1", "d": 2, "n": 20, "statistics": ["cvm"], "seed": 1})
		self.assertTrue(form.is_valid(), form.errors)
		self.assertEqual([str(value) for value in form.to_spec().statistics], ["cvm"])

	def test_level_out_of_range(self):
		form = ExperimentForm({"model": "A1", "d": 2, "n": 20, "alpha": 1.5})
		self.assertFalse(form.is_valid())
		self.assertIn("alpha", form.errors)

	def test_two_sample_needs_m_or_lam(self):
		form = ExperimentForm({"model": "B", "d": 2, "n": 20})
		self.assertFalse(form.is_valid())
		self.assertIn("__all__", form.errors)

	def test_bad_distribution_and_method(self):
		form = ExperimentForm({"model": "contiguous", "d": 2, "n": 20, "h": "gamma:2", "method": "simplicial"})
		self.assertFalse(form.is_valid())
		self.assertIn("h", form.errors)
		self.assertIn("method", form.errors)

	def test_unknown_model(self):
		self.assertFalse(ExperimentForm({"model": "Z", "d": 2, "n": 20}).is_valid())


class IllustrationTests(SimpleTestCase):
	def test_goodness_of_fit_data_are_standardized(self):
		illustration = build_illustration("gof-laplace", Rng(1))
		self.assertEqual((illustration.x.n, illustration.x.d), (100, 2))
		np.testing.assert_allclose(illustration.x.values.mean(axis=0), 0, atol=1e-12)
		np.testing.assert_allclose(np.cov(illustration.x.values, rowvar=False), np.eye(2), atol=1e-12)
		self.assertFalse(illustration.two_sample)

	def test_two_sample_sizes(self):
		illustration = build_illustration("twosample-correlated", Rng(2))
		self.assertEqual((illustration.x.n, illustration.y.n, illustration.x.d), (100, 50, 3))

	def test_high_dimension_range(self):
		with self.assertRaises(ParameterError):
			build_illustration("highdim-cauchy", Rng(3), d=10)
		self.assertEqual(build_illustration("highdim-cauchy", Rng(3), d=20).x.d, 20)

	def test_unknown_name(self):
		with self.assertRaises(ParameterError):
			build_illustration("gof-uniform", Rng(1))
		self.assertIn("twosample-skew", ILLUSTRATIONS)

	def test_records(self):
		records = run_illustration("twosample-skew", Rng(4))
		self.assertEqual(len(records), 150)
		records = run_illustration("highdim-cauchy", Rng(5), method="approx:500")
		self.assertEqual(len(records), 20)
		self.assertEqual(len(records[0].point), 15)

	def test_same_seed_same_records(self):
		self.assertEqual(run_illustration("gof-t3", Rng(6)), run_illustration("gof-t3", Rng(6)))


@unittest.skipUnless(SLOW, "Monte Carlo acceptance cells; set DDD_SLOW_TESTS=1")
class AcceptanceTests(SimpleTestCase):
	def test_size_under_normal_model(self):
		spec = ExperimentSpec(model="A1", d=2, n=100, reps=200, B=200, seed=11)
		estimates = run_gof_cell(spec, threads=4)
		self.assertEqual([e.statistic for e in estimates], ["ks", "cvm"])
		for estimate in estimates:
			self.assertGreaterEqual(estimate.rejection_rate, 0.01)
			self.assertLessEqual(estimate.rejection_rate, 0.11)

	def test_power_against_cauchy(self):
		spec = ExperimentSpec(model="A5", d=2, n=50, reps=100, B=200, seed=12)
		for estimate in run_gof_cell(spec, threads=4):
			self.assertGreaterEqual(estimate.rejection_rate, 0.9)

	def test_power_against_location_mixture(self):
		spec = ExperimentSpec(model="A2", d=2, n=50, reps=100, B=200, seed=13)
		rates = {e.statistic: e.rejection_rate for e in run_gof_cell(spec, threads=4)}
		self.assertGreaterEqual(rates["cvm"], 0.9)
		self.assertGreaterEqual(rates["ks"], 0.8)

	def test_location_shift_size_and_power(self):
		base = ExperimentSpec(model="B", d=2, n=100, m=100, mu=0.0, reps=200, B=200, seed=14)
		for estimate in run_twosample_cell(base, threads=4):
			self.assertGreaterEqual(estimate.rejection_rate, 0.01)
			self.assertLessEqual(estimate.rejection_rate, 0.12)
		shifted = ExperimentSpec(model="B", d=2, n=100, m=100, mu=1.0, reps=200, B=200, seed=15)
		for estimate in run_twosample_cell(shifted, threads=4):
			self.assertGreaterEqual(estimate.rejection_rate, 0.95)

	def test_local_power_curve_grows_with_gamma(self):
		reps, alpha = 200, 0.05
		curve = run_local_power_curve(
			[0, 2, 4, 6], "standard-normal", "laplace", n=100, reps=reps, B=200, seed=16, threads=4
		)
		self.assertEqual([gamma for gamma, _ in curve], [0.0, 2.0, 4.0, 6.0])
		for estimate in curve[0][1]:
			self.assertLessEqual(abs(estimate.rejection_rate - alpha), 3 * math.sqrt(alpha * (1 - alpha) / reps))
		for (_, previous), (_, current) in zip(curve, curve[1:]):
			for before, after in zip(previous, current):
				sigma = max(before.mc_std_error, after.mc_std_error)
				self.assertGreaterEqual(after.rejection_rate, before.rejection_rate - 2 * sigma)
