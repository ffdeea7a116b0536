import math
import os
import unittest

import numpy as np
from django.test import SimpleTestCase
from scipy import stats

from core.distributions import Normal, standard_normal
from core.exceptions import ParameterError, ShapeError
from core.matrix import DataMatrix
from core.rng import Rng, Stream

from .bootstrap import GofSpec, TestResult, TwoSampleSpec, gof_test, p_value, run_gof, run_twosample, twosample_test
from .choices import EvalGrid, Statistic
from .statistics import gof_statistic_cvm, gof_statistic_ks, ts_statistic_cvm, ts_statistic_ks

SLOW = os.getenv("DDD_SLOW_TESTS") == "1"

X_TRIANGLE = DataMatrix([[0, 0], [1, 0], [0, 1]])
Y_TRIANGLE = DataMatrix([[2, 2], [3, 2], [2, 3]])
POOLED = np.vstack([X_TRIANGLE.values, Y_TRIANGLE.values])


def _small_gof_spec(**overrides) -> GofSpec:
	options = {"f0": standard_normal(2), "M": 40, "B": 30, "n_ref": 300, "seed": 17}
	options.update(overrides)
	return GofSpec(**options)


class StatisticTests(SimpleTestCase):
	def test_two_sample_triangles(self):
		self.assertAlmostEqual(ts_statistic_cvm(X_TRIANGLE, Y_TRIANGLE), 2 / 3, places=12)
		self.assertAlmostEqual(ts_statistic_ks(X_TRIANGLE, Y_TRIANGLE, POOLED), math.sqrt(6) / 3, places=12)

	def test_goodness_of_fit_against_fixed_reference(self):
		self.assertAlmostEqual(gof_statistic_ks(X_TRIANGLE, None, POOLED, Y_TRIANGLE), math.sqrt(3) / 3, places=12)
		self.assertAlmostEqual(gof_statistic_cvm(X_TRIANGLE, None, POOLED, Y_TRIANGLE), 1 / 3, places=12)

	def test_empty_grid(self):
		with self.assertRaises(ShapeError):
			gof_statistic_ks(X_TRIANGLE, None, np.zeros((0, 2)), Y_TRIANGLE)
		with self.assertRaises(ShapeError):
			ts_statistic_ks(X_TRIANGLE, Y_TRIANGLE, [])

	def test_dimension_mismatch(self):
		with self.assertRaises(ShapeError):
			ts_statistic_cvm(X_TRIANGLE, DataMatrix([[1.0, 2.0, 3.0]]))
		with self.assertRaises(ShapeError):
			gof_statistic_cvm(X_TRIANGLE, standard_normal(3), POOLED, Y_TRIANGLE)

	def test_identical_samples(self):
		x = standard_normal(2).sample(20, Rng(1))
		self.assertEqual(ts_statistic_cvm(x, x), 0)
		self.assertEqual(ts_statistic_ks(x, x, x.values), 0)

	def test_symmetry(self):
		x = standard_normal(2).sample(12, Rng(2))
		y = standard_normal(2).sample(9, Rng(3))
		grid = np.vstack([x.values, y.values])
		self.assertEqual(ts_statistic_cvm(x, y), ts_statistic_cvm(y, x))
		self.assertEqual(ts_statistic_ks(x, y, grid), ts_statistic_ks(y, x, grid))

	def test_duplicated_rows_double_cvm(self):
		x = standard_normal(2).sample(10, Rng(4))
		y = standard_normal(2).sample(8, Rng(5))
		self.assertEqual(ts_statistic_cvm(x.stack(x), y.stack(y)), 2 * ts_statistic_cvm(x, y))


class PValueTests(SimpleTestCase):
	def test_strict_exceedance(self):
		self.assertEqual(p_value(1.0, [1.0, 2.0, 0.5, 1.0]), 1 / 4)

	def test_corrected(self):
		self.assertEqual(p_value(1.0, [1.0, 2.0, 0.5, 1.0], corrected=True), 2 / 5)

	def test_bounds(self):
		self.assertEqual(p_value(10.0, [1.0, 2.0]), 0)
		self.assertEqual(p_value(-1.0, [0.0, 2.0]), 1)

	def test_needs_replicates(self):
		with self.assertRaises(ParameterError):
			p_value(1.0, [])


class SpecTests(SimpleTestCase):
	def test_zero_evaluation_points(self):
		with self.assertRaises(ParameterError):
			GofSpec(standard_normal(2), M=0)
		with self.assertRaises(ParameterError):
			TwoSampleSpec(B=0)

	def test_unknown_statistic(self):
		with self.assertRaises(ParameterError):
			TwoSampleSpec(statistic="ad")

	def test_defaults_and_seed(self):
		spec = TwoSampleSpec()
		self.assertEqual(spec.statistic, Statistic.KS)
		self.assertEqual(spec.eval_grid, EvalGrid.SPHERE)
		self.assertIsInstance(spec.seed, int)

	def test_echo(self):
		echo = _small_gof_spec(statistic="cvm").echo()
		self.assertEqual(echo["test"], "goodness-of-fit")
		self.assertEqual(echo["statistic"], "cvm")
		self.assertEqual(echo["seed"], 17)
		self.assertEqual(echo["f0"]["family"], standard_normal(2).describe()["family"])


class GofTestTests(SimpleTestCase):
	def test_result_fields(self):
		x = standard_normal(2).sample(25, Rng(6))
		result = gof_test(x, _small_gof_spec())
		self.assertIsInstance(result, TestResult)
		self.assertEqual(result.statistic, "ks")
		self.assertEqual(len(result.replicates), 30)
		self.assertGreaterEqual(result.p_value, 0)
		self.assertLessEqual(result.p_value, 1)
		self.assertEqual(result.spec["seed"], 17)
		self.assertEqual(TestResult.from_payload(result.to_payload()), result)

	def test_same_seed_same_result(self):
		x = standard_normal(2).sample(25, Rng(7))
		first = run_gof(x, _small_gof_spec(), statistics=("ks", "cvm"))
		second = run_gof(x, _small_gof_spec(), statistics=("ks", "cvm"))
		self.assertEqual(first, second)

	def test_thread_count_does_not_change_result(self):
		x = standard_normal(2).sample(25, Rng(8))
		serial = run_gof(x, _small_gof_spec(), statistics=("ks", "cvm"), threads=1)
		threaded = run_gof(x, _small_gof_spec(), statistics=("ks", "cvm"), threads=4)
		self.assertEqual(serial, threaded)

	def test_pooled_grid(self):
		x = standard_normal(2).sample(20, Rng(9))
		result = gof_test(x, _small_gof_spec(eval_grid="pooled"))
		self.assertEqual(result.spec["eval_grid"], "pooled")

	def test_shifted_data_is_rejected(self):
		x = Normal([3.0, 3.0], np.eye(2)).sample(30, Rng(10))
		result = gof_test(x, _small_gof_spec(statistic="cvm"))
		self.assertEqual(result.p_value, 0)

	def test_null_dimension_must_match(self):
		with self.assertRaises(ShapeError):
			gof_test(X_TRIANGLE, _small_gof_spec(f0=standard_normal(3)))

	def test_approximate_depth_in_three_dimensions(self):
		x = standard_normal(3).sample(15, Rng(11))
		result = gof_test(x, _small_gof_spec(f0=standard_normal(3), method="approx:200", B=10))
		self.assertEqual(result.spec["method"], "approx:200")


class TwoSampleTestTests(SimpleTestCase):
	def test_identical_samples(self):
		x = standard_normal(2).sample(15, Rng(12))
		results = run_twosample(x, x, TwoSampleSpec(M=30, B=40, seed=5), statistics=("ks", "cvm"))
		for result in results.values():
			self.assertEqual(result.statistic_value, 0)
			expected = np.count_nonzero(np.array(result.replicates) > 0) / 40
			self.assertEqual(result.p_value, expected)

	def test_separated_samples(self):
		x = standard_normal(2).sample(20, Rng(13))
		y = Normal([4.0, 4.0], np.eye(2)).sample(20, Rng(14))
		result = twosample_test(x, y, TwoSampleSpec(statistic="cvm", B=30, seed=6))
		self.assertEqual(result.p_value, 0)

	def test_degenerate_pool_falls_back_to_unit_sphere(self):
		x = DataMatrix([[0, 0], [1, 1], [2, 2]])
		y = DataMatrix([[3, 3], [4, 4]])
		with self.assertLogs("inference.bootstrap", "WARNING"):
			result = twosample_test(x, y, TwoSampleSpec(M=20, B=10, seed=7))
		self.assertGreaterEqual(result.statistic_value, 0)

	def test_thread_count_does_not_change_result(self):
		x = standard_normal(2).sample(12, Rng(15))
		y = standard_normal(2).sample(10, Rng(16))
		spec = TwoSampleSpec(M=30, B=25, seed=8)
		self.assertEqual(
			run_twosample(x, y, spec, statistics=("ks", "cvm"), threads=1),
			run_twosample(x, y, spec, statistics=("ks", "cvm"), threads=3),
		)

	def test_dimension_mismatch(self):
		with self.assertRaises(ShapeError):
			twosample_test(X_TRIANGLE, DataMatrix([[1.0, 2.0, 3.0]]), TwoSampleSpec(B=5, M=5))


@unittest.skipUnless(SLOW, "Monte Carlo size study; set DDD_SLOW_TESTS=1")
class NullSizeTests(SimpleTestCase):
	def test_gof_size_under_null(self):
		null = standard_normal(2)
		root = Rng(2024)
		rejections = 0
		for r in range(100):
			x = null.sample(50, root.spawn(r, 1))
			result = gof_test(x, GofSpec(null, M=200, B=100, n_ref=1000, seed=r))
			rejections += result.p_value <= 0.05
		self.assertLessEqual(rejections / 100, 0.12)

	def test_two_sample_p_values_are_uniform_under_null(self):
		null = standard_normal(2)
		root = Rng(2025)
		p_values = {"ks": [], "cvm": []}
		for r in range(200):
			repeat = root.spawn(Stream.REPEAT, r)
			x = null.sample(50, repeat.spawn(Stream.DATA))
			y = null.sample(50, repeat.spawn(Stream.SECOND_SAMPLE))
			results = run_twosample(x, y, TwoSampleSpec(M=200, B=200, seed=r), statistics=("ks", "cvm"), rng=repeat)
			for statistic, result in results.items():
				p_values[str(statistic)].append(result.p_value)
		for statistic, sample in p_values.items():
			with self.subTest(statistic=statistic):
				self.assertLessEqual(stats.kstest(sample, "uniform").statistic, 0.12)
