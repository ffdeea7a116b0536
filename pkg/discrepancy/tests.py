import math
import os
import unittest

import numpy as np
from django.test import SimpleTestCase

from core.distributions import Empirical, standard_normal
from core.exceptions import InsufficientDataError, ParameterError, ShapeError
from core.matrix import DataMatrix
from core.rng import Rng, Stream
from depth.halfspace import DepthEngine

from .records import DddRecord, bootstrap_band, ddd_gof, ddd_twosample, two_sigma_band

SLOW = os.getenv("DDD_SLOW_TESTS") == "1"

X_TRIANGLE = DataMatrix([[0, 0], [1, 0], [0, 1]])
Y_TRIANGLE = DataMatrix([[2, 2], [3, 2], [2, 3]])


class RecordTests(SimpleTestCase):
	def test_outside_flag(self):
		record = DddRecord(0, (0.0, 0.0), 0.5, 0.2, 0.1)
		self.assertAlmostEqual(record.ddd, 0.3)
		self.assertTrue(record.outside)
		self.assertFalse(DddRecord(1, (0.0,), 0.3, 0.3, 0.0).outside)

	def test_negative_band_rejected(self):
		with self.assertRaises(ParameterError):
			DddRecord(0, (0.0,), 0.1, 0.1, -0.5)


class TwoSigmaBandTests(SimpleTestCase):
	def test_one_sample(self):
		self.assertAlmostEqual(two_sigma_band(0.25, 100), 2 * math.sqrt(0.001875), places=12)
		self.assertAlmostEqual(two_sigma_band(0.25, 100), 0.086603, places=6)

	def test_zero_depth(self):
		self.assertEqual(two_sigma_band(0.0, 37), 0.0)

	def test_two_sample(self):
		self.assertAlmostEqual(two_sigma_band(0.25, 100, 100), 0.122474, places=6)

	def test_sizes_must_be_positive(self):
		with self.assertRaises(ParameterError):
			two_sigma_band(0.2, 0)


class GofRecordTests(SimpleTestCase):
	def test_records_follow_input_order(self):
		x = standard_normal(2).sample(25, Rng(1))
		records = ddd_gof(x, standard_normal(2), n_ref=500, rng=Rng(2))
		self.assertEqual([r.index for r in records], list(range(25)))
		self.assertEqual(records[4].point, tuple(x.row(4)))

	def test_empirical_null_gives_zero_discrepancy(self):
		x = standard_normal(2).sample(30, Rng(3))
		records = ddd_gof(x, Empirical(x), rng=Rng(4))
		self.assertTrue(all(r.ddd == 0 for r in records))

	def test_most_points_inside_band_under_null(self):
		x = standard_normal(2).sample(100, Rng(5))
		records = ddd_gof(x, standard_normal(2), rng=Rng(6))
		self.assertGreaterEqual(np.mean([not r.outside for r in records]), 0.9)

	def test_empty_sample(self):
		with self.assertRaises(InsufficientDataError):
			ddd_gof(np.zeros((0, 2)), standard_normal(2), rng=Rng(1))

	def test_dimension_mismatch(self):
		with self.assertRaises(ShapeError):
			ddd_gof(X_TRIANGLE, standard_normal(3), rng=Rng(1))

	def test_bootstrap_band(self):
		x = standard_normal(2).sample(40, Rng(7))
		records = ddd_gof(x, standard_normal(2), n_ref=400, rng=Rng(8), band="bootstrap", band_resamples=30)
		self.assertTrue(all(r.band_halfwidth >= 0 for r in records))
		self.assertTrue(any(r.band_halfwidth > 0 for r in records))

	def test_unknown_band(self):
		with self.assertRaises(ParameterError):
			ddd_gof(X_TRIANGLE, standard_normal(2), rng=Rng(1), band="three-sigma")

	@unittest.skipUnless(SLOW, "Monte Carlo coverage study; set DDD_SLOW_TESTS=1")
	def test_mean_outside_fraction_under_null(self):
		null = standard_normal(2)
		root = Rng(31)
		fractions = []
		for r in range(200):
			repeat = root.spawn(Stream.REPEAT, r)
			records = ddd_gof(null.sample(100, repeat.spawn(Stream.DATA)), null, n_ref=2000, rng=repeat)
			fractions.append(np.mean([record.outside for record in records]))
		self.assertLessEqual(np.mean(fractions), 0.15)


class TwoSampleRecordTests(SimpleTestCase):
	def test_identical_samples(self):
		x = standard_normal(2).sample(20, Rng(9))
		records = ddd_twosample(x, x, rng=Rng(1))
		self.assertEqual(len(records), 40)
		self.assertTrue(all(r.ddd == 0 and not r.outside for r in records))

	def test_separated_triangles(self):
		records = ddd_twosample(X_TRIANGLE, Y_TRIANGLE, rng=Rng(1))
		self.assertEqual([r.ddd for r in records], [1 / 3] * 3 + [-1 / 3] * 3)
		self.assertEqual(records[3].point, (2.0, 2.0))

	def test_dimension_mismatch(self):
		with self.assertRaises(ShapeError):
			ddd_twosample(X_TRIANGLE, DataMatrix([[1.0, 2.0, 3.0]]), rng=Rng(1))

	def test_antisymmetry(self):
		x = standard_normal(2).sample(15, Rng(10))
		y = standard_normal(2).sample(12, Rng(11))
		forward = {r.point: r.ddd for r in ddd_twosample(x, y, rng=Rng(1))}
		backward = {r.point: r.ddd for r in ddd_twosample(y, x, rng=Rng(1))}
		for point, value in forward.items():
			self.assertEqual(backward[point], -value)

	def test_boundedness(self):
		x = standard_normal(2).sample(25, Rng(12))
		y = standard_normal(2).sample(25, Rng(13))
		for record in ddd_twosample(x, y, rng=Rng(1)):
			self.assertLessEqual(abs(record.ddd), max(record.depth_a, record.depth_b))

	def test_bootstrap_band_in_higher_dimension(self):
		x = standard_normal(3).sample(15, Rng(14))
		y = standard_normal(3).sample(10, Rng(15))
		engine = DepthEngine.build("approx:300", 3, Rng(16))
		pooled = np.vstack([x.values, y.values])
		band = bootstrap_band(x, engine, pooled, None, Rng(17), 20, y=y)
		self.assertEqual(band.shape, (25,))
		with self.assertRaises(ParameterError):
			bootstrap_band(x, engine, pooled, None, Rng(17), 1, y=y)
