import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_array_equal

from core.distributions import sample_unit_sphere, standard_normal
from core.exceptions import ParameterError, ShapeError, UnsupportedDimensionError
from core.matrix import DataMatrix, DirectionSet
from core.rng import Rng

from .halfspace import (
	DepthEngine,
	DepthMethod,
	candidate_directions_2d,
	depth,
	depth_approx,
	depth_exact_2d,
	depth_profile,
	depth_sweep_2d,
	depth_univariate,
)

TRIANGLE = DataMatrix([[0, 0], [1, 0], [0, 1]])
DIAMOND = DataMatrix([[1, 0], [-1, 0], [0, 1], [0, -1]])

integer_points = st.lists(
	st.tuples(st.integers(-6, 6), st.integers(-6, 6)), min_size=1, max_size=25
)


def _random_instance(gen: np.random.Generator) -> tuple[DataMatrix, np.ndarray]:
	"""Muestras enteras pequeñas: empates, colineales, duplicados y consultas sobre la muestra."""

	n = int(gen.integers(1, 61))
	kind = gen.integers(0, 4)
	if kind == 0:
		points = gen.integers(-3, 4, size=(n, 2))
	elif kind == 1:
		t = gen.integers(-10, 11, size=n)
		points = np.column_stack([t, 2 * t + 1])
	elif kind == 2:
		base = gen.integers(-5, 6, size=(max(1, n // 4), 2))
		points = base[gen.integers(0, base.shape[0], size=n)]
	else:
		points = gen.integers(-20, 21, size=(n, 2))
	if gen.random() < 0.5:
		query = points[gen.integers(0, n)]
	else:
		query = gen.integers(-6, 7, size=2)
	return DataMatrix(points.astype(float)), query.astype(float)


class UnivariateDepthTests(SimpleTestCase):
	def test_examples(self):
		sample = DataMatrix([[1], [2], [3], [4], [5]])
		self.assertEqual(depth_univariate(sample, 3), 3 / 5)
		self.assertEqual(depth_univariate(sample, 1), 1 / 5)
		self.assertEqual(depth_univariate(sample, 0), 0)

	def test_matches_direct_counting_with_ties(self):
		gen = np.random.default_rng(2024)
		for _ in range(10_000):
			n = int(gen.integers(1, 15))
			values = gen.integers(-4, 5, size=n).astype(float)
			x = float(gen.integers(-5, 6))
			expected = min(np.count_nonzero(values <= x), np.count_nonzero(values >= x)) / n
			self.assertEqual(depth_univariate(DataMatrix(values[:, None]), x), expected)

	def test_needs_one_dimension(self):
		with self.assertRaises(ShapeError):
			depth_univariate(TRIANGLE, 0.0)


class PlanarDepthTests(SimpleTestCase):
	def test_examples(self):
		for engine in (depth_exact_2d, depth_sweep_2d):
			with self.subTest(engine=engine.__name__):
				self.assertEqual(engine(TRIANGLE, [0, 0]), 1 / 3)
				self.assertEqual(engine(DIAMOND, [0, 0]), 1 / 2)
				self.assertEqual(engine(TRIANGLE, [5, 5]), 0)

	def test_all_points_at_query(self):
		sample = DataMatrix([[2, 3]] * 4)
		self.assertEqual(depth_sweep_2d(sample, [2, 3]), 1)
		self.assertEqual(depth_exact_2d(sample, [2, 3]), 1)

	def test_sweep_equals_enumeration_on_randomized_instances(self):
		gen = np.random.default_rng(7)
		for trial in range(1000):
			sample, query = _random_instance(gen)
			with self.subTest(trial=trial):
				self.assertEqual(depth_sweep_2d(sample, query), depth_exact_2d(sample, query))

	def test_sweep_equals_enumeration_on_uniform_cloud(self):
		gen = np.random.default_rng(11)
		sample = DataMatrix(gen.uniform(-1, 1, size=(200, 2)))
		for query in gen.uniform(-1, 1, size=(50, 2)):
			self.assertEqual(depth_sweep_2d(sample, query), depth_exact_2d(sample, query))

	@settings(max_examples=150, deadline=None)
	@given(integer_points, st.tuples(st.integers(-7, 7), st.integers(-7, 7)))
	def test_sweep_equals_enumeration_property(self, points, query):
		sample = DataMatrix(np.array(points, dtype=float))
		self.assertEqual(depth_sweep_2d(sample, query), depth_exact_2d(sample, query))

	@settings(max_examples=100, deadline=None)
	@given(
		integer_points,
		st.tuples(st.integers(-7, 7), st.integers(-7, 7)),
		st.sampled_from([((2, 1), (1, 1)), ((1, 3), (0, -1)), ((-2, 0), (1, 3)), ((0, 1), (1, 0))]),
		st.tuples(st.integers(-5, 5), st.integers(-5, 5)),
	)
	def test_affine_invariance(self, points, query, matrix, shift):
		A = np.array(matrix, dtype=float)
		b = np.array(shift, dtype=float)
		X = np.array(points, dtype=float)
		x = np.array(query, dtype=float)
		self.assertEqual(
			depth_exact_2d(DataMatrix(X @ A.T + b), A @ x + b),
			depth_exact_2d(DataMatrix(X), x),
		)

	def test_vanishes_outside_bounding_box(self):
		sample = standard_normal(2).sample(40, Rng(3))
		far = sample.values.max(axis=0) + 1.0
		self.assertEqual(depth_exact_2d(sample, far), 0)
		self.assertEqual(depth_sweep_2d(sample, -far * 10), 0)

	def test_sample_points_have_positive_depth(self):
		sample = standard_normal(2).sample(30, Rng(5))
		for row in sample.values:
			self.assertGreaterEqual(depth_sweep_2d(sample, row), 1 / 30)


class ApproximateDepthTests(SimpleTestCase):
	def test_candidate_directions_recover_exact_depth(self):
		gen = np.random.default_rng(3)
		for _ in range(50):
			sample = DataMatrix(gen.integers(-4, 5, size=(int(gen.integers(2, 30)), 2)).astype(float))
			query = gen.integers(-4, 5, size=2).astype(float)
			dirs = candidate_directions_2d(sample, query)
			self.assertEqual(depth_approx(sample, query, dirs), depth_exact_2d(sample, query))

	def test_random_directions_stay_close_above_exact(self):
		n = 100
		sample = standard_normal(2).sample(n, Rng(1))
		dirs = sample_unit_sphere(2, 5000, Rng(2))
		queries = standard_normal(2).sample(100, Rng(3)).values
		gaps = np.array([depth_approx(sample, q, dirs) - depth_exact_2d(sample, q) for q in queries])
		self.assertTrue(np.all(gaps >= 0))
		self.assertGreaterEqual(np.mean(gaps <= 2 / n), 0.95)

	def test_origin_gap_for_gaussian_sample(self):
		sample = standard_normal(2).sample(100, Rng(10))
		gap = depth_approx(sample, [0, 0], sample_unit_sphere(2, 5000, Rng(20))) - depth_exact_2d(sample, [0, 0])
		self.assertGreaterEqual(gap, 0)
		self.assertLessEqual(gap, 2 / 100)

	def test_nested_direction_sets_are_monotone(self):
		sample = standard_normal(2).sample(60, Rng(4))
		small = sample_unit_sphere(2, 20, Rng(5))
		large = small.union(sample_unit_sphere(2, 200, Rng(6)))
		for query in standard_normal(2).sample(20, Rng(7)).values:
			exact = depth_exact_2d(sample, query)
			coarse = depth_approx(sample, query, small)
			fine = depth_approx(sample, query, large)
			self.assertLessEqual(fine, coarse)
			self.assertGreaterEqual(fine, exact)

	def test_direction_dimension_must_match(self):
		with self.assertRaises(ShapeError):
			depth_approx(TRIANGLE, [0, 0], DirectionSet([[1.0, 0.0, 0.0]]))


class DispatchTests(SimpleTestCase):
	def test_univariate_route(self):
		sample = DataMatrix([[1], [2], [3], [4], [5]])
		self.assertEqual(DepthEngine.build("auto", 1, None).route, "univariate")
		self.assertEqual(depth(sample, [3]), 3 / 5)

	def test_exact_in_three_dimensions_is_unsupported(self):
		sample = standard_normal(3).sample(10, Rng(1))
		with self.assertRaises(UnsupportedDimensionError):
			depth(sample, [0, 0, 0], "exact", Rng(1))

	def test_auto_in_two_dimensions_is_exact(self):
		sample = standard_normal(2).sample(40, Rng(2))
		for query in sample.values[:10]:
			self.assertEqual(depth(sample, query), depth_exact_2d(sample, query))

	def test_approx_needs_rng(self):
		with self.assertRaises(ParameterError):
			DepthEngine.build("approx", 2, None)

	def test_method_parsing(self):
		method = DepthMethod.parse("approx:300")
		self.assertEqual((method.kind, method.direction_count), ("approx", 300))
		self.assertEqual(str(method), "approx:300")
		with self.assertRaises(ParameterError):
			DepthMethod.parse("simplicial")


class ProfileTests(SimpleTestCase):
	def test_triangle_profile(self):
		assert_array_equal(depth_profile(TRIANGLE, TRIANGLE), [1 / 3, 1 / 3, 1 / 3])

	def test_empty_profile(self):
		self.assertEqual(len(depth_profile(TRIANGLE, np.zeros((0, 2)))), 0)

	def test_batch_matches_pointwise_sweep(self):
		sample = standard_normal(2).sample(80, Rng(8))
		queries = standard_normal(2).sample(30, Rng(9)).values
		expected = [depth_sweep_2d(sample, q) for q in queries]
		assert_array_equal(depth_profile(sample, queries), expected)

	def test_shared_directions_in_higher_dimension(self):
		sample = standard_normal(4).sample(50, Rng(10))
		queries = standard_normal(4).sample(12, Rng(11)).values
		profile = depth_profile(sample, queries, "approx:500", Rng(12))
		pointwise = [depth(sample, q, "approx:500", Rng(12)) for q in queries]
		assert_array_equal(profile, pointwise)

	def test_thread_count_does_not_change_values(self):
		sample = standard_normal(3).sample(70, Rng(13))
		queries = standard_normal(3).sample(41, Rng(14)).values
		engine = DepthEngine.build("approx:800", 3, Rng(15))
		assert_array_equal(engine.values(sample, queries, threads=1), engine.values(sample, queries, threads=4))
