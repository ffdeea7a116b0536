import importlib

import numpy as np
from django.test import SimpleTestCase, override_settings
from hypothesis import HealthCheck, assume, given, settings, strategies as st
from hypothesis.extra.numpy import arrays
from numpy.testing import assert_allclose, assert_array_equal

from .conf import default_reference_size, get_default
from .distributions import (
	Cauchy,
	Empirical,
	Mixture,
	Normal,
	SkewNormal,
	StandardLaplace,
	StudentT,
	contiguous_mixture,
	sample,
	sample_unit_sphere,
	skew_normal_params,
	standard_normal,
)
from .exceptions import InsufficientDataError, NonInvertibleScatterError, ParameterError, ShapeError
from .matrix import DataMatrix, DirectionSet, column_mean, sample_covariance, standardize
from .nullspec import parse_distribution
from .parallel import ordered_map
from .rng import Rng, Stream

TRIANGLE = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)]


class DataMatrixTests(SimpleTestCase):
	def test_rejects_non_finite_entries(self):
		with self.assertRaises(ShapeError):
			DataMatrix([[1.0, float("nan")]])
		with self.assertRaises(ShapeError):
			DataMatrix([[float("inf"), 0.0]])

	def test_rejects_empty_and_flat_tables(self):
		with self.assertRaises(ShapeError):
			DataMatrix(np.zeros((0, 2)))
		with self.assertRaises(ShapeError):
			DataMatrix([1.0, 2.0])

	def test_values_are_read_only_copies(self):
		source = np.array([[1.0, 2.0]])
		matrix = DataMatrix(source)
		source[0, 0] = 9.0
		self.assertEqual(matrix.row(0)[0], 1.0)
		with self.assertRaises(ValueError):
			matrix.values[0, 0] = 3.0

	def test_row_is_total_on_valid_indices(self):
		matrix = DataMatrix.from_rows(TRIANGLE)
		assert_array_equal(matrix.row(2), [0.0, 1.0])
		with self.assertRaises(IndexError):
			matrix.row(3)

	def test_labels_must_match_columns(self):
		with self.assertRaises(ShapeError):
			DataMatrix([[1.0, 2.0]], labels=("a",))


class DirectionSetTests(SimpleTestCase):
	def test_rejects_non_unit_rows(self):
		with self.assertRaises(ShapeError):
			DirectionSet([[1.0, 1.0]])

	def test_normalized_and_union(self):
		dirs = DirectionSet.normalized([[3.0, 4.0]]).union(DirectionSet([[0.0, 1.0]]))
		self.assertEqual(dirs.M, 2)
		assert_allclose(dirs.directions[0], [0.6, 0.8])


class MomentTests(SimpleTestCase):
	def test_column_mean(self):
		assert_allclose(column_mean(DataMatrix([[0, 0], [2, 2]])), [1, 1])
		assert_allclose(column_mean(DataMatrix.from_rows(TRIANGLE)), [1 / 3, 1 / 3])
		assert_array_equal(column_mean(DataMatrix([[5, -3]])), [5, -3])

	def test_sample_covariance_of_triangle(self):
		covariance = sample_covariance(DataMatrix.from_rows(TRIANGLE))
		assert_allclose(covariance, [[1 / 3, -1 / 6], [-1 / 6, 1 / 3]])

	def test_sample_covariance_accepts_singular(self):
		assert_allclose(sample_covariance(DataMatrix([[0, 0], [2, 2]])), [[2, 2], [2, 2]])

	def test_sample_covariance_needs_two_rows(self):
		with self.assertRaises(InsufficientDataError):
			sample_covariance(DataMatrix([[1.0, 2.0]]))

	def test_sample_covariance_is_exactly_symmetric(self):
		values = Normal(np.zeros(4), np.eye(4)).sample(37, Rng(5)).values * [1.0, 3.7, 1e-3, 11.0]
		covariance = sample_covariance(DataMatrix(values))
		assert_array_equal(covariance, covariance.T)


class StandardizeTests(SimpleTestCase):
	def test_triangle_becomes_identity(self):
		standardized, params = standardize(DataMatrix.from_rows(TRIANGLE))
		assert_allclose(column_mean(standardized), [0, 0], atol=1e-8)
		assert_allclose(sample_covariance(standardized), np.eye(2), atol=1e-8)
		assert_allclose(params.whitener @ params.covariance @ params.whitener.T, np.eye(2), atol=1e-8)

	def test_singular_scatter_reports_smallest_eigenvalue(self):
		with self.assertRaises(NonInvertibleScatterError) as caught:
			standardize(DataMatrix([[0, 0], [2, 2]]))
		self.assertLess(abs(caught.exception.smallest_eigenvalue), 1e-8)
		self.assertIn("eigenvalue", str(caught.exception))

	def test_restore_inverts_apply(self):
		x = StudentT(np.zeros(3), np.eye(3), 4).sample(50, Rng(3))
		standardized, params = standardize(x)
		assert_allclose(params.restore(standardized.values), x.values, atol=1e-10)

	@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.filter_too_much, HealthCheck.too_slow])
	@given(arrays(np.float64, st.tuples(st.integers(6, 25), st.just(2)), elements=st.floats(-50, 50)))
	def test_standardize_twice_keeps_identity_covariance(self, values):
		covariance = np.cov(values, rowvar=False)
		assume(np.linalg.eigvalsh(covariance).min() > 1e-2)
		once, _ = standardize(DataMatrix(values))
		twice, _ = standardize(once)
		assert_allclose(sample_covariance(twice), np.eye(2), atol=1e-8)
		assert_allclose(column_mean(twice), [0, 0], atol=1e-8)


class RngTests(SimpleTestCase):
	def test_same_path_same_numbers(self):
		first = Rng(42).spawn(Stream.BOOTSTRAP, 3).generator().standard_normal(5)
		second = Rng(42).spawn(Stream.BOOTSTRAP, 3).generator().standard_normal(5)
		assert_array_equal(first, second)

	def test_sibling_streams_differ(self):
		first = Rng(42).spawn(Stream.BOOTSTRAP, 3).generator().standard_normal(5)
		second = Rng(42).spawn(Stream.BOOTSTRAP, 4).generator().standard_normal(5)
		self.assertFalse(np.array_equal(first, second))

	def test_seed_must_fit_u64(self):
		with self.assertRaises(ParameterError):
			Rng(-1)
		with self.assertRaises(ParameterError):
			Rng(2**64)
		Rng(2**64 - 1)

	def test_entropy_seed_is_reported(self):
		rng = Rng.entropy()
		self.assertEqual(rng.provenance()["seed"], rng.seed)
		self.assertEqual(rng.provenance()["bit_generator"], "Philox")


class DistributionTests(SimpleTestCase):
	def test_normal_moments(self):
		draws = standard_normal(2).sample(100_000, Rng(11)).values
		self.assertTrue(np.all(np.abs(draws.mean(axis=0)) < 0.02))
		assert_allclose(np.cov(draws, rowvar=False), np.eye(2), atol=0.03)

	def test_correlated_normal_covariance(self):
		scatter = np.array([[2.0, 0.6], [0.6, 1.0]])
		draws = Normal([1.0, -1.0], scatter).sample(100_000, Rng(12)).values
		assert_allclose(np.cov(draws, rowvar=False), scatter, atol=0.03)

	def test_laplace_radius_has_gamma_mean(self):
		draws = StandardLaplace(2).sample(100_000, Rng(13)).values
		self.assertAlmostEqual(np.linalg.norm(draws, axis=1).mean(), 2.0, delta=0.03)

	def test_cauchy_aliases_student_t_with_one_dof(self):
		rng = Rng(7).spawn(Stream.DATA)
		cauchy = Cauchy(np.zeros(2), np.eye(2)).sample(25, rng)
		student = StudentT(np.zeros(2), np.eye(2), 1.0).sample(25, rng)
		self.assertEqual(cauchy, student)

	def test_degenerate_mixture_matches_its_component(self):
		a = Normal([0.0, 0.0], np.eye(2))
		b = Normal([5.0, 5.0], np.eye(2))
		rng = Rng(9)
		self.assertEqual(Mixture((1.0, 0.0), (a, b)).sample(40, rng), a.sample(40, rng))

	def test_mixture_weights_validated(self):
		normal = standard_normal(2)
		with self.assertRaises(ParameterError):
			Mixture((0.5, 0.6), (normal, normal))
		with self.assertRaises(ShapeError):
			Mixture((0.5, 0.5), (normal, standard_normal(3)))

	def test_invalid_scatter_fails_before_drawing(self):
		with self.assertRaises(ParameterError):
			Normal([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])
		with self.assertRaises(ParameterError):
			StudentT([0.0], [[1.0]], 0.0)

	def test_empirical_draws_rows_of_its_data(self):
		data = DataMatrix.from_rows(TRIANGLE)
		draws = Empirical(data).sample(30, Rng(1)).values
		self.assertTrue(all(tuple(row) in TRIANGLE for row in draws))

	def test_sample_function_draws_from_the_distribution(self):
		draws = sample(standard_normal(2), 10, Rng(1))
		self.assertIsInstance(draws, DataMatrix)
		self.assertEqual((draws.n, draws.d), (10, 2))
		self.assertEqual(draws, standard_normal(2).sample(10, Rng(1)))
		with self.assertRaises(ParameterError):
			sample(standard_normal(2), 0, Rng(1))

	def test_same_seed_same_sample_for_every_family(self):
		families = [
			standard_normal(2),
			StudentT(np.zeros(2), np.eye(2), 3),
			StandardLaplace(2),
			SkewNormal([0.5, 0.5], np.eye(2)),
			contiguous_mixture(standard_normal(2), StandardLaplace(2), 2.0, 100),
		]
		for family in families:
			self.assertEqual(family.sample(20, Rng(99)), family.sample(20, Rng(99)))


class SkewNormalTests(SimpleTestCase):
	def test_zero_skewness_is_standard_normal(self):
		alpha, omega = skew_normal_params([0, 0, 0], np.eye(3))
		assert_allclose(alpha, 0)
		assert_allclose(omega, np.eye(3))

	def test_equal_skewness(self):
		alpha, omega = skew_normal_params([0.9, 0.9, 0.9], np.eye(3))
		assert_allclose(np.diag(omega), 1.0, atol=1e-10)
		self.assertTrue(np.all(alpha > 0))
		assert_allclose(alpha, alpha[0])

	def test_invalid_parameters(self):
		with self.assertRaises(ParameterError):
			skew_normal_params([1.0, 0.0, 0.0], np.eye(3))
		with self.assertRaises(ParameterError):
			skew_normal_params([0.1, 0.1, 0.1], [[1, 0.2, 0], [0.1, 1, 0], [0, 0, 1]])

	def test_density_integrates_to_one(self):
		distribution = SkewNormal([0.9, 0.9, 0.9], np.eye(3))
		axis = np.arange(-6.0, 6.0, 0.25) + 0.125
		grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
		self.assertAlmostEqual(distribution.pdf(grid).sum() * 0.25**3, 1.0, delta=0.02)

	def test_sample_mean_converges_to_selection_mean(self):
		distribution = SkewNormal([0.9, 0.9, 0.9], np.eye(3))
		draws = distribution.sample(100_000, Rng(21)).values
		self.assertTrue(np.all(draws.mean(axis=0) > 0))
		assert_allclose(draws.mean(axis=0), distribution.expected_mean(), atol=0.02)


class SphereAndMixtureTests(SimpleTestCase):
	def test_sphere_norms(self):
		dirs = sample_unit_sphere(3, 1000, Rng(4))
		assert_allclose(np.linalg.norm(dirs.directions, axis=1), 1.0, atol=1e-12)

	def test_zero_sphere(self):
		dirs = sample_unit_sphere(1, 4, Rng(4))
		self.assertTrue(set(dirs.directions[:, 0]) <= {-1.0, 1.0})

	def test_circle_angles_are_uniform(self):
		M = 100_000
		dirs = sample_unit_sphere(2, M, Rng(8)).directions
		angles = np.arctan2(dirs[:, 1], dirs[:, 0])
		counts, _ = np.histogram(angles, bins=12, range=(-np.pi, np.pi))
		sigma = np.sqrt(M * (1 / 12) * (11 / 12))
		self.assertTrue(np.all(np.abs(counts - M / 12) < 4 * sigma))

	def test_contiguous_weights(self):
		mixture = contiguous_mixture(standard_normal(2), StandardLaplace(2), 2.0, 100)
		assert_allclose(mixture.weights, [0.8, 0.2])

	def test_contiguous_weight_above_one(self):
		with self.assertRaises(ParameterError):
			contiguous_mixture(standard_normal(2), StandardLaplace(2), 11.0, 100)

	def test_zero_gamma_reproduces_null(self):
		null = standard_normal(2)
		mixture = contiguous_mixture(null, StandardLaplace(2), 0.0, 100)
		self.assertEqual(mixture.sample(50, Rng(6)), null.sample(50, Rng(6)))


class NullSpecTests(SimpleTestCase):
	def test_named_families(self):
		self.assertIsInstance(parse_distribution("standard-normal", 2), Normal)
		self.assertIsInstance(parse_distribution("cauchy", 3), Cauchy)
		self.assertIsInstance(parse_distribution("laplace", 2), StandardLaplace)
		self.assertEqual(parse_distribution("t:3", 2).dof, 3.0)

	def test_normal_with_parameters(self):
		normal = parse_distribution("normal:1,2:2,0.5,0.5,1", 2)
		assert_array_equal(normal.mean, [1, 2])
		assert_array_equal(normal.scatter, [[2, 0.5], [0.5, 1]])

	def test_mixture(self):
		mixture = parse_distribution("mixture:0.8*standard-normal+0.2*normal:5,5:1,0,0,1", 2)
		assert_allclose(mixture.weights, [0.8, 0.2])
		assert_array_equal(mixture.components[1].mean, [5, 5])

	def test_mixture_weights_with_exponents(self):
		single = parse_distribution("mixture:1e+0*standard-normal", 2)
		assert_allclose(single.weights, [1.0])
		self.assertEqual(len(single.components), 1)
		pair = parse_distribution("mixture:0.5*laplace+5e-1*cauchy", 2)
		assert_allclose(pair.weights, [0.5, 0.5])
		self.assertIsInstance(pair.components[0], StandardLaplace)
		self.assertIsInstance(pair.components[1], Cauchy)

	def test_rejects_unknown_and_malformed(self):
		for text in ("gumbel", "normal:1:1", "t:x", "mixture:standard-normal", "skew-normal:0.5"):
			with self.subTest(text=text), self.assertRaises(ParameterError):
				parse_distribution(text, 2)


class ConfTests(SimpleTestCase):
	@override_settings(DDD_DEFAULTS={"BOOTSTRAP": 17})
	def test_settings_override_builtin_defaults(self):
		self.assertEqual(get_default("BOOTSTRAP"), 17)
		self.assertEqual(get_default("DIRECTIONS"), 5000)

	@override_settings(DDD_DEFAULTS={"REF_FACTOR": 10, "REF_FLOOR": 5000})
	def test_reference_size(self):
		self.assertEqual(default_reference_size(100), 5000)
		self.assertEqual(default_reference_size(800), 8000)

	def test_settings_carry_no_web_configuration(self):
		module = importlib.import_module("ddd_site.settings")
		for name in ("DATABASES", "SECRET_KEY", "ALLOWED_HOSTS", "DEFAULT_AUTO_FIELD"):
			self.assertFalse(hasattr(module, name), name)
		self.assertIn("DDD_DEFAULTS", vars(module))

	def test_unknown_setting(self):
		with self.assertRaises(KeyError):
			get_default("COLOR")


class OrderedMapTests(SimpleTestCase):
	def test_order_is_preserved_across_threads(self):
		self.assertEqual(ordered_map(lambda value: value * value, range(50), threads=4), [v * v for v in range(50)])
		self.assertEqual(ordered_map(str, [], threads=4), [])
