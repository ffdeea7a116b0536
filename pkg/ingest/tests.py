import io
import json
import math
import os
import tempfile
import unittest
from pathlib import Path

import numpy as np
from django.core.management import CommandError, call_command
from django.test import SimpleTestCase

from core.exceptions import CsvParseError, InsufficientDataError, ParameterError
from discrepancy.records import DddRecord

from .cli import USAGE, cli_main
from .datasets import BUNDLED_FILES
from .documents import ResultDocument
from .readers import read_csv, read_csv_text
from .writers import write_ddd_csv, write_ddd_svg

SLOW = os.getenv("DDD_SLOW_TESTS") == "1"

TRIANGLE_CSV = "0,0\n1,0\n0,1\n"
GAUSSIAN_ROWS = np.random.default_rng(12).standard_normal((20, 2))


class ReaderTests(SimpleTestCase):
	def test_plain_rows(self):
		sample = read_csv_text("1,2\n3,4\n\n5,6\n")
		self.assertEqual((sample.n, sample.d), (3, 2))
		self.assertEqual(sample.row(2).tolist(), [5.0, 6.0])

	def test_header(self):
		sample = read_csv_text("sepal,petal\n1.5,2\n", has_header=True)
		self.assertEqual(sample.labels, ("sepal", "petal"))
		self.assertEqual(sample.n, 1)

	def test_ragged_row(self):
		with self.assertRaises(CsvParseError) as raised:
			read_csv_text("1,2\n3\n")
		self.assertEqual(raised.exception.line, 2)
		self.assertIsNone(raised.exception.column)

	def test_non_numeric_cell(self):
		with self.assertRaises(CsvParseError) as raised:
			read_csv_text("1,2\n3,4\n5,x\n")
		self.assertEqual((raised.exception.line, raised.exception.column), (3, 2))

	def test_non_finite_cell(self):
		for text in ("nan,1\n", "1,inf\n"):
			with self.subTest(text=text), self.assertRaises(CsvParseError):
				read_csv_text(text)

	def test_no_rows(self):
		for text, header in (("", False), ("a,b\n", True), ("\n\n", False)):
			with self.subTest(text=text), self.assertRaises(InsufficientDataError):
				read_csv_text(text, has_header=header)

	def test_bundled_datasets(self):
		sums = {
			"iris-setosa": (250.3, 171.4),
			"iris-versicolor": (296.8, 138.5),
			"iris-virginica": (329.4, 148.7),
		}
		for name in BUNDLED_FILES:
			sample = read_csv(f"bundled:{name}")
			self.assertEqual((sample.n, sample.d), (50, 2))
			self.assertEqual(sample.labels, ("sepal_length", "sepal_width"))
			np.testing.assert_allclose(sample.values.sum(axis=0), sums[name])

	def test_unknown_bundled_dataset(self):
		with self.assertRaises(ParameterError):
			read_csv("bundled:iris-germanica")


class WriterTests(SimpleTestCase):
	records = [
		DddRecord(0, (1.0, 2.0), 0.5, 0.25, 0.125),
		DddRecord(1, (0.5, -1.0), 0.2, 0.2, 0.1),
		DddRecord(2, (3.0, 3.0), 0.0, 0.4, 0.2),
	]

	def test_csv(self):
		lines = write_ddd_csv(self.records).decode("utf-8").splitlines()
		self.assertEqual(lines[0], "index,ddd,band,outside,x1,x2")
		self.assertEqual(lines[1], "0,0.25,0.125,1,1,2")
		self.assertEqual(lines[2].split(",")[3], "0")
		self.assertEqual(float(lines[3].split(",")[1]), -0.4)

	def test_csv_without_records(self):
		self.assertEqual(write_ddd_csv([]), b"index,ddd,band,outside\n")

	def test_svg(self):
		svg = write_ddd_svg(self.records).decode("utf-8")
		self.assertTrue(svg.startswith("<?xml"))
		self.assertIn('width="640"', svg)
		self.assertEqual(svg.count("<circle"), 3)
		self.assertEqual(svg.count('fill="red"'), 2)
		self.assertEqual(svg.count("<polyline"), 2)

	def test_svg_without_records(self):
		svg = write_ddd_svg([], 200, 150).decode("utf-8")
		self.assertNotIn("<circle", svg)
		self.assertNotIn("<polyline", svg)

	def test_small_canvas(self):
		with self.assertRaises(ParameterError):
			write_ddd_svg(self.records, 80, 400)


class ResultDocumentTests(SimpleTestCase):
	def test_round_trip(self):
		document = ResultDocument(
			command={"name": "gof", "options": {"seed": 3}},
			seed=3,
			payload={"kind": "test-results", "values": [np.float64(0.5), np.int64(2)], "grid": np.eye(2)},
			timing={"elapsed_seconds": 0.25},
		)
		text = document.to_json()
		self.assertTrue(text.endswith("}\n"))
		restored = ResultDocument.from_json(text)
		self.assertEqual(restored.payload["values"], [0.5, 2])
		self.assertEqual(restored.payload["grid"], [[1.0, 0.0], [0.0, 1.0]])
		self.assertEqual(restored.seed, 3)

	def test_timing_can_be_left_out(self):
		document = ResultDocument(command={}, seed=None, payload={}, timing={"elapsed_seconds": 1.0})
		self.assertNotIn("timing", json.loads(document.to_json(include_timing=False)))

	def test_schema_version(self):
		with self.assertRaises(ParameterError):
			ResultDocument.from_json('{"schema_version": "0", "command": {}, "seed": 1, "payload": {}}')
		with self.assertRaises(ParameterError):
			ResultDocument.from_json("not json")


class CommandLineTests(SimpleTestCase):
	def setUp(self):
		directory = tempfile.TemporaryDirectory()
		self.addCleanup(directory.cleanup)
		self.tmp = Path(directory.name)
		self.triangle = self._write("triangle.csv", TRIANGLE_CSV)
		self.gaussian = self._write("gaussian.csv", "".join(f"{a!r},{b!r}\n" for a, b in GAUSSIAN_ROWS))
		self.cube = self._write("cube.csv", "0,0,0\n1,0,0\n0,1,0\n0,0,1\n")

	def _write(self, name: str, text: str) -> str:
		path = self.tmp / name
		path.write_text(text, encoding="utf-8")
		return str(path)

	def run_cli(self, *argv):
		stdout, stderr = io.StringIO(), io.StringIO()
		code = cli_main(list(argv), stdout=stdout, stderr=stderr)
		return code, stdout.getvalue(), stderr.getvalue()

	def test_usage(self):
		code, out, _ = self.run_cli("--help")
		self.assertEqual(code, 0)
		self.assertEqual(out, USAGE)

	def test_missing_or_unknown_subcommand(self):
		self.assertEqual(self.run_cli()[0], 2)
		code, _, err = self.run_cli("plot")
		self.assertEqual(code, 2)
		self.assertIn("unknown subcommand 'plot'", err)

	def test_depth_of_point(self):
		code, out, _ = self.run_cli("depth", self.triangle, "--point", "0,0", "--format", "csv")
		self.assertEqual(code, 0)
		lines = out.splitlines()
		self.assertEqual(lines[0], "index,depth")
		self.assertEqual(float(lines[1].split(",")[1]), 1 / 3)

	def test_depth_document(self):
		code, out, _ = self.run_cli("depth", self.triangle, "--queries", self.triangle, "--seed", "5")
		self.assertEqual(code, 0)
		document = json.loads(out)
		self.assertEqual(document["payload"]["depths"], [1 / 3] * 3)
		self.assertEqual(document["seed"], 5)
		self.assertEqual(document["schema_version"], "1")
		self.assertNotIn("threads", document["command"]["options"])

	def test_call_command(self):
		out = io.StringIO()
		call_command("depth", self.triangle, "--point", "5,5", "--format", "csv", stdout=out)
		self.assertEqual(out.getvalue(), "index,depth\n0,0\n")
		with self.assertRaises(CommandError):
			call_command("depth", self.triangle, "--point", "a,b")

	def test_depth_errors(self):
		self.assertEqual(self.run_cli("depth", self.triangle, "--point", "0,0,0")[0], 1)
		self.assertEqual(self.run_cli("depth", str(self.tmp / "missing.csv"), "--point", "0,0")[0], 1)
		self.assertEqual(self.run_cli("depth", self.triangle)[0], 2)

	def test_invalid_seed_or_directions_exit_one(self):
		code, _, err = self.run_cli("gof", self.gaussian, "--seed=-1", "--bootstrap", "5", "--eval-points", "5")
		self.assertEqual(code, 1)
		self.assertIn("ParameterError", err)
		self.assertEqual(self.run_cli("gof", self.gaussian, "--seed", str(2**64), "--bootstrap", "5")[0], 1)
		self.assertEqual(self.run_cli("twosample", self.gaussian, self.gaussian, "--seed=-1")[0], 1)
		self.assertEqual(self.run_cli("depth", self.triangle, "--point", "0,0", "--seed=-1")[0], 1)
		self.assertEqual(self.run_cli("ddd", "gof", self.gaussian, "--seed=-1")[0], 1)
		code, _, err = self.run_cli("ddd", "gof", self.gaussian, "--method", "approx", "--directions", "0")
		self.assertEqual(code, 1)
		self.assertIn("ParameterError", err)

	def test_exact_depth_in_three_dimensions_fails(self):
		code, _, err = self.run_cli("gof", self.cube, "--method", "exact", "--bootstrap", "5", "--eval-points", "5")
		self.assertEqual(code, 1)
		self.assertIn("UnsupportedDimensionError", err)

	def test_identical_samples(self):
		code, out, _ = self.run_cli(
			"twosample", self.gaussian, self.gaussian, "--seed", "1", "--bootstrap", "20", "--eval-points", "30"
		)
		self.assertEqual(code, 0)
		results = json.loads(out)["payload"]["results"]
		self.assertEqual([r["statistic"] for r in results], ["ks", "cvm"])
		self.assertTrue(all(r["statistic_value"] == 0 for r in results))

	def test_gof_csv(self):
		code, out, _ = self.run_cli(
			"gof", self.gaussian, "--seed", "2", "--bootstrap", "10", "--eval-points", "20", "--ref-size", "200",
			"--statistic", "cvm", "--format", "csv",
		)
		self.assertEqual(code, 0)
		lines = out.splitlines()
		self.assertEqual(lines[0], "statistic,statistic_value,p_value,B,seed")
		self.assertTrue(lines[1].startswith("cvm,"))
		self.assertTrue(lines[1].endswith(",10,2"))

	def test_thread_count_does_not_change_document(self):
		argv = ["gof", self.gaussian, "--seed", "9", "--bootstrap", "12", "--eval-points", "25", "--ref-size", "150"]
		serial = json.loads(self.run_cli(*argv, "--threads", "1")[1])
		threaded = json.loads(self.run_cli(*argv, "--threads", "8")[1])
		serial.pop("timing")
		threaded.pop("timing")
		self.assertEqual(serial, threaded)

	def test_ddd_twosample_with_svg(self):
		svg = self.tmp / "plot.svg"
		code, out, _ = self.run_cli("ddd", "twosample", self.triangle, self.gaussian, "--seed", "4", "--svg", str(svg))
		self.assertEqual(code, 0)
		self.assertEqual(len(out.splitlines()), 24)
		self.assertEqual(svg.read_text(encoding="utf-8").count("<circle"), 23)

	def test_ddd_gof_document(self):
		code, out, _ = self.run_cli("ddd", "gof", self.gaussian, "--ref-size", "300", "--seed", "6", "--format", "json")
		self.assertEqual(code, 0)
		records = json.loads(out)["payload"]["records"]
		self.assertEqual(len(records), 20)
		self.assertEqual(records[0]["ddd"], records[0]["depth_a"] - records[0]["depth_b"])

	def test_ddd_arity_and_names(self):
		self.assertEqual(self.run_cli("ddd", "twosample", self.triangle)[0], 2)
		self.assertEqual(self.run_cli("ddd", "illustrate", "gof-uniform")[0], 2)
		self.assertEqual(self.run_cli("ddd", "compare", self.triangle)[0], 2)

	def test_simulate_csv(self):
		code, out, _ = self.run_cli(
			"simulate", "--model", "A1", "--d", "2", "--n", "10", "--reps", "1", "--bootstrap", "5",
			"--eval-points", "10", "--ref-size", "50", "--seed", "3", "--format", "csv",
		)
		self.assertEqual(code, 0)
		lines = out.splitlines()
		self.assertTrue(lines[0].startswith("model,d,n,m,mu,gamma,f0,h,KS.depth"))
		self.assertTrue(lines[1].startswith("A1,2,10,"))

	def test_simulate_config_file(self):
		config = self._write(
			"cell.json",
			json.dumps({"model": "B", "d": 2, "n": 8, "m": 8, "mu": 2.0, "reps": 1, "B": 5, "M": 10, "seed": 4}),
		)
		out_path = self.tmp / "power.xlsx"
		code, _, _ = self.run_cli("simulate", "--config", config, "--statistic", "ks", "--format", "xlsx", "--out", str(out_path))
		self.assertEqual(code, 0)
		self.assertTrue(out_path.read_bytes().startswith(b"PK"))

	def test_simulate_errors(self):
		self.assertEqual(self.run_cli("simulate", "--format", "xlsx", "--model", "A1", "--d", "2", "--n", "5")[0], 2)
		self.assertEqual(self.run_cli("simulate", "--model", "A1", "--d", "2", "--n", "5", "--alpha", "1.5")[0], 1)
		self.assertEqual(self.run_cli("simulate", "--config", str(self.tmp / "missing.json"))[0], 1)

	@unittest.skipUnless(SLOW, "Full bootstrap on the bundled iris data; set DDD_SLOW_TESTS=1")
	def test_iris_species_differ(self):
		code, out, _ = self.run_cli(
			"twosample", "bundled:iris-setosa", "bundled:iris-versicolor", "--seed", "2024", "--bootstrap", "200",
			"--eval-points", "500",
		)
		self.assertEqual(code, 0)
		for result in json.loads(out)["payload"]["results"]:
			self.assertLessEqual(result["p_value"], 0.01)
			self.assertTrue(result["reject"])
			self.assertTrue(math.isfinite(result["statistic_value"]))

	@unittest.skipUnless(SLOW, "Full bootstrap on the bundled iris data; set DDD_SLOW_TESTS=1")
	def test_standardized_iris_species_fit_normal(self):
		for species in ("setosa", "versicolor", "virginica"):
			with self.subTest(species=species):
				code, out, _ = self.run_cli(
					"gof", f"bundled:iris-{species}", "--standardize", "--bootstrap", "500", "--seed", "2024",
				)
				self.assertEqual(code, 0)
				results = json.loads(out)["payload"]["results"]
				self.assertEqual(len(results), 2)
				for result in results:
					self.assertGreater(result["p_value"], 0.05)
