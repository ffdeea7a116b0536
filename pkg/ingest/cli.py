"""Punto de entrada único: `cli_main(["gof", "datos.csv", "--seed", "7"])`."""

from __future__ import annotations

import os
import sys
from contextlib import redirect_stderr
from importlib import import_module

import django

SUBCOMMANDS = ("depth", "ddd", "gof", "twosample", "simulate")
PROGRAM = "ddd-toolkit"

USAGE = f"""usage: {PROGRAM} <subcommand> [options]

subcommands:
  depth       Tukey depth of query points with respect to a sample CSV
  ddd         DDD records and plot: ddd gof|twosample|illustrate ...
  gof         depth-based goodness-of-fit test with bootstrap p-value
  twosample   depth-based two-sample test with bootstrap p-value
  simulate    Monte Carlo size/power table

Run '{PROGRAM} <subcommand> --help' for the options of each subcommand.
"""


def _setup() -> None:
	os.environ.setdefault("DJANGO_SETTINGS_MODULE", "ddd_site.settings")
	django.setup()


def cli_main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
	"""Ejecuta un subcomando y devuelve el código de salida (0, 1 o 2)."""

	argv = list(sys.argv[1:] if argv is None else argv)
	stdout = stdout or sys.stdout
	stderr = stderr or sys.stderr
	if argv and argv[0] in ("-h", "--help"):
		stdout.write(USAGE)
		return 0
	if not argv or argv[0] not in SUBCOMMANDS:
		if argv:
			stderr.write(f"{PROGRAM}: unknown subcommand '{argv[0]}'\n\n")
		stderr.write(USAGE)
		return 2
	name, rest = argv[0], argv[1:]
	_setup()
	command = import_module(f"ingest.management.commands.{name}").Command(stdout=stdout, stderr=stderr)
	try:
		with redirect_stderr(stderr):
			command.run_from_argv([PROGRAM, name, *rest])
	except SystemExit as exc:
		if exc.code is None:
			return 0
		return exc.code if isinstance(exc.code, int) else 1
	return 0


def main() -> None:
	sys.exit(cli_main())
