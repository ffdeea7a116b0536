from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Iterable

from core.exceptions import CsvParseError, InsufficientDataError
from core.matrix import DataMatrix

from .datasets import is_bundled, resolve_path


def parse_rows(lines: Iterable[str], has_header: bool, source: str = "<input>") -> DataMatrix:
	"""Tabla numérica rectangular; los errores citan línea y columna (desde 1)."""

	reader = csv.reader(lines)
	labels: tuple[str, ...] = ()
	rows: list[list[float]] = []
	width = None
	for record in reader:
		if not record or all(not cell.strip() for cell in record):
			continue
		line = reader.line_num
		if has_header and not labels and not rows:
			labels = tuple(cell.strip() for cell in record)
			width = len(labels)
			continue
		if width is None:
			width = len(record)
		if len(record) != width:
			raise CsvParseError(f"Expected {width} fields, found {len(record)} in {source}", line=line)
		values = []
		for column, cell in enumerate(record, start=1):
			try:
				value = float(cell)
			except ValueError as exc:
				raise CsvParseError(f"Non-numeric value '{cell.strip()}' in {source}", line=line, column=column) from exc
			if not math.isfinite(value):
				raise CsvParseError(f"Non-finite value '{cell.strip()}' in {source}", line=line, column=column)
			values.append(value)
		rows.append(values)
	if not rows:
		raise InsufficientDataError(f"No data rows in {source}")
	return DataMatrix.from_rows(rows, labels)


def read_csv(path: str | Path, has_header: bool = False) -> DataMatrix:
	resolved = resolve_path(path)
	has_header = has_header or is_bundled(path)
	with resolved.open("r", encoding="utf-8", newline="") as handle:
		return parse_rows(handle, has_header, source=str(path))


def read_csv_text(text: str, has_header: bool = False) -> DataMatrix:
	return parse_rows(io.StringIO(text, newline=""), has_header)
