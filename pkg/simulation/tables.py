"""Tablas de potencia: una fila por celda, una columna por estadístico."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Iterable, Sequence

from openpyxl import Workbook
from openpyxl.styles import Font

from core.exceptions import DuplicateRowError
from inference.choices import Statistic

from .experiments import ExperimentSpec, PowerEstimate

KEY_COLUMNS = ("model", "d", "n", "m", "mu", "gamma", "f0", "h")


@dataclass(frozen=True)
class PowerRow:
	key: tuple
	rates: dict[str, float]
	errors: dict[str, float]

	def cells(self, statistics: Sequence[str]) -> list:
		model, d, n, m, mu, gamma, f0, h = self.key
		values = [model, d, n, m or "", mu, gamma, f0, h]
		for statistic in statistics:
			values.append(self.rates.get(statistic, ""))
			values.append(self.errors.get(statistic, ""))
		return values


@dataclass(frozen=True)
class PowerTable:
	statistics: tuple[str, ...]
	rows: tuple[PowerRow, ...]

	@property
	def header(self) -> list[str]:
		columns = list(KEY_COLUMNS)
		for statistic in self.statistics:
			columns.extend([Statistic(statistic).label, f"{Statistic(statistic).label} se"])
		return columns

	def to_csv(self) -> str:
		buffer = io.StringIO()
		writer = csv.writer(buffer, lineterminator="\n")
		writer.writerow(self.header)
		for row in self.rows:
			writer.writerow([repr(value) if isinstance(value, float) else value for value in row.cells(self.statistics)])
		return buffer.getvalue()

	def to_payload(self) -> dict:
		return {
			"kind": "power-table",
			"statistics": list(self.statistics),
			"rows": [
				{**dict(zip(KEY_COLUMNS, row.key)), "rates": row.rates, "mc_std_errors": row.errors}
				for row in self.rows
			],
		}

	def to_xlsx(self) -> bytes:
		workbook = Workbook()
		sheet = workbook.active
		sheet.title = "power"
		sheet.append(self.header)
		for cell in sheet[1]:
			cell.font = Font(bold=True)
		for row in self.rows:
			sheet.append(row.cells(self.statistics))
		sheet.freeze_panes = "A2"
		buffer = io.BytesIO()
		workbook.save(buffer)
		return buffer.getvalue()


def render_table(cells: Iterable[tuple[ExperimentSpec, Sequence[PowerEstimate]]]) -> PowerTable:
	"""Agrupa las estimaciones por celda; dos celdas con la misma clave son un error."""

	rows: dict[tuple, PowerRow] = {}
	statistics: dict[str, None] = {}
	for spec, estimates in cells:
		key = spec.key()
		if key in rows:
			raise DuplicateRowError(f"Power table already has a row for {dict(zip(KEY_COLUMNS, key))}")
		rates = {}
		errors = {}
		for estimate in estimates:
			statistics.setdefault(estimate.statistic)
			rates[estimate.statistic] = estimate.rejection_rate
			errors[estimate.statistic] = estimate.mc_std_error
		rows[key] = PowerRow(key, rates, errors)
	ordered = tuple(rows[key] for key in sorted(rows))
	ordering = [value for value in Statistic.values if value in statistics]
	return PowerTable(tuple(ordering), ordered)
