from __future__ import annotations

import csv
import io
from typing import Sequence

from django.template.loader import render_to_string

from core.exceptions import ParameterError
from discrepancy.records import DddRecord

MIN_CANVAS = 100
MARGIN = 40
PLOT_TEMPLATE = "ingest/ddd_plot.svg"


def _real(value: float) -> str:
	return format(float(value), ".17g")


def write_ddd_csv(records: Sequence[DddRecord]) -> bytes:
	d = len(records[0].point) if records else 0
	buffer = io.StringIO()
	writer = csv.writer(buffer, lineterminator="\n")
	writer.writerow(["index", "ddd", "band", "outside", *[f"x{axis}" for axis in range(1, d + 1)]])
	for record in records:
		writer.writerow(
			[
				record.index,
				_real(record.ddd),
				_real(record.band_halfwidth),
				int(record.outside),
				*[_real(value) for value in record.point],
			]
		)
	return buffer.getvalue().encode("utf-8")


def write_ddd_svg(records: Sequence[DddRecord], width: int = 640, height: int = 400) -> bytes:
	"""Dispersión (índice, DDD) con eje cero y banda punteada; puntos fuera de la banda en rojo."""

	if width < MIN_CANVAS or height < MIN_CANVAS:
		raise ParameterError(f"Canvas must be at least {MIN_CANVAS}x{MIN_CANVAS}, got {width}x{height}")
	extent = max([abs(record.ddd) for record in records] + [record.band_halfwidth for record in records] + [0.0])
	extent = extent * 1.1 or 1.0
	left, right = MARGIN, width - MARGIN / 2
	top, bottom = MARGIN / 2, height - MARGIN
	span = max(len(records) - 1, 1)

	def x_at(position: int) -> float:
		return left + (right - left) * position / span

	def y_at(value: float) -> float:
		return (top + bottom) / 2 - (bottom - top) / 2 * value / extent

	marks = [
		{
			"x": f"{x_at(position):.2f}",
			"y": f"{y_at(record.ddd):.2f}",
			"color": "red" if record.outside else "black",
			"index": record.index,
		}
		for position, record in enumerate(records)
	]
	upper = " ".join(f"{x_at(p):.2f},{y_at(r.band_halfwidth):.2f}" for p, r in enumerate(records))
	lower = " ".join(f"{x_at(p):.2f},{y_at(-r.band_halfwidth):.2f}" for p, r in enumerate(records))
	context = {
		"width": width,
		"height": height,
		"left": left,
		"right": right,
		"top": top,
		"bottom": bottom,
		"zero": f"{y_at(0.0):.2f}",
		"extent": f"{extent:.3g}",
		"marks": marks,
		"upper": upper,
		"lower": lower,
	}
	return render_to_string(PLOT_TEMPLATE, context).encode("utf-8")
