from __future__ import annotations

from pathlib import Path

from core.exceptions import ParameterError

FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"
BUNDLED_PREFIX = "bundled:"
BUNDLED_FILES = {
	"iris-setosa": "iris_setosa.csv",
	"iris-versicolor": "iris_versicolor.csv",
	"iris-virginica": "iris_virginica.csv",
}


def is_bundled(path: str | Path) -> bool:
	return str(path).startswith(BUNDLED_PREFIX)


def resolve_path(path: str | Path) -> Path:
	"""`bundled:iris-<especie>` apunta a los CSV incluidos; cualquier otra ruta se usa tal cual."""

	if not is_bundled(path):
		return Path(path)
	name = str(path)[len(BUNDLED_PREFIX):]
	if name not in BUNDLED_FILES:
		raise ParameterError(f"Unknown bundled dataset '{name}'; choose one of {', '.join(BUNDLED_FILES)}")
	return FIXTURES_DIR / BUNDLED_FILES[name]
