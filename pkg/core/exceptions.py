class DepthToolkitError(ValueError):
	"""Error base del toolkit; toda falla de dominio hereda de aquí."""


class InsufficientDataError(DepthToolkitError):
	pass


class ShapeError(DepthToolkitError):
	pass


class ParameterError(DepthToolkitError):
	pass


class UnsupportedDimensionError(DepthToolkitError):
	pass


class NonInvertibleScatterError(DepthToolkitError):
	def __init__(self, smallest_eigenvalue: float):
		self.smallest_eigenvalue = smallest_eigenvalue
		super().__init__(
			f"Covariance matrix is not positive definite (smallest eigenvalue {smallest_eigenvalue:.6g})"
		)


class CsvParseError(DepthToolkitError):
	def __init__(self, message: str, *, line: int, column: int | None = None):
		self.line = line
		self.column = column
		location = f"line {line}" if column is None else f"line {line}, column {column}"
		super().__init__(f"{message} at {location}")


class DuplicateRowError(DepthToolkitError):
	pass


class BootstrapError(DepthToolkitError):
	def __init__(self, replicate: int, cause: Exception):
		self.replicate = replicate
		super().__init__(f"Bootstrap replicate {replicate} failed: {cause}")
