import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from .conf import get_default

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: int | None = None) -> list[R]:
	"""Aplica func a cada item preservando el orden de entrada."""

	pending = list(items)
	workers = get_default("THREADS") if threads is None else threads
	if workers <= 1 or len(pending) <= 1:
		return [func(item) for item in pending]
	logger.debug("Dispatching %d tasks over %d threads", len(pending), workers)
	with ThreadPoolExecutor(max_workers=workers) as pool:
		return list(pool.map(func, pending))
