"""Work pool for independent problems; results come back in submission order."""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


class ProblemPool:
    """Runs one callable per item on a thread pool.

    ``max_workers=1`` runs serially in-process, which keeps tracebacks and logging simple.
    """

    def __init__(self, max_workers: int = 1):
        if max_workers < 1:
            raise ValueError(f"max_workers must be at least 1, got {max_workers}")
        self.max_workers = max_workers

    def map(self, fn: Callable[[int, T], R], items: Sequence[T]) -> List[R]:
        """fn(index, item) for every item, ordered like ``items``."""
        items = list(items)
        if self.max_workers == 1 or len(items) <= 1:
            logger.debug(f"Running {len(items)} item(s) serially")
            return [fn(i, item) for i, item in enumerate(items)]

        logger.debug(f"Running {len(items)} item(s) on {self.max_workers} workers")
        results: List[R] = [None] * len(items)  # type: ignore[list-item]
        with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
            futures = {executor.submit(fn, i, item): i for i, item in enumerate(items)}
            for future, index in futures.items():
                results[index] = future.result()
        return results
