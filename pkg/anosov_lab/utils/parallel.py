import concurrent.futures
import logging
import os
from typing import Callable, Iterable, List, Optional, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def thread_count(requested: Optional[int] = None) -> int:
    """Worker count: explicit request, then ANOSOV_LAB_THREADS, then 1."""
    if requested is not None:
        if requested < 1:
            raise ValueError(f"Thread count must be positive, got {requested}")
        return requested
    env_value = os.environ.get("ANOSOV_LAB_THREADS")
    if env_value:
        try:
            value = int(env_value)
        except ValueError:
            logger.warning(f"Ignoring non-integer ANOSOV_LAB_THREADS={env_value!r}")
            return 1
        return max(1, value)
    return 1


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Apply func to every item and return results in input order.

    Shards run on a ThreadPoolExecutor; results are collected by submission index so the caller
    reduces them in the same order for any worker count.
    """
    items = list(items)
    workers = min(thread_count(threads), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]

    with concurrent.futures.ThreadPoolExecutor(max_workers=workers) as executor:
        futures = [executor.submit(func, item) for item in items]
        return [future.result() for future in futures]
