# src/molentangle/utils/parallel.py

from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

from molentangle.logs import getAppLogger


T = TypeVar("T")
R = TypeVar("R")


def ordered_map(
    func: Callable[[T], R],
    items: Iterable[T],
    *,
    workers: int = 1,
    chunksize: int = 16,
) -> list[R]:
    """Map ``func`` over ``items`` and return results in input order.

    ``workers <= 1`` runs in-process. Otherwise ``func`` and the items must
    be picklable (module-level callables, frozen dataclasses).
    """
    logger = getAppLogger()
    materialized = list(items)
    if workers <= 1 or len(materialized) <= 1:
        return [func(item) for item in materialized]

    logger.debug(
        "Dispatching %d tasks to %d worker processes", len(materialized), workers
    )
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, materialized, chunksize=chunksize))
