# src/core/parallel.py
import logging
from typing import Any, Callable, Iterable, List

from joblib import Parallel, delayed

logger = logging.getLogger(__name__)


def run_parallel(func: Callable[..., Any], items: Iterable[Any], workers: int = 1) -> List[Any]:
    """
    Maps `func` over `items` with joblib's threading backend.

    Output order always matches input order. numpy releases the GIL inside
    FFTs and sorts, which is where replications spend their time.
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    logger.debug(f"Dispatching {len(items)} tasks to {workers} threads.")
    return Parallel(n_jobs=workers, backend="threading")(delayed(func)(item) for item in items)
