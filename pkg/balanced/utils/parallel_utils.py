"""
Process-pool fan-out with deterministic result order
"""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from balanced.config import config

T = TypeVar("T")
R = TypeVar("R")


def resolve_jobs(jobs: Optional[int]) -> int:
    return max(1, config.JOBS if jobs is None else jobs)


def run_tasks(func: Callable[[T], R], tasks: Sequence[T], jobs: Optional[int] = None) -> List[R]:
    """
    Apply func to every task, in worker processes when jobs > 1

    Results come back in task order regardless of completion order, so reductions
    over them are reproducible. func must be a module-level function.
    """
    workers = resolve_jobs(jobs)
    if workers == 1 or len(tasks) <= 1:
        return [func(task) for task in tasks]
    chunksize = max(1, len(tasks) // (workers * 4))
    with ProcessPoolExecutor(max_workers=min(workers, len(tasks))) as pool:
        return list(pool.map(func, tasks, chunksize=chunksize))
