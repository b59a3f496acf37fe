"""Bounded worker pool for independent jobs (cases, replicates)."""

from concurrent.futures import ThreadPoolExecutor, as_completed
from typing import Callable, List, Optional, Sequence, TypeVar

from spin_inverse.utils.logger import setup_logger

logger = setup_logger(__name__)

T = TypeVar("T")


def run_jobs(
    jobs: Sequence[Callable[[], T]],
    max_workers: int = 1,
    progress_callback: Optional[Callable[[int, int], None]] = None,
) -> List[T]:
    """Run zero-argument jobs and return their results in submission order.

    Args:
        jobs: Callables, each independent of the others
        max_workers: Maximum concurrent jobs; 1 runs them inline
        progress_callback: Called with (finished, total) after each job

    Returns:
        Results in the order of ``jobs``, whatever the completion order

    Raises:
        The first failing job's exception, after the pool has drained
    """
    total = len(jobs)
    if max_workers <= 1 or total <= 1:
        results = []
        for index, job in enumerate(jobs):
            results.append(job())
            if progress_callback:
                progress_callback(index + 1, total)
        return results

    results: List[Optional[T]] = [None] * total
    finished = 0
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {executor.submit(job): index for index, job in enumerate(jobs)}
        for future in as_completed(futures):
            index = futures[future]
            try:
                results[index] = future.result()
            except Exception as e:
                logger.error(f"Job {index} failed: {e}")
                for pending in futures:
                    pending.cancel()
                raise
            finished += 1
            if progress_callback:
                progress_callback(finished, total)
    return results  # type: ignore[return-value]
