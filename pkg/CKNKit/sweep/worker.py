"""
Worker pool for concurrent sweep cells
Copyright (c) 2025 Arjun-M/CKNKit
"""

import asyncio
import logging
import os
from collections import Counter, deque
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List, NamedTuple, Optional, Set, Tuple

logger = logging.getLogger(__name__)

THREADS_ENV = "CKNKIT_THREADS"

_STOP = object()


def worker_cap(requested: int) -> int:
    """Requested worker count, capped by CKNKIT_THREADS when set."""
    count = max(1, int(requested))
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            count = min(count, max(1, int(cap)))
        except ValueError:
            logger.warning(f"ignoring non-integer {THREADS_ENV}={cap!r}")
    return count


class CellTask(NamedTuple):
    index: int
    handler: Callable
    args: Tuple
    kwargs: Dict[str, Any]

    @property
    def name(self) -> str:
        return getattr(self.handler, '__name__', repr(self.handler))


@dataclass(frozen=True)
class DeadLetter:
    """A task that raised; the sweep turns it into an error row."""
    index: int
    handler: str
    args: Tuple
    kwargs: Dict[str, Any]
    error: str
    error_type: str
    worker_id: int


class WorkerPool:
    """
    Async worker pool evaluating sweep cells concurrently.

    Features:
    - Worker count capped by CKNKIT_THREADS
    - Bounded queue, submit() waits when it is full
    - Synchronous callables run through asyncio.to_thread, coroutines are awaited
    - Results keyed by submission index or a caller-chosen index (submit_at)
    - Dead letter queue with one entry per failed task
    - Shutdown by sentinel, cancellation only after the timeout

    Args:
        num_workers: Requested number of concurrent workers
        max_queue_size: Queue bound
        enable_dead_letter: Record failed tasks in the dead letter queue
    """

    def __init__(self, num_workers: int = 4, max_queue_size: int = 1000, enable_dead_letter: bool = True):
        self.num_workers = worker_cap(num_workers)
        self.max_queue_size = max_queue_size
        self.enable_dead_letter = enable_dead_letter

        self.queue: Optional[asyncio.Queue] = None
        self.workers: List[asyncio.Task] = []
        self.results: Dict[int, Any] = {}
        self.dead_letter_queue: deque = deque()
        self._next_index = 0
        self._indices: Set[int] = set()
        self._counts: Counter = Counter()

    @property
    def running(self) -> bool:
        return bool(self.workers)

    @property
    def processed_count(self) -> int:
        return self._counts['processed']

    @property
    def failed_count(self) -> int:
        return self._counts['failed']

    async def start(self):
        if self.running:
            return
        self.queue = asyncio.Queue(maxsize=self.max_queue_size)
        self.workers = [asyncio.create_task(self._worker(i), name=f"cknkit-worker-{i}")
                        for i in range(self.num_workers)]
        logger.debug(f"worker pool started with {self.num_workers} workers")

    async def submit(self, handler: Callable, *args, **kwargs) -> int:
        """Queue ``handler(*args, **kwargs)`` under the next free index and return it."""
        while self._next_index in self._indices:
            self._next_index += 1
        return await self.submit_at(self._next_index, handler, *args, **kwargs)

    async def submit_at(self, index: int, handler: Callable, *args, **kwargs) -> int:
        """
        Queue ``handler(*args, **kwargs)`` under a caller-chosen result index.

        Raises:
            RuntimeError: pool not started
            ValueError: index already used in this pool
        """
        if not self.running:
            raise RuntimeError("worker pool is not running")
        if index in self._indices:
            raise ValueError(f"result index {index} already submitted")
        self._indices.add(index)
        await self.queue.put(CellTask(index, handler, args, kwargs))
        return index

    async def join(self) -> Dict[int, Any]:
        """Results keyed by task index; failed tasks map to their exception."""
        await self.queue.join()
        return dict(self.results)

    async def stop(self, timeout: float = 10.0):
        """Drain the queue, then send one stop sentinel per worker."""
        if not self.running:
            return
        try:
            await asyncio.wait_for(self.queue.join(), timeout=timeout)
        except asyncio.TimeoutError:
            logger.warning(f"worker pool stopped with {self.queue.qsize()} tasks pending")
            for worker in self.workers:
                worker.cancel()
        else:
            for _ in self.workers:
                self.queue.put_nowait(_STOP)
        await asyncio.gather(*self.workers, return_exceptions=True)
        self.workers = []

    async def _run(self, task: CellTask) -> Any:
        if asyncio.iscoroutinefunction(task.handler):
            return await task.handler(*task.args, **task.kwargs)
        return await asyncio.to_thread(task.handler, *task.args, **task.kwargs)

    async def _worker(self, worker_id: int):
        while True:
            task = await self.queue.get()
            if task is _STOP:
                self.queue.task_done()
                return
            try:
                self.results[task.index] = await self._run(task)
                self._counts['processed'] += 1
            except Exception as e:
                self.results[task.index] = e
                self._counts['failed'] += 1
                logger.debug(f"worker {worker_id}: {task.name}[{task.index}] failed: {e}")
                if self.enable_dead_letter:
                    self.dead_letter_queue.append(
                        DeadLetter(task.index, task.name, task.args, task.kwargs, str(e), type(e).__name__, worker_id)
                    )
            finally:
                self.queue.task_done()

    def get_stats(self) -> dict:
        return {
            "num_workers": self.num_workers,
            "queue_size": self.queue.qsize() if self.queue is not None else 0,
            "max_queue_size": self.max_queue_size,
            "processed": self.processed_count,
            "failed": self.failed_count,
            "dead_letter_size": len(self.dead_letter_queue),
            "running": self.running,
        }

    def get_dead_letters(self) -> List[dict]:
        """Failed tasks in failure order, as plain dicts"""
        return [asdict(letter) for letter in self.dead_letter_queue]
