"""Scheduler for running independent blocking work items on worker threads."""

from __future__ import annotations

import asyncio
import logging
import time
from collections.abc import Callable
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Generic, TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")


@dataclass
class TaskOutcome(Generic[T]):
    """Result or failure of one work item."""

    name: str
    value: T | None = None
    error: BaseException | None = None
    duration_seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return self.error is None


class WorkTask(Generic[T]):
    """A named blocking function executed once on a worker thread."""

    def __init__(self, name: str, func: Callable[[], T]):
        """Initialize work task.

        Args:
            name: Unique task name, also the result key
            func: Blocking callable without arguments
        """
        self.name = name
        self.func = func

        self._running = False
        self._last_run: datetime | None = None
        self._run_count = 0
        self._error_count = 0

    @property
    def is_running(self) -> bool:
        """Check if task is currently running."""
        return self._running

    @property
    def stats(self) -> dict[str, Any]:
        """Get task statistics."""
        return {
            "name": self.name,
            "running": self._running,
            "last_run": self._last_run.isoformat() if self._last_run else None,
            "run_count": self._run_count,
            "error_count": self._error_count,
        }

    async def execute(self) -> TaskOutcome[T]:
        """Run the function in a thread; failures are returned, not raised."""
        self._running = True
        started = time.perf_counter()
        try:
            logger.debug(f"Running task: {self.name}")
            value = await asyncio.to_thread(self.func)
            self._run_count += 1
            return TaskOutcome(
                name=self.name,
                value=value,
                duration_seconds=time.perf_counter() - started,
            )
        except Exception as e:
            self._error_count += 1
            logger.error(f"Task {self.name} failed: {e}")
            logger.debug(f"Traceback of task {self.name}", exc_info=True)
            return TaskOutcome(
                name=self.name,
                error=e,
                duration_seconds=time.perf_counter() - started,
            )
        finally:
            self._running = False
            self._last_run = datetime.now()


class TaskScheduler(Generic[T]):
    """Run work items with at most `workers` of them in flight.

    Outcomes are keyed by task name, so the result does not depend on
    completion order.
    """

    def __init__(self, workers: int = 4) -> None:
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        self.workers = workers
        self._tasks: dict[str, WorkTask[T]] = {}
        self._running = False

    @property
    def is_running(self) -> bool:
        """Check if scheduler is running."""
        return self._running

    def add_task(self, name: str, func: Callable[[], T]) -> WorkTask[T]:
        """Add a new work item.

        Returns:
            The created WorkTask
        """
        if name in self._tasks:
            raise ValueError(f"Task '{name}' already exists")
        task = WorkTask(name=name, func=func)
        self._tasks[name] = task
        return task

    def get_stats(self) -> dict[str, Any]:
        """Get statistics for all tasks."""
        return {
            "running": self._running,
            "workers": self.workers,
            "task_count": len(self._tasks),
            "tasks": {name: task.stats for name, task in self._tasks.items()},
        }

    async def run_all(self) -> dict[str, TaskOutcome[T]]:
        """Execute every task once and collect outcomes by name."""
        if self._running:
            raise RuntimeError("Scheduler is already running")

        self._running = True
        semaphore = asyncio.Semaphore(self.workers)
        logger.info(
            f"Running {len(self._tasks)} tasks on {self.workers} worker(s)"
        )

        async def bounded(task: WorkTask[T]) -> TaskOutcome[T]:
            async with semaphore:
                return await task.execute()

        try:
            outcomes = await asyncio.gather(
                *[bounded(task) for task in self._tasks.values()]
            )
        finally:
            self._running = False

        failed = sum(1 for outcome in outcomes if not outcome.ok)
        logger.info(f"Completed {len(outcomes)} tasks, {failed} failed")
        return {outcome.name: outcome for outcome in outcomes}

