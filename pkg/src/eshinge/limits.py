"""Cooperative wall-clock budgets for long computations."""

from __future__ import annotations

import time

from .errors import ResourceLimitExceeded


class Deadline:
    """Raises :class:`ResourceLimitExceeded` from :meth:`check` once expired.

    ``seconds=None`` never expires.
    """

    def __init__(self, seconds: float | None = None):
        self.seconds = seconds
        self._start = time.monotonic()

    @property
    def elapsed(self) -> float:
        return time.monotonic() - self._start

    def expired(self) -> bool:
        return self.seconds is not None and self.elapsed > self.seconds

    def check(self) -> None:
        if self.expired():
            raise ResourceLimitExceeded(f"time limit of {self.seconds}s exceeded after {self.elapsed:.1f}s")
