"""Clocks for the search and fetch stages.

Providers report how long an operation would take; the clock decides whether that
time is really waited for. Both clocks apply the same cap rule: an operation that
needs `cap_ms` or longer is cut off at the cap and charged exactly `cap_ms`.
The provider call itself goes through `call_within`: on the wall clock a call that
does not return within the cap is cancelled.
"""
import asyncio
import random
import time
from abc import ABC, abstractmethod
from typing import Awaitable, Optional, Sequence, TypeVar

T = TypeVar("T")


class Clock(ABC):
    @abstractmethod
    def now_ms(self) -> int:
        """Current time in milliseconds."""

    @abstractmethod
    async def _wait(self, ms: int) -> None:
        ...

    def launch_order(self, items: Sequence[T]) -> list[T]:
        """Order in which concurrent tasks are started."""
        return list(items)

    async def elapse(self, latency_ms: int, cap_ms: int) -> tuple[int, bool]:
        if latency_ms < 0:
            raise ValueError("latency_ms must be non-negative")
        timed_out = latency_ms >= cap_ms
        charged = cap_ms if timed_out else latency_ms
        await self._wait(charged)
        return charged, timed_out

    async def call_within(self, call: Awaitable[T], cap_ms: int) -> tuple[Optional[T], bool]:
        """Await a provider call; returns (result, False), or (None, True) when it was cut off."""
        return await call, False


class VirtualClock(Clock):
    """Never sleeps; time moves forward by whatever is charged to it.

    The seed shuffles the launch order of concurrent tasks, so callers can check that
    their results do not depend on which task finishes first.
    """

    def __init__(self, seed: int = 0, start_ms: int = 0):
        if start_ms < 0:
            raise ValueError("start_ms must be non-negative")
        self.seed = seed
        self._now_ms = start_ms
        self._rng = random.Random(seed)

    def now_ms(self) -> int:
        return self._now_ms

    async def _wait(self, ms: int) -> None:
        self._now_ms += ms
        await asyncio.sleep(0)

    def launch_order(self, items: Sequence[T]) -> list[T]:
        order = list(items)
        self._rng.shuffle(order)
        return order


class WallClock(Clock):
    def __init__(self):
        self._t0 = time.monotonic()

    def now_ms(self) -> int:
        return int((time.monotonic() - self._t0) * 1000)

    async def _wait(self, ms: int) -> None:
        await asyncio.sleep(ms / 1000)

    async def call_within(self, call: Awaitable[T], cap_ms: int) -> tuple[Optional[T], bool]:
        try:
            return await asyncio.wait_for(call, timeout=cap_ms / 1000), False
        except asyncio.TimeoutError:
            return None, True
