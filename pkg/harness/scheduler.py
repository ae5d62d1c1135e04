"""Budgeted fetch scheduling.

Each source gets `per_source_total_ms` in total. Every attempt is capped at
`per_step_ms` (or at what is left of the total, if that is less). When an attempt
fails or is cut off, the next alternate URL is tried until the source succeeds,
its budget is spent, or it runs out of candidates. At most `fetch_concurrency`
sources are processed at once.
"""
import asyncio
from enum import Enum
from typing import Mapping, Optional, Sequence
import structlog
from pydantic import BaseModel
from merger.config import BudgetConfig
from .clock import Clock, VirtualClock
from .providers import FetchProvider

logger = structlog.get_logger(__name__)


class FetchOutcome(str, Enum):
    OK = "ok"
    STEP_TIMEOUT = "step_timeout"
    BUDGET_EXCEEDED = "budget_exceeded"
    EXHAUSTED_ALTERNATES = "exhausted_alternates"


class FetchRecord(BaseModel):
    url: str
    outcome: FetchOutcome
    served_by: Optional[str] = None
    charged_ms: int = 0
    attempts: int = 0


async def _fetch_one(
    url: str,
    alternates: Sequence[str],
    budget: BudgetConfig,
    fetcher: FetchProvider,
    clock: Clock,
) -> FetchRecord:
    candidates = [url, *list(alternates)[: budget.max_alternates]]
    remaining = budget.per_source_total_ms
    attempts = 0
    last_timed_out = False
    for candidate in candidates:
        if remaining <= 0:
            break
        cap = min(budget.per_step_ms, remaining)
        response, cut_off = await clock.call_within(fetcher.fetch(candidate), cap)
        if cut_off:
            charged, timed_out = cap, True
        else:
            charged, timed_out = await clock.elapse(response.latency_ms, cap)
        remaining -= charged
        attempts += 1
        last_timed_out = timed_out
        if not timed_out and response.ok:
            return FetchRecord(
                url=url, outcome=FetchOutcome.OK, served_by=candidate,
                charged_ms=budget.per_source_total_ms - remaining, attempts=attempts,
            )
        logger.debug("fetch attempt failed", url=url, candidate=candidate, timed_out=timed_out, charged_ms=charged)

    charged_total = budget.per_source_total_ms - remaining
    if remaining <= 0:
        outcome = FetchOutcome.BUDGET_EXCEEDED
    elif len(candidates) == 1 and last_timed_out:
        outcome = FetchOutcome.STEP_TIMEOUT
    else:
        outcome = FetchOutcome.EXHAUSTED_ALTERNATES
    logger.info("fetch gave up", url=url, outcome=outcome.value, charged_ms=charged_total)
    return FetchRecord(url=url, outcome=outcome, charged_ms=charged_total, attempts=attempts)


async def schedule_fetch_async(
    urls: Sequence[str],
    alternates: Mapping[str, Sequence[str]],
    budget: BudgetConfig,
    fetcher: FetchProvider,
    clock: Optional[Clock] = None,
) -> list[FetchRecord]:
    clock = clock or VirtualClock()
    semaphore = asyncio.Semaphore(budget.fetch_concurrency)

    async def guarded(url: str) -> FetchRecord:
        async with semaphore:
            return await _fetch_one(url, alternates.get(url, ()), budget, fetcher, clock)

    return list(await asyncio.gather(*(guarded(u) for u in urls)))


def schedule_fetch(
    urls: Sequence[str],
    alternates: Mapping[str, Sequence[str]],
    budget: BudgetConfig,
    fetcher: FetchProvider,
    clock: Optional[Clock] = None,
) -> list[FetchRecord]:
    return asyncio.run(schedule_fetch_async(urls, alternates, budget, fetcher, clock))
