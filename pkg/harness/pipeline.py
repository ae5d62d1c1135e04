"""End-to-end run over fixture-backed providers.

normalize mix -> allocate keywords per locale -> concurrent search under a deadline
-> diversity selection -> budgeted fetch -> metrics.
"""
import asyncio
import json
from typing import Optional, Sequence
import structlog
from pydantic import BaseModel, Field
from merger.allocation import AllocationVector, allocate_locale_counts, normalize_locale_mix
from merger.brief import ResearchBrief, Stage, project_brief, render_brief_into_prompt, render_stage_prompts, SELECTION_TEMPLATE
from merger.cascade import Branch
from merger.config import PipelineConfig
from merger.diversity import (
    SEARCH_TIMEOUT,
    BlacklistRelevance,
    RankedResults,
    RankOrderRelevance,
    RelevanceProvider,
    ScoredRelevance,
    SelectionReport,
    fetch_alternates,
    select_with_diversity,
)
from merger.metrics import MetricsReport, compute_metrics, label_sources
from .clock import Clock, VirtualClock, WallClock
from .fixtures import FixtureFile
from .providers import FetchProvider, FixtureFetchProvider, FixtureSearchProvider, SearchProvider
from .scheduler import FetchRecord, schedule_fetch_async

logger = structlog.get_logger(__name__)


class LocaleKeywords(BaseModel):
    country: str
    language: str
    keywords: list[str] = Field(default_factory=list)


class InferredCountry(BaseModel):
    url: str
    country: Optional[str] = None
    branch: Branch = Branch.NONE


class PipelineRun(BaseModel):
    brief: ResearchBrief
    allocation: AllocationVector
    keywords: list[LocaleKeywords]
    selection: SelectionReport
    fetched: list[FetchRecord]
    metrics: MetricsReport
    inferred: list[InferredCountry]
    prompts: dict[str, str]

    def to_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), indent=2, ensure_ascii=False) + "\n"


def _relevance(config: PipelineConfig, fixtures: FixtureFile) -> RelevanceProvider:
    relevance = ScoredRelevance(fixtures.relevance_scores()) if config.use_relevance_scores else RankOrderRelevance()
    if config.blocked_domains:
        return BlacklistRelevance(config.blocked_domains, relevance, config.cascade.multi_label_suffixes)
    return relevance


def assign_keywords(allocation: AllocationVector, fixtures: FixtureFile) -> list[LocaleKeywords]:
    """The first `count` fixture keywords of each locale, in file order."""
    assigned = []
    for entry in allocation.counts:
        available = fixtures.keywords_for(entry.locale)
        if len(available) < entry.count:
            logger.info("locale has fewer fixture keywords than allocated", locale=entry.locale.tag,
                        allocated=entry.count, available=len(available))
        assigned.append(LocaleKeywords(country=entry.country, language=entry.language,
                                       keywords=available[: entry.count]))
    return assigned


async def search_keywords(
    keywords: Sequence[str],
    provider: SearchProvider,
    deadline_ms: int,
    clock: Clock,
) -> list[RankedResults]:
    """Search every keyword concurrently; results come back in keyword order."""
    async def one(keyword: str) -> RankedResults:
        response, cut_off = await clock.call_within(provider.search(keyword), deadline_ms)
        if cut_off:
            logger.info("search call cut off at its deadline", keyword=keyword, deadline_ms=deadline_ms)
            return RankedResults(keyword=keyword, failure=SEARCH_TIMEOUT)
        _, timed_out = await clock.elapse(response.latency_ms, deadline_ms)
        if timed_out:
            logger.info("search missed its deadline", keyword=keyword, latency_ms=response.latency_ms)
            return RankedResults(keyword=keyword, failure=SEARCH_TIMEOUT)
        return RankedResults(keyword=keyword, results=response.results)

    tasks = {}
    for i in clock.launch_order(range(len(keywords))):
        tasks[i] = asyncio.create_task(one(keywords[i]))
    return [await tasks[i] for i in range(len(keywords))]


async def run_pipeline_async(
    brief: ResearchBrief,
    fixtures: FixtureFile,
    config: Optional[PipelineConfig] = None,
    clock: Optional[Clock] = None,
    search_provider: Optional[SearchProvider] = None,
    fetch_provider: Optional[FetchProvider] = None,
) -> PipelineRun:
    config = config or PipelineConfig()
    if clock is None:
        clock = VirtualClock(config.seed) if config.virtual_clock else WallClock()
    search_provider = search_provider or FixtureSearchProvider(fixtures)
    fetch_provider = fetch_provider or FixtureFetchProvider(fixtures)
    suffixes = config.cascade.multi_label_suffixes

    mix = normalize_locale_mix([e.model_dump() for e in brief.locale_mix.entries], config.normalization)
    brief = brief.model_copy(update={"locale_mix": mix})
    allocation = allocate_locale_counts(mix, config.normalization.total_budget)
    assigned = assign_keywords(allocation, fixtures)
    keywords = [k for group in assigned for k in group.keywords]
    logger.info("keywords assigned", count=len(keywords))

    ranked = await search_keywords(keywords, search_provider, config.selection.search_deadline_ms, clock)
    relevance = _relevance(config, fixtures)
    query = render_brief_into_prompt(project_brief(brief, Stage.SELECTION), SELECTION_TEMPLATE)
    selection = select_with_diversity(ranked, config.selection, relevance, query=query, suffixes=suffixes)

    alternates = fetch_alternates(selection, ranked, config.selection.kappa, config.budget.max_alternates, suffixes)
    fetched = await schedule_fetch_async(
        [s.url for s in selection.selected], alternates, config.budget, fetch_provider, clock,
    )

    labeled = label_sources(selection.selected, fixtures.first_party(), config.cascade)
    metrics = compute_metrics(labeled, suffixes)
    logger.info("pipeline finished", selected=len(selection.selected), lc=metrics.lc)
    return PipelineRun(
        brief=brief,
        allocation=allocation,
        keywords=assigned,
        selection=selection,
        fetched=fetched,
        metrics=metrics,
        inferred=[
            InferredCountry(url=ls.source.url, country=ls.inferred_country.country, branch=ls.inferred_country.branch)
            for ls in labeled
        ],
        prompts=render_stage_prompts(brief),
    )


def run_pipeline(
    brief: ResearchBrief,
    fixtures: FixtureFile,
    config: Optional[PipelineConfig] = None,
    clock: Optional[Clock] = None,
) -> PipelineRun:
    return asyncio.run(run_pipeline_async(brief, fixtures, config, clock))


async def select_from_fixtures(
    fixtures: FixtureFile,
    config: Optional[PipelineConfig] = None,
    clock: Optional[Clock] = None,
) -> SelectionReport:
    """Selection alone, over every fixture search in file order."""
    config = config or PipelineConfig()
    if clock is None:
        clock = VirtualClock(config.seed) if config.virtual_clock else WallClock()
    ranked = await search_keywords(
        list(fixtures.searches), FixtureSearchProvider(fixtures), config.selection.search_deadline_ms, clock,
    )
    relevance = _relevance(config, fixtures)
    return select_with_diversity(ranked, config.selection, relevance, suffixes=config.cascade.multi_label_suffixes)
