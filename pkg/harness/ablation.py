"""Side-by-side runs of the evaluation configurations over one fixture set.

baseline             - default locale only, no domain cap, provider order
no_brief             - normalized multi-locale mix with the kappa cap, provider order
full                 - as no_brief, ranked by the fixtures' relevance scores
explicit_constraint  - as no_brief, with a named aggregator blacklist instead of a brief

Every run also reports the share of selected sources from aggregators the blacklist
does not name, using the fixture file's designated aggregators.
"""
import asyncio
from typing import Optional
from pydantic import BaseModel
from merger.allocation import LocaleMix, WeightedLocale
from merger.brief import ResearchBrief
from merger.config import DEFAULT_BLOCKED_AGGREGATORS, PipelineConfig
from merger.errors import UndefinedMetric
from merger.metrics import MetricsReport, unseen_aggregator_ratio
from .fixtures import FixtureFile
from .pipeline import run_pipeline_async

BASELINE = "baseline"
NO_BRIEF = "no_brief"
FULL = "full"
EXPLICIT_CONSTRAINT = "explicit_constraint"


class AblationResult(BaseModel):
    name: str
    selected: int
    metrics: MetricsReport
    unseen_aggregator_ratio: Optional[float] = None


def blacklist_for(config: PipelineConfig) -> frozenset[str]:
    return config.blocked_domains or DEFAULT_BLOCKED_AGGREGATORS


def ablation_configs(brief: ResearchBrief, config: PipelineConfig) -> list[tuple[str, ResearchBrief, PipelineConfig]]:
    default = config.normalization.default_locale
    single = LocaleMix([WeightedLocale(country=default.country, language=default.language, weight=1)])
    uncapped = config.selection.model_copy(update={"kappa": config.selection.max_sources})
    unblocked = frozenset()
    return [
        (
            BASELINE,
            brief.model_copy(update={"locale_mix": single}),
            config.model_copy(update={"selection": uncapped, "use_relevance_scores": False, "blocked_domains": unblocked}),
        ),
        (NO_BRIEF, brief, config.model_copy(update={"use_relevance_scores": False, "blocked_domains": unblocked})),
        (FULL, brief, config.model_copy(update={"use_relevance_scores": True, "blocked_domains": unblocked})),
        (
            EXPLICIT_CONSTRAINT,
            brief,
            config.model_copy(update={"use_relevance_scores": False, "blocked_domains": blacklist_for(config)}),
        ),
    ]


async def run_ablation_async(
    brief: ResearchBrief, fixtures: FixtureFile, config: Optional[PipelineConfig] = None
) -> list[AblationResult]:
    config = config or PipelineConfig()
    blacklist = blacklist_for(config)
    suffixes = config.cascade.multi_label_suffixes
    results = []
    for name, variant_brief, variant_config in ablation_configs(brief, config):
        run = await run_pipeline_async(variant_brief, fixtures, variant_config)
        try:
            unseen = unseen_aggregator_ratio(run.selection.selected, fixtures.aggregators, blacklist, suffixes)
        except UndefinedMetric:
            unseen = None
        results.append(AblationResult(
            name=name, selected=len(run.selection.selected), metrics=run.metrics, unseen_aggregator_ratio=unseen,
        ))
    return results


def run_ablation(brief: ResearchBrief, fixtures: FixtureFile, config: Optional[PipelineConfig] = None) -> list[AblationResult]:
    return asyncio.run(run_ablation_async(brief, fixtures, config))
