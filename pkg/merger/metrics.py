"""Selection quality metrics: first-party ratio, duplicate-domain ratio, locale coverage."""
from collections import Counter
from math import comb
from typing import Iterable, Mapping, Optional, Sequence
from pydantic import BaseModel, ConfigDict, Field
from .cascade import InferenceResult, infer_countries
from .config import CascadeConfig
from .errors import UndefinedMetric
from .model import Source
from .urls import parse_url_parts


class LabeledSource(BaseModel):
    model_config = ConfigDict(frozen=True)

    source: Source
    is_first_party: bool = False
    inferred_country: InferenceResult = Field(default_factory=InferenceResult)


class MetricsReport(BaseModel):
    fpr: Optional[float] = None
    ddr: Optional[float] = None
    lc: int = 0


def label_sources(
    sources: Sequence[Source],
    first_party: Mapping[str, bool],
    cascade: Optional[CascadeConfig] = None,
) -> list[LabeledSource]:
    cascade = cascade or CascadeConfig()
    return [
        LabeledSource(source=s, is_first_party=bool(first_party.get(s.url, False)), inferred_country=inferred)
        for s, inferred in zip(sources, infer_countries(sources, cascade))
    ]


def first_party_ratio(sources: Sequence[LabeledSource]) -> float:
    if not sources:
        raise UndefinedMetric("first-party ratio is undefined for an empty selection")
    return sum(1 for s in sources if s.is_first_party) / len(sources)


def same_domain_pairs(sources: Sequence[LabeledSource], suffixes=None) -> int:
    counts = Counter(parse_url_parts(s.source.url, suffixes).registrable_domain for s in sources)
    return sum(comb(c, 2) for c in counts.values())


def duplicate_domain_ratio(sources: Sequence[LabeledSource], suffixes=None) -> float:
    if len(sources) < 2:
        raise UndefinedMetric("duplicate-domain ratio needs at least two sources")
    return same_domain_pairs(sources, suffixes) / comb(len(sources), 2)


def locale_coverage(sources: Sequence[LabeledSource]) -> int:
    return len({s.inferred_country.country for s in sources if s.inferred_country.country is not None})


def compute_metrics(sources: Sequence[LabeledSource], suffixes=None) -> MetricsReport:
    report = MetricsReport(lc=locale_coverage(sources))
    try:
        report.fpr = first_party_ratio(sources)
    except UndefinedMetric:
        pass
    try:
        report.ddr = duplicate_domain_ratio(sources, suffixes)
    except UndefinedMetric:
        pass
    return report


def unseen_aggregator_ratio(
    sources: Sequence[Source],
    aggregators: Iterable[str],
    blocked: Iterable[str],
    suffixes=None,
) -> float:
    """Share of sources from aggregator domains that a blacklist did not name."""
    if not sources:
        raise UndefinedMetric("unseen-aggregator ratio is undefined for an empty selection")
    unseen = set(aggregators) - set(blocked)
    return sum(1 for s in sources if parse_url_parts(s.url, suffixes).registrable_domain in unseen) / len(sources)
