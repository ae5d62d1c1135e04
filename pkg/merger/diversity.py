"""Keyword-ordered source selection under a per-domain cap (kappa)."""
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Protocol, Sequence
import structlog
from pydantic import BaseModel, ConfigDict, Field, model_validator
from .config import SelectionConfig
from .model import Source
from .urls import parse_url_parts

logger = structlog.get_logger(__name__)

SEARCH_TIMEOUT = "search_timeout"
NO_RESULTS = "no_results"
ALL_BLOCKED = "all_candidates_blocked"
BUDGET_EXHAUSTED = "budget_exhausted"


class RankedResults(BaseModel):
    model_config = ConfigDict(frozen=True)

    keyword: str
    results: list[Source] = Field(default_factory=list)
    failure: Optional[str] = None

    @model_validator(mode="after")
    def _unique(self):
        urls = [s.url for s in self.results]
        if len(set(urls)) != len(urls):
            raise ValueError(f"duplicate URLs in results for keyword {self.keyword!r}")
        ranks = [s.rank for s in self.results]
        if len(set(ranks)) != len(ranks):
            raise ValueError(f"duplicate ranks in results for keyword {self.keyword!r}")
        return self


class RelevanceProvider(Protocol):
    def rank(self, results: Sequence[Source], query: str = "") -> list[Source]: ...


class RankOrderRelevance:
    """Keeps the search provider's order."""

    def rank(self, results: Sequence[Source], query: str = "") -> list[Source]:
        return list(results)


class ScoredRelevance:
    """Orders by a per-URL score, highest first; unscored URLs go last, ties by rank."""

    def __init__(self, scores: Mapping[str, float]):
        self.scores = dict(scores)

    def rank(self, results: Sequence[Source], query: str = "") -> list[Source]:
        def key(s: Source):
            score = self.scores.get(s.url)
            return (score is None, -(score or 0.0), s.rank)
        return sorted(results, key=key)


class BlacklistRelevance:
    """Drops results whose registrable domain is blocked, then ranks the rest with `inner`."""

    def __init__(self, blocked_domains: Iterable[str], inner: Optional[RelevanceProvider] = None, suffixes=None):
        self.blocked = frozenset(d.strip().lower() for d in blocked_domains)
        self.inner = inner or RankOrderRelevance()
        self._domain = _domain_fn(suffixes)

    def rank(self, results: Sequence[Source], query: str = "") -> list[Source]:
        return self.inner.rank([s for s in results if self._domain(s) not in self.blocked], query)


@dataclass
class SelectionState:
    selected: list[Source] = field(default_factory=list)
    used_urls: set[str] = field(default_factory=set)
    domain_counts: dict[str, int] = field(default_factory=dict)

    def add(self, source: Source, domain: str) -> None:
        self.selected.append(source)
        self.used_urls.add(source.url)
        self.domain_counts[domain] = self.domain_counts.get(domain, 0) + 1

    def is_consistent(self, kappa: int, domain: Callable[[Source], str]) -> bool:
        if self.used_urls != {s.url for s in self.selected} or len(self.used_urls) != len(self.selected):
            return False
        if dict(Counter(domain(s) for s in self.selected)) != self.domain_counts:
            return False
        return all(c <= kappa for c in self.domain_counts.values())


class SkippedKeyword(BaseModel):
    keyword: str
    reason: str


class KeywordChoice(BaseModel):
    keyword: str
    chosen_url: Optional[str] = None
    fallback_depth: int = 0


class SelectionReport(BaseModel):
    selected: list[Source] = Field(default_factory=list)
    skipped_keywords: list[SkippedKeyword] = Field(default_factory=list)
    per_keyword_choice: list[KeywordChoice] = Field(default_factory=list)
    candidates_examined: int = 0


def _scan(results: Iterable[Source], admissible: Callable[[Source], bool]) -> tuple[Optional[Source], int]:
    examined = 0
    for s in results:
        examined += 1
        if admissible(s):
            return s, examined
    return None, examined


def _domain_fn(suffixes) -> Callable[[Source], str]:
    cache: dict[str, str] = {}

    def domain(s: Source) -> str:
        if s.url not in cache:
            cache[s.url] = parse_url_parts(s.url, suffixes).registrable_domain
        return cache[s.url]
    return domain


def next_best(results: Sequence[Source], used_urls: set[str]) -> Optional[Source]:
    found, _ = _scan(results, lambda s: s.url not in used_urls)
    return found


def next_different_domain(
    results: Sequence[Source],
    domain_counts: Mapping[str, int],
    kappa: int,
    used_urls: set[str],
    suffixes=None,
) -> Optional[Source]:
    domain = _domain_fn(suffixes)
    found, _ = _scan(
        results,
        lambda s: s.url not in used_urls and domain_counts.get(domain(s), 0) < kappa,
    )
    return found


def select_with_diversity(
    ranked: Sequence[RankedResults],
    config: SelectionConfig,
    relevance: Optional[RelevanceProvider] = None,
    query: str = "",
    suffixes=None,
    on_iteration: Optional[Callable[[SelectionState], None]] = None,
) -> SelectionReport:
    """Pick at most one source per keyword, in keyword order.

    The relevance-top candidate is replaced by the next unused URL when its URL was
    already taken, and by the first unused URL of a domain still under `kappa` when
    its domain is saturated. A keyword with no admissible candidate contributes nothing.
    """
    relevance = relevance or RankOrderRelevance()
    domain = _domain_fn(suffixes)
    kappa = config.kappa
    state = SelectionState()
    report = SelectionReport()

    for index, rr in enumerate(ranked):
        if len(state.selected) >= config.max_sources:
            report.skipped_keywords.extend(
                SkippedKeyword(keyword=r.keyword, reason=BUDGET_EXHAUSTED) for r in ranked[index:]
            )
            break

        ordered = relevance.rank(rr.results, query)
        if not ordered:
            reason = rr.failure or NO_RESULTS
            report.skipped_keywords.append(SkippedKeyword(keyword=rr.keyword, reason=reason))
            report.per_keyword_choice.append(KeywordChoice(keyword=rr.keyword))
            logger.info("keyword skipped", keyword=rr.keyword, reason=reason)
            if on_iteration:
                on_iteration(state)
            continue

        candidate: Optional[Source] = ordered[0]
        report.candidates_examined += 1
        depth = 0
        if candidate.url in state.used_urls:
            candidate, examined = _scan(ordered, lambda s: s.url not in state.used_urls)
            report.candidates_examined += examined
            depth = 1
        # the cap applies to whatever candidate survived the URL check
        if candidate is not None and state.domain_counts.get(domain(candidate), 0) >= kappa:
            candidate, examined = _scan(
                ordered,
                lambda s: s.url not in state.used_urls and state.domain_counts.get(domain(s), 0) < kappa,
            )
            report.candidates_examined += examined
            depth = 2

        if candidate is None:
            report.skipped_keywords.append(SkippedKeyword(keyword=rr.keyword, reason=ALL_BLOCKED))
            report.per_keyword_choice.append(KeywordChoice(keyword=rr.keyword, fallback_depth=depth))
            logger.info("keyword skipped", keyword=rr.keyword, reason=ALL_BLOCKED)
        else:
            state.add(candidate, domain(candidate))
            report.per_keyword_choice.append(
                KeywordChoice(keyword=rr.keyword, chosen_url=candidate.url, fallback_depth=depth)
            )
            logger.debug("source selected", keyword=rr.keyword, url=candidate.url, depth=depth)
        if on_iteration:
            on_iteration(state)

    report.selected = list(state.selected)
    return report


def fetch_alternates(
    report: SelectionReport,
    ranked: Sequence[RankedResults],
    kappa: int,
    limit: int,
    suffixes=None,
) -> dict[str, list[str]]:
    """Replacement URLs for each selected source, taken from its own keyword's results.

    An alternate is never a selected URL or another source's alternate. Primaries are
    handled in selection order and each one's alternates claim a slot in every foreign
    domain they touch, so the served set stays within `kappa` whichever primaries fail.
    """
    domain = _domain_fn(suffixes)
    taken_urls = {s.url for s in report.selected}
    claimed = Counter(domain(s) for s in report.selected)
    alternates: dict[str, list[str]] = {}
    for rr, choice in zip(ranked, report.per_keyword_choice):
        primary = choice.chosen_url
        if primary is None:
            continue
        primary_domain = next(domain(s) for s in rr.results if s.url == primary)
        room = claimed.copy()
        room[primary_domain] -= 1
        picked = [s for s in rr.results if s.url not in taken_urls and room[domain(s)] < kappa][:limit]
        alternates[primary] = [s.url for s in picked]
        taken_urls.update(alternates[primary])
        for d in {domain(s) for s in picked} - {primary_domain}:
            claimed[d] += 1
    return alternates
