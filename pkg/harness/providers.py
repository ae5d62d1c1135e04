"""Search and fetch providers backed by fixtures."""
from typing import Optional, Protocol
from pydantic import BaseModel, Field
from merger.model import Source
from .fixtures import FixtureFile


class SearchResponse(BaseModel):
    keyword: str
    results: list[Source] = Field(default_factory=list)
    latency_ms: int = 0


class FetchResponse(BaseModel):
    url: str
    ok: bool = True
    latency_ms: int = 0


class SearchProvider(Protocol):
    async def search(self, keyword: str) -> SearchResponse: ...


class FetchProvider(Protocol):
    async def fetch(self, url: str) -> FetchResponse: ...


class FixtureSearchProvider:
    def __init__(self, fixtures: FixtureFile):
        self.fixtures = fixtures

    async def search(self, keyword: str) -> SearchResponse:
        fixture = self.fixtures.searches.get(keyword)
        if fixture is None:
            return SearchResponse(keyword=keyword)
        return SearchResponse(keyword=keyword, results=fixture.sources(), latency_ms=fixture.latency_ms)


class FixtureFetchProvider:
    """Reports each URL's simulated latency; URLs missing from the fixtures fail."""

    def __init__(self, fixtures: FixtureFile):
        self.fixtures = fixtures

    async def fetch(self, url: str) -> FetchResponse:
        result = self.fixtures.result_for(url)
        if result is None:
            return FetchResponse(url=url, ok=False)
        return FetchResponse(url=url, ok=not result.fetch_fails, latency_ms=result.simulated_latency_ms)


class LatencyTableFetchProvider:
    """Fetcher driven by an explicit url -> latency table; handy for budget scenarios."""

    def __init__(self, latencies: dict[str, int], failing: Optional[set[str]] = None):
        self.latencies = dict(latencies)
        self.failing = set(failing or ())

    async def fetch(self, url: str) -> FetchResponse:
        return FetchResponse(url=url, ok=url not in self.failing, latency_ms=self.latencies.get(url, 0))
