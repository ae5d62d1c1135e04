"""Fixture file format.

{
  "locales":  {"<country>-<language>": {"keywords": [...]}},
  "searches": {"<keyword>": {"latency_ms": 0, "results": [{url, title, snippet, ...}]}},
  "labels":   {"<url>": {"is_first_party": true}},
  "aggregators": ["<registrable domain>", ...]
}
Locale keys are normalized ("TR-tr" becomes "tr-tr"). Unknown fields are ignored.
"""
import json
from pathlib import Path
from typing import Any, Mapping, Optional
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator
from merger.errors import FixtureError
from merger.model import Locale, Source
from merger.urls import parse_url_parts


class FixtureResult(BaseModel):
    model_config = ConfigDict(extra="ignore", frozen=True)

    url: str
    title: str = ""
    snippet: str = ""
    publisher_country: Optional[str] = None
    language: Optional[str] = None
    relevance_score: Optional[float] = None
    simulated_latency_ms: int = Field(0, ge=0)
    fetch_fails: bool = False

    @field_validator("url")
    @classmethod
    def _parseable(cls, v: str) -> str:
        parse_url_parts(v)
        return v

    def to_source(self, rank: int) -> Source:
        return Source(
            url=self.url,
            title=self.title,
            snippet=self.snippet,
            rank=rank,
            publisher_country=self.publisher_country,
            language=self.language,
        )


class SearchFixture(BaseModel):
    model_config = ConfigDict(extra="ignore", frozen=True)

    keyword: str = ""
    latency_ms: int = Field(0, ge=0)
    results: list[FixtureResult] = Field(default_factory=list)

    @model_validator(mode="after")
    def _unique_urls(self):
        urls = [r.url for r in self.results]
        if len(set(urls)) != len(urls):
            raise ValueError(f"duplicate result URLs for keyword {self.keyword!r}")
        return self

    def sources(self) -> list[Source]:
        return [r.to_source(rank) for rank, r in enumerate(self.results)]


class LocaleFixture(BaseModel):
    model_config = ConfigDict(extra="ignore", frozen=True)

    keywords: list[str] = Field(default_factory=list)


class UrlLabel(BaseModel):
    model_config = ConfigDict(extra="ignore", frozen=True)

    is_first_party: bool = False


class FixtureFile(BaseModel):
    model_config = ConfigDict(extra="ignore", frozen=True)

    locales: dict[str, LocaleFixture] = Field(default_factory=dict)
    searches: dict[str, SearchFixture] = Field(default_factory=dict)
    labels: dict[str, UrlLabel] = Field(default_factory=dict)
    # registrable domains of booking and review platforms
    aggregators: frozenset[str] = frozenset()

    @field_validator("locales", mode="before")
    @classmethod
    def _normalize_locale_keys(cls, v):
        if isinstance(v, dict):
            return {Locale.parse(str(tag)).tag: fixture for tag, fixture in v.items()}
        return v

    @field_validator("aggregators", mode="before")
    @classmethod
    def _lower_domains(cls, v):
        if isinstance(v, (list, tuple, set, frozenset)):
            return frozenset(str(d).strip().lower() for d in v)
        return v

    @model_validator(mode="before")
    @classmethod
    def _keyword_from_key(cls, data: Any):
        if isinstance(data, dict) and isinstance(data.get("searches"), dict):
            searches = {}
            for key, value in data["searches"].items():
                if isinstance(value, dict) and not value.get("keyword"):
                    value = {**value, "keyword": key}
                searches[key] = value
            data = {**data, "searches": searches}
        return data

    def keywords_for(self, locale: Locale) -> list[str]:
        fixture = self.locales.get(locale.tag)
        return list(fixture.keywords) if fixture else []

    def first_party(self) -> dict[str, bool]:
        return {url: label.is_first_party for url, label in self.labels.items()}

    def relevance_scores(self) -> dict[str, float]:
        scores: dict[str, float] = {}
        for search in self.searches.values():
            for r in search.results:
                if r.relevance_score is not None:
                    scores.setdefault(r.url, r.relevance_score)
        return scores

    def result_for(self, url: str) -> Optional[FixtureResult]:
        for search in self.searches.values():
            for r in search.results:
                if r.url == url:
                    return r
        return None


def parse_fixtures(document: Mapping[str, Any]) -> FixtureFile:
    try:
        return FixtureFile.model_validate(document)
    except ValidationError as e:
        raise FixtureError(f"invalid fixture file: {e}") from e


def load_fixtures(path: str | Path) -> FixtureFile:
    try:
        document = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as e:
        raise FixtureError(f"cannot read fixture file {path}: {e}") from e
    return parse_fixtures(document)


class LabeledFixture(BaseModel):
    """One entry of a labeled-source file: a source plus its first-party label."""
    model_config = ConfigDict(extra="ignore", frozen=True)

    url: str
    title: str = ""
    snippet: str = ""
    publisher_country: Optional[str] = None
    language: Optional[str] = None
    is_first_party: bool = False

    @field_validator("url")
    @classmethod
    def _parseable(cls, v: str) -> str:
        parse_url_parts(v)
        return v

    def to_source(self, rank: int) -> Source:
        return Source(
            url=self.url, title=self.title, snippet=self.snippet, rank=rank,
            publisher_country=self.publisher_country, language=self.language,
        )


def parse_labeled(items: Any) -> list[LabeledFixture]:
    if not isinstance(items, list):
        raise FixtureError("labeled sources must be a JSON array")
    try:
        return [LabeledFixture.model_validate(item) for item in items]
    except ValidationError as e:
        raise FixtureError(f"invalid labeled source: {e}") from e
