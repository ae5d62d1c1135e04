from typing import Annotated, Optional
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from .model import CountryCode, LanguageCode, Locale
from .urls import DEFAULT_MULTI_LABEL_SUFFIXES

DEFAULT_MAX_LOCALES = 4
DEFAULT_GENERIC_TLDS = frozenset({"com", "org", "net", "edu", "gov", "io", "ai", "app", "dev", "co"})
DEFAULT_BLOCKED_AGGREGATORS = frozenset({"tripadvisor.com", "yelp.com", "booking.com"})
DEFAULT_OVERRIDES = {"uk": "gb"}
DEFAULT_LANGUAGE_FALLBACK = {
    "tr": "tr", "de": "de", "en": "us", "ar": "sa", "fr": "fr", "es": "es", "it": "it",
    "ja": "jp", "ko": "kr", "zh": "cn", "pt": "br", "ru": "ru", "nl": "nl",
}

OverrideMap = dict[str, CountryCode]
LanguageFallbackMap = dict[LanguageCode, CountryCode]
GenericTldSet = frozenset[str]

PositiveInt = Annotated[int, Field(ge=1)]


class CascadeConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    overrides: OverrideMap = Field(default_factory=lambda: dict(DEFAULT_OVERRIDES))
    fallback: LanguageFallbackMap = Field(default_factory=lambda: dict(DEFAULT_LANGUAGE_FALLBACK))
    generic_tlds: GenericTldSet = DEFAULT_GENERIC_TLDS
    multi_label_suffixes: frozenset[str] = DEFAULT_MULTI_LABEL_SUFFIXES

    @field_validator("overrides", mode="before")
    @classmethod
    def _lower_keys(cls, v):
        if isinstance(v, dict):
            return {str(k).strip().lower().lstrip("."): val for k, val in v.items()}
        return v

    @field_validator("generic_tlds", "multi_label_suffixes", mode="before")
    @classmethod
    def _lower_members(cls, v):
        if isinstance(v, (list, tuple, set, frozenset)):
            return frozenset(str(x).strip().lower().lstrip(".") for x in v)
        return v


class SelectionConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    kappa: PositiveInt = 1
    max_sources: PositiveInt = 8
    search_deadline_ms: PositiveInt = 10_000


class NormalizationConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    default_locale: Locale = Field(default_factory=lambda: Locale(country="tr", language="tr"))
    max_locales: PositiveInt = DEFAULT_MAX_LOCALES
    total_budget: PositiveInt = 8

    @classmethod
    def for_budget(cls, total_budget: int, max_locales: Optional[int] = None) -> "NormalizationConfig":
        """Config for a keyword budget; without an explicit cap, at most `total_budget` locales are kept."""
        if max_locales is None:
            max_locales = min(DEFAULT_MAX_LOCALES, total_budget)
        return cls(total_budget=total_budget, max_locales=max_locales)

    @model_validator(mode="after")
    def _budget_covers_locales(self):
        if self.total_budget < self.max_locales:
            raise ValueError(
                f"total_budget ({self.total_budget}) must be >= max_locales ({self.max_locales}) "
                "so every locale can receive a keyword."
            )
        return self


class BudgetConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    per_source_total_ms: PositiveInt = 45_000
    per_step_ms: PositiveInt = 15_000
    max_alternates: PositiveInt = 4
    fetch_concurrency: PositiveInt = 3

    @model_validator(mode="after")
    def _step_within_total(self):
        if self.per_step_ms > self.per_source_total_ms:
            raise ValueError("per_step_ms must be <= per_source_total_ms")
        return self


class PipelineConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    selection: SelectionConfig = Field(default_factory=SelectionConfig)
    normalization: NormalizationConfig = Field(default_factory=NormalizationConfig)
    budget: BudgetConfig = Field(default_factory=BudgetConfig)
    cascade: CascadeConfig = Field(default_factory=CascadeConfig)
    use_relevance_scores: bool = False
    seed: int = 0
    virtual_clock: bool = True
    # registrable domains the selection stage may not pick
    blocked_domains: frozenset[str] = frozenset()

    @field_validator("blocked_domains", mode="before")
    @classmethod
    def _lower_domains(cls, v):
        if isinstance(v, (list, tuple, set, frozenset)):
            return frozenset(str(d).strip().lower() for d in v)
        return v
