from typing import Annotated, Optional
from pydantic import AfterValidator, BaseModel, ConfigDict, Field, field_validator
from .codes import is_country_code, is_language_code
from .urls import parse_url_parts


def _two_letters(v: str, kind: str) -> str:
    vv = v.strip().lower()
    if len(vv) != 2 or not vv.isascii() or not vv.isalpha():
        raise ValueError(f"{kind} must be exactly 2 ASCII letters, got {v!r}")
    return vv


def _country(v: str) -> str:
    vv = _two_letters(v, "country code")
    if not is_country_code(vv):
        raise ValueError(f"{v!r} is not an ISO 3166-1 alpha-2 code")
    return vv


def _language(v: str) -> str:
    vv = _two_letters(v, "language code")
    if not is_language_code(vv):
        raise ValueError(f"{v!r} is not an ISO 639-1 code")
    return vv


CountryCode = Annotated[str, AfterValidator(_country)]
LanguageCode = Annotated[str, AfterValidator(_language)]


def coerce_country(v: object) -> Optional[str]:
    """Return a valid country code or None; used for model-inferred metadata."""
    if not isinstance(v, str):
        return None
    return v.strip().lower() if is_country_code(v) else None


def coerce_language(v: object) -> Optional[str]:
    if not isinstance(v, str):
        return None
    return v.strip().lower() if is_language_code(v) else None


class Locale(BaseModel):
    model_config = ConfigDict(frozen=True)

    country: CountryCode
    language: LanguageCode

    @property
    def tag(self) -> str:
        return f"{self.country}-{self.language}"

    @classmethod
    def parse(cls, tag: str) -> "Locale":
        country, sep, language = tag.partition("-")
        if not sep:
            raise ValueError(f"Locale tag must look like 'tr-tr', got {tag!r}")
        return cls(country=country, language=language)


class Source(BaseModel):
    model_config = ConfigDict(frozen=True)

    url: str
    title: str = ""
    snippet: str = ""
    rank: int = Field(0, ge=0)
    publisher_country: Optional[str] = None
    language: Optional[str] = None

    @field_validator("url")
    @classmethod
    def _parseable(cls, v: str) -> str:
        parse_url_parts(v)
        return v

    # upstream metadata is best-effort: garbage becomes "absent"
    @field_validator("publisher_country", mode="before")
    @classmethod
    def _normalize_country(cls, v):
        return coerce_country(v)

    @field_validator("language", mode="before")
    @classmethod
    def _normalize_language(cls, v):
        return coerce_language(v)


def domain_of(source: Source, suffixes=None) -> str:
    return parse_url_parts(source.url, suffixes).registrable_domain
