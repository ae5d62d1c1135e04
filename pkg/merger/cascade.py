"""Country-of-origin inference for a source.

The first satisfied rule wins:
  1. TLD override map (e.g. uk -> gb)
  2. two-letter, non-generic TLD that is an ISO country code
  3. model-inferred publisher country, for generic TLDs
  4. language -> country fallback, for generic TLDs
  5. unknown
TLDs that fail rule 2 (three letters or more, or not an ISO code) are handled as generic.
"""
from enum import Enum
from typing import Iterable, Optional
from pydantic import BaseModel, ConfigDict, model_validator
from .codes import is_country_code
from .config import CascadeConfig
from .model import Source
from .urls import parse_url_parts


class Branch(str, Enum):
    OVERRIDE = "override"
    CC_TLD = "cc_tld"
    MODEL_METADATA = "model_metadata"
    LANGUAGE_FALLBACK = "language_fallback"
    NONE = "none"


class InferenceResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    country: Optional[str] = None
    branch: Branch = Branch.NONE

    @model_validator(mode="after")
    def _branch_matches_country(self):
        if (self.branch == Branch.NONE) != (self.country is None):
            raise ValueError("branch must be 'none' exactly when no country was inferred")
        return self


def infer_country(source: Source, config: Optional[CascadeConfig] = None) -> InferenceResult:
    config = config or CascadeConfig()
    tld = parse_url_parts(source.url, config.multi_label_suffixes).tld

    if tld in config.overrides:
        return InferenceResult(country=config.overrides[tld], branch=Branch.OVERRIDE)
    if len(tld) == 2 and tld not in config.generic_tlds and is_country_code(tld):
        return InferenceResult(country=tld, branch=Branch.CC_TLD)
    if source.publisher_country is not None:
        return InferenceResult(country=source.publisher_country, branch=Branch.MODEL_METADATA)
    if source.language is not None and source.language in config.fallback:
        return InferenceResult(country=config.fallback[source.language], branch=Branch.LANGUAGE_FALLBACK)
    return InferenceResult()


def infer_countries(sources: Iterable[Source], config: Optional[CascadeConfig] = None) -> list[InferenceResult]:
    config = config or CascadeConfig()
    return [infer_country(s, config) for s in sources]
