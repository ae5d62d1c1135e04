"""Research brief, per-stage projections and prompt rendering."""
import json
from enum import Enum
from pathlib import Path
from string import Formatter
from typing import Any, Mapping, Optional, Protocol
from pydantic import BaseModel, ConfigDict, ValidationError, field_validator
from .allocation import LocaleMix, normalize_locale_mix
from .config import NormalizationConfig
from .errors import DomainError, FixtureError, MissingField

QUERY_UNDERSTANDING = "query_understanding"
SOURCE_STRATEGY = "source_strategy"
KEYWORD_GUIDANCE = "keyword_guidance"
SUMMARY_STYLE = "summary_style"
LOCALE_HINT = "locale_hint"
LOCALE_MIX = "locale_mix"

BRIEF_FIELDS = (QUERY_UNDERSTANDING, SOURCE_STRATEGY, KEYWORD_GUIDANCE, SUMMARY_STYLE, LOCALE_HINT, LOCALE_MIX)

# short symbols accepted in templates
FIELD_ALIASES = {
    "u": QUERY_UNDERSTANDING,
    "σ": SOURCE_STRATEGY,
    "κ": KEYWORD_GUIDANCE,
    "τ": SUMMARY_STYLE,
    "λ": LOCALE_HINT,
    "M": LOCALE_MIX,
}


class Stage(str, Enum):
    KEYWORD = "keyword"
    SELECTION = "selection"
    SUMMARY = "summary"


STAGE_FIELDS: dict[Stage, frozenset[str]] = {
    Stage.KEYWORD: frozenset({QUERY_UNDERSTANDING, SOURCE_STRATEGY, KEYWORD_GUIDANCE, LOCALE_HINT, LOCALE_MIX}),
    Stage.SELECTION: frozenset({QUERY_UNDERSTANDING, SOURCE_STRATEGY}),
    Stage.SUMMARY: frozenset({QUERY_UNDERSTANDING, SOURCE_STRATEGY, SUMMARY_STYLE}),
}

KEYWORD_TEMPLATE = (
    "Context: {query_understanding}\n"
    "Strategy: {source_strategy}\n"
    "Guidance: {keyword_guidance}\n"
    "Locale hint: {locale_hint}\n"
    "Locale mix: {locale_mix}"
)
SELECTION_TEMPLATE = "Context: {query_understanding}\nStrategy: {source_strategy}"
SUMMARY_TEMPLATE = "Context: {query_understanding}\nStrategy: {source_strategy}\nStyle: {summary_style}"

STAGE_TEMPLATES = {
    Stage.KEYWORD: KEYWORD_TEMPLATE,
    Stage.SELECTION: SELECTION_TEMPLATE,
    Stage.SUMMARY: SUMMARY_TEMPLATE,
}


class ResearchBrief(BaseModel):
    model_config = ConfigDict(frozen=True)

    query_understanding: str = ""
    source_strategy: str = ""
    keyword_guidance: str = ""
    summary_style: str = ""
    locale_hint: str = ""
    locale_mix: LocaleMix

    @field_validator(QUERY_UNDERSTANDING, SOURCE_STRATEGY, KEYWORD_GUIDANCE, SUMMARY_STYLE, LOCALE_HINT, mode="before")
    @classmethod
    def _never_absent(cls, v):
        return "" if v is None else v


class StageProjection(BaseModel):
    model_config = ConfigDict(frozen=True)

    stage: Stage
    fields_present: frozenset[str]

    @classmethod
    def for_stage(cls, stage: Stage) -> "StageProjection":
        return cls(stage=stage, fields_present=STAGE_FIELDS[stage])


class LoiParameters(BaseModel):
    model_config = ConfigDict(frozen=True)

    alpha: float
    beta: float
    k: int

    @field_validator("alpha", "beta")
    @classmethod
    def check_probability(cls, v: float) -> float:
        if not (0 < v <= 1):
            raise ValueError(f"should be in (0, 1], got {v}")
        return v

    @field_validator("k", mode="before")
    @classmethod
    def check_k(cls, v):
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ValueError(f"should be an integer >= 1, got {v!r}")
        return v

    @classmethod
    def build(cls, alpha: float, beta: float, k: int) -> "LoiParameters":
        try:
            return cls(alpha=alpha, beta=beta, k=k)
        except ValidationError as e:
            problems = "; ".join(f"{err['loc'][0]} {err['msg']}" for err in e.errors())
            raise DomainError(problems) from e


def project_brief(brief: ResearchBrief, stage: Stage) -> dict[str, Any]:
    """Only the stage's fields; the rest are not in the result at all."""
    return {name: getattr(brief, name) for name in BRIEF_FIELDS if name in STAGE_FIELDS[Stage(stage)]}


def loi_success_probability(params: LoiParameters) -> float:
    """Probability that at least one of k stages picks up the embedded objective."""
    a, b, k = params.alpha, params.beta, params.k
    # model_construct skips the field validators
    if not (0 < a <= 1) or not (0 < b <= 1):
        raise DomainError(f"alpha and beta must lie in (0, 1], got alpha={a}, beta={b}")
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise DomainError(f"k must be an integer >= 1, got {k!r}")
    return 1.0 - (1.0 - a * b) ** k


def _as_text(value: Any) -> str:
    if isinstance(value, LocaleMix):
        return value.render()
    return str(value)


def _escape(text: str) -> str:
    return text.replace("{", "{{").replace("}", "}}")


def fill_placeholders(template: str, values: Mapping[str, Any], strict: bool = False) -> str:
    """Substitute `{name}` placeholders from `values`.

    Doubled braces are literals. With `strict`, an unknown placeholder raises
    MissingField and the result is final text; otherwise unknown placeholders are
    left in place and the result is still a template.
    """
    out = []
    for literal, name, spec, conversion in Formatter().parse(template):
        out.append(literal if strict else _escape(literal))
        if name is None:
            continue
        key = FIELD_ALIASES.get(name, name)
        if key in values:
            text = _as_text(values[key])
            out.append(text if strict else _escape(text))
        elif strict:
            raise MissingField(name, set(values))
        else:
            suffix = (f"!{conversion}" if conversion else "") + (f":{spec}" if spec else "")
            out.append("{" + name + suffix + "}")
    return "".join(out)


def render_brief_into_prompt(projection: Mapping[str, Any], template: str) -> str:
    return fill_placeholders(template, projection, strict=True)


def render_stage_prompts(brief: ResearchBrief) -> dict[str, str]:
    return {
        stage.value: render_brief_into_prompt(project_brief(brief, stage), template)
        for stage, template in STAGE_TEMPLATES.items()
    }


class BriefProvider(Protocol):
    def get_brief(self, normalization: NormalizationConfig) -> ResearchBrief: ...


def brief_from_document(document: Mapping[str, Any], normalization: NormalizationConfig) -> ResearchBrief:
    """Build a brief from its JSON form, repairing the locale mix on the way."""
    if not isinstance(document, Mapping):
        raise FixtureError("brief must be a JSON object")
    data = {name: document.get(name, "") for name in BRIEF_FIELDS if name != LOCALE_MIX}
    data[LOCALE_MIX] = normalize_locale_mix(document.get(LOCALE_MIX) or [], normalization)
    try:
        return ResearchBrief.model_validate(data)
    except ValidationError as e:
        raise FixtureError(f"invalid brief: {e}") from e


class FixtureBriefProvider:
    """Reads a brief from a JSON file or string."""

    def __init__(self, path: Optional[str | Path] = None, text: Optional[str] = None):
        if (path is None) == (text is None):
            raise ValueError("give exactly one of path or text")
        self.path = Path(path) if path is not None else None
        self.text = text

    def get_brief(self, normalization: NormalizationConfig) -> ResearchBrief:
        try:
            raw = self.text if self.text is not None else self.path.read_text(encoding="utf-8")
            document = json.loads(raw)
        except (OSError, json.JSONDecodeError) as e:
            raise FixtureError(f"cannot read brief: {e}") from e
        return brief_from_document(document, normalization)
