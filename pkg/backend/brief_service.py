import json
import os
from typing import Optional
import openai
import structlog
from merger.brief import BRIEF_FIELDS, ResearchBrief, brief_from_document
from merger.config import NormalizationConfig
from merger.errors import FixtureError

logger = structlog.get_logger(__name__)

_CLIENT_CACHE: dict[tuple[Optional[str], Optional[str]], openai.OpenAI] = {}


def get_or_create_client(base_url: Optional[str] = None) -> openai.OpenAI:
    base_url = base_url or os.getenv("LOCALE_MERGE_BASE_URL")
    api_key = os.getenv("LOCALE_MERGE_API_KEY") or os.getenv("OPENAI_API_KEY")
    key = (base_url, api_key)
    if key not in _CLIENT_CACHE:
        _CLIENT_CACHE[key] = openai.OpenAI(api_key=api_key, base_url=base_url)
    return _CLIENT_CACHE[key]


def get_system_prompt(default_locale: str) -> str:
    return f"""
        You are a research planner. Read the user's query and answer with a JSON object
        containing exactly these keys: {", ".join(BRIEF_FIELDS)}.
        "query_understanding" restates what the user actually needs, "source_strategy"
        says which kinds of publishers are worth reading, "keyword_guidance" advises the
        keyword writer, "summary_style" describes the final summary, "locale_hint" names
        the places that matter, and "locale_mix" is a list of
        {{"country": <ISO 3166-1 alpha-2>, "language": <ISO 639-1>, "weight": <integer >= 1>}}
        objects for the regional search indexes worth querying.
        The user's own locale is {default_locale}.
    """


class OpenAIBriefProvider:
    """Generates the brief with a chat model through an OpenAI-compatible endpoint."""

    def __init__(self, query: str, model: str = "qwen-plus", client: Optional[openai.OpenAI] = None,
                 base_url: Optional[str] = None):
        self.query = query
        self.model = model
        self.client = client or get_or_create_client(base_url)

    def get_brief(self, normalization: NormalizationConfig) -> ResearchBrief:
        payload = {
            "model": self.model,
            "messages": [
                {"role": "system", "content": get_system_prompt(normalization.default_locale.tag)},
                {"role": "user", "content": self.query},
            ],
            "response_format": {"type": "json_object"},
        }
        logger.debug("requesting research brief", model=self.model)
        resp = self.client.chat.completions.create(**payload)
        content = resp.choices[0].message.content
        try:
            document = json.loads(content)
        except (TypeError, json.JSONDecodeError) as e:
            raise FixtureError(f"model returned a brief that is not JSON: {e}") from e
        return brief_from_document(document, normalization)
