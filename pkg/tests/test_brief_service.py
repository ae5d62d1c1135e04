import json
import pytest
from backend import brief_service
from backend.brief_service import OpenAIBriefProvider, get_or_create_client, get_system_prompt
from merger.config import NormalizationConfig
from merger.errors import FixtureError


def fake_client(mocker, content):
    client = mocker.MagicMock()
    message = mocker.MagicMock()
    message.content = content
    client.chat.completions.create.return_value.choices = [mocker.MagicMock(message=message)]
    return client


def test_brief_is_requested_in_json_mode(mocker):
    document = {
        "query_understanding": "Q",
        "source_strategy": "S",
        "locale_mix": [{"country": "de", "language": "de", "weight": 2}],
    }
    client = fake_client(mocker, json.dumps(document))
    brief = OpenAIBriefProvider("hotel reviews", model="test-model", client=client).get_brief(NormalizationConfig())

    assert brief.query_understanding == "Q"
    assert brief.locale_mix.render() == "de-de:2, tr-tr:1"
    kwargs = client.chat.completions.create.call_args.kwargs
    assert kwargs["model"] == "test-model"
    assert kwargs["response_format"] == {"type": "json_object"}
    assert kwargs["messages"][1] == {"role": "user", "content": "hotel reviews"}
    assert "tr-tr" in kwargs["messages"][0]["content"]


def test_non_json_answer_is_a_fixture_error(mocker):
    client = fake_client(mocker, "Sure! Here is your brief:")
    with pytest.raises(FixtureError):
        OpenAIBriefProvider("q", client=client).get_brief(NormalizationConfig())


def test_system_prompt_lists_every_field():
    prompt = get_system_prompt("de-de")
    for name in ("query_understanding", "source_strategy", "keyword_guidance", "summary_style", "locale_hint", "locale_mix"):
        assert name in prompt
    assert "de-de" in prompt


def test_clients_are_cached_per_endpoint(mocker, monkeypatch):
    monkeypatch.setenv("LOCALE_MERGE_API_KEY", "test-key")
    monkeypatch.setattr(brief_service, "_CLIENT_CACHE", {})
    factory = mocker.patch("backend.brief_service.openai.OpenAI")
    first = get_or_create_client("http://localhost:9000/v1")
    second = get_or_create_client("http://localhost:9000/v1")
    assert first is second
    factory.assert_called_once_with(api_key="test-key", base_url="http://localhost:9000/v1")
