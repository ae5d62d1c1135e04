import json
import pytest
from fastapi.testclient import TestClient
from backend.app import app
from conftest import DEMO_BRIEF, DEMO_FIXTURES

client = TestClient(app)


def test_allocate():
    mix = [{"country": "tr", "language": "tr", "weight": 3},
           {"country": "de", "language": "de", "weight": 2},
           {"country": "us", "language": "en", "weight": 1}]
    resp = client.post("/allocate", json={"mix": mix, "total": 10})
    assert resp.status_code == 200
    assert [c["count"] for c in resp.json()["counts"]] == [5, 3, 2]


def test_allocate_budget_too_small():
    mix = [{"country": "tr", "language": "tr", "weight": 1}, {"country": "de", "language": "de", "weight": 1}]
    resp = client.post("/allocate", json={"mix": mix, "total": 1})
    assert resp.status_code == 422
    assert "smaller than the number of locales" in resp.json()["detail"]


def test_allocate_rejects_unknown_country():
    resp = client.post("/allocate", json={"mix": [{"country": "xx", "language": "tr", "weight": 1}], "total": 2})
    assert resp.status_code == 422


@pytest.mark.parametrize("body,expected", [
    ({"url": "https://site.uk/x"}, {"country": "gb", "branch": "override"}),
    ({"url": "https://x.io", "language": "de"}, {"country": "de", "branch": "language_fallback"}),
    ({"url": "https://x.com"}, {"country": None, "branch": "none"}),
    ({"url": "https://x.de", "overrides": {"de": "at"}}, {"country": "at", "branch": "override"}),
])
def test_infer_country(body, expected):
    resp = client.post("/infer_country", json=body)
    assert resp.status_code == 200
    assert resp.json() == expected


def test_infer_country_malformed_url():
    assert client.post("/infer_country", json={"url": "ftp only-garbage"}).status_code == 422


def test_select_over_fixtures():
    fixtures = json.loads(DEMO_FIXTURES.read_text(encoding="utf-8"))
    resp = client.post("/select", json={"fixtures": fixtures, "kappa": 1, "max_sources": 3})
    assert resp.status_code == 200
    body = resp.json()
    assert len(body["selected"]) == 3
    assert {s["reason"] for s in body["skipped_keywords"]} >= {"budget_exhausted"}


def test_metrics():
    labeled = [
        {"url": "https://www.kestaneotel.com.tr/", "is_first_party": True},
        {"url": "https://www.tripadvisor.com.tr/a"},
        {"url": "https://tripadvisor.com.tr/b"},
    ]
    resp = client.post("/metrics", json={"labeled": labeled})
    assert resp.status_code == 200
    body = resp.json()
    assert body["lc"] == 1
    assert body["ddr"] == pytest.approx(1 / 3)
    assert body["fpr"] == pytest.approx(1 / 3)


def test_convergence():
    resp = client.post("/convergence", json={"alpha": 0.5, "beta": 1, "k": 2})
    assert resp.status_code == 200
    assert resp.json()["probability"] == pytest.approx(0.75)
    assert client.post("/convergence", json={"alpha": 2, "beta": 1, "k": 2}).status_code == 422


def test_simulate_matches_cli_run():
    brief = json.loads(DEMO_BRIEF.read_text(encoding="utf-8"))
    fixtures = json.loads(DEMO_FIXTURES.read_text(encoding="utf-8"))
    resp = client.post("/simulate", json={"brief": brief, "fixtures": fixtures, "total": 6})
    assert resp.status_code == 200
    body = resp.json()
    assert [c["count"] for c in body["allocation"]["counts"]] == [2, 2, 2]
    assert body["metrics"] == {"fpr": 0.4, "ddr": 0.0, "lc": 3}


def test_simulate_rejects_bad_fixtures():
    resp = client.post("/simulate", json={"brief": {}, "fixtures": {"searches": {"k": {"latency_ms": -1}}}})
    assert resp.status_code == 422


def test_simulate_with_a_budget_below_the_default_locale_cap():
    brief = {"locale_mix": [{"country": "tr", "language": "tr", "weight": 2},
                            {"country": "de", "language": "de", "weight": 1}]}
    fixtures = {
        "locales": {"tr-tr": {"keywords": ["t1", "t2"]}, "de-de": {"keywords": ["d1"]}},
        "searches": {k: {"results": [{"url": f"https://site-{k}.org/"}]} for k in ("t1", "t2", "d1")},
    }
    resp = client.post("/simulate", json={"brief": brief, "fixtures": fixtures, "total": 3})
    assert resp.status_code == 200
    assert [c["count"] for c in resp.json()["allocation"]["counts"]] == [2, 1]
    assert client.post(
        "/simulate", json={"brief": brief, "fixtures": fixtures, "total": 3, "max_locales": 4}
    ).status_code == 422
