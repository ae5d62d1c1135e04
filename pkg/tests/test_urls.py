import pytest
from hypothesis import given, strategies as st
from merger.codes import COUNTRY_CODES, LANGUAGE_CODES, is_country_code, is_language_code
from merger.errors import MalformedUrl
from merger.model import Locale, Source, domain_of
from merger.urls import parse_url_parts


def test_parse_strips_www_and_path():
    parts = parse_url_parts("https://www.example.de/page?x=1")
    assert parts.host == "www.example.de"
    assert parts.registrable_domain == "example.de"
    assert parts.tld == "de"


def test_multi_label_suffix():
    parts = parse_url_parts("http://news.bbc.co.uk/a")
    assert parts.registrable_domain == "bbc.co.uk"
    assert parts.tld == "uk"


def test_two_label_host():
    parts = parse_url_parts("https://example.com")
    assert (parts.registrable_domain, parts.tld) == ("example.com", "com")


def test_suffix_table_is_extensible():
    assert parse_url_parts("https://shop.example.com.br/x").registrable_domain == "com.br"
    assert parse_url_parts("https://shop.example.com.br/x", suffixes={"com.br"}).registrable_domain == "example.com.br"


def test_port_and_userinfo_are_ignored():
    assert parse_url_parts("https://user:pw@Www.Example.ORG:8443/x").registrable_domain == "example.org"


@pytest.mark.parametrize("url", ["", "   ", "ftp only-garbage", "http://", "https://a..b/"])
def test_malformed(url):
    with pytest.raises(MalformedUrl):
        parse_url_parts(url)


def test_domain_of_aggregator_paths():
    a = Source(url="https://www.tripadvisor.com/Hotel_Review-g123")
    b = Source(url="https://tripadvisor.com/Hotel_Review-g456")
    assert domain_of(a) == domain_of(b) == "tripadvisor.com"


def test_source_rejects_garbage_url():
    with pytest.raises(ValueError):
        Source(url="ftp only-garbage")


def test_case_insensitive():
    assert parse_url_parts("EXAMPLE.DE") == parse_url_parts("example.de")


labels = st.text(alphabet="abcdefghijklmnopqrstuvwxyz0123456789", min_size=1, max_size=8).filter(lambda s: s != "www")


@given(st.lists(labels, min_size=2, max_size=4))
def test_www_prefix_invariance(host_labels):
    host = ".".join(host_labels)
    assert parse_url_parts(f"https://www.{host}/p").registrable_domain == parse_url_parts(f"https://{host}/q").registrable_domain


@given(st.lists(labels, min_size=2, max_size=4))
def test_parse_is_idempotent(host_labels):
    parts = parse_url_parts("https://" + ".".join(host_labels))
    again = parse_url_parts(parts.registrable_domain)
    assert again.registrable_domain == parts.registrable_domain
    assert parts.tld == host_labels[-1]
    assert parts.registrable_domain.endswith(parts.tld)
    assert not parts.registrable_domain.startswith("www.")


def test_bundled_tables():
    assert len(COUNTRY_CODES) == 249
    assert len(LANGUAGE_CODES) == 183
    assert is_country_code("GB") and not is_country_code("uk")
    assert is_language_code("tr") and not is_language_code("zz")


def test_locale_tag_roundtrip():
    loc = Locale.parse("TR-tr")
    assert loc.tag == "tr-tr"
    with pytest.raises(ValueError):
        Locale(country="xx", language="tr")


def test_source_drops_invalid_metadata():
    s = Source(url="https://x.com", publisher_country="ZZ", language="english")
    assert s.publisher_country is None and s.language is None
    assert Source(url="https://x.com", publisher_country="FR").publisher_country == "fr"
