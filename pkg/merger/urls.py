"""Host, registrable domain and TLD extraction."""
from typing import Iterable, Optional
from urllib.parse import urlsplit
from pydantic import BaseModel, ConfigDict
from .errors import MalformedUrl

DEFAULT_MULTI_LABEL_SUFFIXES = frozenset({"co.uk", "com.tr", "com.au", "co.jp", "ac.uk"})

_FORBIDDEN = set(" \t\r\n/\\@:?#[]{}<>%\"'|^`")


class UrlParts(BaseModel):
    model_config = ConfigDict(frozen=True)

    host: str
    registrable_domain: str
    tld: str


def _fold(text: str) -> str:
    # IDN labels are kept as-is; only ASCII letters are case-folded
    return "".join(c.lower() if c.isascii() else c for c in text)


def _extract_host(url: str) -> str:
    raw = url.strip()
    if "://" not in raw:
        raw = "//" + raw
    try:
        netloc = urlsplit(raw).netloc
    except ValueError as e:
        raise MalformedUrl(f"Cannot parse URL {url!r}: {e}") from e
    host = netloc.rpartition("@")[2]
    if host.startswith("["):
        raise MalformedUrl(f"IP literal hosts carry no domain: {url!r}")
    host = host.split(":", 1)[0].rstrip(".")
    return _fold(host)


def parse_url_parts(url: str, suffixes: Optional[Iterable[str]] = None) -> UrlParts:
    if not url or not url.strip():
        raise MalformedUrl("URL is empty")
    host = _extract_host(url)
    if not host or any(c in _FORBIDDEN for c in host):
        raise MalformedUrl(f"No host can be extracted from {url!r}")
    labels = host.split(".")
    if any(not label for label in labels):
        raise MalformedUrl(f"Host {host!r} has an empty label")

    if labels[0] == "www" and len(labels) > 1:
        labels = labels[1:]
    table = DEFAULT_MULTI_LABEL_SUFFIXES if suffixes is None else frozenset(s.lower() for s in suffixes)
    keep = 2
    if len(labels) >= 3 and ".".join(labels[-2:]) in table:
        keep = 3
    return UrlParts(
        host=host,
        registrable_domain=".".join(labels[-keep:]),
        tld=labels[-1],
    )
