"""Claims lookup for cited publication numbers via a patent-page endpoint.

The page service follows web redirects to the current version of a patent
when the cited number is outdated, so the resolved number may differ from
the requested one.  Responses are cached on disk keyed by the requested
canonical number, both for politeness and so long crawls can resume.
"""

from __future__ import annotations

import json
import os
import re
import threading
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path

from .records import ClaimSet, PublicationNumber, normalize_publication_number
from .uspto import MODE_FIXTURE, MODE_LIVE, HttpError, HttpTransport, RetryPolicy, TokenBucket

DEFAULT_PAGE_URL = "https://patents.google.com"
MAX_REDIRECTS = 5


class NotFound(HttpError):
    """No page exists for the requested publication number."""


class NoClaims(ValueError):
    """The page exists but carries no claims region."""


@dataclass
class PageClientConfig:
    base_url: str = DEFAULT_PAGE_URL
    user_agent: str = "patpairs/0.1 (dataset builder)"
    rate_limit: float = 1.0          # scraping default, slower than the APIs
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    mode: str = MODE_FIXTURE
    fixture_dir: Path | None = None
    cache_dir: Path | None = None

    def __post_init__(self):
        if self.rate_limit <= 0:
            raise ValueError("rate_limit must be positive")
        if self.mode not in (MODE_LIVE, MODE_FIXTURE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_FIXTURE:
            if self.fixture_dir is None or not Path(self.fixture_dir).is_dir():
                raise ValueError(f"FIXTURE mode needs an existing fixture_dir, got {self.fixture_dir}")
            self.fixture_dir = Path(self.fixture_dir)
        if self.cache_dir is not None:
            self.cache_dir = Path(self.cache_dir)


@dataclass(frozen=True)
class FetchResult:
    requested: PublicationNumber
    resolved: PublicationNumber
    claims: ClaimSet
    from_cache: bool


# void elements never get a closing tag, so they must not bump the depth
_VOID_TAGS = {"br", "hr", "img", "input", "meta", "link", "area", "base", "col", "embed",
              "source", "track", "wbr"}


class _ClaimsRegion(HTMLParser):
    """Collects the text of the first element marked as the claims region
    (itemprop="claims" or a `claims` class)."""

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self._depth = 0
        self.found = False
        self.chunks: list[str] = []

    @staticmethod
    def _is_region(attrs) -> bool:
        a = dict(attrs)
        classes = (a.get("class") or "").split()
        return a.get("itemprop") == "claims" or "claims" in classes

    def handle_starttag(self, tag, attrs):
        if tag in _VOID_TAGS:
            if self._depth > 0:
                self.chunks.append(" ")  # tag boundaries separate text
            return
        if self._depth > 0:
            self._depth += 1
            self.chunks.append(" ")
        elif not self.found and self._is_region(attrs):
            self.found = True
            self._depth = 1

    def handle_endtag(self, tag):
        if self._depth > 0 and tag not in _VOID_TAGS:
            self._depth -= 1
            self.chunks.append(" ")

    def handle_data(self, data):
        if self._depth > 0:
            self.chunks.append(data)


def parse_claims_html(html: str) -> ClaimSet:
    """Extract normalized claims text (whitespace runs collapsed, trimmed)."""
    if not html:
        raise ValueError("html must be non-empty")
    parser = _ClaimsRegion()
    parser.feed(html)
    parser.close()
    if not parser.found:
        raise NoClaims("no claims region in page")
    text = " ".join("".join(parser.chunks).split())
    if not text:
        raise NoClaims("claims region is empty")
    return ClaimSet.from_text(text)


_FINAL_URL_PUB = re.compile(r"/patent/([A-Za-z0-9]+)")


class ClaimsFetcher:
    def __init__(self, cfg: PageClientConfig, transport: HttpTransport | None = None):
        self.cfg = cfg
        self._cache_lock = threading.Lock()
        if cfg.mode == MODE_LIVE:
            self._transport = transport or self._default_transport()
        else:
            self._transport = transport

    def _default_transport(self) -> HttpTransport:
        from .uspto import ClientConfig

        shim = ClientConfig(mode=MODE_LIVE, rate_limit=self.cfg.rate_limit, retry=self.cfg.retry)
        transport = HttpTransport(shim, limiter=TokenBucket(self.cfg.rate_limit))
        transport.session.headers["User-Agent"] = self.cfg.user_agent
        transport.session.max_redirects = MAX_REDIRECTS
        return transport

    # -- cache ---------------------------------------------------------------

    def _cache_path(self, pub: PublicationNumber) -> Path | None:
        if self.cfg.cache_dir is None:
            return None
        return Path(self.cfg.cache_dir) / f"{pub}.json"

    def _cache_read(self, pub: PublicationNumber) -> dict | None:
        path = self._cache_path(pub)
        if path is None or not path.exists():
            return None
        return json.loads(path.read_text(encoding="utf-8"))

    def _cache_write(self, pub: PublicationNumber, resolved: PublicationNumber, html: str) -> None:
        path = self._cache_path(pub)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        blob = json.dumps({"requested": str(pub), "resolved": str(resolved), "html": html},
                          sort_keys=True)
        tmp = path.with_suffix(".tmp")
        with self._cache_lock:
            tmp.write_text(blob, encoding="utf-8")
            os.replace(tmp, path)  # atomic per key, no torn reads

    # -- fetch ----------------------------------------------------------------

    def fetch_claims(self, pub: PublicationNumber) -> FetchResult:
        cached = self._cache_read(pub)
        if cached is not None:
            return FetchResult(
                requested=pub,
                resolved=normalize_publication_number(cached["resolved"]),
                claims=parse_claims_html(cached["html"]),
                from_cache=True,
            )
        if self.cfg.mode == MODE_FIXTURE:
            resolved, html = self._fixture_page(pub)
        else:
            resolved, html = self._live_page(pub)
        claims = parse_claims_html(html)
        self._cache_write(pub, resolved, html)
        return FetchResult(requested=pub, resolved=resolved, claims=claims, from_cache=False)

    def _fixture_page(self, pub: PublicationNumber) -> tuple[PublicationNumber, str]:
        root = Path(self.cfg.fixture_dir) / "patents"
        current = pub
        visited = {str(pub)}
        for _ in range(MAX_REDIRECTS + 1):
            redirect = root / f"{current}.redirect"
            page = root / f"{current}.html"
            if redirect.exists():
                target = normalize_publication_number(redirect.read_text(encoding="utf-8").strip())
                if str(target) in visited:
                    raise HttpError(f"redirect cycle at {target}")
                visited.add(str(target))
                current = target
                continue
            if page.exists():
                return current, page.read_text(encoding="utf-8")
            raise NotFound(f"no page for {current}", status=404)
        raise HttpError(f"more than {MAX_REDIRECTS} redirects from {pub}")

    def _live_page(self, pub: PublicationNumber) -> tuple[PublicationNumber, str]:
        url = f"{self.cfg.base_url.rstrip('/')}/patent/{pub}/en"
        try:
            resp = self._transport.request(url)
        except HttpError as exc:
            if exc.status == 404:
                raise NotFound(f"no page for {pub}", status=404) from exc
            raise
        m = _FINAL_URL_PUB.search(resp.url or "")
        resolved = normalize_publication_number(m.group(1)) if m else pub
        return resolved, resp.text
