"""Rate-limited, paginated clients for the USPTO search and office action APIs.

Both clients run in two modes behind one interface: LIVE issues HTTPS
requests through a retrying transport, FIXTURE serves canned payloads in the
same shape from disk, keyed by (endpoint, normalized query, page).  Decode
logic is shared so fixtures exercise the exact production path.
"""

from __future__ import annotations

import hashlib
import json
import random
import re
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import requests

from .records import (
    ApplicationNumber,
    ClaimSet,
    PatentRecord,
    PublicationNumber,
    normalize_application_number,
    normalize_publication_number,
)

MODE_LIVE = "LIVE"
MODE_FIXTURE = "FIXTURE"

DEFAULT_BULK_URL = "https://developer.uspto.gov/ibd-api/v1/application/publications"
DEFAULT_OA_URL = "https://developer.uspto.gov/oa-citations/v1/records"


class HttpError(RuntimeError):
    """Transport failure after the retry budget is spent."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


class RateLimited(HttpError):
    """Upstream kept answering 429 until the retry budget ran out."""


class DecodeError(ValueError):
    """Payload arrived but does not match the expected shape."""


@dataclass(frozen=True)
class SearchQuery:
    phrase: str
    page_start: int = 0
    page_size: int = 50

    def __post_init__(self):
        if not self.phrase:
            raise ValueError("query phrase must be non-empty")
        if self.page_start < 0:
            raise ValueError("page_start must be >= 0")
        if not 1 <= self.page_size <= 100:
            raise ValueError("page_size must be in 1..100")


@dataclass(frozen=True)
class OASection:
    statute: str
    text: str


@dataclass(frozen=True)
class OfficeAction:
    application_number: ApplicationNumber
    sections: tuple[OASection, ...]


@dataclass(frozen=True)
class RetryPolicy:
    max_attempts: int = 3
    backoff_base_ms: int = 250


@dataclass
class ClientConfig:
    bulk_url: str = DEFAULT_BULK_URL
    oa_url: str = DEFAULT_OA_URL
    api_key: str | None = None
    max_in_flight: int = 4
    rate_limit: float = 4.0          # requests per second
    retry: RetryPolicy = field(default_factory=RetryPolicy)
    mode: str = MODE_FIXTURE
    fixture_dir: Path | None = None

    def __post_init__(self):
        if self.max_in_flight < 1:
            raise ValueError("max_in_flight must be >= 1")
        if self.rate_limit <= 0:
            raise ValueError("rate_limit must be positive")
        if self.mode not in (MODE_LIVE, MODE_FIXTURE):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.mode == MODE_FIXTURE:
            if self.fixture_dir is None or not Path(self.fixture_dir).is_dir():
                raise ValueError(f"FIXTURE mode needs an existing fixture_dir, got {self.fixture_dir}")
            self.fixture_dir = Path(self.fixture_dir)


class TokenBucket:
    """Serializes egress so the observed request rate never exceeds `rate`.

    Clock and sleep are injectable so the rate property can be tested on a
    simulated timeline.
    """

    def __init__(
        self,
        rate: float,
        capacity: float = 1.0,
        clock: Callable[[], float] = time.monotonic,
        sleep: Callable[[float], None] = time.sleep,
    ):
        if rate <= 0 or capacity < 1:
            raise ValueError("rate must be > 0 and capacity >= 1")
        self.rate = rate
        self.capacity = capacity
        self._clock = clock
        self._sleep = sleep
        self._tokens = capacity
        self._updated = clock()
        self._lock = threading.Lock()

    def acquire(self) -> None:
        while True:
            with self._lock:
                now = self._clock()
                self._tokens = min(self.capacity, self._tokens + (now - self._updated) * self.rate)
                self._updated = now
                # tolerance keeps the refill from spinning when the float
                # increment underflows right below 1.0
                if self._tokens >= 1.0 - 1e-9:
                    self._tokens -= 1.0
                    return
                wait = (1.0 - self._tokens) / self.rate
            self._sleep(wait)


def normalized_phrase(phrase: str) -> str:
    return re.sub(r"\s+", " ", phrase.strip().lower())


def phrase_slug(phrase: str) -> str:
    return hashlib.sha1(normalized_phrase(phrase).encode("utf-8")).hexdigest()[:16]


_RETRYABLE = {429, 500, 502, 503, 504}


class HttpTransport:
    """GET with bounded concurrency, token-bucket pacing, and retries.

    Retries cover 429/5xx/timeouts with exponential backoff plus jitter;
    anything else fails immediately.
    """

    def __init__(
        self,
        cfg: ClientConfig,
        session: requests.Session | None = None,
        sleep: Callable[[float], None] = time.sleep,
        limiter: TokenBucket | None = None,
    ):
        self.cfg = cfg
        self.session = session or requests.Session()
        self._sleep = sleep
        self._limiter = limiter or TokenBucket(cfg.rate_limit)
        self._slots = threading.Semaphore(cfg.max_in_flight)
        self._jitter = random.Random()

    def request(self, url: str, params: dict | None = None, headers: dict | None = None):
        merged = dict(headers or {})
        if self.cfg.api_key:
            merged["X-API-KEY"] = self.cfg.api_key
        last_status = None
        for attempt in range(self.cfg.retry.max_attempts):
            self._limiter.acquire()
            with self._slots:
                try:
                    resp = self.session.get(url, params=params, headers=merged, timeout=30)
                except requests.Timeout:
                    last_status = "timeout"
                    resp = None
                except requests.RequestException as exc:
                    raise HttpError(f"GET {url} failed: {exc}") from exc
            if resp is not None:
                last_status = resp.status_code
                if resp.status_code == 200:
                    return resp
                if resp.status_code not in _RETRYABLE:
                    raise HttpError(f"GET {url} -> HTTP {resp.status_code}", status=resp.status_code)
            if attempt + 1 < self.cfg.retry.max_attempts:
                backoff = self.cfg.retry.backoff_base_ms / 1000.0 * (2 ** attempt)
                self._sleep(backoff * (1.0 + self._jitter.random() * 0.25))
        if last_status == 429:
            raise RateLimited(f"GET {url} rate-limited after {self.cfg.retry.max_attempts} attempts", status=429)
        raise HttpError(f"GET {url} failed after {self.cfg.retry.max_attempts} attempts (last: {last_status})")

    def get_json(self, url: str, params: dict) -> dict:
        resp = self.request(url, params=params)
        try:
            return resp.json()
        except ValueError as exc:
            raise DecodeError(f"non-JSON payload from {url}") from exc


def _decode_stub(doc: dict) -> PatentRecord:
    try:
        app = normalize_application_number(str(doc["applicationNumber"]))
        pub = normalize_publication_number(str(doc["publicationNumber"]))
        abstract = doc.get("abstract") or ""
        claims_text = doc.get("claims") or ""
    except (KeyError, TypeError, ValueError) as exc:
        raise DecodeError(f"bad search doc: {exc}") from exc
    return PatentRecord(
        application_number=app,
        publication_number=pub,
        abstract=abstract,
        claims=ClaimSet.from_text(claims_text) if claims_text else None,
    )


def decode_search_payload(payload: dict) -> list[PatentRecord]:
    try:
        docs = payload["response"]["docs"]
    except (KeyError, TypeError) as exc:
        raise DecodeError("search payload missing response.docs") from exc
    if not isinstance(docs, list):
        raise DecodeError("response.docs is not a list")
    return [_decode_stub(d) for d in docs]


def decode_office_actions(payload: dict, app: ApplicationNumber) -> list[OfficeAction]:
    # statute labels are classified here so fixtures and LIVE responses run
    # through the same bucketing
    from .rejections import classify_statute

    try:
        actions = payload["officeActions"]
    except (KeyError, TypeError) as exc:
        raise DecodeError("office action payload missing officeActions") from exc
    out = []
    for oa in actions:
        sections = []
        for sec in oa.get("sections", []):
            try:
                label = sec["statute"]
                text = sec["text"]
            except (KeyError, TypeError) as exc:
                raise DecodeError(f"bad office action section: {exc}") from exc
            if not text:
                raise DecodeError("office action section with empty text")
            sections.append(OASection(statute=classify_statute(label), text=text))
        out.append(OfficeAction(application_number=app, sections=tuple(sections)))
    return out


class BulkSearchClient:
    """Phrase search against the bulk-data publication index."""

    def __init__(self, cfg: ClientConfig, transport: HttpTransport | None = None):
        self.cfg = cfg
        self._transport = transport or (HttpTransport(cfg) if cfg.mode == MODE_LIVE else None)

    def search_applications(self, q: SearchQuery) -> list[PatentRecord]:
        if self.cfg.mode == MODE_FIXTURE:
            payload = self._fixture_payload(q)
        else:
            payload = self._transport.get_json(
                self.cfg.bulk_url,
                params={"query": q.phrase, "start": q.page_start, "rows": q.page_size},
            )
        records = decode_search_payload(payload)
        if len(records) > q.page_size:
            raise DecodeError(f"page returned {len(records)} docs for page_size={q.page_size}")
        return records

    def _fixture_payload(self, q: SearchQuery) -> dict:
        if q.page_start % q.page_size != 0:
            raise ValueError("fixture paging requires page_start aligned to page_size")
        page = q.page_start // q.page_size
        path = Path(self.cfg.fixture_dir) / "bulk_search" / phrase_slug(q.phrase) / f"page_{page}.json"
        if not path.exists():
            return {"response": {"docs": [], "numFound": 0, "start": q.page_start}}
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise DecodeError(f"bad fixture {path}: {exc}") from exc

    def iter_all(self, phrase: str, page_size: int = 50, limit: int | None = None):
        """Exhaustive pagination; stops on the first short or empty page."""
        start = 0
        yielded = 0
        while True:
            page = self.search_applications(SearchQuery(phrase, start, page_size))
            for rec in page:
                yield rec
                yielded += 1
                if limit is not None and yielded >= limit:
                    return
            if len(page) < page_size:
                return
            start += page_size


class OfficeActionClient:
    """Office action lookup by application serial."""

    def __init__(self, cfg: ClientConfig, transport: HttpTransport | None = None):
        self.cfg = cfg
        self._transport = transport or (HttpTransport(cfg) if cfg.mode == MODE_LIVE else None)

    def fetch_office_actions(self, app: ApplicationNumber) -> list[OfficeAction]:
        if self.cfg.mode == MODE_FIXTURE:
            path = Path(self.cfg.fixture_dir) / "office_actions" / f"{app}.json"
            if not path.exists():
                return []
            try:
                payload = json.loads(path.read_text(encoding="utf-8"))
            except json.JSONDecodeError as exc:
                raise DecodeError(f"bad fixture {path}: {exc}") from exc
        else:
            payload = self._transport.get_json(self.cfg.oa_url, params={"applicationNumber": str(app)})
        return decode_office_actions(payload, app)
