"""End-to-end dataset construction.

Seed query -> base patents -> positives from 102 rejections -> negatives
from keyword queries -> k-slot rows.  Per-patent failures are tallied and
never abort the crawl; rows come out sorted by application number so a
fixture-mode build is byte-reproducible.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

from .gpatents import ClaimsFetcher, NoClaims, NotFound, PageClientConfig
from .keywords import (
    CorpusStats,
    EmptyAbstract,
    build_corpus_stats,
    build_negative_query,
    extract_keywords,
)
from .records import (
    ClaimSet,
    DatasetRow,
    PatentRecord,
    PublicationNumber,
    Slot,
    validate_row,
)
from .rejections import extract_cited_publication, find_102_rejections
from .uspto import (
    BulkSearchClient,
    ClientConfig,
    DecodeError,
    HttpError,
    OfficeActionClient,
)

log = logging.getLogger(__name__)


class TooManyPositives(ValueError):
    """More cited positives than slots in the row."""


@dataclass(frozen=True)
class PositiveSample:
    """A cited anticipating patent: resolved number, fetched claims, and the
    rejection text that cited it."""

    pub: PublicationNumber
    claims: ClaimSet
    rejection_text: str


@dataclass
class BuildConfig:
    seed_query: str
    k: int = 25
    max_base_patents: int = 100
    seed: int = 0
    keyword_count: int = 5
    negative_quota_factor: float = 2.0   # request this multiple before filtering
    page_size: int = 50
    workers: int = 1
    bulk: ClientConfig = field(default_factory=ClientConfig)
    office_actions: ClientConfig = field(default_factory=ClientConfig)
    pages: PageClientConfig = field(default_factory=PageClientConfig)

    def __post_init__(self):
        if not self.seed_query:
            raise ValueError("seed_query must be non-empty")
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.max_base_patents < 1:
            raise ValueError("max_base_patents must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class BuildReport:
    rows_built: int = 0
    rows_with_positive: int = 0
    rows_with_two_positives: int = 0
    extraction_failures: int = 0
    fetch_failures: int = 0
    underfilled_rows: int = 0
    skipped_missing_claims: int = 0
    keyword_failures: int = 0
    rows_failed: int = 0

    def merge(self, other: "BuildReport") -> None:
        for name in self.__dataclass_fields__:
            setattr(self, name, getattr(self, name) + getattr(other, name))

    def to_json_dict(self) -> dict:
        return asdict(self)


def filter_negatives(
    candidates: Sequence[PatentRecord],
    base: PatentRecord,
    positives: Sequence[PublicationNumber],
) -> list[PatentRecord]:
    """Drop the base itself, cited positives, duplicates, and claimless
    candidates; keep the incoming order otherwise."""
    excluded = {str(base.publication_number)} | {str(p) for p in positives}
    seen: set[str] = set()
    out = []
    for cand in candidates:
        key = str(cand.publication_number)
        if key in excluded or key in seen:
            continue
        if cand.claims is None or not cand.claims.text.strip():
            continue
        seen.add(key)
        out.append(cand)
    return out


def build_row(
    base: PatentRecord,
    positives: Sequence[PositiveSample],
    negatives: Sequence[PatentRecord],
    k: int,
) -> DatasetRow:
    """Pack a row: nulls at the lowest slots, then negatives, positives on top."""
    p = len(positives)
    if p > k:
        raise TooManyPositives(f"{p} positives exceed k={k}")
    wanted_neg = k - p
    negs = list(negatives[:wanted_neg])
    n_null = wanted_neg - len(negs)
    slots = [Slot() for _ in range(n_null)]
    slots += [Slot(pub=n.publication_number, claims=n.claims, label=0) for n in negs]
    slots += [Slot(pub=ps.pub, claims=ps.claims, label=1) for ps in positives]
    row = DatasetRow(
        base=base,
        k=k,
        slots=slots,
        rejection_texts=[ps.rejection_text for ps in positives],
        underfilled=n_null > 0,
    )
    validate_row(row)
    return row


def collect_base_patents(
    bulk: BulkSearchClient, cfg: BuildConfig, report: BuildReport
) -> list[PatentRecord]:
    bases = []
    for stub in bulk.iter_all(cfg.seed_query, page_size=cfg.page_size):
        if stub.claims is None or not stub.claims.text.strip():
            report.skipped_missing_claims += 1
            continue
        bases.append(stub)
        if len(bases) >= cfg.max_base_patents:
            break
    return bases


def gather_positives(
    base: PatentRecord,
    oa_client: OfficeActionClient,
    fetcher: ClaimsFetcher,
    report: BuildReport,
    extractor: Callable = extract_cited_publication,
) -> list[PositiveSample]:
    try:
        actions = oa_client.fetch_office_actions(base.application_number)
    except (HttpError, DecodeError) as exc:
        log.warning("office action fetch failed for %s: %s", base.application_number, exc)
        report.fetch_failures += 1
        return []
    positives: list[PositiveSample] = []
    seen: set[str] = set()
    for oa in actions:
        for rejection in find_102_rejections(oa):
            outcome = extractor(rejection.rejection_text)
            if outcome.citation is None:
                report.extraction_failures += 1
                continue
            try:
                fetched = fetcher.fetch_claims(outcome.citation)
            except (NotFound, NoClaims, HttpError, DecodeError) as exc:
                log.warning("claims fetch failed for %s: %s", outcome.citation, exc)
                report.fetch_failures += 1
                continue
            key = str(fetched.resolved)
            if key in seen:
                continue
            seen.add(key)
            positives.append(
                PositiveSample(
                    pub=fetched.resolved,
                    claims=fetched.claims,
                    rejection_text=rejection.rejection_text,
                )
            )
    return positives


def mine_negatives(
    base: PatentRecord,
    positives: Sequence[PositiveSample],
    bulk: BulkSearchClient,
    stats: CorpusStats,
    cfg: BuildConfig,
    report: BuildReport,
    keyword_fn: Callable = extract_keywords,
) -> list[PatentRecord]:
    needed = cfg.k - len(positives)
    if needed <= 0:
        return []
    try:
        kws = keyword_fn(base.abstract, n=cfg.keyword_count, corpus_stats=stats)
        if not kws.terms:
            raise EmptyAbstract("no candidate phrases")
    except EmptyAbstract:
        report.keyword_failures += 1
        return []
    query = build_negative_query(kws, page_size=cfg.page_size)
    quota = math.ceil(needed * cfg.negative_quota_factor)
    candidates = list(bulk.iter_all(query.phrase, page_size=cfg.page_size, limit=quota))
    return filter_negatives(candidates, base, [p.pub for p in positives])[:needed]


def build_dataset(
    cfg: BuildConfig,
    extractor: Callable = extract_cited_publication,
    keyword_fn: Callable = extract_keywords,
) -> tuple[list[DatasetRow], BuildReport]:
    report = BuildReport()
    bulk = BulkSearchClient(cfg.bulk)
    oa_client = OfficeActionClient(cfg.office_actions)
    fetcher = ClaimsFetcher(cfg.pages)

    bases = collect_base_patents(bulk, cfg, report)
    log.info("seed query %r -> %d base patents", cfg.seed_query, len(bases))
    stats = build_corpus_stats(b.abstract for b in bases if b.abstract.strip())

    def process(base: PatentRecord) -> tuple[DatasetRow | None, BuildReport]:
        local = BuildReport()
        try:
            positives = gather_positives(base, oa_client, fetcher, local, extractor)
            negatives = mine_negatives(base, positives, bulk, stats, cfg, local, keyword_fn)
            row = build_row(base, positives, negatives, cfg.k)
        except Exception as exc:  # per-patent fault isolation
            log.warning("row build failed for %s: %s", base.application_number, exc)
            local.rows_failed += 1
            return None, local
        return row, local

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(process, bases))
    else:
        results = [process(base) for base in bases]

    rows = []
    for row, local in results:
        report.merge(local)
        if row is None:
            continue
        rows.append(row)
        report.rows_built += 1
        n_pos = row.positive_count()
        if n_pos >= 1:
            report.rows_with_positive += 1
        if n_pos >= 2:
            report.rows_with_two_positives += 1
        if row.underfilled:
            report.underfilled_rows += 1

    rows.sort(key=lambda r: int(str(r.base.application_number)))
    return rows, report
