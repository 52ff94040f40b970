"""Top-N keyphrase extraction from abstracts and negative-query composition.

Scoring is plain tf-idf over 1-3 gram candidates against a document
frequency table built from the run's base-patent abstracts.  A shorter
candidate that only ever occurs inside a longer one (equal term frequency)
is pruned so maximal phrases win.  The same line-protocol plug as the
rejection extractor can swap in an embedding-based scorer.
"""

from __future__ import annotations

import math
import re
import subprocess
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from ._stopwords import STOPWORDS
from .uspto import SearchQuery

MAX_NGRAM = 3

_TOKEN = re.compile(r"[a-z][a-z0-9]*")


class EmptyAbstract(ValueError):
    """Raised when keyword extraction is asked to score an empty abstract."""


@dataclass(frozen=True)
class KeywordList:
    terms: tuple[tuple[str, float], ...]
    n: int

    def __post_init__(self):
        if len(self.terms) > self.n:
            raise ValueError("more terms than requested")
        weights = [w for _, w in self.terms]
        if any(w < 0 for w in weights):
            raise ValueError("weights must be >= 0")
        if any(a < b for a, b in zip(weights, weights[1:])):
            raise ValueError("weights must be non-increasing")
        phrases = [p for p, _ in self.terms]
        if len(set(phrases)) != len(phrases):
            raise ValueError("duplicate phrases")
        if any(p != p.lower() for p in phrases):
            raise ValueError("phrases must be lowercased")

    def phrases(self) -> list[str]:
        return [p for p, _ in self.terms]


@dataclass
class CorpusStats:
    """Document frequencies of candidate phrases over the run's abstracts."""

    n_docs: int
    df: dict[str, int]

    def idf(self, phrase: str) -> float:
        return math.log((1 + self.n_docs) / (1 + self.df.get(phrase, 0))) + 1.0


def tokenize(text: str) -> list[str]:
    return _TOKEN.findall(text.lower())


def candidate_grams(tokens: Sequence[str]) -> Counter:
    """Term frequencies of stopword-free 1..3-grams."""
    counts: Counter = Counter()
    for size in range(1, MAX_NGRAM + 1):
        for i in range(len(tokens) - size + 1):
            gram = tokens[i: i + size]
            if any(t in STOPWORDS for t in gram):
                continue
            counts[" ".join(gram)] += 1
    return counts


def build_corpus_stats(abstracts: Iterable[str]) -> CorpusStats:
    df: Counter = Counter()
    n = 0
    for abstract in abstracts:
        n += 1
        df.update(set(candidate_grams(tokenize(abstract))))
    return CorpusStats(n_docs=n, df=dict(df))


def save_corpus_stats(stats: CorpusStats, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# documents: {stats.n_docs}\n")
        for term in sorted(stats.df):
            fh.write(f"{term}\t{stats.df[term]}\n")


def load_corpus_stats(path: str | Path) -> CorpusStats:
    df: dict[str, int] = {}
    n_docs = 0
    with open(path, "r", encoding="utf-8") as fh:
        head = fh.readline().strip()
        m = re.match(r"# documents:\s*(\d+)$", head)
        if not m:
            raise ValueError(f"bad corpus stats header: {head!r}")
        n_docs = int(m.group(1))
        for line in fh:
            term, _, count = line.rstrip("\n").partition("\t")
            df[term] = int(count)
    return CorpusStats(n_docs=n_docs, df=df)


def _prune_subsumed(counts: Counter) -> Counter:
    """Drop grams that only ever appear inside a longer gram (equal tf)."""
    kept = Counter(counts)
    by_len = sorted(counts, key=lambda p: len(p.split()))
    for phrase in by_len:
        toks = tuple(phrase.split())
        for other in counts:
            otoks = tuple(other.split())
            if len(otoks) <= len(toks) or counts[other] != counts[phrase]:
                continue
            windows = (otoks[i: i + len(toks)] for i in range(len(otoks) - len(toks) + 1))
            if toks in windows:
                del kept[phrase]
                break
    return kept


def extract_keywords(abstract: str, n: int = 5, corpus_stats: CorpusStats | None = None) -> KeywordList:
    """Top-n tf-idf keyphrases, ties broken lexicographically."""
    if not abstract or not abstract.strip():
        raise EmptyAbstract("cannot extract keywords from an empty abstract")
    if n < 1:
        raise ValueError("n must be >= 1")
    stats = corpus_stats or CorpusStats(n_docs=0, df={})
    counts = _prune_subsumed(candidate_grams(tokenize(abstract)))
    scored = [(phrase, tf * stats.idf(phrase)) for phrase, tf in counts.items()]
    scored.sort(key=lambda pw: (-pw[1], pw[0]))
    return KeywordList(terms=tuple(scored[:n]), n=n)


def build_negative_query(kw: KeywordList, page_size: int = 50) -> SearchQuery:
    """OR of quoted phrases, strongest keyword first."""
    if not kw.terms:
        raise ValueError("keyword list is empty")
    phrase = " OR ".join(f'"{p}"' for p in kw.phrases())
    return SearchQuery(phrase=phrase, page_start=0, page_size=page_size)


class ExternalKeywordExtractor:
    """Line-protocol plug for an external (e.g. embedding-based) scorer.

    Same framing as the rejection extractor's plug: the abstract is written
    line by line (internal blank lines dropped) and terminated by one blank
    line; the process answers with a single line of tab-separated ranked
    fields, each `phrase` or `phrase=weight`.  Missing weights fall back to
    rank order.
    """

    def __init__(self, cmd: list[str]):
        self.cmd = list(cmd)
        self._proc: subprocess.Popen | None = None

    def _ensure(self) -> subprocess.Popen:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = subprocess.Popen(
                self.cmd,
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                text=True,
                bufsize=1,
            )
        return self._proc

    def __call__(self, abstract: str, n: int = 5, corpus_stats: CorpusStats | None = None) -> KeywordList:
        if not abstract or not abstract.strip():
            raise EmptyAbstract("cannot extract keywords from an empty abstract")
        proc = self._ensure()
        assert proc.stdin is not None and proc.stdout is not None
        for line in abstract.splitlines():
            if line.strip():
                proc.stdin.write(line + "\n")
        proc.stdin.write("\n")
        proc.stdin.flush()
        answer = proc.stdout.readline().rstrip("\n")
        fields = [f for f in answer.split("\t") if f.strip()]
        parsed: list[tuple[str, float]] = []
        seen: set[str] = set()
        for rank, field in enumerate(fields):
            phrase, _, weight_s = field.partition("=")
            phrase = phrase.strip().lower()
            if not phrase or phrase in seen:
                continue
            seen.add(phrase)
            weight = float(weight_s) if weight_s else float(len(fields) - rank)
            parsed.append((phrase, weight))
        parsed.sort(key=lambda pw: (-pw[1], pw[0]))
        return KeywordList(terms=tuple(parsed[:n]), n=n)

    def close(self) -> None:
        if self._proc is not None:
            if self._proc.stdin:
                self._proc.stdin.close()
            self._proc.wait(timeout=5)
            self._proc = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
